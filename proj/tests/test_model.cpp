#include <algorithm>
#include <cmath>
#include <random>

#include "cvsteady/errors.hpp"
#include "cvsteady/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cvsteady;
using namespace cvsteady::model;
using linalg::Matrix;

namespace {

constexpr double kTwoPiMHz = 2.0 * constants::kPi * 1e6;

EffectiveParams at(double G, double g, double delta = 1.0, double kelvin = 0.010) {
    EffectiveParams p = baseline_params(G, g);
    p.delta = delta;
    return with_temperature(p, kelvin, 1e6, OccupationMode::HighT);
}

}  // namespace

TEST_CASE("thermal_occupation") {
    CHECK(thermal_occupation(kTwoPiMHz, 0.0, OccupationMode::Exact) == 0.0);
    CHECK(thermal_occupation(kTwoPiMHz, 0.0, OccupationMode::HighT) == 0.0);

    const double expected = 1.380649e-23 * 0.010 / (1.054571817e-34 * kTwoPiMHz);
    CHECK(thermal_occupation(kTwoPiMHz, 0.010, OccupationMode::HighT) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(208.3).epsilon(1e-3));

    // ħω = k_BT·ln 2 makes the Bose-Einstein denominator exactly one.
    const double kelvin = 0.010;
    const double omega = constants::kBoltzmann * kelvin * std::log(2.0) / constants::kHbar;
    CHECK(thermal_occupation(omega, kelvin, OccupationMode::Exact) == doctest::Approx(1.0).epsilon(1e-14));

    // Exact approaches the high-T value minus one half at large k_BT/ħω.
    const double hi = thermal_occupation(kTwoPiMHz, 10.0, OccupationMode::HighT);
    CHECK(thermal_occupation(kTwoPiMHz, 10.0, OccupationMode::Exact) == doctest::Approx(hi - 0.5).epsilon(1e-6));

    CHECK_THROWS_AS(thermal_occupation(0.0, 0.01, OccupationMode::HighT), ValidationError);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 0.01, OccupationMode::Exact), ValidationError);
    CHECK_THROWS_AS(thermal_occupation(1.0, -0.01, OccupationMode::Exact), ValidationError);
}

TEST_CASE("parameter validation names the offending field") {
    EffectiveParams p = baseline_params(0.5, 0.5);
    CHECK_NOTHROW(validate(p));
    p.kappa = 0.0;
    try {
        validate(p);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "kappa");
    }
    p = baseline_params(-0.1, 0.5);
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = baseline_params(0.5, 0.5);
    p.n_lc = std::nan("");
    CHECK_THROWS_AS(build_diffusion(p), ValidationError);
    p = baseline_params(0.5, 0.5);
    p.omega_lc = -1.0;
    CHECK_THROWS_AS(build_drift(p), ValidationError);
}

TEST_CASE("drift matrix entries") {
    const EffectiveParams p = at(0.6, 0.8, 0.9);
    const Matrix a = build_drift(p);
    CHECK(a(3, 0) == p.G);
    CHECK(a(1, 2) == p.G);
    CHECK(a(0, 1) == p.delta);
    CHECK(a(1, 0) == -p.delta);
    CHECK(a(3, 4) == -p.g);
    CHECK(a(5, 2) == -p.g);
    CHECK(a(4, 5) == p.omega_lc);
    CHECK(a(5, 4) == -p.omega_lc);
    CHECK(a.trace() == doctest::Approx(-2 * p.kappa - p.gamma_m - p.gamma_lc).epsilon(1e-15));
    CHECK(build_drift(at(0.5, 0.5)) == oracle::operating_drift());

    // Structural nonzeros (0-based); everything else must be exactly zero.
    const std::vector<std::pair<int, int>> pattern{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 3}, {3, 0},
                                                   {3, 2}, {3, 3}, {3, 4}, {4, 5}, {5, 2}, {5, 4}, {5, 5}};
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            const bool listed = std::find(pattern.begin(), pattern.end(), std::pair<int, int>(i, j)) != pattern.end();
            CHECK((a(i, j) != 0.0) == listed);
            if (a(i, j) != 0.0) ++nonzero;
        }
    CHECK(nonzero == 14);
}

TEST_CASE("uncoupled drift has the damped-oscillator spectrum") {
    const EffectiveParams p = at(0.0, 0.0);
    const auto s = linalg::eigenvalues(build_drift(p));
    const double wm = std::sqrt(4.0 - p.gamma_m * p.gamma_m) / 2.0;
    const double wl = std::sqrt(4.0 - p.gamma_lc * p.gamma_lc) / 2.0;
    const std::vector<std::complex<double>> expected{
        {-p.kappa, 1.0}, {-p.kappa, -1.0}, {-p.gamma_m / 2, wm}, {-p.gamma_m / 2, -wm}, {-p.gamma_lc / 2, wl},
        {-p.gamma_lc / 2, -wl}};
    CHECK(oracle::spectrum_distance(s, expected) < 1e-12);
    CHECK(stability_margin(build_drift(p)) == doctest::Approx(-p.gamma_m / 2).epsilon(1e-6));
}

TEST_CASE("diffusion matrix") {
    EffectiveParams p = at(0.5, 0.5, 1.0, 0.0);
    CHECK(build_diffusion(p) == Matrix::diagonal({0.1, 0.1, 0.0, 1e-6, 0.0, 1e-5}));
    p = at(0.5, 0.5);
    const Matrix d = build_diffusion(p);
    CHECK(d(3, 3) == doctest::Approx(1e-6 * (2 * oracle::high_t_occupation(0.010) + 1)).epsilon(1e-14));
    CHECK(d(2, 2) == 0.0);
    CHECK(d(4, 4) == 0.0);
    CHECK(oracle::max_abs_diff(d, oracle::operating_diffusion()) < 1e-18);
}

TEST_CASE("stability examples") {
    CHECK(stability_margin(build_drift(at(0.0, 0.0))) < 0.0);
    CHECK(stability_margin(build_drift(at(0.5, 0.5, 0.2))) > 0.0);
    CHECK(stability_margin(build_drift(at(0.5, 0.5, 1.0))) < 0.0);
}

TEST_CASE("Routh-Hurwitz examples") {
    CHECK(routh_hurwitz_stable(Matrix::diagonal({-1, -2, -3, -4, -5, -6})));
    Matrix a(6, 6);
    a(2, 2) = 0.5;
    CHECK_FALSE(routh_hurwitz_stable(a));
    Matrix b = Matrix::diagonal({-1, -2, -3, -4, -5, -6});
    b(4, 4) = 0.5;
    CHECK_FALSE(routh_hurwitz_stable(b));

    // Leverrier-Faddeev coefficients equal the elementary symmetric functions of the roots.
    const auto poly = characteristic_polynomial(Matrix::diagonal({1, 2, 3}));
    REQUIRE(poly.size() == 4);
    CHECK(poly[0] == 1.0);
    CHECK(poly[1] == doctest::Approx(-6.0));
    CHECK(poly[2] == doctest::Approx(11.0));
    CHECK(poly[3] == doctest::Approx(-6.0));
}

TEST_CASE("characteristic polynomial vanishes at the determinant oracle's roots") {
    const Matrix a = oracle::operating_drift(0.6, 0.8, 0.7);
    const auto poly = characteristic_polynomial(a);
    for (const auto& z : oracle::char_poly_roots(a)) {
        std::complex<double> v = 0.0;
        for (double c : poly) v = v * z + c;
        CHECK(std::abs(v) < 1e-10);
    }
}

TEST_CASE("Routh-Hurwitz agrees with the eigenvalue sign on a 50x50 (g, G) grid") {
    int compared = 0, skipped = 0, unstable = 0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const double g = 1.2 * i / 49.0, G = 1.2 * j / 49.0;
            const Matrix a = build_drift(at(G, g));
            const double margin = stability_margin(a);
            if (std::abs(margin) < 1e-9) {
                ++skipped;
                continue;
            }
            ++compared;
            if (margin > 0) ++unstable;
            CHECK(routh_hurwitz_stable(a) == (margin < 0.0));
        }
    CHECK(compared > 2400);
    CHECK(unstable > 100);
}

TEST_CASE("Routh-Hurwitz agrees with the eigenvalue sign on random parameters") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        EffectiveParams p = at(1.2 * u(rng), 1.2 * u(rng), 0.1 + 1.9 * u(rng));
        p.omega_lc = 0.5 + u(rng);
        p.kappa = 0.05 + 0.3 * u(rng);
        const Matrix a = build_drift(p);
        const double margin = stability_margin(a);
        if (std::abs(margin) < 1e-9) continue;
        CHECK(routh_hurwitz_stable(a) == (margin < 0.0));
    }
}

TEST_CASE("effective mechanical frequency") {
    CHECK(*effective_mech_frequency(at(0.0, 0.0), 0.7) == 1.0);

    const EffectiveParams p = at(0.6, 0.4);
    const double w = *effective_mech_frequency(p, 1.0);
    CHECK(w == doctest::Approx(std::sqrt(1.0 - 0.36 / 4)).epsilon(2e-3));
    CHECK(w == doctest::Approx(0.954).epsilon(0.005 / 0.954));

    // At ω = ω_LC the LC term has zero numerator.
    EffectiveParams with_g = p, without_g = p;
    without_g.g = 0.0;
    with_g.omega_lc = 1.3;
    without_g.omega_lc = 1.3;
    CHECK(*effective_mech_frequency(with_g, 1.3) == *effective_mech_frequency(without_g, 1.3));

    // Negative radicand is flagged, not thrown.
    EffectiveParams soft = at(0.0, 3.0);
    CHECK_FALSE(effective_mech_frequency(soft, 0.5).has_value());
}

TEST_CASE("effective frequency matches the real part of the effective susceptibility") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        EffectiveParams p = at(u(rng), u(rng), 0.2 + u(rng));
        p.omega_lc = 0.5 + u(rng);
        const double omega = 0.1 + 1.5 * u(rng);
        const double re = effective_mech_inverse_susceptibility(p, omega).real();
        const double radicand = p.omega_m * re + omega * omega;
        const auto w = effective_mech_frequency(p, omega);
        if (radicand < 0) {
            CHECK_FALSE(w.has_value());
        } else {
            REQUIRE(w.has_value());
            CHECK(*w * *w == doctest::Approx(radicand).epsilon(1e-10));
        }
    }
}

TEST_CASE("analyze_point at the operating point") {
    const PointResult r = analyze_point(at(0.5, 0.5));
    REQUIRE(r.stable);
    CHECK(r.stability_margin < 0.0);
    CHECK(*r.log_negativity == doctest::Approx(0.18).epsilon(0.02 / 0.18));
    CHECK(*r.n_m_eff == doctest::Approx(0.15).epsilon(0.02 / 0.15));
    CHECK(*r.n_lc_eff == doctest::Approx(0.08).epsilon(0.02 / 0.08));
    CHECK(r.omega_m_eff.has_value());
    REQUIRE(r.covariance.has_value());

    const Matrix k = linalg::solve_lyapunov_kronecker(oracle::operating_drift(), oracle::operating_diffusion());
    CHECK(oracle::max_abs_diff(r.covariance->matrix(), k) < 1e-8);
    CHECK(cvstate::physicality_margin(*r.covariance) >= -1e-9);
}

TEST_CASE("analyze_point flags unstable points without a state") {
    const PointResult r = analyze_point(at(0.5, 0.5, 0.2));
    CHECK_FALSE(r.stable);
    CHECK(r.stability_margin > 0.0);
    CHECK_FALSE(r.log_negativity.has_value());
    CHECK_FALSE(r.duan.has_value());
    CHECK_FALSE(r.n_m_eff.has_value());
    CHECK_FALSE(r.covariance.has_value());
}

TEST_CASE("analyze_point rejects invalid parameters") {
    EffectiveParams p = at(0.5, 0.5);
    p.gamma_m = -1.0;
    CHECK_THROWS_AS(analyze_point(p), ValidationError);
}

TEST_CASE("no electromechanical coupling means no mech-LC entanglement") {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int evaluated = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const PointResult r = analyze_point(at(0.8 * u(rng), 0.0, 0.2 + 1.8 * u(rng), 0.3 * u(rng)));
        if (!r.stable) continue;
        ++evaluated;
        CHECK(*r.log_negativity == 0.0);
    }
    CHECK(evaluated > 50);
}

TEST_CASE("every stable state is physical") {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const PointResult r = analyze_point(at(0.8 * u(rng), 0.8 * u(rng), 0.3 + 1.5 * u(rng), 0.1 * u(rng)));
        if (!r.stable) continue;
        CHECK(cvstate::physicality_margin(*r.covariance) >= -1e-9);
        CHECK(*r.duan >= 0.0);
        if (*r.duan < 2.0) CHECK(*r.log_negativity > 0.0);
    }
}

TEST_CASE("log-negativity does not increase with temperature") {
    for (const auto& [g, G] : {std::pair{0.8, 0.6}, std::pair{0.5, 0.5}}) {
        double previous = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 30; ++k) {
            const double kelvin = 1e-3 * std::pow(300.0, k / 29.0);
            const PointResult r = analyze_point(at(G, g, 1.0, kelvin));
            REQUIRE(r.stable);
            CHECK(*r.log_negativity <= previous + 1e-12);
            previous = *r.log_negativity;
        }
    }
}

TEST_CASE("analyze_point reports overflowing diagnostics with the parameter point") {
    EffectiveParams p = at(0.5, 0.5);
    p.n_m = 1e300;
    try {
        analyze_point(p);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("n_m=1e+300") != std::string::npos);
    }
}
