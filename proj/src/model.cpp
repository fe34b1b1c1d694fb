#include "cvsteady/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvsteady/errors.hpp"

namespace cvsteady::model {

double thermal_occupation(double omega, double kelvin, OccupationMode mode) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "frequency must be positive");
    if (!(kelvin >= 0.0) || !std::isfinite(kelvin)) throw ValidationError("T", "temperature must be non-negative");
    if (kelvin == 0.0) return 0.0;
    const double ratio = constants::kBoltzmann * kelvin / (constants::kHbar * omega);
    if (mode == OccupationMode::HighT) return ratio;
    return 1.0 / std::expm1(1.0 / ratio);
}

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(field, what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const EffectiveParams& p) {
    require(positive(p.omega_m), "omega_m", "must be positive");
    require(positive(p.omega_lc), "omega_lc", "must be positive");
    require(std::isfinite(p.delta), "delta", "must be finite");
    require(positive(p.kappa), "kappa", "must be positive");
    require(positive(p.gamma_m), "gamma_m", "must be positive");
    require(positive(p.gamma_lc), "gamma_lc", "must be positive");
    require(non_negative(p.G), "G", "must be non-negative");
    require(non_negative(p.g), "g", "must be non-negative");
    require(non_negative(p.n_m), "n_m", "must be non-negative");
    require(non_negative(p.n_lc), "n_lc", "must be non-negative");
}

std::string describe(const EffectiveParams& p) {
    std::ostringstream os;
    os.precision(6);
    os << "{omega_m=" << p.omega_m << ", omega_lc=" << p.omega_lc << ", delta=" << p.delta << ", kappa=" << p.kappa
       << ", gamma_m=" << p.gamma_m << ", gamma_lc=" << p.gamma_lc << ", G=" << p.G << ", g=" << p.g
       << ", n_m=" << p.n_m << ", n_lc=" << p.n_lc << "}";
    return os.str();
}

EffectiveParams with_temperature(EffectiveParams p, double kelvin, double omega_m_hz, OccupationMode mode) {
    if (!positive(omega_m_hz)) throw ValidationError("omega_m_hz", "must be positive");
    const double scale = 2.0 * constants::kPi * omega_m_hz;
    p.n_m = thermal_occupation(p.omega_m * scale, kelvin, mode);
    p.n_lc = thermal_occupation(p.omega_lc * scale, kelvin, mode);
    return p;
}

EffectiveParams baseline_params(double G, double g) {
    EffectiveParams p;
    p.G = G;
    p.g = g;
    return with_temperature(p, 0.010, 1e6, OccupationMode::HighT);
}

Matrix build_drift(const EffectiveParams& p) {
    validate(p);
    Matrix a(6, 6);
    a(0, 0) = -p.kappa;
    a(0, 1) = p.delta;
    a(1, 0) = -p.delta;
    a(1, 1) = -p.kappa;
    a(1, 2) = p.G;
    a(2, 3) = p.omega_m;
    a(3, 0) = p.G;
    a(3, 2) = -p.omega_m;
    a(3, 3) = -p.gamma_m;
    a(3, 4) = -p.g;
    a(4, 5) = p.omega_lc;
    a(5, 2) = -p.g;
    a(5, 4) = -p.omega_lc;
    a(5, 5) = -p.gamma_lc;
    return a;
}

Matrix build_diffusion(const EffectiveParams& p) {
    validate(p);
    return Matrix::diagonal(
        {p.kappa, p.kappa, 0.0, p.gamma_m * (2.0 * p.n_m + 1.0), 0.0, p.gamma_lc * (2.0 * p.n_lc + 1.0)});
}

double stability_margin(const Matrix& a) { return linalg::max_real_part(linalg::eigenvalues(a)); }

namespace {

// The last Hurwitz minors are products of pairwise root sums and can sit
// twenty orders of magnitude below the coefficients when two lightly damped
// modes are resonant, so the chain is evaluated in quad precision.
#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

using WideMatrix = std::vector<std::vector<Wide>>;

std::vector<Wide> wide_characteristic_polynomial(const Matrix& a) {
    if (!a.is_square()) throw DimensionError("characteristic_polynomial: matrix is not square");
    const std::size_t n = a.rows();
    std::vector<Wide> c(n + 1, 0);
    c[0] = 1;
    WideMatrix m(n, std::vector<Wide>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        WideMatrix am(n, std::vector<Wide>(n, 0));
        Wide trace = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Wide sum = 0;
                for (std::size_t l = 0; l < n; ++l) sum += Wide(a(i, l)) * m[l][j];
                am[i][j] = sum;
            }
        for (std::size_t i = 0; i < n; ++i) trace += am[i][i];
        c[k] = -trace / Wide(k);
        for (std::size_t i = 0; i < n; ++i) am[i][i] += c[k];
        m = std::move(am);
    }
    return c;
}

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

// Gaussian elimination with partial pivoting.
Wide wide_determinant(WideMatrix m) {
    const std::size_t n = m.size();
    Wide det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (wide_abs(m[i][k]) > wide_abs(m[p][k])) p = i;
        if (m[p][k] == 0) return 0;
        if (p != k) {
            std::swap(m[p], m[k]);
            det = -det;
        }
        det *= m[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const Wide l = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= l * m[k][j];
        }
    }
    return det;
}

}  // namespace

std::vector<double> characteristic_polynomial(const Matrix& a) {
    const std::vector<Wide> wide = wide_characteristic_polynomial(a);
    return std::vector<double>(wide.begin(), wide.end());
}

std::vector<double> hurwitz_minors(const Matrix& a) {
    const std::vector<Wide> c = wide_characteristic_polynomial(a);
    const int n = static_cast<int>(c.size()) - 1;
    auto coeff = [&](int k) { return (k < 0 || k > n) ? Wide(0) : c[static_cast<std::size_t>(k)]; };

    std::vector<double> minors;
    minors.reserve(n);
    for (int k = 1; k <= n; ++k) {
        // H(i, j) = a_{2j−i} in 1-based indices.
        WideMatrix sub(k, std::vector<Wide>(k, 0));
        for (int i = 1; i <= k; ++i)
            for (int j = 1; j <= k; ++j) sub[i - 1][j - 1] = coeff(2 * j - i);
        minors.push_back(static_cast<double>(wide_determinant(std::move(sub))));
    }
    return minors;
}

bool routh_hurwitz_stable(const Matrix& a) {
    const auto minors = hurwitz_minors(a);
    return std::all_of(minors.begin(), minors.end(), [](double m) { return m > 0.0; });
}

std::complex<double> cavity_susceptibility(const EffectiveParams& p, double omega) {
    const std::complex<double> k_minus(p.kappa, -omega);
    return 1.0 / (p.delta * p.delta + k_minus * k_minus);
}

std::complex<double> mechanical_susceptibility(const EffectiveParams& p, double omega) {
    return p.omega_m / std::complex<double>(p.omega_m * p.omega_m - omega * omega, -p.gamma_m * omega);
}

std::complex<double> lc_susceptibility(const EffectiveParams& p, double omega) {
    return p.omega_lc / std::complex<double>(p.omega_lc * p.omega_lc - omega * omega, -p.gamma_lc * omega);
}

std::complex<double> effective_mech_inverse_susceptibility(const EffectiveParams& p, double omega) {
    return 1.0 / mechanical_susceptibility(p, omega) - p.G * p.G * p.delta * cavity_susceptibility(p, omega) -
           p.g * p.g * lc_susceptibility(p, omega);
}

std::optional<double> effective_mech_frequency(const EffectiveParams& p, double omega) {
    validate(p);
    const double w2 = omega * omega;
    const double cav = p.delta * p.delta + p.kappa * p.kappa - w2;
    const double optical = p.G * p.G * p.delta * p.omega_m * cav / (cav * cav + 4.0 * p.kappa * p.kappa * w2);
    const double lc = p.omega_lc * p.omega_lc - w2;
    const double electrical = p.g * p.g * p.omega_lc * p.omega_m * lc / (lc * lc + p.gamma_lc * p.gamma_lc * w2);
    const double radicand = p.omega_m * p.omega_m - optical - electrical;
    if (!(radicand >= 0.0)) return std::nullopt;
    return std::sqrt(radicand);
}

PointResult analyze_point(const EffectiveParams& p) {
    validate(p);
    PointResult out;
    try {
        const Matrix a = build_drift(p);
        out.stability_margin = stability_margin(a);
        out.stable = out.stability_margin < 0.0;
        if (!out.stable) return out;

        cvstate::CovarianceMatrix c(linalg::solve_lyapunov(a, build_diffusion(p)));
        const double nu = cvstate::partially_transposed_nu(c);
        const double n_m = cvstate::effective_occupation(c, cvstate::Mode::Mechanical);
        const double n_lc = cvstate::effective_occupation(c, cvstate::Mode::Electrical);
        if (!(nu > 0.0) || !std::isfinite(nu) || !std::isfinite(n_m) || !std::isfinite(n_lc))
            throw NumericalError("analyze_point: covariance diagnostics are not finite", 0);
        out.nu_min_raw = nu;
        out.log_negativity = std::max(0.0, -std::log(2.0 * nu));
        out.duan = cvstate::duan_sum(c);
        out.n_m_eff_raw = n_m;
        out.n_lc_eff_raw = n_lc;
        out.n_m_eff = std::max(0.0, n_m);
        out.n_lc_eff = std::max(0.0, n_lc);
        out.omega_m_eff = effective_mech_frequency(p, p.delta);
        out.covariance = std::move(c);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw NumericalError(std::string(e.what()) + " at " + describe(p), 0);
    }
    return out;
}

}  // namespace cvsteady::model
