#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "cvsteady/errors.hpp"
#include "cvsteady/model.hpp"

namespace cvsteady::model {
namespace {

// Laser detuning consistency: ω_c − ω_l must match the requested Δ₀ to this
// fraction of ω_c (a few ulps of an optical frequency are unavoidable).
constexpr double kDetuningConsistency = 1e-12;

struct Iterate {
    std::complex<double> a;
    double q = 0.0;
    double delta = 0.0;
    double omega_lc = 0.0;
    double x_next = 0.0;
};

Iterate evaluate(double x, const DriveParams& d, double delta0, double e_amp, double bias_rate) {
    Iterate it;
    it.delta = delta0 - d.G0 * x;
    it.omega_lc = d.omega_lc_bare + 2.0 * d.g0 * x;
    if (!(it.omega_lc > 0.0)) {
        std::ostringstream os;
        os << "solve_semiclassical: effective LC frequency " << it.omega_lc << " rad/s is not positive (x_s = " << x
           << ")";
        throw UnphysicalError(os.str());
    }
    it.a = e_amp / std::complex<double>(d.kappa, it.delta);
    it.q = bias_rate / it.omega_lc;
    it.x_next = (d.G0 * std::norm(it.a) - d.g0 * it.q * it.q) / d.omega_m;
    return it;
}

// Bracketing fallback for when the damped iteration stalls or cycles, which
// happens once the slope of the x_s map exceeds one. The steady-state
// displacement is then a root of h(x) = f(x) − x on the physical domain
// ω′_LC > 0, x ≤ max f. Only crossings where h decreases are statically
// stable equilibria (slope of f below one); the one closest to zero is taken.
constexpr std::size_t kScanPoints = 4096;

std::optional<std::pair<double, std::size_t>> bracketed_fixed_point(const DriveParams& d, double delta0,
                                                                    double e_amp, double bias_rate) {
    const double x_hi = d.G0 * e_amp * e_amp / (d.kappa * d.kappa * d.omega_m);
    const double x_lo = d.g0 > 0.0 ? -d.omega_lc_bare / (2.0 * d.g0) : 0.0;
    if (!(x_hi > x_lo)) return std::nullopt;
    auto h = [&](double x) { return evaluate(x, d, delta0, e_amp, bias_rate).x_next - x; };

    // Open at x_lo, where ω′_LC vanishes.
    std::optional<std::pair<double, double>> best;
    double prev_x = x_hi, prev_h = h(x_hi);
    for (std::size_t k = 1; k < kScanPoints; ++k) {
        const double x = x_hi - (x_hi - x_lo) * static_cast<double>(k) / kScanPoints;
        const double hx = h(x);
        if (prev_h <= 0.0 && hx > 0.0) {
            const bool closer = !best || std::min(std::abs(x), std::abs(prev_x)) <
                                             std::min(std::abs(best->first), std::abs(best->second));
            if (closer) best = std::pair{x, prev_x};
        }
        prev_x = x;
        prev_h = hx;
    }
    if (!best) return std::nullopt;

    boost::uintmax_t iterations = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(h, best->first, best->second,
                                                            boost::math::tools::eps_tolerance<double>(52), iterations);
    return std::pair{0.5 * (lo + hi), static_cast<std::size_t>(iterations) + kScanPoints};
}

double rel(double residual, double scale) { return scale == 0.0 ? std::abs(residual) : std::abs(residual) / scale; }

}  // namespace

void validate(const DriveParams& d, double delta0) {
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!pos(d.omega_c)) throw ValidationError("omega_c", "must be positive");
    if (!pos(d.omega_l)) throw ValidationError("omega_l", "must be positive");
    if (!nonneg(d.P_l)) throw ValidationError("P_l", "must be non-negative");
    if (!pos(d.kappa)) throw ValidationError("kappa", "must be positive");
    if (!std::isfinite(d.V_bar)) throw ValidationError("V_bar", "must be finite");
    if (!pos(d.L)) throw ValidationError("L", "must be positive");
    if (!pos(d.R)) throw ValidationError("R", "must be positive");
    if (!pos(d.omega_lc_bare)) throw ValidationError("omega_lc_bare", "must be positive");
    if (!nonneg(d.G0)) throw ValidationError("G0", "must be non-negative");
    if (!nonneg(d.g0)) throw ValidationError("g0", "must be non-negative");
    if (!pos(d.omega_m)) throw ValidationError("omega_m", "must be positive");
    if (!std::isfinite(delta0)) throw ValidationError("delta0", "must be finite");
    if (std::abs((d.omega_c - d.omega_l) - delta0) > kDetuningConsistency * d.omega_c)
        throw ValidationError("omega_l", "omega_c - omega_l is inconsistent with the requested detuning");
}

double drive_amplitude(const DriveParams& d) {
    return std::sqrt(2.0 * d.P_l * d.kappa / (constants::kHbar * d.omega_l));
}

double charge_zero_point(const DriveParams& d) { return std::sqrt(constants::kHbar / (d.L * d.omega_lc_bare)); }

SemiclassicalState solve_semiclassical(const DriveParams& d, double delta0, const SemiclassicalOptions& opts) {
    validate(d, delta0);
    const double e_amp = drive_amplitude(d);
    const double bias_rate = charge_zero_point(d) * d.V_bar / constants::kHbar;

    auto finish = [&](double x, std::size_t iterations) {
        const Iterate fin = evaluate(x, d, delta0, e_amp, bias_rate);
        SemiclassicalState s;
        s.a_s = std::abs(fin.a);
        s.cavity_phase = std::arg(fin.a);
        s.x_s = x;
        s.q_s = fin.q;
        s.delta_eff = fin.delta;
        s.omega_lc_eff = fin.omega_lc;
        s.iterations = iterations;
        return s;
    };

    double x = 0.0;
    double step = 0.0;
    std::size_t k = 1;
    std::optional<UnphysicalError> unphysical;
    for (; k <= opts.max_iterations; ++k) {
        Iterate it;
        try {
            it = evaluate(x, d, delta0, e_amp, bias_rate);
        } catch (const UnphysicalError& e) {
            unphysical = e;
            break;
        }
        step = it.x_next - x;
        if (std::abs(step) <= opts.tolerance * (1.0 + std::abs(x))) {
            const SemiclassicalState s = finish(it.x_next, k);
            const double residual = semiclassical_residual(s, d, delta0);
            if (!(residual < 1e-10)) {
                throw ConvergenceError("solve_semiclassical: fixed point does not satisfy the steady-state relations",
                                       k, residual);
            }
            return s;
        }
        x += opts.damping * step;
        if (!std::isfinite(x)) break;
    }
    const std::size_t used = std::min(k, opts.max_iterations);

    if (opts.bracket_fallback) {
        if (const auto root = bracketed_fixed_point(d, delta0, e_amp, bias_rate)) {
            const SemiclassicalState s = finish(root->first, used + root->second);
            if (semiclassical_residual(s, d, delta0) < 1e-10) return s;
        }
    }
    if (unphysical) throw *unphysical;
    std::ostringstream os;
    os << "solve_semiclassical: no convergence after " << used << " iterations (last step " << step << ")";
    throw ConvergenceError(os.str(), used, std::abs(step));
}

double semiclassical_residual(const SemiclassicalState& s, const DriveParams& d, double delta0) {
    const double e_amp = drive_amplitude(d);
    const double bias_rate = charge_zero_point(d) * d.V_bar / constants::kHbar;
    const std::complex<double> a = std::polar(s.a_s, s.cavity_phase);

    const std::complex<double> a_rhs = e_amp / std::complex<double>(d.kappa, s.delta_eff);
    const double opt_force = d.G0 * std::norm(a);
    const double lc_force = d.g0 * s.q_s * s.q_s;
    const double x_rhs = (opt_force - lc_force) / d.omega_m;
    const double q_rhs = bias_rate / s.omega_lc_eff;
    const double delta_rhs = delta0 - d.G0 * s.x_s;
    const double wlc_rhs = d.omega_lc_bare + 2.0 * d.g0 * s.x_s;

    double worst = rel(std::abs(a - a_rhs), std::abs(a_rhs));
    worst = std::max(worst, rel(s.x_s - x_rhs, (std::abs(opt_force) + std::abs(lc_force)) / d.omega_m));
    worst = std::max(worst, rel(s.q_s - q_rhs, std::abs(q_rhs)));
    worst = std::max(worst, rel(s.delta_eff - delta_rhs, std::abs(delta0) + std::abs(d.G0 * s.x_s)));
    worst = std::max(worst, rel(s.omega_lc_eff - wlc_rhs, d.omega_lc_bare));
    worst = std::max(worst, std::abs(s.p_s) + std::abs(s.phi_s));
    return worst;
}

Couplings effective_couplings(const SemiclassicalState& s, const DriveParams& d) {
    return {std::sqrt(2.0) * d.G0 * s.a_s, 2.0 * d.g0 * s.q_s};
}

EffectiveParams to_effective(const SemiclassicalState& s, const DriveParams& d, double gamma_m, double kelvin,
                             OccupationMode mode) {
    const Couplings c = effective_couplings(s, d);
    const double w = d.omega_m;
    EffectiveParams p;
    p.omega_m = 1.0;
    p.omega_lc = s.omega_lc_eff / w;
    p.delta = s.delta_eff / w;
    p.kappa = d.kappa / w;
    p.gamma_m = gamma_m / w;
    p.gamma_lc = 2.0 * d.R / d.L / w;
    // A negative bias flips q_s; (q, φ) → (−q, −φ) maps that back onto g ≥ 0.
    p.G = std::abs(c.G) / w;
    p.g = std::abs(c.g) / w;
    return with_temperature(p, kelvin, w / (2.0 * constants::kPi), mode);
}

}  // namespace cvsteady::model
