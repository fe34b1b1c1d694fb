#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cvsteady/cvstate.hpp"
#include "cvsteady/linalg.hpp"

// Linearized opto-electro-mechanical model: a driven cavity (X, Y) coupled by
// radiation pressure to a mechanical oscillator (x, p), which is in turn
// capacitively coupled to a DC-biased LC circuit (q, φ).
namespace cvsteady::model {

using linalg::Matrix;

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kHbar = 1.054571817e-34;       // J·s
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

enum class OccupationMode { HighT, Exact };

/// Mean bath occupation of an oscillator at angular frequency `omega` (rad/s)
/// and temperature `kelvin`. HighT is k_BT/ħω; Exact is Bose–Einstein.
double thermal_occupation(double omega, double kelvin, OccupationMode mode);

/// Working parameters of the linearized model. Every rate is expressed in
/// units of the mechanical frequency, so omega_m is normally 1.
struct EffectiveParams {
    double omega_m = 1.0;
    double omega_lc = 1.0;
    double delta = 1.0;     ///< effective cavity detuning Δ
    double kappa = 0.1;     ///< cavity amplitude decay
    double gamma_m = 1e-6;
    double gamma_lc = 1e-5; ///< 2R/L
    double G = 0.0;         ///< optomechanical coupling √2·G₀·a_s
    double g = 0.0;         ///< electromechanical coupling 2·g₀·q_s
    double n_m = 0.0;       ///< mechanical bath occupation
    double n_lc = 0.0;      ///< LC bath occupation

    friend bool operator==(const EffectiveParams&, const EffectiveParams&) = default;
};

/// Throws ValidationError naming the first offending field.
void validate(const EffectiveParams& p);

std::string describe(const EffectiveParams& p);

/// Baseline operating point: κ = 0.1ω_m, γ_m = 1e−6ω_m, γ_LC = 1e−5ω_LC,
/// Δ = ω_LC = ω_m, bath occupations for ω_m/2π = 1 MHz at 10 mK (high-T).
EffectiveParams baseline_params(double G, double g);

/// Occupations of both baths at `kelvin`, with ω_m/2π = `omega_m_hz`.
EffectiveParams with_temperature(EffectiveParams p, double kelvin, double omega_m_hz, OccupationMode mode);

/// 6×6 drift matrix over (X, Y, x, p, q, φ).
Matrix build_drift(const EffectiveParams& p);

/// diag(κ, κ, 0, γ_m(2n̄_m+1), 0, γ_LC(2n̄_LC+1)).
Matrix build_diffusion(const EffectiveParams& p);

/// max Re λ over the drift spectrum; negative iff the linear dynamics settle.
double stability_margin(const Matrix& a);

/// Monic characteristic polynomial det(λI − A) by Leverrier–Faddeev;
/// coefficient k multiplies λ^(n−k), so element 0 is 1.
std::vector<double> characteristic_polynomial(const Matrix& a);

/// Routh–Hurwitz test on the characteristic polynomial of `a`: true iff every
/// leading principal minor of the Hurwitz matrix is positive.
bool routh_hurwitz_stable(const Matrix& a);

/// Leading principal minors Δ₁…Δₙ of the Hurwitz matrix.
std::vector<double> hurwitz_minors(const Matrix& a);

// Natural susceptibilities of the three subsystems at angular frequency ω.
std::complex<double> cavity_susceptibility(const EffectiveParams& p, double omega);
std::complex<double> mechanical_susceptibility(const EffectiveParams& p, double omega);
std::complex<double> lc_susceptibility(const EffectiveParams& p, double omega);

/// 1/χ_m^eff(ω) = 1/χ_m − G²Δ·χ_c − g²·χ_LC.
std::complex<double> effective_mech_inverse_susceptibility(const EffectiveParams& p, double omega);

/// Effective mechanical frequency at evaluation frequency ω, including the
/// optical-spring shift and the LC-induced shift. Empty when the radicand is
/// negative.
std::optional<double> effective_mech_frequency(const EffectiveParams& p, double omega);

struct PointResult {
    double stability_margin = 0.0;
    bool stable = false;
    // Filled only for stable points; clamped at zero for reporting.
    std::optional<double> log_negativity;
    std::optional<double> duan;
    std::optional<double> n_m_eff;
    std::optional<double> n_lc_eff;
    std::optional<double> omega_m_eff;
    // Unclamped values, retained for diagnostics.
    std::optional<double> nu_min_raw;
    std::optional<double> n_m_eff_raw;
    std::optional<double> n_lc_eff_raw;
    std::optional<cvstate::CovarianceMatrix> covariance;
};

/// Full steady-state diagnostics at one parameter point. Unstable points are
/// flagged and the Lyapunov solver is not invoked. Numerical failures are
/// rethrown as NumericalError annotated with the parameter point.
PointResult analyze_point(const EffectiveParams& p);

// ---------------------------------------------------------------------------
// Physical-level front end.

/// Drive and device parameters in SI units; angular frequencies in rad/s.
struct DriveParams {
    double omega_c = 0.0;        ///< cavity resonance
    double omega_l = 0.0;        ///< laser
    double P_l = 0.0;            ///< laser power, W
    double kappa = 0.0;          ///< cavity decay
    double V_bar = 0.0;          ///< DC bias, V
    double L = 0.0;              ///< inductance, H
    double R = 0.0;              ///< resistance, Ω
    double omega_lc_bare = 0.0;
    double G0 = 0.0;             ///< single-photon optomechanical coupling
    double g0 = 0.0;             ///< bare electromechanical coupling
    double omega_m = 0.0;
};

void validate(const DriveParams& d, double delta0);

/// E = √(2 P_l κ / ħω_l)
double drive_amplitude(const DriveParams& d);

/// q₀ = √(ħ / L ω_LC)
double charge_zero_point(const DriveParams& d);

struct SemiclassicalState {
    double a_s = 0.0;            ///< |⟨a⟩|, real and positive in the chosen phase reference
    double cavity_phase = 0.0;   ///< arg of E/(κ + iΔ) before rotating to that reference
    double x_s = 0.0;
    double q_s = 0.0;
    double p_s = 0.0;
    double phi_s = 0.0;
    double delta_eff = 0.0;      ///< Δ = Δ₀ − G₀x_s
    double omega_lc_eff = 0.0;   ///< ω′_LC = ω_LC + 2g₀x_s
    std::size_t iterations = 0;
};

struct SemiclassicalOptions {
    double damping = 0.5;
    double tolerance = 1e-12;
    std::size_t max_iterations = 10000;
    /// Retry with a bracketed root search on the x_s map when the damped
    /// iteration does not settle.
    bool bracket_fallback = true;
};

/// Steady-state averages by damped fixed-point iteration on x_s, with a
/// bracketed root search as fallback. ConvergenceError when neither finds a
/// steady state; UnphysicalError if the iteration drives ω′_LC ≤ 0.
SemiclassicalState solve_semiclassical(const DriveParams& d, double delta0, const SemiclassicalOptions& opts = {});

/// Largest relative residual over the five steady-state relations.
double semiclassical_residual(const SemiclassicalState& s, const DriveParams& d, double delta0);

struct Couplings {
    double G = 0.0;
    double g = 0.0;
};

/// G = √2·G₀·a_s, g = 2·g₀·q_s (rad/s).
Couplings effective_couplings(const SemiclassicalState& s, const DriveParams& d);

/// Normalizes a solved physical point to EffectiveParams (units of ω_m).
/// `gamma_m` is the mechanical damping in rad/s; bath occupations at `kelvin`.
EffectiveParams to_effective(const SemiclassicalState& s, const DriveParams& d, double gamma_m, double kelvin,
                             OccupationMode mode);

}  // namespace cvsteady::model
