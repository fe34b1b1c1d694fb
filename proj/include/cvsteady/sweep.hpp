#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvsteady/model.hpp"

// Grid evaluation of the steady-state model over one or two parameter axes.
//
// A configuration names parameters by key. Frequency-valued keys (omega_lc,
// delta, kappa, gamma_m, gamma_lc, G, g) are read in units of ω_m, or in Hz
// when `units` is "hz" (then divided by omega_m_hz). T is in kelvin; Q_LC,
// n_m and n_lc are dimensionless. Unset keys take the baseline operating
// point: Δ = ω_LC = ω_m, κ = 0.1, γ_m = 1e−6, Q_LC = 1e5, T = 10 mK,
// ω_m/2π = 1 MHz, G = g = 0.
namespace cvsteady::sweep {

enum class Units { OmegaM, Hz };
enum class Scale { Linear, Log };

struct Axis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;
    Scale scale = Scale::Linear;

    /// Grid nodes; the first and last equal min and max exactly.
    std::vector<double> values() const;

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// A named set of overrides; each series repeats the whole grid.
struct Series {
    std::string label;
    std::map<std::string, double> set;

    friend bool operator==(const Series&, const Series&) = default;
};

struct SweepConfig {
    Units units = Units::OmegaM;
    std::map<std::string, double> fixed;
    Axis axis1;
    std::optional<Axis> axis2;
    model::OccupationMode occupation_mode = model::OccupationMode::HighT;
    std::vector<Series> series;

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Keys accepted in `fixed` and series overrides.
const std::vector<std::string>& parameter_keys();

/// Keys accepted as axis names (parameter_keys() without omega_m_hz).
bool is_axis_parameter(std::string_view name);

/// Merges baseline ← fixed ← overrides and converts to EffectiveParams.
model::EffectiveParams resolve(const SweepConfig& cfg, const std::map<std::string, double>& overrides);

/// Strict JSON parse plus domain validation. ConfigError carries line and
/// column for syntax errors; ValidationError names the offending field.
SweepConfig parse_config(std::string_view text);

/// Throws ValidationError naming the first offending field.
void validate(const SweepConfig& cfg);

/// JSON document that parse_config maps back to an equal config.
std::string serialize_config(const SweepConfig& cfg);

/// Replaces every axis count by 21.
SweepConfig coarsened(SweepConfig cfg);

inline constexpr std::size_t kPresetPoints = 81;
inline constexpr std::size_t kCoarsePoints = 21;

/// Known preset names, in display order.
const std::vector<std::string>& preset_names();

/// Figure presets: fig2a, fig2b, fig3, fig4, fig5.
SweepConfig preset(std::string_view name);

struct Row {
    std::optional<std::string> series;
    double axis1 = 0.0;
    std::optional<double> axis2;
    model::PointResult result;
    std::string error;  ///< non-empty when the point failed numerically
};

struct GridResult {
    SweepConfig config;
    std::vector<Row> rows;  ///< series-major, then row-major over (axis1, axis2)
};

/// Evaluates every grid node on `threads` workers (0 = hardware concurrency).
/// Output does not depend on the worker count.
GridResult run_sweep(const SweepConfig& cfg, unsigned threads = 0);

/// 12 significant digits, locale-independent.
std::string format_number(double v);

void emit_csv(const GridResult& result, std::ostream& out);

/// Writes the CSV to `path`; IoError on failure.
void emit_csv(const GridResult& result, const std::string& path);

}  // namespace cvsteady::sweep
