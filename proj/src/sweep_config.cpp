#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvsteady/errors.hpp"
#include "cvsteady/sweep.hpp"
#include "json.hpp"

namespace cvsteady::sweep {

using nlohmann::json;

namespace {

constexpr double kBaselineOmegaMHz = 1e6;
constexpr double kBaselineQLC = 1e5;
constexpr double kBaselineT = 0.010;

bool is_known_key(std::string_view k) {
    const auto& keys = parameter_keys();
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

const char* units_name(Units u) { return u == Units::Hz ? "hz" : "omega_m"; }
const char* scale_name(Scale s) { return s == Scale::Log ? "log" : "linear"; }
const char* occupation_name(model::OccupationMode m) {
    return m == model::OccupationMode::Exact ? "exact" : "high_T";
}

// Every key that is set anywhere in the config: fixed, series, axes.
std::vector<std::string> keys_in_use(const SweepConfig& cfg) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : cfg.fixed) keys.push_back(k);
    for (const auto& s : cfg.series)
        for (const auto& [k, v] : s.set) keys.push_back(k);
    keys.push_back(cfg.axis1.name);
    if (cfg.axis2) keys.push_back(cfg.axis2->name);
    return keys;
}

void validate_axis(const Axis& axis, const std::string& where) {
    if (!is_axis_parameter(axis.name))
        throw ValidationError(where + ".name", "unknown sweep parameter '" + axis.name + "'");
    if (axis.count < 2) throw ValidationError(where + ".count", "an axis needs at least 2 points");
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max))
        throw ValidationError(where + ".min", "axis bounds must be finite");
    if (!(axis.min < axis.max)) throw ValidationError(where + ".max", "axis requires min < max");
    if (axis.scale == Scale::Log && !(axis.min > 0.0))
        throw ValidationError(where + ".min", "log-scaled axis requires min > 0");
}

// ---- JSON reading -------------------------------------------------------

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where.empty() ? "config" : where, "expected a JSON object");
    return j;
}

double read_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where, "expected a number");
    return j.get<double>();
}

std::string read_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ValidationError(where, "expected a string");
    return j.get<std::string>();
}

std::map<std::string, double> read_assignments(const json& j, const std::string& where) {
    require_object(j, where);
    std::map<std::string, double> out;
    for (const auto& [key, value] : j.items()) {
        if (!is_known_key(key))
            throw ValidationError(where + "." + key,
                                  "unknown parameter (expected one of: " + join(parameter_keys()) + ")");
        out[key] = read_number(value, where + "." + key);
    }
    return out;
}

Axis read_axis(const json& j, const std::string& where) {
    require_object(j, where);
    reject_unknown(j, {"name", "min", "max", "count", "scale"}, where);
    for (const char* key : {"name", "min", "max", "count"})
        if (!j.contains(key)) throw ValidationError(where + "." + key, "missing required key");
    Axis axis;
    axis.name = read_string(j.at("name"), where + ".name");
    axis.min = read_number(j.at("min"), where + ".min");
    axis.max = read_number(j.at("max"), where + ".max");
    const json& count = j.at("count");
    if (!count.is_number_integer() || count.get<long long>() < 0)
        throw ValidationError(where + ".count", "expected a non-negative integer");
    axis.count = count.get<std::size_t>();
    if (j.contains("scale")) {
        const std::string scale = read_string(j.at("scale"), where + ".scale");
        if (scale == "linear")
            axis.scale = Scale::Linear;
        else if (scale == "log")
            axis.scale = Scale::Log;
        else
            throw ValidationError(where + ".scale", "expected 'linear' or 'log'");
    }
    return axis;
}

json axis_json(const Axis& a) {
    return json{{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}, {"scale", scale_name(a.scale)}};
}

}  // namespace

const std::vector<std::string>& parameter_keys() {
    static const std::vector<std::string> keys = {"omega_m_hz", "omega_lc", "delta", "kappa", "gamma_m", "gamma_lc",
                                                  "Q_LC",       "G",        "g",     "T",     "n_m",     "n_lc"};
    return keys;
}

bool is_axis_parameter(std::string_view name) { return name != "omega_m_hz" && is_known_key(name); }

std::vector<double> Axis::values() const {
    std::vector<double> out(count);
    if (count == 0) return out;
    if (count == 1) {
        out[0] = min;
        return out;
    }
    const double steps = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / steps;
        out[i] = scale == Scale::Log ? min * std::pow(max / min, f) : min + f * (max - min);
    }
    out.front() = min;
    out.back() = max;
    return out;
}

model::EffectiveParams resolve(const SweepConfig& cfg, const std::map<std::string, double>& overrides) {
    std::map<std::string, double> v = cfg.fixed;
    for (const auto& [k, x] : overrides) v[k] = x;
    for (const auto& [k, x] : v)
        if (!is_known_key(k)) throw ValidationError(k, "unknown parameter");

    auto get = [&](const char* key) -> std::optional<double> {
        const auto it = v.find(key);
        return it == v.end() ? std::nullopt : std::optional<double>(it->second);
    };

    const double omega_m_hz = get("omega_m_hz").value_or(kBaselineOmegaMHz);
    if (!(omega_m_hz > 0.0) || !std::isfinite(omega_m_hz)) throw ValidationError("omega_m_hz", "must be positive");
    auto freq = [&](const char* key, double fallback) {
        const auto x = get(key);
        if (!x) return fallback;
        return cfg.units == Units::Hz ? *x / omega_m_hz : *x;
    };

    model::EffectiveParams p;
    p.omega_m = 1.0;
    p.omega_lc = freq("omega_lc", 1.0);
    p.delta = freq("delta", 1.0);
    p.kappa = freq("kappa", 0.1);
    p.gamma_m = freq("gamma_m", 1e-6);
    p.G = freq("G", 0.0);
    p.g = freq("g", 0.0);

    if (get("gamma_lc") && get("Q_LC")) throw ValidationError("gamma_lc", "gamma_lc and Q_LC are mutually exclusive");
    if (get("gamma_lc")) {
        p.gamma_lc = freq("gamma_lc", 0.0);
    } else {
        const double q = get("Q_LC").value_or(kBaselineQLC);
        if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("Q_LC", "must be positive");
        p.gamma_lc = p.omega_lc / q;
    }

    const bool explicit_occupation = get("n_m") || get("n_lc");
    if (explicit_occupation && get("T")) throw ValidationError("T", "T and explicit bath occupations are mutually exclusive");
    if (explicit_occupation) {
        p.n_m = get("n_m").value_or(0.0);
        p.n_lc = get("n_lc").value_or(0.0);
    } else {
        if (!(p.omega_lc > 0.0)) throw ValidationError("omega_lc", "must be positive");
        p = model::with_temperature(p, get("T").value_or(kBaselineT), omega_m_hz, cfg.occupation_mode);
    }
    model::validate(p);
    return p;
}

void validate(const SweepConfig& cfg) {
    validate_axis(cfg.axis1, "axis1");
    if (cfg.axis2) {
        validate_axis(*cfg.axis2, "axis2");
        if (cfg.axis2->name == cfg.axis1.name) throw ValidationError("axis2.name", "both axes sweep the same parameter");
    }
    for (const auto& [k, x] : cfg.fixed) {
        if (!is_known_key(k)) throw ValidationError("fixed." + k, "unknown parameter");
        if (!std::isfinite(x)) throw ValidationError("fixed." + k, "must be finite");
    }
    for (std::size_t i = 0; i < cfg.series.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (cfg.series[j].label == cfg.series[i].label)
                throw ValidationError("series", "duplicate series label '" + cfg.series[i].label + "'");
        for (const auto& [k, x] : cfg.series[i].set)
            if (!is_known_key(k)) throw ValidationError("series." + k, "unknown parameter");
    }

    const auto keys = keys_in_use(cfg);
    auto used = [&](std::string_view k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
    if (used("gamma_lc") && used("Q_LC")) throw ValidationError("gamma_lc", "gamma_lc and Q_LC are mutually exclusive");
    if (used("T") && (used("n_m") || used("n_lc")))
        throw ValidationError("T", "T and explicit bath occupations are mutually exclusive");

    // Every corner of the grid must resolve to valid model parameters.
    std::vector<std::map<std::string, double>> bases;
    if (cfg.series.empty())
        bases.emplace_back();
    else
        for (const auto& s : cfg.series) bases.push_back(s.set);
    for (const auto& base : bases)
        for (double a1 : {cfg.axis1.min, cfg.axis1.max}) {
            auto over = base;
            over[cfg.axis1.name] = a1;
            if (!cfg.axis2) {
                resolve(cfg, over);
                continue;
            }
            for (double a2 : {cfg.axis2->min, cfg.axis2->max}) {
                over[cfg.axis2->name] = a2;
                resolve(cfg, over);
            }
        }
}

SweepConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream os;
        os << "config parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(os.str(), line, col);
    }

    require_object(doc, "");
    reject_unknown(doc, {"units", "fixed", "axis1", "axis2", "occupation_mode", "series"}, "");

    SweepConfig cfg;
    if (doc.contains("units")) {
        const std::string u = read_string(doc.at("units"), "units");
        if (u == "omega_m")
            cfg.units = Units::OmegaM;
        else if (u == "hz")
            cfg.units = Units::Hz;
        else
            throw ValidationError("units", "expected 'omega_m' or 'hz'");
    }
    if (doc.contains("fixed")) cfg.fixed = read_assignments(doc.at("fixed"), "fixed");
    if (!doc.contains("axis1")) throw ValidationError("axis1", "missing required key");
    cfg.axis1 = read_axis(doc.at("axis1"), "axis1");
    if (doc.contains("axis2")) cfg.axis2 = read_axis(doc.at("axis2"), "axis2");
    if (doc.contains("occupation_mode")) {
        const std::string m = read_string(doc.at("occupation_mode"), "occupation_mode");
        if (m == "high_T")
            cfg.occupation_mode = model::OccupationMode::HighT;
        else if (m == "exact")
            cfg.occupation_mode = model::OccupationMode::Exact;
        else
            throw ValidationError("occupation_mode", "expected 'high_T' or 'exact'");
    }
    if (doc.contains("series")) {
        const json& list = doc.at("series");
        if (!list.is_array()) throw ValidationError("series", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "series[" + std::to_string(i) + "]";
            require_object(list[i], where);
            reject_unknown(list[i], {"label", "set"}, where);
            if (!list[i].contains("label")) throw ValidationError(where + ".label", "missing required key");
            Series s;
            s.label = read_string(list[i].at("label"), where + ".label");
            if (list[i].contains("set")) s.set = read_assignments(list[i].at("set"), where + ".set");
            cfg.series.push_back(std::move(s));
        }
    }
    validate(cfg);
    return cfg;
}

std::string serialize_config(const SweepConfig& cfg) {
    json doc;
    doc["units"] = units_name(cfg.units);
    doc["fixed"] = json::object();
    for (const auto& [k, v] : cfg.fixed) doc["fixed"][k] = v;
    doc["axis1"] = axis_json(cfg.axis1);
    if (cfg.axis2) doc["axis2"] = axis_json(*cfg.axis2);
    doc["occupation_mode"] = occupation_name(cfg.occupation_mode);
    if (!cfg.series.empty()) {
        doc["series"] = json::array();
        for (const auto& s : cfg.series) {
            json set = json::object();
            for (const auto& [k, v] : s.set) set[k] = v;
            doc["series"].push_back(json{{"label", s.label}, {"set", set}});
        }
    }
    return doc.dump(2) + "\n";
}

SweepConfig coarsened(SweepConfig cfg) {
    cfg.axis1.count = kCoarsePoints;
    if (cfg.axis2) cfg.axis2->count = kCoarsePoints;
    return cfg;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3", "fig4", "fig5"};
    return names;
}

SweepConfig preset(std::string_view name) {
    SweepConfig cfg;
    cfg.fixed["T"] = kBaselineT;
    if (name == "fig2a" || name == "fig2b") {
        const double coupling = name == "fig2a" ? 0.3 : 0.5;  // 3κ, 5κ
        cfg.fixed["G"] = coupling;
        cfg.fixed["g"] = coupling;
        cfg.axis1 = {"delta", 0.2, 2.0, kPresetPoints, Scale::Linear};
        cfg.axis2 = Axis{"omega_lc", 0.5, 1.5, kPresetPoints, Scale::Linear};
    } else if (name == "fig3") {
        cfg.fixed["delta"] = 1.0;
        cfg.fixed["omega_lc"] = 1.0;
        // g reaches 10κ so the unstable corner (g ≳ 8κ at G = 6κ) is on the grid.
        cfg.axis1 = {"g", 0.0, 1.0, kPresetPoints, Scale::Linear};
        cfg.axis2 = Axis{"G", 0.0, 0.6, kPresetPoints, Scale::Linear};
    } else if (name == "fig4") {
        cfg.fixed.erase("T");
        cfg.fixed["delta"] = 1.0;
        cfg.fixed["omega_lc"] = 1.0;
        cfg.axis1 = {"T", 1e-3, 0.3, kPresetPoints, Scale::Log};
        cfg.series = {{"g=8kappa,G=6kappa", {{"g", 0.8}, {"G", 0.6}}}, {"g=G=5kappa", {{"g", 0.5}, {"G", 0.5}}}};
    } else if (name == "fig5") {
        cfg.fixed.erase("T");
        cfg.fixed["delta"] = 1.0;
        cfg.fixed["omega_lc"] = 1.0;
        cfg.fixed["G"] = 0.6;
        cfg.fixed["g"] = 0.6;
        cfg.axis1 = {"T", 1e-3, 0.1, kPresetPoints, Scale::Linear};
        cfg.axis2 = Axis{"Q_LC", 1e4, 1e5, kPresetPoints, Scale::Log};
    } else {
        throw ValidationError("preset", "unknown preset '" + std::string(name) + "' (available: " + join(preset_names()) + ")");
    }
    validate(cfg);
    return cfg;
}

}  // namespace cvsteady::sweep
