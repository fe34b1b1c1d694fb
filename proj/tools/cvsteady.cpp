// cvsteady: steady-state entanglement diagnostics for the opto-electro-mechanical
// three-mode system.
//
//   cvsteady point [--param k=v ...] [--units omega_m|hz] [--occupation high_T|exact]
//   cvsteady sweep --config FILE --out FILE.csv [--coarse] [--threads N]
//   cvsteady preset NAME --out FILE.csv [--coarse] [--threads N] [--print-config]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
// of the point run.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cvsteady/errors.hpp"
#include "cvsteady/sweep.hpp"

namespace {

using namespace cvsteady;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--param", "expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) throw ValidationError(key, "not a number: '" + text + "'");
        out[key] = value;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_field(const char* name, const std::optional<double>& v) {
    std::printf("%-16s %s\n", name, v ? sweep::format_number(*v).c_str() : "");
}

int run_point(const std::vector<std::string>& params, const std::string& units, const std::string& occupation) {
    sweep::SweepConfig cfg;
    if (units == "hz")
        cfg.units = sweep::Units::Hz;
    else if (units != "omega_m")
        throw ValidationError("--units", "expected omega_m or hz");
    if (occupation == "exact")
        cfg.occupation_mode = model::OccupationMode::Exact;
    else if (occupation != "high_T")
        throw ValidationError("--occupation", "expected high_T or exact");
    for (const auto& [k, v] : parse_assignments(params)) {
        if (std::find(sweep::parameter_keys().begin(), sweep::parameter_keys().end(), k) ==
            sweep::parameter_keys().end())
            throw ValidationError(k, "unknown parameter");
        cfg.fixed[k] = v;
    }

    const model::EffectiveParams p = sweep::resolve(cfg, {});
    model::PointResult r;
    try {
        r = model::analyze_point(p);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        std::fprintf(stderr, "cvsteady: numerical failure: %s\n", e.what());
        return kExitNumerical;
    }

    std::printf("%-16s %s\n", "stability_margin", sweep::format_number(r.stability_margin).c_str());
    std::printf("%-16s %s\n", "stable", r.stable ? "true" : "false");
    print_field("E_N", r.log_negativity);
    print_field("duan", r.duan);
    print_field("n_m_eff", r.n_m_eff);
    print_field("n_lc_eff", r.n_lc_eff);
    print_field("omega_m_eff", r.omega_m_eff);
    print_field("nu_min", r.nu_min_raw);
    return 0;
}

void run_grid(sweep::SweepConfig cfg, const std::string& out, bool coarse, unsigned threads) {
    if (coarse) cfg = sweep::coarsened(std::move(cfg));
    const sweep::GridResult result = sweep::run_sweep(cfg, threads);
    sweep::emit_csv(result, out);
    std::size_t failed = 0, unstable = 0;
    for (const auto& row : result.rows) {
        if (!row.error.empty())
            ++failed;
        else if (!row.result.stable)
            ++unstable;
    }
    std::fprintf(stderr, "cvsteady: wrote %zu rows to %s (%zu unstable, %zu failed)\n", result.rows.size(),
                 out.c_str(), unstable, failed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state entanglement of a cavity-membrane-LC system"};
    app.require_subcommand(1);

    auto* point = app.add_subcommand("point", "Evaluate one parameter point");
    std::vector<std::string> params;
    std::string units = "omega_m";
    std::string occupation = "high_T";
    point->add_option("--param", params, "key=value (repeatable)");
    point->add_option("--units", units, "omega_m or hz");
    point->add_option("--occupation", occupation, "high_T or exact");

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid from a JSON config");
    std::string config_path;
    std::string out_path;
    bool coarse = false;
    unsigned threads = 0;
    sweep_cmd->add_option("--config", config_path, "JSON sweep configuration")->required();
    sweep_cmd->add_option("--out", out_path, "CSV output path")->required();
    sweep_cmd->add_flag("--coarse", coarse, "21 points per axis");
    sweep_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* preset_cmd = app.add_subcommand("preset", "Evaluate a figure preset");
    std::string preset_name;
    std::string preset_out;
    bool preset_coarse = false;
    unsigned preset_threads = 0;
    bool print_config = false;
    preset_cmd->add_option("name", preset_name, "fig2a, fig2b, fig3, fig4 or fig5")->required();
    preset_cmd->add_option("--out", preset_out, "CSV output path");
    preset_cmd->add_flag("--coarse", preset_coarse, "21 points per axis");
    preset_cmd->add_option("--threads", preset_threads, "worker threads (0 = all cores)");
    preset_cmd->add_flag("--print-config", print_config, "print the preset as a JSON config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (point->parsed()) return run_point(params, units, occupation);
        if (sweep_cmd->parsed()) {
            run_grid(sweep::parse_config(read_file(config_path)), out_path, coarse, threads);
            return 0;
        }
        sweep::SweepConfig cfg = sweep::preset(preset_name);
        if (print_config) {
            std::fputs(sweep::serialize_config(preset_coarse ? sweep::coarsened(cfg) : cfg).c_str(), stdout);
            return 0;
        }
        if (preset_out.empty()) throw ValidationError("--out", "required unless --print-config is given");
        run_grid(std::move(cfg), preset_out, preset_coarse, preset_threads);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "cvsteady: %s\n", e.what());
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "cvsteady: invalid %s\n", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "cvsteady: %s\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "cvsteady: %s\n", e.what());
        return kExitNumerical;
    }
}
