#include <cmath>
#include <limits>
#include <sstream>

#include "cvsteady/errors.hpp"
#include "cvsteady/sweep.hpp"
#include "doctest.h"

using namespace cvsteady;
using namespace cvsteady::sweep;

namespace {

std::string csv(const GridResult& r) {
    std::ostringstream os;
    emit_csv(r, os);
    return os.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <class E>
std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const E& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("minimal config takes the baseline operating point") {
    const SweepConfig cfg = parse_config(R"({"axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 3}})");
    CHECK(cfg.units == Units::OmegaM);
    CHECK(cfg.occupation_mode == model::OccupationMode::HighT);
    CHECK_FALSE(cfg.axis2.has_value());
    CHECK(cfg.axis1.scale == Scale::Linear);

    const model::EffectiveParams p = resolve(cfg, {});
    CHECK(p.omega_m == 1.0);
    CHECK(p.omega_lc == 1.0);
    CHECK(p.delta == 1.0);
    CHECK(p.kappa == 0.1);
    CHECK(p.gamma_m == 1e-6);
    CHECK(p.gamma_lc == doctest::Approx(1e-5).epsilon(1e-15));
    CHECK(p.n_m == doctest::Approx(208.366).epsilon(1e-5));
    CHECK(p.n_lc == p.n_m);
}

TEST_CASE("axis validation") {
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 1}})") ==
          "axis1.count");
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "T", "min": 0.1, "max": 0.1, "count": 4}})") ==
          "axis1.max");
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "T", "min": 0, "max": 0.1, "count": 4, "scale": "log"}})") ==
          "axis1.min");
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "omega_m_hz", "min": 1, "max": 2, "count": 4}})") ==
          "axis1.name");
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "G", "min": 0, "max": 1, "count": 2.5}})") ==
          "axis1.count");
    CHECK(field_of<ValidationError>(
              R"({"axis1": {"name": "G", "min": 0, "max": 1, "count": 2}, "axis2": {"name": "G", "min": 0, "max": 1, "count": 2}})") ==
          "axis2.name");
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "G", "min": -1, "max": 1, "count": 2}})") == "G");
}

TEST_CASE("log-scaled Q_LC axis is geometric") {
    const SweepConfig cfg =
        parse_config(R"({"axis1": {"name": "Q_LC", "min": 1e4, "max": 1e5, "count": 64, "scale": "log"}})");
    const auto v = cfg.axis1.values();
    REQUIRE(v.size() == 64);
    CHECK(v.front() == 1e4);
    CHECK(v.back() == 1e5);
    const double ratio = std::pow(10.0, 1.0 / 63.0);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] / v[i - 1] == doctest::Approx(ratio).epsilon(1e-12));
    CHECK(resolve(cfg, {{"Q_LC", 2e4}}).gamma_lc == doctest::Approx(5e-5).epsilon(1e-14));
}

TEST_CASE("strict schema") {
    CHECK(field_of<ValidationError>(R"({"axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 3}, "extra": 1})") ==
          "extra");
    CHECK(field_of<ValidationError>(
              R"({"axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 3, "step": 1}})") == "axis1.step");
    CHECK(field_of<ValidationError>(
              R"({"fixed": {"chi": 1}, "axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 3}})") ==
          "fixed.chi");
    CHECK(field_of<ValidationError>(R"({"fixed": {"G": 0.5}})") == "axis1");
    CHECK(field_of<ValidationError>(
              R"({"units": "MHz", "axis1": {"name": "T", "min": 0.001, "max": 0.1, "count": 3}})") == "units");
    CHECK(field_of<ValidationError>(
              R"({"fixed": {"T": 0.01, "n_m": 3}, "axis1": {"name": "G", "min": 0, "max": 0.1, "count": 3}})") == "T");
    CHECK(field_of<ValidationError>(
              R"({"fixed": {"gamma_lc": 1e-5}, "axis1": {"name": "Q_LC", "min": 1e4, "max": 1e5, "count": 3}})") ==
          "gamma_lc");
}

TEST_CASE("syntax errors report line and column") {
    const std::string text = "{\n  \"axis1\": {\"name\": \"T\",\n    \"min\": 0.001 \"max\": 0.1}\n}";
    try {
        parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        // The position is the last character of the offending token, "max".
        CHECK(e.line() == 3);
        CHECK(e.column() == 22);
    }
}

TEST_CASE("Hz units are divided by the mechanical frequency") {
    const SweepConfig cfg = parse_config(R"({
        "units": "hz",
        "fixed": {"omega_m_hz": 2e6, "kappa": 2e5, "G": 1e6, "omega_lc": 2e6},
        "axis1": {"name": "delta", "min": 1e6, "max": 3e6, "count": 3}})");
    const model::EffectiveParams p = resolve(cfg, {{"delta", 2e6}});
    CHECK(p.kappa == doctest::Approx(0.1));
    CHECK(p.G == doctest::Approx(0.5));
    CHECK(p.delta == doctest::Approx(1.0));
    CHECK(p.omega_lc == doctest::Approx(1.0));
    CHECK(p.n_m == doctest::Approx(208.366 / 2).epsilon(1e-5));
}

TEST_CASE("serialize and parse round-trip") {
    for (const auto& name : preset_names()) {
        const SweepConfig cfg = preset(name);
        CHECK(parse_config(serialize_config(cfg)) == cfg);
        CHECK(parse_config(serialize_config(coarsened(cfg))) == coarsened(cfg));
    }
    SweepConfig hz = parse_config(R"({"units": "hz", "occupation_mode": "exact",
        "fixed": {"omega_m_hz": 1.5e6, "n_m": 10, "n_lc": 3},
        "axis1": {"name": "g", "min": 0, "max": 1e5, "count": 5}})");
    CHECK(parse_config(serialize_config(hz)) == hz);
}

TEST_CASE("preset fidelity") {
    const SweepConfig a = preset("fig2a");
    CHECK(a.fixed.at("G") == 0.3);
    CHECK(a.fixed.at("g") == 0.3);
    CHECK(a.fixed.at("T") == 0.01);
    CHECK(a.axis1.name == "delta");
    CHECK(a.axis2->name == "omega_lc");
    CHECK(preset("fig2b").fixed.at("G") == 0.5);
    CHECK(preset("fig2b").fixed.at("g") == 0.5);

    const SweepConfig f3 = preset("fig3");
    CHECK(f3.fixed.at("delta") == 1.0);
    CHECK(f3.fixed.at("omega_lc") == 1.0);
    CHECK(f3.fixed.at("T") == 0.01);
    CHECK(f3.axis1.name == "g");
    CHECK(f3.axis2->name == "G");
    CHECK(f3.axis2->max == doctest::Approx(0.6));

    const SweepConfig f4 = preset("fig4");
    CHECK(f4.axis1.name == "T");
    CHECK(f4.axis1.scale == Scale::Log);
    CHECK(f4.axis1.min == 1e-3);
    CHECK(f4.axis1.max == 0.3);
    REQUIRE(f4.series.size() == 2);
    CHECK(f4.series[0].set.at("g") == 0.8);
    CHECK(f4.series[0].set.at("G") == 0.6);
    CHECK(f4.series[1].set.at("g") == 0.5);
    CHECK(f4.series[1].set.at("G") == 0.5);

    const SweepConfig f5 = preset("fig5");
    CHECK(f5.fixed.at("G") == 0.6);
    CHECK(f5.fixed.at("g") == 0.6);
    CHECK(f5.axis1.name == "T");
    CHECK(f5.axis2->name == "Q_LC");
    CHECK(f5.axis2->min == 1e4);
    CHECK(f5.axis2->max == 1e5);
    CHECK(f5.axis2->scale == Scale::Log);

    for (const auto& name : preset_names()) {
        const model::EffectiveParams p = resolve(preset(name), {});
        CHECK(p.kappa == 0.1);
        CHECK(p.gamma_m == 1e-6);
        CHECK(p.gamma_lc == doctest::Approx(1e-5 * p.omega_lc).epsilon(1e-14));
        CHECK(preset(name).axis1.count == kPresetPoints);
    }
    try {
        preset("fig9");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("fig2a") != std::string::npos);
    }
}

TEST_CASE("a 2x2 grid gives four row-major rows") {
    const SweepConfig cfg = parse_config(R"({"fixed": {"delta": 1},
        "axis1": {"name": "G", "min": 0.1, "max": 0.2, "count": 2},
        "axis2": {"name": "g", "min": 0.3, "max": 0.4, "count": 2}})");
    const GridResult r = run_sweep(cfg, 2);
    REQUIRE(r.rows.size() == 4);
    const std::vector<std::pair<double, double>> order{{0.1, 0.3}, {0.1, 0.4}, {0.2, 0.3}, {0.2, 0.4}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.rows[i].axis1 == order[i].first);
        CHECK(*r.rows[i].axis2 == order[i].second);
        CHECK(r.rows[i].error.empty());
    }
}

TEST_CASE("CSV layout") {
    const SweepConfig one = parse_config(R"({"fixed": {"G": 0.5, "g": 0.5},
        "axis1": {"name": "delta", "min": 0.2, "max": 1.0, "count": 2}})");
    const std::string text = csv(run_sweep(one, 1));
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');
    const auto rows = lines(text);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "delta,E_N,duan,n_m_eff,n_lc_eff,stability_margin,stable,omega_m_eff,error");

    // Δ = 0.2 is unstable: state-dependent cells empty, stable=false.
    const auto unstable = fields(rows[1]);
    REQUIRE(unstable.size() == 9);
    CHECK(unstable[0] == "0.2");
    CHECK(unstable[1].empty());
    CHECK(unstable[2].empty());
    CHECK_FALSE(unstable[5].empty());
    CHECK(unstable[6] == "false");
    CHECK(unstable[8].empty());

    const auto stable = fields(rows[2]);
    CHECK(stable[0] == "1");
    CHECK(stable[6] == "true");
    CHECK(std::stod(stable[1]) == doctest::Approx(0.1834975).epsilon(1e-6));
    CHECK(stable[1].size() <= 14);  // 12 significant digits

    const SweepConfig single = parse_config(R"({"fixed": {"G": 0.5, "g": 0.5},
        "axis1": {"name": "delta", "min": 0.99, "max": 1.0, "count": 2}})");
    CHECK(lines(csv(run_sweep(single, 1))).size() == 3);

    const auto series_rows = lines(csv(run_sweep(coarsened(preset("fig4")), 2)));
    CHECK(series_rows[0].rfind("series,T,E_N", 0) == 0);
    CHECK(series_rows.size() == 1 + 2 * kCoarsePoints);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(1e-7) == "1e-07");
    CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("CSV to an unwritable path raises IoError with the path") {
    const GridResult r = run_sweep(coarsened(preset("fig4")), 1);
    try {
        emit_csv(r, std::string("/nonexistent-dir/out.csv"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path() == "/nonexistent-dir/out.csv");
    }
}

TEST_CASE("output is identical across worker counts") {
    const SweepConfig cfg = coarsened(preset("fig3"));
    const std::string one = csv(run_sweep(cfg, 1));
    CHECK(csv(run_sweep(cfg, 3)) == one);
    CHECK(csv(run_sweep(cfg, 8)) == one);
    CHECK(csv(run_sweep(cfg, 0)) == one);
}

TEST_CASE("fig3 grid shows an unstable wedge at strong coupling") {
    const GridResult r = run_sweep(coarsened(preset("fig3")), 0);
    std::size_t unstable = 0;
    for (const Row& row : r.rows) {
        CHECK(row.error.empty());
        if (!row.result.stable) {
            ++unstable;
            CHECK(row.axis1 > 0.7);  // only at large g
        }
        if (row.axis1 <= 0.6 && *row.axis2 <= 0.6) CHECK(row.result.stable);
    }
    CHECK(unstable > 0);
}

TEST_CASE("fig4 log-negativity column is non-increasing") {
    const GridResult r = run_sweep(preset("fig4"), 0);
    for (const std::string label : {"g=8kappa,G=6kappa", "g=G=5kappa"}) {
        double previous = std::numeric_limits<double>::infinity();
        for (const Row& row : r.rows) {
            if (row.series != label) continue;
            REQUIRE(row.result.stable);
            CHECK(*row.result.log_negativity <= previous + 1e-12);
            previous = *row.result.log_negativity;
        }
    }
}

TEST_CASE("per-point numerical failures are recorded in the row") {
    const SweepConfig cfg = parse_config(R"({"fixed": {"G": 0.5, "g": 0.5, "n_lc": 0},
        "axis1": {"name": "n_m", "min": 1, "max": 1e300, "count": 3, "scale": "log"}})");
    const GridResult r = run_sweep(cfg, 2);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].error.empty());
    CHECK_FALSE(r.rows[2].error.empty());
    const auto last = fields(lines(csv(r)).back());
    CHECK(last[1].empty());
    CHECK(last[5].empty());
    CHECK(last[6] == "false");
    CHECK_FALSE(last[8].empty());
}
