#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "cvsteady/errors.hpp"
#include "cvsteady/sweep.hpp"

namespace cvsteady::sweep {
namespace {

struct Node {
    const Series* series = nullptr;
    double axis1 = 0.0;
    std::optional<double> axis2;
};

std::vector<Node> enumerate(const SweepConfig& cfg) {
    const auto v1 = cfg.axis1.values();
    const auto v2 = cfg.axis2 ? cfg.axis2->values() : std::vector<double>{};
    std::vector<const Series*> series;
    if (cfg.series.empty())
        series.push_back(nullptr);
    else
        for (const auto& s : cfg.series) series.push_back(&s);

    std::vector<Node> nodes;
    nodes.reserve(series.size() * v1.size() * std::max<std::size_t>(1, v2.size()));
    for (const Series* s : series)
        for (double a : v1) {
            if (!cfg.axis2) {
                nodes.push_back({s, a, std::nullopt});
                continue;
            }
            for (double b : v2) nodes.push_back({s, a, b});
        }
    return nodes;
}

Row evaluate(const SweepConfig& cfg, const Node& node) {
    Row row;
    if (node.series) row.series = node.series->label;
    row.axis1 = node.axis1;
    row.axis2 = node.axis2;
    std::map<std::string, double> over;
    if (node.series) over = node.series->set;
    over[cfg.axis1.name] = node.axis1;
    if (cfg.axis2) over[cfg.axis2->name] = *node.axis2;
    try {
        row.result = model::analyze_point(resolve(cfg, over));
        row.result.covariance.reset();
    } catch (const std::exception& e) {
        row.result = model::PointResult{};
        row.result.stability_margin = std::nan("");
        row.error = e.what();
    }
    return row;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

GridResult run_sweep(const SweepConfig& cfg, unsigned threads) {
    validate(cfg);
    const std::vector<Node> nodes = enumerate(cfg);
    GridResult result{cfg, std::vector<Row>(nodes.size())};

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, nodes.size())));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < nodes.size(); i = next.fetch_add(1))
            result.rows[i] = evaluate(cfg, nodes[i]);
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    return result;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void emit_csv(const GridResult& result, std::ostream& out) {
    const SweepConfig& cfg = result.config;
    const bool has_series = !cfg.series.empty();
    if (has_series) out << "series,";
    out << cfg.axis1.name << ',';
    if (cfg.axis2) out << cfg.axis2->name << ',';
    out << "E_N,duan,n_m_eff,n_lc_eff,stability_margin,stable,omega_m_eff,error\n";

    for (const Row& row : result.rows) {
        if (has_series) out << csv_field(row.series.value_or("")) << ',';
        out << format_number(row.axis1) << ',';
        if (cfg.axis2) out << optional_number(row.axis2) << ',';
        const model::PointResult& r = row.result;
        out << optional_number(r.log_negativity) << ',' << optional_number(r.duan) << ','
            << optional_number(r.n_m_eff) << ',' << optional_number(r.n_lc_eff) << ','
            << format_number(r.stability_margin) << ',' << (r.stable ? "true" : "false") << ','
            << optional_number(r.omega_m_eff) << ',' << csv_field(row.error) << '\n';
    }
}

void emit_csv(const GridResult& result, const std::string& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open CSV output", path);
    emit_csv(result, file);
    file.flush();
    if (!file) throw IoError("failed writing CSV output", path);
}

}  // namespace cvsteady::sweep
