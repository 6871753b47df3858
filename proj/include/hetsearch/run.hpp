#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsearch/locational.hpp"
#include "hetsearch/scenario.hpp"
#include "hetsearch/strategy.hpp"

namespace hetsearch {

struct RunResult {
    Trace trace;
    Report report;
};

namespace detail {

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    fn(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline std::string numbered(const char* stem, std::size_t n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem, n);
    return buf;
}

} // namespace detail

/**
 * Runs one strategy on the scenario and writes into `dir`:
 *   trajectory.csv, uncertainty.csv, labels_NNNN.csv (one per search, NNNN = search number),
 *   report.txt, and with `field_snapshots` field_NNNN.csv (field before search NNNN) plus
 *   field_final.csv.
 */
inline RunResult run_to_dir(const Scenario& scn, StrategyKind kind,
                            const std::filesystem::path& dir, bool field_snapshots = false) {
    StrategyConfig cfg = scn.strategy;
    cfg.kind = kind;
    cfg.record_fields = field_snapshots;
    const Grid g = scn.grid();
    const UncertaintyField f0 = scn.field();

    RunResult res;
    res.trace = run_strategy(g, f0, scn.agents, scn.sensors, cfg);
    res.report = summarize(res.trace, cfg.stop_threshold);

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    const Trace& tr = res.trace;
    detail::write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    detail::write_file(dir / "uncertainty.csv", [&](std::ostream& os) { write_uncertainty_csv(os, tr); });
    for (std::size_t n = 0; n < tr.searches.size(); ++n) {
        Partition part;
        part.nx = g.nx;
        part.ny = g.ny;
        part.labels = tr.searches[n].labels;
        detail::write_file(dir / detail::numbered("labels", n + 1), [&](std::ostream& os) {
            write_labels_csv(os, g, part, tr.searches[n].step);
        });
    }
    if (field_snapshots) {
        for (std::size_t n = 0; n < tr.fields_before.size(); ++n)
            detail::write_file(dir / detail::numbered("field", n + 1), [&](std::ostream& os) {
                write_field_csv(os, g, tr.fields_before[n]);
            });
        detail::write_file(dir / "field_final.csv",
                           [&](std::ostream& os) { write_field_csv(os, g, tr.final_field); });
    }
    detail::write_file(dir / "report.txt", [&](std::ostream& os) {
        os << "scenario: " << scn.name << '\n' << format_report(res.report);
    });
    return res;
}

/// Side-by-side summary of the two strategies at one threshold.
inline std::string format_comparison(const Report& hsds, const Report& hcds) {
    auto opt = [](const std::optional<std::size_t>& v) {
        return v ? std::to_string(*v) : std::string("not reached");
    };
    std::string s;
    s += "threshold: " + detail::fmt_double(hsds.threshold) + '\n';
    s += "hsds_steps_to_threshold: " + opt(hsds.steps_to_threshold) + '\n';
    s += "hcds_steps_to_threshold: " + opt(hcds.steps_to_threshold) + '\n';
    s += "hsds_searches_to_threshold: " + opt(hsds.searches_to_threshold) + '\n';
    s += "hcds_searches_to_threshold: " + opt(hcds.searches_to_threshold) + '\n';
    return s;
}

struct GradientCheck {
    std::vector<Vec2> analytic;
    std::vector<Vec2> numeric;
    std::vector<double> rel_error; // max component error / ||stacked analytic gradient||
    double max_rel_error = 0.0;
    double delta = 0.0;
};

/// Analytic gradient vs central differences (partition recomputed) at the initial
/// configuration, step 2h.
inline GradientCheck check_gradient(const Grid& g, const UncertaintyField& field,
                                    std::span<const AgentState> agents,
                                    std::span<const SensorModel> sensors) {
    GradientCheck out;
    out.delta = 2.0 * std::max(g.hx, g.hy);
    out.analytic = gradient(g, field, assign(g, agents, sensors), agents, sensors);
    double scale2 = 0.0;
    for (const auto& v : out.analytic) scale2 += dot(v, v);
    const double scale = std::sqrt(scale2);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const FdGradient fd = fd_gradient_oracle(g, field, agents, sensors, i, out.delta);
        out.numeric.push_back(fd.value);
        const Vec2 diff = fd.value - out.analytic[i];
        const double err = std::max(std::fabs(diff.x), std::fabs(diff.y));
        const double rel = scale > 0.0 ? err / scale : err;
        out.rel_error.push_back(rel);
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

inline void print_gradient_check(std::ostream& os, const GradientCheck& chk) {
    os << "delta: " << detail::fmt_double(chk.delta) << '\n';
    for (std::size_t i = 0; i < chk.analytic.size(); ++i)
        os << "agent " << i << ": analytic (" << detail::fmt_double(chk.analytic[i].x) << ", "
           << detail::fmt_double(chk.analytic[i].y) << ") numeric ("
           << detail::fmt_double(chk.numeric[i].x) << ", " << detail::fmt_double(chk.numeric[i].y)
           << ") rel_error " << detail::fmt_double(chk.rel_error[i]) << '\n';
    os << "max_rel_error: " << detail::fmt_double(chk.max_rel_error) << '\n';
}

} // namespace hetsearch
