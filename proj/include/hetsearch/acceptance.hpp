#pragma once

// Acceptance suites. Each suite checks one criterion and returns a single pass/fail
// outcome with a short measured summary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hetsearch/control.hpp"
#include "hetsearch/locational.hpp"
#include "hetsearch/oracle.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/run.hpp"
#include "hetsearch/scenario.hpp"
#include "hetsearch/strategy.hpp"

namespace hetsearch::acceptance {

struct Outcome {
    int id = 0;
    std::string suite;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
}

struct Config {
    std::vector<AgentState> agents;
    std::vector<SensorModel> sensors;
};

inline Config random_config(std::mt19937_64& rng, const Grid& g, std::size_t n, double margin,
                            double kmin = 0.3, double kmax = 0.95, double amin = 0.03,
                            double amax = 0.8) {
    Config c;
    for (std::size_t i = 0; i < n; ++i) {
        c.agents.push_back({i, {uniform(rng, g.xmin + margin, g.xmax - margin),
                                uniform(rng, g.ymin + margin, g.ymax - margin)}});
        c.sensors.emplace_back(uniform(rng, kmin, kmax), uniform(rng, amin, amax));
    }
    return c;
}

inline DensitySpec bumpy(std::mt19937_64& rng, const Grid& g) {
    DensitySpec d{uniform(rng, 0.2, 0.6), {}};
    for (int b = 0; b < 2; ++b)
        d.bumps.push_back({uniform(rng, 0.3, 0.8),
                           {uniform(rng, g.xmin, g.xmax), uniform(rng, g.ymin, g.ymax)},
                           uniform(rng, 1.0, 2.5)});
    return d;
}

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline Scenario load(const std::string& name) { return parse_scenario(resolve_scenario(name)); }

inline std::vector<Trace> both_traces(const Scenario& scn, bool record_fields) {
    std::vector<Trace> out;
    for (auto kind : {StrategyKind::hsds, StrategyKind::hcds}) {
        StrategyConfig cfg = scn.strategy;
        cfg.kind = kind;
        cfg.record_fields = record_fields;
        out.push_back(run_strategy(scn.grid(), scn.field(), scn.agents, scn.sensors, cfg));
    }
    return out;
}

} // namespace detail

inline Outcome partition_oracle() {
    Outcome o{1, "partition-oracle", false, {}};
    std::mt19937_64 rng(101);
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    std::size_t mismatches = 0, comparisons = 0;
    for (int t = 0; t < 20; ++t) {
        const auto c = detail::random_config(rng, g, 2 + t % 5, 0.0);
        for (auto mode : {PartitionMode::gaussian, PartitionMode::quadratic}) {
            const auto labels = assign(g, c.agents, c.sensors, mode).labels;
            const auto ref = oracle::brute_force_labels(g, c.agents, c.sensors, mode);
            for (std::size_t k = 0; k < labels.size(); ++k) mismatches += labels[k] != ref[k];
            ++comparisons;
        }
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(mismatches) + " mismatched cells over " +
               std::to_string(comparisons) + " partitions";
    return o;
}

inline Outcome case1_weights() {
    Outcome o{2, "case1-weights", false, {}};
    const Scenario scn = detail::load("case1_varying_alpha");
    const Grid g = scn.grid();
    const auto part = assign(g, scn.agents, scn.sensors);
    const double h = std::max(g.hx, g.hy);

    double worst_ratio = 0.0;
    std::size_t checked = 0;
    const std::size_t n = scn.agents.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double si = std::sqrt(scn.sensors[i].alpha), sj = std::sqrt(scn.sensors[j].alpha);
            const double L = si + sj; // Lipschitz constant of sqrt(a_i) r_i - sqrt(a_j) r_j
            for (CellIndex c : boundary_cells(part, i, j)) {
                const Vec2 q = g.center(c);
                const double gap = std::fabs(si * distance(q, scn.agents[i].position) -
                                             sj * distance(q, scn.agents[j].position));
                worst_ratio = std::max(worst_ratio, gap / (2.0 * L * h));
                ++checked;
            }
        }

    // k does not enter the partition when it is shared.
    auto rescaled = scn.sensors;
    for (auto& s : rescaled) s.k = 0.5;
    const bool k_free = assign(g, scn.agents, rescaled).labels == part.labels;

    std::size_t weakest = 0, strongest = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (scn.sensors[i].alpha > scn.sensors[weakest].alpha) weakest = i;
        if (scn.sensors[i].alpha < scn.sensors[strongest].alpha) strongest = i;
    }
    std::size_t second = strongest == 0 ? 1 : 0; // smallest alpha other than the strongest
    for (std::size_t i = 0; i < n; ++i)
        if (i != strongest && scn.sensors[i].alpha < scn.sensors[second].alpha) second = i;

    bool on_border = false;
    for (CellIndex c : part.cells[weakest]) {
        const std::size_t x = g.col(c), y = g.row(c);
        on_border = on_border || x == 0 || y == 0 || x + 1 == g.nx || y + 1 == g.ny;
    }
    const auto nb = part.adjacency.neighbors(weakest);
    const bool embedded = !part.cells[weakest].empty() && !on_border && nb.size() == 1 &&
                          nb[0] == second;

    o.pass = checked > 0 && worst_ratio <= 1.0 && k_free && embedded;
    o.detail = std::to_string(checked) + " boundary cells, worst gap/(2Lh) = " +
               detail::fmt("%.3f", worst_ratio) + "; k-independent " + (k_free ? "yes" : "no") +
               "; alpha=" + detail::fmt("%g", scn.sensors[weakest].alpha) + " cell embedded in alpha=" +
               detail::fmt("%g", scn.sensors[second].alpha) + " cell " + (embedded ? "yes" : "no");
    return o;
}

inline Outcome case2_line() {
    Outcome o{3, "case2-line", false, {}};
    const Scenario scn = detail::load("case2_varying_k");
    const Grid g = scn.grid();
    const auto& a = scn.agents;
    const auto& s = scn.sensors;
    const auto line = oracle::case2_line(a[0].position, a[1].position, s[0].k, s[1].k, s[0].alpha);
    const auto part = assign(g, a, s);
    std::vector<Vec2> pts;
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}})
        for (CellIndex c : boundary_cells(part, i, j)) pts.push_back(g.center(c));
    const double residual = oracle::line_fit_residual(pts, line);
    const double tol = std::sqrt(g.hx * g.hx + g.hy * g.hy);
    o.pass = !pts.empty() && residual <= tol;
    o.detail = "y = " + detail::fmt("%.6g", line.M) + " x + " + detail::fmt("%.6g", line.C) +
               "; " + std::to_string(pts.size()) + " boundary cells, max residual " +
               detail::fmt("%.4g", residual) + " <= " + detail::fmt("%.4g", tol);
    return o;
}

inline Outcome case4_voronoi() {
    Outcome o{4, "case4-voronoi", false, {}};
    std::mt19937_64 rng(104);
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    std::size_t mismatches = 0;
    for (int t = 0; t < 10; ++t) {
        const auto c = detail::random_config(rng, g, 2 + t % 5, 0.0);
        const auto labels = assign(g, c.agents, c.sensors, PartitionMode::quadratic).labels;
        for (CellIndex k = 0; k < g.cell_count(); ++k) {
            const Vec2 q = g.center(k);
            std::size_t nearest = 0;
            for (std::size_t i = 1; i < c.agents.size(); ++i)
                if (distance_sq(c.agents[i].position, q) < distance_sq(c.agents[nearest].position, q))
                    nearest = i;
            mismatches += labels[k] != nearest;
        }
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(mismatches) + " mismatched cells over 10 configurations";
    return o;
}

inline Outcome gradient_check() {
    Outcome o{5, "gradient", false, {}};
    std::mt19937_64 rng(105);
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    const double delta = 2.0 * std::max(g.hx, g.hy);
    double worst_stacked = 0.0, worst_agent = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto c = detail::random_config(rng, g, 3, 2.0 * delta);
        const DensitySpec spec = t % 2 == 0 ? DensitySpec::uniform(1.0) : detail::bumpy(rng, g);
        const auto f = init_field(g, spec);
        const auto grad = gradient(g, f, assign(g, c.agents, c.sensors), c.agents, c.sensors);
        double scale2 = 0.0;
        for (const auto& v : grad) scale2 += dot(v, v);
        const double scale = std::sqrt(scale2);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto fd = fd_gradient_oracle(g, f, c.agents, c.sensors, i, delta);
            const Vec2 d = fd.value - grad[i];
            const double err = std::max(std::fabs(d.x), std::fabs(d.y));
            worst_stacked = std::max(worst_stacked, err / scale);
            if (norm(grad[i]) > 0.0) worst_agent = std::max(worst_agent, err / norm(grad[i]));
        }
    }
    o.pass = worst_stacked <= 5e-2;
    o.detail = "max component error / |grad| = " + detail::fmt("%.3e", worst_stacked) +
               " (per-agent scale: " + detail::fmt("%.3e", worst_agent) + "), delta = 2h";
    return o;
}

inline Outcome convergence() {
    Outcome o{6, "convergence", false, {}};
    std::mt19937_64 rng(106);
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    const double tol = 1e-2, eps = 2.0 * std::max(g.hx, g.hy);
    bool all_converged = true, monotone = true, flat = true;
    std::size_t max_iters = 0;
    double worst_drop = 0.0, worst_ratio = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto c = detail::random_config(rng, g, 3 + t % 3, 0.5, 0.5, 0.95, 0.05, 0.6);
        const auto f = init_field(g, detail::bumpy(rng, g));
        const auto res = deploy_until_converged(g, f, c.agents, c.sensors, ControlParams{}, tol, 500);
        all_converged = all_converged && res.converged;
        max_iters = std::max(max_iters, res.iterations);
        for (std::size_t k = 1; k < res.objective_history.size(); ++k) {
            const double drop = res.objective_history[k - 1] - res.objective_history[k];
            worst_drop = std::max(worst_drop, drop);
            monotone = monotone && drop <= 1e-9;
        }

        // At a tol-critical point |grad H| <= 2 tol ||M||_2; allow the 5% FD error on top.
        double m2 = 0.0;
        for (const auto& cd : res.final_centroids) m2 += cd.mass * cd.mass;
        const double floor = 2.0 * tol * std::sqrt(m2) * (1.0 + 5e-2);
        const std::size_t n = res.agents.size();
        auto H = [&](const std::vector<AgentState>& q) {
            return objective(g, f, assign(g, q, c.sensors), q, c.sensors);
        };
        std::normal_distribution<double> normal;
        for (int d = 0; d < 20; ++d) {
            std::vector<double> v(2 * n);
            double len = 0.0;
            for (auto& x : v) {
                x = normal(rng);
                len += x * x;
            }
            len = std::sqrt(len);
            auto plus = res.agents, minus = res.agents;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 dv{v[2 * i] / len, v[2 * i + 1] / len};
                plus[i].position = g.clamp(plus[i].position + eps * dv);
                minus[i].position = g.clamp(minus[i].position - eps * dv);
            }
            const double dd = std::fabs(H(plus) - H(minus)) / (2.0 * eps);
            worst_ratio = std::max(worst_ratio, dd / floor);
            flat = flat && dd <= floor;
        }
    }
    o.pass = all_converged && monotone && flat;
    o.detail = std::string("converged ") + (all_converged ? "10/10" : "NOT all") + " (max " +
               std::to_string(max_iters) + " iterations); max H drop " +
               detail::fmt("%.2e", worst_drop) + "; max |D_d H| / noise floor " +
               detail::fmt("%.3f", worst_ratio);
    return o;
}

inline Outcome decay_bound_check() {
    Outcome o{7, "decay-bound", false, {}};
    bool ok = true, strict = true;
    double worst_excess = -1.0;
    std::size_t events = 0;
    std::string ls;
    // case3 on the 10 x 10 region has l == 1 in double precision; the compact
    // scenario makes the bound bite.
    for (const char* name : {"case3_varying_both", "decay_compact"}) {
        const Scenario scn = detail::load(name);
        const Grid g = scn.grid();
        const UncertaintyField f0 = scn.field();
        const double l = decay_bound(scn.sensors, g, 1);
        ls += std::string(ls.empty() ? "" : ", ") + detail::fmt("%.6g", l);
        for (const auto& tr : detail::both_traces(scn, true)) {
            for (std::size_t n = 1; n <= tr.searches.size(); ++n) {
                const UncertaintyField& fn =
                    n < tr.searches.size() ? tr.fields_before[n] : tr.final_field;
                double ratio = 0.0;
                for (CellIndex c = 0; c < g.cell_count(); ++c)
                    if (f0[c] > 0.0) ratio = std::max(ratio, fn[c] / f0[c]);
                const double bound = std::pow(l, static_cast<double>(n)) + n * 1e-12;
                worst_excess = std::max(worst_excess, ratio - bound);
                ok = ok && ratio <= bound;
                strict = strict && tr.searches[n - 1].phi_after < tr.searches[n - 1].phi_before;
                ++events;
            }
        }
    }
    o.pass = ok && strict && events > 0;
    o.detail = std::to_string(events) + " search events over 2 scenarios x 2 strategies, l = " +
               ls + ", max(ratio - bound) = " + detail::fmt("%.3e", worst_excess) +
               ", Phi strictly decreasing " + (strict ? "yes" : "no");
    return o;
}

inline Outcome accounting() {
    Outcome o{8, "accounting", false, {}};
    double worst = 0.0;
    std::size_t events = 0;
    for (const char* name : {"comparative_5agent", "case3_varying_both", "range_limited"}) {
        const Scenario scn = detail::load(name);
        for (const auto& tr : detail::both_traces(scn, false))
            for (const auto& ev : tr.searches) {
                worst = std::max(worst, std::fabs((ev.phi_before - ev.phi_after) - ev.reduction) /
                                            ev.reduction);
                ++events;
            }
    }
    o.pass = events > 0 && worst <= 1e-12;
    o.detail = std::to_string(events) + " search events, max relative error " +
               detail::fmt("%.3e", worst);
    return o;
}

inline Outcome comparative() {
    Outcome o{9, "comparative", false, {}};
    const Scenario scn = detail::load("comparative_5agent");
    const auto traces = detail::both_traces(scn, false);
    const Report hsds = summarize(traces[0], 0.8), hcds = summarize(traces[1], 0.8);
    const bool reached = hsds.steps_to_threshold && hcds.steps_to_threshold;
    const bool faster = reached && *hcds.steps_to_threshold < *hsds.steps_to_threshold;
    const bool fewer = reached && *hsds.searches_to_threshold < *hcds.searches_to_threshold;
    o.pass = faster && fewer;
    auto opt = [](const std::optional<std::size_t>& v) {
        return v ? std::to_string(*v) : std::string("-");
    };
    o.detail = "to phi_avg 0.8: time steps hsds " + opt(hsds.steps_to_threshold) + " vs hcds " +
               opt(hcds.steps_to_threshold) + "; searches hsds " + opt(hsds.searches_to_threshold) +
               " vs hcds " + opt(hcds.searches_to_threshold);
    return o;
}

inline Outcome distributedness() {
    Outcome o{10, "distributedness", false, {}};
    std::mt19937_64 rng(110);
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    std::size_t checked = 0, mismatched = 0, skipped = 0;
    for (int t = 0; t < 10; ++t) {
        const auto c = detail::random_config(rng, g, 3 + t % 4, 0.0);
        const auto f = init_field(g, t % 2 == 0 ? DensitySpec::uniform(1.0) : detail::bumpy(rng, g));
        const auto part = assign(g, c.agents, c.sensors);
        const auto grad = gradient(g, f, part, c.agents, c.sensors);
        for (std::size_t i = 0; i < c.agents.size(); ++i) {
            if (part.cells[i].empty()) {
                ++skipped;
                continue;
            }
            const auto nb = part.adjacency.neighbors(i);
            const Vec2 loc = local_gradient(g, f, c.agents, c.sensors, i, nb);
            ++checked;
            mismatched += !(loc == grad[i]);
        }
    }
    o.pass = mismatched == 0 && checked > 0;
    o.detail = std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
               " agents bit-identical" +
               (skipped ? " (" + std::to_string(skipped) + " empty cells skipped)" : std::string());
    return o;
}

inline Outcome speed_caps() {
    Outcome o{11, "speed-caps", false, {}};
    Scenario scn = detail::load("case3_varying_both");
    const double caps[] = {0.25, 0.3, 0.4, 0.5, 0.35, 0.45};
    for (std::size_t i = 0; i < scn.sensors.size(); ++i) {
        scn.sensors[i].u_max = caps[i % 6];
        scn.sensors[i].u_const = caps[i % 6];
    }
    bool ok = true, converged = true;
    double worst = 0.0;
    std::string counts;
    for (auto mode : {ControlMode::saturated, ControlMode::constant_speed}) {
        StrategyConfig cfg = scn.strategy;
        cfg.kind = StrategyKind::hsds;
        cfg.control.mode = mode;
        cfg.deploy_tol = 1e-2;
        cfg.deploy_max_iters = 2000;
        const Trace tr = run_strategy(scn.grid(), scn.field(), scn.agents, scn.sensors, cfg);
        converged = converged && !tr.deploy_warning && !tr.searches.empty();
        for (std::size_t k = 1; k < tr.steps.size(); ++k)
            for (std::size_t i = 0; i < scn.sensors.size(); ++i) {
                const double cap = speed_cap(cfg.control, scn.sensors[i]);
                const double moved = distance(tr.steps[k].positions[i], tr.steps[k - 1].positions[i]) /
                                     cfg.control.dt;
                const double u = std::max(tr.steps[k].speeds[i], moved);
                worst = std::max(worst, u / cap);
                ok = ok && u <= cap * (1.0 + 1e-12);
            }
        counts += std::string(mode == ControlMode::saturated ? " saturated " : " constant-speed ") +
                  std::to_string(tr.steps.back().step) + " steps/" +
                  std::to_string(tr.searches.size()) + " searches;";
    }
    o.pass = ok && converged;
    o.detail = "max |u|/cap = " + detail::fmt("%.6f", worst) + ", every deployment converged " +
               (converged ? "yes" : "no") + ";" + counts;
    return o;
}

inline Outcome range_limited() {
    Outcome o{12, "range-limited", false, {}};
    const Scenario scn = detail::load("range_limited");
    const Grid g = scn.grid();
    const UncertaintyField f = scn.field();
    const auto& s = scn.sensors;

    // Restricted centroids against the dense oracle.
    auto part = assign(g, scn.agents, s);
    restrict_to_range(g, part, scn.agents, s);
    const auto cds = restricted_centroid(g, f, part, scn.agents, s);
    double worst_centroid = 0.0;
    for (std::size_t i = 0; i < scn.agents.size(); ++i) {
        const auto ref = oracle::dense_mass_centroid(g, f, part.labels, i, s[i],
                                                     scn.agents[i].position, *s[i].range);
        worst_centroid = std::max(worst_centroid, std::fabs(cds[i].mass - ref.mass) / ref.mass);
        worst_centroid = std::max(worst_centroid, distance(*cds[i].centroid, *ref.centroid));
    }

    // Cells beyond every agent's range are untouched by a search.
    const auto next = search_update(g, f, part, scn.agents, s, true);
    std::size_t far = 0, changed = 0;
    for (CellIndex c = 0; c < g.cell_count(); ++c) {
        bool beyond = true;
        for (std::size_t i = 0; i < s.size(); ++i)
            beyond = beyond && distance(g.center(c), scn.agents[i].position) > *s[i].range;
        if (!beyond) continue;
        ++far;
        changed += next[c] != f[c];
    }

    ControlParams ctl = scn.strategy.control;
    ctl.mode = ControlMode::range_limited_proportional;
    const auto dep = deploy_until_converged(g, f, scn.agents, s, ctl, 1e-2, 500, true);
    double final_gap = 0.0;
    for (std::size_t i = 0; i < dep.agents.size(); ++i)
        if (dep.final_centroids[i].defined())
            final_gap = std::max(final_gap, distance(dep.agents[i].position,
                                                     *dep.final_centroids[i].centroid));

    o.pass = worst_centroid <= 1e-12 && far > 0 && changed == 0 && dep.converged &&
             final_gap <= 1e-2;
    o.detail = "centroid/mass error " + detail::fmt("%.2e", worst_centroid) + "; " +
               std::to_string(changed) + "/" + std::to_string(far) +
               " out-of-range cells changed; deployment " +
               (dep.converged ? "converged" : "did NOT converge") + " in " +
               std::to_string(dep.iterations) + " iterations, max |p - C| " +
               detail::fmt("%.2e", final_gap);
    return o;
}

inline Outcome step_optimality() {
    Outcome o{13, "step-optimality", false, {}};
    const Scenario scn = detail::load("comparative_5agent");
    const Grid g = scn.grid();
    StrategyConfig cfg = scn.strategy;
    cfg.kind = StrategyKind::hsds;
    cfg.record_fields = true;
    const Trace tr = run_strategy(g, scn.field(), scn.agents, scn.sensors, cfg);
    const double h = std::max(g.hx, g.hy);
    double worst = -1.0;
    std::size_t probes = 0;
    for (std::size_t n = 0; n < tr.searches.size(); ++n) {
        const auto& field = tr.fields_before[n];
        std::vector<AgentState> agents = scn.agents;
        for (std::size_t i = 0; i < agents.size(); ++i) agents[i].position = tr.searches[n].positions[i];
        const double H0 = tr.searches[n].reduction;
        for (std::size_t i = 0; i < agents.size(); ++i)
            for (const Vec2 d : {Vec2{5 * h, 0}, Vec2{-5 * h, 0}, Vec2{0, 5 * h}, Vec2{0, -5 * h}}) {
                auto moved = agents;
                moved[i].position = g.clamp(moved[i].position + d);
                bool clash = false;
                for (std::size_t j = 0; j < moved.size(); ++j)
                    clash = clash || (j != i && moved[j].position == moved[i].position);
                if (clash) continue;
                const double H = objective(g, field, assign(g, moved, scn.sensors), moved, scn.sensors);
                worst = std::max(worst, (H - H0) / H0);
                ++probes;
            }
    }
    o.pass = probes > 0 && worst <= 5e-3;
    o.detail = std::to_string(tr.searches.size()) + " search instants, " + std::to_string(probes) +
               " perturbations, max relative gain " + detail::fmt("%.3e", worst);
    return o;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Outcome determinism() {
    Outcome o{14, "determinism", false, {}};
    namespace fs = std::filesystem;
    const Scenario scn = detail::load("comparative_5agent");
    const fs::path root = fs::temp_directory_path() / ("hetsearch_det_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::vector<fs::path> dirs{root / "a", root / "b"};
    for (const auto& d : dirs)
        for (auto kind : {StrategyKind::hsds, StrategyKind::hcds})
            run_to_dir(scn, kind, d / to_string(kind), true);
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
        if (!e.is_regular_file()) continue;
        const fs::path other = dirs[1] / fs::relative(e.path(), dirs[0]);
        ++files;
        differ += !fs::exists(other) || slurp(e.path()) != slurp(other);
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(dirs[1])) files_b += e.is_regular_file();
    fs::remove_all(root);
    o.pass = files > 0 && differ == 0 && files == files_b;
    o.detail = std::to_string(files) + " files compared, " + std::to_string(differ) + " differ";
    return o;
}

struct Suite {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

inline const std::vector<Suite>& suites() {
    static const std::vector<Suite> all{
        {1, "partition-oracle", partition_oracle}, {2, "case1-weights", case1_weights},
        {3, "case2-line", case2_line},             {4, "case4-voronoi", case4_voronoi},
        {5, "gradient", gradient_check},           {6, "convergence", convergence},
        {7, "decay-bound", decay_bound_check},     {8, "accounting", accounting},
        {9, "comparative", comparative},           {10, "distributedness", distributedness},
        {11, "speed-caps", speed_caps},            {12, "range-limited", range_limited},
        {13, "step-optimality", step_optimality},  {14, "determinism", determinism},
    };
    return all;
}

inline std::string suite_names() {
    std::string s;
    for (const auto& x : suites()) s += std::string(s.empty() ? "" : ", ") + x.name;
    return s + ", all";
}

/// Runs the named suite (or every suite for "all"); exceptions become failures.
inline std::vector<Outcome> run(const std::string& name) {
    std::vector<Outcome> out;
    bool found = false;
    for (const auto& s : suites()) {
        if (name != "all" && name != s.name) continue;
        found = true;
        try {
            out.push_back(s.run());
        } catch (const std::exception& e) {
            out.push_back({s.id, s.name, false, std::string("error: ") + e.what()});
        }
    }
    if (!found) throw ArgumentError("unknown suite '" + name + "'; available: " + suite_names());
    return out;
}

inline std::string format(const Outcome& o) {
    char head[64];
    std::snprintf(head, sizeof head, "%s criterion %02d %-17s ", o.pass ? "PASS" : "FAIL", o.id,
                  o.suite.c_str());
    return head + o.detail;
}

} // namespace hetsearch::acceptance
