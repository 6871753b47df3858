#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hetsearch/control.hpp"
#include "hetsearch/errors.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/locational.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/sensing.hpp"

namespace hetsearch {

enum class StrategyKind { hsds, hcds };

inline const char* to_string(StrategyKind k) { return k == StrategyKind::hsds ? "hsds" : "hcds"; }

struct StrategyConfig {
    StrategyKind kind = StrategyKind::hsds;
    ControlParams control;
    double deploy_tol = 1e-2;
    std::size_t deploy_max_iters = 500;
    double stop_threshold = 0.1;     // on average uncertainty
    std::size_t max_search_steps = 100;
    std::size_t search_period = 1;   // HCDS: time steps between searches
    double latency = 0.0;            // must not exceed the search period in time units
    bool range_mode = false;
    bool record_fields = false;      // keep the field before every search in the trace

    void validate() const {
        control.validate();
        if (!(stop_threshold > 0.0 && stop_threshold < 1.0))
            throw ConfigError("stop_threshold must lie in (0,1)");
        if (!(deploy_tol > 0.0)) throw ConfigError("deploy_tol must be positive");
        if (deploy_max_iters < 1) throw ConfigError("deploy_max_iters must be at least 1");
        if (search_period < 1) throw ConfigError("search_period must be at least 1 step");
        if (!(latency >= 0.0)) throw ConfigError("latency must be nonnegative");
        if (static_cast<double>(search_period) * control.dt < latency)
            throw ConfigError("search period T must be greater than or equal to latency t_s");
        if (control.mode == ControlMode::range_limited_proportional && !range_mode)
            throw ConfigError("range_limited_proportional control requires range mode");
    }
};

struct StepRecord {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<Vec2> positions;
    std::vector<double> speeds; // commanded speed per agent for the move into this step
    bool search_event = false;
    double phi_total = 0.0;     // after any search at this step
    double phi_avg = 0.0;
    double objective = 0.0;     // reduction a search at this configuration removes
    std::size_t search_count = 0;
};

struct SearchEvent {
    std::size_t step = 0;
    double phi_before = 0.0;
    double phi_after = 0.0;
    double reduction = 0.0;  // H at the search configuration
    std::size_t deploy_iterations = 0;
    bool deploy_converged = true;
    std::vector<Vec2> positions;
    std::vector<std::uint32_t> labels;
};

struct Trace {
    StrategyKind kind = StrategyKind::hsds;
    Grid grid;
    std::vector<StepRecord> steps;
    std::vector<SearchEvent> searches;
    std::vector<UncertaintyField> fields_before; // filled when record_fields is set
    UncertaintyField final_field;
    bool deploy_warning = false;                 // some deployment hit max_iters
    std::size_t clamp_events = 0;
    std::size_t displacement_events = 0;
    std::size_t null_cell_events = 0;
};

/// phi'(c) = phi(c) * beta_i(|p_i - c|) for the owner i of each cell.
/// In range mode cells beyond the owner's range are left untouched.
inline UncertaintyField search_update(const Grid& g, const UncertaintyField& field,
                                      const Partition& part, std::span<const AgentState> agents,
                                      std::span<const SensorModel> sensors, bool range_mode) {
    if (range_mode) {
        for (const auto& s : sensors)
            if (!s.range) throw UnsupportedModeError("range mode requires a range on every sensor");
    }
    UncertaintyField out;
    out.values.resize(field.values.size());
    out.step_count = field.step_count + 1;
    for (CellIndex c = 0; c < g.cell_count(); ++c) {
        const std::size_t i = part.labels[c];
        const SensorModel& s = sensors[i];
        const double r2 = distance_sq(agents[i].position, g.center(c));
        if (range_mode && r2 > *s.range * *s.range) {
            out.values[c] = field.values[c];
            continue;
        }
        out.values[c] = field.values[c] * (1.0 - node_fn_sq(s, r2));
    }
    return out;
}

/// Worst-case per-search shrink factor l^n, l = 1 - min_i k_i exp(-max_i alpha_i D(Q)^2).
inline double decay_bound(std::span<const SensorModel> sensors, const Grid& g, std::size_t n,
                          bool range_mode = false) {
    if (range_mode)
        throw UnsupportedModeError("the decay bound needs unlimited sensor range");
    if (sensors.empty()) throw ArgumentError("decay bound needs at least one sensor");
    double kmin = sensors[0].k, amax = sensors[0].alpha;
    for (const auto& s : sensors) {
        kmin = std::min(kmin, s.k);
        amax = std::max(amax, s.alpha);
    }
    const double D = diameter(g);
    const double l = 1.0 - kmin * std::exp(-amax * D * D);
    return std::pow(l, static_cast<double>(n));
}

namespace detail {

inline std::vector<Vec2> positions_of(std::span<const AgentState> agents) {
    std::vector<Vec2> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.position);
    return out;
}

inline void validate_run(const Grid& g, const UncertaintyField& field0,
                         std::span<const AgentState> agents, std::span<const SensorModel> sensors,
                         const StrategyConfig& cfg) {
    cfg.validate();
    if (field0.values.size() != g.cell_count())
        throw ArgumentError("field does not match the grid");
    if (agents.size() != sensors.size())
        throw ArgumentError("agents and sensors must have the same length");
    for (const auto& s : sensors) s.validate();
    validate_agents(g, agents);
    if (cfg.range_mode) check_equal_cutoff(sensors);
}

struct SearchOutcome {
    UncertaintyField field;
    SearchEvent event;
};

inline SearchOutcome search_at(const Grid& g, const UncertaintyField& field,
                               std::span<const AgentState> agents,
                               std::span<const SensorModel> sensors, bool range_mode,
                               std::size_t step) {
    DeployState st = evaluate_configuration(g, field, agents, sensors, range_mode);
    SearchOutcome out;
    out.field = search_update(g, field, st.partition, agents, sensors, range_mode);
    out.event.step = step;
    out.event.phi_before = total_uncertainty(g, field);
    out.event.phi_after = total_uncertainty(g, out.field);
    out.event.reduction = st.reduction;
    out.event.positions = positions_of(agents);
    out.event.labels = std::move(st.partition.labels);
    return out;
}

inline StepRecord initial_record(const Grid& g, const UncertaintyField& field,
                                 std::span<const AgentState> agents,
                                 std::span<const SensorModel> sensors, bool range_mode) {
    StepRecord r;
    r.positions = positions_of(agents);
    r.speeds.assign(agents.size(), 0.0);
    r.phi_total = total_uncertainty(g, field);
    r.phi_avg = r.phi_total / g.area();
    r.objective = evaluate_configuration(g, field, agents, sensors, range_mode).reduction;
    return r;
}

} // namespace detail

/**
 * Sequential deploy and search: deploy to the centroidal configuration, search once,
 * repeat until the average uncertainty reaches the stop threshold.
 *
 * Each move is one time step. A search happens at the end of the step that completes a
 * deployment; a deployment that needs no move still occupies one (stationary) step.
 */
inline Trace run_hsds(const Grid& g, const UncertaintyField& field0,
                      std::span<const AgentState> agents0, std::span<const SensorModel> sensors,
                      const StrategyConfig& cfg) {
    if (cfg.kind != StrategyKind::hsds) throw ConfigError("run_hsds needs kind = hsds");
    detail::validate_run(g, field0, agents0, sensors, cfg);

    Trace tr;
    tr.kind = StrategyKind::hsds;
    tr.grid = g;
    UncertaintyField field = field0;
    std::vector<AgentState> agents(agents0.begin(), agents0.end());
    tr.steps.push_back(detail::initial_record(g, field, agents, sensors, cfg.range_mode));

    std::size_t step = 0;
    while (tr.steps.back().phi_avg > cfg.stop_threshold &&
           tr.searches.size() < cfg.max_search_steps) {
        DeployResult dep = deploy_until_converged(g, field, agents, sensors, cfg.control,
                                                  cfg.deploy_tol, cfg.deploy_max_iters,
                                                  cfg.range_mode);
        tr.clamp_events += dep.clamp_events;
        tr.displacement_events += dep.displacement_events;
        tr.null_cell_events += dep.null_cell_events;
        if (!dep.converged) tr.deploy_warning = true;

        const double phi_total = tr.steps.back().phi_total;
        const std::size_t count = tr.searches.size();
        for (std::size_t it = 0; it < dep.iterations; ++it) {
            StepRecord r;
            r.step = ++step;
            r.time = static_cast<double>(step) * cfg.control.dt;
            r.positions = dep.trajectory[it + 1];
            r.speeds = dep.speeds[it];
            r.phi_total = phi_total;
            r.phi_avg = phi_total / g.area();
            r.objective = dep.reduction_history[it + 1];
            r.search_count = count;
            tr.steps.push_back(std::move(r));
        }
        if (dep.iterations == 0) {
            StepRecord r;
            r.step = ++step;
            r.time = static_cast<double>(step) * cfg.control.dt;
            r.positions = dep.trajectory.front();
            r.speeds.assign(agents.size(), 0.0);
            r.phi_total = phi_total;
            r.phi_avg = phi_total / g.area();
            r.objective = dep.reduction_history.front();
            r.search_count = count;
            tr.steps.push_back(std::move(r));
        }

        agents = dep.agents;
        if (cfg.record_fields) tr.fields_before.push_back(field);
        auto outcome = detail::search_at(g, field, agents, sensors, cfg.range_mode, step);
        outcome.event.deploy_iterations = dep.iterations;
        outcome.event.deploy_converged = dep.converged;
        field = std::move(outcome.field);

        StepRecord& last = tr.steps.back();
        last.search_event = true;
        last.objective = outcome.event.reduction;
        last.phi_total = outcome.event.phi_after;
        last.phi_avg = last.phi_total / g.area();
        last.search_count = count + 1;
        tr.searches.push_back(std::move(outcome.event));
    }
    tr.final_field = std::move(field);
    return tr;
}

/**
 * Combined deploy and search: every time step takes one control step toward the
 * instantaneous centroids; a search is performed every `search_period` steps at the
 * configuration reached.
 */
inline Trace run_hcds(const Grid& g, const UncertaintyField& field0,
                      std::span<const AgentState> agents0, std::span<const SensorModel> sensors,
                      const StrategyConfig& cfg) {
    if (cfg.kind != StrategyKind::hcds) throw ConfigError("run_hcds needs kind = hcds");
    detail::validate_run(g, field0, agents0, sensors, cfg);
    if (cfg.control.mode == ControlMode::range_limited_proportional && !cfg.range_mode)
        throw UnsupportedModeError("range-limited control needs range mode");

    Trace tr;
    tr.kind = StrategyKind::hcds;
    tr.grid = g;
    UncertaintyField field = field0;
    std::vector<AgentState> agents(agents0.begin(), agents0.end());
    tr.steps.push_back(detail::initial_record(g, field, agents, sensors, cfg.range_mode));

    std::size_t step = 0;
    while (tr.steps.back().phi_avg > cfg.stop_threshold &&
           tr.searches.size() < cfg.max_search_steps) {
        const DeployState st = evaluate_configuration(g, field, agents, sensors, cfg.range_mode);
        for (const auto& cd : st.centroids)
            if (!(cd.mass > 0.0)) ++tr.null_cell_events;

        StepRecord r;
        agents = control_step(g, agents, sensors, st.centroids, cfg.control, &r.speeds,
                              &tr.clamp_events, &tr.displacement_events);
        r.step = ++step;
        r.time = static_cast<double>(step) * cfg.control.dt;
        r.positions = detail::positions_of(agents);
        r.search_count = tr.searches.size();

        if (step % cfg.search_period == 0) {
            if (cfg.record_fields) tr.fields_before.push_back(field);
            auto outcome = detail::search_at(g, field, agents, sensors, cfg.range_mode, step);
            outcome.event.deploy_iterations = 1;
            field = std::move(outcome.field);
            r.search_event = true;
            r.objective = outcome.event.reduction;
            r.phi_total = outcome.event.phi_after;
            r.search_count += 1;
            tr.searches.push_back(std::move(outcome.event));
        } else {
            r.objective = evaluate_configuration(g, field, agents, sensors, cfg.range_mode).reduction;
            r.phi_total = tr.steps.back().phi_total;
        }
        r.phi_avg = r.phi_total / g.area();
        tr.steps.push_back(std::move(r));
    }
    tr.final_field = std::move(field);
    return tr;
}

inline Trace run_strategy(const Grid& g, const UncertaintyField& field0,
                          std::span<const AgentState> agents0,
                          std::span<const SensorModel> sensors, const StrategyConfig& cfg) {
    return cfg.kind == StrategyKind::hsds ? run_hsds(g, field0, agents0, sensors, cfg)
                                          : run_hcds(g, field0, agents0, sensors, cfg);
}

struct Report {
    StrategyKind kind = StrategyKind::hsds;
    double threshold = 0.0;
    std::optional<std::size_t> steps_to_threshold;
    std::optional<std::size_t> searches_to_threshold;
    std::vector<double> distance_per_agent;
    double final_phi_avg = 0.0;
    std::size_t total_steps = 0;
    std::size_t total_searches = 0;
    bool deploy_warning = false;
};

inline Report summarize(const Trace& tr, double threshold) {
    if (tr.steps.empty()) throw ArgumentError("cannot summarize an empty trace");
    Report rep;
    rep.kind = tr.kind;
    rep.threshold = threshold;
    for (const auto& r : tr.steps) {
        if (r.phi_avg <= threshold) {
            rep.steps_to_threshold = r.step;
            rep.searches_to_threshold = r.search_count;
            break;
        }
    }
    rep.distance_per_agent.assign(tr.steps.front().positions.size(), 0.0);
    for (std::size_t k = 1; k < tr.steps.size(); ++k)
        for (std::size_t i = 0; i < rep.distance_per_agent.size(); ++i)
            rep.distance_per_agent[i] +=
                distance(tr.steps[k].positions[i], tr.steps[k - 1].positions[i]);
    rep.final_phi_avg = tr.steps.back().phi_avg;
    rep.total_steps = tr.steps.back().step;
    rep.total_searches = tr.searches.size();
    rep.deploy_warning = tr.deploy_warning;
    return rep;
}

inline std::string format_report(const Report& rep) {
    std::ostringstream os;
    auto opt = [](const std::optional<std::size_t>& v) {
        return v ? std::to_string(*v) : std::string("not reached");
    };
    os << "strategy: " << to_string(rep.kind) << '\n';
    os << "threshold: " << detail::fmt_double(rep.threshold) << '\n';
    os << "steps_to_threshold: " << opt(rep.steps_to_threshold) << '\n';
    os << "searches_to_threshold: " << opt(rep.searches_to_threshold) << '\n';
    os << "total_steps: " << rep.total_steps << '\n';
    os << "total_searches: " << rep.total_searches << '\n';
    os << "final_phi_avg: " << detail::fmt_double(rep.final_phi_avg) << '\n';
    for (std::size_t i = 0; i < rep.distance_per_agent.size(); ++i)
        os << "distance_agent_" << i << ": " << detail::fmt_double(rep.distance_per_agent[i])
           << '\n';
    if (rep.deploy_warning) os << "warning: a deployment stopped at max_iters before converging\n";
    return os.str();
}

inline void write_trajectory_csv(std::ostream& os, const Trace& tr) {
    os << "step,time,agent_id,x,y,is_search_event\n";
    for (const auto& r : tr.steps)
        for (std::size_t i = 0; i < r.positions.size(); ++i)
            os << r.step << ',' << detail::fmt_double(r.time) << ',' << i << ','
               << detail::fmt_double(r.positions[i].x) << ',' << detail::fmt_double(r.positions[i].y)
               << ',' << (r.search_event ? 1 : 0) << '\n';
}

inline void write_uncertainty_csv(std::ostream& os, const Trace& tr) {
    os << "step,phi_total,phi_avg,H,search_count\n";
    for (const auto& r : tr.steps)
        os << r.step << ',' << detail::fmt_double(r.phi_total) << ','
           << detail::fmt_double(r.phi_avg) << ',' << detail::fmt_double(r.objective) << ','
           << r.search_count << '\n';
}

} // namespace hetsearch
