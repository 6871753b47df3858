#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hetsearch/errors.hpp"
#include "hetsearch/geometry.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/locational.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/sensing.hpp"

namespace hetsearch {

enum class ControlMode { proportional, saturated, constant_speed, range_limited_proportional };

struct ControlParams {
    ControlMode mode = ControlMode::proportional;
    double k_prop = 0.5;          // 1/time
    double dt = 1.0;              // time per step
    double slowdown_radius = 1.0; // constant-speed law switches to proportional inside this

    void validate() const {
        if (!(k_prop > 0.0)) throw ConfigError("k_prop must be positive");
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(slowdown_radius > 0.0)) throw ConfigError("slowdown_radius must be positive");
    }
};

/// Velocity command toward the cell centroid. Massless cells yield zero velocity.
inline Vec2 control_velocity(const ControlParams& params, const AgentState& agent,
                             const CentroidData& cd, const SensorModel& sensor) {
    if (!cd.defined() || !(cd.mass > 0.0)) return {0.0, 0.0};
    const Vec2 d = agent.position - *cd.centroid;
    switch (params.mode) {
    case ControlMode::proportional:
    case ControlMode::range_limited_proportional:
        return -params.k_prop * d;
    case ControlMode::saturated: {
        if (!sensor.u_max)
            throw ConfigError("saturated control needs u_max on agent " + std::to_string(agent.id));
        const Vec2 u = -params.k_prop * d;
        if (norm(u) > *sensor.u_max)
            return -*sensor.u_max * (d / norm(d));
        return u;
    }
    case ControlMode::constant_speed: {
        if (!sensor.u_const)
            throw ConfigError("constant-speed control needs u_const on agent " +
                              std::to_string(agent.id));
        const double nd = norm(d);
        if (nd >= params.slowdown_radius)
            return -*sensor.u_const * (d / nd);
        // Scaled so both branches meet at the slowdown radius.
        return -(*sensor.u_const / params.slowdown_radius) * d;
    }
    }
    return {0.0, 0.0};
}

// Speed cap the control law guarantees for this agent, or +inf if none applies.
inline double speed_cap(const ControlParams& params, const SensorModel& sensor) {
    if (params.mode == ControlMode::saturated && sensor.u_max) return *sensor.u_max;
    if (params.mode == ControlMode::constant_speed && sensor.u_const) return *sensor.u_const;
    return std::numeric_limits<double>::infinity();
}

inline AgentState step_position(const Grid& g, const AgentState& agent, Vec2 velocity, double dt) {
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    return {agent.id, g.clamp(agent.position + velocity * dt)};
}

/// Moves agents that landed on an occupied position by one grid spacing along the
/// shorter axis of the region. Returns the number of displacements.
inline std::size_t separate_coincident(const Grid& g, std::vector<AgentState>& agents) {
    const bool along_x = (g.xmax - g.xmin) <= (g.ymax - g.ymin);
    const Vec2 step = along_x ? Vec2{g.hx, 0.0} : Vec2{0.0, g.hy};
    std::size_t moved = 0;
    for (std::size_t i = 1; i < agents.size(); ++i) {
        auto occupied = [&](Vec2 q) {
            for (std::size_t j = 0; j < i; ++j)
                if (agents[j].position == q) return true;
            return false;
        };
        if (!occupied(agents[i].position)) continue;
        ++moved;
        const Vec2 origin = agents[i].position;
        const std::size_t reach = along_x ? g.nx : g.ny;
        for (std::size_t k = 1; k <= reach; ++k) {
            const Vec2 up = origin + static_cast<double>(k) * step;
            const Vec2 down = origin - static_cast<double>(k) * step;
            if (g.contains(up) && !occupied(up)) {
                agents[i].position = up;
                break;
            }
            if (g.contains(down) && !occupied(down)) {
                agents[i].position = down;
                break;
            }
        }
    }
    return moved;
}

struct DeployResult {
    std::vector<AgentState> agents;
    std::size_t iterations = 0; // position updates performed
    bool converged = false;

    // One entry per visited configuration (iterations + 1 entries).
    std::vector<std::vector<Vec2>> trajectory;
    std::vector<double> objective_history; // objective being ascended
    std::vector<double> reduction_history; // uncertainty a search would remove there
    std::vector<double> max_distance_history;

    // One entry per position update: commanded speed of each agent.
    std::vector<std::vector<double>> speeds;

    std::size_t clamp_events = 0;
    std::size_t displacement_events = 0;
    std::size_t null_cell_events = 0;

    Partition final_partition;
    std::vector<CentroidData> final_centroids;
};

/// Uncertainty removed if every agent searched now: the objective in unlimited mode,
/// or the sum over the range-restricted cells of phi * f_i in range mode.
inline double search_reduction(const Grid& g, const UncertaintyField& field, const Partition& part,
                               std::span<const AgentState> agents,
                               std::span<const SensorModel> sensors, bool range_mode) {
    if (!range_mode) return objective(g, field, part, agents, sensors);
    if (!part.range_masks) throw UnsupportedModeError("range mode needs range masks");
    CompensatedSum total;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Vec2 p = agents[i].position;
        const SensorModel& s = sensors[i];
        total.add(integrate(
            g, field, [&](Vec2 q) { return node_fn_sq(s, distance_sq(p, q)); },
            (*part.range_masks)[i]));
    }
    return total.value();
}

struct DeployState {
    Partition partition;
    std::vector<CentroidData> centroids;
    double objective = 0.0;
    double reduction = 0.0;
};

/// Partition, centroids and objectives at one configuration.
inline DeployState evaluate_configuration(const Grid& g, const UncertaintyField& field,
                                          std::span<const AgentState> agents,
                                          std::span<const SensorModel> sensors, bool range_mode,
                                          PartitionMode mode = PartitionMode::gaussian) {
    DeployState st;
    st.partition = assign(g, agents, sensors, mode);
    if (range_mode) {
        restrict_to_range(g, st.partition, agents, sensors);
        st.centroids = restricted_centroid(g, field, st.partition, agents, sensors);
        st.objective = range_objective(g, field, st.partition, agents, sensors);
        st.reduction = search_reduction(g, field, st.partition, agents, sensors, true);
    } else {
        st.centroids = cell_centroids(g, field, st.partition, agents, sensors);
        st.objective = objective(g, field, st.partition, agents, sensors);
        st.reduction = st.objective;
    }
    return st;
}

/// One synchronous control step: every agent moves from the same previous configuration.
inline std::vector<AgentState> control_step(const Grid& g, std::span<const AgentState> agents,
                                            std::span<const SensorModel> sensors,
                                            std::span<const CentroidData> centroids,
                                            const ControlParams& params,
                                            std::vector<double>* speeds = nullptr,
                                            std::size_t* clamps = nullptr,
                                            std::size_t* displaced = nullptr) {
    std::vector<AgentState> next;
    next.reserve(agents.size());
    if (speeds) speeds->assign(agents.size(), 0.0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Vec2 u = control_velocity(params, agents[i], centroids[i], sensors[i]);
        if (speeds) (*speeds)[i] = norm(u);
        const Vec2 raw = agents[i].position + u * params.dt;
        next.push_back(step_position(g, agents[i], u, params.dt));
        if (clamps && !(next.back().position == raw)) ++*clamps;
    }
    const std::size_t moved = separate_coincident(g, next);
    if (displaced) *displaced += moved;
    return next;
}

/**
 * Repeats partition -> centroids -> control -> move until every agent is within `tol`
 * of its centroid, or `max_iters` moves have been made (converged = false).
 */
inline DeployResult deploy_until_converged(const Grid& g, const UncertaintyField& field,
                                           std::span<const AgentState> agents0,
                                           std::span<const SensorModel> sensors,
                                           const ControlParams& params, double tol,
                                           std::size_t max_iters, bool range_mode = false,
                                           PartitionMode mode = PartitionMode::gaussian) {
    params.validate();
    if (!(tol > 0.0)) throw ArgumentError("deployment tolerance must be positive");
    if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
    if (params.mode == ControlMode::range_limited_proportional && !range_mode)
        throw UnsupportedModeError("range-limited control needs range mode");

    DeployResult res;
    res.agents.assign(agents0.begin(), agents0.end());
    for (;;) {
        DeployState st = evaluate_configuration(g, field, res.agents, sensors, range_mode, mode);
        const CriticalCheck crit = is_critical(res.agents, st.centroids, tol);

        std::vector<Vec2> config;
        for (const auto& a : res.agents) config.push_back(a.position);
        res.trajectory.push_back(std::move(config));
        res.objective_history.push_back(st.objective);
        res.reduction_history.push_back(st.reduction);
        res.max_distance_history.push_back(crit.max_distance);
        for (const auto& cd : st.centroids)
            if (!(cd.mass > 0.0)) ++res.null_cell_events;

        if (crit.critical || res.iterations >= max_iters) {
            res.converged = crit.critical;
            res.final_partition = std::move(st.partition);
            res.final_centroids = std::move(st.centroids);
            return res;
        }
        std::vector<double> speeds;
        res.agents = control_step(g, res.agents, sensors, st.centroids, params, &speeds,
                                  &res.clamp_events, &res.displacement_events);
        res.speeds.push_back(std::move(speeds));
        ++res.iterations;
    }
}

} // namespace hetsearch
