#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "hetsearch/errors.hpp"
#include "hetsearch/geometry.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/sensing.hpp"

namespace hetsearch {

// Mass and centroid of a cell under the density phi~ = -phi df/d(r^2).
// The centroid is absent when the mass is zero.
struct CentroidData {
    double mass = 0.0;
    std::optional<Vec2> centroid;

    bool defined() const { return centroid.has_value(); }
};

// phi~ at squared distance r2. In quadratic mode df/d(r^2) = -1, so phi~ = phi.
inline double tilde_value(PartitionMode mode, const SensorModel& s, double r2, double phi) {
    return mode == PartitionMode::gaussian ? tilde_weight_sq(s, r2, phi) : phi;
}

inline CentroidData mass_centroid(const Grid& g, const UncertaintyField& field,
                                  std::span<const CellIndex> cells, const SensorModel& sensor,
                                  Vec2 p, PartitionMode mode = PartitionMode::gaussian) {
    CompensatedSum m, mx, my;
    const double da = g.cell_area();
    for (CellIndex c : cells) {
        const Vec2 q = g.center(c);
        const double w = tilde_value(mode, sensor, distance_sq(p, q), field.values[c]) * da;
        m.add(w);
        mx.add(w * q.x);
        my.add(w * q.y);
    }
    CentroidData out;
    out.mass = m.value();
    if (out.mass > 0.0)
        out.centroid = Vec2{mx.value() / out.mass, my.value() / out.mass};
    return out;
}

// dH/dp_i = -2 M~_i (p_i - C~_i); zero for an empty (massless) cell.
inline Vec2 gradient_from(const CentroidData& cd, Vec2 p) {
    if (!cd.defined()) return {0.0, 0.0};
    return -2.0 * cd.mass * (p - *cd.centroid);
}

inline std::vector<CentroidData> cell_centroids(const Grid& g, const UncertaintyField& field,
                                                const Partition& part,
                                                std::span<const AgentState> agents,
                                                std::span<const SensorModel> sensors) {
    std::vector<CentroidData> out;
    out.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
        out.push_back(mass_centroid(g, field, part.cells[i], sensors[i], agents[i].position,
                                    part.mode));
    return out;
}

/// Multi-center objective H = sum_i integral over V_i of phi * f_i.
/// In gaussian mode this is exactly the uncertainty removed by searching now.
inline double objective(const Grid& g, const UncertaintyField& field, const Partition& part,
                        std::span<const AgentState> agents, std::span<const SensorModel> sensors) {
    CompensatedSum total;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Vec2 p = agents[i].position;
        const SensorModel& s = sensors[i];
        total.add(integrate(
            g, field, [&](Vec2 q) { return node_value(part.mode, s, distance_sq(p, q)); },
            part.cells[i]));
    }
    return total.value();
}

inline std::vector<Vec2> gradient(const Grid& g, const UncertaintyField& field,
                                  const Partition& part, std::span<const AgentState> agents,
                                  std::span<const SensorModel> sensors) {
    const auto cds = cell_centroids(g, field, part, agents, sensors);
    std::vector<Vec2> out;
    out.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
        out.push_back(gradient_from(cds[i], agents[i].position));
    return out;
}

/// Centroids of the range-restricted cells V_i within distance R_i of p_i.
/// Inside the range df^/d(r^2) = df/d(r^2), and f^ is flat beyond it, so the weight is
/// the ordinary phi~ restricted to the mask.
inline std::vector<CentroidData> restricted_centroid(const Grid& g, const UncertaintyField& field,
                                                     const Partition& part,
                                                     std::span<const AgentState> agents,
                                                     std::span<const SensorModel> sensors) {
    if (!part.range_masks)
        throw UnsupportedModeError("restricted centroids need range masks (range mode is off)");
    if (part.mode != PartitionMode::gaussian)
        throw UnsupportedModeError("range mode is only defined for gaussian sensors");
    std::vector<CentroidData> out;
    out.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
        out.push_back(mass_centroid(g, field, (*part.range_masks)[i], sensors[i],
                                    agents[i].position, part.mode));
    return out;
}

/// Range-limited objective: sum_i over V_i within range of phi * f^_i.
inline double range_objective(const Grid& g, const UncertaintyField& field, const Partition& part,
                              std::span<const AgentState> agents,
                              std::span<const SensorModel> sensors) {
    if (!part.range_masks)
        throw UnsupportedModeError("range objective needs range masks (range mode is off)");
    CompensatedSum total;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Vec2 p = agents[i].position;
        const SensorModel& s = sensors[i];
        const double cut = cutoff_value(s);
        total.add(integrate(
            g, field, [&](Vec2 q) { return std::max(node_fn_sq(s, distance_sq(p, q)) - cut, 0.0); },
            (*part.range_masks)[i]));
    }
    return total.value();
}

struct FdGradient {
    Vec2 value;
    double delta = 0.0;
    bool shrunk = false; // the requested step left the region or hit another agent
};

/// Central finite difference of the objective in p_i, recomputing the partition at every
/// perturbed configuration (total derivative, boundary motion included).
inline FdGradient fd_gradient_oracle(const Grid& g, const UncertaintyField& field,
                                     std::span<const AgentState> agents,
                                     std::span<const SensorModel> sensors, std::size_t i,
                                     double delta, PartitionMode mode = PartitionMode::gaussian) {
    if (!(delta > 0.0))
        throw ArgumentError("finite-difference step must be positive");
    std::vector<AgentState> work(agents.begin(), agents.end());
    const Vec2 p = agents[i].position;

    auto admissible = [&](Vec2 q) {
        if (!g.contains(q)) return false;
        for (std::size_t j = 0; j < agents.size(); ++j)
            if (j != i && agents[j].position == q) return false;
        return true;
    };
    auto eval = [&](Vec2 q) {
        work[i].position = q;
        const Partition part = assign(g, work, sensors, mode);
        return objective(g, field, part, work, sensors);
    };

    FdGradient out;
    double d = delta;
    while (!(admissible(p + Vec2{d, 0}) && admissible(p - Vec2{d, 0}) &&
             admissible(p + Vec2{0, d}) && admissible(p - Vec2{0, d}))) {
        d *= 0.5;
        out.shrunk = true;
        if (d < 1e-12)
            throw ArgumentError("agent sits on the region boundary; no admissible central step");
    }
    out.delta = d;
    out.value.x = (eval(p + Vec2{d, 0}) - eval(p - Vec2{d, 0})) / (2.0 * d);
    out.value.y = (eval(p + Vec2{0, d}) - eval(p - Vec2{0, d})) / (2.0 * d);
    return out;
}

struct CriticalCheck {
    bool critical = true;
    std::vector<double> distances; // ||p_i - C~_i||, 0 for massless cells
    double max_distance = 0.0;
};

inline CriticalCheck is_critical(std::span<const AgentState> agents,
                                 std::span<const CentroidData> cds, double tol) {
    if (!(tol > 0.0))
        throw ArgumentError("critical-point tolerance must be positive");
    CriticalCheck out;
    out.distances.resize(agents.size(), 0.0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (cds[i].mass > 0.0 && cds[i].defined())
            out.distances[i] = distance(agents[i].position, *cds[i].centroid);
        out.max_distance = std::max(out.max_distance, out.distances[i]);
    }
    out.critical = out.max_distance <= tol;
    return out;
}

/**
 * Gradient of agent i computed from local information only: the partition is rebuilt
 * from agent i and the listed neighbors (all other agents removed), then agent i's cell,
 * mass, centroid and gradient are evaluated on that local partition.
 */
inline Vec2 local_gradient(const Grid& g, const UncertaintyField& field,
                           std::span<const AgentState> agents,
                           std::span<const SensorModel> sensors, std::size_t i,
                           std::span<const std::size_t> neighbors,
                           PartitionMode mode = PartitionMode::gaussian) {
    std::vector<std::size_t> members(neighbors.begin(), neighbors.end());
    members.push_back(i);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());

    std::vector<AgentState> sub_agents;
    std::vector<SensorModel> sub_sensors;
    std::size_t local_i = 0;
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (members[m] == i) local_i = m;
        sub_agents.push_back(agents[members[m]]);
        sub_sensors.push_back(sensors[members[m]]);
    }
    const Partition local = assign(g, sub_agents, sub_sensors, mode);
    const CentroidData cd =
        mass_centroid(g, field, local.cells[local_i], sensors[i], agents[i].position, mode);
    return gradient_from(cd, agents[i].position);
}

} // namespace hetsearch
