#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetsearch/errors.hpp"
#include "hetsearch/geometry.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/sensing.hpp"

namespace hetsearch {

struct AgentState {
    std::size_t id = 0;
    Vec2 position;
};

// gaussian: f_i = k_i exp(-alpha_i r^2).  quadratic: f = -r^2 for every agent,
// which reduces the partition to the standard nearest-neighbor Voronoi diagram.
enum class PartitionMode { gaussian, quadratic };

inline double node_value(PartitionMode mode, const SensorModel& s, double r2) {
    return mode == PartitionMode::gaussian ? node_fn_sq(s, r2) : -r2;
}

// Symmetric, irreflexive relation over agent indices.
class Adjacency {
public:
    Adjacency() = default;
    explicit Adjacency(std::size_t n) : n_(n), m_(n * n, 0) {}

    std::size_t size() const { return n_; }

    void connect(std::size_t i, std::size_t j) {
        if (i == j) return;
        m_[i * n_ + j] = 1;
        m_[j * n_ + i] = 1;
    }
    bool adjacent(std::size_t i, std::size_t j) const { return m_[i * n_ + j] != 0; }

    std::vector<std::size_t> neighbors(std::size_t i) const {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n_; ++j)
            if (adjacent(i, j)) out.push_back(j);
        return out;
    }

    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (adjacent(i, j)) out.emplace_back(i, j);
        return out;
    }

    friend bool operator==(const Adjacency&, const Adjacency&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> m_;
};

/**
 * Generalized Voronoi partition on the grid: every cell belongs to the agent whose
 * node function is largest there (lowest index wins ties).
 *
 * `cells[i]` lists agent i's cells in ascending index order; cells may be disconnected.
 */
struct Partition {
    std::size_t nx = 0, ny = 0;
    PartitionMode mode = PartitionMode::gaussian;
    std::vector<std::uint32_t> labels;
    std::vector<CellList> cells;
    Adjacency adjacency;
    std::optional<std::vector<CellList>> range_masks;

    std::size_t agent_count() const { return cells.size(); }

    std::vector<std::size_t> empty_agents() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].empty()) out.push_back(i);
        return out;
    }
};

inline void validate_agents(const Grid& g, std::span<const AgentState> agents) {
    if (agents.empty())
        throw ArgumentError("partition needs at least one agent");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!g.contains(agents[i].position))
            throw ConfigError("agent " + std::to_string(i) + " lies outside the search region");
        for (std::size_t j = 0; j < i; ++j)
            if (agents[i].position == agents[j].position)
                throw ConfigError("agents " + std::to_string(j) + " and " + std::to_string(i) +
                                  " occupy the same position");
    }
}

/// (i, j) adjacent iff some cell of i is 4-connected to a cell of j.
inline Adjacency delaunay_adjacency(const Grid& g, const Partition& part) {
    Adjacency adj(part.agent_count());
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto a = part.labels[g.index(i, j)];
            if (i + 1 < g.nx) {
                const auto b = part.labels[g.index(i + 1, j)];
                if (a != b) adj.connect(a, b);
            }
            if (j + 1 < g.ny) {
                const auto b = part.labels[g.index(i, j + 1)];
                if (a != b) adj.connect(a, b);
            }
        }
    }
    return adj;
}

inline Partition assign(const Grid& g, std::span<const AgentState> agents,
                        std::span<const SensorModel> sensors,
                        PartitionMode mode = PartitionMode::gaussian) {
    if (agents.size() != sensors.size())
        throw ArgumentError("agents and sensors must have the same length");
    validate_agents(g, agents);

    Partition part;
    part.nx = g.nx;
    part.ny = g.ny;
    part.mode = mode;
    part.labels.resize(g.cell_count());
    part.cells.resize(agents.size());
    for (CellIndex c = 0; c < g.cell_count(); ++c) {
        const Vec2 q = g.center(c);
        std::uint32_t best = 0;
        double best_val = node_value(mode, sensors[0], distance_sq(agents[0].position, q));
        for (std::size_t i = 1; i < agents.size(); ++i) {
            const double v = node_value(mode, sensors[i], distance_sq(agents[i].position, q));
            if (v > best_val) {
                best_val = v;
                best = static_cast<std::uint32_t>(i);
            }
        }
        part.labels[c] = best;
        part.cells[best].push_back(c);
    }
    part.adjacency = delaunay_adjacency(g, part);
    return part;
}

/// mask_i = cells of V_i whose center is within R_i of p_i.  Stores the masks on the partition.
inline const std::vector<CellList>& restrict_to_range(const Grid& g, Partition& part,
                                                      std::span<const AgentState> agents,
                                                      std::span<const SensorModel> sensors) {
    check_equal_cutoff(sensors);
    std::vector<CellList> masks(part.agent_count());
    for (std::size_t i = 0; i < part.agent_count(); ++i) {
        const double R2 = *sensors[i].range * *sensors[i].range;
        for (CellIndex c : part.cells[i])
            if (distance_sq(g.center(c), agents[i].position) <= R2) masks[i].push_back(c);
    }
    part.range_masks = std::move(masks);
    return *part.range_masks;
}

/// Cells of agent i that touch (4-connected) a cell of agent j.
inline CellList boundary_cells(const Partition& part, std::size_t i, std::size_t j) {
    CellList out;
    const auto li = static_cast<std::uint32_t>(i);
    const auto lj = static_cast<std::uint32_t>(j);
    for (CellIndex c : part.cells[i]) {
        const std::size_t x = c % part.nx, y = c / part.nx;
        const bool touches = (x > 0 && part.labels[c - 1] == lj) ||
                             (x + 1 < part.nx && part.labels[c + 1] == lj) ||
                             (y > 0 && part.labels[c - part.nx] == lj) ||
                             (y + 1 < part.ny && part.labels[c + part.nx] == lj);
        if (touches && li != lj) out.push_back(c);
    }
    return out;
}

inline void write_labels_csv(std::ostream& os, const Grid& g, const Partition& part,
                             std::size_t step) {
    detail::write_grid_header(os, g, step);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            if (i) os << ',';
            os << part.labels[g.index(i, j)];
        }
        os << '\n';
    }
}

} // namespace hetsearch
