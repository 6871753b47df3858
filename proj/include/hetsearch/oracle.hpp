#pragma once

// Reference computations used by the tests and the acceptance suites.
// Only the plain data types are shared with the library; every formula is restated here.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hetsearch/geometry.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/locational.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/sensing.hpp"

namespace hetsearch::oracle {

inline std::vector<std::uint32_t> brute_force_labels(const Grid& g,
                                                     std::span<const AgentState> agents,
                                                     std::span<const SensorModel> sensors,
                                                     PartitionMode mode) {
    std::vector<std::uint32_t> labels(g.nx * g.ny, 0);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.xmin + (i + 0.5) * g.hx;
            const double y = g.ymin + (j + 0.5) * g.hy;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < agents.size(); ++a) {
                const double dx = agents[a].position.x - x, dy = agents[a].position.y - y;
                const double r2 = dx * dx + dy * dy;
                const double f = mode == PartitionMode::quadratic
                                     ? -r2
                                     : sensors[a].k * std::exp(-sensors[a].alpha * r2);
                if (f > best) {
                    best = f;
                    labels[j * g.nx + i] = static_cast<std::uint32_t>(a);
                }
            }
        }
    }
    return labels;
}

/// Full-grid accumulation of mass and centroid of agent i's cell, optionally cut at `radius`.
inline CentroidData dense_mass_centroid(const Grid& g, const UncertaintyField& field,
                                        std::span<const std::uint32_t> labels, std::size_t i,
                                        const SensorModel& s, Vec2 p,
                                        double radius = std::numeric_limits<double>::infinity()) {
    double m = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t c = 0; c < g.nx; ++c) {
            const std::size_t idx = j * g.nx + c;
            if (labels[idx] != i) continue;
            const double x = g.xmin + (c + 0.5) * g.hx;
            const double y = g.ymin + (j + 0.5) * g.hy;
            const double r2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
            if (r2 > radius * radius) continue;
            const double w = s.alpha * s.k * field.values[idx] * std::exp(-s.alpha * r2) * g.hx * g.hy;
            m += w;
            mx += w * x;
            my += w * y;
        }
    }
    CentroidData out;
    out.mass = m;
    if (m > 0.0) out.centroid = Vec2{mx / m, my / m};
    return out;
}

// Boundary line between two equal-alpha sensors: y = M x + C, or x = x0 when p1.y == p2.y.
struct Line {
    bool vertical = false;
    double M = 0.0;
    double C = 0.0;
    double x0 = 0.0;
};

inline Line case2_line(Vec2 p1, Vec2 p2, double k1, double k2, double alpha) {
    Line l;
    const double lnk = std::log(k1 / k2) / alpha;
    const double n1 = p1.x * p1.x + p1.y * p1.y;
    const double n2 = p2.x * p2.x + p2.y * p2.y;
    if (p1.y == p2.y) {
        // 2 (p2x - p1x) x = ln(k1/k2)/alpha + |p2|^2 - |p1|^2
        l.vertical = true;
        l.x0 = (lnk + n2 - n1) / (2.0 * (p2.x - p1.x));
        return l;
    }
    l.M = (p1.x - p2.x) / (p2.y - p1.y);
    l.C = (lnk + n2 - n1) / (2.0 * (p2.y - p1.y));
    return l;
}

/// Largest perpendicular distance from the points to the line.
inline double line_fit_residual(std::span<const Vec2> points, const Line& line) {
    double worst = 0.0;
    for (const Vec2& q : points) {
        const double d = line.vertical ? std::fabs(q.x - line.x0)
                                       : std::fabs(q.y - line.M * q.x - line.C) /
                                             std::sqrt(1.0 + line.M * line.M);
        worst = std::max(worst, d);
    }
    return worst;
}

inline double line_fit_residual(std::span<const Vec2> points, double M, double C) {
    return line_fit_residual(points, Line{false, M, C, 0.0});
}

} // namespace hetsearch::oracle
