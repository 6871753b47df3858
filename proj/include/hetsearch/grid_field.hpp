#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hetsearch/errors.hpp"
#include "hetsearch/geometry.hpp"

namespace hetsearch {

using CellIndex = std::size_t;
using CellList = std::vector<CellIndex>;

struct Bounds {
    double xmin = 0.0;
    double xmax = 10.0;
    double ymin = 0.0;
    double ymax = 10.0;
};

/**
 * Uniform rectangular discretization of the search region.
 *
 * Cells are stored row-major: index = j * nx + i, with i along x and j along y.
 * Every integral in the library is a midpoint sum over cell centers.
 */
struct Grid {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    std::size_t nx = 2, ny = 2;
    double hx = 0.5, hy = 0.5;

    std::size_t cell_count() const { return nx * ny; }
    double cell_area() const { return hx * hy; }
    double area() const { return (xmax - xmin) * (ymax - ymin); }
    Bounds bounds() const { return {xmin, xmax, ymin, ymax}; }

    CellIndex index(std::size_t i, std::size_t j) const { return j * nx + i; }
    std::size_t col(CellIndex c) const { return c % nx; }
    std::size_t row(CellIndex c) const { return c / nx; }

    Vec2 center(std::size_t i, std::size_t j) const {
        return {xmin + (static_cast<double>(i) + 0.5) * hx,
                ymin + (static_cast<double>(j) + 0.5) * hy};
    }
    Vec2 center(CellIndex c) const { return center(col(c), row(c)); }

    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, xmin, xmax), std::clamp(p.y, ymin, ymax)};
    }
};

inline Grid build_grid(const Bounds& b, std::size_t nx, std::size_t ny) {
    if (!(std::isfinite(b.xmin) && std::isfinite(b.xmax) && std::isfinite(b.ymin) &&
          std::isfinite(b.ymax)))
        throw ConfigError("grid bounds must be finite");
    if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin))
        throw ConfigError("grid bounds must satisfy xmax > xmin and ymax > ymin");
    if (nx < 2 || ny < 2)
        throw ConfigError("grid cell counts must be at least 2 in each direction");
    Grid g;
    g.xmin = b.xmin;
    g.xmax = b.xmax;
    g.ymin = b.ymin;
    g.ymax = b.ymax;
    g.nx = nx;
    g.ny = ny;
    g.hx = (b.xmax - b.xmin) / static_cast<double>(nx);
    g.hy = (b.ymax - b.ymin) / static_cast<double>(ny);
    return g;
}

// Length of the domain diagonal, the largest distance between two points of the region.
inline double diameter(const Grid& g) { return std::hypot(g.xmax - g.xmin, g.ymax - g.ymin); }

struct GaussianBump {
    double amplitude = 1.0;
    Vec2 center;
    double width = 1.0; // standard deviation, length units
};

// base + sum of bumps, clipped to [0,1] cell by cell.
struct DensitySpec {
    double base = 1.0;
    std::vector<GaussianBump> bumps;

    static DensitySpec uniform(double c) { return {c, {}}; }
};

struct UncertaintyField {
    std::vector<double> values;
    std::size_t step_count = 0;

    std::size_t size() const { return values.size(); }
    double operator[](CellIndex c) const { return values[c]; }
};

inline UncertaintyField init_field(const Grid& g, const DensitySpec& spec) {
    if (!std::isfinite(spec.base))
        throw ConfigError("field base value must be finite");
    for (const auto& b : spec.bumps) {
        if (!(b.width > 0.0) || !std::isfinite(b.width))
            throw ConfigError("bump width must be positive");
        if (!std::isfinite(b.amplitude))
            throw ConfigError("bump amplitude must be finite");
    }
    UncertaintyField f;
    f.values.resize(g.cell_count());
    for (CellIndex c = 0; c < g.cell_count(); ++c) {
        const Vec2 q = g.center(c);
        double v = spec.base;
        for (const auto& b : spec.bumps)
            v += b.amplitude * std::exp(-distance_sq(q, b.center) / (2.0 * b.width * b.width));
        f.values[c] = std::clamp(v, 0.0, 1.0);
    }
    return f;
}

/// Midpoint sum of field * weight(center) * hx * hy over the listed cells.
template <class Weight>
double integrate(const Grid& g, const UncertaintyField& field, Weight&& weight,
                 std::span<const CellIndex> cells) {
    CompensatedSum acc;
    for (CellIndex c : cells)
        acc.add(field.values[c] * weight(g.center(c)) * g.cell_area());
    return acc.value();
}

/// Same as above over every cell of the grid.
template <class Weight>
double integrate(const Grid& g, const UncertaintyField& field, Weight&& weight) {
    CompensatedSum acc;
    for (CellIndex c = 0; c < g.cell_count(); ++c)
        acc.add(field.values[c] * weight(g.center(c)) * g.cell_area());
    return acc.value();
}

// Total uncertainty: integral of the field over the whole region.
inline double total_uncertainty(const Grid& g, const UncertaintyField& field) {
    CompensatedSum acc;
    for (double v : field.values)
        acc.add(v * g.cell_area());
    return acc.value();
}

inline double average_uncertainty(const Grid& g, const UncertaintyField& field) {
    return total_uncertainty(g, field) / g.area();
}

namespace detail {
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_grid_header(std::ostream& os, const Grid& g, std::size_t step) {
    os << "# nx,ny,xmin,xmax,ymin,ymax,step\n";
    os << "# " << g.nx << ',' << g.ny << ',' << fmt_double(g.xmin) << ',' << fmt_double(g.xmax)
       << ',' << fmt_double(g.ymin) << ',' << fmt_double(g.ymax) << ',' << step << '\n';
}
} // namespace detail

// One CSV row per grid row (j = 0 is the ymin edge), values left to right.
inline void write_field_csv(std::ostream& os, const Grid& g, const UncertaintyField& field) {
    detail::write_grid_header(os, g, field.step_count);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            if (i) os << ',';
            os << detail::fmt_double(field.values[g.index(i, j)]);
        }
        os << '\n';
    }
}

} // namespace hetsearch
