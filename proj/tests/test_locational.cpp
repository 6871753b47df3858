#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hetsearch/locational.hpp"
#include "hetsearch/oracle.hpp"

using namespace hetsearch;

namespace {
const Grid kGrid = build_grid({0, 10, 0, 10}, 200, 200);
const UncertaintyField kOnes = init_field(kGrid, DensitySpec::uniform(1.0));
} // namespace

TEST(Objective, UnboundedPlaneLimit) {
    // k pi / alpha for a single agent far from the borders.
    const Grid g = build_grid({0, 100, 0, 100}, 200, 200);
    const auto f = init_field(g, DensitySpec::uniform(1.0));
    const std::vector<AgentState> a{{0, {50, 50}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const double H = objective(g, f, assign(g, a, s), a, s);
    EXPECT_NEAR(H, 0.8 * std::numbers::pi / 0.1, 0.01 * 0.8 * std::numbers::pi / 0.1);
}

TEST(Objective, TruncatedSquareClosedForm) {
    // k (pi/alpha) erf(5 sqrt(alpha))^2 on [0,10]^2 with the agent at the center;
    // midpoint rule at h = 0.05 is within 1e-5 relative.
    const std::vector<AgentState> a{{0, {5, 5}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const double H = objective(kGrid, kOnes, assign(kGrid, a, s), a, s);
    EXPECT_NEAR(H, 23.8747934749524, 1e-5 * 23.8747934749524);
}

TEST(Objective, ZeroFieldGivesZero) {
    const auto zero = init_field(kGrid, DensitySpec::uniform(0.0));
    const std::vector<AgentState> a{{0, {2, 2}}, {1, {7, 6}}};
    const std::vector<SensorModel> s{{0.8, 0.1}, {0.5, 0.3}};
    EXPECT_EQ(objective(kGrid, zero, assign(kGrid, a, s), a, s), 0.0);
    const auto cds = cell_centroids(kGrid, zero, assign(kGrid, a, s), a, s);
    for (const auto& cd : cds) {
        EXPECT_EQ(cd.mass, 0.0);
        EXPECT_FALSE(cd.defined());
    }
}

TEST(Centroid, SymmetricCellAtAgent) {
    const std::vector<AgentState> a{{0, {5, 5}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const auto cd = cell_centroids(kGrid, kOnes, assign(kGrid, a, s), a, s)[0];
    ASSERT_TRUE(cd.defined());
    EXPECT_NEAR(cd.centroid->x, 5.0, 1e-12);
    EXPECT_NEAR(cd.centroid->y, 5.0, 1e-12);
}

TEST(Centroid, OffCenterClosedForm) {
    // Truncated-Gaussian mean on [0,10] about 2 with variance 5.
    const std::vector<AgentState> a{{0, {2, 5}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const auto cd = cell_centroids(kGrid, kOnes, assign(kGrid, a, s), a, s)[0];
    EXPECT_NEAR(cd.centroid->x, 2.73253041160358, 1e-4);
    EXPECT_NEAR(cd.centroid->y, 5.0, 1e-12);
}

TEST(Centroid, MatchesDenseOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.3, 9.7), k(0.3, 0.9), al(0.05, 0.5);
    const Grid g = build_grid({0, 10, 0, 10}, 60, 60);
    DensitySpec spec{0.4, {{0.5, {3, 7}, 1.5}, {0.3, {8, 2}, 2.0}}};
    const auto f = init_field(g, spec);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AgentState> a;
        std::vector<SensorModel> s;
        for (std::size_t i = 0; i < 4; ++i) {
            a.push_back({i, {u(rng), u(rng)}});
            s.emplace_back(k(rng), al(rng));
        }
        const auto part = assign(g, a, s);
        const auto cds = cell_centroids(g, f, part, a, s);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto ref = oracle::dense_mass_centroid(g, f, part.labels, i, s[i], a[i].position);
            EXPECT_NEAR(cds[i].mass, ref.mass, 1e-12 * std::max(1.0, ref.mass));
            ASSERT_EQ(cds[i].defined(), ref.defined());
            if (ref.defined()) {
                EXPECT_NEAR(cds[i].centroid->x, ref.centroid->x, 1e-10);
                EXPECT_NEAR(cds[i].centroid->y, ref.centroid->y, 1e-10);
            }
        }
    }
}

TEST(CentroidProperty, InsideBoundingBoxOfCell) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.3, 9.7), k(0.3, 0.9), al(0.05, 0.5);
    const Grid g = build_grid({0, 10, 0, 10}, 50, 50);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AgentState> a;
        std::vector<SensorModel> s;
        for (std::size_t i = 0; i < 5; ++i) {
            a.push_back({i, {u(rng), u(rng)}});
            s.emplace_back(k(rng), al(rng));
        }
        const auto f = init_field(g, DensitySpec::uniform(0.8));
        const auto part = assign(g, a, s);
        const auto cds = cell_centroids(g, f, part, a, s);
        for (std::size_t i = 0; i < 5; ++i) {
            if (!cds[i].defined()) continue;
            double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
            for (CellIndex c : part.cells[i]) {
                const Vec2 q = g.center(c);
                x0 = std::min(x0, q.x);
                x1 = std::max(x1, q.x);
                y0 = std::min(y0, q.y);
                y1 = std::max(y1, q.y);
            }
            EXPECT_GE(cds[i].centroid->x, x0 - 1e-12);
            EXPECT_LE(cds[i].centroid->x, x1 + 1e-12);
            EXPECT_GE(cds[i].centroid->y, y0 - 1e-12);
            EXPECT_LE(cds[i].centroid->y, y1 + 1e-12);
        }
    }
}

TEST(Gradient, AgreesWithFiniteDifferences) {
    const Grid g = build_grid({0, 10, 0, 10}, 200, 200);
    DensitySpec spec{0.5, {{0.4, {6, 4}, 2.0}}};
    const auto f = init_field(g, spec);
    const std::vector<AgentState> a{{0, {2.3, 3.1}}, {1, {7.2, 6.6}}, {2, {4.4, 8.1}}};
    const std::vector<SensorModel> s{{0.8, 0.05}, {0.6, 0.2}, {0.9, 0.1}};
    const auto grad = gradient(g, f, assign(g, a, s), a, s);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto fd = fd_gradient_oracle(g, f, a, s, i, 0.05);
        EXPECT_FALSE(fd.shrunk);
        EXPECT_LE(norm(fd.value - grad[i]), 1e-2 * norm(grad[i])) << "agent " << i;
    }
}

TEST(Gradient, QuadraticModeIsLloydDirection) {
    const std::vector<AgentState> a{{0, {2, 2}}, {1, {8, 7}}};
    const std::vector<SensorModel> s(2, SensorModel{0.8, 0.1});
    const auto part = assign(kGrid, a, s, PartitionMode::quadratic);
    const auto cds = cell_centroids(kGrid, kOnes, part, a, s);
    const auto grad = gradient(kGrid, kOnes, part, a, s);
    for (std::size_t i = 0; i < 2; ++i) {
        // Mass is the area of the cell for phi = 1.
        EXPECT_NEAR(cds[i].mass, part.cells[i].size() * kGrid.cell_area(), 1e-9);
        const Vec2 expect = -2.0 * cds[i].mass * (a[i].position - *cds[i].centroid);
        EXPECT_NEAR(grad[i].x, expect.x, 1e-12);
        EXPECT_NEAR(grad[i].y, expect.y, 1e-12);
    }
}

TEST(Gradient, ZeroForMasslessCell) {
    const auto zero = init_field(kGrid, DensitySpec::uniform(0.0));
    const std::vector<AgentState> a{{0, {2, 2}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const auto grad = gradient(kGrid, zero, assign(kGrid, a, s), a, s);
    EXPECT_EQ(grad[0], (Vec2{0, 0}));
}

TEST(Critical, DetectsCentroidalConfiguration) {
    const std::vector<AgentState> a{{0, {5, 5}}};
    const std::vector<SensorModel> s{{0.8, 0.1}};
    const auto cds = cell_centroids(kGrid, kOnes, assign(kGrid, a, s), a, s);
    EXPECT_TRUE(is_critical(a, cds, 1e-9).critical);
    const std::vector<AgentState> off{{0, {2, 5}}};
    const auto cds2 = cell_centroids(kGrid, kOnes, assign(kGrid, off, s), off, s);
    const auto chk = is_critical(off, cds2, 1e-2);
    EXPECT_FALSE(chk.critical);
    EXPECT_NEAR(chk.max_distance, 0.73253041160358, 1e-4);
    EXPECT_THROW(is_critical(a, cds, 0.0), ArgumentError);
}

TEST(LocalGradient, MatchesGlobalWithNeighbors) {
    // The neighbor-only argmax reproduces V_i whenever the deleted agents own nothing that
    // agent i would win against its neighbors. When that fails, every extra cell belongs to
    // a non-neighbor and none touches V_i.
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.5, 9.5), k(0.3, 0.9), al(0.05, 0.5);
    const Grid g = build_grid({0, 10, 0, 10}, 80, 80);
    std::size_t exact = 0, total = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<AgentState> a;
        std::vector<SensorModel> s;
        for (std::size_t i = 0; i < 6; ++i) {
            a.push_back({i, {u(rng), u(rng)}});
            s.emplace_back(k(rng), al(rng));
        }
        const auto part = assign(g, a, s);
        const auto f = init_field(g, DensitySpec::uniform(0.9));
        const auto grad = gradient(g, f, part, a, s);
        for (std::size_t i = 0; i < 6; ++i) {
            if (part.cells[i].empty()) continue; // no neighbors to consult
            const auto nb = part.adjacency.neighbors(i);
            std::vector<AgentState> sub{a[i]};
            std::vector<SensorModel> sub_s{s[i]};
            for (std::size_t j : nb) {
                sub.push_back(a[j]);
                sub_s.push_back(s[j]);
            }
            const auto local = assign(g, sub, sub_s);
            ++total;
            if (local.cells[0] == part.cells[i]) {
                ++exact;
                EXPECT_EQ(local_gradient(g, f, a, s, i, nb), grad[i]);
                continue;
            }
            EXPECT_TRUE(std::includes(local.cells[0].begin(), local.cells[0].end(),
                                      part.cells[i].begin(), part.cells[i].end()));
            for (CellIndex c : local.cells[0]) {
                if (part.labels[c] == i) continue;
                EXPECT_FALSE(part.adjacency.adjacent(i, part.labels[c]));
                const std::size_t x = c % g.nx, y = c / g.nx;
                EXPECT_FALSE(x > 0 && part.labels[c - 1] == i);
                EXPECT_FALSE(x + 1 < g.nx && part.labels[c + 1] == i);
                EXPECT_FALSE(y > 0 && part.labels[c - g.nx] == i);
                EXPECT_FALSE(y + 1 < g.ny && part.labels[c + g.nx] == i);
            }
        }
    }
    EXPECT_GE(exact, total * 9 / 10);
}

TEST(RangeObjective, NeedsMasks) {
    const std::vector<AgentState> a{{0, {5, 5}}};
    SensorModel s0{0.8, 0.1};
    const std::vector<SensorModel> s{s0};
    auto part = assign(kGrid, a, s);
    EXPECT_THROW(range_objective(kGrid, kOnes, part, a, s), UnsupportedModeError);
    EXPECT_THROW(restricted_centroid(kGrid, kOnes, part, a, s), UnsupportedModeError);
}

TEST(RangeObjective, DiskClosedForm) {
    // Integral over the disk of k(e^{-alpha r^2} - e^{-alpha R^2}).
    SensorModel s0{0.8, 0.1};
    s0.range = 2.0;
    const std::vector<AgentState> a{{0, {5, 5}}};
    const std::vector<SensorModel> s{s0};
    auto part = assign(kGrid, a, s);
    restrict_to_range(kGrid, part, a, s);
    const double R2 = 4.0;
    const double exact = 0.8 * std::numbers::pi *
                         ((1 - std::exp(-0.1 * R2)) / 0.1 - R2 * std::exp(-0.1 * R2));
    EXPECT_NEAR(range_objective(kGrid, kOnes, part, a, s), exact, 2e-3 * exact);
    const auto cd = restricted_centroid(kGrid, kOnes, part, a, s)[0];
    EXPECT_NEAR(cd.centroid->x, 5.0, 1e-12);
}
