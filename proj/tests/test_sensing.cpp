#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hetsearch/sensing.hpp"

using namespace hetsearch;

TEST(Beta, AtZeroIsOneMinusK) {
    for (double a : {0.01, 0.1, 5.0}) EXPECT_DOUBLE_EQ(beta({0.8, a}, 0.0), 1.0 - 0.8);
}

TEST(Beta, ClosedForm) {
    // 1 - 0.8/e, evaluated at 30 digits.
    EXPECT_NEAR(beta({0.8, 0.1}, std::sqrt(10.0)), 0.705696447062846142723580983871, 1e-15);
}

TEST(Beta, Asymptote) { EXPECT_NEAR(beta({0.5, 0.6}, 100.0), 1.0, 1e-15); }

TEST(Beta, RejectsNegativeDistance) {
    EXPECT_THROW(beta({0.5, 0.6}, -1.0), ArgumentError);
    EXPECT_THROW(node_fn({0.5, 0.6}, -1e-9), ArgumentError);
}

TEST(NodeFn, Values) {
    EXPECT_DOUBLE_EQ(node_fn({0.8, 0.3}, 0.0), 0.8);
    EXPECT_NEAR(node_fn({0.8, 0.1}, std::sqrt(10.0)), 0.294303552937153857276419016129, 1e-15);
}

TEST(NodeFn, ComplementsBeta) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> k(0.01, 0.99), a(0.001, 3.0), r(0.0, 20.0);
    for (int t = 0; t < 1000; ++t) {
        const SensorModel s{k(rng), a(rng)};
        const double d = r(rng);
        EXPECT_NEAR(beta(s, d) + node_fn(s, d), 1.0, 1e-15);
    }
}

TEST(SensingProperty, MonotoneAndBounded) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> k(0.05, 0.95), a(0.01, 1.0), r(0.0, 6.0);
    for (int t = 0; t < 50; ++t) {
        const SensorModel s{k(rng), a(rng)};
        std::vector<double> rs(40);
        for (auto& v : rs) v = r(rng);
        std::sort(rs.begin(), rs.end());
        rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
        for (std::size_t i = 1; i < rs.size(); ++i) {
            EXPECT_LT(node_fn(s, rs[i]), node_fn(s, rs[i - 1]));
            EXPECT_GT(beta(s, rs[i]), beta(s, rs[i - 1]));
        }
        for (double d : rs) {
            EXPECT_GE(beta(s, d), 1.0 - s.k);
            EXPECT_LT(beta(s, d), 1.0);
            EXPECT_GT(node_fn(s, d), 0.0);
            EXPECT_LE(node_fn(s, d), s.k);
        }
    }
}

TEST(TildeWeight, ZeroDensity) {
    for (double r : {0.0, 1.0, 7.0}) EXPECT_EQ(tilde_weight({0.8, 0.1}, r, 0.0), 0.0);
}

TEST(TildeWeight, AtOrigin) { EXPECT_NEAR(tilde_weight({0.8, 0.1}, 0.0, 1.0), 0.08, 1e-16); }

TEST(TildeWeight, RejectsNegativeDensity) {
    EXPECT_THROW(tilde_weight({0.8, 0.1}, 1.0, -0.1), ArgumentError);
}

TEST(TildeWeight, MatchesFiniteDifferenceInSquaredDistance) {
    // -phi d f/d(x) with x = r^2, by central differences.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(0.1, 0.9), a(0.02, 0.8), r(0.2, 4.0), ph(0.1, 1.0);
    for (int t = 0; t < 200; ++t) {
        const SensorModel s{k(rng), a(rng)};
        const double x = std::pow(r(rng), 2), phi = ph(rng), d = 1e-6;
        const double fd = -phi * (node_fn(s, std::sqrt(x + d)) - node_fn(s, std::sqrt(x - d))) / (2 * d);
        const double w = tilde_weight(s, std::sqrt(x), phi);
        EXPECT_NEAR(fd, w, 1e-6 * w);
    }
}

TEST(RangeLimited, AtAndBeyondRange) {
    SensorModel s{0.7, 0.2};
    s.range = 2.5;
    EXPECT_EQ(range_limited_fn(s, 2.5).f_hat, 0.0);
    const auto far = range_limited_fn(s, 5.0);
    EXPECT_EQ(far.f_tilde, node_fn(s, 2.5));
    EXPECT_EQ(far.f_hat, 0.0);
}

TEST(RangeLimited, ClosedFormAtOrigin) {
    SensorModel s{0.8, 0.1};
    s.range = 6.0;
    const auto v = range_limited_fn(s, 0.0);
    EXPECT_DOUBLE_EQ(v.f_tilde, 0.8);
    EXPECT_NEAR(v.f_hat, 0.778141022042165951358749550052, 1e-15);
}

TEST(RangeLimited, BoundsAndMissingRange) {
    SensorModel s{0.6, 0.3};
    EXPECT_THROW(range_limited_fn(s, 1.0), UnsupportedModeError);
    s.range = 2.0;
    const double top = s.k - s.k * std::exp(-s.alpha * 4.0);
    for (double r = 0.0; r < 5.0; r += 0.01) {
        const auto v = range_limited_fn(s, r);
        EXPECT_GE(v.f_hat, 0.0);
        EXPECT_LE(v.f_hat, top);
        EXPECT_EQ(v.f_hat == 0.0, r >= 2.0);
    }
}

TEST(SensorModel, Validation) {
    EXPECT_THROW((SensorModel{1.2, 0.1}).validate(), ConfigError);
    EXPECT_THROW((SensorModel{0.0, 0.1}).validate(), ConfigError);
    EXPECT_THROW((SensorModel{0.5, 0.0}).validate(), ConfigError);
    SensorModel s{0.5, 0.1};
    s.range = -1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.range = 1.0;
    s.u_max = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.u_max = 1.0;
    EXPECT_NO_THROW(s.validate());
    try {
        (SensorModel{1.2, 0.1}).validate();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("k must lie in (0,1)"), std::string::npos);
    }
}

TEST(EqualCutoff, AcceptsMatchingAndRejectsMismatch) {
    // k e^{-alpha R^2} equal for both sensors.
    SensorModel a{0.8, 0.1}, b{0.6, 0.0};
    a.range = 3.0;
    b.range = 3.0;
    b.alpha = std::log(0.6 / (0.8 * std::exp(-0.9))) / 9.0;
    std::vector<SensorModel> ok{a, b};
    EXPECT_NO_THROW(check_equal_cutoff(ok));
    EXPECT_NEAR(node_fn(a, 3.0), node_fn(b, 3.0), 1e-15);

    std::vector<SensorModel> bad{a, b};
    bad[1].range = 2.0;
    try {
        check_equal_cutoff(bad);
        FAIL() << "expected rejection";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("agents 0 and 1"), std::string::npos);
    }
    std::vector<SensorModel> none{a, SensorModel{0.5, 0.1}};
    EXPECT_THROW(check_equal_cutoff(none), UnsupportedModeError);
}

TEST(Lipschitz, BoundsNumericalSlope) {
    const SensorModel s{0.9, 0.35};
    const double L = node_fn_lipschitz(s);
    double worst = 0.0;
    for (double r = 0.0; r < 6.0; r += 1e-3)
        worst = std::max(worst, std::fabs(node_fn(s, r + 1e-3) - node_fn(s, r)) / 1e-3);
    EXPECT_LE(worst, L * (1 + 1e-9));
    EXPECT_GT(worst, 0.999 * L);
}
