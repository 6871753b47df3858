#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hetsearch/strategy.hpp"

using namespace hetsearch;

namespace {

struct Scene {
    Grid g = build_grid({0, 10, 0, 10}, 50, 50);
    UncertaintyField f = init_field(g, DensitySpec::uniform(1.0));
    std::vector<AgentState> agents{{0, {1, 1}}, {1, {2, 1}}, {2, {1, 2}}};
    std::vector<SensorModel> sensors{{0.8, 0.05}, {0.8, 0.1}, {0.8, 0.2}};
};

StrategyConfig config(StrategyKind kind) {
    StrategyConfig c;
    c.kind = kind;
    c.stop_threshold = 0.3;
    c.max_search_steps = 60;
    c.deploy_tol = 5e-2;
    return c;
}

} // namespace

TEST(SearchUpdate, MultipliesByBeta) {
    Scene s;
    const auto part = assign(s.g, s.agents, s.sensors);
    const auto next = search_update(s.g, s.f, part, s.agents, s.sensors, false);
    EXPECT_EQ(next.step_count, 1u);
    for (CellIndex c = 0; c < s.g.cell_count(); ++c) {
        const auto i = part.labels[c];
        EXPECT_DOUBLE_EQ(next[c], beta(s.sensors[i], distance(s.agents[i].position, s.g.center(c))));
    }
}

TEST(SearchUpdate, AccountingIdentity) {
    Scene s;
    DensitySpec spec{0.4, {{0.5, {6, 6}, 2.0}}};
    const auto f = init_field(s.g, spec);
    const auto part = assign(s.g, s.agents, s.sensors);
    const auto next = search_update(s.g, f, part, s.agents, s.sensors, false);
    const double removed = total_uncertainty(s.g, f) - total_uncertainty(s.g, next);
    const double H = objective(s.g, f, part, s.agents, s.sensors);
    EXPECT_NEAR(removed, H, 1e-12 * H);
}

TEST(SearchUpdate, RangeModeLeavesFarCellsAlone) {
    Scene s;
    const double cut = 0.3, R = 2.0;
    std::vector<SensorModel> sensors;
    for (double k : {0.6, 0.8, 0.9}) {
        SensorModel m{k, std::log(k / cut) / (R * R)};
        m.range = R;
        sensors.push_back(m);
    }
    const auto part = assign(s.g, s.agents, sensors);
    const auto next = search_update(s.g, s.f, part, s.agents, sensors, true);
    for (CellIndex c = 0; c < s.g.cell_count(); ++c) {
        const auto i = part.labels[c];
        if (distance(s.agents[i].position, s.g.center(c)) > R) {
            EXPECT_EQ(next[c], s.f[c]);
        } else {
            EXPECT_LT(next[c], s.f[c]);
        }
    }
    EXPECT_THROW(search_update(s.g, s.f, part, s.agents, s.sensors, true), UnsupportedModeError);
}

TEST(DecayBound, FrozenValues) {
    // k = 0.5, alpha D^2 = 2 on the 10 x 10 square: l = 1 - 0.5 e^{-2}.
    const Grid g = build_grid({0, 10, 0, 10}, 10, 10);
    const std::vector<SensorModel> s{{0.5, 0.01}, {0.9, 0.005}};
    EXPECT_NEAR(decay_bound(s, g, 1), 0.932332358381693654, 1e-15);
    EXPECT_NEAR(decay_bound(s, g, 10), 0.496258061834277775, 1e-15);
    EXPECT_EQ(decay_bound(s, g, 0), 1.0);
    EXPECT_THROW(decay_bound(s, g, 1, true), UnsupportedModeError);
}

TEST(StrategyConfig, Validation) {
    StrategyConfig c;
    EXPECT_NO_THROW(c.validate());
    c.search_period = 2;
    c.latency = 2.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c.latency = 2.0;
    EXPECT_NO_THROW(c.validate());
    c.stop_threshold = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.stop_threshold = 0.1;
    c.control.mode = ControlMode::range_limited_proportional;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Hsds, ReachesThresholdAndRespectsBound) {
    Scene s;
    const auto tr = run_hsds(s.g, s.f, s.agents, s.sensors, config(StrategyKind::hsds));
    ASSERT_FALSE(tr.searches.empty());
    EXPECT_LE(tr.steps.back().phi_avg, 0.3);
    const double l = decay_bound(s.sensors, s.g, 1);
    for (const auto& ev : tr.searches) {
        EXPECT_LE(ev.phi_after, l * ev.phi_before * (1 + 1e-12));
        EXPECT_NEAR(ev.phi_before - ev.phi_after, ev.reduction, 1e-12 * ev.phi_before);
    }
}

TEST(Hsds, StepBookkeeping) {
    Scene s;
    const auto tr = run_hsds(s.g, s.f, s.agents, s.sensors, config(StrategyKind::hsds));
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        EXPECT_EQ(tr.steps[k].step, k);
        EXPECT_DOUBLE_EQ(tr.steps[k].time, static_cast<double>(k));
        if (k > 0) {
            EXPECT_LE(tr.steps[k].phi_avg, tr.steps[k - 1].phi_avg);
        }
    }
    std::size_t events = 0;
    for (const auto& r : tr.steps) events += r.search_event;
    EXPECT_EQ(events, tr.searches.size());
    // The search happens at the end of the step that completes the deployment.
    std::size_t expected_step = 0;
    for (const auto& ev : tr.searches) {
        expected_step += std::max<std::size_t>(ev.deploy_iterations, 1);
        EXPECT_EQ(ev.step, expected_step);
        EXPECT_TRUE(tr.steps[ev.step].search_event);
        EXPECT_EQ(tr.steps[ev.step].positions, ev.positions);
    }
}

TEST(Hcds, SearchesEveryPeriod) {
    Scene s;
    auto cfg = config(StrategyKind::hcds);
    cfg.search_period = 3;
    const auto tr = run_hcds(s.g, s.f, s.agents, s.sensors, cfg);
    ASSERT_FALSE(tr.searches.empty());
    for (const auto& r : tr.steps) EXPECT_EQ(r.search_event, r.step > 0 && r.step % 3 == 0);
    for (const auto& ev : tr.searches)
        EXPECT_NEAR(ev.phi_before - ev.phi_after, ev.reduction, 1e-12 * ev.phi_before);
    EXPECT_LE(tr.steps.back().phi_avg, 0.3);
}

TEST(Hcds, StopsAtMaxSearches) {
    Scene s;
    auto cfg = config(StrategyKind::hcds);
    cfg.stop_threshold = 1e-6;
    cfg.max_search_steps = 4;
    const auto tr = run_hcds(s.g, s.f, s.agents, s.sensors, cfg);
    EXPECT_EQ(tr.searches.size(), 4u);
}

TEST(Strategy, ZeroFieldStopsImmediately) {
    Scene s;
    const auto zero = init_field(s.g, DensitySpec::uniform(0.0));
    for (auto kind : {StrategyKind::hsds, StrategyKind::hcds}) {
        const auto tr = run_strategy(s.g, zero, s.agents, s.sensors, config(kind));
        EXPECT_TRUE(tr.searches.empty());
        EXPECT_EQ(tr.steps.size(), 1u);
    }
}

TEST(Strategy, RecordsFieldsBeforeSearches) {
    Scene s;
    auto cfg = config(StrategyKind::hcds);
    cfg.record_fields = true;
    const auto tr = run_hcds(s.g, s.f, s.agents, s.sensors, cfg);
    ASSERT_EQ(tr.fields_before.size(), tr.searches.size());
    EXPECT_EQ(tr.fields_before.front().values, s.f.values);
}

TEST(Report, SummarizeAndFormat) {
    Scene s;
    const auto tr = run_hsds(s.g, s.f, s.agents, s.sensors, config(StrategyKind::hsds));
    const auto rep = summarize(tr, 0.3);
    ASSERT_TRUE(rep.steps_to_threshold.has_value());
    EXPECT_EQ(*rep.searches_to_threshold, tr.searches.size());
    EXPECT_EQ(rep.distance_per_agent.size(), 3u);
    const auto text = format_report(rep);
    EXPECT_NE(text.find("strategy: hsds"), std::string::npos);
    EXPECT_NE(text.find("searches_to_threshold: " + std::to_string(tr.searches.size())),
              std::string::npos);
    const auto never = summarize(tr, 1e-9);
    EXPECT_FALSE(never.steps_to_threshold.has_value());
}

TEST(Csv, TrajectoryAndUncertaintyHeaders) {
    Scene s;
    const auto tr = run_hcds(s.g, s.f, s.agents, s.sensors, config(StrategyKind::hcds));
    std::ostringstream traj, unc;
    write_trajectory_csv(traj, tr);
    write_uncertainty_csv(unc, tr);
    EXPECT_EQ(traj.str().substr(0, traj.str().find('\n')), "step,time,agent_id,x,y,is_search_event");
    EXPECT_EQ(unc.str().substr(0, unc.str().find('\n')), "step,phi_total,phi_avg,H,search_count");
    std::size_t lines = 0;
    for (char c : traj.str()) lines += c == '\n';
    EXPECT_EQ(lines, 1 + tr.steps.size() * 3);
}

TEST(Hsds, ThresholdJustBelowOneStopsAfterFirstSearch) {
    Scene s;
    auto cfg = config(StrategyKind::hsds);
    cfg.stop_threshold = 1.0 - 1e-9;
    const auto tr = run_hsds(s.g, s.f, s.agents, s.sensors, cfg);
    EXPECT_EQ(tr.searches.size(), 1u);
}

TEST(Hcds, OneStepMatchesSearchUpdateAtMovedConfiguration) {
    Scene s;
    auto cfg = config(StrategyKind::hcds);
    cfg.max_search_steps = 1;
    cfg.stop_threshold = 1e-6;
    const auto tr = run_hcds(s.g, s.f, s.agents, s.sensors, cfg);
    ASSERT_EQ(tr.searches.size(), 1u);
    std::vector<AgentState> moved = s.agents;
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i].position = tr.searches[0].positions[i];
    const auto part = assign(s.g, moved, s.sensors);
    const auto expect = search_update(s.g, s.f, part, moved, s.sensors, false);
    EXPECT_EQ(tr.final_field.values, expect.values);
}
