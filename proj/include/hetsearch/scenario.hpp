#pragma once

// Line-oriented scenario files:
//
//   # comment
//   name = case1_varying_alpha
//   domain = 0 10 0 10
//   grid = 200            (or "grid = 200 100")
//   field = 1.0
//   bump = 0.5 3 7 1.5    (amplitude cx cy width; repeatable)
//   strategy = hsds
//   [agent]
//   position = 2 3
//   k = 0.8
//   alpha = 0.05

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hetsearch/errors.hpp"
#include "hetsearch/grid_field.hpp"
#include "hetsearch/partition.hpp"
#include "hetsearch/sensing.hpp"
#include "hetsearch/strategy.hpp"

#ifndef HETSEARCH_SCENARIO_DIR
#define HETSEARCH_SCENARIO_DIR "scenarios"
#endif

namespace hetsearch {

enum class InitialPositions { explicit_list, random };

struct Scenario {
    std::string name;
    Bounds bounds{0.0, 10.0, 0.0, 10.0};
    std::size_t nx = 200, ny = 200;
    DensitySpec density = DensitySpec::uniform(1.0);
    std::vector<AgentState> agents;
    std::vector<SensorModel> sensors;
    StrategyConfig strategy;
    InitialPositions initial_positions = InitialPositions::explicit_list;
    std::uint64_t seed = 0;
    std::string out = "out";

    Grid grid() const { return build_grid(bounds, nx, ny); }
    UncertaintyField field() const { return init_field(grid(), density); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

class LineError {
public:
    LineError(std::string source, std::size_t line) : source_(std::move(source)), line_(line) {}
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what);
    }

private:
    std::string source_;
    std::size_t line_;
};

inline double parse_number(std::string_view tok, std::string_view key, const LineError& err) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
        err.fail(std::string(key) + ": expected a number, got '" + std::string(tok) + "'");
    return v;
}

inline std::vector<double> parse_numbers(std::string_view value, std::string_view key,
                                         std::size_t count, const LineError& err) {
    const auto toks = split_ws(value);
    if (toks.size() != count)
        err.fail(std::string(key) + ": expected " + std::to_string(count) + " number(s), got '" +
                 std::string(value) + "'");
    std::vector<double> out;
    for (auto t : toks) out.push_back(parse_number(t, key, err));
    return out;
}

inline std::uint64_t parse_count(std::string_view value, std::string_view key, const LineError& err) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        err.fail(std::string(key) + ": expected a nonnegative integer, got '" + std::string(value) +
                 "'");
    return v;
}

inline bool parse_switch(std::string_view value, std::string_view key, const LineError& err) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    err.fail(std::string(key) + ": expected on|off, got '" + std::string(value) + "'");
}

} // namespace detail

inline StrategyKind parse_strategy_kind(std::string_view v) {
    if (v == "hsds") return StrategyKind::hsds;
    if (v == "hcds") return StrategyKind::hcds;
    throw ConfigError("strategy must be hsds or hcds, got '" + std::string(v) + "'");
}

inline ControlMode parse_control_mode(std::string_view v) {
    if (v == "proportional") return ControlMode::proportional;
    if (v == "saturated") return ControlMode::saturated;
    if (v == "constant_speed") return ControlMode::constant_speed;
    if (v == "range_limited_proportional") return ControlMode::range_limited_proportional;
    throw ConfigError("control must be proportional|saturated|constant_speed|"
                      "range_limited_proportional, got '" + std::string(v) + "'");
}

/// Draws agent positions uniformly in the region, rejecting exact duplicates.
inline void randomize_positions(Scenario& scn) {
    std::mt19937_64 rng(scn.seed);
    const Grid g = scn.grid();
    for (std::size_t i = 0; i < scn.agents.size(); ++i) {
        for (;;) {
            const double ux = std::generate_canonical<double, 53>(rng);
            const double uy = std::generate_canonical<double, 53>(rng);
            const Vec2 p{g.xmin + ux * (g.xmax - g.xmin), g.ymin + uy * (g.ymax - g.ymin)};
            bool clash = false;
            for (std::size_t j = 0; j < i; ++j) clash = clash || scn.agents[j].position == p;
            if (!clash) {
                scn.agents[i].position = p;
                break;
            }
        }
    }
}

/// Checks every cross-field invariant; throws ConfigError naming the violated constraint.
inline void validate_scenario(const Scenario& scn) {
    const Grid g = scn.grid();
    init_field(g, scn.density);
    if (scn.agents.empty()) throw ConfigError("scenario needs at least one [agent] block");
    for (std::size_t i = 0; i < scn.sensors.size(); ++i) {
        try {
            scn.sensors[i].validate();
        } catch (const ConfigError& e) {
            throw ConfigError("agent " + std::to_string(i) + ": " + e.what());
        }
    }
    validate_agents(g, scn.agents);
    scn.strategy.validate();
    if (scn.strategy.range_mode) {
        for (std::size_t i = 0; i < scn.sensors.size(); ++i)
            if (!scn.sensors[i].range)
                throw ConfigError("range_mode is on but agent " + std::to_string(i) +
                                  " has no range");
        check_equal_cutoff(scn.sensors);
    }
    for (std::size_t i = 0; i < scn.sensors.size(); ++i) {
        const auto mode = scn.strategy.control.mode;
        if (mode == ControlMode::saturated && !scn.sensors[i].u_max)
            throw ConfigError("saturated control needs u_max on agent " + std::to_string(i));
        if (mode == ControlMode::constant_speed && !scn.sensors[i].u_const)
            throw ConfigError("constant_speed control needs u_const on agent " + std::to_string(i));
    }
}

inline Scenario parse_scenario_text(std::string_view text, const std::string& source = "<scenario>") {
    Scenario scn;
    std::vector<bool> has_position;
    bool in_agent = false;
    bool saw_grid = false, saw_grid_nx = false, saw_grid_ny = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const detail::LineError err(source, line_no);

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line == "[agent]") {
            in_agent = true;
            scn.agents.push_back({scn.agents.size(), {}});
            scn.sensors.emplace_back();
            has_position.push_back(false);
            continue;
        }
        if (line.front() == '[') err.fail("unknown section " + std::string(line));

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) err.fail("expected key = value, got '" + std::string(line) + "'");
        const std::string_view key = detail::trim(line.substr(0, eq));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (value.empty()) err.fail(std::string(key) + ": missing value");

        if (in_agent) {
            SensorModel& s = scn.sensors.back();
            if (key == "position") {
                const auto v = detail::parse_numbers(value, key, 2, err);
                scn.agents.back().position = {v[0], v[1]};
                has_position.back() = true;
            } else if (key == "k") {
                s.k = detail::parse_number(value, key, err);
            } else if (key == "alpha") {
                s.alpha = detail::parse_number(value, key, err);
            } else if (key == "range") {
                s.range = detail::parse_number(value, key, err);
            } else if (key == "u_max") {
                s.u_max = detail::parse_number(value, key, err);
            } else if (key == "u_const") {
                s.u_const = detail::parse_number(value, key, err);
            } else {
                err.fail("unknown agent key '" + std::string(key) + "'");
            }
            continue;
        }

        StrategyConfig& st = scn.strategy;
        try {
            if (key == "name") {
                scn.name = std::string(value);
            } else if (key == "domain") {
                const auto v = detail::parse_numbers(value, key, 4, err);
                scn.bounds = {v[0], v[1], v[2], v[3]};
            } else if (key == "grid") {
                const auto toks = detail::split_ws(value);
                if (toks.size() != 1 && toks.size() != 2)
                    err.fail("grid: expected 'n' or 'nx ny', got '" + std::string(value) + "'");
                scn.nx = detail::parse_count(toks[0], key, err);
                scn.ny = toks.size() == 2 ? detail::parse_count(toks[1], key, err) : scn.nx;
                saw_grid = true;
            } else if (key == "grid_nx") {
                scn.nx = detail::parse_count(value, key, err);
                saw_grid_nx = true;
            } else if (key == "grid_ny") {
                scn.ny = detail::parse_count(value, key, err);
                saw_grid_ny = true;
            } else if (key == "field") {
                scn.density.base = detail::parse_number(value, key, err);
            } else if (key == "bump") {
                const auto v = detail::parse_numbers(value, key, 4, err);
                scn.density.bumps.push_back({v[0], {v[1], v[2]}, v[3]});
            } else if (key == "strategy") {
                st.kind = parse_strategy_kind(value);
            } else if (key == "control") {
                st.control.mode = parse_control_mode(value);
            } else if (key == "k_prop") {
                st.control.k_prop = detail::parse_number(value, key, err);
            } else if (key == "dt") {
                st.control.dt = detail::parse_number(value, key, err);
            } else if (key == "slowdown_radius") {
                st.control.slowdown_radius = detail::parse_number(value, key, err);
            } else if (key == "deploy_tol") {
                st.deploy_tol = detail::parse_number(value, key, err);
            } else if (key == "deploy_max_iters") {
                st.deploy_max_iters = detail::parse_count(value, key, err);
            } else if (key == "stop_threshold") {
                st.stop_threshold = detail::parse_number(value, key, err);
            } else if (key == "max_search_steps") {
                st.max_search_steps = detail::parse_count(value, key, err);
            } else if (key == "search_period") {
                st.search_period = detail::parse_count(value, key, err);
            } else if (key == "latency") {
                st.latency = detail::parse_number(value, key, err);
            } else if (key == "range_mode") {
                st.range_mode = detail::parse_switch(value, key, err);
            } else if (key == "seed") {
                scn.seed = detail::parse_count(value, key, err);
            } else if (key == "initial_positions") {
                if (value == "explicit") scn.initial_positions = InitialPositions::explicit_list;
                else if (value == "random") scn.initial_positions = InitialPositions::random;
                else err.fail("initial_positions must be explicit or random");
            } else if (key == "out") {
                scn.out = std::string(value);
            } else {
                err.fail("unknown key '" + std::string(key) + "'");
            }
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind(source + ":", 0) == 0) throw;
            err.fail(msg);
        }
    }

    if (saw_grid && (saw_grid_nx || saw_grid_ny))
        throw ConfigError(source + ": use either grid or grid_nx/grid_ny, not both");
    if (scn.initial_positions == InitialPositions::explicit_list) {
        for (std::size_t i = 0; i < has_position.size(); ++i)
            if (!has_position[i])
                throw ConfigError(source + ": agent " + std::to_string(i) +
                                  " has no position (set initial_positions = random to draw one)");
    } else {
        randomize_positions(scn);
    }
    validate_scenario(scn);
    return scn;
}

inline Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario scn = parse_scenario_text(buf.str(), path.string());
    if (scn.name.empty()) scn.name = path.stem().string();
    return scn;
}

/// Accepts a path, a bundled scenario name, or a unique prefix of a bundled name.
inline std::filesystem::path resolve_scenario(const std::string& name,
                                              const std::filesystem::path& dir = HETSEARCH_SCENARIO_DIR) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name)) return name;
    const fs::path exact = dir / (name + ".cfg");
    if (fs::is_regular_file(exact)) return exact;
    std::vector<fs::path> hits;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".cfg" && e.path().stem().string().rfind(name, 0) == 0)
                hits.push_back(e.path());
    std::sort(hits.begin(), hits.end());
    if (hits.size() == 1) return hits.front();
    if (hits.empty()) throw ConfigError("no scenario named '" + name + "'");
    std::string list;
    for (const auto& h : hits) list += " " + h.stem().string();
    throw ConfigError("scenario name '" + name + "' is ambiguous:" + list);
}

inline std::vector<std::filesystem::path> bundled_scenarios(
    const std::filesystem::path& dir = HETSEARCH_SCENARIO_DIR) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".cfg") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace hetsearch
