#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "hetsearch/errors.hpp"

namespace hetsearch {

/**
 * Gaussian sensor: detection factor beta(r) = 1 - k exp(-alpha r^2).
 *
 * k sets the peak effectiveness, alpha the reach (larger alpha, shorter reach).
 * The optional range truncates the sensor footprint; the speed limits belong to
 * the vehicle carrying the sensor but are kept here so one record describes an agent.
 */
struct SensorModel {
    double k = 0.8;
    double alpha = 0.1;
    std::optional<double> range;
    std::optional<double> u_max;
    std::optional<double> u_const;

    SensorModel() = default;
    SensorModel(double k_, double alpha_) : k(k_), alpha(alpha_) {}

    void validate() const {
        if (!(k > 0.0 && k < 1.0))
            throw ConfigError("k must lie in (0,1), got " + std::to_string(k));
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw ConfigError("alpha must be positive, got " + std::to_string(alpha));
        if (range && !(*range > 0.0))
            throw ConfigError("range must be positive, got " + std::to_string(*range));
        if (u_max && !(*u_max > 0.0))
            throw ConfigError("u_max must be positive, got " + std::to_string(*u_max));
        if (u_const && !(*u_const > 0.0))
            throw ConfigError("u_const must be positive, got " + std::to_string(*u_const));
    }
};

namespace detail {
inline void require_nonnegative_distance(double r) {
    if (!(r >= 0.0))
        throw ArgumentError("distance must be nonnegative");
}
} // namespace detail

// Node function evaluated from the squared distance; the hot-path form.
inline double node_fn_sq(const SensorModel& s, double r2) { return s.k * std::exp(-s.alpha * r2); }

inline double node_fn(const SensorModel& s, double r) {
    detail::require_nonnegative_distance(r);
    return node_fn_sq(s, r * r);
}

inline double beta(const SensorModel& s, double r) {
    detail::require_nonnegative_distance(r);
    return 1.0 - node_fn_sq(s, r * r);
}

// -phi * d f / d(r^2) = alpha k phi exp(-alpha r^2), from the squared distance.
inline double tilde_weight_sq(const SensorModel& s, double r2, double phi) {
    return s.alpha * s.k * phi * std::exp(-s.alpha * r2);
}

inline double tilde_weight(const SensorModel& s, double r, double phi) {
    detail::require_nonnegative_distance(r);
    if (!(phi >= 0.0))
        throw ArgumentError("density must be nonnegative");
    return tilde_weight_sq(s, r * r, phi);
}

struct RangeLimitedValue {
    double f_tilde = 0.0; // f clamped at the range: f(min(r, R))
    double f_hat = 0.0;   // f_tilde - f(R); zero outside the range
};

inline RangeLimitedValue range_limited_fn(const SensorModel& s, double r) {
    detail::require_nonnegative_distance(r);
    if (!s.range)
        throw UnsupportedModeError("range-limited evaluation needs a sensor range");
    const double R = *s.range;
    const double cutoff = node_fn_sq(s, R * R);
    if (r >= R)
        return {cutoff, 0.0};
    const double ft = node_fn_sq(s, r * r);
    return {ft, ft - cutoff};
}

// Largest |df/dr| over r >= 0, attained at r = 1/sqrt(2 alpha).
inline double node_fn_lipschitz(const SensorModel& s) {
    return s.k * std::sqrt(2.0 * s.alpha) * std::exp(-0.5);
}

// Value of the node function at the sensor's cutoff range.
inline double cutoff_value(const SensorModel& s) {
    if (!s.range)
        throw UnsupportedModeError("cutoff value needs a sensor range");
    return node_fn_sq(s, *s.range * *s.range);
}

/// Range mode assumes every sensor's node function has the same value at its range limit.
/// Rejects a configuration that breaks this, naming the first offending pair.
inline void check_equal_cutoff(std::span<const SensorModel> sensors, double rel_tol = 1e-6) {
    for (std::size_t i = 0; i < sensors.size(); ++i)
        if (!sensors[i].range)
            throw UnsupportedModeError("range mode requires a range on every sensor (agent " +
                                       std::to_string(i) + " has none)");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        for (std::size_t j = i + 1; j < sensors.size(); ++j) {
            const double fi = cutoff_value(sensors[i]);
            const double fj = cutoff_value(sensors[j]);
            if (std::fabs(fi - fj) > rel_tol * std::max(fi, fj))
                throw ConfigError("unequal cutoff values f_i(R_i) between agents " +
                                  std::to_string(i) + " and " + std::to_string(j) + " (" +
                                  std::to_string(fi) + " vs " + std::to_string(fj) + ")");
        }
    }
}

} // namespace hetsearch
