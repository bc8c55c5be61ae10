// SPDX-License-Identifier: Apache-2.0
//
// hetmob: mobility-aware uplink interference toolkit
// Copyright (C) 2026 The hetmob Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Average one-flight crossing probabilities of a disk C_k of radius `radius`
// concentric with the macro cell:
//
//   p_out : a user uniformly placed in C_k ends its flight outside C_k,
//   p_in  : a user uniformly placed in the macro cell but outside C_k ends
//           its flight inside C_k,
//
// both judged at flight end under the modified reflection model. The
// direct-passage integrals are split at the geometric case boundaries (theta1,
// theta2, d0* = sqrt(delta^2 + R^2), delta +- R) and the re-entry series over
// full macro re-crossings are summed at every quadrature node.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "config.hpp"
#include "quadrature.hpp"

namespace hetmob {

/// Pr{X > r} for the power-law flight length: (delta/r)^alpha, 1 below delta.
inline double flight_survival(double r, double alpha, double delta)
{
    return r <= delta ? 1.0 : std::pow(delta / r, alpha);
}

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// Distance from a point at r0 from the center of a disk of radius R to the
/// disk boundary along direction theta (theta = 0 points away from the center).
inline double exit_distance(double r0, double theta, double R)
{
    if (r0 > R || r0 < 0.0)
        throw std::domain_error("exit_distance: require 0 <= r0 <= R");
    const double s = r0 * std::sin(theta);
    const double c = r0 * std::cos(theta);
    const double root = std::sqrt(std::max(0.0, (R - std::abs(s)) * (R + std::abs(s))));
    // r = root - c; the rationalised form avoids cancellation when c > 0.
    return c > 0.0 ? (R - r0) * (R + r0) / (root + c) : root - c;
}

/// Near and far distances (rho1 <= rho2) at which a ray from a point at d0 from
/// the center of a disk of radius R, heading theta off the center direction,
/// meets the disk boundary. Empty when the ray misses (|theta| beyond arcsin(R/d0)).
inline std::optional<std::pair<double, double>> intersection_distances(double d0, double theta, double R)
{
    if (d0 <= R)
        throw std::domain_error("intersection_distances: require d0 > R");
    const double c = d0 * std::cos(theta);
    const double s = d0 * std::sin(theta);
    const double disc = (R - std::abs(s)) * (R + std::abs(s));
    if (c <= 0.0 || disc < -1e-12 * R * R)
        return std::nullopt;
    const double root = std::sqrt(std::max(0.0, disc));
    const double far = c + root;
    const double near = (d0 - R) * (d0 + R) / far;
    return std::make_pair(near, far);
}

/// Geometry shared by the crossing integrals for a disk of radius R inside the
/// macro disk of radius L, with basic step delta.
struct GeometryKernel
{
    double R;
    double L;
    double delta;

    double r_theta(double r0, double theta) const { return exit_distance(r0, theta, R); }

    std::optional<std::pair<double, double>> rho(double d0, double theta) const
    {
        return intersection_distances(d0, theta, R);
    }

    /// Direction beyond which a user at r0 inside C_k needs more than delta to exit.
    double theta1(double r0) const
    {
        if (r0 <= 0.0)
            return delta >= R ? std::numbers::pi : 0.0;
        return std::acos(clamp_unit((R * R - r0 * r0 - delta * delta) / (2.0 * delta * r0)));
    }

    /// Direction at which a flight of exactly delta from d0 lands on the boundary of C_k.
    double theta2(double d0) const
    {
        return std::acos(clamp_unit((delta * delta + d0 * d0 - R * R) / (2.0 * delta * d0)));
    }

    /// Tangent direction from d0 to C_k.
    double theta3(double d0) const { return std::asin(clamp_unit(R / d0)); }

    /// d0 at which theta2 == theta3.
    double d0_star() const { return std::hypot(delta, R); }

    /// Half chords of the macro disk and of C_k for a line at perpendicular offset p.
    double l1(double p) const { return std::sqrt(std::max(0.0, (L - p) * (L + p))); }
    double l2(double p) const { return std::sqrt(std::max(0.0, (R - p) * (R + p))); }
};

/// Truncation policy for the re-entry series over m >= 1 full macro re-crossings.
struct SeriesPolicy
{
    int explicit_terms = 32;        ///< terms summed before the analytic tail
    double term_tolerance = 1e-12;  ///< stop once a power-law-regime term is this small
    int max_terms = 10000;          ///< hard cap without tail correction
    bool tail_correction = true;    ///< add the Euler-Maclaurin tail beyond the last term
};

struct SeriesSum
{
    double value = 0.0;
    int terms = 0;
    bool truncated = false;
};

namespace detail {

/// expm1(t)/t, continuous at 0.
inline double expm1_ratio(double t) { return std::abs(t) < 1e-8 ? 1.0 + 0.5 * t : std::expm1(t) / t; }

/// sum_{m > M} delta^a [(lo + k m)^-a - (hi + k m)^-a], midpoint Euler-Maclaurin
/// with the first derivative correction. Requires lo + k (M + 1/2) > 0.
inline double power_series_tail(double lo, double hi, double k, int M, double alpha, double delta)
{
    const double x0 = M + 0.5;
    const double A = lo + k * x0;
    const double B = hi + k * x0;
    const double log_ratio = std::log1p((hi - lo) / A);
    const double integral = std::pow(A, 1.0 - alpha) * log_ratio * expm1_ratio((1.0 - alpha) * log_ratio) / k;
    const double deriv = -alpha * k * (std::pow(A, -alpha - 1.0) - std::pow(B, -alpha - 1.0));
    return std::pow(delta, alpha) * (integral + deriv / 24.0);
}

} // namespace detail

/// sum_{m >= 1} Pr{lo + m k < X < hi + m k} for the power-law flight length,
/// with k = 2 l1 the macro chord length (lo < hi).
inline SeriesSum reentry_series(double lo, double hi, double k, double alpha, double delta,
                                const SeriesPolicy& policy = {})
{
    SeriesSum s;
    if (!(hi > lo) || !(k > 0.0))
        return s;
    for (int m = 1;; ++m) {
        const double a = lo + m * k;
        const double term = flight_survival(a, alpha, delta) - flight_survival(hi + m * k, alpha, delta);
        s.value += term;
        s.terms = m;
        const bool power_regime = a > delta;
        if (power_regime && policy.tail_correction && (m >= policy.explicit_terms || term < policy.term_tolerance)) {
            s.value += detail::power_series_tail(lo, hi, k, m, alpha, delta);
            return s;
        }
        if (power_regime && !policy.tail_correction && term < policy.term_tolerance)
            return s;
        if (m >= policy.max_terms) {
            s.truncated = true;
            return s;
        }
    }
}

struct ProbabilityValue
{
    double value = 0.0;
    double abs_error = 0.0;
    bool series_truncated = false;
};

struct CrossingProbabilities
{
    double p_in = 0.0;
    double p_out = 0.0;
    double radius = 0.0;
    double delta = 0.0;
    double abs_error_estimate = 0.0;
    double p_return = 0.0; ///< re-entry correction subtracted from the direct outgoing part
    bool series_truncated = false;

    /// Stationary in-cell fraction p_in / (p_in + p_out).
    double eta() const { return p_in / (p_in + p_out); }
};

struct CrossingOptions
{
    quad::Tolerance outer{1e-9, 1e-6, 4000};
    quad::Tolerance inner{1e-11, 1e-8, 4000};
    SeriesPolicy series{};
};

namespace detail {

inline void check_radius(const NetworkConfig& cfg, double radius)
{
    if (!(radius > 0.0 && radius < cfg.L))
        throw std::domain_error("crossing: disk radius must satisfy 0 < radius < L");
    if (!(cfg.delta > 0.0 && cfg.alpha > 0.0))
        throw std::domain_error("crossing: require delta > 0 and alpha > 0");
}

/// Runs an outer integral whose integrand evaluates inner integrals, folding
/// the worst inner error into the reported bound.
template <class Inner>
ProbabilityValue nested(const Inner& inner_at, std::vector<double> outer_edges, double outer_weight_bound,
                        const quad::Tolerance& tol, const char* what)
{
    double worst_inner = 0.0;
    bool truncated = false;
    auto outer = [&](double x) {
        auto [v, err, trunc] = inner_at(x);
        worst_inner = std::max(worst_inner, err);
        truncated = truncated || trunc;
        return v;
    };
    const double span = outer_edges.back() - outer_edges.front();
    const auto r = quad::integrate_or_throw(outer, std::move(outer_edges), tol, what);
    return {r.value, r.abs_error + worst_inner * outer_weight_bound * span, truncated};
}

struct InnerValue
{
    double value;
    double error;
    bool truncated;
};

} // namespace detail

/// Direct part of p_out: probability that the flight is longer than the
/// distance to the boundary of C_k, averaged over a uniform start in C_k.
inline ProbabilityValue outgoing_direct(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    detail::check_radius(cfg, radius);
    const GeometryKernel g{radius, cfg.L, cfg.delta};
    const double R = radius, a = cfg.alpha, d = cfg.delta;
    const double norm = 2.0 / (std::numbers::pi * R * R);

    auto inner_at = [&](double r0) -> detail::InnerValue {
        const double t1 = g.theta1(r0);
        double v = t1;
        double err = 0.0;
        if (t1 < std::numbers::pi) {
            auto f = [&](double th) { return flight_survival(g.r_theta(r0, th), a, d); };
            const auto r = quad::integrate_or_throw(f, {t1, std::numbers::pi}, opt.inner, "outgoing_direct (theta)");
            v += r.value;
            err = r.abs_error;
        }
        return {norm * r0 * v, norm * r0 * err, false};
    };
    return detail::nested(inner_at, quad::panel_edges(0.0, R, {R - d, d - R}), 1.0, opt.outer,
                          "outgoing_direct (r0)");
}

/// Probability that a user starting in C_k leaves it but, after one or more
/// macro re-crossings, ends the flight back inside C_k.
inline ProbabilityValue return_correction(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    detail::check_radius(cfg, radius);
    const GeometryKernel g{radius, cfg.L, cfg.delta};
    const double R = radius, a = cfg.alpha, d = cfg.delta;
    const double norm = 2.0 / (std::numbers::pi * R * R);

    auto inner_at = [&](double r0) -> detail::InnerValue {
        bool truncated = false;
        auto f = [&](double th) {
            const double p = r0 * std::sin(th);
            const double l1 = g.l1(p), l2 = g.l2(p);
            const double rt = g.r_theta(r0, th);
            const auto s = reentry_series(rt - 2.0 * l2, rt, 2.0 * l1, a, d, opt.series);
            truncated = truncated || s.truncated;
            return s.value;
        };
        const auto r = quad::integrate_or_throw(f, {0.0, std::numbers::pi / 2.0, std::numbers::pi}, opt.inner,
                                                "return_correction (theta)");
        return {norm * r0 * r.value, norm * r0 * r.abs_error, truncated};
    };
    return detail::nested(inner_at, {0.0, R}, 1.0, opt.outer, "return_correction (r0)");
}

/// The m-th re-entry term of return_correction integrated over the start
/// position, without summation.
inline double return_correction_term(const NetworkConfig& cfg, double radius, int m, const CrossingOptions& opt = {})
{
    detail::check_radius(cfg, radius);
    const GeometryKernel g{radius, cfg.L, cfg.delta};
    const double R = radius, a = cfg.alpha, d = cfg.delta;
    const double norm = 2.0 / (std::numbers::pi * R * R);
    auto inner_at = [&](double r0) -> detail::InnerValue {
        auto f = [&](double th) {
            const double p = r0 * std::sin(th);
            const double rt = g.r_theta(r0, th);
            const double base = rt + 2.0 * m * g.l1(p);
            return flight_survival(base - 2.0 * g.l2(p), a, d) - flight_survival(base, a, d);
        };
        const auto r = quad::integrate_or_throw(f, {0.0, std::numbers::pi / 2.0, std::numbers::pi}, opt.inner,
                                                "return_correction_term (theta)");
        return {norm * r0 * r.value, norm * r0 * r.abs_error, false};
    };
    return detail::nested(inner_at, {0.0, R}, 1.0, opt.outer, "return_correction_term (r0)").value;
}

/// Average outgoing probability: direct exit minus the re-entry correction.
inline ProbabilityValue outgoing_probability(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    const auto direct = outgoing_direct(cfg, radius, opt);
    const auto back = return_correction(cfg, radius, opt);
    return {direct.value - back.value, direct.abs_error + back.abs_error, back.series_truncated};
}

namespace detail {

// The incoming integrals are taken over the chord offset p = R sin(psi) instead
// of the heading theta = asin(R sin(psi) / d0), which removes the square-root
// singularity at the tangent heading theta3:
//   dtheta = R cos(psi) / sqrt(d0^2 - R^2 sin^2 psi) dpsi,
//   rho1,2 = sqrt(d0^2 - R^2 sin^2 psi) -+ R cos(psi),  l2 = R cos(psi).
struct ChordPoint
{
    double rho1, rho2, l1, jacobian;
};

inline ChordPoint chord_point(const GeometryKernel& g, double d0, double psi)
{
    const double s = g.R * std::sin(psi);
    const double c = g.R * std::cos(psi);
    const double h = std::sqrt(std::max(0.0, (d0 - s) * (d0 + s)));
    const double rho2 = h + c;
    const double rho1 = rho2 > 0.0 ? (d0 - g.R) * (d0 + g.R) / rho2 : 0.0;
    return {rho1, rho2, g.l1(s), h > 0.0 ? c / h : 0.0};
}

/// psi at which the heading equals theta2(d0), or nullopt when theta2 is not
/// strictly inside (0, theta3).
inline std::optional<double> psi_at_theta2(const GeometryKernel& g, double d0)
{
    const double t2 = g.theta2(d0);
    const double t3 = g.theta3(d0);
    if (!(t2 > 0.0 && t2 < t3))
        return std::nullopt;
    return std::asin(clamp_unit(d0 * std::sin(t2) / g.R));
}

} // namespace detail

/// Direct part of p_in: the flight ends inside C_k on its first pass.
inline ProbabilityValue incoming_direct(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    detail::check_radius(cfg, radius);
    const GeometryKernel g{radius, cfg.L, cfg.delta};
    const double R = radius, L = cfg.L, a = cfg.alpha, d = cfg.delta;
    // Start density 2 d0 / (L^2 - R^2) over the region outside C_k.
    const double norm = 2.0 / (std::numbers::pi * (L - R) * (L + R));

    auto inner_at = [&](double d0) -> detail::InnerValue {
        auto f = [&](double psi) {
            const auto cp = detail::chord_point(g, d0, psi);
            return (flight_survival(cp.rho1, a, d) - flight_survival(cp.rho2, a, d)) * cp.jacobian;
        };
        std::vector<double> edges{0.0};
        if (auto p2 = detail::psi_at_theta2(g, d0))
            edges.push_back(*p2);
        edges.push_back(std::numbers::pi / 2.0);
        const auto r = quad::integrate_or_throw(f, std::move(edges), opt.inner, "incoming_direct (psi)");
        return {norm * d0 * r.value, norm * d0 * r.abs_error, false};
    };
    const double lower = std::max(R, d - R);
    if (lower >= L)
        return {};
    return detail::nested(inner_at, quad::panel_edges(lower, L, {g.d0_star(), d + R}), 1.0, opt.outer,
                          "incoming_direct (d0)");
}

/// Indirect part of p_in: the flight reaches C_k only after m >= 1 macro
/// re-crossings, heading either toward C_k (first pass missed or overshot)
/// or away from it.
inline ProbabilityValue incoming_reentry(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    detail::check_radius(cfg, radius);
    const GeometryKernel g{radius, cfg.L, cfg.delta};
    const double R = radius, L = cfg.L, a = cfg.alpha, d = cfg.delta;
    const double norm = 2.0 / (std::numbers::pi * (L - R) * (L + R));

    auto inner_at = [&](double d0) -> detail::InnerValue {
        bool truncated = false;
        auto f = [&](double psi) {
            const auto cp = detail::chord_point(g, d0, psi);
            const double k = 2.0 * cp.l1;
            const auto toward = reentry_series(cp.rho1, cp.rho2, k, a, d, opt.series);
            const auto away = reentry_series(-cp.rho2, -cp.rho1, k, a, d, opt.series);
            truncated = truncated || toward.truncated || away.truncated;
            return (toward.value + away.value) * cp.jacobian;
        };
        const auto r = quad::integrate_or_throw(f, {0.0, std::numbers::pi / 2.0}, opt.inner, "incoming_reentry (psi)");
        return {norm * d0 * r.value, norm * d0 * r.abs_error, truncated};
    };
    return detail::nested(inner_at, {R, L}, 1.0, opt.outer, "incoming_reentry (d0)");
}

inline ProbabilityValue incoming_probability(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
{
    const auto direct = incoming_direct(cfg, radius, opt);
    const auto indirect = incoming_reentry(cfg, radius, opt);
    return {direct.value + indirect.value, direct.abs_error + indirect.abs_error, indirect.series_truncated};
}

inline CrossingProbabilities crossing_probabilities(const NetworkConfig& cfg, double radius,
                                                    const CrossingOptions& opt = {})
{
    const auto direct_out = outgoing_direct(cfg, radius, opt);
    const auto back = return_correction(cfg, radius, opt);
    const auto in = incoming_probability(cfg, radius, opt);
    CrossingProbabilities cp;
    cp.p_out = direct_out.value - back.value;
    cp.p_in = in.value;
    cp.p_return = back.value;
    cp.radius = radius;
    cp.delta = cfg.delta;
    cp.abs_error_estimate = direct_out.abs_error + back.abs_error + in.abs_error;
    cp.series_truncated = back.series_truncated || in.series_truncated;
    return cp;
}

/// Process-wide memo of crossing probabilities keyed by (L, radius, alpha, delta).
class CrossingCache
{
public:
    CrossingProbabilities get(const NetworkConfig& cfg, double radius, const CrossingOptions& opt = {})
    {
        const auto key = std::make_tuple(cfg.L, radius, cfg.alpha, cfg.delta);
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find(key); it != memo_.end())
                return it->second;
        }
        auto cp = crossing_probabilities(cfg, radius, opt);
        std::lock_guard lock(mutex_);
        memo_.emplace(key, cp);
        return cp;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<double, double, double, double>, CrossingProbabilities> memo_;
};

} // namespace hetmob
