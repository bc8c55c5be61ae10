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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "random.hpp"

namespace hetmob {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Position relative to the macro-cell center.
struct PolarPosition
{
    double rho = 0.0;   ///< [m], 0 <= rho <= L
    double theta = 0.0; ///< [rad], [0, 2pi)
};

struct Flight
{
    double length = 0.0;    ///< [m], >= delta
    double direction = 0.0; ///< [rad], [0, 2pi)
};

/// Chord bookkeeping for one flight under the modified reflection model
/// (exit through the boundary, re-enter at the antipodal point, same heading).
struct FlightGeometry
{
    double l1 = 0.0;     ///< half chord of the flight line through the macro disk
    double l3 = 0.0;     ///< start to first boundary exit
    double l4 = 0.0;     ///< flight length left after the first exit (negative: no exit)
    double m = -1.0;     ///< full chord re-crossings, -1 when the boundary is never reached
    double l5 = 0.0;     ///< distance walked since the last re-entry, in [0, 2*l1)
    double gamma1 = 0.0; ///< angle between the final chord's foot and the end point
    double offset = 0.0; ///< signed perpendicular offset rho*sin(direction - theta)
};

/// Mathematical modulus into [0, 2pi).
inline double wrap_angle(double x)
{
    double r = x - kTwoPi * std::floor(x / kTwoPi);
    if (r >= kTwoPi || r < 0.0)
        r = 0.0;
    return r;
}

/// Inverse-CDF sample of the power-law flight length: delta * u^(-1/alpha).
inline double sample_flight_length(double u, double alpha, double delta)
{
    if (!(u > 0.0 && u <= 1.0))
        throw std::domain_error("sample_flight_length: u must lie in (0, 1]");
    return delta * std::pow(u, -1.0 / alpha);
}

/// CDF of the flight length, 1 - (delta/x)^alpha on [delta, inf).
inline double flight_length_cdf(double x, double alpha, double delta)
{
    return x <= delta ? 0.0 : 1.0 - std::pow(delta / x, alpha);
}

inline double sample_direction(double u)
{
    if (!(u >= 0.0 && u < 1.0))
        throw std::domain_error("sample_direction: u must lie in [0, 1)");
    return kTwoPi * u;
}

inline Flight sample_flight(RandomStream& rng, double alpha, double delta)
{
    const double len = sample_flight_length(rng.uniform_oc(), alpha, delta);
    return {len, sample_direction(rng.uniform_co())};
}

inline PolarPosition sample_uniform_disk(RandomStream& rng, double L)
{
    return {L * std::sqrt(rng.uniform_co()), kTwoPi * rng.uniform_co()};
}

/// Uniform point in the annulus inner <= rho <= outer.
inline PolarPosition sample_uniform_annulus(RandomStream& rng, double inner, double outer)
{
    const double u = rng.uniform_co();
    return {std::sqrt(inner * inner + u * (outer * outer - inner * inner)), kTwoPi * rng.uniform_co()};
}

namespace detail {

template <class T>
struct ChordGeometry
{
    T l1, l3, l4, m, l5, gamma1, offset, sin_rel;
};

template <class T>
ChordGeometry<T> chord_geometry(const PolarPosition& start, const Flight& f, double L_)
{
    const T L = L_;
    const T rel = static_cast<T>(f.direction) - static_cast<T>(start.theta);
    const T s = std::sin(rel);
    ChordGeometry<T> g{};
    g.sin_rel = s;
    g.offset = static_cast<T>(start.rho) * s;
    const T ap = std::min(std::abs(g.offset), L);
    g.l1 = std::sqrt((L - ap) * (L + ap));
    g.l3 = g.l1 - static_cast<T>(start.rho) * std::cos(rel);
    g.l4 = static_cast<T>(f.length) - g.l3;
    g.m = -1;
    if (g.l1 > 0) {
        g.m = std::floor(g.l4 / (2 * g.l1));
        g.l5 = g.l4 - 2 * g.l1 * g.m;
        if (g.l5 < 0)
            g.l5 = 0;
        if (g.l5 >= 2 * g.l1)
            g.l5 = std::nextafter(2 * g.l1, T(0));
    }
    g.gamma1 = std::atan2(std::abs(g.l1 - g.l5), ap);
    return g;
}

template <class T>
PolarPosition end_point(const ChordGeometry<T>& g, const Flight& f, double L)
{
    const T d = g.l1 - g.l5;
    const T rho = std::min(static_cast<T>(L), std::sqrt(g.offset * g.offset + d * d));
    // After an odd number of re-entries the chord foot is mirrored through the
    // center; sign(sin) is taken as +1 on radial flights.
    const T parity = std::fmod(g.m + 1, T(2)) == 0 ? 1 : -1;
    const T side = g.sin_rel >= 0 ? 1 : -1;
    const T sigma = parity * side;
    const T along = d > 0 ? 1 : (d < 0 ? -1 : 0);
    const T half_pi = std::numbers::pi_v<T> / 2;
    const T theta = std::fmod(static_cast<T>(f.direction) - sigma * half_pi - sigma * along * g.gamma1,
                              2 * std::numbers::pi_v<T>);
    return {static_cast<double>(rho), wrap_angle(static_cast<double>(theta))};
}

} // namespace detail

inline FlightGeometry flight_geometry(const PolarPosition& start, const Flight& f, double L)
{
    const auto g = detail::chord_geometry<double>(start, f, L);
    return {g.l1, g.l3, g.l4, g.m, g.l5, g.gamma1, g.offset};
}

/// End point of a flight under the modified reflection model, from the
/// closed-form chord geometry. `start` must lie inside the disk of radius L.
/// A flight ending exactly on the macro boundary is wrapped to the antipodal
/// point (m = floor(l4 / 2 l1) with l5 = 0).
inline PolarPosition apply_flight(const PolarPosition& start, const Flight& f, double L)
{
    if (start.rho > L)
        throw std::domain_error("apply_flight: start lies outside the macro disk (rho = " +
                                std::to_string(start.rho) + " > L = " + std::to_string(L) + ")");
    const auto g = detail::chord_geometry<double>(start, f, L);
    if (g.l1 == 0.0) // tangent at the boundary: re-enter where we stand
        return start;
    if (g.l4 < 0.0)
        return detail::end_point(g, f, L);
    // Wrapping multiplies the rounding error of the chord by about l4 / l1;
    // extended precision keeps short chords accurate.
    const auto gx = detail::chord_geometry<long double>(start, f, L);
    if (gx.l1 == 0.0L)
        return start;
    return detail::end_point(gx, f, L);
}

/// Advances every user by one independently sampled flight, in place.
inline void advance_population(std::span<PolarPosition> states, double L, double alpha, double delta,
                               RandomStream& rng)
{
    for (auto& s : states)
        s = apply_flight(s, sample_flight(rng, alpha, delta), L);
}

/// One mobility step for a whole population; length is preserved.
inline std::vector<PolarPosition> step_population(std::vector<PolarPosition> states, double L, double alpha,
                                                  double delta, RandomStream& rng)
{
    advance_population(states, L, alpha, delta, rng);
    return states;
}

inline std::vector<PolarPosition> uniform_population(std::size_t n, double L, RandomStream& rng)
{
    std::vector<PolarPosition> out(n);
    for (auto& p : out)
        p = sample_uniform_disk(rng, L);
    return out;
}

struct ChiSquareResult
{
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Pearson chi-square p-value (upper tail).
inline double chi_square_p_value(double statistic, double dof)
{
    if (dof <= 0.0)
        return 1.0;
    boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

/// Splits `bins` into rings x sectors with rings the largest divisor <= sqrt(bins).
inline std::pair<int, int> equal_area_layout(int bins)
{
    int rings = 1;
    for (int d = 1; d * d <= bins; ++d)
        if (bins % d == 0)
            rings = d;
    return {rings, bins / rings};
}

/// Index of the equal-area cell holding `p` in the layout of equal_area_layout.
inline int equal_area_bin(const PolarPosition& p, double L, int rings, int sectors)
{
    const double frac = (p.rho / L) * (p.rho / L);
    int ring = static_cast<int>(std::floor(frac * rings));
    ring = std::clamp(ring, 0, rings - 1);
    int sector = static_cast<int>(std::floor(wrap_angle(p.theta) / kTwoPi * sectors));
    sector = std::clamp(sector, 0, sectors - 1);
    return ring * sectors + sector;
}

/// Pearson chi-square of the positions against the uniform law on the disk,
/// over `bins` equal-area cells (annuli split into sectors).
inline ChiSquareResult uniformity_test(std::span<const PolarPosition> positions, double L, int bins)
{
    if (bins < 2)
        throw std::invalid_argument("uniformity_test: need at least 2 bins");
    if (positions.empty())
        throw std::invalid_argument("uniformity_test: no positions");
    const auto [rings, sectors] = equal_area_layout(bins);
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (const auto& p : positions) {
        if (!(p.rho >= 0.0 && p.rho <= L * (1.0 + 1e-12)))
            throw std::domain_error("uniformity_test: position outside the disk");
        counts[static_cast<std::size_t>(equal_area_bin(p, L, rings, sectors))] += 1.0;
    }
    const double expected = static_cast<double>(positions.size()) / bins;
    ChiSquareResult r;
    for (double c : counts)
        r.statistic += (c - expected) * (c - expected) / expected;
    r.dof = bins - 1;
    r.p_value = chi_square_p_value(r.statistic, r.dof);
    return r;
}

/// Tab-separated mobility trace: step, user, rho, theta.
inline void write_trace(std::ostream& out, std::uint64_t step, std::span<const PolarPosition> states)
{
    for (std::size_t i = 0; i < states.size(); ++i)
        out << step << '\t' << i << '\t' << states[i].rho << '\t' << states[i].theta << '\n';
}

} // namespace hetmob
