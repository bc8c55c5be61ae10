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

// Markov chain of the number of users inside a disk. Each of the k users
// inside leaves with probability p_out and each of the N-k outside enters with
// probability p_in, independently, once per flight period.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetmob {

/// Largest population for which the dense transition matrix is built.
inline constexpr std::uint64_t kMaxMatrixPopulation = 2048;

struct OccupancyMoments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Dense row-major (N+1)x(N+1) transition matrix with its stationary law.
struct OccupancyChain
{
    std::uint64_t N = 0;
    double p_in = 0.0;
    double p_out = 0.0;
    std::vector<double> transition;
    std::vector<double> stationary;

    std::size_t size() const { return static_cast<std::size_t>(N) + 1; }
    double at(std::size_t k, std::size_t j) const { return transition[k * size() + j]; }
};

namespace detail {

inline void check_probabilities(double p_in, double p_out)
{
    if (!(p_in > 0.0 && p_in < 1.0) || !(p_out > 0.0 && p_out < 1.0))
        throw std::domain_error("occupancy: p_in and p_out must lie in (0, 1)");
}

/// Binomial(n, p) mass at j, evaluated in log space.
inline double binomial_pmf(std::uint64_t n, std::uint64_t j, double p)
{
    if (j > n)
        return 0.0;
    if (p <= 0.0)
        return j == 0 ? 1.0 : 0.0;
    if (p >= 1.0)
        return j == n ? 1.0 : 0.0;
    const double dn = static_cast<double>(n), dj = static_cast<double>(j);
    const double log_c = std::lgamma(dn + 1.0) - std::lgamma(dj + 1.0) - std::lgamma(dn - dj + 1.0);
    return std::exp(log_c + dj * std::log(p) + (dn - dj) * std::log1p(-p));
}

} // namespace detail

/// Probability that j of the k users inside leave (mu in the chain's notation).
inline double leave_kernel(std::uint64_t j, std::uint64_t k, double p_out) { return detail::binomial_pmf(k, j, p_out); }

/// Probability that j of the M users outside enter (nu in the chain's notation).
inline double enter_kernel(std::uint64_t j, std::uint64_t M, double p_in) { return detail::binomial_pmf(M, j, p_in); }

/// p_kj = sum_r mu(r, k) nu(j + r - k, N - k).
inline double transition_probability(std::uint64_t N, std::uint64_t k, std::uint64_t j, double p_in, double p_out)
{
    if (k > N || j > N)
        return 0.0;
    const std::uint64_t r_lo = k > j ? k - j : 0;
    const std::uint64_t r_hi = std::min(k, N - j);
    double s = 0.0;
    for (std::uint64_t r = r_lo; r <= r_hi; ++r)
        s += leave_kernel(r, k, p_out) * enter_kernel(j + r - k, N - k, p_in);
    return s;
}

/// Row-major (N+1)x(N+1) row-stochastic matrix. Only built for N <= 2048.
inline std::vector<double> transition_matrix(std::uint64_t N, double p_in, double p_out)
{
    detail::check_probabilities(p_in, p_out);
    if (N < 1)
        throw std::domain_error("transition_matrix: N must be at least 1");
    if (N > kMaxMatrixPopulation)
        throw std::length_error("transition_matrix: N = " + std::to_string(N) + " exceeds the dense limit of " +
                                std::to_string(kMaxMatrixPopulation) + "; use the binomial stationary law");
    const std::size_t n = static_cast<std::size_t>(N) + 1;
    std::vector<double> P(n * n, 0.0);

    // Convolution of the two binomial kernels, computed once per row.
    std::vector<double> leave, enter;
    for (std::size_t k = 0; k < n; ++k) {
        leave.assign(k + 1, 0.0);
        for (std::size_t r = 0; r <= k; ++r)
            leave[r] = leave_kernel(r, k, p_out);
        const std::size_t M = n - 1 - k;
        enter.assign(M + 1, 0.0);
        for (std::size_t i = 0; i <= M; ++i)
            enter[i] = enter_kernel(i, M, p_in);
        for (std::size_t r = 0; r <= k; ++r)
            for (std::size_t i = 0; i <= M; ++i)
                P[k * n + (k - r + i)] += leave[r] * enter[i];
    }
    return P;
}

/// Stationary in-disk fraction p_in / (p_in + p_out).
inline double stationary_fraction(double p_in, double p_out) { return p_in / (p_in + p_out); }

/// Binomial(N, eta) mass function, eta = p_in / (p_in + p_out).
inline std::vector<double> stationary_distribution(std::uint64_t N, double p_in, double p_out)
{
    detail::check_probabilities(p_in, p_out);
    const double eta = stationary_fraction(p_in, p_out);
    std::vector<double> pi(static_cast<std::size_t>(N) + 1);
    for (std::uint64_t j = 0; j <= N; ++j)
        pi[j] = detail::binomial_pmf(N, j, eta);
    return pi;
}

inline OccupancyChain occupancy_chain(std::uint64_t N, double p_in, double p_out)
{
    return {N, p_in, p_out, transition_matrix(N, p_in, p_out), stationary_distribution(N, p_in, p_out)};
}

/// (eta z + 1 - eta)^N.
inline double occupancy_pgf(double z, std::uint64_t N, double p_in, double p_out)
{
    const double eta = stationary_fraction(p_in, p_out);
    return std::pow(eta * z + 1.0 - eta, static_cast<double>(N));
}

inline OccupancyMoments occupancy_moments(std::uint64_t N, double p_in, double p_out)
{
    const double s = p_in + p_out;
    const double n = static_cast<double>(N);
    return {n * p_in / s, n * p_in * p_out / (s * s)};
}

} // namespace hetmob
