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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include <hetmob/crossing.hpp>
#include <hetmob/montecarlo.hpp>
#include <hetmob/occupancy.hpp>

#include "oracles.hpp"

using namespace hetmob;

namespace {

double tv_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

} // namespace

TEST(TransitionMatrix, SingleUser)
{
    const auto P = transition_matrix(1, 0.1, 0.3);
    ASSERT_EQ(P.size(), 4u);
    EXPECT_DOUBLE_EQ(P[0], 0.9);
    EXPECT_DOUBLE_EQ(P[1], 0.1);
    EXPECT_DOUBLE_EQ(P[2], 0.3);
    EXPECT_DOUBLE_EQ(P[3], 0.7);
}

TEST(TransitionMatrix, RowsSumToOne)
{
    for (std::uint64_t N : {5u, 20u, 200u}) {
        const auto P = transition_matrix(N, 0.2, 0.3);
        const std::size_t n = N + 1;
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                ASSERT_GE(P[k * n + j], 0.0);
                s += P[k * n + j];
            }
            EXPECT_NEAR(s, 1.0, 1e-12) << "N=" << N << " row " << k;
        }
    }
}

TEST(TransitionMatrix, MatchesEntryFormula)
{
    const std::uint64_t N = 12;
    const auto P = transition_matrix(N, 0.07, 0.4);
    for (std::uint64_t k = 0; k <= N; ++k)
        for (std::uint64_t j = 0; j <= N; ++j)
            EXPECT_NEAR(P[k * (N + 1) + j], transition_probability(N, k, j, 0.07, 0.4), 1e-15);
}

TEST(TransitionMatrix, MatchesCoinFlipSimulation)
{
    // Five independent two-state users; count row transitions k -> j.
    const std::uint64_t N = 5;
    const double pin = 0.2, pout = 0.3;
    const auto P = transition_matrix(N, pin, pout);
    RandomStream rng(2024, 0);
    std::vector<int> inside(N, 0);
    std::vector<double> counts((N + 1) * (N + 1), 0.0), visits(N + 1, 0.0);
    int k = 0;
    for (int step = 0; step < 1000000; ++step) {
        int j = 0;
        for (auto& u : inside) {
            u = u ? (rng.uniform_co() >= pout) : (rng.uniform_co() < pin);
            j += u;
        }
        counts[k * (N + 1) + j] += 1.0;
        visits[k] += 1.0;
        k = j;
    }
    for (std::size_t a = 0; a <= N; ++a)
        for (std::size_t b = 0; b <= N; ++b) {
            const double p = P[a * (N + 1) + b];
            const double freq = counts[a * (N + 1) + b] / visits[a];
            const double se = std::sqrt(p * (1.0 - p) / visits[a]);
            EXPECT_LE(std::abs(freq - p), 3.0 * se) << a << " -> " << b;
        }
}

TEST(TransitionMatrix, Errors)
{
    EXPECT_THROW(transition_matrix(5, 0.0, 0.3), std::domain_error);
    EXPECT_THROW(transition_matrix(5, 0.2, 1.0), std::domain_error);
    EXPECT_THROW(transition_matrix(0, 0.2, 0.3), std::domain_error);
    EXPECT_THROW(transition_matrix(kMaxMatrixPopulation + 1, 0.2, 0.3), std::length_error);
}

TEST(StationaryDistribution, SingleUser)
{
    const auto pi = stationary_distribution(1, 0.1, 0.3);
    EXPECT_DOUBLE_EQ(pi[0], 0.75);
    EXPECT_DOUBLE_EQ(pi[1], 0.25);
}

TEST(StationaryDistribution, SymmetricCase)
{
    const auto pi = stationary_distribution(20, 0.25, 0.25);
    for (std::uint64_t j = 0; j <= 20; ++j) {
        double c = 1.0;
        for (std::uint64_t i = 0; i < j; ++i)
            c = c * static_cast<double>(20 - i) / static_cast<double>(i + 1);
        EXPECT_NEAR(pi[j], c / 1048576.0, 1e-15);
    }
}

TEST(StationaryDistribution, PowerIterationFixedPoint)
{
    const std::uint64_t N = 20;
    const auto P = transition_matrix(N, 0.05, 0.4);
    const auto ref = oracle::power_iteration(P, N + 1);
    EXPECT_LE(tv_distance(stationary_distribution(N, 0.05, 0.4), ref), 1e-8);
}

TEST(StationaryDistribution, StationarityResidual)
{
    const auto c = occupancy_chain(40, 0.0209, 0.143);
    const std::size_t n = c.size();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += c.stationary[k] * c.at(k, j);
        EXPECT_NEAR(s, c.stationary[j], 1e-10);
        total += c.stationary[j];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(StationaryDistribution, LargePopulationStaysFinite)
{
    const auto pi = stationary_distribution(100000, 0.0021, 0.143);
    const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
    EXPECT_NEAR(s, 1.0, 1e-10);
    for (double v : pi)
        ASSERT_TRUE(std::isfinite(v));
}

TEST(OccupancyPgf, Examples)
{
    EXPECT_DOUBLE_EQ(occupancy_pgf(1.0, 20, 0.05, 0.4), 1.0);
    const auto pi = stationary_distribution(20, 0.05, 0.4);
    EXPECT_NEAR(occupancy_pgf(0.0, 20, 0.05, 0.4), pi[0], 1e-15);
    double direct = 0.0;
    for (std::size_t j = pi.size(); j-- > 0;)
        direct += pi[j] * std::pow(0.7, static_cast<double>(j));
    EXPECT_NEAR(occupancy_pgf(0.7, 20, 0.05, 0.4), direct, 1e-12);
}

TEST(OccupancyPgf, CoefficientsByFiniteDifferences)
{
    // Newton forward differences on the integer nodes -N/2 .. N/2, expanded to
    // monomial coefficients. Centered nodes keep the difference table well scaled.
    const std::uint64_t N = 20;
    const double pin = 0.05, pout = 0.4;
    const double z0 = -static_cast<double>(N) / 2.0;
    std::vector<long double> d(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        d[i] = occupancy_pgf(z0 + static_cast<double>(i), N, pin, pout);
    for (std::size_t j = 1; j <= N; ++j)
        for (std::size_t i = N; i >= j; --i)
            d[i] = (d[i] - d[i - 1]) / static_cast<long double>(j);
    std::vector<long double> poly(N + 1, 0.0L);
    poly[0] = d[N];
    for (std::size_t j = N; j-- > 0;) {
        const long double zj = z0 + static_cast<double>(j);
        for (std::size_t n = N; n >= 1; --n)
            poly[n] = poly[n - 1] - zj * poly[n];
        poly[0] = d[j] - zj * poly[0];
    }
    const auto pi = stationary_distribution(N, pin, pout);
    for (std::size_t j = 0; j <= N; ++j)
        EXPECT_NEAR(static_cast<double>(poly[j]), pi[j], 1e-8) << "j=" << j;
}

TEST(OccupancyMoments, SymmetricCase)
{
    const auto m = occupancy_moments(100, 0.3, 0.3);
    EXPECT_DOUBLE_EQ(m.mean, 50.0);
    EXPECT_DOUBLE_EQ(m.variance, 25.0);
}

TEST(OccupancyMoments, MatchPgfDerivatives)
{
    const std::uint64_t N = 200;
    const double pin = 0.0333288, pout = 0.545295;
    const auto m = occupancy_moments(N, pin, pout);
    const double h = 1e-4;
    const double g1 = (occupancy_pgf(1 + h, N, pin, pout) - occupancy_pgf(1 - h, N, pin, pout)) / (2 * h);
    EXPECT_NEAR(g1, m.mean, 1e-6 * m.mean);
    // Var = G''(1) + G'(1) - G'(1)^2
    const double g2 = (occupancy_pgf(1 + h, N, pin, pout) - 2.0 * occupancy_pgf(1.0, N, pin, pout) +
                       occupancy_pgf(1 - h, N, pin, pout)) / (h * h);
    EXPECT_NEAR(g2 + g1 - g1 * g1, m.variance, 1e-3 * m.variance);
}

TEST(OccupancyMoments, BinomialIdentity)
{
    RandomStream rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const double pin = 0.001 + 0.99 * rng.uniform_co(), pout = 0.001 + 0.99 * rng.uniform_co();
        const auto m = occupancy_moments(2000, pin, pout);
        const double eta = stationary_fraction(pin, pout);
        EXPECT_NEAR(m.mean, 2000.0 * eta, 1e-9 * m.mean);
        EXPECT_LE(m.variance, m.mean * (1.0 - eta) + 1e-12);
    }
}

TEST(OccupancyMoments, InterferingDiskAtFullScale)
{
    NetworkConfig cfg;
    const auto cp = crossing_probabilities(cfg, cfg.R_I);
    const auto m = occupancy_moments(10000, cp.p_in, cp.p_out);
    EXPECT_NEAR(m.mean, 576.0, 0.05 * 576.0);

    // MC occupancy of the interfering disk at reduced population
    cfg.N = 2000;
    ExperimentPlan plan;
    plan.replications = 4;
    plan.steps_per_replication = 1100;
    plan.warmup_steps = 100;
    plan.seed = 17;
    const auto mc = run_occupancy(plan, cfg, cfg.R_I);
    EXPECT_NEAR(mc.mean.value * 5.0, 576.0, 0.05 * 576.0);
}

TEST(OccupancyMoments, InvariantInStepLength)
{
    NetworkConfig cfg;
    std::vector<OccupancyMoments> ms;
    for (double d : {5.0, 30.0, 100.0, 300.0}) {
        cfg.delta = d;
        const auto cp = crossing_probabilities(cfg, cfg.R);
        ms.push_back(occupancy_moments(2000, cp.p_in, cp.p_out));
    }
    for (const auto& m : ms) {
        EXPECT_NEAR(m.mean, ms.front().mean, 0.05 * ms.front().mean);
        EXPECT_NEAR(m.variance, 2000.0 * 0.0144 * (1.0 - 0.0144), 0.05 * 2000.0 * 0.0144);
    }
}

TEST(OccupancyMonteCarlo, HistogramIsBinomial)
{
    NetworkConfig cfg;
    cfg.N = 2000;
    ExperimentPlan plan;
    plan.replications = 2;
    plan.steps_per_replication = 2100;
    plan.warmup_steps = 100;
    plan.histogram_stride = 10; // thin to near-independent snapshots
    plan.seed = 23;
    const auto mc = run_occupancy(plan, cfg, cfg.R);
    EXPECT_EQ(mc.histogram_samples, 400u);
    const auto chi = binomial_histogram_test(mc.histogram, cfg.N, 0.0144);
    EXPECT_GT(chi.p_value, 0.01) << "chi2=" << chi.statistic << " dof=" << chi.dof;
}
