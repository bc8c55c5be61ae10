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
#include <sstream>

#include <gtest/gtest.h>

#include <hetmob/montecarlo.hpp>

using namespace hetmob;

namespace {

ExperimentPlan small_plan(std::uint64_t reps, std::uint64_t steps, std::uint64_t seed)
{
    ExperimentPlan p;
    p.replications = reps;
    p.steps_per_replication = steps;
    p.warmup_steps = std::min<std::uint64_t>(100, steps / 10);
    p.seed = seed;
    return p;
}

NetworkConfig desk()
{
    NetworkConfig c;
    c.N = 2000;
    return c;
}

} // namespace

TEST(Summarize, MeanAndStandardError)
{
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = summarize(v, 400);
    EXPECT_DOUBLE_EQ(e.value, 2.5);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0));
    EXPECT_EQ(e.sample_count, 400u);
    EXPECT_TRUE(std::isinf(summarize(std::vector<double>{1.0}, 1).std_error));
    EXPECT_EQ(summarize(std::vector<double>{}, 0).value, 0.0);
}

TEST(Plan, Validation)
{
    ExperimentPlan p;
    p.replications = 0;
    EXPECT_THROW(check_plan(p), std::invalid_argument);
    p.replications = 1;
    p.steps_per_replication = 10;
    p.warmup_steps = 10;
    EXPECT_THROW(check_plan(p), std::invalid_argument);
    p.warmup_steps = 0;
    p.histogram_stride = 0;
    EXPECT_THROW(check_plan(p), std::invalid_argument);
}

TEST(Plan, ScenarioNames)
{
    std::vector<std::string> names;
    for (auto s : kAllScenarios)
        names.emplace_back(to_string(s));
    EXPECT_EQ(names, (std::vector<std::string>{"crossing", "occupancy", "interference", "success", "rate",
                                               "density_sweep"}));
}

TEST(RunCrossing, ZeroStepPlanIsEmpty)
{
    ExperimentPlan p;
    p.steps_per_replication = 0;
    p.warmup_steps = 0;
    const auto e = run_crossing(p, NetworkConfig{}, 60.0);
    EXPECT_EQ(e.p_in.sample_count, 0u);
    EXPECT_EQ(e.p_out.sample_count, 0u);
}

TEST(RunCrossing, LongStepsAlwaysLeaveInLargeDomain)
{
    NetworkConfig c;
    c.L = 1e6;
    c.delta = 150.0;
    const auto e = run_crossing(small_plan(8, 20000, 3), c, 60.0);
    EXPECT_EQ(e.p_out.value, 1.0);
    EXPECT_EQ(e.p_return.value, 0.0);
}

TEST(RunCrossing, DeterministicAcrossWorkerCounts)
{
    auto p = small_plan(6, 5000, 9);
    const auto a = run_crossing(p, NetworkConfig{}, 60.0);
    p.threads = 4;
    const auto b = run_crossing(p, NetworkConfig{}, 60.0);
    EXPECT_EQ(a.p_in.value, b.p_in.value);
    EXPECT_EQ(a.p_out.value, b.p_out.value);
    EXPECT_EQ(a.p_out.std_error, b.p_out.std_error);
    p.seed = 10;
    EXPECT_NE(run_crossing(p, NetworkConfig{}, 60.0).p_out.value, a.p_out.value);
}

TEST(RunCrossing, StandardErrorScalesWithReplications)
{
    const auto few = run_crossing(small_plan(200, 2000, 11), NetworkConfig{}, 60.0);
    const auto many = run_crossing(small_plan(800, 2000, 12), NetworkConfig{}, 60.0);
    EXPECT_NEAR(few.p_out.std_error / many.p_out.std_error, 2.0, 0.4);
}

TEST(RunOccupancy, MeanMatchesAreaRatio)
{
    const auto c = desk();
    const auto e = run_occupancy(small_plan(12, 400, 13), c, c.R);
    EXPECT_LT(std::abs(e.mean.value - 28.8), 3.0 * e.mean.std_error);
    EXPECT_EQ(e.histogram.size(), 2001u);
    EXPECT_EQ(e.histogram_samples, 12u * 360u);
}

TEST(RunOccupancy, MeansAgreeAcrossStepLengths)
{
    auto c = desk();
    std::vector<EstimateWithError> means;
    std::uint64_t i = 0;
    for (double d : {5.0, 30.0, 100.0}) {
        c.delta = d;
        means.push_back(run_occupancy(small_plan(12, 400, derive_seed(14, i++)), c, c.R).mean);
    }
    for (std::size_t a = 0; a < means.size(); ++a)
        for (std::size_t b = a + 1; b < means.size(); ++b) {
            const double se = std::hypot(means[a].std_error, means[b].std_error);
            EXPECT_LT(std::abs(means[a].value - means[b].value), 3.0 * se) << a << " vs " << b;
        }
}

TEST(RunOccupancy, DeterministicAcrossWorkerCountsAndTraces)
{
    NetworkConfig c;
    c.N = 50;
    auto p = small_plan(3, 200, 15);
    const auto a = run_occupancy(p, c, c.R);
    p.threads = 3;
    std::ostringstream trace;
    p.trace = &trace;
    const auto b = run_occupancy(p, c, c.R);
    EXPECT_EQ(a.mean.value, b.mean.value);
    EXPECT_EQ(a.variance.value, b.variance.value);
    EXPECT_EQ(a.histogram, b.histogram);
    const std::string t = trace.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n')), 200u * 50u);
    EXPECT_EQ(t.rfind("199\t49\t", std::string::npos) != std::string::npos, true);
}

TEST(RunInterference, NoUsersNoInterference)
{
    auto c = desk();
    c.N = 0;
    const auto e = run_interference(small_plan(2, 200, 16), c, ChannelConfig{});
    EXPECT_EQ(e.csg_mean.value, 0.0);
    EXPECT_EQ(e.csg_variance.value, 0.0);
    EXPECT_EQ(e.osg_mean.value, 0.0);
}

TEST(RunInterference, LiveMobilityMatchesClosedForms)
{
    const auto c = desk();
    const ChannelConfig ch;
    const auto cp = crossing_probabilities(c, c.R_I);
    // the interference is heavy tailed, so favour many short replications
    auto plan = small_plan(32, 450, 17);
    plan.warmup_steps = 50;
    const auto e = run_interference(plan, c, ch, InterfererSampling::live_mobility);
    const auto csg = total_moments(c, ch, cp);
    auto co = c;
    co.cell_type = CellType::OSG;
    const auto osg = total_moments(co, ch, cp);
    EXPECT_LT(std::abs(e.csg_mean.value - csg.mean), 3.0 * e.csg_mean.std_error);
    EXPECT_LT(std::abs(e.osg_mean.value - osg.mean), 3.0 * e.osg_mean.std_error);
    // OSG hears less, with a margin far beyond the noise
    EXPECT_GT(e.csg_mean.value - e.osg_mean.value, 5.0 * std::hypot(e.csg_mean.std_error, e.osg_mean.std_error));
}

TEST(RunSinr, VanishingThresholdAlwaysSucceeds)
{
    const std::vector<PerformanceQuery> qs{{0.9, 1e-30, CellType::CSG}};
    const auto e = run_sinr(small_plan(2, 2000, 18), desk(), ChannelConfig{}, qs, InterfererSampling::stationary_law);
    EXPECT_EQ(e[0].success.value, 1.0);
}

TEST(RunSinr, MetricsDecreaseWithDensity)
{
    const std::vector<PerformanceQuery> qs{{0.9, 1e-6, CellType::CSG}, {0.9, 1e-6, CellType::OSG}};
    auto c = desk();
    const double eta = (c.R_I / c.L) * (c.R_I / c.L);
    std::vector<std::vector<SinrEstimate>> rows;
    std::uint64_t i = 0;
    for (std::uint64_t n : {500u, 1000u, 2000u, 4000u}) {
        c.N = n;
        rows.push_back(run_sinr(small_plan(8, 20000, derive_seed(19, i++)), c, ChannelConfig{}, qs,
                                InterfererSampling::stationary_law, eta));
    }
    for (std::size_t k = 1; k < rows.size(); ++k)
        for (std::size_t q = 0; q < qs.size(); ++q) {
            EXPECT_LT(rows[k][q].success.value, rows[k - 1][q].success.value) << "N index " << k << " query " << q;
            EXPECT_LT(rows[k][q].rate.value, rows[k - 1][q].rate.value) << "N index " << k << " query " << q;
        }
}

TEST(BinomialHistogramTest, AcceptsBinomialSamplesAndRejectsOthers)
{
    RandomStream rng(20, 0);
    std::binomial_distribution<std::uint64_t> good(2000, 0.0144), bad(2000, 0.0160);
    std::vector<std::uint64_t> hg(2001, 0), hb(2001, 0);
    for (int i = 0; i < 20000; ++i) {
        ++hg[good(rng)];
        ++hb[bad(rng)];
    }
    EXPECT_GT(binomial_histogram_test(hg, 2000, 0.0144).p_value, 0.01);
    EXPECT_LT(binomial_histogram_test(hb, 2000, 0.0144).p_value, 1e-6);
    EXPECT_THROW(binomial_histogram_test(std::vector<std::uint64_t>(5, 0), 4, 0.5), std::invalid_argument);
}
