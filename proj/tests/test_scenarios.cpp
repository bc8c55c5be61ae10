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

#include <sstream>

#include <gtest/gtest.h>

#include <hetmob/scenarios.hpp>

using namespace hetmob;
using namespace hetmob::scenarios;

namespace {

RunManifest manifest(const std::string& name, Engine engine = Engine::analytic)
{
    RunManifest m;
    m.scenario = name;
    m.engine = engine;
    m.config = validate(NetworkConfig{}, ChannelConfig{});
    return m;
}

std::string tsv(const RunResult& r)
{
    std::ostringstream os;
    write_tsv(os, r);
    return os.str();
}

const Row& find_row(const RunResult& r, const std::string& variant, const std::string& metric, double x)
{
    for (const auto& row : r.rows)
        if (row.variant == variant && row.metric == metric && row.sweep_value == x)
            return row;
    throw std::out_of_range(variant + " " + metric);
}

} // namespace

TEST(Catalog, ContainsBaseScenariosAndFigureAliases)
{
    for (const char* n : {"crossing", "occupancy", "interference", "success", "rate", "density_sweep", "figure4",
                          "figure5", "figure6", "figure7", "figure8", "figure9", "figure10", "figure11", "figure12"})
        EXPECT_NO_THROW(find_scenario(n)) << n;
}

TEST(Catalog, UnknownScenarioListsValidSet)
{
    try {
        find_scenario("figure99");
        FAIL();
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("figure99"), std::string::npos);
        EXPECT_NE(msg.find("figure6"), std::string::npos);
        EXPECT_NE(msg.find("figure12"), std::string::npos);
        EXPECT_NE(msg.find("density_sweep"), std::string::npos);
    }
}

TEST(Parsing, Sweep)
{
    const auto [key, values] = parse_sweep("delta=5, 30,1e2");
    EXPECT_EQ(key, "delta");
    EXPECT_EQ(values, (std::vector<double>{5.0, 30.0, 100.0}));
    EXPECT_THROW(parse_sweep("delta"), UsageError);
    EXPECT_THROW(parse_sweep("=5"), UsageError);
    EXPECT_THROW(parse_sweep("delta="), UsageError);
    EXPECT_THROW(parse_sweep("delta=5,x"), UsageError);
    EXPECT_THROW(parse_sweep("delta=5,,6"), UsageError);
}

TEST(Parsing, Engine)
{
    EXPECT_EQ(parse_engine("analytic"), Engine::analytic);
    EXPECT_EQ(parse_engine("mc"), Engine::mc);
    EXPECT_EQ(parse_engine("montecarlo"), Engine::mc);
    EXPECT_EQ(parse_engine("both"), Engine::both);
    EXPECT_THROW(parse_engine("fast"), std::invalid_argument);
}

TEST(Run, CrossingAnalyticRowsAndFluxChecks)
{
    const auto r = run(manifest("figure6"));
    EXPECT_EQ(r.rows.size(), 10u * 4u);
    EXPECT_EQ(r.checks.size(), 10u);
    EXPECT_TRUE(r.all_checks_passed());
    const auto& pout = find_row(r, "R", "p_out", 5.0);
    EXPECT_NEAR(*pout.analytic, 0.33803, 1e-4);
    EXPECT_FALSE(pout.mc.has_value());
    EXPECT_FALSE(pout.abs_gap().has_value());
}

TEST(Run, TsvLayoutAndDeterminism)
{
    const auto a = tsv(run(manifest("figure6")));
    const auto b = tsv(run(manifest("figure6")));
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("variant\tsweep_key\tsweep_value\tmetric\tanalytic\tmc\tstd_error\tabs_gap\n"),
              std::string::npos);
    EXPECT_NE(a.find("R\tdelta\t5\tp_out\t"), std::string::npos);
    EXPECT_NE(a.find("\tNA\tNA\tNA\n"), std::string::npos);
    EXPECT_NE(a.find("scale factor 0.2"), std::string::npos);

    std::ostringstream stamped;
    write_tsv(stamped, run(manifest("figure6")), "2026-01-01T00:00:00Z");
    EXPECT_EQ(stamped.str().rfind("# generated: 2026-01-01T00:00:00Z\n", 0), 0u);
}

TEST(Run, MonteCarloIsSeedDeterministic)
{
    auto m = manifest("crossing", Engine::both);
    m.sweep_key = "delta";
    m.sweep_values = {30.0};
    m.steps = 20000;
    m.replications = 4;
    const auto a = run(m);
    EXPECT_EQ(tsv(a), tsv(run(m)));
    const auto& pout = find_row(a, "R", "p_out", 30.0);
    ASSERT_TRUE(pout.mc && pout.std_error && pout.abs_gap());
    EXPECT_GT(*pout.std_error, 0.0);
    m.seed = 2;
    EXPECT_NE(tsv(a), tsv(run(m)));
}

TEST(Run, PopulationScale)
{
    auto m = manifest("figure4");
    EXPECT_NEAR(*find_row(run(m), "R", "mean", 30.0).analytic, 2000 * 0.0144, 2.0);
    m.full_scale = true;
    EXPECT_NE(tsv(run(m)).find("N=10000 (scale factor 1"), std::string::npos);
    m.full_scale = false;
    m.config.network.N = 500;
    m.population_set = true;
    EXPECT_NEAR(*find_row(run(m), "R", "mean", 30.0).analytic, 500 * 0.0144, 0.5);
}

TEST(Run, InterferenceInvarianceChecks)
{
    const auto r = run(manifest("interference"));
    EXPECT_EQ(r.checks.size(), 4u);
    EXPECT_TRUE(r.all_checks_passed());
    EXPECT_GT(*find_row(r, "stationary", "csg_mean", 30.0).analytic,
              *find_row(r, "stationary", "osg_mean", 30.0).analytic);
}

TEST(Run, FigureVariantsApply)
{
    const auto r = run(manifest("figure7"));
    EXPECT_EQ(r.rows.size(), 4u * 10u);
    const double base = *find_row(r, "CSG,alpha=0.6", "success", 0.9).analytic;
    EXPECT_LT(*find_row(r, "CSG,beta=4", "success", 0.9).analytic, base);
    EXPECT_LT(*find_row(r, "CSG,T=-50dB", "success", 0.9).analytic, base);
    EXPECT_NEAR(*find_row(r, "CSG,alpha=1.8", "success", 0.9).analytic, base, 0.02);

    const auto osg = run(manifest("figure9"));
    EXPECT_GT(*find_row(osg, "OSG,beta=4", "success", 0.9).analytic,
              *find_row(osg, "OSG,alpha=0.6", "success", 0.9).analytic);
}

TEST(Run, ThresholdAndBits)
{
    auto m = manifest("rate");
    m.sweep_key = "kappa";
    m.sweep_values = {0.9};
    const double nats = *find_row(run(m), "CSG", "rate", 0.9).analytic;
    m.rate_in_bits = true;
    EXPECT_NEAR(*find_row(run(m), "CSG", "rate_bits", 0.9).analytic, nats_to_bits(nats), 1e-9 * nats);

    auto s = manifest("success");
    s.sweep_key = "kappa";
    s.sweep_values = {0.9};
    const double at60 = *find_row(run(s), "CSG", "success", 0.9).analytic;
    s.threshold_db = -50.0;
    EXPECT_LT(*find_row(run(s), "CSG", "success", 0.9).analytic, at60);
}

TEST(Run, DensityChecksPass)
{
    const auto r = run(manifest("figure12"));
    EXPECT_EQ(r.checks.size(), 4u);
    EXPECT_TRUE(r.all_checks_passed());
}

TEST(Run, QuerySweepSharesOneSimulation)
{
    auto m = manifest("success", Engine::mc);
    m.sweep_values = {0.5, 0.9};
    m.sweep_key = "kappa";
    m.steps = 300;
    m.warmup = 10;
    m.replications = 2;
    m.sinr_sampling = InterfererSampling::stationary_law;
    const auto r = run(m);
    EXPECT_GE(find_row(r, "CSG", "success", 0.5).mc.value(), find_row(r, "CSG", "success", 0.9).mc.value());
    EXPECT_FALSE(find_row(r, "CSG", "success", 0.5).analytic.has_value());
}

TEST(Run, Errors)
{
    auto m = manifest("crossing");
    m.sweep_key = "no_such_key";
    m.sweep_values = {1.0};
    EXPECT_THROW(run(m), ConfigError);

    m.sweep_key = "delta";
    m.sweep_values = {-1.0};
    EXPECT_THROW(run(m), ConfigError);

    auto b = manifest("figure4", Engine::mc);
    b.steps = 1000000000;
    EXPECT_THROW(run(b), BudgetError);

    EXPECT_THROW(run(manifest("nope")), UsageError);
}
