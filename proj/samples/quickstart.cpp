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

// Evaluates the analytic chain for the default deployment and cross-checks
// the outgoing probability with a short simulation.

#include <cstdio>

#include <hetmob/hetmob.hpp>

int main()
{
    using namespace hetmob;
    NetworkConfig net;
    net.N = 2000;
    const ChannelConfig ch;

    const auto cell = crossing_probabilities(net, net.R);
    const auto occ = occupancy_moments(net.N, cell.p_in, cell.p_out);
    std::printf("p_in %.6g  p_out %.6g  users in cell: mean %.2f variance %.2f\n", cell.p_in, cell.p_out, occ.mean,
                occ.variance);

    const auto ring = crossing_probabilities(net, net.R_I);
    for (CellType t : {CellType::CSG, CellType::OSG}) {
        net.cell_type = t;
        const auto m = total_moments(net, ch, ring);
        const auto perf = evaluate_metrics({0.9, db_to_linear(-60.0), t}, net, ch, ring);
        std::printf("%s: interference mean %.4g W, success %.4f, rate %.1f bits/s\n", std::string(to_string(t)).c_str(),
                    m.mean, perf.success_probability, nats_to_bits(perf.average_rate));
    }

    ExperimentPlan plan;
    plan.scenario = McScenario::crossing;
    plan.replications = 4;
    plan.steps_per_replication = 50000;
    plan.warmup_steps = 0;
    plan.seed = 2026;
    const auto mc = run_crossing(plan, net, net.R);
    std::printf("simulated p_out %.5f +- %.5f\n", mc.p_out.value, mc.p_out.std_error);
}
