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

// Scenario runner behind the command-line tool: named parameter grids,
// analytic and Monte Carlo evaluation of every grid point, long-format rows
// and pass/fail checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "crossing.hpp"
#include "interference.hpp"
#include "montecarlo.hpp"
#include "occupancy.hpp"
#include "performance.hpp"
#include "quadrature.hpp"

namespace hetmob::scenarios {

enum class Engine { analytic, mc, both };

inline Engine parse_engine(const std::string& s)
{
    if (s == "analytic")
        return Engine::analytic;
    if (s == "mc" || s == "montecarlo")
        return Engine::mc;
    if (s == "both")
        return Engine::both;
    throw std::invalid_argument("unknown engine '" + s + "' (expected analytic, mc or both)");
}

inline bool uses_analytic(Engine e) { return e != Engine::mc; }
inline bool uses_mc(Engine e) { return e != Engine::analytic; }

/// Thrown for requests whose Monte Carlo cost exceeds the work budget.
class BudgetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for an unknown scenario or a malformed sweep.
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kDeskPopulation = 2000;
inline constexpr std::uint64_t kReferencePopulation = 10000;
inline constexpr double kWorkBudget = 1e12; ///< flights or interferer draws per run

/// A named modification of the base configuration, e.g. "beta=4".
struct Variant
{
    std::string name;
    std::function<void(NetworkConfig&, ChannelConfig&, PerformanceQuery&)> apply;
};

struct ScenarioDef
{
    std::string name;
    McScenario kind;
    std::string description;
    std::string sweep_key;
    std::vector<double> sweep_values;
    std::vector<Variant> variants;
    std::function<void(NetworkConfig&, ChannelConfig&, PerformanceQuery&)> base; ///< may be empty
};

namespace detail {

inline Variant set_nothing(std::string name)
{
    return {std::move(name), [](NetworkConfig&, ChannelConfig&, PerformanceQuery&) {}};
}

inline Variant cell_variant(CellType t)
{
    return {std::string(to_string(t)), [t](NetworkConfig&, ChannelConfig&, PerformanceQuery& q) { q.cell_type = t; }};
}

inline Variant cell_beta(CellType t, double beta)
{
    return {std::string(to_string(t)) + ",beta=" + std::to_string(static_cast<int>(beta)),
            [t, beta](NetworkConfig&, ChannelConfig& ch, PerformanceQuery& q) {
                q.cell_type = t;
                ch.beta = beta;
            }};
}

/// alpha 0.6 / 1.8, T -60 / -50 dB and beta 2 / 4, as plotted for each access mode.
inline std::vector<Variant> performance_variants(CellType t)
{
    const std::string c(to_string(t));
    auto with = [t](std::function<void(NetworkConfig&, ChannelConfig&, PerformanceQuery&)> f) {
        return [t, f](NetworkConfig& n, ChannelConfig& ch, PerformanceQuery& q) {
            q.cell_type = t;
            f(n, ch, q);
        };
    };
    return {
        {c + ",alpha=0.6", with([](NetworkConfig&, ChannelConfig&, PerformanceQuery&) {})},
        {c + ",alpha=1.8", with([](NetworkConfig& n, ChannelConfig&, PerformanceQuery&) { n.alpha = 1.8; })},
        {c + ",T=-50dB", with([](NetworkConfig&, ChannelConfig&, PerformanceQuery& q) { q.T = db_to_linear(-50.0); })},
        {c + ",beta=4", with([](NetworkConfig&, ChannelConfig& ch, PerformanceQuery&) { ch.beta = 4.0; })},
    };
}

inline std::function<void(NetworkConfig&, ChannelConfig&, PerformanceQuery&)> set_delta(double d)
{
    return [d](NetworkConfig& n, ChannelConfig&, PerformanceQuery&) { n.delta = d; };
}

inline const std::vector<double> kDeltaGrid{1, 5, 10, 20, 30, 50, 100, 150, 200, 300};
inline const std::vector<double> kKappaGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
inline const std::vector<double> kVelocityGrid{1, 3, 5, 10, 15, 20, 25, 30};
inline const std::vector<double> kDensityGrid{500, 1000, 2000, 4000};

} // namespace detail

/// Every runnable scenario: the six base scenarios and the figure aliases.
inline const std::vector<ScenarioDef>& catalog()
{
    using namespace detail;
    static const std::vector<ScenarioDef> defs = [] {
        std::vector<ScenarioDef> d;
        const std::vector<Variant> cells{cell_variant(CellType::CSG), cell_variant(CellType::OSG)};
        d.push_back({"crossing", McScenario::crossing, "incoming/outgoing probability vs basic step length", "delta",
                     kDeltaGrid, {set_nothing("R")}, {}});
        d.push_back({"occupancy", McScenario::occupancy, "mean and variance of the in-cell user count vs delta",
                     "delta", {5, 30, 100, 300}, {set_nothing("R")}, {}});
        d.push_back({"interference", McScenario::interference, "mean and variance of CSG/OSG interference vs delta",
                     "delta", {5, 30, 100, 300}, {set_nothing("stationary"), set_nothing("live")}, {}});
        d.push_back({"success", McScenario::success, "success probability vs kappa", "kappa", kKappaGrid, cells, {}});
        d.push_back({"rate", McScenario::rate, "average rate vs kappa", "kappa", kKappaGrid, cells, {}});
        d.push_back({"density_sweep", McScenario::density_sweep, "success probability and rate vs user count", "N",
                     kDensityGrid, cells, set_delta(3.0)});

        d.push_back({"figure4", McScenario::occupancy, "user-count mean and variance vs delta", "delta", kDeltaGrid,
                     {set_nothing("R")}, {}});
        d.push_back({"figure5", McScenario::interference, "CSG/OSG interference mean and variance vs delta", "delta",
                     kDeltaGrid, {set_nothing("stationary"), set_nothing("live")}, {}});
        d.push_back({"figure6", McScenario::crossing, "incoming/outgoing probability vs delta over [1, 300]", "delta",
                     kDeltaGrid, {set_nothing("R")}, {}});
        d.push_back({"figure7", McScenario::success, "CSG success probability vs kappa (delta=30)", "kappa",
                     kKappaGrid, performance_variants(CellType::CSG), set_delta(30.0)});
        d.push_back({"figure8", McScenario::success, "success probability vs delta (kappa=0.9)", "delta",
                     kVelocityGrid,
                     {cell_beta(CellType::CSG, 2), cell_beta(CellType::CSG, 4), cell_beta(CellType::OSG, 2),
                      cell_beta(CellType::OSG, 4)},
                     {}});
        d.push_back({"figure9", McScenario::success, "OSG success probability vs kappa (delta=3)", "kappa",
                     kKappaGrid, performance_variants(CellType::OSG), set_delta(3.0)});
        d.push_back({"figure10", McScenario::rate, "CSG average rate vs kappa (delta=3)", "kappa", kKappaGrid,
                     performance_variants(CellType::CSG), set_delta(3.0)});
        d.push_back({"figure11", McScenario::rate, "OSG average rate vs kappa (delta=3)", "kappa", kKappaGrid,
                     performance_variants(CellType::OSG), set_delta(3.0)});
        d.push_back({"figure12", McScenario::density_sweep, "success probability and rate vs user count (delta=3)",
                     "N", kDensityGrid, cells, set_delta(3.0)});
        return d;
    }();
    return defs;
}

inline std::string scenario_names()
{
    std::string s;
    for (const auto& d : catalog())
        s += (s.empty() ? "" : ", ") + d.name;
    return s;
}

inline const ScenarioDef& find_scenario(const std::string& name)
{
    for (const auto& d : catalog())
        if (d.name == name)
            return d;
    throw UsageError("unknown scenario '" + name + "'; valid scenarios: " + scenario_names());
}

/// Parses `KEY=v1,v2,...`.
inline std::pair<std::string, std::vector<double>> parse_sweep(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw UsageError("sweep must look like KEY=v1,v2,...; got '" + spec + "'");
    std::pair<std::string, std::vector<double>> out{spec.substr(0, eq), {}};
    std::size_t pos = eq + 1;
    while (pos <= spec.size()) {
        const auto comma = std::min(spec.find(',', pos), spec.size());
        const auto item = ::hetmob::detail::trim(spec.substr(pos, comma - pos));
        try {
            std::size_t used = 0;
            out.second.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("sweep value '" + item + "' is not a number");
        }
        pos = comma + 1;
    }
    return out;
}

struct RunManifest
{
    std::string scenario;
    Scenario config;                   ///< validated base configuration
    std::string sweep_key;             ///< empty: scenario default
    std::vector<double> sweep_values;
    Engine engine = Engine::both;
    std::uint64_t seed = 1;
    std::uint64_t replications = 8;
    std::optional<std::uint64_t> steps;  ///< default depends on the scenario
    std::optional<std::uint64_t> warmup; ///< default min(1000, steps / 10)
    std::optional<double> threshold_db;
    bool full_scale = false;
    bool population_set = false; ///< N came from the config file
    bool rate_in_bits = false;
    InterfererSampling sinr_sampling = InterfererSampling::live_mobility;
    unsigned threads = 1;
    std::ostream* trace = nullptr;
};

struct Row
{
    std::string variant;
    std::string sweep_key;
    double sweep_value = 0.0;
    std::string metric;
    std::optional<double> analytic;
    std::optional<double> mc;
    std::optional<double> std_error;

    std::optional<double> abs_gap() const
    {
        if (analytic && mc)
            return std::abs(*analytic - *mc);
        return std::nullopt;
    }
};

struct Check
{
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult
{
    std::string scenario;
    std::vector<std::string> header; ///< "key: value" lines, written after '#'
    std::vector<std::string> warnings;
    std::vector<Row> rows;
    std::vector<Check> checks;

    bool all_checks_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_tsv(std::ostream& out, const RunResult& r, const std::string& timestamp = {})
{
    if (!timestamp.empty())
        out << "# generated: " << timestamp << '\n';
    for (const auto& h : r.header)
        out << "# " << h << '\n';
    out << "variant\tsweep_key\tsweep_value\tmetric\tanalytic\tmc\tstd_error\tabs_gap\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
    for (const auto& row : r.rows)
        out << row.variant << '\t' << row.sweep_key << '\t' << format_number(row.sweep_value) << '\t' << row.metric
            << '\t' << opt(row.analytic) << '\t' << opt(row.mc) << '\t' << opt(row.std_error) << '\t'
            << opt(row.abs_gap()) << '\n';
}

namespace detail {

/// Applies one sweep value; `kappa` and `T_db` address the query, anything
/// else is a config key.
inline void apply_sweep(const std::string& key, double value, NetworkConfig& net, ChannelConfig& ch,
                        PerformanceQuery& q)
{
    if (key == "kappa")
        q.kappa = value;
    else if (key == "T_db")
        q.T = db_to_linear(value);
    else if (key == "N") {
        if (value < 0 || value != std::floor(value))
            throw UsageError("sweep N: expected non-negative integers");
        net.N = static_cast<std::uint64_t>(value);
    } else
        apply_setting(net, ch, key, format_number(value));
}

struct Point
{
    std::size_t variant;
    std::size_t index;
    double value;
    NetworkConfig net;
    ChannelConfig ch;
    PerformanceQuery query;
};

class Runner
{
public:
    Runner(const RunManifest& m, const ScenarioDef& def) : m_(m), def_(def)
    {
        key_ = m.sweep_key.empty() ? def.sweep_key : m.sweep_key;
        values_ = m.sweep_key.empty() ? def.sweep_values : m.sweep_values;
        if (values_.empty())
            throw UsageError("sweep for '" + key_ + "' has no values");
        const bool population = def.kind != McScenario::crossing;
        steps_ = m.steps.value_or(m.full_scale ? 1000000 : (population ? 10000 : 100000));
        warmup_ = m.warmup.value_or(std::min<std::uint64_t>(1000, steps_ / 10));
    }

    RunResult run()
    {
        RunResult r;
        r.scenario = def_.name;
        build_points();
        header(r);
        check_budget();
        switch (def_.kind) {
        case McScenario::crossing: crossing(r); break;
        case McScenario::occupancy: occupancy(r); break;
        case McScenario::interference: interference(r); break;
        case McScenario::success:
        case McScenario::rate:
        case McScenario::density_sweep: performance(r); break;
        }
        return r;
    }

private:
    void build_points()
    {
        for (std::size_t v = 0; v < def_.variants.size(); ++v)
            for (std::size_t i = 0; i < values_.size(); ++i) {
                Point p{v, i, values_[i], m_.config.network, m_.config.channel, PerformanceQuery{}};
                if (!m_.population_set)
                    p.net.N = m_.full_scale ? kReferencePopulation : kDeskPopulation;
                if (m_.threshold_db)
                    p.query.T = db_to_linear(*m_.threshold_db);
                if (def_.base)
                    def_.base(p.net, p.ch, p.query);
                def_.variants[v].apply(p.net, p.ch, p.query);
                apply_sweep(key_, values_[i], p.net, p.ch, p.query);
                validate(p.net, p.ch);
                points_.push_back(p);
            }
    }

    void header(RunResult& r) const
    {
        const auto N = points_.front().net.N;
        r.header.push_back("scenario: " + def_.name + " (" + def_.description + ")");
        r.header.push_back("engine: " + std::string(m_.engine == Engine::analytic ? "analytic"
                                                    : m_.engine == Engine::mc     ? "mc"
                                                                                  : "both"));
        r.header.push_back("seed: " + std::to_string(m_.seed));
        r.header.push_back("sweep: " + key_);
        if (key_ == "N")
            r.header.push_back("population: swept (reference N=" + std::to_string(kReferencePopulation) + ")");
        else
            r.header.push_back("population: N=" + std::to_string(N) + " (scale factor " +
                               format_number(static_cast<double>(N) / static_cast<double>(kReferencePopulation)) +
                               " of N=" + std::to_string(kReferencePopulation) + ")");
        if (uses_mc(m_.engine))
            r.header.push_back("mc: replications=" + std::to_string(m_.replications) +
                               " steps=" + std::to_string(steps_) + " warmup=" + std::to_string(warmup_));
        if (def_.kind == McScenario::success || def_.kind == McScenario::rate ||
            def_.kind == McScenario::density_sweep)
            r.header.push_back(std::string("sinr sampling: ") +
                               (m_.sinr_sampling == InterfererSampling::live_mobility ? "live" : "stationary"));
        if (m_.rate_in_bits)
            r.header.push_back("rate unit: bits/s");
    }

    void check_budget() const
    {
        if (!uses_mc(m_.engine))
            return;
        double work = 0.0;
        for (const auto& p : points_) {
            const double runs = static_cast<double>(m_.replications) * static_cast<double>(steps_);
            if (def_.kind == McScenario::crossing)
                work += 2.0 * runs;
            else
                work += runs * static_cast<double>(std::max<std::uint64_t>(p.net.N, 1));
        }
        if (work > kWorkBudget)
            throw BudgetError("requested Monte Carlo work of " + format_number(work) +
                              " flights exceeds the budget of " + format_number(kWorkBudget) +
                              "; lower --steps, --replications or the sweep size");
    }

    ExperimentPlan plan(const Point& p) const
    {
        ExperimentPlan plan;
        plan.scenario = def_.kind;
        plan.replications = m_.replications;
        plan.steps_per_replication = steps_;
        plan.warmup_steps = warmup_;
        plan.seed = derive_seed(m_.seed, p.variant * 4096 + p.index);
        plan.threads = m_.threads;
        return plan;
    }

    Row row(const Point& p, std::string metric) const
    {
        Row r;
        r.variant = def_.variants[p.variant].name;
        r.sweep_key = key_;
        r.sweep_value = p.value;
        r.metric = std::move(metric);
        return r;
    }

    static void set_mc(Row& r, const EstimateWithError& e)
    {
        r.mc = e.value;
        r.std_error = e.std_error;
    }

    void add_gap_check(RunResult& r, const Row& row, double tolerance, const std::string& rule,
                       std::optional<double> rel = std::nullopt) const
    {
        if (!row.abs_gap())
            return;
        const double gap = *row.abs_gap();
        bool ok = gap <= tolerance;
        if (!ok && rel)
            ok = gap <= *rel * std::abs(*row.analytic);
        r.checks.push_back({def_.name + ":" + row.variant + ":" + row.metric + "@" + key_ + "=" +
                                format_number(row.sweep_value),
                            ok, "gap " + format_number(gap) + " vs " + rule});
    }

    void add_variation_check(RunResult& r, const std::string& variant, const std::string& metric,
                             const std::vector<double>& values, double limit) const
    {
        if (values.size() < 2)
            return;
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double ref = std::abs(values.front());
        const double spread = ref > 0.0 ? (*hi - *lo) / ref : 0.0;
        r.checks.push_back({def_.name + ":" + variant + ":" + metric + ":variation",
                            spread <= limit,
                            "relative spread " + format_number(spread) + " vs limit " + format_number(limit)});
    }

    void crossing(RunResult& r)
    {
        for (const auto& p : points_) {
            const double radius = p.net.R;
            Row pin = row(p, "p_in"), pout = row(p, "p_out"), pret = row(p, "p_return"), eta = row(p, "eta");
            if (uses_analytic(m_.engine)) {
                const auto cp = cache_.get(p.net, radius);
                pin.analytic = cp.p_in;
                pout.analytic = cp.p_out;
                pret.analytic = cp.p_return;
                eta.analytic = cp.eta();
                const double area = (radius / p.net.L) * (radius / p.net.L);
                const double rel = std::abs(cp.eta() - area) / area;
                r.checks.push_back({def_.name + ":flux_identity@" + key_ + "=" + format_number(p.value), rel <= 0.05,
                                    "eta " + format_number(cp.eta()) + " vs area ratio " + format_number(area)});
            }
            if (uses_mc(m_.engine)) {
                const auto e = run_crossing(plan(p), p.net, radius);
                set_mc(pin, e.p_in);
                set_mc(pout, e.p_out);
                set_mc(pret, e.p_return);
                eta.mc = e.p_in.value / (e.p_in.value + e.p_out.value);
                add_gap_check(r, pout, 3.0 * e.p_out.std_error, "3 standard errors");
                add_gap_check(r, pin, 3.0 * e.p_in.std_error, "3 standard errors or 5% relative", 0.05);
            }
            for (auto* x : {&pin, &pout, &pret, &eta})
                r.rows.push_back(*x);
        }
    }

    void occupancy(RunResult& r)
    {
        std::vector<double> means, vars;
        for (const auto& p : points_) {
            Row mean = row(p, "mean"), var = row(p, "variance");
            if (uses_analytic(m_.engine)) {
                const auto cp = cache_.get(p.net, p.net.R);
                const auto mo = occupancy_moments(p.net.N, cp.p_in, cp.p_out);
                mean.analytic = mo.mean;
                var.analytic = mo.variance;
                means.push_back(mo.mean);
                vars.push_back(mo.variance);
            }
            if (uses_mc(m_.engine)) {
                auto pl = plan(p);
                if (p.variant == 0 && p.index == 0)
                    pl.trace = m_.trace;
                const auto e = run_occupancy(pl, p.net, p.net.R);
                set_mc(mean, e.mean);
                set_mc(var, e.variance);
                add_gap_check(r, mean, 3.0 * e.mean.std_error, "3 standard errors");
                add_gap_check(r, var, 3.0 * e.variance.std_error, "3 standard errors");
            }
            r.rows.push_back(mean);
            r.rows.push_back(var);
        }
        if (key_ == "delta") {
            add_variation_check(r, "R", "mean", means, 0.05);
            add_variation_check(r, "R", "variance", vars, 0.05);
        }
    }

    void interference(RunResult& r)
    {
        std::map<std::string, std::vector<double>> series;
        for (const auto& p : points_) {
            const bool live = def_.variants[p.variant].name == "live";
            Row rows[4] = {row(p, "csg_mean"), row(p, "csg_variance"), row(p, "osg_mean"), row(p, "osg_variance")};
            if (uses_analytic(m_.engine)) {
                const auto cp = cache_.get(p.net, p.net.R_I);
                auto net = p.net;
                net.cell_type = CellType::CSG;
                const auto c = total_moments(net, p.ch, cp);
                net.cell_type = CellType::OSG;
                const auto o = total_moments(net, p.ch, cp);
                const double v[4] = {c.mean, c.variance, o.mean, o.variance};
                for (int k = 0; k < 4; ++k) {
                    rows[k].analytic = v[k];
                    if (!live)
                        series[rows[k].metric].push_back(v[k]);
                }
            }
            if (uses_mc(m_.engine)) {
                double eta = -1.0;
                if (!live)
                    eta = cache_.get(p.net, p.net.R_I).eta();
                const auto e = run_interference(plan(p), p.net, p.ch,
                                                live ? InterfererSampling::live_mobility
                                                     : InterfererSampling::stationary_law,
                                                eta);
                const EstimateWithError* est[4] = {&e.csg_mean, &e.csg_variance, &e.osg_mean, &e.osg_variance};
                for (int k = 0; k < 4; ++k) {
                    set_mc(rows[k], *est[k]);
                    // the live version quantifies model error and is reported only
                    if (!live)
                        add_gap_check(r, rows[k], 3.0 * est[k]->std_error, "3 standard errors");
                }
                Row resampled = row(p, "csg_resampled_distances");
                resampled.mc = static_cast<double>(e.resampled_distances);
                r.rows.insert(r.rows.end(), std::begin(rows), std::end(rows));
                r.rows.push_back(resampled);
                continue;
            }
            r.rows.insert(r.rows.end(), std::begin(rows), std::end(rows));
        }
        if (key_ == "delta")
            for (const auto& [metric, values] : series)
                add_variation_check(r, "stationary", metric, values, 0.05);
    }

    void performance(RunResult& r)
    {
        const bool want_success = def_.kind != McScenario::rate;
        const bool want_rate = def_.kind != McScenario::success;
        const std::string rate_name = m_.rate_in_bits ? "rate_bits" : "rate";
        const double rate_scale = m_.rate_in_bits ? 1.0 / std::numbers::ln2 : 1.0;
        // Points that differ only in the query share one simulation.
        const bool query_sweep = key_ == "kappa" || key_ == "T_db";
        std::map<std::size_t, std::vector<SinrEstimate>> shared;
        std::map<std::size_t, std::vector<double>> success_series, rate_series;

        for (const auto& p : points_) {
            Row succ = row(p, "success"), rate = row(p, rate_name);
            if (uses_analytic(m_.engine)) {
                const auto cp = cache_.get(p.net, p.net.R_I);
                if (want_success)
                    succ.analytic = success_probability(p.query, p.net, p.ch, cp);
                if (want_rate)
                    rate.analytic = average_rate(p.query, p.net, p.ch, cp) * rate_scale;
                success_series[p.variant].push_back(succ.analytic.value_or(NAN));
                rate_series[p.variant].push_back(rate.analytic.value_or(NAN));
            }
            if (uses_mc(m_.engine)) {
                SinrEstimate e;
                const double eta = m_.sinr_sampling == InterfererSampling::stationary_law
                                       ? cache_.get(p.net, p.net.R_I).eta()
                                       : -1.0;
                if (query_sweep) {
                    if (!shared.count(p.variant)) {
                        std::vector<PerformanceQuery> qs;
                        for (const auto& o : points_)
                            if (o.variant == p.variant)
                                qs.push_back(o.query);
                        auto pl = plan(p);
                        pl.seed = derive_seed(m_.seed, p.variant * 4096);
                        shared[p.variant] = run_sinr(pl, p.net, p.ch, qs, m_.sinr_sampling, eta);
                    }
                    e = shared[p.variant][p.index];
                } else {
                    const std::vector<PerformanceQuery> qs{p.query};
                    e = run_sinr(plan(p), p.net, p.ch, qs, m_.sinr_sampling, eta).front();
                }
                if (want_success) {
                    set_mc(succ, e.success);
                    add_gap_check(r, succ, 0.03, "0.03 absolute");
                }
                if (want_rate) {
                    rate.mc = e.rate.value * rate_scale;
                    rate.std_error = e.rate.std_error * rate_scale;
                    add_gap_check(r, rate, 3.0 * *rate.std_error, "3 standard errors");
                }
            }
            if (want_success)
                r.rows.push_back(succ);
            if (want_rate)
                r.rows.push_back(rate);
        }

        if (def_.kind == McScenario::density_sweep && key_ == "N" && uses_analytic(m_.engine)) {
            for (std::size_t v = 0; v < def_.variants.size(); ++v) {
                auto decreasing = [](const std::vector<double>& s) {
                    for (std::size_t i = 1; i < s.size(); ++i)
                        if (!(s[i] < s[i - 1]))
                            return false;
                    return true;
                };
                const auto& name = def_.variants[v].name;
                r.checks.push_back({def_.name + ":" + name + ":success:decreasing", decreasing(success_series[v]),
                                    "success probability strictly decreasing in N"});
                r.checks.push_back({def_.name + ":" + name + ":rate:decreasing", decreasing(rate_series[v]),
                                    "average rate strictly decreasing in N"});
            }
        }
    }

    const RunManifest& m_;
    const ScenarioDef& def_;
    std::string key_;
    std::vector<double> values_;
    std::uint64_t steps_ = 0;
    std::uint64_t warmup_ = 0;
    std::vector<Point> points_;
    CrossingCache cache_;
};

} // namespace detail

/// Runs one manifest. Throws ConfigError, quad::QuadratureError, BudgetError
/// or UsageError on failure.
inline RunResult run(const RunManifest& manifest)
{
    const auto& def = find_scenario(manifest.scenario);
    RunResult r = detail::Runner(manifest, def).run();
    r.warnings.insert(r.warnings.begin(), manifest.config.warnings.begin(), manifest.config.warnings.end());
    return r;
}

} // namespace hetmob::scenarios
