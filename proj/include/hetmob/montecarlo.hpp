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

// Monte Carlo estimators for the crossing, occupancy, interference and SINR
// models. The small-cell base station sits at the macro-cell center; every
// replication owns the random stream (seed, replication index) and standard
// errors are taken over replication means.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "config.hpp"
#include "mobility.hpp"
#include "occupancy.hpp"
#include "performance.hpp"
#include "random.hpp"

namespace hetmob {

enum class McScenario { crossing, occupancy, interference, success, rate, density_sweep };

inline constexpr McScenario kAllScenarios[] = {McScenario::crossing, McScenario::occupancy,
                                               McScenario::interference, McScenario::success,
                                               McScenario::rate, McScenario::density_sweep};

inline std::string_view to_string(McScenario s)
{
    switch (s) {
    case McScenario::crossing: return "crossing";
    case McScenario::occupancy: return "occupancy";
    case McScenario::interference: return "interference";
    case McScenario::success: return "success";
    case McScenario::rate: return "rate";
    case McScenario::density_sweep: return "density_sweep";
    }
    return "?";
}

/// How interferer positions are produced.
enum class InterfererSampling
{
    live_mobility,  ///< a population of N users moving by Levy flights
    stationary_law, ///< xi ~ Binomial(N, eta), positions uniform in the R_I disk, redrawn every step
};

struct ExperimentPlan
{
    McScenario scenario = McScenario::crossing;
    std::uint64_t replications = 8;
    std::uint64_t steps_per_replication = 100000; ///< includes the warmup steps
    std::uint64_t warmup_steps = 1000;
    std::uint64_t seed = 1;
    std::string sweep_key;
    std::vector<double> sweep_values;
    unsigned threads = 1;
    std::uint64_t histogram_stride = 1; ///< record every k-th step in occupancy histograms
    std::ostream* trace = nullptr;      ///< per-step positions of replication 0, if set
};

struct EstimateWithError
{
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t sample_count = 0;
};

inline void check_plan(const ExperimentPlan& plan)
{
    if (plan.replications < 1)
        throw std::invalid_argument("experiment plan: replications must be at least 1");
    if (plan.steps_per_replication > 0 && plan.warmup_steps >= plan.steps_per_replication)
        throw std::invalid_argument("experiment plan: warmup_steps must be below steps_per_replication");
    if (plan.histogram_stride < 1)
        throw std::invalid_argument("experiment plan: histogram_stride must be at least 1");
}

/// Mean of per-replication values with the standard error of that mean.
/// A single replication has an unknown (infinite) standard error.
inline EstimateWithError summarize(std::span<const double> replication_values, std::uint64_t sample_count)
{
    EstimateWithError e;
    e.sample_count = sample_count;
    const auto n = replication_values.size();
    if (n == 0)
        return e;
    double sum = 0.0;
    for (double v : replication_values)
        sum += v;
    e.value = sum / static_cast<double>(n);
    if (n < 2) {
        e.std_error = std::numeric_limits<double>::infinity();
        return e;
    }
    double ss = 0.0;
    for (double v : replication_values)
        ss += (v - e.value) * (v - e.value);
    e.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return e;
}

namespace detail {

/// Runs body(rep) for every replication on up to `threads` workers. Results
/// must be written to per-replication slots, so output does not depend on
/// the worker count.
template <class Body>
void for_each_replication(const ExperimentPlan& plan, Body body)
{
    const std::uint64_t reps = plan.replications;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, plan.threads), reps));
    if (workers == 1) {
        for (std::uint64_t r = 0; r < reps; ++r)
            body(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t r; (r = next++) < reps;)
                    body(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

struct CrossingEstimate
{
    EstimateWithError p_in;
    EstimateWithError p_out;
    EstimateWithError p_return; ///< start inside, leave the disk and the macro cell, end inside
};

/// Independent single-flight trials: per replication, steps_per_replication
/// flights start uniformly inside the disk (p_out) and as many start
/// uniformly in the macro cell outside it (p_in). Membership is judged at
/// flight end.
inline CrossingEstimate run_crossing(const ExperimentPlan& plan, const NetworkConfig& cfg, double radius)
{
    check_plan(plan);
    if (!(radius > 0.0 && radius < cfg.L))
        throw std::domain_error("run_crossing: disk radius must satisfy 0 < radius < L");
    CrossingEstimate out;
    const std::uint64_t n = plan.steps_per_replication;
    if (n == 0)
        return out;
    std::vector<double> pin(plan.replications), pout(plan.replications), pret(plan.replications);
    detail::for_each_replication(plan, [&](std::uint64_t rep) {
        RandomStream rng(plan.seed, rep);
        std::uint64_t left = 0, back = 0, entered = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto start = sample_uniform_disk(rng, radius);
            const auto f = sample_flight(rng, cfg.alpha, cfg.delta);
            const auto end = apply_flight(start, f, cfg.L);
            if (end.rho >= radius) {
                ++left;
            } else if (flight_geometry(start, f, cfg.L).m >= 0.0) {
                ++back; // a straight flight leaving a disk cannot re-enter it without wrapping
            }
        }
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto start = sample_uniform_annulus(rng, radius, cfg.L);
            const auto end = apply_flight(start, sample_flight(rng, cfg.alpha, cfg.delta), cfg.L);
            if (end.rho < radius)
                ++entered;
        }
        const double dn = static_cast<double>(n);
        pout[rep] = left / dn;
        pret[rep] = back / dn;
        pin[rep] = entered / dn;
    });
    const auto total = n * plan.replications;
    return {summarize(pin, total), summarize(pout, total), summarize(pret, total)};
}

struct OccupancyEstimate
{
    EstimateWithError mean;
    EstimateWithError variance;
    std::vector<std::uint64_t> histogram; ///< counts of the in-disk user number, index 0..N
    std::uint64_t histogram_samples = 0;
};

/// Live population of N users started uniform; after warmup, the number of
/// users inside the disk is recorded every step.
inline OccupancyEstimate run_occupancy(const ExperimentPlan& plan, const NetworkConfig& cfg, double radius)
{
    check_plan(plan);
    OccupancyEstimate out;
    out.histogram.assign(static_cast<std::size_t>(cfg.N) + 1, 0);
    if (plan.steps_per_replication == 0)
        return out;
    const std::uint64_t measured = plan.steps_per_replication - plan.warmup_steps;
    std::vector<double> means(plan.replications), vars(plan.replications);
    std::vector<std::vector<std::uint64_t>> hists(plan.replications);
    detail::for_each_replication(plan, [&](std::uint64_t rep) {
        RandomStream rng(plan.seed, rep);
        auto users = uniform_population(static_cast<std::size_t>(cfg.N), cfg.L, rng);
        auto& hist = hists[rep];
        hist.assign(static_cast<std::size_t>(cfg.N) + 1, 0);
        double s1 = 0.0, s2 = 0.0;
        for (std::uint64_t step = 0; step < plan.steps_per_replication; ++step) {
            advance_population(users, cfg.L, cfg.alpha, cfg.delta, rng);
            if (rep == 0 && plan.trace)
                write_trace(*plan.trace, step, users);
            if (step < plan.warmup_steps)
                continue;
            std::uint64_t k = 0;
            for (const auto& u : users)
                k += u.rho < radius;
            s1 += static_cast<double>(k);
            s2 += static_cast<double>(k) * static_cast<double>(k);
            if ((step - plan.warmup_steps) % plan.histogram_stride == 0)
                ++hist[k];
        }
        const double m = s1 / static_cast<double>(measured);
        means[rep] = m;
        vars[rep] = s2 / static_cast<double>(measured) - m * m;
    });
    for (const auto& h : hists)
        for (std::size_t k = 0; k < h.size(); ++k) {
            out.histogram[k] += h[k];
            out.histogram_samples += h[k];
        }
    const auto total = measured * plan.replications;
    out.mean = summarize(means, total);
    out.variance = summarize(vars, total);
    return out;
}

/// Pearson chi-square of an integer histogram against Binomial(N, p). Cells
/// are merged from both tails until each expects at least `min_expected`.
inline ChiSquareResult binomial_histogram_test(std::span<const std::uint64_t> histogram, std::uint64_t N, double p,
                                               double min_expected = 5.0)
{
    double total = 0.0;
    for (auto c : histogram)
        total += static_cast<double>(c);
    if (total <= 0.0)
        throw std::invalid_argument("binomial_histogram_test: empty histogram");
    std::vector<double> obs, exp;
    double o = 0.0, e = 0.0;
    for (std::uint64_t k = 0; k <= N; ++k) {
        o += k < histogram.size() ? static_cast<double>(histogram[k]) : 0.0;
        e += total * detail::binomial_pmf(N, k, p);
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = e = 0.0;
        }
    }
    if (!exp.empty()) { // fold the short upper tail into the last cell
        obs.back() += o;
        exp.back() += e;
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < obs.size(); ++i)
        r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    r.dof = static_cast<double>(obs.size()) - 1.0;
    r.p_value = chi_square_p_value(r.statistic, r.dof);
    return r;
}

/// Instantaneous interference at the disk center from one snapshot.
struct InterferenceSample
{
    double csg = 0.0;
    double osg = 0.0;
};

namespace detail {

/// Sums gamma P_t_m d^-beta over interferers. CSG distances below 1 m are
/// redrawn from the CSG distance law (uniform on the [1, R_I] annulus).
class InterferenceAccumulator
{
public:
    InterferenceAccumulator(const NetworkConfig& net, const ChannelConfig& ch) : net_(net), ch_(ch) {}

    void add(double d, RandomStream& rng, InterferenceSample& s)
    {
        if (d >= net_.R_I)
            return;
        const double g = ch_.P_t_m * draw_gain(rng);
        if (d > net_.R)
            s.osg += g * std::pow(d, -ch_.beta);
        if (d < kCsgMinDistance) {
            d = sample_uniform_annulus(rng, kCsgMinDistance, net_.R_I).rho;
            ++resampled_;
        }
        s.csg += g * std::pow(d, -ch_.beta);
    }

    double draw_gain(RandomStream& rng)
    {
        if (ch_.is_rayleigh())
            return rng.exponential(ch_.P_gamma);
        const auto law = gain_law(ch_);
        if (law.deterministic())
            return ch_.P_gamma;
        return std::gamma_distribution<double>(law.shape, law.scale)(rng);
    }

    std::uint64_t resampled() const { return resampled_; }

private:
    NetworkConfig net_;
    ChannelConfig ch_;
    std::uint64_t resampled_ = 0;
};

/// Yields one interference snapshot per step in either sampling mode.
class InterferenceSource
{
public:
    InterferenceSource(const NetworkConfig& net, const ChannelConfig& ch, InterfererSampling mode, double eta,
                       RandomStream& rng)
        : net_(net), mode_(mode), eta_(eta), acc_(net, ch), rng_(rng)
    {
        if (mode_ == InterfererSampling::live_mobility)
            users_ = uniform_population(static_cast<std::size_t>(net.N), net.L, rng_);
    }

    void advance()
    {
        if (mode_ == InterfererSampling::live_mobility)
            advance_population(users_, net_.L, net_.alpha, net_.delta, rng_);
    }

    InterferenceSample sample()
    {
        InterferenceSample s;
        if (mode_ == InterfererSampling::live_mobility) {
            for (const auto& u : users_)
                acc_.add(u.rho, rng_, s);
            return s;
        }
        std::binomial_distribution<std::uint64_t> count(net_.N, eta_);
        const auto xi = count(rng_);
        for (std::uint64_t j = 0; j < xi; ++j)
            acc_.add(net_.R_I * std::sqrt(rng_.uniform_co()), rng_, s);
        return s;
    }

    const std::vector<PolarPosition>& users() const { return users_; }
    std::uint64_t resampled() const { return acc_.resampled(); }
    RandomStream& rng() { return rng_; }

private:
    NetworkConfig net_;
    InterfererSampling mode_;
    double eta_;
    InterferenceAccumulator acc_;
    RandomStream& rng_;
    std::vector<PolarPosition> users_;
};

} // namespace detail

struct InterferenceEstimate
{
    EstimateWithError csg_mean;
    EstimateWithError csg_variance;
    EstimateWithError osg_mean;
    EstimateWithError osg_variance;
    std::uint64_t resampled_distances = 0; ///< CSG distances below 1 m that were redrawn
};

/// Interference at the small-cell base station for both access modes from the
/// same interferer snapshots. In stationary_law mode the occupancy fraction is
/// `eta` (pass a negative value to use the area ratio R_I^2 / L^2).
inline InterferenceEstimate run_interference(const ExperimentPlan& plan, const NetworkConfig& cfg,
                                             const ChannelConfig& ch,
                                             InterfererSampling mode = InterfererSampling::live_mobility,
                                             double eta = -1.0)
{
    check_plan(plan);
    InterferenceEstimate out;
    if (plan.steps_per_replication == 0)
        return out;
    if (eta < 0.0)
        eta = (cfg.R_I / cfg.L) * (cfg.R_I / cfg.L);
    const std::uint64_t measured = plan.steps_per_replication - plan.warmup_steps;
    const std::size_t R = plan.replications;
    std::vector<double> cm(R), cv(R), om(R), ov(R);
    std::vector<std::uint64_t> resampled(R);
    detail::for_each_replication(plan, [&](std::uint64_t rep) {
        RandomStream rng(plan.seed, rep);
        detail::InterferenceSource src(cfg, ch, mode, eta, rng);
        double c1 = 0, c2 = 0, o1 = 0, o2 = 0;
        for (std::uint64_t step = 0; step < plan.steps_per_replication; ++step) {
            src.advance();
            if (step < plan.warmup_steps)
                continue;
            const auto s = src.sample();
            c1 += s.csg;
            c2 += s.csg * s.csg;
            o1 += s.osg;
            o2 += s.osg * s.osg;
        }
        const double n = static_cast<double>(measured);
        cm[rep] = c1 / n;
        cv[rep] = c2 / n - cm[rep] * cm[rep];
        om[rep] = o1 / n;
        ov[rep] = o2 / n - om[rep] * om[rep];
        resampled[rep] = src.resampled();
    });
    const auto total = measured * plan.replications;
    out.csg_mean = summarize(cm, total);
    out.csg_variance = summarize(cv, total);
    out.osg_mean = summarize(om, total);
    out.osg_variance = summarize(ov, total);
    for (auto r : resampled)
        out.resampled_distances += r;
    return out;
}

struct SinrEstimate
{
    EstimateWithError success;
    EstimateWithError rate; ///< [nats/s]
};

/// SINR of a home user for every query from shared interference snapshots:
/// per step and query, a fresh Rayleigh signal gain, SINR against the
/// interference of the query's access mode plus noise, the success indicator
/// and W ln(1 + SINR).
inline std::vector<SinrEstimate> run_sinr(const ExperimentPlan& plan, const NetworkConfig& cfg,
                                          const ChannelConfig& ch, std::span<const PerformanceQuery> queries,
                                          InterfererSampling mode = InterfererSampling::live_mobility,
                                          double eta = -1.0)
{
    check_plan(plan);
    for (const auto& q : queries)
        check_query(q, cfg);
    std::vector<SinrEstimate> out(queries.size());
    if (plan.steps_per_replication == 0)
        return out;
    if (eta < 0.0)
        eta = (cfg.R_I / cfg.L) * (cfg.R_I / cfg.L);
    const std::uint64_t measured = plan.steps_per_replication - plan.warmup_steps;
    const std::size_t R = plan.replications, Q = queries.size();
    std::vector<double> succ(R * Q), rate(R * Q);
    std::vector<double> mean_signal(Q);
    for (std::size_t i = 0; i < Q; ++i)
        mean_signal[i] = ch.P_t_h / std::pow(queries[i].kappa * cfg.R, ch.beta);
    const double Pn = ch.noise_power();
    detail::for_each_replication(plan, [&](std::uint64_t rep) {
        RandomStream rng(plan.seed, rep);
        detail::InterferenceSource src(cfg, ch, mode, eta, rng);
        std::vector<double> s_acc(Q, 0.0), r_acc(Q, 0.0);
        for (std::uint64_t step = 0; step < plan.steps_per_replication; ++step) {
            src.advance();
            if (step < plan.warmup_steps)
                continue;
            const auto I = src.sample();
            for (std::size_t i = 0; i < Q; ++i) {
                const double interference = queries[i].cell_type == CellType::CSG ? I.csg : I.osg;
                const double sinr = rng.exponential(ch.P_gamma) * mean_signal[i] / (interference + Pn);
                s_acc[i] += sinr >= queries[i].T;
                r_acc[i] += ch.W * std::log1p(sinr);
            }
        }
        for (std::size_t i = 0; i < Q; ++i) {
            succ[rep * Q + i] = s_acc[i] / static_cast<double>(measured);
            rate[rep * Q + i] = r_acc[i] / static_cast<double>(measured);
        }
    });
    const auto total = measured * plan.replications;
    std::vector<double> col(R);
    for (std::size_t i = 0; i < Q; ++i) {
        for (std::size_t r = 0; r < R; ++r)
            col[r] = succ[r * Q + i];
        out[i].success = summarize(col, total);
        for (std::size_t r = 0; r < R; ++r)
            col[r] = rate[r * Q + i];
        out[i].rate = summarize(col, total);
    }
    return out;
}

} // namespace hetmob
