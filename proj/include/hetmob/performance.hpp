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
#include <numbers>
#include <stdexcept>
#include <vector>

#include "config.hpp"
#include "interference.hpp"
#include "quadrature.hpp"

namespace hetmob {

/// Home user at distance kappa * R from its base station, SINR threshold T (linear).
struct PerformanceQuery
{
    double kappa = 0.9;
    double T = 1e-6;
    CellType cell_type = CellType::CSG;
};

struct MetricResult
{
    double success_probability = 0.0;
    double average_rate = 0.0; ///< [nats/s]
    double quadrature_error = 0.0;
};

inline void check_query(const PerformanceQuery& q, const NetworkConfig& net)
{
    if (!(q.kappa > 1.0 / net.R && q.kappa <= 1.0))
        throw std::domain_error("performance: kappa must lie in (1/R, 1]");
    if (!(q.T > 0.0))
        throw std::domain_error("performance: threshold T must be positive");
}

namespace detail {

inline void require_rayleigh(const ChannelConfig& ch)
{
    if (!ch.is_rayleigh())
        throw std::domain_error("performance metrics assume Rayleigh fading (P_gamma2 = 2 P_gamma^2)");
}

inline NetworkConfig with_cell(NetworkConfig net, CellType t)
{
    net.cell_type = t;
    return net;
}

} // namespace detail

/// kappa^beta R^beta / (P_t_h P_gamma): inverse mean received signal power.
inline double signal_scale(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch)
{
    return std::pow(q.kappa * net.R, ch.beta) / (ch.P_t_h * ch.P_gamma);
}

/// Pr{SINR >= T} = exp(-a P_n T) G_I(-a T), a = signal_scale.
inline double success_probability(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch,
                                  const CrossingProbabilities& at_RI)
{
    check_query(q, net);
    detail::require_rayleigh(ch);
    const double a = signal_scale(q, net, ch);
    const InterferenceModel model(detail::with_cell(net, q.cell_type), ch, at_RI);
    return std::exp(-a * ch.noise_power() * q.T) * model.total_mgf(-a * q.T);
}

inline double success_probability(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch)
{
    return success_probability(q, net, ch, crossing_probabilities(net, net.R_I));
}

struct RateValue
{
    double value = 0.0; ///< [nats/s]
    double abs_error = 0.0;
};

/// E[W ln(1 + SINR)] = W integral_0^inf exp(-P_n x) G_I(-x) / (a + x) dx.
///
/// The integrand varies on the scales a, 1/P_n, 1/E[I] and the single
/// interferer scale, which can be many decades apart, so the integral is
/// taken over log x with each scale as a breakpoint. The upper cut sits where
/// P_n x = t, with t grown until the dropped tail exp(-t)/t is below 1e-9 of
/// the total.
inline RateValue average_rate_detail(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch,
                                     const CrossingProbabilities& at_RI)
{
    check_query(q, net);
    detail::require_rayleigh(ch);
    if (ch.W == 0.0)
        return {};
    const double Pn = ch.noise_power();
    if (!(Pn > 0.0))
        throw std::domain_error("average_rate: noise power W * N0 must be positive");
    const double a = signal_scale(q, net, ch);
    const InterferenceModel model(detail::with_cell(net, q.cell_type), ch, at_RI);

    auto f = [&](double x) { return std::exp(-Pn * x) * model.total_mgf(-x) / (a + x); };
    auto g = [&](double v) {
        const double x = std::exp(v);
        return x * f(x);
    };

    std::vector<double> scales{a, 1.0 / Pn};
    if (const double m = model.moments().mean; m > 0.0)
        scales.push_back(1.0 / m);
    if (const double p = model.pole(); std::isfinite(p))
        scales.push_back(p);
    const double x0 = 1e-6 * *std::min_element(scales.begin(), scales.end());
    const quad::Tolerance tol{1e-14, 1e-10, 8000};
    const auto head = quad::integrate_or_throw(f, {0.0, x0}, tol, "average_rate (head)");

    double t = 25.0;
    for (;;) {
        const double v_end = std::log(t / Pn);
        std::vector<double> edges{std::log(x0)};
        for (double sc : scales)
            if (std::log(sc) > edges.front() && std::log(sc) < v_end)
                edges.push_back(std::log(sc));
        edges.push_back(v_end);
        const auto body = quad::integrate_or_throw(g, std::move(edges), tol, "average_rate (body)");
        const double total = head.value + body.value;
        const double tail = std::exp(-t) / t;
        if (tail <= 1e-9 * total || t > 700.0)
            return {ch.W * total, ch.W * (head.abs_error + body.abs_error + tail)};
        t *= 2.0;
    }
}

inline double average_rate(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch,
                           const CrossingProbabilities& at_RI)
{
    return average_rate_detail(q, net, ch, at_RI).value;
}

inline double average_rate(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch)
{
    return average_rate(q, net, ch, crossing_probabilities(net, net.R_I));
}

inline MetricResult evaluate_metrics(const PerformanceQuery& q, const NetworkConfig& net, const ChannelConfig& ch,
                                     const CrossingProbabilities& at_RI)
{
    const auto rate = average_rate_detail(q, net, ch, at_RI);
    return {success_probability(q, net, ch, at_RI), rate.value, rate.abs_error};
}

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

} // namespace hetmob
