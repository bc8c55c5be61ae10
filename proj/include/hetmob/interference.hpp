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

// Uplink interference from macro users at a small-cell base station placed
// at the center of the disk of interest. A CSG cell hears every macro user
// within R_I (distance support [1, R_I]); an OSG cell hears only those in the
// ring R < d < R_I. One interferer contributes gamma * P_t_m * d^-beta.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "crossing.hpp"
#include "occupancy.hpp"
#include "quadrature.hpp"

namespace hetmob {

/// Smallest interferer distance of the CSG distance law.
inline constexpr double kCsgMinDistance = 1.0;

struct InterfererMoments
{
    double first = 0.0;  ///< [W]
    double second = 0.0; ///< [W^2]
    CellType cell_type = CellType::CSG;
};

/// Support [inner, outer] of the interferer distance for the given access mode.
struct DistanceSupport
{
    double inner;
    double outer;
};

inline DistanceSupport interferer_support(CellType cell, double R, double R_I)
{
    return cell == CellType::CSG ? DistanceSupport{kCsgMinDistance, R_I} : DistanceSupport{R, R_I};
}

/// integral_a^b y^(1-p) dy, continuous through p = 2.
inline double radial_power_integral(double a, double b, double p)
{
    const double lr = std::log(b / a);
    return std::pow(a, 2.0 - p) * lr * detail::expm1_ratio((2.0 - p) * lr);
}

/// E[d^-p] for d with density 2d / (b^2 - a^2) on [a, b].
inline double inverse_distance_moment(double a, double b, double p)
{
    return 2.0 * radial_power_integral(a, b, p) / ((b - a) * (b + a));
}

/// mu_c, mu_c^(2): moments of one interferer uniform on the disk [1, R_I].
inline InterfererMoments csg_interferer_moments(const ChannelConfig& ch, double R_I)
{
    if (!(R_I > kCsgMinDistance))
        throw std::domain_error("csg_interferer_moments: R_I must exceed 1 m");
    return {ch.P_t_m * ch.P_gamma * inverse_distance_moment(1.0, R_I, ch.beta),
            ch.P_t_m * ch.P_t_m * ch.P_gamma2 * inverse_distance_moment(1.0, R_I, 2.0 * ch.beta), CellType::CSG};
}

/// nu_o, nu_o^(2): moments of one interferer uniform on the ring [R, R_I].
inline InterfererMoments osg_interferer_moments(const ChannelConfig& ch, double R, double R_I)
{
    if (!(R >= 1.0 && R < R_I))
        throw std::domain_error("osg_interferer_moments: require 1 <= R < R_I");
    return {ch.P_t_m * ch.P_gamma * inverse_distance_moment(R, R_I, ch.beta),
            ch.P_t_m * ch.P_t_m * ch.P_gamma2 * inverse_distance_moment(R, R_I, 2.0 * ch.beta), CellType::OSG};
}

inline InterfererMoments interferer_moments(const ChannelConfig& ch, CellType cell, double R, double R_I)
{
    return cell == CellType::CSG ? csg_interferer_moments(ch, R_I) : osg_interferer_moments(ch, R, R_I);
}

/// Gamma law matched to (P_gamma, P_gamma2): shape k and scale theta.
/// Rayleigh is shape 1; P_gamma2 == P_gamma^2 is the deterministic limit (shape = inf).
struct GainLaw
{
    double shape;
    double scale;
    bool deterministic() const { return !std::isfinite(shape); }
};

inline GainLaw gain_law(const ChannelConfig& ch)
{
    const double var = ch.P_gamma2 - ch.P_gamma * ch.P_gamma;
    if (var <= 1e-12 * ch.P_gamma * ch.P_gamma)
        return {std::numeric_limits<double>::infinity(), 0.0};
    return {ch.P_gamma * ch.P_gamma / var, var / ch.P_gamma};
}

/// MGF argument at which one interferer's MGF diverges (+inf for a deterministic gain).
inline double mgf_pole(const ChannelConfig& ch, CellType cell, double R, double R_I)
{
    const auto sup = interferer_support(cell, R, R_I);
    const auto law = gain_law(ch);
    if (law.deterministic())
        return std::numeric_limits<double>::infinity();
    return std::pow(sup.inner, ch.beta) / (ch.P_t_m * law.scale);
}

namespace detail {

inline void check_mgf_argument(double s, double pole)
{
    if (!(s < pole) || std::isnan(s))
        throw std::domain_error("interferer MGF: argument s = " + std::to_string(s) +
                                " is at or beyond the pole " + std::to_string(pole));
}

// Rayleigh: E[exp(s gamma P d^-beta) | d] = d^beta / (d^beta - c), c = s P P_gamma.
inline double rayleigh_mgf_quadrature(double s, const ChannelConfig& ch, double a, double b)
{
    const double c = s * ch.P_t_m * ch.P_gamma;
    auto f = [&](double y) { return y / (std::pow(y, ch.beta) - c); };
    const auto r = quad::integrate_or_throw(f, {a, b}, {1e-15, 1e-13, 4000}, "interferer_mgf (radial)");
    return 1.0 + 2.0 * c * r.value / ((b - a) * (b + a));
}

inline double rayleigh_mgf_beta2(double c, double a, double b)
{
    const double a2 = a * a, b2 = b * b;
    return 1.0 + c / ((b - a) * (b + a)) * std::log1p((b2 - a2) / (a2 - c));
}

inline double rayleigh_mgf_beta4(double c, double a, double b)
{
    const double a2 = a * a, b2 = b * b, span = (b - a) * (b + a);
    if (c == 0.0)
        return 1.0;
    if (c < 0.0) {
        // integral y / (y^4 + k^2) = atan(y^2 / k) / (2k); atan difference taken in one step.
        const double k = std::sqrt(-c);
        return 1.0 - k / span * std::atan(k * (b2 - a2) / (k * k + a2 * b2));
    }
    const double k = std::sqrt(c);
    return 1.0 + k / (2.0 * span) * std::log(((b2 - k) * (a2 + k)) / ((b2 + k) * (a2 - k)));
}

// Gamma(k, theta) gain: E[exp(s gamma P d^-beta) | d] = (1 - s theta P d^-beta)^-k.
inline double general_gain_mgf(double s, const ChannelConfig& ch, double a, double b)
{
    const auto law = gain_law(ch);
    auto f = [&](double y) {
        const double x = s * ch.P_t_m * std::pow(y, -ch.beta);
        const double cond =
            law.deterministic() ? std::exp(x * ch.P_gamma) : std::exp(-law.shape * std::log1p(-law.scale * x));
        return 2.0 * y * cond;
    };
    const auto r = quad::integrate_or_throw(f, {a, b}, {1e-13, 1e-12, 4000}, "interferer_mgf (gain law)");
    return r.value / ((b - a) * (b + a));
}

} // namespace detail

/// Radial-quadrature evaluation of one interferer's MGF, any beta.
inline double interferer_mgf_quadrature(double s, const ChannelConfig& ch, CellType cell, double R, double R_I)
{
    const auto sup = interferer_support(cell, R, R_I);
    detail::check_mgf_argument(s, mgf_pole(ch, cell, R, R_I));
    if (s == 0.0)
        return 1.0;
    if (!ch.is_rayleigh())
        return detail::general_gain_mgf(s, ch, sup.inner, sup.outer);
    return detail::rayleigh_mgf_quadrature(s, ch, sup.inner, sup.outer);
}

/// E[exp(s I_j)] for one interferer. Closed forms for Rayleigh fading at
/// beta = 2 and beta = 4, quadrature otherwise. Defined for s below the pole
/// returned by mgf_pole (Laplace-domain use has s <= 0).
inline double interferer_mgf(double s, const ChannelConfig& ch, CellType cell, double R, double R_I)
{
    const auto sup = interferer_support(cell, R, R_I);
    detail::check_mgf_argument(s, mgf_pole(ch, cell, R, R_I));
    if (s == 0.0)
        return 1.0;
    if (!ch.is_rayleigh())
        return detail::general_gain_mgf(s, ch, sup.inner, sup.outer);
    const double c = s * ch.P_t_m * ch.P_gamma;
    if (ch.beta == 2.0)
        return detail::rayleigh_mgf_beta2(c, sup.inner, sup.outer);
    if (ch.beta == 4.0)
        return detail::rayleigh_mgf_beta4(c, sup.inner, sup.outer);
    return detail::rayleigh_mgf_quadrature(s, ch, sup.inner, sup.outer);
}

struct TotalMoments
{
    double mean = 0.0;     ///< [W]
    double variance = 0.0; ///< [W^2]
};

/// Interference seen by the small cell: occupancy of the R_I disk composed
/// with the per-interferer law (ring-thinned with q = 1 - R^2/R_I^2 for OSG).
class InterferenceModel
{
public:
    /// `at_RI` holds the crossing probabilities of the R_I disk.
    InterferenceModel(const NetworkConfig& net, const ChannelConfig& ch, const CrossingProbabilities& at_RI)
        : net_(net), ch_(ch), p_in_(at_RI.p_in), p_out_(at_RI.p_out),
          moments_(interferer_moments(ch, net.cell_type, net.R, net.R_I))
    {
        detail::check_probabilities(p_in_, p_out_);
    }

    InterferenceModel(const NetworkConfig& net, const ChannelConfig& ch)
        : InterferenceModel(net, ch, crossing_probabilities(net, net.R_I))
    {
    }

    CellType cell_type() const { return net_.cell_type; }
    double p_in() const { return p_in_; }
    double p_out() const { return p_out_; }
    double eta() const { return stationary_fraction(p_in_, p_out_); }

    /// Fraction of R_I-disk occupants that interfere.
    double q() const { return net_.cell_type == CellType::CSG ? 1.0 : 1.0 - (net_.R / net_.R_I) * (net_.R / net_.R_I); }

    const InterfererMoments& per_interferer() const { return moments_; }

    double per_interferer_mgf(double s) const { return interferer_mgf(s, ch_, net_.cell_type, net_.R, net_.R_I); }

    double pole() const { return mgf_pole(ch_, net_.cell_type, net_.R, net_.R_I); }

    /// PGF of the occupancy evaluated at q G_j(s) + 1 - q.
    double total_mgf(double s) const
    {
        if (s == 0.0 || net_.N == 0)
            return 1.0;
        const double g = per_interferer_mgf(s);
        return std::exp(static_cast<double>(net_.N) * std::log1p(eta() * q() * (g - 1.0)));
    }

    TotalMoments moments() const
    {
        const double n = static_cast<double>(net_.N);
        const double w = eta() * q();
        const double m1 = moments_.first;
        return {n * w * m1, n * w * moments_.second - n * w * w * m1 * m1};
    }

private:
    NetworkConfig net_;
    ChannelConfig ch_;
    double p_in_;
    double p_out_;
    InterfererMoments moments_;
};

inline double total_mgf(double s, const NetworkConfig& net, const ChannelConfig& ch, const CrossingProbabilities& at_RI)
{
    return InterferenceModel(net, ch, at_RI).total_mgf(s);
}

inline TotalMoments total_moments(const NetworkConfig& net, const ChannelConfig& ch, const CrossingProbabilities& at_RI)
{
    return InterferenceModel(net, ch, at_RI).moments();
}

inline TotalMoments total_moments(const NetworkConfig& net, const ChannelConfig& ch)
{
    return total_moments(net, ch, crossing_probabilities(net, net.R_I));
}

} // namespace hetmob
