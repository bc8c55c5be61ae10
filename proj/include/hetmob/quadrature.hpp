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
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hetmob::quad {

class QuadratureError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Tolerance
{
    double abs = 1e-9;
    double rel = 1e-6;
    std::size_t max_panels = 4000;
};

struct Result
{
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t panels = 0;
    bool converged = true;
};

namespace detail {

struct Panel
{
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel apply_rule(const F& f, double a, double b)
{
    // max_depth = 0 evaluates the bare 15-point Kronrod rule. Boost reports the
    // error on the reference interval [-1, 1], so rescale it to [a, b].
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err * std::abs(b - a) / 2.0};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over the panels
/// delimited by `breakpoints` (sorted, at least two entries). Panels with the
/// largest error are bisected until error <= max(abs, rel*|I|) or the panel
/// budget is exhausted, in which case `converged` is false.
template <class F>
Result integrate(const F& f, std::vector<double> breakpoints, const Tolerance& tol = {})
{
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    Result r;
    if (breakpoints.size() < 2)
        return r;

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto p = detail::apply_rule(f, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        error += p.error;
        heap.push(p);
    }

    while (error > std::max(tol.abs, tol.rel * std::abs(total)) && heap.size() < tol.max_panels) {
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break; // interval exhausted at machine precision
        heap.pop();
        auto left = detail::apply_rule(f, worst.a, mid);
        auto right = detail::apply_rule(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed accumulated cancellation from the running updates.
    total = 0.0;
    error = 0.0;
    r.panels = heap.size();
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.abs_error = error;
    r.converged = error <= std::max(tol.abs, tol.rel * std::abs(total));
    return r;
}

template <class F>
Result integrate(const F& f, double a, double b, const Tolerance& tol = {})
{
    return integrate(f, std::vector<double>{a, b}, tol);
}

/// Like integrate() but throws QuadratureError when the tolerance is not met.
template <class F>
Result integrate_or_throw(const F& f, std::vector<double> breakpoints, const Tolerance& tol,
                          const char* what)
{
    auto r = integrate(f, std::move(breakpoints), tol);
    if (!r.converged)
        throw QuadratureError(std::string(what) + ": quadrature did not converge (error estimate " +
                              std::to_string(r.abs_error) + ", value " + std::to_string(r.value) + ")");
    return r;
}

/// Keeps only breakpoints strictly inside (lo, hi) and brackets them with lo, hi.
inline std::vector<double> panel_edges(double lo, double hi, std::initializer_list<double> interior)
{
    std::vector<double> v{lo};
    for (double x : interior)
        if (x > lo && x < hi)
            v.push_back(x);
    v.push_back(hi);
    return v;
}

} // namespace hetmob::quad
