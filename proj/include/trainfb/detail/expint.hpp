// Copyright 2026 The trainfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trainfb::detail {

// Exponential integral E1(x) for x > 0.
//
// Two regimes: the alternating power series for small x, and the standard
// continued fraction (modified Lentz) otherwise.  The continued fraction
// evaluates e^x E1(x) directly, which is the quantity needed by the ergodic
// ZF rate and stays finite for arbitrarily large x where E1 itself
// underflows.

inline double exp_e1_continued_fraction(double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double tiny = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) return h;
    }
    throw std::runtime_error("exp_e1_continued_fraction: no convergence");
}

inline double e1_series(double x) {
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    double sum = -euler_gamma - std::log(x);
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double contrib = -term / k;
        sum += contrib;
        if (std::fabs(contrib) < std::numeric_limits<double>::epsilon() * std::fabs(sum))
            break;
    }
    return sum;
}

/// e^x * E1(x), x > 0.  Relative accuracy ~1e-14 over the full range.
inline double exp_e1_scaled(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_e1_scaled: requires x > 0");
    if (std::isinf(x)) return 0.0;
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return exp_e1_continued_fraction(x);
}

/// E1(x), x > 0.  Underflows to 0 for very large x.
inline double e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("e1: requires x > 0");
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * exp_e1_continued_fraction(x);
}

}  // namespace trainfb::detail
