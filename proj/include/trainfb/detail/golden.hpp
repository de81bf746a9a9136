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
#include <utility>

namespace trainfb::detail {

/// Golden-section minimization of f over [a, b] down to |b - a| <= tol.
/// Returns (argmin, f(argmin)).  Assumes f is unimodal on the interval;
/// callers that cannot guarantee unimodality should bracket with
/// minimize_scanned below.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498949;  // 1/phi
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

/// Coarse scan over n points to locate the best cell, then golden-section
/// inside the bracketing cell pair.  Robust against mild non-unimodality
/// introduced by clamping at minimum allocations.
template <class F>
std::pair<double, double> minimize_scanned(F&& f, double a, double b, int n, double tol) {
    if (!(b > a)) return {a, f(a)};
    int best = 0;
    double fbest = f(a);
    const double h = (b - a) / (n - 1);
    for (int i = 1; i < n; ++i) {
        const double fi = f(a + i * h);
        if (fi < fbest) {
            fbest = fi;
            best = i;
        }
    }
    const double lo = a + (best > 0 ? (best - 1) * h : 0.0);
    const double hi = a + (best < n - 1 ? (best + 1) * h : (n - 1) * h);
    auto [x, fx] = golden_min(f, lo, hi, tol);
    if (fbest < fx) return {a + best * h, fbest};
    return {x, fx};
}

}  // namespace trainfb::detail
