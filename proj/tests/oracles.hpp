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

// Test-only reference oracles.  These deliberately avoid the library's own
// solver paths: dense grid scans for the inner splits, plain Monte Carlo for
// expectations, and an exhaustive integer scan for the outer optimizer.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>

namespace oracles {

// Minimize f over [lo, hi] by dense scan with the given step.
template <class F>
std::pair<double, double> grid_min(F&& f, double lo, double hi, double step) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    for (double x = lo; x <= hi + 1e-12; x += step) {
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    return {best_x, best_f};
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Monte Carlo estimate of E[log2(1 + c X)], X ~ Exp(1).
inline MeanStderr mc_log_exponential(double c, std::uint64_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::exponential_distribution<double> exp1(1.0);
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double v = std::log2(1.0 + c * exp1(gen));
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

// Empirical symbol error rate of uncoded Gray 4-QAM over AWGN at linear SNR
// rho with ML detection.  The constellation has unit average energy, so a
// symbol error occurs iff either noise component crosses the decision axis.
inline MeanStderr mc_qpsk_ser(double rho, std::uint64_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> bit(0, 1);
    const double amp = std::sqrt(rho / 2.0);  // per-axis amplitude at unit symbol energy
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double si = bit(gen) ? amp : -amp;
        const double sq = bit(gen) ? amp : -amp;
        const double yi = si + std::sqrt(0.5) * gauss(gen);
        const double yq = sq + std::sqrt(0.5) * gauss(gen);
        if ((yi > 0) != (si > 0) || (yq > 0) != (sq > 0)) ++errors;
    }
    const double p = static_cast<double>(errors) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace oracles
