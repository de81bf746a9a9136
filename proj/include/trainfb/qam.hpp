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
#include <stdexcept>
#include <string>

#include "trainfb/system.hpp"

namespace trainfb {

/// Uncoded feedback constellation: BPSK (M = 2) or square M-QAM.
struct Constellation {
    int m = 2;
    double bits_per_symbol = 1.0;

    static Constellation of(int m) {
        if (!is_valid_constellation(m))
            throw InvalidConfig("BadConstellation: M = " + std::to_string(m));
        return Constellation{m, std::log2(static_cast<double>(m))};
    }
};

/// Gaussian tail probability Q(x) = P(N(0,1) > x) = erfc(x / sqrt(2)) / 2.
inline double q_function(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

/// Symbol error rate of uncoded M-QAM over AWGN at linear SNR rho.
/// Square QAM uses the nearest-neighbour union expression
///   P_s = 1 - (1 - 2(1 - 1/sqrt(M)) Q(sqrt(3 rho / (M-1))))^2,
/// BPSK is the special case P_s = Q(sqrt(2 rho)).
inline double qam_ser(Constellation c, double rho) {
    if (rho < 0.0) throw std::domain_error("qam_ser: rho must be >= 0");
    if (c.m == 2) return q_function(std::sqrt(2.0 * rho));
    const double a = 1.0 - 1.0 / std::sqrt(static_cast<double>(c.m));
    const double inner = 1.0 - 2.0 * a * q_function(std::sqrt(3.0 * rho / (c.m - 1)));
    return 1.0 - inner * inner;
}

/// Probability that any of a user's t_fb/N_t uncoded feedback symbols is
/// received in error: 1 - (1 - P_s)^(t_fb/N_t).
inline double fb_error_prob(double p_s, double t_fb, const SystemConfig& cfg) {
    if (p_s < 0.0 || p_s > 1.0) throw std::domain_error("fb_error_prob: p_s outside [0,1]");
    if (t_fb < 0.0) throw std::domain_error("fb_error_prob: t_fb must be >= 0");
    if (t_fb == 0.0) return 0.0;
    // -expm1(n log1p(-p)) keeps precision for tiny p_s.
    return -std::expm1(t_fb / cfg.n_t * std::log1p(-p_s));
}

}  // namespace trainfb
