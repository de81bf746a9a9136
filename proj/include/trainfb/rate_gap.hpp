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

#include <algorithm>
#include <cmath>

#include "trainfb/detail/expint.hpp"
#include "trainfb/system.hpp"

namespace trainfb {

/// Rate gap in its two equivalent representations: the linear argument g
/// inside log2(1 + g), and the gap itself in bits per channel use.
struct GapValue {
    double g_linear = 0.0;
    double gap_bits = 0.0;

    static GapValue from_linear(double g) { return GapValue{g, std::log2(1.0 + g)}; }
};

/// Per-coefficient MMSE channel estimation error after t1 shared pilots:
/// 1 / (1 + (t1/N_t) rho).
inline double mmse_error_variance(double t1, const SystemConfig& cfg) {
    if (t1 < 0.0) throw std::domain_error("mmse_error_variance: t1 must be >= 0");
    return 1.0 / (1.0 + t1 / cfg.n_t * cfg.rho);
}

/// Analog (unquantized) feedback gap argument: w1/t1 + w_fb/t_fb.
inline GapValue g_analog(const ResourceSplit& split, const SchemeSpec& scheme) {
    if (split.t1 <= 0.0 || split.t_fb <= 0.0)
        throw ZeroAllocation("g_analog: t1 and t_fb must be positive");
    return GapValue::from_linear(scheme.w1 / split.t1 + scheme.w_fb / split.t_fb);
}

/// TDD with perfect reciprocity: (N_t - 1) / T_TDD, no feedback term.
inline GapValue g_tdd(double t_tdd, const SystemConfig& cfg) {
    if (t_tdd <= 0.0) throw ZeroAllocation("g_tdd: t_tdd must be positive");
    return GapValue::from_linear((cfg.n_t - 1.0) / t_tdd);
}

/// Quantization bits per user deliverable over t_fb feedback symbols:
/// (t_fb / N_t) * bits_per_symbol.  bits_per_symbol is log2(1 + rho) for a
/// capacity-achieving feedback link and log2(M) for uncoded M-QAM.
inline double quantization_bits(double t_fb, const SystemConfig& cfg, double bits_per_symbol) {
    if (t_fb < 0.0) throw std::domain_error("quantization_bits: t_fb must be >= 0");
    return t_fb / cfg.n_t * bits_per_symbol;
}

/// RVQ gap with B quantization bits: (N_t - 1)/t1 + rho * 2^(-B/(N_t-1)).
inline GapValue g_digital_quantized(double t1, double bits_b, const SystemConfig& cfg) {
    if (t1 <= 0.0) throw ZeroAllocation("g_digital_quantized: t1 must be positive");
    if (bits_b < 0.0) throw std::domain_error("g_digital_quantized: bits_b must be >= 0");
    return GapValue::from_linear((cfg.n_t - 1.0) / t1 +
                                 cfg.rho * std::exp2(-bits_b / (cfg.n_t - 1.0)));
}

/// Digital feedback over an error-free link at its capacity log2(1 + rho):
/// (N_t - 1)/t1 + rho (1 + rho)^(-t_fb / (N_t (N_t - 1))).
inline GapValue g_digital_errorfree(const ResourceSplit& split, const SystemConfig& cfg) {
    if (split.t1 <= 0.0) throw ZeroAllocation("g_digital_errorfree: t1 must be positive");
    if (split.t_fb < 0.0) throw std::domain_error("g_digital_errorfree: t_fb must be >= 0");
    const double expo = -split.t_fb / (cfg.n_t * (cfg.n_t - 1.0));
    return GapValue::from_linear((cfg.n_t - 1.0) / split.t1 +
                                 cfg.rho * std::pow(1.0 + cfg.rho, expo));
}

/// Ergodic per-user ZF rate with perfect CSI, bits per channel use.
///
/// The effective channel gain of each user is unit-mean exponential, so
/// E[log2(1 + (rho/N_t) X)] = log2(e) e^x E1(x) with x = N_t/rho.
inline double zf_rate(const SystemConfig& cfg) {
    if (cfg.rho <= 0.0) return 0.0;
    const double x = cfg.n_t / cfg.rho;
    return std::log2(std::exp(1.0)) * detail::exp_e1_scaled(x);
}

/// Net spectral efficiency per user given a gap and a feedback error
/// probability: (1 - T_t/T)(1 - pe)(R_zf - gap), clamped at zero.  An
/// erroneous feedback block contributes zero rate for that user.
inline double net_rate(const SystemConfig& cfg, const ResourceSplit& split,
                       const GapValue& gap, double pe_fb, double zf_rate_bits) {
    if (split.t_total() > cfg.blocklength_t)
        throw InfeasibleSplit("net_rate: t1 + t_fb exceeds blocklength");
    if (pe_fb < 0.0 || pe_fb > 1.0) throw std::domain_error("net_rate: pe_fb outside [0,1]");
    const double data_fraction = 1.0 - split.t_total() / cfg.blocklength_t;
    const double v = data_fraction * (1.0 - pe_fb) * (zf_rate_bits - gap.gap_bits);
    return std::max(0.0, v);
}

inline double net_rate(const SystemConfig& cfg, const SchemeSpec& /*scheme*/,
                       const ResourceSplit& split, const GapValue& gap, double pe_fb) {
    return net_rate(cfg, split, gap, pe_fb, zf_rate(cfg));
}

}  // namespace trainfb
