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
#include <numbers>
#include <optional>

#include "trainfb/detail/golden.hpp"
#include "trainfb/qam.hpp"
#include "trainfb/rate_gap.hpp"
#include "trainfb/system.hpp"

namespace trainfb {

/// Result of the inner budget split for a fixed total T_t.  g_value is the
/// scheme's inner objective at the split: the linear gap argument g for
/// analog/TDD/error-free digital, and the error-weighted rate loss w (in
/// bits) for QAM feedback.
struct InnerSolution {
    ResourceSplit split;
    double g_value = 0.0;
    std::optional<double> lagrange_mu;
};

/// Budget-normalized gap coefficient: the minimized analog gap over a budget
/// T_t equals k_value / T_t.
struct KConstant {
    double k_value = 0.0;

    // (sqrt(w1) + sqrt(w_fb))^2 expanded as w1 + w_fb + 2 sqrt(w1 w_fb); the
    // product form keeps perfect squares exact (27 at N_t = 4).
    static KConstant from_weights(double w1, double w_fb) {
        return KConstant{w1 + w_fb + 2.0 * std::sqrt(w1 * w_fb)};
    }
    static KConstant from_scheme(const SchemeSpec& s) { return from_weights(s.w1, s.w_fb); }
};

// ---------------------------------------------------------------------------
// Inner splits: minimize the gap subject to T1 + T_fb = T_t.
// ---------------------------------------------------------------------------

/// Waterfilling split for the analog gap w1/T1 + w_fb/T_fb: the budget is
/// shared proportionally to the square roots of the weights.  Covers TDD as
/// the w_fb = 0 special case (all budget to training).
inline InnerSolution inner_split_analog(double t_t, const SchemeSpec& scheme) {
    if (t_t <= 0.0) throw BudgetTooSmall("inner_split_analog: t_t must be positive");
    const KConstant k = KConstant::from_scheme(scheme);
    ResourceSplit split;
    split.t1 = std::sqrt(scheme.w1 / k.k_value) * t_t;
    split.t_fb = std::sqrt(scheme.w_fb / k.k_value) * t_t;
    return InnerSolution{split, k.k_value / t_t, t_t / std::sqrt(k.k_value)};
}

/// Lagrangian split for error-free digital feedback.  The stationary point
/// satisfies T1 = mu sqrt(N_t - 1) and
///   T_fb(mu) = N_t(N_t-1) [2 ln mu + ln(rho ln(1+rho) / (N_t(N_t-1)))] / ln(1+rho),
/// solved for the mu whose total meets the budget (bisection; the total is
/// strictly increasing in mu).  T_fb is clamped at the scheme minimum where
/// the stationary expression falls below it, and the box constraint on T1 is
/// enforced by projection.
inline InnerSolution inner_split_digital(double t_t, const SystemConfig& cfg,
                                         const SchemeSpec& scheme) {
    if (t_t < scheme.min_budget())
        throw BudgetTooSmall("inner_split_digital: budget below minimum feasible");
    const double rho = cfg.rho;
    const double lnr = std::log1p(rho);
    const double nn1 = cfg.n_t * (cfg.n_t - 1.0);
    const double cst = std::log(rho * lnr / nn1);
    const double sqw1 = std::sqrt(cfg.n_t - 1.0);
    const double min_tfb = scheme.min_tfb;

    const auto tfb_of_mu = [&](double mu) {
        return std::max(min_tfb, nn1 * (2.0 * std::log(mu) + cst) / lnr);
    };
    const auto total = [&](double mu) { return mu * sqw1 + tfb_of_mu(mu); };

    double lo = 1e-9;
    double hi = std::max(1.0, t_t / sqw1);
    while (total(hi) < t_t) hi *= 2.0;
    double mu = 0.5 * (lo + hi);
    for (int i = 0; i < 200 && std::fabs(total(mu) - t_t) > 1e-6; ++i) {
        (total(mu) < t_t ? lo : hi) = mu;
        mu = 0.5 * (lo + hi);
    }

    ResourceSplit split;
    split.t1 = mu * sqw1;
    split.t_fb = t_t - split.t1;
    // The multiplier is only meaningful when neither box constraint is active.
    bool interior = nn1 * (2.0 * std::log(mu) + cst) / lnr > min_tfb + 1e-9;
    if (split.t1 < scheme.min_t1) {
        split.t1 = scheme.min_t1;
        split.t_fb = t_t - split.t1;
        interior = false;
    }
    if (split.t_fb < min_tfb) {
        split.t_fb = min_tfb;
        split.t1 = t_t - split.t_fb;
        interior = false;
    }
    InnerSolution sol;
    sol.split = split;
    sol.g_value = g_digital_errorfree(split, cfg).g_linear;
    if (interior) sol.lagrange_mu = mu;
    return sol;
}

/// Effective rate loss for uncoded M-QAM feedback, the inner objective of the
/// error-aware optimization:
///   w(T1, T_fb) = (1 - Pe) log2(1 + (N_t-1)/T1 + rho M^(-T_fb/(N_t(N_t-1)))) + Pe R_zf.
inline double qam_rate_loss(double t1, double t_fb, const SystemConfig& cfg,
                            Constellation c, double p_s, double zf_rate_bits) {
    const double pe = fb_error_prob(p_s, t_fb, cfg);
    const double g = (cfg.n_t - 1.0) / t1 +
                     cfg.rho * std::pow(static_cast<double>(c.m),
                                        -t_fb / (cfg.n_t * (cfg.n_t - 1.0)));
    return (1.0 - pe) * std::log2(1.0 + g) + pe * zf_rate_bits;
}

/// Minimizes the QAM rate loss over T1 in [min_t1, t_t - min_tfb] by a
/// scanned golden-section search (tolerance 1e-4 on T1).
inline InnerSolution inner_split_qam(double t_t, const SystemConfig& cfg, Constellation c) {
    const double min_t1 = cfg.n_t;
    const double min_tfb = cfg.n_t;
    if (t_t < min_t1 + min_tfb)
        throw BudgetTooSmall("inner_split_qam: budget below minimum feasible");
    const double p_s = qam_ser(c, cfg.rho);
    const double rzf = zf_rate(cfg);
    const auto w_of = [&](double t1) {
        return qam_rate_loss(t1, t_t - t1, cfg, c, p_s, rzf);
    };
    auto [t1, w] = detail::minimize_scanned(w_of, min_t1, t_t - min_tfb, 128, 1e-4);
    InnerSolution sol;
    sol.split = ResourceSplit{t1, t_t - t1, false};
    sol.g_value = w;
    return sol;
}

// ---------------------------------------------------------------------------
// Closed-form scaling approximations.
// ---------------------------------------------------------------------------

// The raw forms take the ZF rate as a plain number and are unit-agnostic; the
// config overloads evaluate them with the natural-log rate, the convention
// under which the underlying ln(1+x) <= x bound is valid, and convert gaps
// back to bits.

/// Upper bound on the optimal total training + feedback: sqrt(k T / R_zf).
inline double approx_tt_upper(double t, const KConstant& k, double zf_rate_value) {
    if (zf_rate_value <= 0.0) throw std::domain_error("approx_tt_upper: need R_zf > 0");
    return std::sqrt(k.k_value * t / zf_rate_value);
}

inline double approx_tt_upper(const SystemConfig& cfg, const KConstant& k) {
    return approx_tt_upper(cfg.blocklength_t, k, zf_rate(cfg) * std::numbers::ln2);
}

/// Approximate optimal downlink training length sqrt((N_t - 1) T / R_zf);
/// independent of the feedback weight.
inline double approx_t1(double t, int n_t, double zf_rate_value) {
    if (zf_rate_value <= 0.0) throw std::domain_error("approx_t1: need R_zf > 0");
    return std::sqrt((n_t - 1.0) * t / zf_rate_value);
}

inline double approx_t1(const SystemConfig& cfg) {
    return approx_t1(cfg.blocklength_t, cfg.n_t, zf_rate(cfg) * std::numbers::ln2);
}

/// Effective rate gap of the optimized system to perfect-CSI ZF:
/// 2 sqrt(k R_zf / T), in the units of the supplied rate.
inline double approx_effective_gap(double zf_rate_value, const KConstant& k, double t) {
    return 2.0 * std::sqrt(k.k_value * zf_rate_value / t);
}

/// Same approximation evaluated in nats and reported in bits.
inline double approx_effective_gap_bits(const SystemConfig& cfg, const KConstant& k) {
    return approx_effective_gap(zf_rate(cfg) * std::numbers::ln2, k, cfg.blocklength_t) /
           std::numbers::ln2;
}

// ---------------------------------------------------------------------------
// Outer optimization over the total budget T_t.
// ---------------------------------------------------------------------------

struct OuterOptions {
    bool integral = true;
    int refine_window = 2;  // +/- window for the integer search, budget and split
};

namespace detail_alloc {

// Continuous argmax of f(tt) = (1 - tt/T)(R_zf - log(1 + k/tt)) via bisection
// on the stationarity condition (f is concave in tt).  Works in nats; the
// argmax is base-invariant.
inline double continuous_tt_closed_form(const SystemConfig& cfg, const KConstant& k,
                                        double tt_min) {
    const double t = cfg.blocklength_t;
    const double rzf_nats = zf_rate(cfg) * std::numbers::ln2;
    const auto deriv = [&](double tt) {
        return k.k_value * (t - tt) / (tt * tt * (1.0 + k.k_value / tt)) -
               (rzf_nats - std::log1p(k.k_value / tt));
    };
    double lo = tt_min;
    double hi = t;
    if (deriv(lo) <= 0.0) return lo;
    if (deriv(hi) >= 0.0) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-10 * t; ++i) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Continuous argmax of f(tt) = (1 - tt/T)(R_zf - loss(tt)) for schemes whose
// inner loss has no closed form.  Coarse 64-point scan guards the golden
// section against non-concavity introduced by clamping at the minimum
// allocations.
template <class LossBits>
double continuous_tt_scanned(const SystemConfig& cfg, double tt_min, LossBits&& loss) {
    const double t = cfg.blocklength_t;
    const double rzf = zf_rate(cfg);
    const auto negf = [&](double tt) { return -(1.0 - tt / t) * (rzf - loss(tt)); };
    return detail::minimize_scanned(negf, tt_min, t, 64, std::max(1e-6, 1e-9 * t)).first;
}

struct Candidate {
    ResourceSplit split;
    double net = -1.0;
    int m = 0;
};

}  // namespace detail_alloc

/// Two-step net-rate maximization: inner gap minimization for each budget,
/// outer concave search over the budget, then (by default) refinement over
/// the integer splits adjacent to the continuous solution.  For QAM feedback
/// the search additionally runs per constellation and keeps the best.
inline AllocationResult outer_optimize(const SystemConfig& cfg, const SchemeSpec& scheme,
                                       const OuterOptions& opts = {}) {
    if (const auto v = validate_config(cfg, scheme); !v.ok()) throw InvalidConfig(v.message);

    const double t = cfg.blocklength_t;
    const double rzf = zf_rate(cfg);
    const int w = opts.refine_window;

    // Net rate of a concrete split under this scheme; fills the result fields.
    const auto evaluate = [&](const ResourceSplit& split, int m) {
        AllocationResult r;
        r.split = split;
        r.zf_rate_bits = rzf;
        GapValue gap;
        switch (scheme.kind) {
            case SchemeKind::Analog:
                gap = g_analog(split, scheme);
                break;
            case SchemeKind::Tdd:
                gap = g_tdd(split.t1, cfg);
                break;
            case SchemeKind::DigitalErrorFree:
                gap = g_digital_errorfree(split, cfg);
                r.bits_b = quantization_bits(split.t_fb, cfg, std::log2(1.0 + cfg.rho));
                break;
            case SchemeKind::DigitalQam: {
                const Constellation c = Constellation::of(m);
                r.constellation_m = m;
                r.bits_b = quantization_bits(split.t_fb, cfg, c.bits_per_symbol);
                r.pe_fb = fb_error_prob(qam_ser(c, cfg.rho), split.t_fb, cfg);
                gap = g_digital_quantized(split.t1, r.bits_b, cfg);
                break;
            }
        }
        r.rate_gap_bits = gap.gap_bits;
        r.net_rate_bits = net_rate(cfg, split, gap, r.pe_fb, rzf);
        return r;
    };

    // Continuous inner split for a given budget (used to center the integer
    // window, and as the final answer in continuous mode).
    const auto inner = [&](double tt, int m) -> InnerSolution {
        switch (scheme.kind) {
            case SchemeKind::Analog:
            case SchemeKind::Tdd:
                return inner_split_analog(tt, scheme);
            case SchemeKind::DigitalErrorFree:
                return inner_split_digital(tt, cfg, scheme);
            case SchemeKind::DigitalQam:
                return inner_split_qam(tt, cfg, Constellation::of(m));
        }
        throw std::logic_error("unreachable");
    };

    const auto continuous_tt = [&](int m) {
        switch (scheme.kind) {
            case SchemeKind::Analog:
            case SchemeKind::Tdd:
                return detail_alloc::continuous_tt_closed_form(
                    cfg, KConstant::from_scheme(scheme), scheme.min_budget());
            case SchemeKind::DigitalErrorFree:
                return detail_alloc::continuous_tt_scanned(
                    cfg, scheme.min_budget(),
                    [&](double tt) { return std::log2(1.0 + inner(tt, m).g_value); });
            case SchemeKind::DigitalQam:
                return detail_alloc::continuous_tt_scanned(
                    cfg, scheme.min_budget(),
                    [&](double tt) { return inner(tt, m).g_value; });
        }
        throw std::logic_error("unreachable");
    };

    const std::vector<int> ms = scheme.kind == SchemeKind::DigitalQam
                                    ? scheme.constellation_set
                                    : std::vector<int>{0};

    detail_alloc::Candidate best;
    for (int m : ms) {
        const double tt_star = continuous_tt(m);
        if (!opts.integral) {
            InnerSolution s = inner(tt_star, m);
            const AllocationResult r = evaluate(s.split, m);
            if (r.net_rate_bits > best.net) best = {s.split, r.net_rate_bits, m};
            continue;
        }
        const int b_lo = std::max(scheme.min_budget(),
                                  static_cast<int>(std::floor(tt_star)) - w);
        const int b_hi = std::min(static_cast<int>(t),
                                  static_cast<int>(std::ceil(tt_star)) + w);
        for (int b = b_lo; b <= b_hi; ++b) {
            if (scheme.kind == SchemeKind::Tdd) {
                const ResourceSplit split{static_cast<double>(b), 0.0, true};
                const AllocationResult r = evaluate(split, m);
                if (r.net_rate_bits > best.net) best = {split, r.net_rate_bits, m};
                continue;
            }
            const double c1 = inner(b, m).split.t1;
            const int t1_lo = std::max(scheme.min_t1, static_cast<int>(std::floor(c1)) - w);
            const int t1_hi =
                std::min(b - scheme.min_tfb, static_cast<int>(std::ceil(c1)) + w);
            for (int t1 = t1_lo; t1 <= t1_hi; ++t1) {
                const ResourceSplit split{static_cast<double>(t1),
                                          static_cast<double>(b - t1), true};
                const AllocationResult r = evaluate(split, m);
                if (r.net_rate_bits > best.net) best = {split, r.net_rate_bits, m};
            }
        }
    }

    if (best.net <= 0.0)
        throw InfeasibleProblem(std::string("outer_optimize: no split with positive net rate for ") +
                                scheme_name(scheme.kind));
    return evaluate(best.split, best.m);
}

}  // namespace trainfb
