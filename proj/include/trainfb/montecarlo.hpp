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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "trainfb/rate_gap.hpp"
#include "trainfb/system.hpp"

namespace trainfb {

// ---------------------------------------------------------------------------
// Reproducible randomness.  Every trial owns an independent generator derived
// from (campaign seed, trial index), so trial outcomes do not depend on
// execution order and aggregates are bit-identical for a fixed seed.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t campaign_seed, std::uint64_t trial) {
    return splitmix64(splitmix64(campaign_seed) ^ (trial + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double gaussian() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }

    std::complex<double> cgauss() {  // CN(0,1)
        constexpr double inv_sqrt2 = 0.70710678118654752;
        return {inv_sqrt2 * gaussian(), inv_sqrt2 * gaussian()};
    }

    Eigen::VectorXcd cgauss_vector(int n) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = cgauss();
        return v;
    }

    Eigen::VectorXcd isotropic_unit(int n) {
        for (;;) {
            Eigen::VectorXcd v = cgauss_vector(n);
            const double norm = v.norm();
            if (norm > 1e-12) return v / norm;
        }
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Domain types.
// ---------------------------------------------------------------------------

/// One coherence block: column k holds user k's channel vector, entries
/// i.i.d. CN(0,1).
struct ChannelBlock {
    Eigen::MatrixXcd h;
};

/// Per-user CSI as it propagates through the acquisition chain.
struct CsiEstimate {
    Eigen::VectorXcd h_hat_ut;  // MMSE estimate at the user terminal
    Eigen::VectorXcd h_hat_bs;  // estimate (analog) or unit direction (RVQ) at the BS
    double error_var_ut = 1.0;  // per-coefficient estimation error variance
};

struct BeamformerSet {
    Eigen::MatrixXcd v;  // unit-norm columns, v_k orthogonal to every other user's estimate
};

struct TrialOutcome {
    Eigen::ArrayXd sinr;
    Eigen::ArrayXd rate_bits;
    Eigen::ArrayXd interference;
};

// ---------------------------------------------------------------------------
// Link operations.
// ---------------------------------------------------------------------------

inline ChannelBlock draw_channel(Rng& rng, const SystemConfig& cfg) {
    ChannelBlock b;
    b.h.resize(cfg.n_t, cfg.n_t);
    for (int k = 0; k < cfg.n_t; ++k)
        for (int i = 0; i < cfg.n_t; ++i) b.h(i, k) = rng.cgauss();
    return b;
}

inline ChannelBlock draw_channel(std::uint64_t rng_seed, const SystemConfig& cfg) {
    Rng rng(rng_seed);
    return draw_channel(rng, cfg);
}

/// Downlink training: each user observes s_k = sqrt(t1 rho / N_t) h_k + z_k
/// and forms the per-coefficient linear MMSE estimate.
inline std::vector<CsiEstimate> ut_train_estimate(const ChannelBlock& block, double t1,
                                                  const SystemConfig& cfg, Rng& rng) {
    if (t1 < cfg.n_t) throw std::domain_error("ut_train_estimate: t1 must be >= n_t");
    const double a = std::sqrt(t1 * cfg.rho / cfg.n_t);
    const double mmse_gain = a / (1.0 + a * a);
    std::vector<CsiEstimate> out(cfg.n_t);
    for (int k = 0; k < cfg.n_t; ++k) {
        const Eigen::VectorXcd s = a * block.h.col(k) + rng.cgauss_vector(cfg.n_t);
        out[k].h_hat_ut = mmse_gain * s;
        out[k].error_var_ut = mmse_error_variance(t1, cfg);
    }
    return out;
}

/// Analog feedback of the UT estimate: each coefficient is repeated over
/// t_fb/N_t^2 uplink uses at SNR rho with unit average transmit power
/// (fractional repetition counts are handled by energy equivalence), the BS
/// combines the repetitions and inverts the known gain.  Per-coefficient
/// feedback noise variance is gamma N_t^2 / (rho t_fb) with
/// gamma = 1 - error_var_ut, i.e. ~N_t^2/(rho t_fb) in the high-fidelity
/// regime.
inline void analog_feedback(CsiEstimate& est, double t_fb, const SystemConfig& cfg, Rng& rng) {
    if (t_fb < cfg.n_t * cfg.n_t)
        throw BudgetTooSmall("analog_feedback: t_fb must be >= n_t^2");
    const double reps = t_fb / (cfg.n_t * cfg.n_t);
    const double gamma = 1.0 - est.error_var_ut;
    const double noise_sd = std::sqrt(gamma / (reps * cfg.rho));
    est.h_hat_bs = est.h_hat_ut + noise_sd * rng.cgauss_vector(cfg.n_t);
}

/// Index of the codeword best aligned with the given direction.
inline int rvq_select(const Eigen::VectorXcd& direction,
                      const std::vector<Eigen::VectorXcd>& codebook) {
    int best = 0;
    double best_metric = -1.0;
    for (int i = 0; i < static_cast<int>(codebook.size()); ++i) {
        const double metric = std::norm(direction.dot(codebook[i]));
        if (metric > best_metric) {
            best_metric = metric;
            best = i;
        }
    }
    return best;
}

inline constexpr int kMaxRvqBits = 24;

/// Random vector quantization: draws a fresh codebook of 2^B isotropic unit
/// vectors and keeps the one maximizing |h_hat^H w|.  The BS side receives a
/// direction only.
inline void rvq_quantize(CsiEstimate& est, int bits_b, const SystemConfig& cfg, Rng& rng) {
    if (bits_b < 0 || bits_b > kMaxRvqBits)
        throw BitBudgetTooLarge("rvq_quantize: B must be in [0, 24]");
    const std::int64_t n = std::int64_t{1} << bits_b;
    Eigen::VectorXcd best;
    double best_metric = -1.0;
    for (std::int64_t i = 0; i < n; ++i) {
        Eigen::VectorXcd w = rng.isotropic_unit(cfg.n_t);
        const double metric = std::norm(est.h_hat_ut.dot(w));
        if (metric > best_metric) {
            best_metric = metric;
            best = std::move(w);
        }
    }
    est.h_hat_bs = std::move(best);
}

/// Samples the RVQ output direction from its exact distribution instead of
/// materializing the codebook: sin^2 of the quantization angle is the minimum
/// of 2^B i.i.d. Beta(N_t-1, 1) variables (inverse-CDF sampled), and the
/// residual direction is isotropic in the orthogonal complement.  Used by
/// campaigns where 2^B codewords per user per block would be intractable.
inline Eigen::VectorXcd rvq_sample_direction(const Eigen::VectorXcd& h_hat, int bits_b,
                                             const SystemConfig& cfg, Rng& rng) {
    if (bits_b < 0) throw BitBudgetTooLarge("rvq_sample_direction: B must be >= 0");
    const double n_codewords = std::exp2(static_cast<double>(bits_b));
    const double u = rng.uniform();
    // P(min sin^2 <= z) = 1 - (1 - z^(n_t-1))^N  =>  z = (1-(1-u)^(1/N))^(1/(n_t-1))
    const double sin2 = std::pow(-std::expm1(std::log1p(-u) / n_codewords),
                                 1.0 / (cfg.n_t - 1.0));
    const Eigen::VectorXcd d = h_hat / h_hat.norm();
    Eigen::VectorXcd perp;
    for (;;) {
        perp = rng.cgauss_vector(cfg.n_t);
        perp -= d.dot(perp) * d;
        const double norm = perp.norm();
        if (norm > 1e-9) {
            perp /= norm;
            break;
        }
    }
    const double phase = 2.0 * M_PI * rng.uniform();
    return std::sqrt(1.0 - sin2) * std::polar(1.0, phase) * d + std::sqrt(sin2) * perp;
}

/// Zero-forcing beamformers from the stacked BS-side estimates (columns).
/// v_k is the k-th column of the inverse conjugate transpose, normalized.
inline BeamformerSet zf_beamformers(const Eigen::MatrixXcd& bs_estimates) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bs_estimates.adjoint());
    if (!(lu.rcond() > 1e-12)) throw SingularChannel("zf_beamformers: ill-conditioned estimates");
    Eigen::MatrixXcd v =
        lu.solve(Eigen::MatrixXcd::Identity(bs_estimates.rows(), bs_estimates.cols()));
    for (int k = 0; k < v.cols(); ++k) v.col(k).normalize();
    return BeamformerSet{std::move(v)};
}

/// Per-user SINR and rate under equal-power transmission, with genie SINR
/// knowledge at the terminals.
inline TrialOutcome evaluate_trial(const ChannelBlock& block, const BeamformerSet& beams,
                                   const SystemConfig& cfg) {
    const double p = cfg.rho / cfg.n_t;
    TrialOutcome out;
    out.sinr.resize(cfg.n_t);
    out.rate_bits.resize(cfg.n_t);
    out.interference.resize(cfg.n_t);
    for (int k = 0; k < cfg.n_t; ++k) {
        const double signal = p * std::norm(block.h.col(k).dot(beams.v.col(k)));
        double interf = 0.0;
        for (int j = 0; j < cfg.n_t; ++j)
            if (j != k) interf += p * std::norm(block.h.col(k).dot(beams.v.col(j)));
        out.interference(k) = interf;
        out.sinr(k) = signal / (1.0 + interf);
        out.rate_bits(k) = std::log2(1.0 + out.sinr(k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Campaigns.
// ---------------------------------------------------------------------------

struct CampaignResult {
    double mean_rate_bits = 0.0;   // averaged over users and trials
    double stderr_bits = 0.0;      // standard error of the trial means
    Eigen::ArrayXd per_user_mean;
    double gap_bits = 0.0;         // analytic rate gap at the simulated split
    double bound_bits = 0.0;       // R_zf - gap
    bool bound_holds = false;      // mean + 3 stderr >= bound
    std::uint64_t trials = 0;
    std::uint64_t resampled_blocks = 0;
    std::uint64_t seed = 0;
    std::optional<int> rvq_bits;
};

// Campaigns switch from the literal codebook search to the exact-distribution
// sampler above this size; the two paths are distribution-identical.
inline constexpr int kLiteralRvqMaxBits = 10;

/// Simulates `trials` independent coherence blocks of the given scheme at a
/// fixed split and checks the empirical mean rate against the analytic lower
/// bound R_zf - rate_gap.  For digital schemes the RVQ bit budget defaults to
/// the error-free capacity of the feedback symbols and may be overridden.
/// Deterministic for a fixed seed.
inline CampaignResult run_campaign(const SystemConfig& cfg, const SchemeSpec& scheme,
                                   const ResourceSplit& split, std::uint64_t trials,
                                   std::uint64_t seed,
                                   std::optional<int> rvq_bits = std::nullopt) {
    if (trials == 0) throw BadTrialCount("run_campaign: trials must be >= 1");
    if (const auto v = validate_config(cfg, scheme); !v.ok()) throw InvalidConfig(v.message);
    if (!split_feasible(split, cfg, scheme))
        throw InfeasibleSplit("run_campaign: split violates scheme bounds");

    const bool digital = scheme.kind == SchemeKind::DigitalErrorFree ||
                         scheme.kind == SchemeKind::DigitalQam;
    int bits = 0;
    GapValue gap;
    switch (scheme.kind) {
        case SchemeKind::Analog:
            gap = g_analog(split, scheme);
            break;
        case SchemeKind::Tdd:
            gap = g_tdd(split.t1, cfg);
            break;
        case SchemeKind::DigitalErrorFree:
        case SchemeKind::DigitalQam:
            if (rvq_bits) {
                bits = *rvq_bits;
            } else if (scheme.kind == SchemeKind::DigitalErrorFree) {
                bits = static_cast<int>(
                    std::floor(quantization_bits(split.t_fb, cfg, std::log2(1.0 + cfg.rho))));
            } else {
                throw InvalidConfig("run_campaign: DigitalQam requires explicit rvq_bits");
            }
            if (bits < 0 || bits > kMaxRvqBits)
                throw BitBudgetTooLarge("run_campaign: B = " + std::to_string(bits) +
                                        " outside [0, 24]; pass a capped rvq_bits");
            gap = g_digital_quantized(split.t1, bits, cfg);
            break;
    }

    const double rzf = zf_rate(cfg);
    const bool literal_rvq = bits <= kLiteralRvqMaxBits;

    Eigen::ArrayXd user_sum = Eigen::ArrayXd::Zero(cfg.n_t);
    double mean = 0.0, m2 = 0.0;  // Welford over per-trial means
    std::uint64_t resampled = 0;

    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng(trial_seed(seed, i));
        TrialOutcome outcome;
        for (int attempt = 0;; ++attempt) {
            if (attempt > 100)
                throw SingularChannel("run_campaign: persistent singular blocks");
            const ChannelBlock block = draw_channel(rng, cfg);
            Eigen::MatrixXcd bs(cfg.n_t, cfg.n_t);
            if (scheme.kind == SchemeKind::Tdd) {
                // Reciprocity: uplink pilots give the BS the same MMSE estimate
                // the terminals would form.
                const auto ests = ut_train_estimate(block, split.t1, cfg, rng);
                for (int k = 0; k < cfg.n_t; ++k) bs.col(k) = ests[k].h_hat_ut;
            } else {
                auto ests = ut_train_estimate(block, split.t1, cfg, rng);
                for (int k = 0; k < cfg.n_t; ++k) {
                    if (scheme.kind == SchemeKind::Analog) {
                        analog_feedback(ests[k], split.t_fb, cfg, rng);
                    } else if (literal_rvq) {
                        rvq_quantize(ests[k], bits, cfg, rng);
                    } else {
                        ests[k].h_hat_bs = rvq_sample_direction(ests[k].h_hat_ut, bits, cfg, rng);
                    }
                    bs.col(k) = ests[k].h_hat_bs;
                }
            }
            try {
                const BeamformerSet beams = zf_beamformers(bs);
                outcome = evaluate_trial(block, beams, cfg);
                break;
            } catch (const SingularChannel&) {
                ++resampled;  // zero-measure event; redraw the block
            }
        }
        user_sum += outcome.rate_bits;
        const double trial_mean = outcome.rate_bits.mean();
        const double delta = trial_mean - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (trial_mean - mean);
    }

    if (resampled * 1000 > trials)
        throw SingularChannel("run_campaign: more than 0.1% of blocks resampled");

    CampaignResult r;
    r.trials = trials;
    r.seed = seed;
    r.resampled_blocks = resampled;
    r.per_user_mean = user_sum / static_cast<double>(trials);
    r.mean_rate_bits = mean;
    r.stderr_bits = trials > 1 ? std::sqrt(m2 / (trials - 1.0) / trials) : 0.0;
    r.gap_bits = gap.gap_bits;
    r.bound_bits = rzf - gap.gap_bits;
    r.bound_holds = r.mean_rate_bits + 3.0 * r.stderr_bits >= r.bound_bits;
    if (digital) r.rvq_bits = bits;
    return r;
}

}  // namespace trainfb
