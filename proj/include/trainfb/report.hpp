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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "trainfb/allocator.hpp"
#include "trainfb/montecarlo.hpp"
#include "trainfb/system.hpp"

namespace trainfb {

enum class SweepKind { FixedT, SweepT, SweepTt };

struct RunConfig {
    SystemConfig cfg = SystemConfig::make(4, 10.0, 1000);
    std::vector<SchemeKind> schemes{SchemeKind::Analog, SchemeKind::Tdd,
                                    SchemeKind::DigitalErrorFree, SchemeKind::DigitalQam};
    SweepKind sweep = SweepKind::FixedT;
    std::vector<int> t_list;
    std::vector<int> tt_list;
    long long trials = 0;  // 0 = analytic only
    std::uint64_t seed = 1;
    std::string output_path = "-";
    bool integral = true;
};

namespace detail_report {

inline std::string fmt6(double v) {  // floating CSV fields: 6 significant digits
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void check_list(const std::vector<int>& xs, const char* name) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0)
            throw InvalidConfig(std::string(name) + " entries must be positive");
        if (i > 0 && xs[i] <= xs[i - 1])
            throw InvalidConfig(std::string(name) + " must be strictly increasing");
    }
}

// Integer inner split at a fixed budget: exact scan over the feasible T1 range.
inline InnerSolution inner_split_integer(int tt, const SystemConfig& cfg,
                                         const SchemeSpec& scheme, int m) {
    if (tt < scheme.min_budget())
        throw BudgetTooSmall("inner_split_integer: budget below minimum feasible");
    if (scheme.kind == SchemeKind::Tdd) {
        ResourceSplit s{static_cast<double>(tt), 0.0, true};
        return InnerSolution{s, g_tdd(tt, cfg).g_linear, std::nullopt};
    }
    const double p_s = scheme.kind == SchemeKind::DigitalQam
                           ? qam_ser(Constellation::of(m), cfg.rho)
                           : 0.0;
    const double rzf = zf_rate(cfg);
    InnerSolution best;
    best.g_value = std::numeric_limits<double>::infinity();
    for (int t1 = scheme.min_t1; t1 <= tt - scheme.min_tfb; ++t1) {
        const ResourceSplit s{static_cast<double>(t1), static_cast<double>(tt - t1), true};
        double value = 0.0;
        switch (scheme.kind) {
            case SchemeKind::Analog: value = g_analog(s, scheme).g_linear; break;
            case SchemeKind::DigitalErrorFree: value = g_digital_errorfree(s, cfg).g_linear; break;
            case SchemeKind::DigitalQam:
                value = qam_rate_loss(s.t1, s.t_fb, cfg, Constellation::of(m), p_s, rzf);
                break;
            default: break;
        }
        if (value < best.g_value) best = InnerSolution{s, value, std::nullopt};
    }
    return best;
}

}  // namespace detail_report

// ---------------------------------------------------------------------------
// optimize: one CSV row per (scheme, T) with the full allocation result.
// ---------------------------------------------------------------------------

inline std::string cmd_optimize(const RunConfig& run) {
    using detail_report::fmt6;
    detail_report::check_list(run.t_list, "t_list");
    std::vector<int> ts = run.t_list.empty() ? std::vector<int>{run.cfg.blocklength_t}
                                             : run.t_list;
    std::ostringstream csv;
    csv << "scheme,T,n_t,snr_db,T1,Tfb,Tt,M,B,rate_gap_bits,pe_fb,net_rate_bits,zf_rate_bits\n";
    for (int t : ts) {
        const SystemConfig cfg = SystemConfig::make(run.cfg.n_t, run.cfg.snr_db, t);
        for (SchemeKind kind : run.schemes) {
            const SchemeSpec scheme = SchemeSpec::make(kind, cfg);
            if (const auto v = validate_config(cfg, scheme); !v.ok()) throw InvalidConfig(v.message);
            const AllocationResult r = outer_optimize(cfg, scheme, {run.integral});
            csv << scheme_name(kind) << ',' << t << ',' << cfg.n_t << ',' << fmt6(cfg.snr_db)
                << ',' << fmt6(r.split.t1) << ',' << fmt6(r.split.t_fb) << ','
                << fmt6(r.split.t_total()) << ','
                << (r.constellation_m ? std::to_string(*r.constellation_m) : std::string())
                << ',' << fmt6(r.bits_b) << ',' << fmt6(r.rate_gap_bits) << ','
                << fmt6(r.pe_fb) << ',' << fmt6(r.net_rate_bits) << ','
                << fmt6(r.zf_rate_bits) << '\n';
        }
    }
    return csv.str();
}

// ---------------------------------------------------------------------------
// sweep-tt: optimal feedback share of a fixed training+feedback budget.
// ---------------------------------------------------------------------------

inline std::string cmd_sweep_tt(const RunConfig& run) {
    using detail_report::fmt6;
    detail_report::check_list(run.tt_list, "tt_list");
    std::vector<int> tts = run.tt_list;
    if (tts.empty())
        for (int tt = 20; tt <= 400; tt += 20) tts.push_back(tt);
    std::ostringstream csv;
    csv << "scheme,Tt,n_t,snr_db,T1,Tfb,M,rate_loss_bits\n";
    for (int tt : tts) {
        const SystemConfig& cfg = run.cfg;
        for (SchemeKind kind : run.schemes) {
            const SchemeSpec scheme = SchemeSpec::make(kind, cfg);
            if (const auto v = validate_config(cfg, scheme); !v.ok()) throw InvalidConfig(v.message);
            if (tt < scheme.min_budget()) continue;  // infeasible budget for this scheme
            InnerSolution sol;
            int best_m = 0;
            if (kind == SchemeKind::DigitalQam) {
                double best_loss = std::numeric_limits<double>::infinity();
                for (int m : scheme.constellation_set) {
                    InnerSolution s = run.integral
                                          ? detail_report::inner_split_integer(tt, cfg, scheme, m)
                                          : inner_split_qam(tt, cfg, Constellation::of(m));
                    if (s.g_value < best_loss) {
                        best_loss = s.g_value;
                        sol = s;
                        best_m = m;
                    }
                }
            } else if (run.integral) {
                sol = detail_report::inner_split_integer(tt, cfg, scheme, 0);
            } else if (kind == SchemeKind::DigitalErrorFree) {
                sol = inner_split_digital(tt, cfg, scheme);
            } else {
                sol = inner_split_analog(tt, scheme);
            }
            const double loss_bits = kind == SchemeKind::DigitalQam
                                         ? sol.g_value
                                         : std::log2(1.0 + sol.g_value);
            csv << scheme_name(kind) << ',' << tt << ',' << cfg.n_t << ',' << fmt6(cfg.snr_db)
                << ',' << fmt6(sol.split.t1) << ',' << fmt6(sol.split.t_fb) << ','
                << (kind == SchemeKind::DigitalQam ? std::to_string(best_m) : std::string())
                << ',' << fmt6(loss_bits) << '\n';
        }
    }
    return csv.str();
}

// ---------------------------------------------------------------------------
// sweep-t: optimal splits and net rates versus blocklength, with the
// closed-form approximation columns for analog/TDD.
// ---------------------------------------------------------------------------

inline std::string cmd_sweep_t(const RunConfig& run) {
    using detail_report::fmt6;
    detail_report::check_list(run.t_list, "t_list");
    std::vector<int> ts = run.t_list.empty()
                              ? std::vector<int>{100, 200, 500, 1000, 2000, 5000, 10000}
                              : run.t_list;
    std::ostringstream csv;
    csv << "scheme,T,n_t,snr_db,T1,Tfb,Tt,M,net_rate_bits,t1_approx,net_rate_approx\n";
    for (int t : ts) {
        const SystemConfig cfg = SystemConfig::make(run.cfg.n_t, run.cfg.snr_db, t);
        const double t1a = approx_t1(cfg);
        for (SchemeKind kind : run.schemes) {
            const SchemeSpec scheme = SchemeSpec::make(kind, cfg);
            if (const auto v = validate_config(cfg, scheme); !v.ok()) throw InvalidConfig(v.message);
            const AllocationResult r = outer_optimize(cfg, scheme, {run.integral});
            std::string approx;
            if (kind == SchemeKind::Analog || kind == SchemeKind::Tdd) {
                const double gap =
                    approx_effective_gap_bits(cfg, KConstant::from_scheme(scheme));
                approx = fmt6(r.zf_rate_bits - gap);
            }
            csv << scheme_name(kind) << ',' << t << ',' << cfg.n_t << ',' << fmt6(cfg.snr_db)
                << ',' << fmt6(r.split.t1) << ',' << fmt6(r.split.t_fb) << ','
                << fmt6(r.split.t_total()) << ','
                << (r.constellation_m ? std::to_string(*r.constellation_m) : std::string())
                << ',' << fmt6(r.net_rate_bits) << ',' << fmt6(t1a) << ',' << approx << '\n';
        }
    }
    return csv.str();
}

// ---------------------------------------------------------------------------
// validate: Monte Carlo check of the net-rate lower bound at the optimizer's
// chosen splits.
// ---------------------------------------------------------------------------

// RVQ budgets above this are clamped for validation runs; the bound is
// evaluated at the clamped budget so the comparison stays consistent.
inline constexpr int kValidateMaxRvqBits = 20;

struct ValidateOutcome {
    std::string json;
    bool all_hold = false;
};

inline ValidateOutcome cmd_validate(const RunConfig& run) {
    if (run.trials < 10000)
        throw BadTrialCount("validate: trials must be >= 10000 (got " +
                            std::to_string(run.trials) + ")");
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    bool all_hold = true;
    int idx = 0;
    for (SchemeKind kind : run.schemes) {
        const SchemeSpec scheme = SchemeSpec::make(kind, run.cfg);
        if (const auto v = validate_config(run.cfg, scheme); !v.ok()) throw InvalidConfig(v.message);
        const AllocationResult opt = outer_optimize(run.cfg, scheme, {true});
        std::optional<int> bits;
        if (kind == SchemeKind::DigitalErrorFree || kind == SchemeKind::DigitalQam)
            bits = std::min(kValidateMaxRvqBits, static_cast<int>(std::floor(opt.bits_b)));
        const std::uint64_t scheme_seed = run.seed + static_cast<std::uint64_t>(idx++);
        const CampaignResult c = run_campaign(run.cfg, scheme, opt.split,
                                              static_cast<std::uint64_t>(run.trials),
                                              scheme_seed, bits);
        all_hold = all_hold && c.bound_holds;
        nlohmann::ordered_json entry;
        entry["scheme"] = scheme_name(kind);
        entry["t1"] = opt.split.t1;
        entry["tfb"] = opt.split.t_fb;
        entry["bound_bits"] = c.bound_bits;
        entry["empirical_bits"] = c.mean_rate_bits;
        entry["stderr_bits"] = c.stderr_bits;
        entry["bound_holds"] = c.bound_holds;
        entry["seed"] = scheme_seed;
        if (c.rvq_bits) entry["rvq_bits"] = *c.rvq_bits;
        results.push_back(entry);
    }
    nlohmann::ordered_json report;
    report["n_t"] = run.cfg.n_t;
    report["snr_db"] = run.cfg.snr_db;
    report["t"] = run.cfg.blocklength_t;
    report["trials"] = run.trials;
    report["seed"] = run.seed;
    report["results"] = results;
    return ValidateOutcome{report.dump(2) + "\n", all_hold};
}

}  // namespace trainfb
