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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trainfb/report.hpp"

namespace trainfb {

// Exit codes: 0 success, 2 invalid configuration, 3 infeasible optimization,
// 4 failed bound validation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitValidationFailed = 4;

namespace detail_cli {

inline std::vector<SchemeKind> parse_schemes(const std::vector<std::string>& names) {
    std::vector<SchemeKind> out;
    for (const std::string& n : names) {
        if (n == "all") {
            return {SchemeKind::Analog, SchemeKind::Tdd, SchemeKind::DigitalErrorFree,
                    SchemeKind::DigitalQam};
        }
        const auto k = parse_scheme(n);
        if (!k) throw InvalidConfig("unknown scheme '" + n + "'");
        out.push_back(*k);
    }
    return out;
}

struct CliValues {
    int nt = 4;
    double snr_db = 10.0;
    int t = 1000;
    std::vector<int> t_list;
    std::vector<int> tt_list;
    std::vector<std::string> schemes;
    long long trials = 0;
    std::uint64_t seed = 1;
    std::string out_path = "-";
    std::string config_path;
    bool integral = false;
    bool continuous = false;

    CLI::Option* o_nt = nullptr;
    CLI::Option* o_snr = nullptr;
    CLI::Option* o_t = nullptr;
    CLI::Option* o_t_list = nullptr;
    CLI::Option* o_tt_list = nullptr;
    CLI::Option* o_schemes = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_integral = nullptr;
    CLI::Option* o_continuous = nullptr;
};

inline void add_common_options(CLI::App* sub, CliValues& v) {
    v.o_nt = sub->add_option("--nt", v.nt, "BS antennas = users");
    v.o_snr = sub->add_option("--snr-db", v.snr_db, "nominal SNR in dB");
    v.o_t = sub->add_option("--t", v.t, "coherence blocklength T");
    v.o_t_list = sub->add_option("--t-list", v.t_list, "blocklengths to sweep")
                     ->delimiter(',');
    v.o_tt_list = sub->add_option("--tt-list", v.tt_list, "training+feedback budgets to sweep")
                      ->delimiter(',');
    v.o_schemes = sub->add_option("--schemes", v.schemes,
                                  "analog|tdd|digital-errorfree|digital-qam|all")
                      ->delimiter(',');
    v.o_trials = sub->add_option("--trials", v.trials, "Monte Carlo trials");
    v.o_seed = sub->add_option("--seed", v.seed, "campaign seed");
    v.o_out = sub->add_option("--out", v.out_path, "output path ('-' for stdout)");
    v.o_integral = sub->add_flag("--integral", v.integral, "integer splits (default)");
    v.o_continuous = sub->add_flag("--continuous", v.continuous, "continuous splits");
    sub->add_option("--config", v.config_path, "JSON config file; flags override");
}

// flag > config file > built-in default
inline RunConfig merge_config(const CliValues& v, bool validate_cmd) {
    nlohmann::json file;
    if (!v.config_path.empty()) {
        std::ifstream in(v.config_path);
        if (!in) throw InvalidConfig("cannot open config file '" + v.config_path + "'");
        try {
            in >> file;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidConfig(std::string("config file: ") + e.what());
        }
    }
    const auto pick = [&](const CLI::Option* opt, const char* key, auto cli_value, auto fallback) {
        using T = decltype(fallback);
        if (opt->count() > 0) return static_cast<T>(cli_value);
        if (file.contains(key)) {
            try {
                return file.at(key).get<T>();
            } catch (const nlohmann::json::exception& e) {
                throw InvalidConfig(std::string("config key '") + key + "': " + e.what());
            }
        }
        return fallback;
    };

    RunConfig run;
    const int nt = pick(v.o_nt, "nt", v.nt, 4);
    const double snr = pick(v.o_snr, "snr_db", v.snr_db, 10.0);
    const int t = pick(v.o_t, "t", v.t, 1000);
    run.cfg = SystemConfig::make(nt, snr, t);
    run.t_list = pick(v.o_t_list, "t_list", v.t_list, std::vector<int>{});
    run.tt_list = pick(v.o_tt_list, "tt_list", v.tt_list, std::vector<int>{});
    run.schemes = parse_schemes(
        pick(v.o_schemes, "schemes", v.schemes, std::vector<std::string>{"all"}));
    run.trials = pick(v.o_trials, "trials", v.trials,
                      validate_cmd ? 100000LL : 0LL);
    run.seed = pick(v.o_seed, "seed", v.seed, std::uint64_t{1});
    run.output_path = pick(v.o_out, "out", v.out_path, std::string("-"));
    bool integral = pick(v.o_integral, "integral", true, true);
    if (v.o_continuous->count() > 0) integral = false;
    else if (v.o_integral->count() == 0 && file.contains("integral"))
        integral = file.at("integral").get<bool>();
    run.integral = integral;
    return run;
}

inline void write_output(const RunConfig& run, const std::string& text, std::ostream& out) {
    if (run.output_path == "-" || run.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(run.output_path, std::ios::binary);
    if (!f) throw InvalidConfig("cannot open output file '" + run.output_path + "'");
    f << text;
}

}  // namespace detail_cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Training/feedback resource optimizer for ZF MIMO downlink"};
    app.require_subcommand(1);

    detail_cli::CliValues v_opt, v_stt, v_st, v_val;
    CLI::App* c_opt = app.add_subcommand("optimize", "optimal split and net rate per scheme");
    CLI::App* c_stt = app.add_subcommand("sweep-tt", "inner split versus a fixed budget T_t");
    CLI::App* c_st = app.add_subcommand("sweep-t", "optimal splits and rates versus blocklength");
    CLI::App* c_val = app.add_subcommand("validate", "Monte Carlo check of the rate lower bound");
    detail_cli::add_common_options(c_opt, v_opt);
    detail_cli::add_common_options(c_stt, v_stt);
    detail_cli::add_common_options(c_st, v_st);
    detail_cli::add_common_options(c_val, v_val);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    try {
        if (c_opt->parsed()) {
            const RunConfig run = detail_cli::merge_config(v_opt, false);
            detail_cli::write_output(run, cmd_optimize(run), out);
        } else if (c_stt->parsed()) {
            RunConfig run = detail_cli::merge_config(v_stt, false);
            run.sweep = SweepKind::SweepTt;
            detail_cli::write_output(run, cmd_sweep_tt(run), out);
        } else if (c_st->parsed()) {
            RunConfig run = detail_cli::merge_config(v_st, false);
            run.sweep = SweepKind::SweepT;
            detail_cli::write_output(run, cmd_sweep_t(run), out);
        } else if (c_val->parsed()) {
            const RunConfig run = detail_cli::merge_config(v_val, true);
            const ValidateOutcome res = cmd_validate(run);
            detail_cli::write_output(run, res.json, out);
            if (!res.all_hold) {
                err << "error: at least one scheme violated the rate lower bound\n";
                return kExitValidationFailed;
            }
        }
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const BadTrialCount& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const BudgetTooSmall& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const InfeasibleProblem& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const InfeasibleSplit& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

}  // namespace trainfb
