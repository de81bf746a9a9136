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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trainfb {

// ---------------------------------------------------------------------------
// Error types shared across the library.
// ---------------------------------------------------------------------------

struct ZeroAllocation : std::domain_error {
    explicit ZeroAllocation(const std::string& what) : std::domain_error(what) {}
};

struct BudgetTooSmall : std::domain_error {
    explicit BudgetTooSmall(const std::string& what) : std::domain_error(what) {}
};

struct InfeasibleSplit : std::domain_error {
    explicit InfeasibleSplit(const std::string& what) : std::domain_error(what) {}
};

// Thrown by the outer optimizer when no feasible split yields a positive net rate.
struct InfeasibleProblem : std::runtime_error {
    explicit InfeasibleProblem(const std::string& what) : std::runtime_error(what) {}
};

struct BitBudgetTooLarge : std::domain_error {
    explicit BitBudgetTooLarge(const std::string& what) : std::domain_error(what) {}
};

struct SingularChannel : std::runtime_error {
    explicit SingularChannel(const std::string& what) : std::runtime_error(what) {}
};

struct BadTrialCount : std::invalid_argument {
    explicit BadTrialCount(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidConfig : std::invalid_argument {
    explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

// ---------------------------------------------------------------------------
// Domain types.
// ---------------------------------------------------------------------------

inline double db_to_linear(double snr_db) {
    return std::pow(10.0, snr_db / 10.0);
}

/// Base-station / cell parameters.  The number of served single-antenna users
/// equals the number of transmit antennas (zero-forcing with a full user load),
/// so no separate user count is carried around.
struct SystemConfig {
    int n_t = 0;            // BS antennas == users
    double snr_db = 0.0;    // nominal SNR in dB
    double rho = 1.0;       // linear SNR, 10^(snr_db/10)
    int blocklength_t = 0;  // channel uses per coherence block

    static SystemConfig make(int n_t, double snr_db, int blocklength_t) {
        return SystemConfig{n_t, snr_db, db_to_linear(snr_db), blocklength_t};
    }
};

enum class SchemeKind { Analog, Tdd, DigitalErrorFree, DigitalQam };

inline const char* scheme_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::Analog: return "analog";
        case SchemeKind::Tdd: return "tdd";
        case SchemeKind::DigitalErrorFree: return "digital-errorfree";
        case SchemeKind::DigitalQam: return "digital-qam";
    }
    return "?";
}

inline std::optional<SchemeKind> parse_scheme(const std::string& name) {
    if (name == "analog") return SchemeKind::Analog;
    if (name == "tdd") return SchemeKind::Tdd;
    if (name == "digital-errorfree" || name == "digital") return SchemeKind::DigitalErrorFree;
    if (name == "digital-qam") return SchemeKind::DigitalQam;
    return std::nullopt;
}

// M must be 2 (BPSK) or square QAM, i.e. a power of 4.
inline bool is_valid_constellation(int m) {
    if (m == 2) return true;
    if (m < 4) return false;
    while (m % 4 == 0) m /= 4;
    return m == 1;
}

/// Per-regime constants: gap weights, minimum allocations, and (for uncoded
/// QAM feedback) the candidate constellation orders.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::Analog;
    double w1 = 0.0;    // training weight in the gap, N_t - 1
    double w_fb = 0.0;  // feedback weight, N_t(N_t - 1) analog, 0 otherwise
    std::vector<int> constellation_set;  // DigitalQam only
    int min_t1 = 0;
    int min_tfb = 0;

    int min_budget() const { return min_t1 + min_tfb; }

    static SchemeSpec make(SchemeKind kind, const SystemConfig& cfg,
                           std::vector<int> constellations = {2, 4, 16, 64}) {
        SchemeSpec s;
        s.kind = kind;
        s.w1 = cfg.n_t - 1.0;
        s.min_t1 = cfg.n_t;  // at least one pilot per antenna
        switch (kind) {
            case SchemeKind::Analog:
                s.w_fb = static_cast<double>(cfg.n_t) * (cfg.n_t - 1.0);
                s.min_tfb = cfg.n_t * cfg.n_t;  // one feedback symbol per coefficient
                break;
            case SchemeKind::Tdd:
                s.w_fb = 0.0;
                s.min_tfb = 0;
                break;
            case SchemeKind::DigitalErrorFree:
                s.w_fb = 0.0;  // gap is not of the w1/T1 + w_fb/Tfb form
                s.min_tfb = cfg.n_t;  // one feedback symbol per user
                break;
            case SchemeKind::DigitalQam:
                s.w_fb = 0.0;
                s.min_tfb = cfg.n_t;
                s.constellation_set = std::move(constellations);
                break;
        }
        return s;
    }
};

/// A (training, feedback) allocation.  For TDD systems t1 carries the uplink
/// training length and t_fb is zero.
struct ResourceSplit {
    double t1 = 0.0;
    double t_fb = 0.0;
    bool integral = false;

    double t_total() const { return t1 + t_fb; }
};

struct AllocationResult {
    ResourceSplit split;
    std::optional<int> constellation_m;  // winning M, DigitalQam only
    double bits_b = 0.0;                 // quantization bits per user, digital only
    double rate_gap_bits = 0.0;
    double pe_fb = 0.0;                  // nonzero for DigitalQam only
    double net_rate_bits = 0.0;          // per channel use per user
    double zf_rate_bits = 0.0;
};

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

enum class ConfigError { NtTooSmall, BadSnr, BlocklengthTooSmall, BadConstellation };

inline const char* config_error_name(ConfigError e) {
    switch (e) {
        case ConfigError::NtTooSmall: return "NtTooSmall";
        case ConfigError::BadSnr: return "BadSnr";
        case ConfigError::BlocklengthTooSmall: return "BlocklengthTooSmall";
        case ConfigError::BadConstellation: return "BadConstellation";
    }
    return "?";
}

struct ValidationReport {
    std::vector<ConfigError> errors;
    std::string message;

    bool ok() const { return errors.empty(); }
};

/// Checks every invariant of (cfg, scheme) and reports all violations at once.
inline ValidationReport validate_config(const SystemConfig& cfg, const SchemeSpec& scheme) {
    ValidationReport r;
    auto add = [&r](ConfigError e, const std::string& msg) {
        r.errors.push_back(e);
        if (!r.message.empty()) r.message += "; ";
        r.message += std::string(config_error_name(e)) + ": " + msg;
    };

    if (cfg.n_t < 2)
        add(ConfigError::NtTooSmall, "n_t = " + std::to_string(cfg.n_t) + ", need >= 2");
    if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho))
        add(ConfigError::BadSnr, "rho must be positive and finite");
    if (cfg.blocklength_t < 2 * cfg.n_t)
        add(ConfigError::BlocklengthTooSmall,
            "T = " + std::to_string(cfg.blocklength_t) + " < 2*n_t");
    else if (cfg.blocklength_t < scheme.min_budget())
        add(ConfigError::BlocklengthTooSmall,
            "T = " + std::to_string(cfg.blocklength_t) + " < minimum feasible budget " +
                std::to_string(scheme.min_budget()) + " for " + scheme_name(scheme.kind));
    if (scheme.kind == SchemeKind::DigitalQam) {
        if (scheme.constellation_set.empty())
            add(ConfigError::BadConstellation, "empty constellation set");
        for (int m : scheme.constellation_set)
            if (!is_valid_constellation(m))
                add(ConfigError::BadConstellation, "M = " + std::to_string(m));
    }
    return r;
}

/// Feasibility of a split against the box constraints and the blocklength.
inline bool split_feasible(const ResourceSplit& s, const SystemConfig& cfg,
                           const SchemeSpec& scheme) {
    return s.t1 >= scheme.min_t1 && s.t_fb >= scheme.min_tfb &&
           s.t_total() <= cfg.blocklength_t;
}

}  // namespace trainfb
