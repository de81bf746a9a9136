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

#include <catch2/catch_amalgamated.hpp>

#include "trainfb/system.hpp"

using namespace trainfb;

TEST_CASE("db_to_linear anchors") {
    REQUIRE(db_to_linear(0.0) == 1.0);
    REQUIRE_THAT(db_to_linear(10.0), Catch::Matchers::WithinRel(10.0, 1e-14));
    REQUIRE_THAT(db_to_linear(20.0), Catch::Matchers::WithinRel(100.0, 1e-14));
}

TEST_CASE("db_to_linear is increasing and decade-periodic") {
    double prev = db_to_linear(-40.0);
    for (double db = -39.0; db <= 40.0; db += 1.0) {
        const double cur = db_to_linear(db);
        REQUIRE(cur > prev);
        prev = cur;
    }
    for (double db = -30.0; db <= 30.0; db += 2.5) {
        REQUIRE_THAT(db_to_linear(db + 10.0),
                     Catch::Matchers::WithinRel(10.0 * db_to_linear(db), 1e-12));
    }
}

TEST_CASE("scheme construction constants") {
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 1000);

    const SchemeSpec analog = SchemeSpec::make(SchemeKind::Analog, cfg);
    REQUIRE(analog.w1 == 3.0);
    REQUIRE(analog.w_fb == 12.0);
    REQUIRE(analog.min_t1 == 4);
    REQUIRE(analog.min_tfb == 16);

    const SchemeSpec tdd = SchemeSpec::make(SchemeKind::Tdd, cfg);
    REQUIRE(tdd.w1 == 3.0);
    REQUIRE(tdd.w_fb == 0.0);
    REQUIRE(tdd.min_tfb == 0);

    const SchemeSpec dig = SchemeSpec::make(SchemeKind::DigitalErrorFree, cfg);
    REQUIRE(dig.min_t1 == 4);
    REQUIRE(dig.min_tfb == 4);

    const SchemeSpec qam = SchemeSpec::make(SchemeKind::DigitalQam, cfg);
    REQUIRE(qam.constellation_set == std::vector<int>{2, 4, 16, 64});
}

TEST_CASE("constellation validity") {
    for (int m : {2, 4, 16, 64, 256}) REQUIRE(is_valid_constellation(m));
    for (int m : {1, 3, 8, 32, 128, 0, -4}) REQUIRE_FALSE(is_valid_constellation(m));
}

TEST_CASE("validate_config accepts the default setup") {
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 1000);
    const auto r = validate_config(cfg, SchemeSpec::make(SchemeKind::Analog, cfg));
    REQUIRE(r.ok());
    REQUIRE(r.message.empty());
}

TEST_CASE("validate_config rejects n_t = 1") {
    const SystemConfig cfg = SystemConfig::make(1, 10.0, 1000);
    const auto r = validate_config(cfg, SchemeSpec::make(SchemeKind::Analog, cfg));
    REQUIRE_FALSE(r.ok());
    REQUIRE(std::find(r.errors.begin(), r.errors.end(), ConfigError::NtTooSmall) !=
            r.errors.end());
}

TEST_CASE("validate_config rejects a blocklength below the scheme minimum") {
    // Analog at n_t = 4 needs at least 4 + 16 = 20 symbols.
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 6);
    const auto r = validate_config(cfg, SchemeSpec::make(SchemeKind::Analog, cfg));
    REQUIRE_FALSE(r.ok());
    REQUIRE(std::find(r.errors.begin(), r.errors.end(), ConfigError::BlocklengthTooSmall) !=
            r.errors.end());

    // T = 19 passes the structural 2 n_t bound but not the analog minimum.
    const SystemConfig cfg19 = SystemConfig::make(4, 10.0, 19);
    REQUIRE_FALSE(validate_config(cfg19, SchemeSpec::make(SchemeKind::Analog, cfg19)).ok());
    REQUIRE(validate_config(cfg19, SchemeSpec::make(SchemeKind::Tdd, cfg19)).ok());
}

TEST_CASE("validate_config rejects bad constellations and reports every violation") {
    SystemConfig cfg = SystemConfig::make(1, 10.0, 2);
    SchemeSpec qam = SchemeSpec::make(SchemeKind::DigitalQam, cfg, {4, 8});
    const auto r = validate_config(cfg, qam);
    REQUIRE(r.errors.size() >= 3);  // NtTooSmall, BlocklengthTooSmall, BadConstellation
    REQUIRE(std::find(r.errors.begin(), r.errors.end(), ConfigError::BadConstellation) !=
            r.errors.end());
}

TEST_CASE("split feasibility") {
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 100);
    const SchemeSpec analog = SchemeSpec::make(SchemeKind::Analog, cfg);
    REQUIRE(split_feasible(ResourceSplit{4, 16, true}, cfg, analog));
    REQUIRE_FALSE(split_feasible(ResourceSplit{3, 16, true}, cfg, analog));
    REQUIRE_FALSE(split_feasible(ResourceSplit{4, 15, true}, cfg, analog));
    REQUIRE_FALSE(split_feasible(ResourceSplit{50, 51, true}, cfg, analog));
}
