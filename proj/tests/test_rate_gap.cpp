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

#include "oracles.hpp"
#include "trainfb/detail/expint.hpp"
#include "trainfb/rate_gap.hpp"

using namespace trainfb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const SystemConfig kCfg = SystemConfig::make(4, 10.0, 1000);
}

TEST_CASE("exponential integral against high-precision references") {
    REQUIRE_THAT(detail::e1(0.4), WithinRel(0.70238011886566247858, 1e-13));
    REQUIRE_THAT(detail::e1(5.0), WithinRel(0.0011482955912753257973, 1e-13));
    REQUIRE_THAT(detail::exp_e1_scaled(1.0), WithinRel(0.59634736232319407434, 1e-13));
    REQUIRE_THAT(detail::exp_e1_scaled(30.0), WithinRel(0.032289738758980125216, 1e-13));
    REQUIRE_THAT(detail::exp_e1_scaled(1e6), WithinRel(9.99999000001999994e-7, 1e-13));
    REQUIRE(detail::exp_e1_scaled(1e300) > 0.0);  // no overflow in the scaled form
}

TEST_CASE("mmse_error_variance") {
    REQUIRE_THAT(mmse_error_variance(4.0, kCfg), WithinRel(1.0 / 11.0, 1e-15));
    REQUIRE(mmse_error_variance(0.0, kCfg) == 1.0);
    // At t1 = n_t the variance is exactly 1/(1+rho).
    REQUIRE(mmse_error_variance(kCfg.n_t, kCfg) == 1.0 / (1.0 + kCfg.rho));

    double prev = 1.0;
    for (double t1 : {1.0, 2.0, 4.0, 16.0, 256.0, 1e6}) {
        const double v = mmse_error_variance(t1, kCfg);
        REQUIRE(v < prev);
        prev = v;
    }
    REQUIRE(mmse_error_variance(1e15, kCfg) < 1e-12);  // t1 -> inf limit

    // Decreasing in rho as well.
    const SystemConfig lo = SystemConfig::make(4, 0.0, 1000);
    const SystemConfig hi = SystemConfig::make(4, 20.0, 1000);
    REQUIRE(mmse_error_variance(8.0, hi) < mmse_error_variance(8.0, lo));
}

TEST_CASE("g_analog anchors and homogeneity") {
    const SchemeSpec scheme = SchemeSpec::make(SchemeKind::Analog, kCfg);
    REQUIRE_THAT(g_analog(ResourceSplit{12, 24}, scheme).g_linear, WithinRel(0.75, 1e-15));

    const SystemConfig cfg3 = SystemConfig::make(3, 10.0, 1000);
    const SchemeSpec scheme3 = SchemeSpec::make(SchemeKind::Analog, cfg3);
    REQUIRE_THAT(g_analog(ResourceSplit{2, 6}, scheme3).g_linear, WithinRel(2.0, 1e-15));

    // g(c t1, c tfb) = g(t1, tfb)/c
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.5, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double t1 = u(gen), tfb = u(gen), c = u(gen);
        const double g1 = g_analog(ResourceSplit{t1, tfb}, scheme).g_linear;
        const double g2 = g_analog(ResourceSplit{c * t1, c * tfb}, scheme).g_linear;
        REQUIRE_THAT(g2, WithinRel(g1 / c, 1e-12));
    }

    REQUIRE_THROWS_AS(g_analog(ResourceSplit{0, 24}, scheme), ZeroAllocation);
    REQUIRE_THROWS_AS(g_analog(ResourceSplit{12, 0}, scheme), ZeroAllocation);
}

TEST_CASE("g_tdd anchors") {
    REQUIRE_THAT(g_tdd(3.0, kCfg).g_linear, WithinRel(1.0, 1e-15));
    REQUIRE_THAT(g_tdd(30.0, kCfg).g_linear, WithinRel(0.1, 1e-15));
    REQUIRE_THROWS_AS(g_tdd(0.0, kCfg), ZeroAllocation);

    // Structurally the analog gap with the feedback term removed.
    const SchemeSpec tdd = SchemeSpec::make(SchemeKind::Tdd, kCfg);
    for (double t : {5.0, 17.0, 123.0})
        REQUIRE(g_tdd(t, kCfg).g_linear == g_analog(ResourceSplit{t, 1.0}, tdd).g_linear);
}

TEST_CASE("quantization_bits") {
    REQUIRE_THAT(quantization_bits(20.0, kCfg, std::log2(1.0 + kCfg.rho)),
                 WithinRel(17.297158093186486281, 1e-13));
    REQUIRE(quantization_bits(0.0, kCfg, 3.0) == 0.0);
    REQUIRE_THAT(quantization_bits(100.0, kCfg, std::log2(4.0)), WithinRel(50.0, 1e-15));
}

TEST_CASE("g_digital_errorfree anchors and monotonicity") {
    REQUIRE_THAT(g_digital_errorfree(ResourceSplit{12, 20}, kCfg).g_linear,
                 WithinRel(0.43380000748506739844, 1e-13));
    // No feedback: full quantization distortion rho * 2^0.
    REQUIRE(g_digital_errorfree(ResourceSplit{12, 0}, kCfg).g_linear == 0.25 + kCfg.rho);

    for (double t1 : {4.0, 8.0, 32.0})
        for (double tfb : {4.0, 16.0, 64.0}) {
            const double g = g_digital_errorfree(ResourceSplit{t1, tfb}, kCfg).g_linear;
            REQUIRE(g_digital_errorfree(ResourceSplit{t1 + 1, tfb}, kCfg).g_linear < g);
            REQUIRE(g_digital_errorfree(ResourceSplit{t1, tfb + 1}, kCfg).g_linear < g);
        }
    REQUIRE_THROWS_AS(g_digital_errorfree(ResourceSplit{0, 20}, kCfg), ZeroAllocation);
}

TEST_CASE("g_digital_quantized anchors") {
    REQUIRE(g_digital_quantized(12.0, 0.0, kCfg).g_linear == 10.25);
    // Quantization distortion at B ~ 35 bits drops below 1e-3.
    const double g = g_digital_quantized(1e9, 34.66, kCfg).g_linear;
    REQUIRE_THAT(g - 3.0 / 1e9, WithinRel(0.0033273624926387368959, 1e-9));
    REQUIRE(std::exp2(-34.66 / 3.0) < 1e-3);
}

TEST_CASE("error-free digital gap equals the quantized gap at the capacity bit budget") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ut(4.0, 300.0);
    std::uniform_real_distribution<double> usnr(-5.0, 25.0);
    for (int i = 0; i < 200; ++i) {
        const SystemConfig cfg = SystemConfig::make(2 + (i % 7), usnr(gen), 10000);
        const double t1 = ut(gen), tfb = ut(gen);
        const double b = quantization_bits(tfb, cfg, std::log2(1.0 + cfg.rho));
        REQUIRE_THAT(g_digital_errorfree(ResourceSplit{t1, tfb}, cfg).g_linear,
                     WithinRel(g_digital_quantized(t1, b, cfg).g_linear, 1e-12));
    }
}

TEST_CASE("zf_rate closed form against frozen references") {
    REQUIRE_THAT(zf_rate(SystemConfig::make(4, 10.0, 1000)),
                 WithinRel(1.5116962715040392956, 1e-12));
    REQUIRE_THAT(zf_rate(SystemConfig::make(2, 0.0, 1000)),
                 WithinRel(0.5212870037159068758, 1e-12));
    REQUIRE_THAT(zf_rate(SystemConfig::make(8, 20.0, 1000)),
                 WithinRel(3.1678105842794423462, 1e-12));
}

TEST_CASE("zf_rate limits and monotonicity") {
    REQUIRE(zf_rate(SystemConfig{4, -1000.0, 1e-100, 1000}) < 1e-10);  // rho -> 0
    double prev = 0.0;
    for (double db = -30.0; db <= 30.0; db += 3.0) {
        const double r = zf_rate(SystemConfig::make(4, db, 1000));
        REQUIRE(r > prev);
        prev = r;
    }
}

TEST_CASE("zf_rate agrees with a Monte Carlo oracle", "[mc]") {
    // Full 1e7-draw check at the headline operating point, lighter draws on a
    // (n_t, rho) grid.
    {
        const auto est = oracles::mc_log_exponential(10.0 / 4.0, 10'000'000, 0xA5A5);
        const double r = zf_rate(SystemConfig::make(4, 10.0, 1000));
        REQUIRE_THAT(r, WithinAbs(est.mean, 3.0 * est.stderr_));
    }
    std::uint64_t seed = 100;
    for (int nt : {2, 4, 8})
        for (double rho : {1.0, 10.0, 100.0}) {
            const auto est = oracles::mc_log_exponential(rho / nt, 1'000'000, seed++);
            const double r = zf_rate(SystemConfig{nt, 10.0 * std::log10(rho), rho, 1000});
            REQUIRE_THAT(r, WithinAbs(est.mean, 3.0 * est.stderr_));
        }
}

TEST_CASE("net_rate anchors") {
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 1000);
    const ResourceSplit split{55, 27};  // total 82
    const GapValue gap = GapValue::from_linear(27.0 / 82.0);
    REQUIRE_THAT(net_rate(cfg, split, gap, 0.0, 4.0),
                 WithinRel(3.2950395300941824332, 1e-13));
    REQUIRE(net_rate(cfg, split, gap, 1.0, 4.0) == 0.0);  // all feedback lost
    const ResourceSplit all{500, 500};
    REQUIRE(net_rate(cfg, all, gap, 0.0, 4.0) == 0.0);  // no data symbols remain
    REQUIRE_THROWS_AS(net_rate(cfg, ResourceSplit{800, 300}, gap, 0.0, 4.0), InfeasibleSplit);
}

TEST_CASE("net_rate is clamped and never exceeds the ZF rate") {
    const SystemConfig cfg = SystemConfig::make(4, 10.0, 1000);
    const double rzf = zf_rate(cfg);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double tt = u(gen) * cfg.blocklength_t;
        const GapValue gap = GapValue::from_linear(u(gen) * 5.0);
        const double r = net_rate(cfg, ResourceSplit{tt / 2, tt / 2}, gap, u(gen), rzf);
        REQUIRE(r >= 0.0);
        REQUIRE(r <= rzf);
    }
}
