/*
 * Copyright 2026 The robscale Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "robscale/error.hpp"
#include "robscale/estimators.hpp"

using namespace robscale;
using V = std::vector<double>;

namespace {

V normal_draws(std::uint64_t seed, std::size_t n) {
    testkit::Rng rng(seed);
    V v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no exception");
    return ErrorKind::io;
}

}  // namespace

TEST_CASE("sample mean") {
    CHECK(sample_mean(V{1, 2, 3}) == 2.0);
    CHECK(sample_mean(V{0, 0, 0, 10}) == 2.5);
    for (double c : {0.1, -7.3, 1e300, 3.0000000000000004}) CHECK(sample_mean(V(17, c)) == c);
    CHECK_THROWS_WITH(sample_mean(V{}), "empty score vector");
}

TEST_CASE("sample sd") {
    CHECK(sample_sd(V{0, 1, 2}) == 1.0);
    CHECK(sample_sd(V(9, 0.3)) == 0.0);
    CHECK(sample_sd(V{0, 10}) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));
    CHECK_THROWS_WITH(sample_sd(V{1}), "insufficient data for scale");
}

TEST_CASE("median") {
    CHECK(median(V{1, 2, 3}) == 2.0);
    CHECK(median(V{4, 1, 3, 2}) == 2.5);
    CHECK(median(V{5}) == 5.0);
    CHECK(median(V{-1e308, 1e308}) == 0.0);
    CHECK_THROWS_WITH(median(V{}), "empty score vector");
}

TEST_CASE("type-7 quantile") {
    CHECK(quantile(V{0, 1, 2, 3, 4}, 0.25) == 1.0);
    CHECK(quantile(V{0, 1, 2, 3, 4}, 0.75) == 3.0);
    CHECK(quantile(V{1, 2, 3, 4}, 0.25) == 1.75);
    CHECK(quantile(V{7}, 0.9) == 7.0);
    CHECK_THROWS(quantile(V{1, 2}, 1.5));
}

TEST_CASE("upper trimmed mean") {
    CHECK(trimmed_mean_upper(V{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.10) == 5.0);
    CHECK(trimmed_mean_upper(V{1, 1, 1, 100}, 0.25) == 1.0);
    CHECK(trimmed_mean_upper(V{3, 9, 4}, 0.0) == sample_mean(V{3, 9, 4}));
    CHECK(trimmed_mean_upper(V{1, 2, 3}, 0.3) == 2.0);  // floor(0.9) = 0
    CHECK(trimmed_mean_upper(V{1}, 0.99) == 1.0);
    CHECK_THROWS(trimmed_mean_upper(V{1, 2}, 1.0));
    CHECK_THROWS(trimmed_mean_upper(V{1, 2}, -0.1));
}

TEST_CASE("nMAD and nIQR") {
    CHECK(nmad(V(6, 2.5)) == 0.0);
    CHECK(nmad(V{1, 2, 3, 4, 5}) == doctest::Approx(1.4826).epsilon(1e-15));
    CHECK(niqr(V(6, 2.5)) == 0.0);
    CHECK(niqr(V{0, 1, 2, 3, 4}) == doctest::Approx(2.0 / 1.3489795).epsilon(1e-15));
    CHECK_THROWS_WITH(niqr(V{1}), "insufficient data for scale");
    CHECK_THROWS_WITH(nmad(V{}), "empty score vector");
}

TEST_CASE("nMAD and nIQR are Gaussian-consistent") {
    const auto v = normal_draws(20261016, 1'000'000);
    CHECK(nmad(v) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(niqr(v) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("trimmed sd") {
    CHECK(trimmed_sd(V(5, 3.0), 3.0, 0.2) == 0.0);
    CHECK(trimmed_sd(V{0, 0, 0, 0, 0, 0, 0, 0, 0, 100}, 0.0, 0.10) == 0.0);
    CHECK(trimmed_sd(V{0, 1, 2}, 1.0, 0.0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK_THROWS_WITH(trimmed_sd(V{0, 1}, 0.0, 0.5), "insufficient data for scale");
}

TEST_CASE("estimators agree with sort-based oracles") {
    testkit::Rng rng(11);
    for (std::size_t c = 0; c < 300; ++c) {
        const auto s = testkit::score_case(rng, c, false).scores;
        CAPTURE(c);
        CHECK(median(s) == oracle::median(s));
        CHECK(nmad(s) == doctest::Approx(oracle::nmad(s)).epsilon(1e-14));
        CHECK(niqr(s) == doctest::Approx(oracle::niqr(s)).epsilon(1e-12).scale(oracle::niqr(s) + 1e-300));
        CHECK(sample_mean(s) == doctest::Approx(oracle::mean(s)).epsilon(1e-12));
        CHECK(sample_sd(s) == doctest::Approx(oracle::sd(s)).epsilon(1e-10));
        CHECK(trimmed_mean_upper(s, 0.1) == doctest::Approx(oracle::upper_trimmed_mean(s, 0.1)).epsilon(1e-12));
    }
}

TEST_CASE("shift and scale equivariance") {
    testkit::Rng rng(12);
    for (std::size_t c = 0; c < 300; ++c) {
        const auto s = testkit::score_case(rng, c).scores;
        const double a = std::ldexp(1.0, static_cast<int>(rng.integer(-3, 3)));
        const double shift = testkit::dyadic(rng.uniform(-50, 50));
        V t(s);
        for (auto& x : t) x = a * x + shift;
        const double tol = 1e-12 * (1 + std::fabs(shift) + a * std::fabs(sample_mean(s)));
        CAPTURE(c);
        CHECK(median(t) == a * median(s) + shift);
        CHECK(nmad(t) == doctest::Approx(a * nmad(s)).epsilon(1e-12));
        CHECK(niqr(t) == doctest::Approx(a * niqr(s)).epsilon(1e-12));
        CHECK(std::fabs(sample_mean(t) - (a * sample_mean(s) + shift)) <= tol);
        CHECK(sample_sd(t) == doctest::Approx(a * sample_sd(s)).epsilon(1e-10));
        CHECK(std::fabs(trimmed_mean_upper(t, 0.1) - (a * trimmed_mean_upper(s, 0.1) + shift)) <= tol);
        const double ct = trimmed_mean_upper(t, 0.1), cs = trimmed_mean_upper(s, 0.1);
        CHECK(trimmed_sd(t, ct, 0.1) == doctest::Approx(a * trimmed_sd(s, cs, 0.1)).epsilon(1e-9));
    }
}

TEST_CASE("upper trimming never raises the mean") {
    testkit::Rng rng(13);
    for (std::size_t c = 0; c < 300; ++c) {
        const auto s = testkit::score_case(rng, c).scores;
        for (double f : {0.0, 0.05, 0.1, 0.25, 0.5}) CHECK(trimmed_mean_upper(s, f) <= sample_mean(s) + 1e-12 * (1 + std::fabs(sample_mean(s))));
    }
}

TEST_CASE("breakdown: one huge value moves median and nMAD by a bounded amount") {
    testkit::Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(5, 60));
        V s(n);
        for (auto& x : s) x = rng.normal();
        V t(s);
        t[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(n) - 1))] = 1e9;
        const auto sorted = oracle::sorted(s);
        const double spread = sorted.back() - sorted.front();
        CHECK(std::fabs(median(t) - median(s)) <= spread);
        CHECK(std::fabs(nmad(t) - nmad(s)) <= 1.4826 * spread);
        CHECK(sample_mean(t) > 1e9 / static_cast<double>(n) - 10);
        CHECK(sample_sd(t) > 1e9 / std::sqrt(static_cast<double>(n)) / 2);
    }
}

TEST_CASE("estimators are deterministic") {
    const auto v = normal_draws(3, 5000);
    CHECK(huber_proposal2(v).center == huber_proposal2(v).center);
    CHECK(nmad(v) == nmad(v));
}

TEST_CASE("consistency constants") {
    // E[min(|Z|, c)^2] in closed form: 2Phi(c) - 1 - 2c phi(c) + 2c^2 (1 - Phi(c))
    const double c = kHuberTuning;
    const double phi = std::exp(-c * c / 2) / std::sqrt(2 * M_PI);
    const double tail = 0.5 * std::erfc(c / std::sqrt(2.0));
    const double closed = 1 - 2 * tail - 2 * c * phi + 2 * c * c * tail;
    CHECK(proposal2_consistency(WeightFamily::huber_t, c) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(proposal2_consistency(WeightFamily::huber_t, 60.0) == doctest::Approx(1.0).epsilon(1e-12));
    // biweight rho: E[rho(Z)] for c = 4.685 is about 0.4289 (c^2/6 * 0.1171...)
    const double kt = proposal2_consistency(WeightFamily::tukey_biweight, kTukeyTuning);
    CHECK(kt > 0.0);
    CHECK(kt < kTukeyTuning * kTukeyTuning / 6);
    CHECK(proposal2_consistency(WeightFamily::tukey_biweight, 200.0) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS(proposal2_consistency(WeightFamily::huber_t, 0.0));
}

TEST_CASE("proposal 2 on a symmetric sample keeps the center exactly") {
    for (auto fam : {WeightFamily::huber_t, WeightFamily::tukey_biweight}) {
        MEstimatorOptions o;
        o.family = fam;
        o.tuning = fam == WeightFamily::huber_t ? kHuberTuning : kTukeyTuning;
        const auto fit = huber_proposal2(V{-2, -1, 0, 1, 2}, o);
        CHECK(fit.center == 0.0);
        CHECK(fit.converged);
        CHECK(fit.estimator.joint);
    }
}

TEST_CASE("proposal 2 matches an independent fixed-point oracle") {
    testkit::Rng rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(20, 300));
        V s(n);
        for (auto& x : s) x = rng.coin(0.1) ? 8 + rng.normal() : rng.normal();
        for (bool tukey : {false, true}) {
            MEstimatorOptions o;
            o.family = tukey ? WeightFamily::tukey_biweight : WeightFamily::huber_t;
            o.tuning = tukey ? kTukeyTuning : kHuberTuning;
            o.tol = 1e-12;
            o.max_iter = 500;
            const auto fit = huber_proposal2(s, o);
            const auto ref = oracle::proposal2(s, tukey, o.tuning);
            CAPTURE(trial);
            CAPTURE(tukey);
            REQUIRE(fit.converged);
            CHECK(fit.center == doctest::Approx(ref.center).epsilon(1e-6).scale(ref.scale));
            CHECK(fit.scale == doctest::Approx(ref.scale).epsilon(1e-6));
        }
    }
}

TEST_CASE("proposal 2 on a single gross outlier sits between median and mean") {
    V s{-0.4, -0.3, -0.2, -0.1, 0, 0.1, 0.2, 0.3, 0.4, 50};
    const auto fit = huber_proposal2(s);
    CHECK(fit.center > median(s));
    CHECK(fit.center < sample_mean(s));
    CHECK(fit.scale < sample_sd(s));
    const auto ref = oracle::proposal2(s, false, kHuberTuning);
    CHECK(fit.center == doctest::Approx(ref.center).epsilon(1e-6));
}

TEST_CASE("proposal 2 approaches mean and sd as the tuning grows") {
    const auto v = normal_draws(16, 400);
    MEstimatorOptions o;
    o.tuning = 1e6;
    const auto fit = huber_proposal2(v, o);
    CHECK(fit.center == doctest::Approx(sample_mean(v)).epsilon(1e-9));
    CHECK(fit.scale == doctest::Approx(sample_sd(v)).epsilon(0.05));
}

TEST_CASE("proposal 2 recovers standard-normal parameters") {
    const auto v = normal_draws(17, 10'000);
    const auto fit = huber_proposal2(v);
    CHECK(std::fabs(fit.center) <= 0.05);
    CHECK(std::fabs(fit.scale - 1.0) <= 0.05);
}

TEST_CASE("proposal 2 errors and non-convergence") {
    CHECK(kind_of([] { huber_proposal2(V{0, 0, 0, 0, 0, 0, 0, 0, 0, 50}); }) == ErrorKind::numeric);
    CHECK_THROWS_WITH(huber_proposal2(V{0, 0, 0, 0, 0, 0, 0, 0, 0, 50}), "degenerate scale");
    CHECK_THROWS_WITH(huber_proposal2(V{1}), "insufficient data for scale");
    MEstimatorOptions o;
    o.max_iter = 1;
    o.tol = 1e-300;
    const auto fit = huber_proposal2(normal_draws(18, 100), o);
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 1);
    o.tol = 0;
    CHECK_THROWS(huber_proposal2(normal_draws(18, 100), o));
}

TEST_CASE("score vectors reject non-finite values") {
    CHECK_THROWS_WITH(ScoreVector(V{1, std::numeric_limits<double>::quiet_NaN()}),
                      doctest::Contains("index 1"));
    CHECK_THROWS(ScoreVector(V{std::numeric_limits<double>::infinity()}));
    CHECK(ScoreVector(V{1, 2}).size() == 2);
}

TEST_CASE("names") {
    CHECK(to_string(CenterEstimator::trimmed_mean) == "trim");
    CHECK(to_string(ScaleEstimator::niqr) == "niqr");
    CHECK(to_string(WeightFamily::tukey_biweight) == "tukey");
}
