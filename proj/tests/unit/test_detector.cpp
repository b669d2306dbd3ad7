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
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "robscale/detector.hpp"
#include "robscale/error.hpp"

using namespace robscale;
using V = std::vector<double>;

TEST_CASE("dataset validation") {
    CHECK_THROWS(Dataset(1, 1, V{1.0}));
    CHECK_THROWS(Dataset(2, 0, V{}));
    CHECK_THROWS(Dataset(2, 2, V{1, 2, 3}));
    CHECK_THROWS(Dataset(2, 1, V{1, std::nan("")}));
    CHECK_THROWS(Dataset(2, 1, V{1, 2}, LabelVector(std::vector<std::uint8_t>{1})));
    const Dataset d(2, 2, V{1, 2, 3, 4});
    CHECK(d.row(1)[0] == 3);
    CHECK_FALSE(d.labels());
}

TEST_CASE("kNN distances on a line") {
    const Dataset d(4, 1, V{0, 1, 3, 10});
    CHECK(knn_scores(d, 1).values()[0] == 1.0);
    CHECK(knn_scores(d, 1).values()[3] == 7.0);
    const auto k2 = knn_scores(d, 2);
    CHECK(k2[0] == 3.0);
    CHECK(k2[1] == 2.0);
    CHECK(k2[2] == 3.0);
    CHECK(k2[3] == 9.0);
    CHECK(knn_scores(d, 3)[3] == 10.0);
}

TEST_CASE("duplicates count as distance zero") {
    const Dataset d(3, 2, V{1, 1, 1, 1, 5, 5});
    const auto s = knn_scores(d, 1);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == doctest::Approx(std::sqrt(32.0)));
}

TEST_CASE("k outside [1, N-1] is rejected") {
    const Dataset d(3, 1, V{0, 1, 2});
    CHECK_THROWS_WITH(knn_scores(d, 0), doctest::Contains("k"));
    CHECK_THROWS(knn_scores(d, 3));
    CHECK_NOTHROW(knn_scores(d, 2));
}

TEST_CASE("property: kNN equals full sorting of all distances") {
    testkit::Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(2, 40));
        const auto c = static_cast<std::size_t>(rng.integer(1, 6));
        V x(n * c);
        for (auto& v : x) v = rng.coin(0.2) ? std::round(rng.normal()) : rng.normal();
        const Dataset d(n, c, x);
        const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<long long>(n) - 1));
        const auto s = knn_scores(d, k);
        const auto ref = oracle::knn(x, n, c, k);
        for (std::size_t i = 0; i < n; ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-14));
    }
}

TEST_CASE("min-max normalisation") {
    const Dataset d(3, 2, V{0, 5, 5, 5, 10, 5}, LabelVector(std::vector<std::uint8_t>{0, 1, 0}));
    const auto n = d.minmax_normalized();
    CHECK(n.row(0)[0] == 0.0);
    CHECK(n.row(1)[0] == 0.5);
    CHECK(n.row(2)[0] == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(n.row(i)[1] == 0.0);
    REQUIRE(n.labels());
    CHECK(n.labels()->outlier_count() == 1);
}

TEST_CASE("kNN scores are invariant to row-wise translation and scale by the factor") {
    testkit::Rng rng(52);
    V x(30 * 3);
    for (auto& v : x) v = rng.normal();
    V y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 4.0 * x[i] + (i % 3 == 0 ? 100.0 : -7.0);
    const auto a = knn_scores(Dataset(30, 3, x));
    const auto b = knn_scores(Dataset(30, 3, y));
    for (std::size_t i = 0; i < 30; ++i) CHECK(b[i] == doctest::Approx(4.0 * a[i]).epsilon(1e-12));
}
