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

#include "robscale/special.hpp"

#include <cmath>
#include <numbers>

#include "robscale/error.hpp"

namespace robscale {

namespace {

// Below this |x| the power series is used, above it the continued fraction.
constexpr double kSeriesLimit = 2.5;

// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1)).
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 2.0 * std::numbers::inv_sqrtpi * std::exp(-x2) * sum;
}

// erfc(x) for x > 0 via the continued fraction
//   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz algorithm.
double erfc_fraction(double x) {
    constexpr double tiny = 1e-300;
    double f = x;
    double c = x;
    double d = 0.0;
    for (int n = 1; n < 500; ++n) {
        const double a = 0.5 * n;
        d = x + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::numbers::inv_sqrtpi * std::exp(-x * x) / f;
}

}  // namespace

double erf(double x) {
    if (std::isnan(x)) fail(ErrorKind::invalid_argument, "erf: NaN argument");
    if (x == 0.0) return x;
    const double ax = std::fabs(x);
    double r;
    if (ax < kSeriesLimit) {
        r = erf_series(ax);
    } else if (ax < 6.5) {
        r = 1.0 - erfc_fraction(ax);
    } else {
        r = 1.0;  // erfc(6.5) < 1e-19
    }
    return x < 0 ? -r : r;
}

double erfc(double x) {
    if (std::isnan(x)) fail(ErrorKind::invalid_argument, "erfc: NaN argument");
    if (x < kSeriesLimit) return 1.0 - erf(x);
    if (x > 27.3) return 0.0;  // below the smallest subnormal
    return erfc_fraction(x);
}

double normal_cdf(double z) {
    return 0.5 * erfc(-z / std::numbers::sqrt2);
}

}  // namespace robscale
