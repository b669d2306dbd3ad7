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

#include "robscale/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "robscale/error.hpp"

namespace robscale {

namespace {

// Neumaier compensated summation.
class Accumulator {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void require_nonempty(std::span<const double> s) {
    if (s.empty()) fail(ErrorKind::invalid_argument, "empty score vector");
}

void require_scale_data(std::span<const double> s) {
    if (s.size() < 2) fail(ErrorKind::invalid_argument, "insufficient data for scale");
}

void require_trim(double f) {
    if (!(f >= 0.0 && f < 1.0))
        fail(ErrorKind::invalid_argument, "trim fraction must lie in [0,1)");
}

std::size_t trim_count(std::size_t n, double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n)));
}

// First element plus the mean offset from it; constant inputs come back exactly.
double shifted_mean(std::span<const double> s) {
    const double origin = s.front();
    Accumulator acc;
    for (double x : s) acc.add(x - origin);
    return origin + acc.value() / static_cast<double>(s.size());
}

std::vector<double> sorted_copy(std::span<const double> s) {
    std::vector<double> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

double sorted_quantile(const std::vector<double>& v, double q) {
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

// Scale-equation function: psi^2 for Huber's T, the biweight rho for Tukey.
double chi(WeightFamily family, double tuning, double r) {
    if (family == WeightFamily::huber_t) {
        const double p = std::min(std::fabs(r), tuning);
        return p * p;
    }
    const double cap = tuning * tuning / 6.0;
    if (std::fabs(r) >= tuning) return cap;
    const double u = r / tuning;
    const double v = 1.0 - u * u;
    return cap * (1.0 - v * v * v);
}

double weight(WeightFamily family, double tuning, double r) {
    if (family == WeightFamily::huber_t) {
        const double ar = std::fabs(r);
        return ar <= tuning ? 1.0 : tuning / ar;
    }
    if (std::fabs(r) > tuning) return 0.0;
    const double u = r / tuning;
    const double v = 1.0 - u * u;
    return v * v;
}

}  // namespace

ScoreVector::ScoreVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            fail(ErrorKind::invalid_argument,
                 "non-finite score at index " + std::to_string(i));
    }
}

double sample_mean(std::span<const double> scores) {
    require_nonempty(scores);
    return shifted_mean(scores);
}

double sample_sd(std::span<const double> scores) {
    require_scale_data(scores);
    const double m = shifted_mean(scores);
    Accumulator acc;
    for (double x : scores) acc.add((x - m) * (x - m));
    return std::sqrt(acc.value() / static_cast<double>(scores.size() - 1));
}

double median(std::span<const double> scores) {
    require_nonempty(scores);
    std::vector<double> v(scores.begin(), scores.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return std::midpoint(lower, upper);
}

double quantile(std::span<const double> scores, double q) {
    require_nonempty(scores);
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::invalid_argument, "quantile level must lie in [0,1]");
    return sorted_quantile(sorted_copy(scores), q);
}

double trimmed_mean_upper(std::span<const double> scores, double trim_fraction) {
    require_nonempty(scores);
    require_trim(trim_fraction);
    const std::size_t keep = scores.size() - trim_count(scores.size(), trim_fraction);
    if (keep == 0) fail(ErrorKind::invalid_argument, "trimming removes all values");
    const auto v = sorted_copy(scores);
    return shifted_mean(std::span<const double>(v.data(), keep));
}

double nmad(std::span<const double> scores) {
    const double med = median(scores);
    std::vector<double> dev(scores.size());
    std::transform(scores.begin(), scores.end(), dev.begin(),
                   [med](double x) { return std::fabs(x - med); });
    return kNmadConstant * median(dev);
}

double niqr(std::span<const double> scores) {
    require_scale_data(scores);
    const auto v = sorted_copy(scores);
    return (sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25)) / kNiqrConstant;
}

double trimmed_sd(std::span<const double> scores, double center, double trim_fraction) {
    require_trim(trim_fraction);
    if (!std::isfinite(center)) fail(ErrorKind::invalid_argument, "trimmed_sd: non-finite center");
    std::vector<double> sq(scores.size());
    std::transform(scores.begin(), scores.end(), sq.begin(),
                   [center](double x) { return (x - center) * (x - center); });
    const std::size_t keep = sq.size() - trim_count(sq.size(), trim_fraction);
    if (keep < 2) fail(ErrorKind::invalid_argument, "insufficient data for scale");
    std::sort(sq.begin(), sq.end());
    Accumulator acc;
    for (std::size_t i = 0; i < keep; ++i) acc.add(sq[i]);
    return std::sqrt(acc.value() / static_cast<double>(keep));
}

double proposal2_consistency(WeightFamily family, double tuning) {
    if (!(tuning > 0.0)) fail(ErrorKind::invalid_argument, "tuning constant must be positive");
    using boost::math::quadrature::gauss_kronrod;
    // phi(z) is below 1e-300 beyond this point
    constexpr double upper = 38.0;
    const auto phi = [](double z) {
        return std::exp(-0.5 * z * z) * 0.5 * std::numbers::sqrt2 * std::numbers::inv_sqrtpi;
    };
    const double inner = std::min(tuning, upper);
    const auto body = [&](double z) { return chi(family, tuning, z) * phi(z); };
    double half = gauss_kronrod<double, 61>::integrate(body, 0.0, inner, 15, 1e-14);
    if (tuning < upper) {
        half += chi(family, tuning, tuning) *
                gauss_kronrod<double, 61>::integrate(phi, tuning, upper, 15, 1e-14);
    }
    return 2.0 * half;
}

GaussianFit huber_proposal2(std::span<const double> scores, const MEstimatorOptions& options) {
    require_scale_data(scores);
    if (!(options.tol > 0.0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
    if (options.max_iter < 1) fail(ErrorKind::invalid_argument, "max_iter must be at least 1");

    const double scale0 = nmad(scores);
    if (!(scale0 > 0.0)) fail(ErrorKind::numeric, "degenerate scale");
    const double kappa = proposal2_consistency(options.family, options.tuning);
    const double dof = static_cast<double>(scores.size() - 1);

    GaussianFit fit;
    fit.estimator.joint = true;
    fit.estimator.family = options.family;
    fit.center = median(scores);
    fit.scale = scale0;
    fit.converged = false;

    for (int it = 1; it <= options.max_iter; ++it) {
        Accumulator shift;
        Accumulator weights;
        Accumulator chi_sum;
        for (double x : scores) {
            const double r = (x - fit.center) / fit.scale;
            const double w = weight(options.family, options.tuning, r);
            shift.add(w * (x - fit.center));
            weights.add(w);
            chi_sum.add(chi(options.family, options.tuning, r));
        }
        if (!(weights.value() > 0.0)) fail(ErrorKind::numeric, "estimator collapsed");
        const double center = fit.center + shift.value() / weights.value();
        const double scale = fit.scale * std::sqrt(chi_sum.value() / (dof * kappa));
        if (!(scale > 0.0) || !std::isfinite(center)) fail(ErrorKind::numeric, "estimator collapsed");

        const double step = std::max(std::fabs(center - fit.center), std::fabs(scale - fit.scale));
        fit.center = center;
        fit.scale = scale;
        fit.iterations = it;
        if (step / scale0 < options.tol) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

std::string_view to_string(CenterEstimator c) {
    switch (c) {
        case CenterEstimator::mean: return "mean";
        case CenterEstimator::median: return "median";
        case CenterEstimator::trimmed_mean: return "trim";
    }
    return "?";
}

std::string_view to_string(ScaleEstimator s) {
    switch (s) {
        case ScaleEstimator::sd: return "sd";
        case ScaleEstimator::nmad: return "nmad";
        case ScaleEstimator::niqr: return "niqr";
        case ScaleEstimator::trimmed_sd: return "tsd";
    }
    return "?";
}

std::string_view to_string(WeightFamily f) {
    return f == WeightFamily::huber_t ? "huber" : "tukey";
}

}  // namespace robscale
