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

#include "robscale/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "robscale/error.hpp"
#include "robscale/special.hpp"

namespace robscale {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void unknown_method(std::string_view name) {
    std::string msg = "unknown method '" + std::string(name) + "'; valid names:";
    for (const auto& n : registry_names()) msg += " " + n;
    msg += " (also gauss:<center>:tsd)";
    fail(ErrorKind::invalid_argument, msg);
}

double center_of(const TransformSpec& spec, std::span<const double> s) {
    switch (spec.center) {
        case CenterEstimator::mean: return sample_mean(s);
        case CenterEstimator::median: return median(s);
        case CenterEstimator::trimmed_mean: return trimmed_mean_upper(s, spec.trim_fraction);
    }
    fail(ErrorKind::invalid_argument, "bad center estimator");
}

double scale_of(const TransformSpec& spec, std::span<const double> s, double center) {
    switch (spec.scale) {
        case ScaleEstimator::sd: return sample_sd(s);
        case ScaleEstimator::nmad: return nmad(s);
        case ScaleEstimator::niqr: return niqr(s);
        case ScaleEstimator::trimmed_sd: return trimmed_sd(s, center, spec.trim_fraction);
    }
    fail(ErrorKind::invalid_argument, "bad scale estimator");
}

}  // namespace

TransformSpec TransformSpec::linear() { return {}; }

TransformSpec TransformSpec::gaussian(CenterEstimator c, ScaleEstimator s) {
    TransformSpec t;
    t.kind = TransformKind::gaussian;
    t.center = c;
    t.scale = s;
    return t;
}

TransformSpec TransformSpec::m_estimator(WeightFamily family) {
    TransformSpec t;
    t.kind = TransformKind::gaussian;
    t.joint = family;
    return t;
}

TransformSpec TransformSpec::parse(std::string_view name) {
    if (name == "linear") return linear();
    const auto parts = split(name, ':');
    if (parts.empty() || parts[0] != "gauss") unknown_method(name);
    if (parts.size() == 2) {
        if (parts[1] == "huber") return m_estimator(WeightFamily::huber_t);
        if (parts[1] == "tukey") return m_estimator(WeightFamily::tukey_biweight);
        unknown_method(name);
    }
    if (parts.size() != 3) unknown_method(name);

    CenterEstimator c;
    if (parts[1] == "mean") c = CenterEstimator::mean;
    else if (parts[1] == "median") c = CenterEstimator::median;
    else if (parts[1] == "trim") c = CenterEstimator::trimmed_mean;
    else unknown_method(name);

    ScaleEstimator s;
    if (parts[2] == "sd") s = ScaleEstimator::sd;
    else if (parts[2] == "nmad") s = ScaleEstimator::nmad;
    else if (parts[2] == "niqr") s = ScaleEstimator::niqr;
    else if (parts[2] == "tsd") s = ScaleEstimator::trimmed_sd;
    else unknown_method(name);

    return gaussian(c, s);
}

std::string TransformSpec::name() const {
    if (kind == TransformKind::linear) return "linear";
    if (joint) return "gauss:" + std::string(to_string(*joint));
    return "gauss:" + std::string(to_string(center)) + ":" + std::string(to_string(scale));
}

void TransformSpec::validate() const {
    if (!(trim_fraction >= 0.0 && trim_fraction < 1.0))
        fail(ErrorKind::invalid_argument, "trim fraction must lie in [0,1)");
    if (!(huber_tuning > 0.0) || !(tukey_tuning > 0.0))
        fail(ErrorKind::invalid_argument, "tuning constant must be positive");
    if (!(tol > 0.0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
    if (max_iter < 1) fail(ErrorKind::invalid_argument, "max_iter must be at least 1");
}

const std::vector<TransformSpec>& registry() {
    static const std::vector<TransformSpec> specs = [] {
        using C = CenterEstimator;
        using S = ScaleEstimator;
        std::vector<TransformSpec> v{TransformSpec::linear(), TransformSpec::gaussian(C::mean, S::sd)};
        for (C c : {C::mean, C::median, C::trimmed_mean}) {
            for (S s : {S::sd, S::nmad, S::niqr}) {
                if (c == C::mean && s == S::sd) continue;
                v.push_back(TransformSpec::gaussian(c, s));
            }
        }
        v.push_back(TransformSpec::m_estimator(WeightFamily::huber_t));
        v.push_back(TransformSpec::m_estimator(WeightFamily::tukey_biweight));
        return v;
    }();
    return specs;
}

std::vector<std::string> registry_names() {
    std::vector<std::string> names;
    for (const auto& s : registry()) names.push_back(s.name());
    return names;
}

ProbabilityVector::ProbabilityVector(std::vector<double> values, std::string transform_id)
    : values_(std::move(values)), transform_id_(std::move(transform_id)) {
    for (double p : values_) {
        if (!(p >= 0.0 && p <= 1.0))
            fail(ErrorKind::invalid_argument, "probability outside [0,1]");
    }
}

ProbabilityVector linear_scale(std::span<const double> scores) {
    if (scores.empty()) fail(ErrorKind::invalid_argument, "empty score vector");
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo;
    const double range = *hi - *lo;
    std::vector<double> p(scores.size(), 0.0);
    if (range > 0.0) {
        std::transform(scores.begin(), scores.end(), p.begin(), [&](double s) {
            return std::clamp((s - min) / range, 0.0, 1.0);
        });
    }
    return ProbabilityVector(std::move(p), "linear");
}

namespace {

std::vector<double> gaussian_values(std::span<const double> scores, const GaussianFit& fit) {
    if (!std::isfinite(fit.center) || !std::isfinite(fit.scale))
        fail(ErrorKind::invalid_argument, "non-finite Gaussian fit");
    if (fit.scale < 0.0) fail(ErrorKind::invalid_argument, "negative Gaussian scale");

    std::vector<double> p(scores.size());
    if (fit.scale == 0.0) {
        std::transform(scores.begin(), scores.end(), p.begin(),
                       [&](double s) { return fit.residual(s) > 0.0 ? 1.0 : 0.0; });
    } else {
        const double denom = fit.scale * std::numbers::sqrt2;
        std::transform(scores.begin(), scores.end(), p.begin(), [&](double s) {
            return std::max(0.0, robscale::erf(fit.residual(s) / denom));
        });
    }
    return p;
}

}  // namespace

ProbabilityVector gaussian_scale(std::span<const double> scores, const GaussianFit& fit) {
    return ProbabilityVector(gaussian_values(scores, fit), {});
}

GaussianFit fit_gaussian(const TransformSpec& spec, std::span<const double> scores) {
    if (spec.kind != TransformKind::gaussian)
        fail(ErrorKind::invalid_argument, "fit_gaussian requires a gaussian spec");
    spec.validate();
    if (scores.empty()) fail(ErrorKind::invalid_argument, "empty score vector");

    // Estimate on scores relative to the lower median element, then carry the
    // center as an unevaluated sum origin + offset.
    std::vector<double> shifted(scores.begin(), scores.end());
    const auto mid = shifted.begin() + static_cast<std::ptrdiff_t>((shifted.size() - 1) / 2);
    std::nth_element(shifted.begin(), mid, shifted.end());
    const double origin = *mid;
    for (std::size_t i = 0; i < scores.size(); ++i) shifted[i] = scores[i] - origin;

    GaussianFit fit;
    if (spec.joint) {
        const double start_scale = shifted.size() >= 2 ? nmad(shifted) : 0.0;
        if (start_scale == 0.0) {
            // Zero starting scale: step at the median.
            fit.center = median(scores);
            fit.scale = 0.0;
            fit.estimator.joint = true;
            fit.estimator.family = *spec.joint;
            return fit;
        }
        MEstimatorOptions opt;
        opt.family = *spec.joint;
        opt.tuning = *spec.joint == WeightFamily::huber_t ? spec.huber_tuning : spec.tukey_tuning;
        opt.tol = spec.tol;
        opt.max_iter = spec.max_iter;
        fit = huber_proposal2(shifted, opt);
    } else {
        fit.center = center_of(spec, shifted);
        fit.scale = scale_of(spec, shifted, fit.center);
        fit.estimator.center = spec.center;
        fit.estimator.scale = spec.scale;
    }
    const double offset = fit.center;
    fit.center = origin + offset;
    const double back = fit.center - origin;
    fit.center_lo = (origin - (fit.center - back)) + (offset - back);
    return fit;
}

FittedTransform fit_transform(const TransformSpec& spec, std::span<const double> scores) {
    spec.validate();
    if (scores.empty()) fail(ErrorKind::invalid_argument, "empty score vector");
    FittedTransform f;
    f.spec = spec;
    if (spec.kind == TransformKind::linear) {
        const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
        f.min = *lo;
        f.max = *hi;
    } else {
        f.fit = fit_gaussian(spec, scores);
    }
    return f;
}

double FittedTransform::operator()(double score) const {
    if (spec.kind == TransformKind::linear) {
        const double range = max - min;
        return range > 0.0 ? std::clamp((score - min) / range, 0.0, 1.0) : 0.0;
    }
    if (fit.scale == 0.0) return fit.residual(score) > 0.0 ? 1.0 : 0.0;
    return std::max(0.0, robscale::erf(fit.residual(score) / (fit.scale * std::numbers::sqrt2)));
}

ProbabilityVector apply(const TransformSpec& spec, std::span<const double> scores) {
    if (spec.kind == TransformKind::linear) {
        spec.validate();
        return linear_scale(scores);
    }
    return ProbabilityVector(gaussian_values(scores, fit_gaussian(spec, scores)), spec.name());
}

}  // namespace robscale
