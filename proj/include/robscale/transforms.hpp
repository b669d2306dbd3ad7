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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robscale/estimators.hpp"

namespace robscale {

enum class TransformKind { linear, gaussian };

/// Declarative identity of one score-to-probability transformation.
///
/// For kind == gaussian exactly one of the two estimation routes is active:
/// the separate (center, scale) pair, or a joint M-estimator when `joint` is set.
struct TransformSpec {
    TransformKind kind = TransformKind::linear;
    CenterEstimator center = CenterEstimator::mean;
    ScaleEstimator scale = ScaleEstimator::sd;
    std::optional<WeightFamily> joint;

    double trim_fraction = kDefaultTrim;
    double huber_tuning = kHuberTuning;
    double tukey_tuning = kTukeyTuning;
    double tol = 1e-8;
    int max_iter = 50;

    static TransformSpec linear();
    static TransformSpec gaussian(CenterEstimator c, ScaleEstimator s);
    static TransformSpec m_estimator(WeightFamily family);

    /// Parses the public method names: "linear", "gauss:<center>:<scale>"
    /// with center in {mean, median, trim} and scale in {sd, nmad, niqr, tsd},
    /// "gauss:huber" and "gauss:tukey".
    static TransformSpec parse(std::string_view name);

    /// Stable public name, the inverse of parse().
    std::string name() const;

    /// Throws if the spec violates its invariants.
    void validate() const;
};

/// The twelve transformations compared in the benchmark, in canonical order:
/// linear, gauss:mean:sd, the eight center x scale combinations, huber, tukey.
const std::vector<TransformSpec>& registry();
std::vector<std::string> registry_names();

/// Outlier probabilities aligned with their source scores.
class ProbabilityVector {
public:
    ProbabilityVector() = default;
    ProbabilityVector(std::vector<double> values, std::string transform_id);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::string& transform_id() const noexcept { return transform_id_; }

private:
    std::vector<double> values_;
    std::string transform_id_;
};

/// Min-max scaling to [0,1]; a constant input maps to all zeros.
ProbabilityVector linear_scale(std::span<const double> scores);

/// p = max(0, erf((s - center) / (scale * sqrt 2))). A zero scale gives the
/// limiting step: 0 at or below the center, 1 above it.
ProbabilityVector gaussian_scale(std::span<const double> scores, const GaussianFit& fit);

/// Estimates the Gaussian parameters a gaussian spec would use.
GaussianFit fit_gaussian(const TransformSpec& spec, std::span<const double> scores);

/// A transform fitted to one score set, callable on arbitrary score values.
struct FittedTransform {
    TransformSpec spec;
    double min = 0.0;  // linear only
    double max = 0.0;  // linear only
    GaussianFit fit;   // gaussian only

    double operator()(double score) const;
};

FittedTransform fit_transform(const TransformSpec& spec, std::span<const double> scores);

/// Fits `spec` on `scores` and maps the same scores to probabilities.
ProbabilityVector apply(const TransformSpec& spec, std::span<const double> scores);

}  // namespace robscale
