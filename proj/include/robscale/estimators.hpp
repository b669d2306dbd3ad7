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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace robscale {

/// Outlier scores of one detector run, index-aligned with the dataset rows.
/// Every element is finite; the vector may be empty (estimators reject it).
class ScoreVector {
public:
    ScoreVector() = default;
    explicit ScoreVector(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    operator std::span<const double>() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

enum class CenterEstimator { mean, median, trimmed_mean };
enum class ScaleEstimator { sd, nmad, niqr, trimmed_sd };
enum class WeightFamily { huber_t, tukey_biweight };

inline constexpr double kNmadConstant = 1.4826;
inline constexpr double kNiqrConstant = 1.3489795;
inline constexpr double kHuberTuning = 1.345;
inline constexpr double kTukeyTuning = 4.685;
inline constexpr double kDefaultTrim = 0.10;

/// Identifies which estimator (pair) produced a GaussianFit.
struct EstimatorId {
    bool joint = false;
    CenterEstimator center = CenterEstimator::mean;
    ScaleEstimator scale = ScaleEstimator::sd;
    WeightFamily family = WeightFamily::huber_t;  // only meaningful when joint

    friend bool operator==(const EstimatorId&, const EstimatorId&) = default;
};

struct GaussianFit {
    double center = 0.0;
    double center_lo = 0.0;  // low-order part; the fitted center is center + center_lo
    double scale = 0.0;
    EstimatorId estimator;
    bool converged = true;
    int iterations = 0;

    /// s minus the fitted center.
    double residual(double s) const { return (s - center) - center_lo; }
};

double sample_mean(std::span<const double> scores);
double sample_sd(std::span<const double> scores);
double median(std::span<const double> scores);

/// Linear-interpolation (type 7) quantile, q in [0,1].
double quantile(std::span<const double> scores, double q);

/// Mean after dropping the floor(trim_fraction * N) largest values.
double trimmed_mean_upper(std::span<const double> scores, double trim_fraction);

double nmad(std::span<const double> scores);
double niqr(std::span<const double> scores);

/// Root mean of the squared deviations from `center` that survive dropping
/// the floor(trim_fraction * N) largest ones.
double trimmed_sd(std::span<const double> scores, double center, double trim_fraction);

struct MEstimatorOptions {
    WeightFamily family = WeightFamily::huber_t;
    double tuning = kHuberTuning;
    double tol = 1e-8;
    int max_iter = 50;
};

/// E[chi(Z)] for standard normal Z, where chi is psi^2 for Huber's T and the
/// biweight rho for Tukey; the proposal-2 consistency constant.
double proposal2_consistency(WeightFamily family, double tuning);

/// Joint center/scale M-estimate (Huber's proposal 2), started from
/// median/nMAD. Non-convergence is reported through GaussianFit::converged.
GaussianFit huber_proposal2(std::span<const double> scores, const MEstimatorOptions& options = {});

std::string_view to_string(CenterEstimator c);
std::string_view to_string(ScaleEstimator s);
std::string_view to_string(WeightFamily f);

}  // namespace robscale
