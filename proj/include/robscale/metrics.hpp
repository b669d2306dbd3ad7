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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "robscale/transforms.hpp"

namespace robscale {

/// Ground-truth labels, 1 = outlier. Used for evaluation only.
class LabelVector {
public:
    LabelVector() = default;
    explicit LabelVector(std::vector<std::uint8_t> values);

    std::span<const std::uint8_t> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::uint8_t operator[](std::size_t i) const { return values_[i]; }
    std::size_t outlier_count() const noexcept { return outliers_; }
    std::size_t inlier_count() const noexcept { return values_.size() - outliers_; }

private:
    std::vector<std::uint8_t> values_;
    std::size_t outliers_ = 0;
};

enum class Stratum { all, outliers, inliers, stratified };
enum class Measure { brier, sharpness, refinement, calibration, his };

std::string_view to_string(Stratum s);
std::string_view to_string(Measure m);
Stratum parse_stratum(std::string_view s);
Measure parse_measure(std::string_view m);

/// Equal-width binnings of [0,1]; binned measures are averaged over every
/// bin count in [min_bins, max_bins]. The last bin is closed on the right.
struct BinScheme {
    int min_bins = 5;
    int max_bins = 20;

    void validate() const;
};

/// Index of the bin holding p among `bins` equal-width bins, with edges k/bins.
std::size_t bin_index(double p, int bins);

/// Mean squared error (p - y)^2 over the stratum. Stratum must be all,
/// outliers or inliers; an empty stratum throws.
double brier(std::span<const double> p, const LabelVector& y, Stratum stratum);

/// Mean binary entropy (base 2) over the stratum.
double sharpness(std::span<const double> p, const LabelVector& y, Stratum stratum);

/// Binned Gini impurity 2q(1-q). Bin statistics use every observation; the
/// stratum only decides the bin weights (stratum members in bin / stratum size).
double refinement(std::span<const double> p, const LabelVector& y, const BinScheme& scheme,
                  Stratum stratum);

/// Binned L1 calibration error |mean p - outlier fraction|, weighted as refinement.
double calibration(std::span<const double> p, const LabelVector& y, const BinScheme& scheme,
                   Stratum stratum);

double evaluate_measure(Measure m, std::span<const double> p, const LabelVector& y,
                        const BinScheme& scheme, Stratum stratum);

inline constexpr double kSkillFloor = 1e-12;

/// -log2(m / m_ref), with both arguments floored at kSkillFloor.
double skill_score(double m, double m_ref);

/// Harmonic mean of values[i] / population_means[i]; 0 if any ratio is 0.
double harmonic_improvement(std::span<const double> values, std::span<const double> population_means);

struct MetricRow {
    std::string transform;
    Measure measure = Measure::brier;
    Stratum stratum = Stratum::all;
    double value = 0.0;
    std::optional<double> skill;  // vs the reference transform, same measure and stratum
};

/// Rows keyed by (transform, measure, stratum), kept in insertion order.
class MetricReport {
public:
    void add(MetricRow row);
    const std::vector<MetricRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::optional<double> value(std::string_view transform, Measure m, Stratum s) const;
    const MetricRow* find(std::string_view transform, Measure m, Stratum s) const;
    std::vector<std::string> transforms() const;

private:
    std::vector<MetricRow> rows_;
    std::map<std::tuple<std::string, Measure, Stratum>, std::size_t, std::less<>> index_;
};

/// Evaluates every probability vector for the four measures and three strata,
/// then adds harmonic-improvement rows (measure his) for each of all, outliers,
/// inliers over sharpness/refinement/calibration, and for stratified over the
/// six outlier+inlier values. The population is the evaluated collection.
/// If `reference` is non-empty every row gets a skill score against it.
/// Rows whose stratum is empty, or whose HIS population is degenerate, are omitted.
MetricReport evaluate_all(std::span<const ProbabilityVector> collection, const LabelVector& y,
                          const BinScheme& scheme, std::string_view reference);

}  // namespace robscale
