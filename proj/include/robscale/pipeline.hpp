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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robscale/dataio.hpp"
#include "robscale/metrics.hpp"
#include "robscale/ranking.hpp"
#include "robscale/transforms.hpp"

// File-to-file steps behind the command line: detect, transform, evaluate,
// compare and the two-method case study.

namespace robscale {

struct TransformOptions {
    double trim_fraction = kDefaultTrim;
    double huber_tuning = kHuberTuning;
    double tukey_tuning = kTukeyTuning;
    double tol = 1e-8;
    int max_iter = 50;
};

/// Resolves public method names ("all" expands to the registry) and applies
/// the options to every spec. Duplicates are dropped, order is preserved.
std::vector<TransformSpec> resolve_methods(std::span<const std::string> names, const TransformOptions& options);

/// "gauss:median:nmad" -> "gauss_median_nmad.csv"
std::string probability_file_name(const TransformSpec& spec);

void detect_to_file(const std::filesystem::path& data, const std::string& label_column, std::size_t k,
                    bool minmax, const std::filesystem::path& out);

/// One probability file per spec in `out_dir`, plus manifest.json.
/// Returns the files written.
std::vector<std::filesystem::path> transform_to_dir(const std::filesystem::path& scores,
                                                    std::span<const TransformSpec> specs,
                                                    const std::filesystem::path& out_dir);

/// Reads the probability files in `probs_dir`, aligns them with the labelled
/// score file by id, and evaluates. Throws if the label file has no labels.
MetricReport evaluate_dir(const std::filesystem::path& probs_dir, const std::filesystem::path& labels,
                          const BinScheme& scheme, const std::string& reference);

/// One matrix row per report; columns are the transforms in first-seen order.
PerformanceMatrix performance_matrix(std::span<const MetricReport> reports, Measure measure, Stratum stratum);

/// Stratum used when a measure name is given without one.
Stratum default_stratum(Measure m);

struct Figure1Summary {
    std::string input_sha256;
    // transform name -> (mean outlier residual, mean inlier residual)
    std::map<std::string, std::pair<double, double>> mean_residuals;
};

inline constexpr const char* kFigureReference = "gauss:mean:sd";
inline constexpr const char* kFigureRobust = "gauss:median:nmad";

/// kNN scores on `data`, then score_hist.csv, transform_curve.csv,
/// prob_hist.csv, residuals.csv, scores.csv and manifest.json in `out_dir`
/// for gauss:mean:sd and gauss:median:nmad.
Figure1Summary figure1(const std::filesystem::path& data, const std::string& label_column, std::size_t k,
                       bool minmax, const std::filesystem::path& out_dir);

}  // namespace robscale
