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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robscale/detector.hpp"
#include "robscale/metrics.hpp"
#include "robscale/ranking.hpp"
#include "robscale/transforms.hpp"

// All files are comma-separated UTF-8 text with a header row and '.' as the
// decimal separator. Reals carry 17 significant digits and survive a
// write/read cycle bit for bit. Writers go through a temporary file and a
// rename.

namespace robscale {

inline constexpr const char* kVersion = "0.1.0";

/// Features are every column except `label_column`. Label tokens are
/// 0/1 or no/yes (case-insensitive). An empty `label_column` reads no labels.
Dataset read_dataset(const std::filesystem::path& path, std::string_view label_column);

/// id,score[,label]
struct ScoreFile {
    std::vector<std::string> ids;
    ScoreVector scores;
    std::optional<LabelVector> labels;
};

ScoreFile read_scores(const std::filesystem::path& path);
void write_scores(const ScoreFile& file, const std::filesystem::path& path);

/// Row ids 1..N as strings, for scores computed from a Dataset.
std::vector<std::string> row_ids(std::size_t n);

/// id,<transform id>,<transform id>,...  One column per probability vector.
struct ProbabilityTable {
    std::vector<std::string> ids;
    std::vector<ProbabilityVector> columns;
};

void write_probabilities(std::span<const std::string> ids, std::span<const ProbabilityVector> columns,
                         const std::filesystem::path& path);
ProbabilityTable read_probabilities(const std::filesystem::path& path);

/// Reads every *.csv in `dir` (sorted by file name) and merges the columns.
/// All files must list the same ids in the same order.
ProbabilityTable read_probability_dir(const std::filesystem::path& dir);

/// transform,measure,stratum,value,skill  (skill empty when not computed)
void write_report(const MetricReport& report, const std::filesystem::path& path);
MetricReport read_report(const std::filesystem::path& path);

enum class PlotKind { score_hist, transform_curve, prob_hist, residuals };

struct PlotInput {
    std::span<const std::string> ids;
    std::span<const double> scores;
    const LabelVector* labels = nullptr;  // required for residuals, optional elsewhere
    std::span<const TransformSpec> specs;
    int bins = 10;
};

/// score_hist: equal-width histogram of the scores with the Gaussian density of
///   every gaussian spec at each bin midpoint.
/// transform_curve: per score bin the midpoint, the outlier fraction, and each
///   transform evaluated at the midpoint.
/// prob_hist: per transform, histogram of probabilities split into inliers/outliers.
/// residuals: |y_i - p_i| per observation, stratum and transform.
void write_plotdata(PlotKind kind, const PlotInput& input, const std::filesystem::path& path);

std::string_view to_string(PlotKind kind);

struct ComparisonSettings {
    Measure measure = Measure::his;
    Stratum stratum = Stratum::stratified;
    double alpha = 0.05;
    Alternative alternative = Alternative::two_sided;
};

/// JSON: ranking (best first), pairwise tests with Holm-adjusted p-values, groups.
void write_comparison(const Comparison& comparison, const ComparisonSettings& settings,
                      const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    struct Input {
        std::string path;
        std::string sha256;
    };
    std::string command;
    std::vector<Input> inputs;
    std::vector<std::string> transforms;
    double trim_fraction = kDefaultTrim;
    double huber_tuning = kHuberTuning;
    double tukey_tuning = kTukeyTuning;
    std::size_t k = 0;  // 0 when no detector ran
    bool minmax = false;
    BinScheme bins;
    std::vector<unsigned long long> seeds;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Formats a double with 17 significant digits.
std::string format_real(double v);

}  // namespace robscale
