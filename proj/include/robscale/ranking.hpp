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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace robscale {

/// Rows are score sets, columns are transforms; lower cell values are better.
/// Missing cells are std::nullopt.
struct PerformanceMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    /// Rows without a missing cell, as plain values.
    std::vector<std::vector<double>> complete_rows() const;
    std::size_t dropped_rows() const;
};

/// Ascending ranks (1-based) with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Column means of the within-row ranks over the complete rows.
std::vector<double> mean_ranks(const PerformanceMatrix& m);

enum class Alternative { two_sided, greater, less };
enum class WilcoxonMethod { automatic, exact, normal };

struct WilcoxonResult {
    double p_value = 1.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n = 0;     // nonzero differences
    bool exact = false;
    bool degenerate = false;  // every difference was zero
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Wilcoxon signed-rank test on d = x - y. Zero differences are dropped;
/// `greater` tests whether x tends to exceed y. The automatic method is exact
/// for n <= 25 without ties in |d|, otherwise the normal approximation with
/// tie and continuity correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative = Alternative::two_sided,
                                    WilcoxonMethod method = WilcoxonMethod::automatic);

struct HolmResult {
    std::vector<double> adjusted;  // original order
    std::vector<bool> rejected;
};

HolmResult holm_bonferroni(std::span<const double> p_values, double alpha = 0.05);

/// Rank-contiguous maximal groups with no rejected pair inside.
/// `order` lists method indices sorted by mean rank; `rejected` is a symmetric
/// k x k matrix indexed by method. Groups hold method indices in rank order.
std::vector<std::vector<std::size_t>> indistinguishable_groups(
    std::span<const std::size_t> order, const std::vector<std::vector<bool>>& rejected);

struct PairwiseComparison {
    std::size_t a = 0;
    std::size_t b = 0;
    WilcoxonResult test;
    double p_adjusted = 1.0;
    bool rejected = false;
};

struct Comparison {
    std::vector<std::string> methods;
    std::vector<double> mean_ranks;
    std::vector<std::size_t> order;  // methods sorted by mean rank
    std::vector<PairwiseComparison> pairs;
    std::vector<std::vector<std::size_t>> groups;
    std::size_t rows_used = 0;
    std::size_t rows_dropped = 0;
};

/// Mean ranks, all pairwise Wilcoxon tests with Holm correction, and groups.
Comparison compare_methods(const PerformanceMatrix& m, double alpha = 0.05,
                           Alternative alternative = Alternative::two_sided);

}  // namespace robscale
