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
#include <vector>

#include "robscale/estimators.hpp"
#include "robscale/metrics.hpp"

namespace robscale {

/// N observations x n features, row-major, all finite, N >= 2.
class Dataset {
public:
    Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
            std::optional<LabelVector> labels = std::nullopt);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    const std::optional<LabelVector>& labels() const noexcept { return labels_; }

    /// Per-feature min-max scaling to [0,1]; constant features become 0.
    Dataset minmax_normalized() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    std::optional<LabelVector> labels_;
};

inline constexpr std::size_t kDefaultK = 5;

/// Euclidean distance from each observation to its k-th nearest other
/// observation (self excluded, duplicates count as distance 0). O(N^2).
ScoreVector knn_scores(const Dataset& data, std::size_t k = kDefaultK);

}  // namespace robscale
