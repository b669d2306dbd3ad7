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

#include "robscale/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robscale/error.hpp"

namespace robscale {

Dataset::Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
                 std::optional<LabelVector> labels)
    : rows_(rows), cols_(cols), values_(std::move(values)), labels_(std::move(labels)) {
    if (rows_ < 2) fail(ErrorKind::invalid_argument, "dataset needs at least 2 rows");
    if (cols_ < 1) fail(ErrorKind::invalid_argument, "dataset needs at least 1 feature");
    if (values_.size() != rows_ * cols_) fail(ErrorKind::invalid_argument, "dataset shape mismatch");
    if (labels_ && labels_->size() != rows_) fail(ErrorKind::invalid_argument, "label count mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            fail(ErrorKind::invalid_argument, "non-finite feature in row " + std::to_string(i / cols_ + 1));
    }
}

Dataset Dataset::minmax_normalized() const {
    std::vector<double> out = values_;
    for (std::size_t c = 0; c < cols_; ++c) {
        double lo = out[c], hi = out[c];
        for (std::size_t r = 0; r < rows_; ++r) {
            lo = std::min(lo, out[r * cols_ + c]);
            hi = std::max(hi, out[r * cols_ + c]);
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < rows_; ++r) {
            double& v = out[r * cols_ + c];
            v = range > 0.0 ? (v - lo) / range : 0.0;
        }
    }
    return Dataset(rows_, cols_, std::move(out), labels_);
}

ScoreVector knn_scores(const Dataset& data, std::size_t k) {
    const std::size_t n = data.rows();
    if (k < 1 || k > n - 1)
        fail(ErrorKind::invalid_argument, "k must lie in [1, " + std::to_string(n - 1) + "]");

    std::vector<double> scores(n);
    std::vector<double> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        const auto xi = data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto xj = data.row(j);
            double sq = 0.0;
            for (std::size_t c = 0; c < xi.size(); ++c) {
                const double d = xi[c] - xj[c];
                sq += d * d;
            }
            dist.push_back(sq);
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
        scores[i] = std::sqrt(dist[k - 1]);
    }
    return ScoreVector(std::move(scores));
}

}  // namespace robscale
