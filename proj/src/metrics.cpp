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

#include "robscale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "robscale/error.hpp"

namespace robscale {

namespace {

bool in_stratum(std::uint8_t label, Stratum s) {
    switch (s) {
        case Stratum::all: return true;
        case Stratum::outliers: return label == 1;
        case Stratum::inliers: return label == 0;
        case Stratum::stratified: break;
    }
    fail(ErrorKind::invalid_argument, "stratum 'stratified' only applies to harmonic improvement rows");
}

std::size_t stratum_size(const LabelVector& y, Stratum s) {
    switch (s) {
        case Stratum::all: return y.size();
        case Stratum::outliers: return y.outlier_count();
        case Stratum::inliers: return y.inlier_count();
        case Stratum::stratified: break;
    }
    fail(ErrorKind::invalid_argument, "stratum 'stratified' only applies to harmonic improvement rows");
}

void check_inputs(std::span<const double> p, const LabelVector& y, Stratum s) {
    if (p.size() != y.size())
        fail(ErrorKind::invalid_argument, "probabilities and labels differ in length");
    if (stratum_size(y, s) == 0) fail(ErrorKind::invalid_argument, "undefined stratified measure");
}

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

enum class BinStatistic { gini, l1 };

double binned(std::span<const double> p, const LabelVector& y, const BinScheme& scheme,
              Stratum stratum, BinStatistic stat) {
    scheme.validate();
    check_inputs(p, y, stratum);
    const double members = static_cast<double>(stratum_size(y, stratum));

    double total = 0.0;
    for (int bins = scheme.min_bins; bins <= scheme.max_bins; ++bins) {
        std::vector<double> count(bins, 0.0), outliers(bins, 0.0), psum(bins, 0.0), weight(bins, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto b = bin_index(p[i], bins);
            count[b] += 1.0;
            outliers[b] += y[i];
            psum[b] += p[i];
            if (in_stratum(y[i], stratum)) weight[b] += 1.0;
        }
        double value = 0.0;
        for (int b = 0; b < bins; ++b) {
            if (weight[b] == 0.0) continue;
            const double q = outliers[b] / count[b];
            const double stat_b = stat == BinStatistic::gini ? 2.0 * q * (1.0 - q)
                                                             : std::fabs(psum[b] / count[b] - q);
            value += weight[b] / members * stat_b;
        }
        total += value;
    }
    return total / static_cast<double>(scheme.max_bins - scheme.min_bins + 1);
}

}  // namespace

LabelVector::LabelVector(std::vector<std::uint8_t> values) : values_(std::move(values)) {
    for (auto v : values_) {
        if (v > 1) fail(ErrorKind::invalid_argument, "labels must be 0 or 1");
        outliers_ += v;
    }
}

std::string_view to_string(Stratum s) {
    switch (s) {
        case Stratum::all: return "all";
        case Stratum::outliers: return "outliers";
        case Stratum::inliers: return "inliers";
        case Stratum::stratified: return "stratified";
    }
    return "?";
}

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::brier: return "brier";
        case Measure::sharpness: return "sharpness";
        case Measure::refinement: return "refinement";
        case Measure::calibration: return "calibration";
        case Measure::his: return "his";
    }
    return "?";
}

Stratum parse_stratum(std::string_view s) {
    for (auto v : {Stratum::all, Stratum::outliers, Stratum::inliers, Stratum::stratified})
        if (to_string(v) == s) return v;
    fail(ErrorKind::invalid_argument, "unknown stratum '" + std::string(s) + "'");
}

Measure parse_measure(std::string_view m) {
    for (auto v : {Measure::brier, Measure::sharpness, Measure::refinement, Measure::calibration, Measure::his})
        if (to_string(v) == m) return v;
    fail(ErrorKind::invalid_argument, "unknown measure '" + std::string(m) + "'");
}

void BinScheme::validate() const {
    if (min_bins < 1 || max_bins < min_bins)
        fail(ErrorKind::invalid_argument, "bin range must satisfy 1 <= min <= max");
}

std::size_t bin_index(double p, int bins) {
    const auto n = static_cast<std::size_t>(bins);
    std::size_t idx = static_cast<std::size_t>(std::clamp(std::floor(p * bins), 0.0, bins - 1.0));
    // Settle against the edges k / bins.
    while (idx > 0 && p < static_cast<double>(idx) / bins) --idx;
    while (idx + 1 < n && p >= static_cast<double>(idx + 1) / bins) ++idx;
    return idx;
}

double brier(std::span<const double> p, const LabelVector& y, Stratum stratum) {
    check_inputs(p, y, stratum);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!in_stratum(y[i], stratum)) continue;
        const double d = p[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(stratum_size(y, stratum));
}

double sharpness(std::span<const double> p, const LabelVector& y, Stratum stratum) {
    check_inputs(p, y, stratum);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (in_stratum(y[i], stratum)) sum += binary_entropy(p[i]);
    return sum / static_cast<double>(stratum_size(y, stratum));
}

double refinement(std::span<const double> p, const LabelVector& y, const BinScheme& scheme,
                  Stratum stratum) {
    return binned(p, y, scheme, stratum, BinStatistic::gini);
}

double calibration(std::span<const double> p, const LabelVector& y, const BinScheme& scheme,
                   Stratum stratum) {
    return binned(p, y, scheme, stratum, BinStatistic::l1);
}

double evaluate_measure(Measure m, std::span<const double> p, const LabelVector& y,
                        const BinScheme& scheme, Stratum stratum) {
    switch (m) {
        case Measure::brier: return brier(p, y, stratum);
        case Measure::sharpness: return sharpness(p, y, stratum);
        case Measure::refinement: return refinement(p, y, scheme, stratum);
        case Measure::calibration: return calibration(p, y, scheme, stratum);
        case Measure::his: break;
    }
    fail(ErrorKind::invalid_argument, "harmonic improvement needs a population; use evaluate_all");
}

double skill_score(double m, double m_ref) {
    return std::log2(std::max(m_ref, kSkillFloor) / std::max(m, kSkillFloor));
}

double harmonic_improvement(std::span<const double> values, std::span<const double> population_means) {
    if (values.empty() || values.size() != population_means.size())
        fail(ErrorKind::invalid_argument, "harmonic improvement needs matching, non-empty inputs");
    double inv_sum = 0.0;
    bool zero = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(population_means[i] > 0.0)) fail(ErrorKind::numeric, "degenerate population");
        if (values[i] < 0.0) fail(ErrorKind::invalid_argument, "measure values must be non-negative");
        const double ratio = values[i] / population_means[i];
        if (ratio == 0.0) zero = true;
        else inv_sum += 1.0 / ratio;
    }
    if (zero) return 0.0;
    return static_cast<double>(values.size()) / inv_sum;
}

void MetricReport::add(MetricRow row) {
    auto key = std::make_tuple(row.transform, row.measure, row.stratum);
    if (index_.count(key))
        fail(ErrorKind::invalid_argument, "duplicate report row for " + row.transform + "/" +
                                              std::string(to_string(row.measure)) + "/" +
                                              std::string(to_string(row.stratum)));
    index_.emplace(std::move(key), rows_.size());
    rows_.push_back(std::move(row));
}

const MetricRow* MetricReport::find(std::string_view transform, Measure m, Stratum s) const {
    const auto it = index_.find(std::make_tuple(std::string(transform), m, s));
    return it == index_.end() ? nullptr : &rows_[it->second];
}

std::optional<double> MetricReport::value(std::string_view transform, Measure m, Stratum s) const {
    const auto* row = find(transform, m, s);
    if (!row) return std::nullopt;
    return row->value;
}

std::vector<std::string> MetricReport::transforms() const {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    for (const auto& r : rows_)
        if (seen.insert(r.transform).second) out.push_back(r.transform);
    return out;
}

MetricReport evaluate_all(std::span<const ProbabilityVector> collection, const LabelVector& y,
                          const BinScheme& scheme, std::string_view reference) {
    scheme.validate();
    std::set<std::string, std::less<>> ids;
    for (const auto& p : collection) {
        if (p.size() != y.size())
            fail(ErrorKind::invalid_argument, "probabilities '" + p.transform_id() + "' not aligned with labels");
        if (!ids.insert(p.transform_id()).second)
            fail(ErrorKind::invalid_argument, "duplicate transform id '" + p.transform_id() + "'");
    }
    if (!reference.empty() && !ids.count(reference))
        fail(ErrorKind::invalid_argument, "reference transform '" + std::string(reference) + "' not evaluated");

    constexpr Measure base_measures[] = {Measure::brier, Measure::sharpness, Measure::refinement,
                                         Measure::calibration};
    constexpr Stratum base_strata[] = {Stratum::all, Stratum::outliers, Stratum::inliers};

    MetricReport base;
    for (const auto& p : collection) {
        for (Measure m : base_measures) {
            for (Stratum s : base_strata) {
                if (stratum_size(y, s) == 0) continue;
                base.add({p.transform_id(), m, s, evaluate_measure(m, p.values(), y, scheme, s), {}});
            }
        }
    }

    // Harmonic improvement groups: (stratum label, component (measure, stratum) pairs).
    constexpr Measure his_measures[] = {Measure::sharpness, Measure::refinement, Measure::calibration};
    std::vector<std::pair<Stratum, std::vector<std::pair<Measure, Stratum>>>> groups;
    for (Stratum s : base_strata) {
        std::vector<std::pair<Measure, Stratum>> parts;
        for (Measure m : his_measures) parts.emplace_back(m, s);
        groups.emplace_back(s, std::move(parts));
    }
    {
        std::vector<std::pair<Measure, Stratum>> parts;
        for (Stratum s : {Stratum::outliers, Stratum::inliers})
            for (Measure m : his_measures) parts.emplace_back(m, s);
        groups.emplace_back(Stratum::stratified, std::move(parts));
    }

    MetricReport report = base;
    if (!collection.empty()) {
        for (const auto& [label, parts] : groups) {
            std::vector<double> means;
            bool usable = true;
            for (const auto& [m, s] : parts) {
                if (stratum_size(y, s) == 0) { usable = false; break; }
                double sum = 0.0;
                for (const auto& p : collection) sum += *base.value(p.transform_id(), m, s);
                means.push_back(sum / static_cast<double>(collection.size()));
                if (!(means.back() > 0.0)) { usable = false; break; }
            }
            if (!usable) continue;
            for (const auto& p : collection) {
                std::vector<double> values;
                for (const auto& [m, s] : parts) values.push_back(*base.value(p.transform_id(), m, s));
                report.add({p.transform_id(), Measure::his, label, harmonic_improvement(values, means), {}});
            }
        }
    }

    if (!reference.empty()) {
        MetricReport with_skill;
        for (auto row : report.rows()) {
            if (const auto ref = report.value(reference, row.measure, row.stratum))
                row.skill = skill_score(row.value, *ref);
            with_skill.add(std::move(row));
        }
        return with_skill;
    }
    return report;
}

}  // namespace robscale
