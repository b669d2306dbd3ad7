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

#include "robscale/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robscale/error.hpp"
#include "robscale/special.hpp"

namespace robscale {

std::vector<std::vector<double>> PerformanceMatrix::complete_rows() const {
    std::vector<std::vector<double>> out;
    for (const auto& row : rows) {
        if (row.size() != columns.size()) continue;
        if (!std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); })) continue;
        std::vector<double> values;
        values.reserve(row.size());
        for (const auto& c : row) values.push_back(*c);
        out.push_back(std::move(values));
    }
    return out;
}

std::size_t PerformanceMatrix::dropped_rows() const { return rows.size() - complete_rows().size(); }

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i + 1;
        while (j < idx.size() && values[idx[j]] == values[idx[i]]) ++j;
        // positions i..j-1 share ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[idx[t]] = avg;
        i = j;
    }
    return ranks;
}

std::vector<double> mean_ranks(const PerformanceMatrix& m) {
    const auto rows = m.complete_rows();
    if (rows.empty()) fail(ErrorKind::invalid_argument, "no complete rows to rank");
    std::vector<double> sums(m.columns.size(), 0.0);
    for (const auto& row : rows) {
        const auto r = average_ranks(row);
        for (std::size_t c = 0; c < r.size(); ++c) sums[c] += r[c];
    }
    for (auto& s : sums) s /= static_cast<double>(rows.size());
    return sums;
}

namespace {

// Null distribution of W+ over all 2^n sign assignments. Ranks are doubled so
// average (half-integer) ranks stay integral; counts[s] is the number of
// assignments with 2*W+ == s.
std::vector<double> signed_rank_counts(std::span<const double> ranks) {
    std::size_t total = 0;
    std::vector<std::size_t> doubled;
    for (double r : ranks) {
        doubled.push_back(static_cast<std::size_t>(std::lround(2.0 * r)));
        total += doubled.back();
    }
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (auto r : doubled) {
        reach += r;
        for (std::size_t s = reach; s >= r; --s) {
            counts[s] += counts[s - r];
            if (s == r) break;
        }
    }
    return counts;
}

double exact_p(std::span<const double> ranks, double w_plus, double w_minus, Alternative alt) {
    const auto counts = signed_rank_counts(ranks);
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    const auto at_most = [&](double w) {
        const auto lim = static_cast<std::size_t>(std::lround(2.0 * w));
        double c = 0.0;
        for (std::size_t s = 0; s <= lim && s < counts.size(); ++s) c += counts[s];
        return c / all;
    };
    switch (alt) {
        case Alternative::two_sided: return std::min(1.0, 2.0 * at_most(std::min(w_plus, w_minus)));
        case Alternative::less: return at_most(w_plus);
        // P(W+ >= w+) = P(W- <= w-) by the symmetry of sign flips
        case Alternative::greater: return at_most(w_minus);
    }
    return 1.0;
}

double normal_p(std::span<const double> abs_d, std::span<const double> ranks, double w_plus,
                Alternative alt) {
    const double n = static_cast<double>(ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;

    std::vector<double> sorted(abs_d.begin(), abs_d.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        var -= (t * t * t - t) / 48.0;
        i = j;
    }
    const double sd = std::sqrt(var);
    switch (alt) {
        case Alternative::two_sided: {
            const double z = std::max(0.0, std::fabs(w_plus - mean) - 0.5) / sd;
            return std::min(1.0, 2.0 * normal_cdf(-z));
        }
        case Alternative::greater: return normal_cdf(-(w_plus - mean - 0.5) / sd);
        case Alternative::less: return normal_cdf((w_plus - mean + 0.5) / sd);
    }
    return 1.0;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative, WilcoxonMethod method) {
    if (x.size() != y.size()) fail(ErrorKind::invalid_argument, "paired samples differ in length");

    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        if (!std::isfinite(diff)) fail(ErrorKind::invalid_argument, "non-finite paired value");
        if (diff != 0.0) d.push_back(diff);
    }

    WilcoxonResult res;
    res.n = d.size();
    if (d.empty()) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }

    std::vector<double> abs_d(d.size());
    std::transform(d.begin(), d.end(), abs_d.begin(), [](double v) { return std::fabs(v); });
    const auto ranks = average_ranks(abs_d);
    for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];

    std::vector<double> sorted = abs_d;
    std::sort(sorted.begin(), sorted.end());
    const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();

    bool use_exact = false;
    switch (method) {
        case WilcoxonMethod::automatic: use_exact = !ties && d.size() <= kWilcoxonExactLimit; break;
        case WilcoxonMethod::exact:
            if (d.size() > 60) fail(ErrorKind::invalid_argument, "exact Wilcoxon limited to n <= 60");
            use_exact = true;
            break;
        case WilcoxonMethod::normal: use_exact = false; break;
    }
    res.exact = use_exact;
    res.p_value = use_exact ? exact_p(ranks, res.w_plus, res.w_minus, alternative)
                            : normal_p(abs_d, ranks, res.w_plus, alternative);
    return res;
}

HolmResult holm_bonferroni(std::span<const double> p_values, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_argument, "p-values must lie in [0,1]");

    const std::size_t m = p_values.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p_values[a] < p_values[b]; });

    HolmResult out;
    out.adjusted.assign(m, 1.0);
    out.rejected.assign(m, false);
    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double scaled = std::min(1.0, static_cast<double>(m - j) * p_values[idx[j]]);
        running = std::max(running, scaled);
        out.adjusted[idx[j]] = running;
        out.rejected[idx[j]] = running <= alpha;
    }
    return out;
}

std::vector<std::vector<std::size_t>> indistinguishable_groups(
    std::span<const std::size_t> order, const std::vector<std::vector<bool>>& rejected) {
    const std::size_t k = order.size();
    for (auto i : order)
        if (i >= rejected.size() || rejected[i].size() < rejected.size())
            fail(ErrorKind::invalid_argument, "rejection matrix does not cover every method");

    std::vector<std::vector<std::size_t>> groups;
    std::size_t last_end = 0;
    for (std::size_t start = 0; start < k; ++start) {
        std::size_t end = start + 1;  // exclusive
        while (end < k) {
            const auto candidate = order[end];
            bool clash = false;
            for (std::size_t t = start; t < end && !clash; ++t)
                clash = rejected[order[t]][candidate] || rejected[candidate][order[t]];
            if (clash) break;
            ++end;
        }
        if (!groups.empty() && end <= last_end) continue;  // contained in the previous group
        groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                            order.begin() + static_cast<std::ptrdiff_t>(end));
        last_end = end;
    }
    return groups;
}

Comparison compare_methods(const PerformanceMatrix& m, double alpha, Alternative alternative) {
    Comparison out;
    out.methods = m.columns;
    out.mean_ranks = mean_ranks(m);
    const auto rows = m.complete_rows();
    out.rows_used = rows.size();
    out.rows_dropped = m.rows.size() - rows.size();

    const std::size_t k = m.columns.size();
    out.order.resize(k);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](auto a, auto b) { return out.mean_ranks[a] < out.mean_ranks[b]; });

    std::vector<double> raw;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            std::vector<double> xa, xb;
            for (const auto& row : rows) {
                xa.push_back(row[a]);
                xb.push_back(row[b]);
            }
            PairwiseComparison pc;
            pc.a = a;
            pc.b = b;
            pc.test = wilcoxon_signed_rank(xa, xb, alternative);
            raw.push_back(pc.test.p_value);
            out.pairs.push_back(pc);
        }
    }
    const auto holm = holm_bonferroni(raw, alpha);
    std::vector<std::vector<bool>> rejected(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < out.pairs.size(); ++i) {
        auto& pc = out.pairs[i];
        pc.p_adjusted = holm.adjusted[i];
        pc.rejected = holm.rejected[i];
        rejected[pc.a][pc.b] = rejected[pc.b][pc.a] = pc.rejected;
    }
    out.groups = indistinguishable_groups(out.order, rejected);
    return out;
}

}  // namespace robscale
