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

#include "robscale/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "robscale/detector.hpp"
#include "robscale/error.hpp"

namespace robscale {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir, ec)) fail(ErrorKind::io, "cannot create directory '" + dir.string() + "'");
}

}  // namespace

std::vector<TransformSpec> resolve_methods(std::span<const std::string> names, const TransformOptions& options) {
    if (names.empty()) fail(ErrorKind::invalid_argument, "no methods requested");
    std::vector<TransformSpec> specs;
    std::set<std::string, std::less<>> seen;
    const auto push = [&](TransformSpec s) {
        s.trim_fraction = options.trim_fraction;
        s.huber_tuning = options.huber_tuning;
        s.tukey_tuning = options.tukey_tuning;
        s.tol = options.tol;
        s.max_iter = options.max_iter;
        s.validate();
        if (seen.insert(s.name()).second) specs.push_back(s);
    };
    for (const auto& n : names) {
        if (n == "all") {
            for (const auto& s : registry()) push(s);
        } else {
            push(TransformSpec::parse(n));
        }
    }
    return specs;
}

std::string probability_file_name(const TransformSpec& spec) {
    std::string n = spec.name();
    std::replace(n.begin(), n.end(), ':', '_');
    return n + ".csv";
}

void detect_to_file(const fs::path& data, const std::string& label_column, std::size_t k, bool minmax,
                    const fs::path& out) {
    auto ds = read_dataset(data, label_column);
    if (minmax) ds = ds.minmax_normalized();
    ScoreFile f;
    f.scores = knn_scores(ds, k);
    f.ids = row_ids(ds.rows());
    f.labels = ds.labels();
    write_scores(f, out);
}

std::vector<fs::path> transform_to_dir(const fs::path& scores, std::span<const TransformSpec> specs,
                                       const fs::path& out_dir) {
    const auto file = read_scores(scores);
    ensure_dir(out_dir);
    std::vector<fs::path> written;
    RunManifest manifest;
    manifest.command = "transform";
    manifest.inputs.push_back({scores.string(), sha256_file(scores)});
    for (const auto& spec : specs) {
        const auto p = apply(spec, file.scores);
        const auto path = out_dir / probability_file_name(spec);
        write_probabilities(file.ids, std::span(&p, 1), path);
        written.push_back(path);
        manifest.transforms.push_back(spec.name());
    }
    if (!specs.empty()) {
        manifest.trim_fraction = specs.front().trim_fraction;
        manifest.huber_tuning = specs.front().huber_tuning;
        manifest.tukey_tuning = specs.front().tukey_tuning;
    }
    write_manifest(manifest, out_dir / "manifest.json");
    return written;
}

MetricReport evaluate_dir(const fs::path& probs_dir, const fs::path& labels, const BinScheme& scheme,
                          const std::string& reference) {
    const auto lf = read_scores(labels);
    if (!lf.labels) fail(ErrorKind::invalid_argument, "'" + labels.string() + "' has no label column");
    auto table = read_probability_dir(probs_dir);

    // Probability rows are matched to label rows by id.
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < table.ids.size(); ++i) position.emplace(table.ids[i], i);
    if (table.ids.size() != lf.ids.size())
        fail(ErrorKind::invalid_argument, "probability files and label file differ in row count");
    std::vector<std::size_t> order;
    for (const auto& id : lf.ids) {
        const auto it = position.find(id);
        if (it == position.end()) fail(ErrorKind::invalid_argument, "id '" + id + "' missing from probabilities");
        order.push_back(it->second);
    }
    std::vector<ProbabilityVector> aligned;
    for (const auto& col : table.columns) {
        std::vector<double> v;
        v.reserve(order.size());
        for (auto i : order) v.push_back(col[i]);
        aligned.emplace_back(std::move(v), col.transform_id());
    }
    return evaluate_all(aligned, *lf.labels, scheme, reference);
}

Stratum default_stratum(Measure m) { return m == Measure::his ? Stratum::stratified : Stratum::all; }

PerformanceMatrix performance_matrix(std::span<const MetricReport> reports, Measure measure, Stratum stratum) {
    PerformanceMatrix m;
    std::set<std::string, std::less<>> seen;
    for (const auto& r : reports)
        for (const auto& t : r.transforms())
            if (seen.insert(t).second) m.columns.push_back(t);
    for (const auto& r : reports) {
        std::vector<std::optional<double>> row;
        for (const auto& t : m.columns) row.push_back(r.value(t, measure, stratum));
        m.rows.push_back(std::move(row));
    }
    return m;
}

Figure1Summary figure1(const fs::path& data, const std::string& label_column, std::size_t k, bool minmax,
                       const fs::path& out_dir) {
    auto ds = read_dataset(data, label_column);
    if (!ds.labels()) fail(ErrorKind::invalid_argument, "the case study needs labelled data");
    if (minmax) ds = ds.minmax_normalized();
    const auto scores = knn_scores(ds, k);
    const auto ids = row_ids(ds.rows());
    const auto& labels = *ds.labels();
    ensure_dir(out_dir);

    const std::vector<TransformSpec> specs{TransformSpec::parse(kFigureReference),
                                           TransformSpec::parse(kFigureRobust)};
    PlotInput in;
    in.ids = ids;
    in.scores = scores.values();
    in.labels = &labels;
    in.specs = specs;
    for (auto kind : {PlotKind::score_hist, PlotKind::transform_curve, PlotKind::prob_hist, PlotKind::residuals})
        write_plotdata(kind, in, out_dir / (std::string(to_string(kind)) + ".csv"));

    ScoreFile sf{ids, scores, labels};
    write_scores(sf, out_dir / "scores.csv");

    Figure1Summary summary;
    summary.input_sha256 = sha256_file(data);
    for (const auto& spec : specs) {
        const auto p = apply(spec, scores);
        double out_sum = 0.0, in_sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (labels[i]) out_sum += 1.0 - p[i];
            else in_sum += p[i];
        }
        summary.mean_residuals[spec.name()] = {
            labels.outlier_count() ? out_sum / labels.outlier_count() : std::nan(""),
            labels.inlier_count() ? in_sum / labels.inlier_count() : std::nan("")};
    }

    RunManifest manifest;
    manifest.command = "figure1";
    manifest.inputs.push_back({data.string(), summary.input_sha256});
    for (const auto& s : specs) manifest.transforms.push_back(s.name());
    manifest.k = k;
    manifest.minmax = minmax;
    write_manifest(manifest, out_dir / "manifest.json");
    return summary;
}

}  // namespace robscale
