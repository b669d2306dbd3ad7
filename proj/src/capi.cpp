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

#include "robscale/robscale.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "robscale/dataio.hpp"
#include "robscale/detector.hpp"
#include "robscale/error.hpp"
#include "robscale/metrics.hpp"
#include "robscale/pipeline.hpp"
#include "robscale/ranking.hpp"
#include "robscale/special.hpp"
#include "robscale/transforms.hpp"

struct rs_dataset {
    robscale::Dataset data;
};

struct rs_scores {
    robscale::ScoreFile file;
};

struct rs_report {
    robscale::MetricReport report;
    // stable storage for the strings handed out by rs_report_row
    std::vector<std::string> measure_names;
    std::vector<std::string> stratum_names;
};

struct rs_comparison {
    robscale::Comparison cmp;
    robscale::ComparisonSettings settings;
    std::vector<std::vector<std::size_t>> groups_by_position;
};

namespace {

thread_local std::string last_error;

rs_status set_error(rs_status status, const std::string& msg) {
    last_error = msg;
    return status;
}

rs_status map_kind(robscale::ErrorKind kind) {
    switch (kind) {
        case robscale::ErrorKind::invalid_argument: return RS_ERR_INVALID_ARGUMENT;
        case robscale::ErrorKind::parse: return RS_ERR_PARSE;
        case robscale::ErrorKind::io: return RS_ERR_IO;
        case robscale::ErrorKind::numeric: return RS_ERR_NUMERIC;
    }
    return RS_ERR_INTERNAL;
}

template <class F>
rs_status guarded(F&& f) {
    try {
        f();
        return RS_OK;
    } catch (const robscale::Error& e) {
        return set_error(map_kind(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(RS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(RS_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(RS_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) robscale::fail(robscale::ErrorKind::invalid_argument, std::string(what) + " must not be NULL");
}

robscale::TransformOptions options_of(const rs_transform_options* o) {
    robscale::TransformOptions out;
    if (o) {
        out.trim_fraction = o->trim_fraction;
        out.huber_tuning = o->huber_tuning;
        out.tukey_tuning = o->tukey_tuning;
        out.tol = o->tol;
        out.max_iter = o->max_iter;
    }
    return out;
}

robscale::TransformSpec spec_of(const char* method, const rs_transform_options* o) {
    require(method, "method");
    const std::string name(method);
    auto specs = robscale::resolve_methods(std::span(&name, 1), options_of(o));
    if (specs.size() != 1) robscale::fail(robscale::ErrorKind::invalid_argument, "expected a single method");
    return specs.front();
}

robscale::Alternative alternative_of(rs_alternative a) {
    switch (a) {
        case RS_TWO_SIDED: return robscale::Alternative::two_sided;
        case RS_GREATER: return robscale::Alternative::greater;
        case RS_LESS: return robscale::Alternative::less;
    }
    robscale::fail(robscale::ErrorKind::invalid_argument, "unknown alternative");
}

rs_report* make_report(robscale::MetricReport r) {
    auto h = std::make_unique<rs_report>();
    for (const auto& row : r.rows()) {
        h->measure_names.emplace_back(robscale::to_string(row.measure));
        h->stratum_names.emplace_back(robscale::to_string(row.stratum));
    }
    h->report = std::move(r);
    return h.release();
}

}  // namespace

extern "C" {

const char* rs_version(void) { return robscale::kVersion; }

const char* rs_last_error(void) { return last_error.c_str(); }

const char* rs_status_string(rs_status status) {
    switch (status) {
        case RS_OK: return "ok";
        case RS_ERR_INVALID_ARGUMENT: return "invalid argument";
        case RS_ERR_PARSE: return "parse error";
        case RS_ERR_IO: return "i/o error";
        case RS_ERR_NUMERIC: return "numeric failure";
        case RS_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void rs_transform_options_default(rs_transform_options* options) {
    if (!options) return;
    const robscale::TransformOptions d;
    options->trim_fraction = d.trim_fraction;
    options->huber_tuning = d.huber_tuning;
    options->tukey_tuning = d.tukey_tuning;
    options->tol = d.tol;
    options->max_iter = d.max_iter;
}

rs_status rs_erf(double x, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = robscale::erf(x);
    });
}

rs_status rs_dataset_read(const char* path, const char* label_col, rs_dataset** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new rs_dataset{robscale::read_dataset(path, label_col ? label_col : "")};
    });
}

rs_status rs_dataset_normalize(rs_dataset* dataset) {
    return guarded([&] {
        require(dataset, "dataset");
        dataset->data = dataset->data.minmax_normalized();
    });
}

size_t rs_dataset_rows(const rs_dataset* d) { return d ? d->data.rows() : 0; }
size_t rs_dataset_cols(const rs_dataset* d) { return d ? d->data.cols() : 0; }
int rs_dataset_has_labels(const rs_dataset* d) { return d && d->data.labels() ? 1 : 0; }
void rs_dataset_free(rs_dataset* d) { delete d; }

rs_status rs_knn_scores(const rs_dataset* dataset, size_t k, rs_scores** out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out, "out");
        robscale::ScoreFile f;
        f.scores = robscale::knn_scores(dataset->data, k);
        f.ids = robscale::row_ids(dataset->data.rows());
        f.labels = dataset->data.labels();
        *out = new rs_scores{std::move(f)};
    });
}

rs_status rs_scores_create(const double* values, const int* labels, size_t n, rs_scores** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(values, "values");
        robscale::ScoreFile f;
        f.scores = robscale::ScoreVector(std::vector<double>(values, values + n));
        f.ids = robscale::row_ids(n);
        if (labels) {
            std::vector<std::uint8_t> y;
            for (size_t i = 0; i < n; ++i) {
                if (labels[i] != 0 && labels[i] != 1)
                    robscale::fail(robscale::ErrorKind::invalid_argument, "labels must be 0 or 1");
                y.push_back(static_cast<std::uint8_t>(labels[i]));
            }
            f.labels = robscale::LabelVector(std::move(y));
        }
        *out = new rs_scores{std::move(f)};
    });
}

rs_status rs_scores_read(const char* path, rs_scores** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new rs_scores{robscale::read_scores(path)};
    });
}

rs_status rs_scores_write(const rs_scores* scores, const char* path) {
    return guarded([&] {
        require(scores, "scores");
        require(path, "path");
        robscale::write_scores(scores->file, path);
    });
}

size_t rs_scores_size(const rs_scores* s) { return s ? s->file.scores.size() : 0; }
const double* rs_scores_values(const rs_scores* s) { return s ? s->file.scores.values().data() : nullptr; }
int rs_scores_has_labels(const rs_scores* s) { return s && s->file.labels ? 1 : 0; }

rs_status rs_scores_labels(const rs_scores* s, int* out) {
    return guarded([&] {
        require(s, "scores");
        require(out, "out");
        if (!s->file.labels) robscale::fail(robscale::ErrorKind::invalid_argument, "score set has no labels");
        for (size_t i = 0; i < s->file.labels->size(); ++i) out[i] = (*s->file.labels)[i];
    });
}

void rs_scores_free(rs_scores* s) { delete s; }

size_t rs_registry_size(void) { return robscale::registry().size(); }

const char* rs_registry_name(size_t index) {
    static const std::vector<std::string> names = robscale::registry_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

rs_status rs_fit(const rs_scores* scores, const char* method, const rs_transform_options* options,
                 double* center, double* scale, int* converged) {
    return guarded([&] {
        require(scores, "scores");
        const auto spec = spec_of(method, options);
        if (spec.kind != robscale::TransformKind::gaussian)
            robscale::fail(robscale::ErrorKind::invalid_argument, "only gaussian methods have a fit");
        const auto fit = robscale::fit_gaussian(spec, scores->file.scores);
        if (center) *center = fit.center;
        if (scale) *scale = fit.scale;
        if (converged) *converged = fit.converged ? 1 : 0;
    });
}

rs_status rs_apply(const rs_scores* scores, const char* method, const rs_transform_options* options, double* out) {
    return guarded([&] {
        require(scores, "scores");
        require(out, "out");
        const auto p = robscale::apply(spec_of(method, options), scores->file.scores);
        std::copy(p.values().begin(), p.values().end(), out);
    });
}

rs_status rs_transform_to_dir(const char* scores_path, const char* const* methods, size_t n_methods,
                              const rs_transform_options* options, const char* out_dir, size_t* files_written) {
    return guarded([&] {
        require(scores_path, "scores_path");
        require(out_dir, "out_dir");
        require(methods, "methods");
        std::vector<std::string> names;
        for (size_t i = 0; i < n_methods; ++i) {
            require(methods[i], "method name");
            names.emplace_back(methods[i]);
        }
        const auto specs = robscale::resolve_methods(names, options_of(options));
        const auto written = robscale::transform_to_dir(scores_path, specs, out_dir);
        if (files_written) *files_written = written.size();
    });
}

rs_status rs_evaluate(const rs_scores* labelled, const char* const* methods, const double* const* probs,
                      size_t n_methods, int min_bins, int max_bins, const char* reference, rs_report** out) {
    return guarded([&] {
        require(labelled, "labelled");
        require(out, "out");
        if (n_methods > 0) {
            require(methods, "methods");
            require(probs, "probs");
        }
        if (!labelled->file.labels)
            robscale::fail(robscale::ErrorKind::invalid_argument, "evaluation needs labels");
        const size_t n = labelled->file.scores.size();
        std::vector<robscale::ProbabilityVector> cols;
        for (size_t i = 0; i < n_methods; ++i) {
            require(methods[i], "method name");
            require(probs[i], "probability array");
            cols.emplace_back(std::vector<double>(probs[i], probs[i] + n), methods[i]);
        }
        const robscale::BinScheme scheme{min_bins, max_bins};
        *out = make_report(robscale::evaluate_all(cols, *labelled->file.labels, scheme, reference ? reference : ""));
    });
}

rs_status rs_evaluate_dir(const char* probs_dir, const char* labels_path, int min_bins, int max_bins,
                          const char* reference, rs_report** out) {
    return guarded([&] {
        require(probs_dir, "probs_dir");
        require(labels_path, "labels_path");
        require(out, "out");
        const robscale::BinScheme scheme{min_bins, max_bins};
        *out = make_report(robscale::evaluate_dir(probs_dir, labels_path, scheme, reference ? reference : ""));
    });
}

rs_status rs_report_read(const char* path, rs_report** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = make_report(robscale::read_report(path));
    });
}

rs_status rs_report_write(const rs_report* report, const char* path) {
    return guarded([&] {
        require(report, "report");
        require(path, "path");
        robscale::write_report(report->report, path);
    });
}

size_t rs_report_size(const rs_report* r) { return r ? r->report.size() : 0; }

rs_status rs_report_row(const rs_report* report, size_t index, const char** transform, const char** measure,
                        const char** stratum, double* value, double* skill) {
    return guarded([&] {
        require(report, "report");
        if (index >= report->report.size())
            robscale::fail(robscale::ErrorKind::invalid_argument, "row index out of range");
        const auto& row = report->report.rows()[index];
        if (transform) *transform = row.transform.c_str();
        if (measure) *measure = report->measure_names[index].c_str();
        if (stratum) *stratum = report->stratum_names[index].c_str();
        if (value) *value = row.value;
        if (skill) *skill = row.skill.value_or(std::numeric_limits<double>::quiet_NaN());
    });
}

rs_status rs_report_value(const rs_report* report, const char* transform, const char* measure,
                          const char* stratum, double* value, double* skill) {
    return guarded([&] {
        require(report, "report");
        require(transform, "transform");
        require(measure, "measure");
        require(stratum, "stratum");
        const auto* row = report->report.find(transform, robscale::parse_measure(measure),
                                              robscale::parse_stratum(stratum));
        if (!row) robscale::fail(robscale::ErrorKind::invalid_argument, "no such report row");
        if (value) *value = row->value;
        if (skill) *skill = row->skill.value_or(std::numeric_limits<double>::quiet_NaN());
    });
}

void rs_report_free(rs_report* r) { delete r; }

double rs_skill_score(double m, double m_ref) { return robscale::skill_score(m, m_ref); }

rs_status rs_compare(const rs_report* const* reports, size_t n_reports, const char* measure, const char* stratum,
                     double alpha, rs_alternative alternative, rs_comparison** out) {
    return guarded([&] {
        require(out, "out");
        require(measure, "measure");
        if (n_reports < 2)
            robscale::fail(robscale::ErrorKind::invalid_argument, "comparison needs at least 2 reports");
        require(reports, "reports");
        std::vector<robscale::MetricReport> rs;
        for (size_t i = 0; i < n_reports; ++i) {
            require(reports[i], "report");
            rs.push_back(reports[i]->report);
        }
        robscale::ComparisonSettings settings;
        settings.measure = robscale::parse_measure(measure);
        settings.stratum = stratum && *stratum ? robscale::parse_stratum(stratum)
                                               : robscale::default_stratum(settings.measure);
        settings.alpha = alpha;
        settings.alternative = alternative_of(alternative);
        const auto matrix = robscale::performance_matrix(rs, settings.measure, settings.stratum);
        auto h = std::make_unique<rs_comparison>();
        h->cmp = robscale::compare_methods(matrix, alpha, settings.alternative);
        h->settings = settings;
        std::vector<std::size_t> position(h->cmp.methods.size());
        for (std::size_t p = 0; p < h->cmp.order.size(); ++p) position[h->cmp.order[p]] = p;
        for (const auto& g : h->cmp.groups) {
            std::vector<std::size_t> members;
            for (auto m : g) members.push_back(position[m]);
            h->groups_by_position.push_back(std::move(members));
        }
        *out = h.release();
    });
}

size_t rs_comparison_size(const rs_comparison* c) { return c ? c->cmp.methods.size() : 0; }

const char* rs_comparison_method(const rs_comparison* c, size_t pos) {
    if (!c || pos >= c->cmp.order.size()) return nullptr;
    return c->cmp.methods[c->cmp.order[pos]].c_str();
}

double rs_comparison_mean_rank(const rs_comparison* c, size_t pos) {
    if (!c || pos >= c->cmp.order.size()) return std::numeric_limits<double>::quiet_NaN();
    return c->cmp.mean_ranks[c->cmp.order[pos]];
}

size_t rs_comparison_group_count(const rs_comparison* c) { return c ? c->groups_by_position.size() : 0; }

rs_status rs_comparison_group(const rs_comparison* c, size_t group, const size_t** members, size_t* n_members) {
    return guarded([&] {
        require(c, "comparison");
        require(members, "members");
        require(n_members, "n_members");
        if (group >= c->groups_by_position.size())
            robscale::fail(robscale::ErrorKind::invalid_argument, "group index out of range");
        *members = c->groups_by_position[group].data();
        *n_members = c->groups_by_position[group].size();
    });
}

rs_status rs_comparison_write(const rs_comparison* c, const char* path) {
    return guarded([&] {
        require(c, "comparison");
        require(path, "path");
        robscale::write_comparison(c->cmp, c->settings, path);
    });
}

void rs_comparison_free(rs_comparison* c) { delete c; }

rs_status rs_wilcoxon(const double* x, const double* y, size_t n, rs_alternative alternative, double* p_value,
                      int* degenerate) {
    return guarded([&] {
        if (n > 0) {
            require(x, "x");
            require(y, "y");
        }
        require(p_value, "p_value");
        const auto r = robscale::wilcoxon_signed_rank(std::span(x, n), std::span(y, n), alternative_of(alternative));
        *p_value = r.p_value;
        if (degenerate) *degenerate = r.degenerate ? 1 : 0;
    });
}

rs_status rs_figure1(const char* data_path, const char* label_col, size_t k, int minmax, const char* out_dir,
                     double* reference_outlier_residual, double* reference_inlier_residual,
                     double* robust_outlier_residual, double* robust_inlier_residual) {
    return guarded([&] {
        require(data_path, "data_path");
        require(out_dir, "out_dir");
        const auto s = robscale::figure1(data_path, label_col ? label_col : "", k, minmax != 0, out_dir);
        const auto& ref = s.mean_residuals.at(robscale::kFigureReference);
        const auto& rob = s.mean_residuals.at(robscale::kFigureRobust);
        if (reference_outlier_residual) *reference_outlier_residual = ref.first;
        if (reference_inlier_residual) *reference_inlier_residual = ref.second;
        if (robust_outlier_residual) *robust_outlier_residual = rob.first;
        if (robust_inlier_residual) *robust_inlier_residual = rob.second;
    });
}

}  // extern "C"
