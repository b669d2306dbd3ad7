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

// robscale-cli: detect, transform, evaluate, compare, figure1.

#include <glob.h>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robscale/robscale.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LibraryError : std::runtime_error {
    rs_status status;
    LibraryError(rs_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(rs_status s) {
    if (s != RS_OK) throw LibraryError(s, rs_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<rs_dataset, Deleter<rs_dataset, rs_dataset_free>>;
using ScoresPtr = std::unique_ptr<rs_scores, Deleter<rs_scores, rs_scores_free>>;
using ReportPtr = std::unique_ptr<rs_report, Deleter<rs_report, rs_report_free>>;
using ComparisonPtr = std::unique_ptr<rs_comparison, Deleter<rs_comparison, rs_comparison_free>>;

struct DetectArgs {
    std::string data;
    std::string label_col = "outlier";
    long long k = 5;
    bool minmax = false;
    std::string out;
};

struct TransformArgs {
    std::string scores;
    std::vector<std::string> methods;
    std::optional<double> trim;
    std::optional<double> tuning;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::string out;
};

struct EvaluateArgs {
    std::string probs;
    std::string labels;
    std::string bins = "5:20";
    std::string reference = "gauss:mean:sd";
    std::string out;
};

struct CompareArgs {
    std::vector<std::string> reports;
    std::string measure = "his";
    double alpha = 0.05;
    std::string alternative = "two-sided";
    std::string out;
};

struct FigureArgs {
    std::string data;
    std::string label_col = "outlier";
    long long k = 5;
    bool minmax = false;
    std::string out;
};

size_t checked_k(long long k) {
    if (k < 1) throw InputError("--k must be a positive integer (got " + std::to_string(k) + ")");
    return static_cast<size_t>(k);
}

int run_detect(const DetectArgs& a) {
    const size_t k = checked_k(a.k);
    rs_dataset* raw = nullptr;
    check(rs_dataset_read(a.data.c_str(), a.label_col.c_str(), &raw));
    DatasetPtr data(raw);
    if (a.minmax) check(rs_dataset_normalize(data.get()));
    rs_scores* s = nullptr;
    check(rs_knn_scores(data.get(), k, &s));
    ScoresPtr scores(s);
    check(rs_scores_write(scores.get(), a.out.c_str()));
    std::cout << "wrote " << rs_scores_size(scores.get()) << " scores to " << a.out << "\n";
    return kExitOk;
}

int run_transform(const TransformArgs& a) {
    rs_transform_options opt;
    rs_transform_options_default(&opt);
    if (a.trim) opt.trim_fraction = *a.trim;
    if (a.tuning) opt.huber_tuning = opt.tukey_tuning = *a.tuning;
    if (a.tol) opt.tol = *a.tol;
    if (a.max_iter) opt.max_iter = *a.max_iter;
    std::vector<const char*> names;
    for (const auto& m : a.methods) names.push_back(m.c_str());
    size_t written = 0;
    check(rs_transform_to_dir(a.scores.c_str(), names.data(), names.size(), &opt, a.out.c_str(), &written));
    std::cout << "wrote " << written << " probability files to " << a.out << "\n";
    return kExitOk;
}

std::pair<int, int> parse_bins(const std::string& s) {
    const auto colon = s.find(':');
    try {
        size_t used = 0;
        if (colon == std::string::npos) {
            const int b = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return {b, b};
        }
        const std::string lo = s.substr(0, colon), hi = s.substr(colon + 1);
        const int a = std::stoi(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(s);
        const int b = std::stoi(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(s);
        return {a, b};
    } catch (const std::logic_error&) {
        throw InputError("--bins expects MIN:MAX or a single count, got '" + s + "'");
    }
}

int run_evaluate(const EvaluateArgs& a) {
    const auto [lo, hi] = parse_bins(a.bins);
    rs_report* r = nullptr;
    check(rs_evaluate_dir(a.probs.c_str(), a.labels.c_str(), lo, hi,
                          a.reference.empty() ? nullptr : a.reference.c_str(), &r));
    ReportPtr report(r);
    check(rs_report_write(report.get(), a.out.c_str()));
    std::cout << "wrote " << rs_report_size(report.get()) << " report rows to " << a.out << "\n";
    return kExitOk;
}

std::vector<std::string> expand(const std::vector<std::string>& patterns) {
    std::vector<std::string> paths;
    for (const auto& p : patterns) {
        glob_t g{};
        const int rc = ::glob(p.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
        } else if (rc == GLOB_NOMATCH) {
            globfree(&g);
            throw InputError("--reports: no file matches '" + p + "'");
        }
        globfree(&g);
    }
    return paths;
}

rs_alternative parse_alternative(const std::string& s) {
    if (s == "two-sided" || s == "two_sided") return RS_TWO_SIDED;
    if (s == "greater") return RS_GREATER;
    if (s == "less") return RS_LESS;
    throw InputError("--alternative must be two-sided, greater or less");
}

int run_compare(const CompareArgs& a) {
    const auto paths = expand(a.reports);
    if (paths.size() < 2)
        throw InputError("--reports must match at least 2 report files (matched " + std::to_string(paths.size()) +
                         ")");
    std::vector<ReportPtr> owned;
    std::vector<const rs_report*> reports;
    for (const auto& p : paths) {
        rs_report* r = nullptr;
        check(rs_report_read(p.c_str(), &r));
        owned.emplace_back(r);
        reports.push_back(r);
    }
    std::string measure = a.measure, stratum;
    if (const auto colon = measure.find(':'); colon != std::string::npos) {
        stratum = measure.substr(colon + 1);
        measure.resize(colon);
    }
    rs_comparison* c = nullptr;
    check(rs_compare(reports.data(), reports.size(), measure.c_str(), stratum.empty() ? nullptr : stratum.c_str(),
                     a.alpha, parse_alternative(a.alternative), &c));
    ComparisonPtr cmp(c);
    check(rs_comparison_write(cmp.get(), a.out.c_str()));
    for (size_t i = 0; i < rs_comparison_size(cmp.get()); ++i)
        std::printf("%2zu  %-20s %.4f\n", i + 1, rs_comparison_method(cmp.get(), i),
                    rs_comparison_mean_rank(cmp.get(), i));
    return kExitOk;
}

int run_figure1(const FigureArgs& a) {
    const size_t k = checked_k(a.k);
    double ro = 0, ri = 0, bo = 0, bi = 0;
    check(rs_figure1(a.data.c_str(), a.label_col.c_str(), k, a.minmax ? 1 : 0, a.out.c_str(), &ro, &ri, &bo, &bi));
    std::printf("mean residual     outliers  inliers\n");
    std::printf("gauss:mean:sd     %.6f  %.6f\n", ro, ri);
    std::printf("gauss:median:nmad %.6f  %.6f\n", bo, bi);
    return kExitOk;
}

int exit_code(rs_status s) {
    switch (s) {
        case RS_ERR_INVALID_ARGUMENT:
        case RS_ERR_PARSE:
        case RS_ERR_IO: return kExitInput;
        default: return kExitInternal;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier scores to outlier probabilities: transform, evaluate, rank."};
    app.set_version_flag("--version", std::string(rs_version()));
    app.require_subcommand(1);

    DetectArgs det;
    auto* detect = app.add_subcommand("detect", "kNN outlier scores for a CSV dataset");
    detect->add_option("--data", det.data, "input CSV")->required();
    detect->add_option("--label-col", det.label_col, "label column, empty for none")->capture_default_str();
    detect->add_option("--k", det.k, "neighbour rank")->capture_default_str();
    detect->add_flag("--minmax", det.minmax, "min-max normalise features first");
    detect->add_option("--out", det.out, "output score file")->required();

    TransformArgs tr;
    auto* transform = app.add_subcommand("transform", "scores to probabilities, one file per method");
    transform->add_option("--scores", tr.scores, "score file")->required();
    transform->add_option("--method", tr.methods, "method names or 'all'")->required();
    transform->add_option("--trim", tr.trim, "fraction of largest scores trimmed (trim/tsd)");
    transform->add_option("--tuning", tr.tuning, "tuning constant for gauss:huber and gauss:tukey");
    transform->add_option("--tol", tr.tol, "M-estimator tolerance");
    transform->add_option("--max-iter", tr.max_iter, "M-estimator iteration cap");
    transform->add_option("--out", tr.out, "output directory")->required();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "quality measures, skill scores and HIS");
    evaluate->add_option("--probs", ev.probs, "directory of probability files")->required();
    evaluate->add_option("--labels", ev.labels, "labelled score file")->required();
    evaluate->add_option("--bins", ev.bins, "bin counts MIN:MAX")->capture_default_str();
    evaluate->add_option("--reference", ev.reference, "reference method, empty for none")->capture_default_str();
    evaluate->add_option("--out", ev.out, "output report file")->required();

    CompareArgs cm;
    auto* compare = app.add_subcommand("compare", "rank methods across reports");
    compare->add_option("--reports", cm.reports, "report files or glob patterns")->required();
    compare->add_option("--measure", cm.measure, "measure[:stratum]")->capture_default_str();
    compare->add_option("--alpha", cm.alpha, "family-wise significance level")->capture_default_str();
    compare->add_option("--alternative", cm.alternative, "two-sided, greater or less")->capture_default_str();
    compare->add_option("--out", cm.out, "output JSON file")->required();

    FigureArgs fg;
    auto* figure = app.add_subcommand("figure1", "plot data for non-robust vs robust Gaussian scaling");
    figure->add_option("--data", fg.data, "labelled input CSV")->required();
    figure->add_option("--label-col", fg.label_col, "label column")->capture_default_str();
    figure->add_option("--k", fg.k, "neighbour rank")->capture_default_str();
    figure->add_flag("--minmax", fg.minmax, "min-max normalise features first");
    figure->add_option("--out", fg.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*detect) return run_detect(det);
        if (*transform) return run_transform(tr);
        if (*evaluate) return run_evaluate(ev);
        if (*compare) return run_compare(cm);
        if (*figure) return run_figure1(fg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const LibraryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.status);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
