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

#include "robscale/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include <openssl/evp.h>

#include "robscale/error.hpp"

namespace robscale {

namespace fs = std::filesystem;

namespace {

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::string file;
    CsvRow header;
    std::vector<CsvRow> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.fields.size(); ++i)
            if (header.fields[i] == name) return i;
        return std::nullopt;
    }
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits one line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(const std::string& file, std::size_t line_no, std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && trim(field).empty()) {
            quoted = true;
            was_quoted = true;
            field.clear();
        } else if (c == ',') {
            out.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError(file, line_no, out.size() + 1, "unterminated quoted field");
    out.push_back(was_quoted ? field : trim(field));
    return out;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    CsvTable t;
    t.file = path.string();
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        CsvRow row{line_no, split_line(t.file, line_no, line)};
        if (!have_header) {
            t.header = std::move(row);
            have_header = true;
            continue;
        }
        if (row.fields.size() != t.header.fields.size()) {
            throw ParseError(t.file, line_no, 0,
                             "expected " + std::to_string(t.header.fields.size()) + " fields, found " +
                                 std::to_string(row.fields.size()));
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(t.file, 1, 0, "missing header");
    return t;
}

double parse_real(const CsvTable& t, const CsvRow& row, std::size_t col) {
    const std::string& s = row.fields[col];
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (s.empty() || ec != std::errc() || ptr != end)
        throw ParseError(t.file, row.line, col + 1, "not a number: '" + s + "'");
    if (!std::isfinite(v)) throw ParseError(t.file, row.line, col + 1, "non-finite value '" + s + "'");
    return v;
}

std::uint8_t parse_label(const CsvTable& t, const CsvRow& row, std::size_t col) {
    std::string s = row.fields[col];
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "yes") return 1;
    if (s == "0" || s == "no") return 0;
    throw ParseError(t.file, row.line, col + 1, "unknown label token '" + row.fields[col] + "'");
}

std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos && trim(s) == s) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
        out << content;
        out.flush();
        if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    }
}

std::vector<std::string> unique_ids(const CsvTable& t, std::size_t col) {
    std::vector<std::string> ids;
    std::set<std::string, std::less<>> seen;
    for (const auto& row : t.rows) {
        const auto& id = row.fields[col];
        if (id.empty()) throw ParseError(t.file, row.line, col + 1, "empty id");
        if (!seen.insert(id).second) throw ParseError(t.file, row.line, col + 1, "duplicate id '" + id + "'");
        ids.push_back(id);
    }
    return ids;
}

std::string method_column(const TransformSpec& spec) { return spec.name(); }

}  // namespace

std::string format_real(double v) {
    std::array<char, 40> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::vector<std::string> row_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

Dataset read_dataset(const fs::path& path, std::string_view label_column) {
    const auto t = read_csv(path);
    std::optional<std::size_t> label_col;
    if (!label_column.empty()) {
        label_col = t.column(label_column);
        if (!label_col)
            throw ParseError(t.file, t.header.line, 0, "label column '" + std::string(label_column) + "' not found");
    }
    if (t.rows.empty()) throw ParseError(t.file, t.header.line, 0, "empty dataset");
    const std::size_t cols = t.header.fields.size() - (label_col ? 1 : 0);
    if (cols == 0) throw ParseError(t.file, t.header.line, 0, "no feature columns");

    std::vector<double> values;
    values.reserve(t.rows.size() * cols);
    std::vector<std::uint8_t> labels;
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.fields.size(); ++c) {
            if (label_col && c == *label_col) labels.push_back(parse_label(t, row, c));
            else values.push_back(parse_real(t, row, c));
        }
    }
    if (t.rows.size() < 2) throw ParseError(t.file, t.rows.front().line, 0, "dataset needs at least 2 rows");
    std::optional<LabelVector> lv;
    if (label_col) lv = LabelVector(std::move(labels));
    return Dataset(t.rows.size(), cols, std::move(values), std::move(lv));
}

ScoreFile read_scores(const fs::path& path) {
    const auto t = read_csv(path);
    const auto id_col = t.column("id");
    const auto score_col = t.column("score");
    const auto label_col = t.column("label");
    if (!id_col || !score_col)
        throw ParseError(t.file, t.header.line, 0, "score file needs 'id' and 'score' columns");
    if (t.rows.empty()) throw ParseError(t.file, t.header.line, 0, "empty score file");

    ScoreFile f;
    f.ids = unique_ids(t, *id_col);
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    for (const auto& row : t.rows) {
        scores.push_back(parse_real(t, row, *score_col));
        if (label_col) {
            if (row.fields[*label_col].empty())
                throw ParseError(t.file, row.line, *label_col + 1, "label column must be filled for every row");
            labels.push_back(parse_label(t, row, *label_col));
        }
    }
    f.scores = ScoreVector(std::move(scores));
    if (label_col) f.labels = LabelVector(std::move(labels));
    return f;
}

void write_scores(const ScoreFile& file, const fs::path& path) {
    if (file.ids.size() != file.scores.size() || (file.labels && file.labels->size() != file.ids.size()))
        fail(ErrorKind::invalid_argument, "score file columns differ in length");
    std::ostringstream out;
    out << "id,score" << (file.labels ? ",label" : "") << '\n';
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        out << quote(file.ids[i]) << ',' << format_real(file.scores[i]);
        if (file.labels) out << ',' << static_cast<int>((*file.labels)[i]);
        out << '\n';
    }
    write_atomic(path, out.str());
}

void write_probabilities(std::span<const std::string> ids, std::span<const ProbabilityVector> columns,
                         const fs::path& path) {
    for (const auto& c : columns) {
        if (c.size() != ids.size()) fail(ErrorKind::invalid_argument, "probability column length mismatch");
        if (c.transform_id().empty()) fail(ErrorKind::invalid_argument, "probability column without transform id");
    }
    std::ostringstream out;
    out << "id";
    for (const auto& c : columns) out << ',' << quote(c.transform_id());
    out << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << quote(ids[i]);
        for (const auto& c : columns) out << ',' << format_real(c[i]);
        out << '\n';
    }
    write_atomic(path, out.str());
}

ProbabilityTable read_probabilities(const fs::path& path) {
    const auto t = read_csv(path);
    const auto id_col = t.column("id");
    if (!id_col || *id_col != 0) throw ParseError(t.file, t.header.line, 1, "first column must be 'id'");
    ProbabilityTable out;
    out.ids = unique_ids(t, 0);
    for (std::size_t c = 1; c < t.header.fields.size(); ++c) {
        std::vector<double> p;
        for (const auto& row : t.rows) {
            const double v = parse_real(t, row, c);
            if (!(v >= 0.0 && v <= 1.0)) throw ParseError(t.file, row.line, c + 1, "probability outside [0,1]");
            p.push_back(v);
        }
        out.columns.emplace_back(std::move(p), t.header.fields[c]);
    }
    return out;
}

ProbabilityTable read_probability_dir(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) fail(ErrorKind::io, "not a directory: '" + dir.string() + "'");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorKind::invalid_argument, "no probability files in '" + dir.string() + "'");

    ProbabilityTable merged;
    std::set<std::string, std::less<>> seen;
    for (const auto& f : files) {
        auto t = read_probabilities(f);
        if (merged.columns.empty() && merged.ids.empty()) merged.ids = t.ids;
        else if (t.ids != merged.ids)
            fail(ErrorKind::invalid_argument, "ids in '" + f.string() + "' do not match earlier files");
        for (auto& c : t.columns) {
            if (!seen.insert(c.transform_id()).second)
                fail(ErrorKind::invalid_argument, "transform '" + c.transform_id() + "' appears twice");
            merged.columns.push_back(std::move(c));
        }
    }
    return merged;
}

void write_report(const MetricReport& report, const fs::path& path) {
    std::ostringstream out;
    out << "transform,measure,stratum,value,skill\n";
    for (const auto& r : report.rows()) {
        out << quote(r.transform) << ',' << to_string(r.measure) << ',' << to_string(r.stratum) << ','
            << format_real(r.value) << ',' << (r.skill ? format_real(*r.skill) : "") << '\n';
    }
    write_atomic(path, out.str());
}

MetricReport read_report(const fs::path& path) {
    const auto t = read_csv(path);
    const char* names[] = {"transform", "measure", "stratum", "value", "skill"};
    std::array<std::size_t, 5> cols{};
    for (std::size_t i = 0; i < 5; ++i) {
        const auto c = t.column(names[i]);
        if (!c) throw ParseError(t.file, t.header.line, 0, std::string("missing column '") + names[i] + "'");
        cols[i] = *c;
    }
    MetricReport report;
    for (const auto& row : t.rows) {
        MetricRow r;
        r.transform = row.fields[cols[0]];
        try {
            r.measure = parse_measure(row.fields[cols[1]]);
            r.stratum = parse_stratum(row.fields[cols[2]]);
        } catch (const Error& e) {
            throw ParseError(t.file, row.line, 0, e.what());
        }
        r.value = parse_real(t, row, cols[3]);
        if (!row.fields[cols[4]].empty()) r.skill = parse_real(t, row, cols[4]);
        try {
            report.add(std::move(r));
        } catch (const Error& e) {
            throw ParseError(t.file, row.line, 0, e.what());
        }
    }
    return report;
}

std::string_view to_string(PlotKind kind) {
    switch (kind) {
        case PlotKind::score_hist: return "score_hist";
        case PlotKind::transform_curve: return "transform_curve";
        case PlotKind::prob_hist: return "prob_hist";
        case PlotKind::residuals: return "residuals";
    }
    return "?";
}

namespace {

struct ScoreBins {
    double lo = 0.0;
    double width = 0.0;
    int count = 0;

    double edge(int k) const { return lo + width * k; }
    int index(double s) const {
        if (width == 0.0) return 0;
        return std::clamp(static_cast<int>(std::floor((s - lo) / width)), 0, count - 1);
    }
};

ScoreBins score_bins(std::span<const double> scores, int bins) {
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    ScoreBins b;
    b.lo = *lo;
    b.count = bins;
    b.width = (*hi - *lo) / bins;
    return b;
}

double gaussian_pdf(double x, const GaussianFit& fit) {
    const double z = fit.residual(x) / fit.scale;
    return std::exp(-0.5 * z * z) * std::numbers::inv_sqrtpi / (std::numbers::sqrt2 * fit.scale);
}

std::string plot_score_hist(const PlotInput& in) {
    const auto b = score_bins(in.scores, in.bins);
    std::vector<FittedTransform> fitted;
    for (const auto& s : in.specs)
        if (s.kind == TransformKind::gaussian) fitted.push_back(fit_transform(s, in.scores));

    std::vector<double> count(in.bins, 0.0), outl(in.bins, 0.0);
    for (std::size_t i = 0; i < in.scores.size(); ++i) {
        const int k = b.index(in.scores[i]);
        count[k] += 1.0;
        if (in.labels) outl[k] += (*in.labels)[i];
    }

    std::ostringstream out;
    out << "bin,lo,hi,midpoint,count";
    if (in.labels) out << ",inliers,outliers";
    out << ",density";
    for (const auto& f : fitted) out << ",pdf:" << method_column(f.spec);
    out << '\n';
    const double n = static_cast<double>(in.scores.size());
    for (int k = 0; k < in.bins; ++k) {
        const double lo = b.edge(k);
        const double hi = k + 1 == in.bins ? b.lo + b.width * in.bins : b.edge(k + 1);
        const double mid = lo + 0.5 * b.width;
        out << k << ',' << format_real(lo) << ',' << format_real(hi) << ',' << format_real(mid) << ','
            << static_cast<long long>(count[k]);
        if (in.labels)
            out << ',' << static_cast<long long>(count[k] - outl[k]) << ',' << static_cast<long long>(outl[k]);
        out << ',' << (b.width > 0.0 ? format_real(count[k] / (n * b.width)) : std::string("nan"));
        for (const auto& f : fitted)
            out << ',' << (f.fit.scale > 0.0 ? format_real(gaussian_pdf(mid, f.fit)) : std::string("nan"));
        out << '\n';
    }
    return out.str();
}

std::string plot_transform_curve(const PlotInput& in) {
    const auto b = score_bins(in.scores, in.bins);
    std::vector<FittedTransform> fitted;
    for (const auto& s : in.specs) fitted.push_back(fit_transform(s, in.scores));

    std::vector<double> count(in.bins, 0.0), outl(in.bins, 0.0);
    for (std::size_t i = 0; i < in.scores.size(); ++i) {
        const int k = b.index(in.scores[i]);
        count[k] += 1.0;
        if (in.labels) outl[k] += (*in.labels)[i];
    }

    std::ostringstream out;
    out << "bin,midpoint,count";
    if (in.labels) out << ",outlier_fraction";
    for (const auto& f : fitted) out << ',' << method_column(f.spec);
    out << '\n';
    for (int k = 0; k < in.bins; ++k) {
        const double mid = b.edge(k) + 0.5 * b.width;
        out << k << ',' << format_real(mid) << ',' << static_cast<long long>(count[k]);
        if (in.labels) out << ',' << (count[k] > 0.0 ? format_real(outl[k] / count[k]) : std::string("nan"));
        for (const auto& f : fitted) out << ',' << format_real(f(mid));
        out << '\n';
    }
    return out.str();
}

std::string plot_prob_hist(const PlotInput& in) {
    std::ostringstream out;
    out << "transform,bin,lo,hi,count";
    if (in.labels) out << ",inliers,outliers";
    out << '\n';
    for (const auto& spec : in.specs) {
        const auto p = apply(spec, in.scores);
        std::vector<long long> count(in.bins, 0), outl(in.bins, 0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto k = bin_index(p[i], in.bins);
            ++count[k];
            if (in.labels) outl[k] += (*in.labels)[i];
        }
        for (int k = 0; k < in.bins; ++k) {
            out << quote(spec.name()) << ',' << k << ',' << format_real(static_cast<double>(k) / in.bins) << ','
                << format_real(static_cast<double>(k + 1) / in.bins) << ',' << count[k];
            if (in.labels) out << ',' << count[k] - outl[k] << ',' << outl[k];
            out << '\n';
        }
    }
    return out.str();
}

std::string plot_residuals(const PlotInput& in) {
    if (!in.labels) fail(ErrorKind::invalid_argument, "residuals need labels");
    std::ostringstream out;
    out << "id,transform,stratum,residual\n";
    for (const auto& spec : in.specs) {
        const auto p = apply(spec, in.scores);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto y = (*in.labels)[i];
            out << quote(in.ids[i]) << ',' << quote(spec.name()) << ',' << (y ? "outliers" : "inliers") << ','
                << format_real(std::fabs(static_cast<double>(y) - p[i])) << '\n';
        }
    }
    return out.str();
}

}  // namespace

void write_plotdata(PlotKind kind, const PlotInput& input, const fs::path& path) {
    if (input.scores.empty()) fail(ErrorKind::invalid_argument, "empty score vector");
    if (input.bins < 1) fail(ErrorKind::invalid_argument, "plot bins must be positive");
    if (input.labels && input.labels->size() != input.scores.size())
        fail(ErrorKind::invalid_argument, "labels not aligned with scores");
    if (kind == PlotKind::residuals && input.ids.size() != input.scores.size())
        fail(ErrorKind::invalid_argument, "ids not aligned with scores");

    std::string content;
    switch (kind) {
        case PlotKind::score_hist: content = plot_score_hist(input); break;
        case PlotKind::transform_curve: content = plot_transform_curve(input); break;
        case PlotKind::prob_hist: content = plot_prob_hist(input); break;
        case PlotKind::residuals: content = plot_residuals(input); break;
    }
    write_atomic(path, content);
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::io, "sha256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

void write_comparison(const Comparison& c, const ComparisonSettings& settings, const fs::path& path) {
    nlohmann::ordered_json j;
    j["measure"] = std::string(to_string(settings.measure));
    j["stratum"] = std::string(to_string(settings.stratum));
    j["alpha"] = settings.alpha;
    j["alternative"] = settings.alternative == Alternative::two_sided ? "two-sided"
                       : settings.alternative == Alternative::greater ? "greater"
                                                                      : "less";
    j["rows_used"] = c.rows_used;
    j["rows_dropped"] = c.rows_dropped;
    j["ranking"] = nlohmann::ordered_json::array();
    for (auto i : c.order) j["ranking"].push_back({{"transform", c.methods[i]}, {"mean_rank", c.mean_ranks[i]}});
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : c.pairs) {
        j["pairs"].push_back({{"a", c.methods[p.a]},
                              {"b", c.methods[p.b]},
                              {"n", p.test.n},
                              {"w_plus", p.test.w_plus},
                              {"w_minus", p.test.w_minus},
                              {"exact", p.test.exact},
                              {"degenerate", p.test.degenerate},
                              {"p_value", p.test.p_value},
                              {"p_adjusted", p.p_adjusted},
                              {"rejected", p.rejected}});
    }
    j["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : c.groups) {
        auto names = nlohmann::ordered_json::array();
        for (auto i : g) names.push_back(c.methods[i]);
        j["groups"].push_back(names);
    }
    write_atomic(path, j.dump(2) + "\n");
}

void write_manifest(const RunManifest& m, const fs::path& path) {
    nlohmann::ordered_json j;
    j["tool"] = "robscale";
    j["version"] = kVersion;
    j["command"] = m.command;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& in : m.inputs) j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
    j["transforms"] = m.transforms;
    j["trim_fraction"] = m.trim_fraction;
    j["huber_tuning"] = m.huber_tuning;
    j["tukey_tuning"] = m.tukey_tuning;
    if (m.k) {
        j["k"] = m.k;
        j["minmax"] = m.minmax;
    }
    j["bins"] = {{"min", m.bins.min_bins}, {"max", m.bins.max_bins}};
    j["seeds"] = m.seeds;
    write_atomic(path, j.dump(2) + "\n");
}

}  // namespace robscale
