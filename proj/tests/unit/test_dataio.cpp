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

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "json.hpp"
#include "robscale/dataio.hpp"
#include "robscale/error.hpp"
#include "tempdir.hpp"

using namespace robscale;
using testkit::read_text;
using testkit::write_text;
using V = std::vector<double>;

namespace {

std::size_t parse_line_of(auto&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("datasets: features, yes/no labels, CRLF and BOM") {
    testkit::TempDir dir;
    write_text(dir / "d.csv", "\xEF\xBB\xBF" "a,b,outlier\r\n1,2,yes\r\n3,4,No\r\n\r\n5,6,0\r\n");
    const auto d = read_dataset(dir / "d.csv", "outlier");
    CHECK(d.rows() == 3);
    CHECK(d.cols() == 2);
    CHECK(d.row(2)[1] == 6.0);
    REQUIRE(d.labels());
    CHECK(d.labels()->outlier_count() == 1);

    CHECK_THROWS_WITH(read_dataset(dir / "d.csv", ""), doctest::Contains("not a number: 'yes'"));
    write_text(dir / "plain.csv", "a,b\n1,2\n3,4\n");
    const auto u = read_dataset(dir / "plain.csv", "");
    CHECK_FALSE(u.labels());
    CHECK(u.cols() == 2);
}

TEST_CASE("datasets: errors carry file and line") {
    testkit::TempDir dir;
    write_text(dir / "bad.csv", "a,b\n1,2\n3,x\n");
    CHECK(parse_line_of([&] { read_dataset(dir / "bad.csv", ""); }) == 3);
    CHECK_THROWS_WITH(read_dataset(dir / "bad.csv", ""), doctest::Contains("bad.csv:3:2"));
    write_text(dir / "short.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_WITH(read_dataset(dir / "short.csv", ""), doctest::Contains("expected 2 fields"));
    write_text(dir / "lab.csv", "a,outlier\n1,maybe\n2,no\n");
    CHECK_THROWS_WITH(read_dataset(dir / "lab.csv", "outlier"), doctest::Contains("maybe"));
    CHECK_THROWS_WITH(read_dataset(dir / "lab.csv", "label"), doctest::Contains("label column 'label' not found"));
    write_text(dir / "empty.csv", "a,b\n");
    CHECK_THROWS_WITH(read_dataset(dir / "empty.csv", ""), doctest::Contains("empty dataset"));
    write_text(dir / "nan.csv", "a\n1\nnan\n");
    CHECK_THROWS_AS(read_dataset(dir / "nan.csv", ""), ParseError);
    CHECK_THROWS_WITH(read_dataset(dir / "missing.csv", ""), doctest::Contains("cannot open"));
    write_text(dir / "quote.csv", "a,b\n\"1,2\n");
    CHECK_THROWS_WITH(read_dataset(dir / "quote.csv", ""), doctest::Contains("unterminated"));
}

TEST_CASE("score files round-trip every double exactly") {
    testkit::TempDir dir;
    testkit::Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 200));
        V s(n);
        for (auto& v : s) v = std::ldexp(rng.normal(), static_cast<int>(rng.integer(-300, 300)));
        s[0] = std::numeric_limits<double>::denorm_min();
        ScoreFile f;
        f.ids = row_ids(n);
        f.scores = ScoreVector(s);
        if (trial % 2) f.labels = LabelVector(testkit::labels_with_both(rng, n, 0.3));
        write_scores(f, dir / "s.csv");
        const auto g = read_scores(dir / "s.csv");
        CHECK(g.ids == f.ids);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(g.scores[i] == s[i]);
        CHECK(static_cast<bool>(g.labels) == static_cast<bool>(f.labels));
        if (g.labels) CHECK(std::equal(g.labels->values().begin(), g.labels->values().end(), f.labels->values().begin()));
    }
}

TEST_CASE("score files: validation") {
    testkit::TempDir dir;
    write_text(dir / "dup.csv", "id,score\na,1\na,2\n");
    CHECK_THROWS_WITH(read_scores(dir / "dup.csv"), doctest::Contains("duplicate id 'a'"));
    write_text(dir / "nan.csv", "id,score\na,NaN\n");
    CHECK_THROWS_AS(read_scores(dir / "nan.csv"), ParseError);
    write_text(dir / "mixed.csv", "id,score,label\na,1,1\nb,2,\n");
    CHECK_THROWS_WITH(read_scores(dir / "mixed.csv"), doctest::Contains("label column must be filled"));
    write_text(dir / "cols.csv", "name,value\na,1\n");
    CHECK_THROWS_WITH(read_scores(dir / "cols.csv"), doctest::Contains("'id' and 'score'"));
    write_text(dir / "quoted.csv", "id,score\n\"x,1\",3.5\n");
    CHECK(read_scores(dir / "quoted.csv").ids[0] == "x,1");
}

TEST_CASE("probability tables round-trip and merge directories") {
    testkit::TempDir dir;
    const std::vector<std::string> ids{"1", "2", "3"};
    const std::vector<ProbabilityVector> a{ProbabilityVector(V{0.1, 0.2, 1.0 / 3}, "gauss:mean:sd")};
    const std::vector<ProbabilityVector> b{ProbabilityVector(V{0, 1, 0.5}, "linear")};
    std::filesystem::create_directory(dir / "p");
    write_probabilities(ids, a, dir / "p" / "b.csv");
    write_probabilities(ids, b, dir / "p" / "a.csv");
    CHECK(read_text(dir / "p" / "b.csv").starts_with("id,gauss:mean:sd\n"));
    const auto t = read_probability_dir(dir / "p");
    REQUIRE(t.columns.size() == 2);
    CHECK(t.columns[0].transform_id() == "linear");
    CHECK(t.columns[1][2] == 1.0 / 3);
    write_text(dir / "p" / "c.csv", "id,other\n1,0\n3,0\n2,0\n");
    CHECK_THROWS_WITH(read_probability_dir(dir / "p"), doctest::Contains("do not match"));
    std::filesystem::create_directory(dir / "none");
    CHECK_THROWS_WITH(read_probability_dir(dir / "none"), doctest::Contains("no probability files"));
    write_text(dir / "bad.csv", "id,x\n1,1.5\n");
    CHECK_THROWS_AS(read_probabilities(dir / "bad.csv"), ParseError);
}

TEST_CASE("reports round-trip") {
    testkit::TempDir dir;
    MetricReport r;
    r.add({"linear", Measure::brier, Stratum::outliers, 0.1234567890123456789, -0.5});
    r.add({"gauss:mean:sd", Measure::his, Stratum::stratified, 1.0 / 3, {}});
    write_report(r, dir / "r.csv");
    const auto s = read_report(dir / "r.csv");
    REQUIRE(s.size() == 2);
    CHECK(s.rows()[0].value == r.rows()[0].value);
    CHECK(s.rows()[0].skill == -0.5);
    CHECK_FALSE(s.rows()[1].skill);
    CHECK(s.rows()[1].stratum == Stratum::stratified);
    write_text(dir / "dup.csv", "transform,measure,stratum,value,skill\na,brier,all,1,\na,brier,all,2,\n");
    CHECK_THROWS_AS(read_report(dir / "dup.csv"), ParseError);
    write_text(dir / "m.csv", "transform,measure,stratum,value,skill\na,auc,all,1,\n");
    CHECK_THROWS_WITH(read_report(dir / "m.csv"), doctest::Contains("unknown measure"));
}

TEST_CASE("plot data files") {
    testkit::TempDir dir;
    const V s{0, 1, 2, 3, 4, 5, 6, 7, 8, 30};
    const LabelVector y(std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0, 0, 0, 1});
    const auto ids = row_ids(s.size());
    const std::vector<TransformSpec> specs{TransformSpec::parse("gauss:mean:sd"),
                                           TransformSpec::parse("gauss:median:nmad")};
    PlotInput in;
    in.ids = ids;
    in.scores = s;
    in.labels = &y;
    in.specs = specs;
    in.bins = 5;
    for (auto k : {PlotKind::score_hist, PlotKind::transform_curve, PlotKind::prob_hist, PlotKind::residuals})
        write_plotdata(k, in, dir / (std::string(to_string(k)) + ".csv"));

    const auto hist = read_text(dir / "score_hist.csv");
    CHECK(hist.starts_with("bin,lo,hi,midpoint,count,inliers,outliers,density,pdf:gauss:mean:sd,pdf:gauss:median:nmad\n"));
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 6);
    const auto curve = read_text(dir / "transform_curve.csv");
    CHECK(curve.starts_with("bin,midpoint,count,outlier_fraction,gauss:mean:sd,gauss:median:nmad\n"));
    const auto ph = read_text(dir / "prob_hist.csv");
    CHECK(std::count(ph.begin(), ph.end(), '\n') == 1 + 2 * 5);
    const auto res = read_text(dir / "residuals.csv");
    CHECK(res.starts_with("id,transform,stratum,residual\n1,gauss:mean:sd,inliers,0\n"));
    CHECK(res.find("10,gauss:median:nmad,outliers,") != std::string::npos);

    in.labels = nullptr;
    CHECK_THROWS_WITH(write_plotdata(PlotKind::residuals, in, dir / "x.csv"), "residuals need labels");
    CHECK_NOTHROW(write_plotdata(PlotKind::prob_hist, in, dir / "x.csv"));
}

TEST_CASE("comparison JSON") {
    testkit::TempDir dir;
    PerformanceMatrix m;
    m.columns = {"a", "b"};
    m.rows = {{0.1, 0.2}, {0.3, 0.4}, {0.2, std::nullopt}};
    const auto c = compare_methods(m);
    write_comparison(c, ComparisonSettings{}, dir / "c.json");
    const auto j = nlohmann::json::parse(read_text(dir / "c.json"));
    CHECK(j["measure"] == "his");
    CHECK(j["stratum"] == "stratified");
    CHECK(j["rows_used"] == 2);
    CHECK(j["rows_dropped"] == 1);
    CHECK(j["ranking"][0]["transform"] == "a");
    CHECK(j["pairs"].size() == 1);
    CHECK(j["groups"].size() == 1);
}

TEST_CASE("sha256 and manifests") {
    testkit::TempDir dir;
    write_text(dir / "abc.txt", "abc");
    CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    write_text(dir / "empty.txt", "");
    CHECK(sha256_file(dir / "empty.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK_THROWS(sha256_file(dir / "nope"));

    RunManifest m;
    m.command = "transform";
    m.inputs.push_back({"x.csv", "00"});
    m.transforms = {"linear"};
    write_manifest(m, dir / "m.json");
    const auto first = read_text(dir / "m.json");
    write_manifest(m, dir / "m.json");
    CHECK(read_text(dir / "m.json") == first);
    const auto j = nlohmann::json::parse(first);
    CHECK(j["command"] == "transform");
    CHECK(j["version"] == kVersion);
}

TEST_CASE("writes are atomic and leave no temporaries") {
    testkit::TempDir dir;
    ScoreFile f;
    f.ids = row_ids(2);
    f.scores = ScoreVector(V{1, 2});
    write_scores(f, dir / "s.csv");
    write_scores(f, dir / "s.csv");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(write_scores(f, dir / "no" / "such" / "dir" / "s.csv"), Error);
}

TEST_CASE("format_real keeps 17 significant digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(std::stod(format_real(M_PI)) == M_PI);
}
