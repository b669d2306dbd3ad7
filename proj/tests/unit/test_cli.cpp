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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tempdir.hpp"

using testkit::read_text;
using testkit::write_text;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const testkit::TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd =
        std::string("'") + ROBSCALE_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(out), read_text(err)};
}

std::string data() { return std::string(ROBSCALE_DATA_DIR) + "/ionosphere.csv"; }

}  // namespace

TEST_CASE("help and version") {
    testkit::TempDir dir;
    auto r = cli(dir, "--help");
    CHECK(r.code == 0);
    for (const char* sub : {"detect", "transform", "evaluate", "compare", "figure1"})
        CHECK(r.out.find(sub) != std::string::npos);
    r = cli(dir, "--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
    CHECK(cli(dir, "").code == 2);
    CHECK(cli(dir, "frobnicate").code == 2);
}

TEST_CASE("full workflow through the command line") {
    testkit::TempDir dir;
    const auto d = dir.path().string();
    auto r = cli(dir, "detect --data '" + data() + "' --k 5 --out '" + d + "/scores.csv'");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "scores.csv"));

    r = cli(dir, "transform --scores '" + d + "/scores.csv' --method all --out '" + d + "/probs'");
    REQUIRE(r.code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "probs")) files += e.path().extension() == ".csv";
    CHECK(files == 12);

    for (const char* bins : {"5:20", "4:12"}) {
        r = cli(dir, std::string("evaluate --probs '") + d + "/probs' --labels '" + d + "/scores.csv' --bins " + bins +
                         " --out '" + d + "/report_" + bins[0] + ".csv'");
        REQUIRE(r.code == 0);
    }
    r = cli(dir, "compare --reports '" + d + "/report_*.csv' --measure brier:outliers --out '" + d + "/cmp.json'");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_text(dir / "cmp.json"));
    CHECK(j["ranking"].size() == 12);
    CHECK(j["measure"] == "brier");
    CHECK(j["stratum"] == "outliers");
}

TEST_CASE("input errors exit with 2 and name the problem") {
    testkit::TempDir dir;
    const auto d = dir.path().string();
    auto r = cli(dir, "detect --data '" + data() + "' --k 0 --out '" + d + "/s.csv'");
    CHECK(r.code == 2);
    CHECK(r.err.find("--k") != std::string::npos);

    r = cli(dir, "detect --data '" + d + "/missing.csv' --out '" + d + "/s.csv'");
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.csv") != std::string::npos);

    r = cli(dir, "detect --data '" + data() + "' --label-col nope --out '" + d + "/s.csv'");
    CHECK(r.code == 2);
    CHECK(r.err.find("nope") != std::string::npos);

    write_text(dir / "s.csv", "id,score\n1,0.5\n2,0.7\n3,9\n");
    r = cli(dir, "transform --scores '" + d + "/s.csv' --method gauss:mode:sd --out '" + d + "/p'");
    CHECK(r.code == 2);
    CHECK(r.err.find("gauss:median:nmad") != std::string::npos);

    r = cli(dir, "transform --scores '" + d + "/s.csv' --method linear --out '" + d + "/p'");
    REQUIRE(r.code == 0);
    r = cli(dir, "evaluate --probs '" + d + "/p' --labels '" + d + "/s.csv' --out '" + d + "/r.csv'");
    CHECK(r.code == 2);
    CHECK(r.err.find("label") != std::string::npos);

    r = cli(dir, "evaluate --probs '" + d + "/p' --labels '" + d + "/s.csv' --bins 9:3 --out '" + d + "/r.csv'");
    CHECK(r.code == 2);

    r = cli(dir, "compare --reports '" + d + "/none_*.csv' --out '" + d + "/c.json'");
    CHECK(r.code == 2);
    CHECK(r.err.find("no file matches") != std::string::npos);

    write_text(dir / "one.csv", "transform,measure,stratum,value,skill\na,his,stratified,1,\n");
    r = cli(dir, "compare --reports '" + d + "/one.csv' --out '" + d + "/c.json'");
    CHECK(r.code == 2);
    CHECK(r.err.find("at least 2") != std::string::npos);

    r = cli(dir, "compare --reports a b --alternative sideways --out '" + d + "/c.json'");
    CHECK(r.code == 2);
}

TEST_CASE("figure1 is byte-reproducible") {
    testkit::TempDir dir;
    const auto d = dir.path().string();
    REQUIRE(cli(dir, "figure1 --data '" + data() + "' --out '" + d + "/a'").code == 0);
    REQUIRE(cli(dir, "figure1 --data '" + data() + "' --out '" + d + "/b'").code == 0);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        CAPTURE(e.path().filename().string());
        CHECK(read_text(e.path()) == read_text(dir / "b" / e.path().filename()));
    }
}
