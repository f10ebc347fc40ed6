/*
 * Copyright 2026 The pqsense Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pqs/cli.hpp"

namespace fs = std::filesystem;
using pqs::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("pqsense_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string with_empty_sweep(const fs::path &dir) {
    fs::create_directories(dir);
    const fs::path f = dir / "empty.json";
    std::ofstream(f) << R"({"sweep": {"voltages_mv": []}})";
    return f.string();
}

} // namespace

TEST_CASE("number formatting", "[cli]") {
    CHECK(pqs::cli::format_number(400000.0) == "400000");
    CHECK(pqs::cli::format_number(0.1) == "0.1");
    CHECK(pqs::cli::format_fixed(-0.0001, 3) == "0.000");
    CHECK(pqs::cli::format_fixed(-1.2345, 3) == "-1.234");
}

TEST_CASE("usage errors", "[cli]") {
    CHECK(invoke({"frobnicate", "--scenario", PQS_DEFAULT_SCENARIO}).code == pqs::cli::kValidation);
    CHECK(invoke({"verify"}).code == pqs::cli::kValidation);
    CHECK(invoke({"--help"}).code == pqs::cli::kOk);
    CHECK(invoke({"verify", "--scenario", "/nonexistent.json"}).code == pqs::cli::kIo);
    CHECK(invoke({"fig4", "--scenario", PQS_DEFAULT_SCENARIO, "--workers", "0"}).code ==
          pqs::cli::kValidation);
}

TEST_CASE("empty voltage list is rejected with its path", "[cli]") {
    const auto dir = scratch("empty");
    const auto r = invoke({"snr-sweep", "--scenario", with_empty_sweep(dir), "--out", dir.string()});
    CHECK(r.code == pqs::cli::kValidation);
    CHECK(r.err.find("sweep.voltages_mv") != std::string::npos);
}

TEST_CASE("dump-config is canonical", "[cli]") {
    const auto dir = scratch("dump");
    fs::create_directories(dir);
    const auto a = invoke({"--scenario", PQS_DEFAULT_SCENARIO, "--dump-config"});
    REQUIRE(a.code == 0);
    std::ofstream(dir / "dumped.json") << a.out;
    const auto b = invoke({"--scenario", (dir / "dumped.json").string(), "--dump-config"});
    CHECK(b.out == a.out);
}

TEST_CASE("budget, beam and resonance artifacts", "[cli]") {
    const auto dir = scratch("artifacts");
    const std::string sc = PQS_DEFAULT_SCENARIO;
    REQUIRE(invoke({"squeezing-budget", "--scenario", sc, "--out", dir.string()}).code == 0);
    REQUIRE(invoke({"optimize-beam", "--scenario", sc, "--out", dir.string()}).code == 0);
    REQUIRE(invoke({"resonance-scan", "--scenario", sc, "--out", dir.string()}).code == 0);
    for (const char *f : {"budget.csv", "calibration.json", "waist_curve.csv",
                          "beam_optimum.json", "resonance.csv"}) {
        CHECK(fs::file_size(dir / f) > 0);
    }
    CHECK(slurp(dir / "beam_optimum.json").find("\"unimodal\": true") != std::string::npos);
}

TEST_CASE("snr-sweep output is byte-identical across runs and workers", "[cli][determinism]") {
    const auto a = scratch("sweep_a");
    const auto b = scratch("sweep_b");
    const std::string sc = PQS_DEFAULT_SCENARIO;
    REQUIRE(invoke({"snr-sweep", "--scenario", sc, "--out", a.string(), "--pair", "correlated",
                    "--samples", "20000", "--workers", "1"})
                .code == 0);
    REQUIRE(invoke({"snr-sweep", "--scenario", sc, "--out", b.string(), "--pair", "correlated",
                    "--samples", "20000", "--workers", "4"})
                .code == 0);
    const std::string csv = slurp(a / "snr_sweep.csv");
    CHECK(csv.rfind("voltage_mV,pair,snr_tb,snr_cs,snr_opt\n", 0) == 0);
    CHECK(csv == slurp(b / "snr_sweep.csv"));
    CHECK(slurp(a / "enhancement.json") == slurp(b / "enhancement.json"));
}

TEST_CASE("bad pair selector", "[cli]") {
    const auto dir = scratch("pair");
    CHECK(invoke({"snr-sweep", "--scenario", PQS_DEFAULT_SCENARIO, "--out", dir.string(),
                  "--pair", "p5c1"})
              .code == pqs::cli::kValidation);
}

TEST_CASE("sampled fig4 output is byte-identical across workers", "[cli][determinism]") {
    const auto a = scratch("fig4_a");
    const auto b = scratch("fig4_b");
    const std::string sc = PQS_DEFAULT_SCENARIO;
    REQUIRE(invoke({"fig4", "--scenario", sc, "--out", a.string(), "--samples", "4000"}).code == 0);
    REQUIRE(invoke({"fig4", "--scenario", sc, "--out", b.string(), "--samples", "4000",
                    "--workers", "3"})
                .code == 0);
    CHECK(slurp(a / "fig4.csv") == slurp(b / "fig4.csv"));
    CHECK(slurp(a / "fig4.json") == slurp(b / "fig4.json"));
    CHECK(slurp(a / "fig4.json").find("\"sampled\"") != std::string::npos);
}
