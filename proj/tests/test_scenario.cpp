// SPDX-License-Identifier: Apache-2.0
//
// beamsim: digital multi-beam mm-wave array simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.
// -------------------------------------------------------------------------------

#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "beamsim/scenario.hpp"

using namespace beamsim;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "no error";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "beamsim_test" / name;
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("INI parser tracks sections, lines, and duplicates") {
    const std::string text =
        "# comment\n"
        "[alpha]\n"
        "x = 1\n"
        "\n"
        "; another comment\n"
        "[beta]\n"
        "name = hello world\n";
    IniDoc doc = IniDoc::parse(text);
    CHECK(doc.has_section("alpha"));
    CHECK(doc.has_key("beta", "name"));
    CHECK(doc.section_line("beta") == 6);
    CHECK(doc.line_of("beta", "name") == 7);
    CHECK(doc.get_double("alpha", "x", 0.0) == 1.0);
    CHECK(doc.get_string("beta", "name", "") == "hello world");

    CHECK_THROWS_AS(IniDoc::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
    CHECK_THROWS_AS(IniDoc::parse("x = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniDoc::parse("[a\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniDoc::parse("[a]\njust a dangling token\n"), ConfigError);
}

TEST_CASE("INI typed readers validate their conversions") {
    IniDoc doc = IniDoc::parse("[s]\na = 1.5\nb = 3\nc = yes\nd = 1,2.5,3\ne = abc\n");
    CHECK(doc.get_double("s", "a", 0.0) == 1.5);
    CHECK(doc.get_int("s", "b", 0) == 3);
    CHECK(doc.get_bool("s", "c", false));
    const std::vector<double> want = {1.0, 2.5, 3.0};
    CHECK(doc.get_double_list("s", "d", {}) == want);
    CHECK_THROWS_AS(doc.get_double("s", "e", 0.0), ConfigError);
    IniDoc doc2 = IniDoc::parse("[s]\na = 1.5\n");
    CHECK_THROWS_AS(doc2.get_int("s", "a", 0), ConfigError);
    CHECK(doc2.get_int("s", "missing", 7) == 7);
}

TEST_CASE("unconsumed keys are rejected by name and line") {
    IniDoc doc = IniDoc::parse("[s]\nused = 1\nleftover = 2\n");
    (void)doc.get_double("s", "used", 0.0);
    try {
        doc.reject_unconsumed();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("leftover") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("minimal sync scenario parses with explicit seed") {
    const Scenario sc = parse_scenario("[scenario]\npreset = sync-budget\nseed = 7\n");
    CHECK(sc.preset == Preset::sync_budget);
    CHECK(sc.seed == 7);
    CHECK(sc.output_dir == "out");
    CHECK(std::get<SyncConfig>(sc.config).n == 4);
    CHECK(sc.canonical_config.find("scenario.preset=sync-budget\n") != std::string::npos);
    CHECK(sc.canonical_config.find("sync.n=4\n") != std::string::npos);
}

TEST_CASE("seed is mandatory and preset must be known") {
    CHECK(error_of("[scenario]\npreset = sync-budget\n").find("seed") != std::string::npos);
    CHECK(error_of("[scenario]\npreset = nonsense\nseed = 1\n").find("nonsense") !=
          std::string::npos);
    CHECK(error_of("[scenario]\nseed = 1\n").find("preset") != std::string::npos);
}

TEST_CASE("misspelled keys fail naming the key and line") {
    const std::string msg = error_of(
        "[scenario]\npreset = sync-budget\nseed = 1\n\n[sync]\nm = 3\n");
    CHECK(msg.find("sync.m") != std::string::npos);
    CHECK(msg.find("line 6") != std::string::npos);

    const std::string sect = error_of(
        "[scenario]\npreset = sync-budget\nseed = 1\n\n[lenslet]\npitch_m = 1\n");
    CHECK(sect.find("lenslet") != std::string::npos);
}

TEST_CASE("module invariants surface as config errors at parse time") {
    const std::string msg = error_of(
        "[scenario]\npreset = lenslet-28\nseed = 1\n\n[lenslet]\npitch_m = 0.05\n");
    CHECK(msg.find("pitch") != std::string::npos);

    const std::string plan = error_of(
        "[scenario]\npreset = link-60\nseed = 1\n\n[plan]\nsymbol_rate_hz = 17e6\n");
    CHECK(plan != "no error");

    const std::string odd = error_of(
        "[scenario]\npreset = link-60\nseed = 1\n\n[streams]\npayload_bits = 999\n");
    CHECK(odd.find("payload_bits") != std::string::npos);
}

TEST_CASE("command-line overrides beat the file") {
    ScenarioOverrides ov;
    ov.preset = "channel-stats";
    ov.seed = 123;
    ov.output_dir = "elsewhere";
    const Scenario sc =
        parse_scenario("[scenario]\npreset = sync-budget\nseed = 7\n", ov);
    CHECK(sc.preset == Preset::channel_stats);
    CHECK(sc.seed == 123);
    CHECK(sc.output_dir == "elsewhere");
    CHECK(sc.canonical_config.find("scenario.seed=123\n") != std::string::npos);
}

TEST_CASE("config hash tracks semantic values only") {
    const std::string base = "[scenario]\npreset = sync-budget\nseed = 7\n";
    const Scenario a = parse_scenario(base);
    const Scenario b = parse_scenario(base + "[sync]\nn = 4\n");  // default restated
    const Scenario c = parse_scenario(base + "[sync]\nn = 5\n");
    const Scenario d = parse_scenario(base + "output_dir = other\n");
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != c.config_hash);
    CHECK(a.config_hash == d.config_hash);

    ScenarioOverrides ov;
    ov.seed = 8;
    CHECK(parse_scenario(base, ov).config_hash != a.config_hash);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("ab") == 0x089c4407b545986aULL);
}

TEST_CASE("defaults materialize into the preset config") {
    const Scenario sc = parse_scenario("[scenario]\npreset = link-60\nseed = 3\n");
    const LinkConfig& c = std::get<LinkConfig>(sc.config);
    CHECK(c.carrier_hz == 60e9);
    CHECK(c.plan.offsets_hz.size() == 4);
    CHECK(c.tx_directions_deg.size() == 4);
    CHECK(c.rx_directions_deg == c.tx_directions_deg);
    CHECK(c.payload_bits == 10000);
    CHECK(c.snr_db == 20.0);

    const Scenario bp = parse_scenario("[scenario]\npreset = beampattern-28\nseed = 3\n");
    const BeampatternConfig& b = std::get<BeampatternConfig>(bp.config);
    CHECK(b.lens.radius_m == 0.05);
    CHECK(b.adc_bits == 12);
    CHECK(b.impairments.size() == 4);
    // Seeded defaults give distinct chain errors.
    CHECK(b.impairments[0].gain_db != b.impairments[1].gain_db);
}

TEST_CASE("explicit impairment lists must match the chain count") {
    const std::string msg = error_of(
        "[scenario]\npreset = calibrate\nseed = 1\n\n[impairments]\ngain_db = 1,2\n");
    CHECK(msg.find("chain") != std::string::npos);
}

TEST_CASE("sync run emits its budget and manifest") {
    const fs::path dir = fresh_dir("sync");
    Scenario sc = parse_scenario("[scenario]\npreset = sync-budget\nseed = 9\n");
    sc.output_dir = dir.string();
    const RunResult res = run(sc);
    REQUIRE(res.artifacts == std::vector<std::string>{"sync_budget.json"});
    CHECK(res.wall_time_s >= 0.0);

    const nlohmann::json budget = nlohmann::json::parse(slurp(dir / "sync_budget.json"));
    CHECK(budget.at("analog_trials") == 16);
    CHECK(budget.at("digital_trials") == 1);

    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("preset") == "sync-budget");
    CHECK(manifest.at("seed") == 9);
    CHECK(manifest.at("artifacts").size() == 1);
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("wall_time_s"));
}

TEST_CASE("reruns are byte-identical apart from the manifest timing") {
    const fs::path dir1 = fresh_dir("chan1");
    const fs::path dir2 = fresh_dir("chan2");
    Scenario sc = parse_scenario(
        "[scenario]\npreset = channel-stats\nseed = 31\n\n[channel]\ndraws = 400\n");
    sc.output_dir = dir1.string();
    const RunResult r1 = run(sc);
    sc.output_dir = dir2.string();
    const RunResult r2 = run(sc);
    REQUIRE(r1.artifacts == r2.artifacts);
    for (const std::string& name : r1.artifacts)
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));

    nlohmann::json m1 = nlohmann::json::parse(slurp(dir1 / "manifest.json"));
    nlohmann::json m2 = nlohmann::json::parse(slurp(dir2 / "manifest.json"));
    m1.erase("wall_time_s");
    m2.erase("wall_time_s");
    CHECK(m1 == m2);
}

TEST_CASE("unusable output directory raises OutputError") {
    const fs::path dir = fresh_dir("blocked");
    fs::create_directories(dir.parent_path());
    std::ofstream(dir).put('x'); // a plain file where the directory should go
    Scenario sc = parse_scenario("[scenario]\npreset = sync-budget\nseed = 1\n");
    sc.output_dir = dir.string();
    CHECK_THROWS_AS(run(sc), OutputError);
}

TEST_CASE("lenslet run consumes a measured element pattern") {
    const fs::path dir = fresh_dir("lenslet_measured");
    fs::create_directories(dir);
    const fs::path csv = dir / "element.csv";
    {
        std::ofstream out(csv, std::ios::binary);
        out << "azimuth_deg,elevation_deg,power_db\n";
        for (double a = -90.0; a <= 90.0 + 1e-9; a += 0.5)
            out << a << ",0," << (-0.002 * a * a) << "\n";
    }
    Scenario sc = parse_scenario(
        "[scenario]\npreset = lenslet-28\nseed = 2\n\n[lenslet]\nmeasured_pattern_csv = " +
        csv.string() + "\n\n[sweep]\nstep_deg = 0.5\n");
    sc.output_dir = (dir / "out").string();
    const RunResult res = run(sc);
    bool has_measured = false, has_composite = false;
    for (const std::string& name : res.artifacts) {
        has_measured |= name == "element_measured.csv";
        has_composite |= name == "composite_0.csv";
    }
    CHECK(has_measured);
    CHECK(has_composite);
}
