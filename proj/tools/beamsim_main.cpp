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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "beamsim/scenario.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 runtime error, 4 output error.
enum : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitRuntime = 3,
    kExitOutput = 4,
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beamsim: digital multi-beam array signal chain runner"};

    std::string config_path;
    std::string output_dir;
    std::string preset;
    std::uint64_t seed = 0;
    app.add_option("-c,--config", config_path, "scenario INI file")->required();
    app.add_option("-o,--output", output_dir, "override the output directory");
    CLI::Option* seed_opt = app.add_option("-s,--seed", seed, "override the scenario seed");
    app.add_option("-p,--preset", preset, "override the scenario preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in)
            throw beamsim::ConfigError("cannot read config file: " + config_path);
        const std::string text((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());

        beamsim::ScenarioOverrides overrides;
        if (!preset.empty())
            overrides.preset = preset;
        if (seed_opt->count() > 0)
            overrides.seed = seed;
        if (!output_dir.empty())
            overrides.output_dir = output_dir;

        const beamsim::Scenario scenario = beamsim::parse_scenario(text, overrides);
        const beamsim::RunResult result = beamsim::run(scenario);

        std::printf("preset %s seed %llu config 0x%016llx\n",
                    beamsim::preset_name(scenario.preset).c_str(),
                    static_cast<unsigned long long>(scenario.seed),
                    static_cast<unsigned long long>(scenario.config_hash));
        std::printf("wrote %zu artifacts + manifest.json to %s in %.3f s\n",
                    result.artifacts.size(), scenario.output_dir.c_str(), result.wall_time_s);
        return kExitOk;
    } catch (const beamsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const beamsim::OutputError& e) {
        std::fprintf(stderr, "output error: %s\n", e.what());
        return kExitOutput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    }
}
