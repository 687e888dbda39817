// SPDX-License-Identifier: Apache-2.0
//
// beamrate - downlink multiuser beamforming evaluation for Massive MIMO-OFDM
// Copyright (C) 2026 beamrate developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Batch experiment runner over the beamrate C API.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "beamrate/beamrate.h"

namespace
{

constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

int resolve_threads(int cli_threads)
{
    if (cli_threads > 0)
        return cli_threads;
    if (const char* env = std::getenv("BEAMRATE_THREADS"))
    {
        int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    return 1;
}

int report(const char* verb, br_status status)
{
    std::fprintf(stderr, "beamrate: %s failed (%s): %s\n", verb, br_status_name(status),
                 br_last_error());
    return status == BR_ERR_INVALID_ARGUMENT ? exit_usage : exit_failure;
}

int cmd_run(const std::string& config_path, std::string output, std::string format,
            int threads)
{
    br_config* config = nullptr;
    br_status status = br_config_load(config_path.c_str(), &config);
    if (status != BR_OK)
        return report("loading config", status);

    if (output.empty())
        output = br_config_output_path(config);
    if (format.empty())
        format = br_config_output_format(config);
    if (output.empty())
    {
        std::fprintf(stderr, "beamrate: no output path (config 'output.path' or --output)\n");
        br_config_free(config);
        return exit_usage;
    }

    br_result* result = nullptr;
    status = br_run(config, resolve_threads(threads), &result);
    if (status != BR_OK)
    {
        br_config_free(config);
        return report("running experiment", status);
    }

    status = br_result_write(result, output.c_str(), format.c_str());
    size_t rows = br_result_row_count(result);
    br_result_free(result);
    br_config_free(config);
    if (status != BR_OK)
        return report("writing results", status);

    std::printf("beamrate: wrote %zu row(s) to %s (%s)\n", rows, output.c_str(),
                format.c_str());
    return 0;
}

int cmd_gen(const std::string& scenario_path, const std::string& out_path)
{
    std::FILE* f = std::fopen(scenario_path.c_str(), "rb");
    if (!f)
    {
        std::fprintf(stderr, "beamrate: cannot read %s\n", scenario_path.c_str());
        return exit_failure;
    }
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0)
        text.append(buf, got);
    std::fclose(f);

    br_channel* channel = nullptr;
    br_status status = br_channel_generate(text.c_str(), &channel);
    if (status != BR_OK)
        return report("generating channel", status);

    status = br_channel_save(channel, out_path.c_str());
    uint32_t antennas = 0, users = 0, subcarriers = 0;
    br_channel_dims(channel, &antennas, &users, &subcarriers);
    br_channel_free(channel);
    if (status != BR_OK)
        return report("saving channel", status);

    std::printf("beamrate: wrote %ux%ux%u channel (M x K x L) to %s\n", antennas, users,
                subcarriers, out_path.c_str());
    return 0;
}

int cmd_validate(const std::string& config_path)
{
    br_config* config = nullptr;
    br_status status = br_config_load(config_path.c_str(), &config);
    if (status != BR_OK)
    {
        std::fprintf(stderr, "beamrate: invalid config (%s): %s\n", br_status_name(status),
                     br_last_error());
        return exit_usage;
    }
    br_config_free(config);
    std::printf("beamrate: config ok\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"beamrate - multiuser beamforming sum-rate experiments"};
    app.require_subcommand(1);

    std::string config_path, output, format, scenario_path, out_path;
    int threads = 0;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--output", output, "output file (overrides config)");
    run->add_option("--format", format, "csv or json (overrides config)");
    run->add_option("--threads", threads, "worker threads (default BEAMRATE_THREADS or 1)");

    auto* gen = app.add_subcommand("gen", "generate a channel file from a scenario config");
    gen->add_option("scenario", scenario_path, "scenario config (JSON)")->required();
    gen->add_option("--out", out_path, "channel file to write")->required();

    auto* validate = app.add_subcommand("validate", "parse a config and exit");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    if (run->parsed())
        return cmd_run(config_path, output, format, threads);
    if (gen->parsed())
        return cmd_gen(scenario_path, out_path);
    return cmd_validate(config_path);
}
