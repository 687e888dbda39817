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

#include "beamrate/beamrate.h"

#include <cmath>
#include <string>

#include "channel.hpp"
#include "common.hpp"
#include "experiment.hpp"
#include "schemes.hpp"

struct br_channel
{
    beamrate::channel_tensor tensor;
};

struct br_config
{
    beamrate::experiment_config config;
};

struct br_result
{
    beamrate::sweep_result result;
};

namespace
{

thread_local std::string g_last_error;

br_status fail(br_status code, const char* what)
{
    g_last_error = what ? what : "";
    return code;
}

// Maps the library exception hierarchy onto status codes.
template <typename Fn> br_status guard(Fn&& fn)
{
    try
    {
        fn();
        g_last_error.clear();
        return BR_OK;
    }
    catch (const beamrate::io_error& e)
    {
        return fail(BR_ERR_IO, e.what());
    }
    catch (const beamrate::format_error& e)
    {
        return fail(BR_ERR_FORMAT, e.what());
    }
    catch (const beamrate::unreachable_rate_error& e)
    {
        return fail(BR_ERR_UNREACHABLE_RATE, e.what());
    }
    catch (const beamrate::budget_error& e)
    {
        return fail(BR_ERR_BUDGET_EXCEEDED, e.what());
    }
    catch (const beamrate::numeric_error& e)
    {
        return fail(BR_ERR_NUMERIC, e.what());
    }
    catch (const beamrate::validation_error& e)
    {
        return fail(BR_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::invalid_argument& e)
    {
        return fail(BR_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::exception& e)
    {
        return fail(BR_ERR_INTERNAL, e.what());
    }
}

} // namespace

extern "C"
{

const char* br_version(void)
{
    return "0.1.0";
}

const char* br_status_name(br_status status)
{
    switch (status)
    {
    case BR_OK:
        return "ok";
    case BR_ERR_INVALID_ARGUMENT:
        return "invalid-argument";
    case BR_ERR_IO:
        return "io";
    case BR_ERR_FORMAT:
        return "format";
    case BR_ERR_NUMERIC:
        return "numeric";
    case BR_ERR_UNREACHABLE_RATE:
        return "unreachable-rate";
    case BR_ERR_BUDGET_EXCEEDED:
        return "budget-exceeded";
    case BR_ERR_INTERNAL:
        return "internal";
    }
    return "unknown";
}

const char* br_last_error(void)
{
    return g_last_error.c_str();
}

br_status br_channel_generate(const char* scenario_json, br_channel** out)
{
    if (!scenario_json || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard(
        [&]
        {
            auto spec = beamrate::parse_scenario_config(scenario_json);
            *out = new br_channel{beamrate::generate(spec)};
        });
}

br_status br_channel_load(const char* path, br_channel** out)
{
    if (!path || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { *out = new br_channel{beamrate::load_channel(path)}; });
}

br_status br_channel_save(const br_channel* channel, const char* path)
{
    if (!channel || !path)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { beamrate::save_channel(channel->tensor, path); });
}

br_status br_channel_dims(const br_channel* channel, uint32_t* antennas, uint32_t* users,
                          uint32_t* subcarriers)
{
    if (!channel)
        return fail(BR_ERR_INVALID_ARGUMENT, "null channel");
    if (antennas)
        *antennas = uint32_t(channel->tensor.n_antennas());
    if (users)
        *users = uint32_t(channel->tensor.n_users());
    if (subcarriers)
        *subcarriers = uint32_t(channel->tensor.n_subcarriers());
    return BR_OK;
}

br_status br_channel_normalize(const br_channel* channel, br_channel** out)
{
    if (!channel || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { *out = new br_channel{beamrate::normalize(channel->tensor)}; });
}

br_status br_channel_gain(const br_channel* channel, uint32_t antenna, uint32_t user,
                          uint32_t subcarrier, double* re, double* im)
{
    if (!channel || !re || !im)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    const auto& t = channel->tensor;
    if (antenna >= t.n_antennas() || user >= t.n_users() || subcarrier >= t.n_subcarriers())
        return fail(BR_ERR_INVALID_ARGUMENT, "gain index out of range");
    auto v = t.gains(antenna, user, subcarrier);
    *re = v.real();
    *im = v.imag();
    return BR_OK;
}

void br_channel_free(br_channel* channel)
{
    delete channel;
}

br_status br_scheme_sum_rate(const br_channel* channel, const char* scheme, uint32_t n_beams,
                             uint32_t codebook_beams, double rho_db, int threads,
                             double* out_rate)
{
    if (!channel || !scheme || !out_rate)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard(
        [&]
        {
            auto kind = beamrate::parse_scheme_name(scheme);
            if (!kind)
                throw beamrate::validation_error(std::string("unknown scheme '") + scheme +
                                                 "'");
            beamrate::eval_options opts;
            opts.codebook_beams = codebook_beams;
            opts.threads = threads;
            double rho = std::pow(10.0, rho_db / 10.0);
            *out_rate = beamrate::scheme_sum_rate(channel->tensor,
                                                  beamrate::scheme{*kind, n_beams}, rho, opts);
        });
}

br_status br_config_parse(const char* json_text, br_config** out)
{
    if (!json_text || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { *out = new br_config{beamrate::parse_config(json_text)}; });
}

br_status br_config_load(const char* path, br_config** out)
{
    if (!path || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { *out = new br_config{beamrate::load_config(path)}; });
}

void br_config_free(br_config* config)
{
    delete config;
}

const char* br_config_output_path(const br_config* config)
{
    return config ? config->config.output_path.c_str() : "";
}

const char* br_config_output_format(const br_config* config)
{
    return config ? config->config.output_format.c_str() : "";
}

br_status br_run(const br_config* config, int threads, br_result** out)
{
    if (!config || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&]
                 { *out = new br_result{beamrate::run_experiment(config->config, threads)}; });
}

size_t br_result_row_count(const br_result* result)
{
    return result ? result->result.rows.size() : 0;
}

br_status br_result_row(const br_result* result, size_t index, br_row_view* out)
{
    if (!result || !out)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= result->result.rows.size())
        return fail(BR_ERR_INVALID_ARGUMENT, "row index out of range");
    const auto& row = result->result.rows[index];
    out->scheme = row.scheme.c_str();
    out->n_beams = uint32_t(row.n_beams);
    out->rho_db = row.rho_db;
    out->sum_rate_bps_hz = row.sum_rate;
    out->relative_rate = row.relative_rate;
    out->flag = row.flag.c_str();
    return BR_OK;
}

br_status br_result_write(const br_result* result, const char* path, const char* format)
{
    if (!result || !path || !format)
        return fail(BR_ERR_INVALID_ARGUMENT, "null argument");
    return guard([&] { beamrate::write_result(result->result, path, format); });
}

void br_result_free(br_result* result)
{
    delete result;
}

} // extern "C"
