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

#ifndef BEAMRATE_EXPERIMENT_HPP
#define BEAMRATE_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "channel.hpp"
#include "schemes.hpp"

namespace beamrate
{

enum class experiment_kind
{
    capacity, // reference sum-capacities over the SNR list
    sweep_n,  // (relative) sum rates over the beam-budget list
    snr_loss, // required SNR and loss at a target rate, per budget
    tradeoff, // antennas-versus-RF-chains level curves
    training  // overhead-adjusted rates over the coherence-interval list
};

// One parsed run description. SNRs and losses enter in dB and are converted
// to linear exactly once, here.
struct experiment_config
{
    experiment_kind experiment = experiment_kind::capacity;
    scenario channel_spec;
    bool normalize_channel = true;
    arma::uword codebook_beams = 0; // 0: 4x antennas
    std::vector<scheme_kind> schemes;
    std::vector<double> rho_db;
    std::vector<double> rho_linear;
    std::vector<arma::uword> n_beams;
    double c_star = 0.0;
    std::vector<double> t_c;
    std::vector<double> beta_db;
    std::vector<arma::uword> m_grid; // empty: derived default
    std::string output_path;          // may be overridden on the command line
    std::string output_format = "csv";
};

// Throws validation_error with a parse/shape message on bad input.
experiment_config parse_config(const std::string& json_text);
experiment_config load_config(const std::string& path);

// Scenario-only parse for channel-generation runs (accepts either a bare
// scenario object or a full config with a "scenario" key).
scenario parse_scenario_config(const std::string& json_text);
scenario load_scenario_config(const std::string& path);

struct sweep_row
{
    std::string scheme;
    arma::uword n_beams = 0;
    double rho_db = 0.0;
    double sum_rate = 0.0;      // bits/s/Hz
    double relative_rate = 0.0; // against the TDD reference at the same SNR
    std::string flag = "ok";
};

struct sweep_result
{
    std::vector<sweep_row> rows;
};

// Executes the configured experiment. Every output includes the TDD
// reference rows needed to recompute the relative rates offline; rows come
// back sorted by (scheme, N, rho, flag).
sweep_result run_experiment(const experiment_config& cfg, int threads);

// CSV with the exact header
// scheme,N,rho_db,sum_rate_bps_hz,relative_rate,flag
// and floats printed with nine significant digits; the JSON form carries
// identical field names and digit strings. Both are byte-deterministic.
std::string format_csv(const sweep_result& result);
std::string format_json(const sweep_result& result);
void write_result(const sweep_result& result, const std::string& path,
                  const std::string& format);

} // namespace beamrate

#endif
