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

#ifndef BEAMRATE_CHANNEL_HPP
#define BEAMRATE_CHANNEL_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

namespace beamrate
{

// Frequency-selective multiuser channel: complex gain per (antenna, user,
// subcarrier). gains(m, k, l) is the gain between BS antenna m and user k
// on subcarrier l. Values are immutable after construction by convention;
// all operations below return fresh tensors.
struct channel_tensor
{
    arma::cx_cube gains; // M x K x L

    arma::uword n_antennas() const { return gains.n_rows; }
    arma::uword n_users() const { return gains.n_cols; }
    arma::uword n_subcarriers() const { return gains.n_slices; }

    // K x M matrix whose k-th row is the transposed channel of user k.
    arma::cx_mat channel_matrix(arma::uword l) const { return gains.slice(l).st(); }

    // M-vector channel of user k on subcarrier l.
    arma::cx_vec user_channel(arma::uword k, arma::uword l) const
    {
        return gains.slice(l).col(k);
    }

    // Tensor restricted to the given antenna rows (indices ascending).
    channel_tensor subarray(const std::vector<arma::uword>& antenna_idx) const;

    // Throws validation_error unless all entries are finite and M >= K >= 1,
    // L >= 1.
    void validate() const;
};

enum class scenario_kind
{
    rician_los,   // fixed array-response component plus tapped-delay-line scatter
    rayleigh_tdl, // pure tapped-delay-line scatter (NLOS proxy)
    cluster,      // scattered clusters around per-user nominal directions
    file          // load from a channel file
};

// Synthetic-scenario description. The seed fully determines the output;
// tap powers are renormalized to sum 1 before use.
struct scenario
{
    scenario_kind kind = scenario_kind::rician_los;
    arma::uword n_users = 1;
    arma::uword n_antennas = 1;
    arma::uword n_subcarriers = 1;

    double rician_k_factor_db = 10.0;
    std::vector<double> los_angles; // sine-angle in [-1, 1), one per user

    arma::uword num_taps = 8;
    std::vector<double> tap_powers; // relative linear powers; empty -> decay rule
    double tap_decay_db = 3.0;      // per-tap exponential decay when tap_powers empty

    arma::uword cluster_count = 3;
    double cluster_angular_spread = 0.1; // sine-angle units
    double cluster_k_factor_db = 5.0;    // specular-to-diffuse ratio inside a cluster

    std::uint64_t seed = 0;
    std::string path; // kind == file only
};

// Unit-norm uniform-linear-array response at sine-angle theta.
arma::cx_vec array_response(arma::uword n_antennas, double theta);

// Deterministic synthetic generation (or file load for kind == file).
channel_tensor generate(const scenario& spec);

// Per-user scaling so that the average gain (1/(L*M)) sum |h|^2 equals 1.
// Exactly one positive scalar per user; relative variation across antennas
// and subcarriers is preserved. Throws validation_error for a user whose
// channel is identically zero.
channel_tensor normalize(const channel_tensor& t);

// Channel file ("MMC1"): magic 4D 4D 43 31, then little-endian uint32
// M, K, L, then L*K*M complex samples as two little-endian IEEE-754
// binary64 values (real, imaginary); subcarrier outermost, then user,
// then antenna innermost. save/load round-trips bit-exactly.
void save_channel(const channel_tensor& t, const std::string& path);
channel_tensor load_channel(const std::string& path);

} // namespace beamrate

#endif
