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

#ifndef BEAMRATE_SCHEMES_HPP
#define BEAMRATE_SCHEMES_HPP

#include <armadillo>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"

namespace beamrate
{

// The compared transmission strategies. The D-/H- prefix distinguishes
// per-subcarrier beam choice from one choice for the whole band; GOB lets
// every user report its own beams (zero-forcing transmission), SUB picks a
// common beam subspace for all users (dirty-paper rates inside it).
enum class scheme_kind
{
    tdd,         // full CSI, no beam structure: the sum-capacity reference
    d_gob,       // per-subcarrier per-user beams, zero-forcing
    h_gob,       // whole-band per-user beams, zero-forcing
    d_sub,       // per-subcarrier common subspace, capacity inside it
    h_sub,       // whole-band common subspace, capacity inside it
    a_gob,       // analog-only: one whole-band beam per user, no baseband
    kxk_baseline // small-aperture K-antenna reference
};

struct scheme
{
    scheme_kind kind = scheme_kind::tdd;
    arma::uword n_beams = 0; // ignored for tdd / kxk_baseline; forced 1 for a_gob
};

const char* scheme_name(scheme_kind kind);
std::optional<scheme_kind> parse_scheme_name(const std::string& name);
bool scheme_uses_beams(scheme_kind kind);
bool is_sub_scheme(scheme_kind kind);

struct eval_options
{
    arma::uword codebook_beams = 0; // M'; 0 means 4x the antenna count
    int threads = 1;
};

// m antenna indices (0-based, ascending) placed round-to-nearest on m
// points equispaced over the full array, so a subarray keeps the aperture
// of the original array.
std::vector<arma::uword> aperture_subarray(arma::uword n_antennas, arma::uword m);

// Average sum rate of one scheme at sum SNR rho (linear). Throws
// validation_error when the scheme's beam budget is out of range
// (GOB: 1 <= N <= min(M, M'); SUB additionally N >= K).
double scheme_sum_rate(const channel_tensor& t, const scheme& s, double rho,
                       const eval_options& opts);

// Smallest SNR at which the scheme reaches the target sum rate, within
// 1e-4 bits, by bisection on log-SNR over [1e-6, 1e8]. Beam selection is
// redone at every probed SNR. Throws unreachable_rate_error when the rate
// at 1e8 still falls short (the interference-limited plateau).
double required_snr(const channel_tensor& t, const scheme& s, double c_star,
                    const eval_options& opts);

// SNR loss against the full-CSI reference at equal target rate:
// delta = rho*(reference) / rho(scheme) <= 1; loss_db = -10 log10(delta).
struct snr_loss_result
{
    double linear = 1.0;
    double loss_db = 0.0;
};

snr_loss_result snr_loss(const channel_tensor& t, const scheme& s, double c_star,
                         const eval_options& opts);

// Smallest beam budget meeting each allowable loss (positive dB); a row is
// unreachable when no admissible N suffices.
struct beams_for_loss_row
{
    double allow_db = 0.0;
    arma::uword n_beams = 0;
    bool reachable = false;
};

std::vector<beams_for_loss_row> beams_for_loss(const channel_tensor& t, scheme_kind family,
                                               double c_star,
                                               const std::vector<double>& allow_db,
                                               const eval_options& opts);

// Pure reduction used by beams_for_loss: delta_linear[i] is the loss of
// budget n_min + i (NaN marks unreachable budgets).
std::vector<beams_for_loss_row> beams_for_loss_table(const std::vector<double>& delta_linear,
                                                     arma::uword n_min,
                                                     const std::vector<double>& allow_db);

// Antenna/RF-chain tradeoff: SNR loss of whole-band subspace beamforming
// with n beams on an m-antenna subarray, against the full-array reference.
struct tradeoff_cell
{
    arma::uword n_beams = 0;
    double delta_linear = 0.0;
    bool reachable = false;
};

struct tradeoff_pick
{
    arma::uword n_beams = 0;
    double delta_linear = 0.0;
    bool feasible = false;
    bool monotone = true; // loss nondecreasing in n over the reachable cells
};

// Among the cells with delta >= beta, picks the one of smallest delta
// (ties to the smallest n). Under monotone deltas this is the smallest
// feasible n; otherwise the global argmin is returned with monotone=false.
tradeoff_pick tradeoff_reduce(const std::vector<tradeoff_cell>& cells, double beta_linear);

struct tradeoff_row
{
    double beta_db = 0.0;
    arma::uword m_antennas = 0;
    tradeoff_pick pick;
};

std::vector<tradeoff_row> tradeoff_curve(const channel_tensor& t,
                                         const std::vector<double>& beta_db, double c_star,
                                         const std::vector<arma::uword>& m_grid,
                                         const std::vector<arma::uword>& n_grid,
                                         const eval_options& opts);

// Downlink pilot cost of a beam budget: every user may report distinct
// beams (K*N pilots) for the GOB family; a common subspace needs N.
double pilot_count(scheme_kind kind, arma::uword n_beams, arma::uword n_users);

// Overhead-adjusted rate max over the admissible budgets:
// (1 - N_p(N)/T_c) * rate(N), clamped at zero, lowest N on ties.
struct training_result
{
    arma::uword n_star = 0;
    double adjusted_rate = 0.0;
};

training_result training_optimize(const channel_tensor& t, const scheme& s, double rho,
                                  double t_c, const eval_options& opts);

} // namespace beamrate

#endif
