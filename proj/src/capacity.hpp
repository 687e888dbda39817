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

#ifndef BEAMRATE_CAPACITY_HPP
#define BEAMRATE_CAPACITY_HPP

#include <armadillo>
#include <utility>
#include <vector>

#include "channel.hpp"

namespace beamrate
{

// Scalar transmit powers of the dual multiple-access problem, one per user,
// under the sum budget rho.
struct power_allocation
{
    arma::vec powers;
    double budget = 0.0;
};

struct capacity_result
{
    double value = 0.0; // bits/s/Hz
    power_allocation allocation;
    arma::uword iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;           // bits; spread of active marginals
    std::vector<double> objective_trace; // objective after each iteration
};

// Relative rank tolerance used wherever a pseudoinverse or QR rank decision
// is made.
constexpr double rank_tolerance = 1e-10;

// Downlink sum-capacity of the broadcast channel H (K x M rows are user
// channels transposed) under sum transmit SNR rho, computed through the
// dual MAC by sum-power iterative waterfilling. Stops when the relative
// objective change falls below 1e-10 (at most 500 iterations); converged
// additionally requires the equal-marginal KKT residual <= 1e-6 bits.
// rho == 0 short-circuits to a zero allocation.
capacity_result dpc_sum_capacity(const arma::cx_mat& H, double rho);

// Mean of dpc_sum_capacity over all subcarriers. When all_converged is
// given it receives the AND of the per-subcarrier convergence flags.
double average_sum_capacity(const channel_tensor& t, double rho,
                            bool* all_converged = nullptr, int threads = 1);

// Thin QR factorization B = basis * tri with orthonormal basis columns and
// an invertible upper-triangular factor whose diagonal is real positive
// (which makes the pair unique).
struct beam_factorization
{
    arma::cx_mat basis; // M x N, basis^H basis = I
    arma::cx_mat tri;   // N x N upper triangular
};

// Throws numeric_error when the smallest singular value of B is below
// rank_tolerance times the largest.
beam_factorization factorize_beams(const arma::cx_mat& B);

// Sum-capacity of the broadcast channel restricted to the beam subspace
// span(B): solves the dual MAC of the effective channel H * basis. The
// value depends on B only through its span.
std::pair<capacity_result, beam_factorization>
bc_capacity_with_beams(const arma::cx_mat& H, const arma::cx_mat& B, double rho);

// Per-user downlink covariance matrices (N x N, ordered as the users).
using covariance_set = std::vector<arma::cx_mat>;

// MAC-to-BC covariance transformation: maps the dual-MAC power allocation
// for effective channel H_eff (K x N) to downlink covariances Q_i such that
// the broadcast rates reproduce the MAC rates user by user and
// sum_i trace(tri * Q_i * tri^H) equals the spent MAC power. Uplink
// receive directions become downlink transmit directions with the
// successive decoding order reversed.
covariance_set mac_to_bc(const arma::cx_mat& H_eff, const power_allocation& alloc,
                         const beam_factorization& fact);

// Direct evaluation of the broadcast sum rate achieved by covariances covs
// behind beams B, encoding in natural user order: user i is interfered by
// users j < i only.
double bc_rate_eval(const arma::cx_mat& H, const arma::cx_mat& B, const covariance_set& covs);

// Whole-band capacity with one common beam set: mean over subcarriers of
// bc_capacity_with_beams(H(l), B, rho), each subcarrier with its own full
// power budget.
double hsub_wideband_capacity(const channel_tensor& t, const arma::cx_mat& B, double rho,
                              bool* all_converged = nullptr, int threads = 1);

} // namespace beamrate

#endif
