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

#ifndef BEAMRATE_ZF_HPP
#define BEAMRATE_ZF_HPP

#include <armadillo>
#include <vector>

namespace beamrate
{

// Reconstruction of a channel vector from the gains reported on the beams
// B (M x N): returns B * a with a the minimum-norm least-squares solution
// of (B^T B) a = B^T h.
//
// Beam gains are reported through transposed products (the downlink gain of
// beam c on channel h is c^T h), so by default the reconstruction
// interpolates those transposed gains: when B^T B is nonsingular,
// B^T h_hat == B^T h exactly, which makes the reconstruction an oblique
// projection onto span(B). Near-singular Gram matrices (oversampled
// codebooks can select nearly collinear beams) fall back to an SVD solve
// truncated at relative 1e-10. Setting hermitian switches to the orthogonal
// projection onto span(B) for sensitivity studies.
// N == 0 returns the zero vector.
arma::cx_vec quantize_channel(const arma::cx_vec& h, const arma::cx_mat& B,
                              bool hermitian = false);

// Unit-norm zero-forcing columns from the pseudoinverse of the quantized
// channel matrix. Columns whose pseudoinverse norm is negligible are
// flagged inactive (the user is served no power) rather than an error.
struct precoder
{
    arma::cx_mat columns; // M x K, unit-norm where active
    std::vector<bool> active;
};

precoder zf_precoder(const arma::cx_mat& H_hat);

struct zf_rate
{
    double sum_rate = 0.0; // bits/s/Hz
    arma::vec sinr;        // per user, linear
};

// Achievable zero-forcing sum rate with equal per-user power rho/K: the
// precoder is built from H_hat while the SINRs use the true channels, with
// transposed products h_k^T p_i throughout.
zf_rate zf_sum_rate(const arma::cx_mat& H_true, const arma::cx_mat& H_hat, double rho);

// Same SINR evaluation for an externally supplied precoder (used by the
// analog-only scheme, which transmits fixed beams with no pseudoinverse).
zf_rate sum_rate_with_precoder(const arma::cx_mat& H_true, const precoder& P, double rho);

} // namespace beamrate

#endif
