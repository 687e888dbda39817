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

#ifndef BEAMRATE_BEAM_SELECT_HPP
#define BEAMRATE_BEAM_SELECT_HPP

#include <armadillo>
#include <vector>

#include "codebook.hpp"

namespace beamrate
{

// Greedy pursuit for one user: each step adds the beam that maximizes the
// squared norm of the orthogonal projection of the user channel onto the
// span of the beams chosen so far plus the candidate. user_channels is
// M x J; J == 1 selects for a single subcarrier, J == L averages the
// projection over the band. Indices are returned in selection order
// (prefixes of the result are the smaller-budget selections). Ties go to
// the lowest candidate index. Candidates whose component orthogonal to the
// current span has norm below 1e-10 cannot raise the objective; once only
// such candidates remain, the lowest-index unselected beams fill the
// remaining slots.
beam_selection greedy_ue(const arma::cx_mat& user_channels, const codebook& cb,
                         arma::uword n_beams);

// Greedy pursuit for the base station with the power split equally over
// users: each step adds the beam maximizing
//   log2 det(I + (rho/K) H(l) P H(l)^H)
// summed over the given subcarriers, with P the orthogonal projection onto
// the enlarged span. One K x M matrix selects per subcarrier, a list of L
// is the whole-band objective. Stops early (fewer than n_beams indices)
// once every remaining candidate is within 1e-10 of the current span, which
// leaves the achievable capacity unchanged and the returned beam matrix
// full rank.
beam_selection greedy_bs(const std::vector<arma::cx_mat>& channels, const codebook& cb,
                         arma::uword n_beams, double rho);

// Exact minimizer of the reconstruction error sum_j |h_j - h_hat_j|^2 over
// all subsets of n_beams beams (quantization as in quantize_channel, with
// the same hermitian switch). Ties break to the lexicographically smallest
// index set. Throws budget_error, naming the count, when C(M', n) exceeds
// cap.
beam_selection exhaustive_ue(const arma::cx_mat& user_channels, const codebook& cb,
                             arma::uword n_beams, arma::uword cap = 1000000,
                             bool hermitian = false);

// Exact maximizer of the mean beamspace sum-capacity over all subsets.
beam_selection exhaustive_bs(const std::vector<arma::cx_mat>& channels, const codebook& cb,
                             arma::uword n_beams, double rho, arma::uword cap = 1000000);

// C(n, k) with saturation at 2^63-1 (used for cap checks and messages).
std::uint64_t subset_count(arma::uword n, arma::uword k);

} // namespace beamrate

#endif
