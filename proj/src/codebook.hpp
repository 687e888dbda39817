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

#ifndef BEAMRATE_CODEBOOK_HPP
#define BEAMRATE_CODEBOOK_HPP

#include <armadillo>
#include <vector>

namespace beamrate
{

// Predetermined grid of beams: unit-norm Vandermonde array responses at
// sine-angles uniformly spaced over [-1, 1). With n_beams == n_antennas the
// columns are orthonormal (an IDFT matrix up to a phase-origin shift).
struct codebook
{
    arma::cx_mat beams; // M x M', unit-norm columns
    arma::vec angles;   // sine-angle of each beam

    arma::uword n_antennas() const { return beams.n_rows; }
    arma::uword n_beams() const { return beams.n_cols; }
};

// Beam (m, i) = exp(j pi * psi_i * m) / sqrt(M) with m = 0..M-1 and
// psi_i = -1 + (2(i+1) - 1) / M' for 0-based beam index i.
codebook build_codebook(arma::uword n_antennas, arma::uword n_beams);

// An ordered subset of codebook beams. indices are 0-based, distinct, and
// beams holds the corresponding columns in the same order.
struct beam_selection
{
    std::vector<arma::uword> indices;
    arma::cx_mat beams; // M x N

    arma::uword n_selected() const { return beams.n_cols; }
};

// Submatrix extraction; duplicate or out-of-range indices throw
// validation_error. An empty index list yields a legal M x 0 selection.
beam_selection extract_beams(const codebook& cb, const std::vector<arma::uword>& indices);

} // namespace beamrate

#endif
