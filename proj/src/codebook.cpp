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

#include "codebook.hpp"

#include <set>

#include "channel.hpp"
#include "common.hpp"

namespace beamrate
{

codebook build_codebook(arma::uword n_antennas, arma::uword n_beams)
{
    if (n_antennas < 1 || n_beams < 1)
        throw validation_error("build_codebook: dimensions must be positive");

    codebook cb;
    cb.beams.set_size(n_antennas, n_beams);
    cb.angles.set_size(n_beams);
    for (arma::uword i = 0; i < n_beams; ++i)
    {
        double psi = -1.0 + (2.0 * double(i + 1) - 1.0) / double(n_beams);
        cb.angles(i) = psi;
        cb.beams.col(i) = array_response(n_antennas, psi);
    }
    return cb;
}

beam_selection extract_beams(const codebook& cb, const std::vector<arma::uword>& indices)
{
    std::set<arma::uword> seen;
    for (arma::uword i : indices)
    {
        if (i >= cb.n_beams())
            throw validation_error("extract_beams: beam index out of range");
        if (!seen.insert(i).second)
            throw validation_error("extract_beams: duplicate beam index");
    }

    beam_selection sel;
    sel.indices = indices;
    sel.beams.set_size(cb.n_antennas(), indices.size());
    for (arma::uword j = 0; j < indices.size(); ++j)
        sel.beams.col(j) = cb.beams.col(indices[j]);
    return sel;
}

} // namespace beamrate
