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

#include "zf.hpp"

#include <cmath>

#include "capacity.hpp"
#include "common.hpp"

namespace beamrate
{

// Minimum-norm least-squares solution of G a = g via SVD with relative
// truncation at rank_tolerance.
static arma::cx_vec truncated_solve(const arma::cx_mat& G, const arma::cx_vec& g)
{
    arma::cx_mat U, V;
    arma::vec s;
    if (!arma::svd(U, s, V, G))
        throw numeric_error("quantize_channel: SVD of the beam Gram matrix failed");
    arma::cx_vec y = U.t() * g;
    double cutoff = s.n_elem > 0 ? rank_tolerance * s(0) : 0.0;
    for (arma::uword i = 0; i < s.n_elem; ++i)
        y(i) = s(i) > cutoff ? y(i) / s(i) : std::complex<double>(0.0, 0.0);
    return V * y;
}

arma::cx_vec quantize_channel(const arma::cx_vec& h, const arma::cx_mat& B, bool hermitian)
{
    if (B.n_rows != h.n_elem)
        throw validation_error("quantize_channel: beam matrix height must match channel");
    if (B.n_cols > B.n_rows)
        throw validation_error("quantize_channel: more beams than antennas");
    if (B.n_cols == 0)
        return arma::cx_vec(h.n_elem, arma::fill::zeros);

    arma::cx_mat G = hermitian ? arma::cx_mat(B.t() * B) : arma::cx_mat(B.st() * B);
    arma::cx_vec g = hermitian ? arma::cx_vec(B.t() * h) : arma::cx_vec(B.st() * h);
    return B * truncated_solve(G, g);
}

precoder zf_precoder(const arma::cx_mat& H_hat)
{
    arma::uword n_users = H_hat.n_rows;
    arma::uword n_antennas = H_hat.n_cols;
    if (n_users > n_antennas)
        throw validation_error("zf_precoder: requires K <= M");

    arma::cx_mat pi;
    if (!arma::pinv(pi, H_hat, rank_tolerance * arma::norm(H_hat, 2)))
        throw numeric_error("zf_precoder: pseudoinverse failed");

    precoder p;
    p.columns.zeros(n_antennas, n_users);
    p.active.assign(n_users, false);
    double ref = arma::norm(pi, "fro");
    for (arma::uword k = 0; k < n_users; ++k)
    {
        double len = arma::norm(pi.col(k));
        if (len > 1e-12 * ref && len > 0.0)
        {
            p.columns.col(k) = pi.col(k) / len;
            p.active[k] = true;
        }
    }
    return p;
}

zf_rate sum_rate_with_precoder(const arma::cx_mat& H_true, const precoder& P, double rho)
{
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw validation_error("zf_sum_rate: rho must be finite and nonnegative");
    arma::uword n_users = H_true.n_rows;
    if (P.columns.n_cols != n_users || P.columns.n_rows != H_true.n_cols)
        throw validation_error("zf_sum_rate: precoder dimensions do not match channel");

    double per_user = rho / double(n_users);
    arma::cx_mat cross = H_true * P.columns; // (k, i) = h_k^T p_i

    zf_rate out;
    out.sinr.zeros(n_users);
    for (arma::uword k = 0; k < n_users; ++k)
    {
        if (!P.active[k])
            continue;
        double signal = per_user * std::norm(cross(k, k));
        double interference = 0.0;
        for (arma::uword i = 0; i < n_users; ++i)
            if (i != k && P.active[i])
                interference += per_user * std::norm(cross(k, i));
        out.sinr(k) = signal / (1.0 + interference);
        out.sum_rate += std::log2(1.0 + out.sinr(k));
    }
    return out;
}

zf_rate zf_sum_rate(const arma::cx_mat& H_true, const arma::cx_mat& H_hat, double rho)
{
    if (H_true.n_rows != H_hat.n_rows || H_true.n_cols != H_hat.n_cols)
        throw validation_error("zf_sum_rate: true and quantized channels differ in shape");
    return sum_rate_with_precoder(H_true, zf_precoder(H_hat), rho);
}

} // namespace beamrate
