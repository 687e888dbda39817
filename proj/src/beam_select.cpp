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

#include "beam_select.hpp"

#include <cmath>
#include <limits>

#include "capacity.hpp"
#include "common.hpp"
#include "zf.hpp"

namespace beamrate
{

static constexpr double residual_floor = 1e-10;

std::uint64_t subset_count(arma::uword n, arma::uword k)
{
    if (k > n)
        return 0;
    k = std::min<arma::uword>(k, n - k);
    constexpr std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    long double acc = 1.0L;
    for (arma::uword i = 1; i <= k; ++i)
        acc = acc * (long double)(n - k + i) / (long double)(i);
    return acc >= (long double)cap ? cap : std::uint64_t(acc + 0.5L);
}

// Subtract from every unselected residual its component along the new unit
// direction.
static void deflate(arma::cx_mat& residuals, const std::vector<char>& taken,
                    const arma::cx_vec& direction)
{
    arma::cx_rowvec coef = direction.t() * residuals;
    for (arma::uword j = 0; j < residuals.n_cols; ++j)
        if (!taken[j])
            residuals.col(j) -= direction * coef(j);
}

// Re-orthogonalized unit vector of the winner column against the current
// basis (one extra Gram-Schmidt pass keeps the basis orthonormal to
// working precision over many steps).
static arma::cx_vec commit_direction(const arma::cx_vec& residual, const arma::cx_mat& basis)
{
    arma::cx_vec v = residual;
    if (basis.n_cols > 0)
        v -= basis * (basis.t() * v);
    double norm = arma::norm(v);
    if (norm <= 0.0)
        throw numeric_error("beam selection: degenerate direction after orthogonalization");
    return v / norm;
}

beam_selection greedy_ue(const arma::cx_mat& user_channels, const codebook& cb,
                         arma::uword n_beams)
{
    arma::uword n_candidates = cb.n_beams();
    if (n_beams > n_candidates)
        throw validation_error("greedy_ue: budget exceeds codebook size");
    if (user_channels.n_rows != cb.n_antennas())
        throw validation_error("greedy_ue: channel height must match codebook");

    arma::cx_mat residuals = cb.beams; // component of each beam orthogonal to the span
    std::vector<char> taken(n_candidates, 0);
    arma::cx_mat basis(cb.n_antennas(), 0);
    std::vector<arma::uword> picked;
    picked.reserve(n_beams);

    while (picked.size() < n_beams)
    {
        arma::sword best = -1;
        double best_score = -1.0;
        for (arma::uword j = 0; j < n_candidates; ++j)
        {
            if (taken[j])
                continue;
            double norm = arma::norm(residuals.col(j));
            if (norm < residual_floor)
                continue;
            // Projection gain of the normalized new direction over all
            // given subcarriers.
            double score = std::pow(arma::norm(residuals.col(j).t() * user_channels), 2) /
                           (norm * norm);
            if (best < 0 || score > best_score)
            {
                best = arma::sword(j);
                best_score = score;
            }
        }

        if (best < 0)
        {
            // Span complete: remaining picks cannot change the objective;
            // fill deterministically with the lowest unselected indices.
            for (arma::uword j = 0; j < n_candidates && picked.size() < n_beams; ++j)
                if (!taken[j])
                {
                    taken[j] = 1;
                    picked.push_back(j);
                }
            break;
        }

        arma::cx_vec dir = commit_direction(residuals.col(arma::uword(best)), basis);
        basis = arma::join_rows(basis, dir);
        taken[arma::uword(best)] = 1;
        picked.push_back(arma::uword(best));
        deflate(residuals, taken, dir);
    }
    return extract_beams(cb, picked);
}

beam_selection greedy_bs(const std::vector<arma::cx_mat>& channels, const codebook& cb,
                         arma::uword n_beams, double rho)
{
    arma::uword n_candidates = cb.n_beams();
    if (n_beams > n_candidates)
        throw validation_error("greedy_bs: budget exceeds codebook size");
    if (channels.empty())
        throw validation_error("greedy_bs: no subcarriers given");
    if (!(rho > 0.0))
        throw validation_error("greedy_bs: rho must be positive");
    arma::uword n_users = channels.front().n_rows;
    for (const auto& H : channels)
        if (H.n_rows != n_users || H.n_cols != cb.n_antennas())
            throw validation_error("greedy_bs: channel dimensions are inconsistent");

    double per_user = rho / double(n_users);
    arma::uword n_sub = channels.size();

    arma::cx_mat residuals = cb.beams;
    std::vector<char> taken(n_candidates, 0);
    arma::cx_mat basis(cb.n_antennas(), 0);
    std::vector<arma::uword> picked;
    picked.reserve(n_beams);

    // Per-subcarrier I + (rho/K) H V V^H H^H for the current basis V and its
    // inverse; candidate scores are rank-one determinant updates.
    std::vector<arma::cx_mat> cov(n_sub, arma::cx_mat(n_users, n_users, arma::fill::eye));
    std::vector<arma::cx_mat> inv_cov(n_sub, arma::cx_mat(n_users, n_users, arma::fill::eye));

    while (picked.size() < n_beams)
    {
        arma::sword best = -1;
        double best_score = -1.0;
        for (arma::uword j = 0; j < n_candidates; ++j)
        {
            if (taken[j])
                continue;
            double norm = arma::norm(residuals.col(j));
            if (norm < residual_floor)
                continue;
            arma::cx_vec dir = residuals.col(j) / norm;
            double score = 0.0;
            for (arma::uword l = 0; l < n_sub; ++l)
            {
                arma::cx_vec w = channels[l] * dir;
                double quad =
                    std::max(0.0, arma::as_scalar(w.t() * inv_cov[l] * w).real());
                score += std::log2(1.0 + per_user * quad);
            }
            if (best < 0 || score > best_score)
            {
                best = arma::sword(j);
                best_score = score;
            }
        }

        if (best < 0)
            break; // span complete; more beams cannot raise the capacity

        arma::cx_vec dir = commit_direction(residuals.col(arma::uword(best)), basis);
        basis = arma::join_rows(basis, dir);
        taken[arma::uword(best)] = 1;
        picked.push_back(arma::uword(best));
        deflate(residuals, taken, dir);

        for (arma::uword l = 0; l < n_sub; ++l)
        {
            arma::cx_vec w = channels[l] * dir;
            cov[l] += per_user * (w * w.t());
            inv_cov[l] = arma::inv(cov[l]);
        }
    }
    return extract_beams(cb, picked);
}

// Lexicographic combination enumeration; returns false when exhausted.
static bool next_combination(std::vector<arma::uword>& idx, arma::uword n)
{
    arma::uword k = idx.size();
    for (arma::uword i = k; i-- > 0;)
    {
        if (idx[i] + (k - i) < n)
        {
            ++idx[i];
            for (arma::uword j = i + 1; j < k; ++j)
                idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

static void check_cap(arma::uword n, arma::uword k, arma::uword cap, const char* who)
{
    std::uint64_t count = subset_count(n, k);
    if (count > cap)
        throw budget_error(std::string(who) + ": subset count " + std::to_string(count) +
                           " exceeds the exhaustive cap " + std::to_string(cap));
}

beam_selection exhaustive_ue(const arma::cx_mat& user_channels, const codebook& cb,
                             arma::uword n_beams, arma::uword cap, bool hermitian)
{
    if (n_beams > cb.n_beams() || n_beams == 0)
        throw validation_error("exhaustive_ue: invalid budget");
    if (user_channels.n_rows != cb.n_antennas())
        throw validation_error("exhaustive_ue: channel height must match codebook");
    check_cap(cb.n_beams(), n_beams, cap, "exhaustive_ue");

    std::vector<arma::uword> idx(n_beams);
    for (arma::uword i = 0; i < n_beams; ++i)
        idx[i] = i;

    std::vector<arma::uword> best_idx;
    double best_err = std::numeric_limits<double>::infinity();
    do
    {
        beam_selection sel = extract_beams(cb, idx);
        double err = 0.0;
        for (arma::uword c = 0; c < user_channels.n_cols; ++c)
        {
            arma::cx_vec h = user_channels.col(c);
            err += std::pow(arma::norm(h - quantize_channel(h, sel.beams, hermitian)), 2);
        }
        if (err < best_err)
        {
            best_err = err;
            best_idx = idx;
        }
    } while (next_combination(idx, cb.n_beams()));
    return extract_beams(cb, best_idx);
}

beam_selection exhaustive_bs(const std::vector<arma::cx_mat>& channels, const codebook& cb,
                             arma::uword n_beams, double rho, arma::uword cap)
{
    if (n_beams > cb.n_beams() || n_beams == 0)
        throw validation_error("exhaustive_bs: invalid budget");
    if (channels.empty())
        throw validation_error("exhaustive_bs: no subcarriers given");
    check_cap(cb.n_beams(), n_beams, cap, "exhaustive_bs");

    std::vector<arma::uword> idx(n_beams);
    for (arma::uword i = 0; i < n_beams; ++i)
        idx[i] = i;

    std::vector<arma::uword> best_idx;
    double best_rate = -1.0;
    do
    {
        beam_selection sel = extract_beams(cb, idx);
        double rate = 0.0;
        for (const auto& H : channels)
            rate += bc_capacity_with_beams(H, sel.beams, rho).first.value;
        rate /= double(channels.size());
        if (rate > best_rate)
        {
            best_rate = rate;
            best_idx = idx;
        }
    } while (next_combination(idx, cb.n_beams()));
    return extract_beams(cb, best_idx);
}

} // namespace beamrate
