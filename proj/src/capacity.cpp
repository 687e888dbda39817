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

#include "capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "parallel.hpp"

namespace beamrate
{

static constexpr double ln2 = 0.69314718055994530942;
static constexpr arma::uword max_waterfill_iterations = 500;
static constexpr double objective_rel_tolerance = 1e-10;
static constexpr double kkt_tolerance = 1e-6;
static constexpr double active_power_floor = 1e-8;

// Objective log2 |I + H^H diag(p) H| evaluated on the K x K Gram form
// |I_K + P^(1/2) W P^(1/2)| with W = H H^H.
static double mac_objective(const arma::cx_mat& gram, const arma::vec& powers)
{
    arma::uword n = gram.n_rows;
    arma::vec amp = arma::sqrt(powers);
    arma::cx_mat s(n, n);
    for (arma::uword r = 0; r < n; ++r)
        for (arma::uword c = 0; c < n; ++c)
            s(r, c) = amp(r) * gram(r, c) * amp(c);
    s.diag() += 1.0;
    std::complex<double> logdet = arma::log_det(s);
    return std::max(0.0, logdet.real() / ln2);
}

// Marginal rates d/dp_i of the objective in bits: diag(H Z^-1 H^H) / ln 2
// with Z = I + H^H diag(p) H, computed in the K x K form
// W - W P^(1/2) (I + P^(1/2) W P^(1/2))^-1 P^(1/2) W.
static arma::vec mac_marginals(const arma::cx_mat& gram, const arma::vec& powers)
{
    arma::uword n = gram.n_rows;
    arma::vec amp = arma::sqrt(powers);
    arma::cx_mat s(n, n);
    for (arma::uword r = 0; r < n; ++r)
        for (arma::uword c = 0; c < n; ++c)
            s(r, c) = amp(r) * gram(r, c) * amp(c);
    s.diag() += 1.0;
    arma::cx_mat ws = gram * arma::diagmat(arma::conv_to<arma::cx_vec>::from(amp));
    arma::cx_mat m = gram - ws * arma::solve(s, ws.t(), arma::solve_opts::likely_sympd);
    arma::vec out(n);
    for (arma::uword i = 0; i < n; ++i)
        out(i) = std::max(0.0, m(i, i).real()) / ln2;
    return out;
}

// Water level mu such that sum_i max(0, mu - floor_i) == budget over the
// users with finite floors; closed form after sorting.
static arma::vec waterfill(const arma::vec& floors, double budget)
{
    arma::uvec order = arma::sort_index(floors);
    arma::uword usable = 0;
    for (; usable < floors.n_elem; ++usable)
        if (!std::isfinite(floors(order(usable))))
            break;
    arma::vec out(floors.n_elem, arma::fill::zeros);
    if (usable == 0 || budget <= 0.0)
        return out;

    double prefix = 0.0;
    double level = 0.0;
    arma::uword active = usable;
    for (arma::uword n = 0; n < usable; ++n)
    {
        prefix += floors(order(n));
        double mu = (budget + prefix) / double(n + 1);
        if (n + 1 == usable || mu <= floors(order(n + 1)))
        {
            level = mu;
            active = n + 1;
            break;
        }
    }
    for (arma::uword n = 0; n < active; ++n)
        out(order(n)) = std::max(0.0, level - floors(order(n)));
    return out;
}

capacity_result dpc_sum_capacity(const arma::cx_mat& H, double rho)
{
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw validation_error("dpc_sum_capacity: rho must be finite and nonnegative");
    if (!H.is_finite())
        throw validation_error("dpc_sum_capacity: channel has non-finite entries");

    arma::uword n_users = H.n_rows;
    capacity_result res;
    res.allocation.budget = rho;
    res.allocation.powers.zeros(n_users);
    if (rho == 0.0 || n_users == 0)
    {
        res.converged = true;
        return res;
    }

    const arma::cx_mat gram = H * H.t(); // K x K, (i,j) = h_i^T conj(h_j)

    arma::vec powers(n_users, arma::fill::zeros);
    double objective = 0.0;
    double rel_change = std::numeric_limits<double>::infinity();
    res.objective_trace.reserve(64);

    // Equal-marginal optimality residual in bits: spread across the active
    // users plus any excess of an inactive user's marginal over theirs.
    auto kkt_residual = [&](const arma::vec& marg_bits, const arma::vec& p)
    {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        bool any_active = false;
        for (arma::uword i = 0; i < n_users; ++i)
            if (p(i) > active_power_floor)
            {
                any_active = true;
                lo = std::min(lo, marg_bits(i));
                hi = std::max(hi, marg_bits(i));
            }
        if (!any_active)
            return 0.0;
        double residual = hi - lo;
        for (arma::uword i = 0; i < n_users; ++i)
            if (p(i) <= active_power_floor)
                residual = std::max(residual, marg_bits(i) - hi);
        return residual;
    };

    for (arma::uword it = 0; it < max_waterfill_iterations; ++it)
    {
        arma::vec marg_bits = mac_marginals(gram, powers);
        res.kkt_residual = kkt_residual(marg_bits, powers);
        if (it > 0 && rel_change <= objective_rel_tolerance &&
            res.kkt_residual <= kkt_tolerance)
        {
            res.converged = true;
            break;
        }

        // Effective gain of each user against the interference of the
        // others: g_i = m_i / (1 - p_i m_i) from the full-inverse marginals.
        arma::vec floors(n_users);
        for (arma::uword i = 0; i < n_users; ++i)
        {
            double m = marg_bits(i) * ln2; // natural scale
            double gain = m / std::max(1.0 - powers(i) * m, 1e-300);
            floors(i) = gain > 0.0 ? 1.0 / gain : std::numeric_limits<double>::infinity();
        }

        arma::vec target = waterfill(floors, rho);
        // Damped step toward the simultaneous waterfilling point; the 1/K
        // weight keeps the objective nondecreasing for any user count.
        arma::vec next = n_users == 1
                             ? target
                             : arma::vec((double(n_users - 1) * powers + target) /
                                         double(n_users));
        double next_objective = mac_objective(gram, next);
        powers = next;
        res.objective_trace.push_back(next_objective);
        res.iterations = it + 1;
        rel_change = std::abs(next_objective - objective) /
                     std::max(1.0, std::abs(next_objective));
        objective = next_objective;
    }

    res.value = objective;
    res.allocation.powers = powers;
    return res;
}

double average_sum_capacity(const channel_tensor& t, double rho, bool* all_converged,
                            int threads)
{
    t.validate();
    arma::uword n_sub = t.n_subcarriers();
    std::vector<double> values(n_sub);
    std::vector<char> flags(n_sub, 1);
    parallel_for(n_sub, threads,
                 [&](std::size_t l)
                 {
                     capacity_result r = dpc_sum_capacity(t.channel_matrix(l), rho);
                     values[l] = r.value;
                     flags[l] = r.converged ? 1 : 0;
                 });
    double sum = 0.0;
    bool ok = true;
    for (arma::uword l = 0; l < n_sub; ++l)
    {
        sum += values[l];
        ok = ok && flags[l];
    }
    if (all_converged)
        *all_converged = ok;
    return sum / double(n_sub);
}

beam_factorization factorize_beams(const arma::cx_mat& B)
{
    if (B.n_cols == 0)
    {
        // Legal empty selection: B = basis * tri holds vacuously and the
        // effective channel collapses to width zero (rate 0 downstream).
        beam_factorization f;
        f.basis.set_size(B.n_rows, 0);
        f.tri.set_size(0, 0);
        return f;
    }
    if (B.n_cols > B.n_rows)
        throw validation_error("factorize_beams: more beams than antennas");

    arma::vec sv = arma::svd(B);
    if (sv(sv.n_elem - 1) <= rank_tolerance * sv(0))
        throw numeric_error("factorize_beams: rank-deficient beam matrix "
                            "(singular value below relative tolerance 1e-10)");

    beam_factorization f;
    if (!arma::qr_econ(f.basis, f.tri, B))
        throw numeric_error("factorize_beams: QR factorization failed");

    // Rotate column phases so the triangular diagonal is real positive.
    for (arma::uword j = 0; j < f.tri.n_rows; ++j)
    {
        std::complex<double> d = f.tri(j, j);
        double mag = std::abs(d);
        std::complex<double> phase = mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
        f.basis.col(j) *= phase;
        f.tri.row(j) *= std::conj(phase);
    }
    return f;
}

std::pair<capacity_result, beam_factorization>
bc_capacity_with_beams(const arma::cx_mat& H, const arma::cx_mat& B, double rho)
{
    beam_factorization f = factorize_beams(B);
    capacity_result r = dpc_sum_capacity(H * f.basis, rho);
    return {std::move(r), std::move(f)};
}

covariance_set mac_to_bc(const arma::cx_mat& H_eff, const power_allocation& alloc,
                         const beam_factorization& fact)
{
    arma::uword n_users = H_eff.n_rows;
    arma::uword n_dims = H_eff.n_cols;
    if (alloc.powers.n_elem != n_users)
        throw validation_error("mac_to_bc: allocation size does not match user count");
    if (arma::accu(alloc.powers) > alloc.budget + 1e-9 || alloc.powers.min() < 0.0)
        throw validation_error("mac_to_bc: infeasible power allocation");
    if (fact.tri.n_rows != n_dims)
        throw validation_error("mac_to_bc: factorization does not match channel width");

    // Uplink channels of the dual MAC: column i receives user i.
    arma::cx_mat up(n_dims, n_users);
    for (arma::uword i = 0; i < n_users; ++i)
        up.col(i) = arma::conj(H_eff.row(i).st());

    // Effective uplink noise for user i collects the users decoded after
    // it (j > i); the downlink reverses that order.
    std::vector<arma::cx_vec> rx_dir(n_users);
    arma::vec mac_sinr(n_users, arma::fill::zeros);
    for (arma::uword i = 0; i < n_users; ++i)
    {
        arma::cx_mat noise(n_dims, n_dims, arma::fill::eye);
        for (arma::uword j = i + 1; j < n_users; ++j)
            noise += alloc.powers(j) * up.col(j) * up.col(j).t();

        double cond = arma::cond(noise);
        if (!std::isfinite(cond) || cond > 1e12)
            throw numeric_error("mac_to_bc: effective noise covariance condition number "
                                "exceeds 1e12");

        arma::cx_vec dir = arma::solve(noise, up.col(i), arma::solve_opts::likely_sympd);
        std::complex<double> quad = arma::cdot(up.col(i), dir); // c^H Z^-1 c
        mac_sinr(i) = alloc.powers(i) * std::max(0.0, quad.real());
        double norm = arma::norm(dir);
        rx_dir[i] = norm > 0.0 ? arma::cx_vec(dir / norm)
                               : arma::cx_vec(n_dims, arma::fill::zeros);
    }

    // Downlink powers matching the per-user SINRs; triangular because user i
    // is only interfered by users encoded before it.
    arma::vec dl_power(n_users, arma::fill::zeros);
    covariance_set covs(n_users);
    arma::cx_mat tri_inv =
        arma::solve(arma::trimatu(fact.tri), arma::cx_mat(n_dims, n_dims, arma::fill::eye));
    for (arma::uword i = 0; i < n_users; ++i)
    {
        if (mac_sinr(i) <= 0.0)
        {
            covs[i].zeros(n_dims, n_dims);
            continue;
        }
        double own = std::norm(arma::cdot(rx_dir[i], up.col(i)));
        double interference = 0.0;
        for (arma::uword j = 0; j < i; ++j)
            interference += dl_power(j) * std::norm(arma::cdot(rx_dir[j], up.col(i)));
        if (own <= 0.0)
            throw numeric_error("mac_to_bc: vanishing transmit direction for an active user");
        dl_power(i) = mac_sinr(i) * (1.0 + interference) / own;

        arma::cx_mat eff = dl_power(i) * rx_dir[i] * rx_dir[i].t();
        covs[i] = tri_inv * eff * tri_inv.t();
    }
    return covs;
}

double bc_rate_eval(const arma::cx_mat& H, const arma::cx_mat& B, const covariance_set& covs)
{
    arma::uword n_users = H.n_rows;
    if (covs.size() != n_users)
        throw validation_error("bc_rate_eval: covariance count does not match user count");

    arma::cx_mat accum(B.n_cols, B.n_cols, arma::fill::zeros);
    double rate = 0.0;
    for (arma::uword i = 0; i < n_users; ++i)
    {
        if (covs[i].n_rows != B.n_cols || covs[i].n_cols != B.n_cols)
            throw validation_error("bc_rate_eval: covariance dimension mismatch");
        arma::cx_rowvec through = H.row(i) * B; // h_i^T B
        double before =
            std::max(0.0, arma::as_scalar(through * accum * through.t()).real());
        accum += covs[i];
        double after =
            std::max(0.0, arma::as_scalar(through * accum * through.t()).real());
        rate += std::log2(1.0 + after) - std::log2(1.0 + before);
    }
    return rate;
}

double hsub_wideband_capacity(const channel_tensor& t, const arma::cx_mat& B, double rho,
                              bool* all_converged, int threads)
{
    t.validate();
    beam_factorization f = factorize_beams(B);
    arma::uword n_sub = t.n_subcarriers();
    std::vector<double> values(n_sub);
    std::vector<char> flags(n_sub, 1);
    parallel_for(n_sub, threads,
                 [&](std::size_t l)
                 {
                     capacity_result r =
                         dpc_sum_capacity(t.channel_matrix(l) * f.basis, rho);
                     values[l] = r.value;
                     flags[l] = r.converged ? 1 : 0;
                 });
    double sum = 0.0;
    bool ok = true;
    for (arma::uword l = 0; l < n_sub; ++l)
    {
        sum += values[l];
        ok = ok && flags[l];
    }
    if (all_converged)
        *all_converged = ok;
    return sum / double(n_sub);
}

} // namespace beamrate
