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

#include "schemes.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "beam_select.hpp"
#include "capacity.hpp"
#include "common.hpp"
#include "parallel.hpp"
#include "zf.hpp"

namespace beamrate
{

const char* scheme_name(scheme_kind kind)
{
    switch (kind)
    {
    case scheme_kind::tdd:
        return "TDD";
    case scheme_kind::d_gob:
        return "D-GOB";
    case scheme_kind::h_gob:
        return "H-GOB";
    case scheme_kind::d_sub:
        return "D-SUB";
    case scheme_kind::h_sub:
        return "H-SUB";
    case scheme_kind::a_gob:
        return "A-GOB";
    case scheme_kind::kxk_baseline:
        return "KxK-baseline";
    }
    return "?";
}

std::optional<scheme_kind> parse_scheme_name(const std::string& name)
{
    for (scheme_kind k : {scheme_kind::tdd, scheme_kind::d_gob, scheme_kind::h_gob,
                          scheme_kind::d_sub, scheme_kind::h_sub, scheme_kind::a_gob,
                          scheme_kind::kxk_baseline})
        if (name == scheme_name(k))
            return k;
    return std::nullopt;
}

bool scheme_uses_beams(scheme_kind kind)
{
    return kind != scheme_kind::tdd && kind != scheme_kind::kxk_baseline;
}

bool is_sub_scheme(scheme_kind kind)
{
    return kind == scheme_kind::d_sub || kind == scheme_kind::h_sub;
}

std::vector<arma::uword> aperture_subarray(arma::uword n_antennas, arma::uword m)
{
    if (m < 1 || m > n_antennas)
        throw validation_error("aperture_subarray: m must lie in 1..M");
    std::vector<arma::uword> idx(m);
    if (m == 1)
    {
        idx[0] = arma::uword(std::llround(double(n_antennas - 1) / 2.0));
        return idx;
    }
    double step = double(n_antennas - 1) / double(m - 1);
    for (arma::uword i = 0; i < m; ++i)
        idx[i] = arma::uword(std::llround(double(i) * step));
    return idx;
}

static arma::uword resolve_codebook_beams(const eval_options& opts, arma::uword n_antennas)
{
    return opts.codebook_beams > 0 ? opts.codebook_beams : 4 * n_antennas;
}

static void check_budget(const channel_tensor& t, const scheme& s, arma::uword n_codebook)
{
    arma::uword n = s.kind == scheme_kind::a_gob ? 1 : s.n_beams;
    arma::uword cap = std::min(t.n_antennas(), n_codebook);
    if (n < 1 || n > cap)
        throw validation_error(std::string(scheme_name(s.kind)) +
                               ": beam budget must lie in 1..min(M, M')");
    if (is_sub_scheme(s.kind) && n < t.n_users())
        throw validation_error(std::string(scheme_name(s.kind)) +
                               ": subspace schemes need at least K beams");
}

// Zero-forcing rate on one subcarrier once every user owns a beam set:
// reconstruct each user channel from its reported gains, then evaluate the
// true-channel SINRs against the quantized-channel precoder.
static double gob_subcarrier_rate(const channel_tensor& t, arma::uword l,
                                  const std::vector<beam_selection>& per_user, double rho)
{
    arma::uword n_users = t.n_users();
    arma::cx_mat h_hat(n_users, t.n_antennas());
    for (arma::uword k = 0; k < n_users; ++k)
        h_hat.row(k) = quantize_channel(t.user_channel(k, l), per_user[k].beams).st();
    return zf_sum_rate(t.channel_matrix(l), h_hat, rho).sum_rate;
}

static arma::cx_mat user_band(const channel_tensor& t, arma::uword k)
{
    arma::cx_mat h(t.n_antennas(), t.n_subcarriers());
    for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
        h.col(l) = t.user_channel(k, l);
    return h;
}

static std::vector<arma::cx_mat> all_matrices(const channel_tensor& t)
{
    std::vector<arma::cx_mat> out(t.n_subcarriers());
    for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
        out[l] = t.channel_matrix(l);
    return out;
}

static double mean_over_subcarriers(arma::uword n_sub, int threads,
                                    const std::function<double(arma::uword)>& fn)
{
    std::vector<double> values(n_sub);
    parallel_for(n_sub, threads, [&](std::size_t l) { values[l] = fn(arma::uword(l)); });
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / double(n_sub);
}

double scheme_sum_rate(const channel_tensor& t, const scheme& s, double rho,
                       const eval_options& opts)
{
    t.validate();
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw validation_error("scheme_sum_rate: rho must be finite and nonnegative");

    if (s.kind == scheme_kind::tdd)
        return average_sum_capacity(t, rho, nullptr, opts.threads);
    if (s.kind == scheme_kind::kxk_baseline)
    {
        channel_tensor sub = t.subarray(aperture_subarray(t.n_antennas(), t.n_users()));
        return average_sum_capacity(sub, rho, nullptr, opts.threads);
    }

    arma::uword n_codebook = resolve_codebook_beams(opts, t.n_antennas());
    check_budget(t, s, n_codebook);
    if (rho == 0.0)
        return 0.0;
    codebook cb = build_codebook(t.n_antennas(), n_codebook);
    arma::uword n_sub = t.n_subcarriers();
    arma::uword n_users = t.n_users();

    switch (s.kind)
    {
    case scheme_kind::d_gob:
        return mean_over_subcarriers(
            n_sub, opts.threads,
            [&](arma::uword l)
            {
                std::vector<beam_selection> per_user(n_users);
                for (arma::uword k = 0; k < n_users; ++k)
                    per_user[k] = greedy_ue(t.user_channel(k, l), cb, s.n_beams);
                return gob_subcarrier_rate(t, l, per_user, rho);
            });

    case scheme_kind::h_gob:
    {
        std::vector<beam_selection> per_user(n_users);
        for (arma::uword k = 0; k < n_users; ++k)
            per_user[k] = greedy_ue(user_band(t, k), cb, s.n_beams);
        return mean_over_subcarriers(
            n_sub, opts.threads,
            [&](arma::uword l) { return gob_subcarrier_rate(t, l, per_user, rho); });
    }

    case scheme_kind::a_gob:
    {
        // One whole-band beam per user; the analog network applies the
        // transmit weights that form that beam (the conjugate response, so
        // the downlink gain through it is the beam's reported gain), and no
        // baseband precoding follows.
        precoder p;
        p.columns.set_size(t.n_antennas(), n_users);
        p.active.assign(n_users, true);
        for (arma::uword k = 0; k < n_users; ++k)
        {
            beam_selection sel = greedy_ue(user_band(t, k), cb, 1);
            p.columns.col(k) = arma::conj(cb.beams.col(sel.indices[0]));
        }
        return mean_over_subcarriers(n_sub, opts.threads,
                                     [&](arma::uword l) {
                                         return sum_rate_with_precoder(t.channel_matrix(l),
                                                                       p, rho)
                                             .sum_rate;
                                     });
    }

    case scheme_kind::d_sub:
        return mean_over_subcarriers(
            n_sub, opts.threads,
            [&](arma::uword l)
            {
                arma::cx_mat H = t.channel_matrix(l);
                beam_selection sel = greedy_bs({H}, cb, s.n_beams, rho);
                return bc_capacity_with_beams(H, sel.beams, rho).first.value;
            });

    case scheme_kind::h_sub:
    {
        beam_selection sel = greedy_bs(all_matrices(t), cb, s.n_beams, rho);
        return hsub_wideband_capacity(t, sel.beams, rho, nullptr, opts.threads);
    }

    default:
        throw validation_error("scheme_sum_rate: unknown scheme");
    }
}

double required_snr(const channel_tensor& t, const scheme& s, double c_star,
                    const eval_options& opts)
{
    if (!(c_star > 0.0) || !std::isfinite(c_star))
        throw validation_error("required_snr: target rate must be positive");

    constexpr double rho_lo = 1e-6, rho_hi = 1e8, rate_tol = 1e-4;
    double hi_rate = scheme_sum_rate(t, s, rho_hi, opts);
    if (hi_rate < c_star)
        throw unreachable_rate_error(std::string(scheme_name(s.kind)) + ": target " +
                                     std::to_string(c_star) + " bits/s/Hz exceeds the " +
                                     "plateau rate " + std::to_string(hi_rate) +
                                     " at SNR 1e8");
    double lo_rate = scheme_sum_rate(t, s, rho_lo, opts);
    if (lo_rate >= c_star)
        return rho_lo; // target met everywhere in the bracket

    double lo = rho_lo, hi = rho_hi;
    for (int i = 0; i < 200; ++i)
    {
        double mid = std::sqrt(lo * hi);
        double rate = scheme_sum_rate(t, s, mid, opts);
        if (std::abs(rate - c_star) <= rate_tol)
            return mid;
        if (rate >= c_star)
            hi = mid;
        else
            lo = mid;
        if (hi / lo - 1.0 < 1e-14)
            break;
    }
    return hi; // first bracketing crossing from the feasible side
}

snr_loss_result snr_loss(const channel_tensor& t, const scheme& s, double c_star,
                         const eval_options& opts)
{
    double rho_ref = required_snr(t, scheme{scheme_kind::tdd, 0}, c_star, opts);
    double rho_scheme = required_snr(t, s, c_star, opts);
    snr_loss_result out;
    out.linear = rho_ref / rho_scheme;
    out.loss_db = -10.0 * std::log10(out.linear);
    return out;
}

std::vector<beams_for_loss_row> beams_for_loss_table(const std::vector<double>& delta_linear,
                                                     arma::uword n_min,
                                                     const std::vector<double>& allow_db)
{
    std::vector<beams_for_loss_row> rows;
    rows.reserve(allow_db.size());
    for (double beta_db : allow_db)
    {
        if (!(beta_db >= 0.0))
            throw validation_error("beams_for_loss: allowable losses must be nonnegative dB");
        double threshold = std::pow(10.0, -beta_db / 10.0);
        beams_for_loss_row row;
        row.allow_db = beta_db;
        for (arma::uword i = 0; i < delta_linear.size(); ++i)
        {
            double d = delta_linear[i];
            if (std::isfinite(d) && d >= threshold)
            {
                row.n_beams = n_min + i;
                row.reachable = true;
                break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<beams_for_loss_row> beams_for_loss(const channel_tensor& t, scheme_kind family,
                                               double c_star,
                                               const std::vector<double>& allow_db,
                                               const eval_options& opts)
{
    if (!scheme_uses_beams(family))
        throw validation_error("beams_for_loss: scheme has no beam budget");
    arma::uword n_codebook = resolve_codebook_beams(opts, t.n_antennas());
    arma::uword n_min = family == scheme_kind::a_gob ? 1
                        : is_sub_scheme(family)      ? t.n_users()
                                                     : 1;
    arma::uword n_max = family == scheme_kind::a_gob
                            ? 1
                            : std::min(t.n_antennas(), n_codebook);

    std::vector<double> deltas;
    deltas.reserve(n_max - n_min + 1);
    for (arma::uword n = n_min; n <= n_max; ++n)
    {
        try
        {
            deltas.push_back(snr_loss(t, scheme{family, n}, c_star, opts).linear);
        }
        catch (const unreachable_rate_error&)
        {
            deltas.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return beams_for_loss_table(deltas, n_min, allow_db);
}

tradeoff_pick tradeoff_reduce(const std::vector<tradeoff_cell>& cells, double beta_linear)
{
    tradeoff_pick pick;
    double prev = -1.0;
    for (const auto& cell : cells)
    {
        if (!cell.reachable)
            continue;
        if (cell.delta_linear < prev - 1e-12)
            pick.monotone = false;
        prev = cell.delta_linear;
        if (cell.delta_linear < beta_linear)
            continue;
        if (!pick.feasible || cell.delta_linear < pick.delta_linear)
        {
            pick.feasible = true;
            pick.n_beams = cell.n_beams;
            pick.delta_linear = cell.delta_linear;
        }
    }
    return pick;
}

std::vector<tradeoff_row> tradeoff_curve(const channel_tensor& t,
                                         const std::vector<double>& beta_db, double c_star,
                                         const std::vector<arma::uword>& m_grid,
                                         const std::vector<arma::uword>& n_grid,
                                         const eval_options& opts)
{
    t.validate();
    arma::uword n_antennas = t.n_antennas();
    arma::uword n_users = t.n_users();
    double oversampling =
        double(resolve_codebook_beams(opts, n_antennas)) / double(n_antennas);

    double rho_ref = required_snr(t, scheme{scheme_kind::tdd, 0}, c_star, opts);

    std::vector<tradeoff_row> rows;
    for (arma::uword m : m_grid)
    {
        if (m < n_users || m > n_antennas)
            throw validation_error("tradeoff_curve: m grid must lie in K..M");
        channel_tensor sub = t.subarray(aperture_subarray(n_antennas, m));
        eval_options sub_opts = opts;
        // Keep the oversampling factor of the full-array codebook.
        sub_opts.codebook_beams =
            std::max<arma::uword>(m, arma::uword(std::llround(oversampling * double(m))));

        std::vector<tradeoff_cell> cells;
        for (arma::uword n : n_grid)
        {
            if (n < n_users || n > m)
                continue;
            tradeoff_cell cell;
            cell.n_beams = n;
            try
            {
                double rho_scheme =
                    required_snr(sub, scheme{scheme_kind::h_sub, n}, c_star, sub_opts);
                cell.delta_linear = rho_ref / rho_scheme;
                cell.reachable = true;
            }
            catch (const unreachable_rate_error&)
            {
                cell.reachable = false;
            }
            cells.push_back(cell);
        }

        for (double beta : beta_db)
        {
            tradeoff_row row;
            row.beta_db = beta;
            row.m_antennas = m;
            row.pick = tradeoff_reduce(cells, std::pow(10.0, -beta / 10.0));
            rows.push_back(row);
        }
    }
    return rows;
}

double pilot_count(scheme_kind kind, arma::uword n_beams, arma::uword n_users)
{
    switch (kind)
    {
    case scheme_kind::d_gob:
    case scheme_kind::h_gob:
    case scheme_kind::a_gob:
        return double(n_users) * double(n_beams); // worst case: all beams distinct
    case scheme_kind::d_sub:
    case scheme_kind::h_sub:
        return double(n_beams);
    default:
        throw validation_error("pilot_count: scheme has no downlink training budget");
    }
}

training_result training_optimize(const channel_tensor& t, const scheme& s, double rho,
                                  double t_c, const eval_options& opts)
{
    if (!(t_c >= 1.0))
        throw validation_error("training_optimize: coherence interval must be >= 1");
    if (!scheme_uses_beams(s.kind))
        throw validation_error("training_optimize: scheme has no beam budget");

    arma::uword n_codebook = resolve_codebook_beams(opts, t.n_antennas());
    arma::uword n_min = s.kind == scheme_kind::a_gob ? 1
                        : is_sub_scheme(s.kind)      ? t.n_users()
                                                     : 1;
    arma::uword n_max =
        s.kind == scheme_kind::a_gob ? 1 : std::min(t.n_antennas(), n_codebook);

    training_result best;
    bool first = true;
    for (arma::uword n = n_min; n <= n_max; ++n)
    {
        double share = std::max(0.0, 1.0 - pilot_count(s.kind, n, t.n_users()) / t_c);
        double adjusted =
            share <= 0.0 ? 0.0
                         : share * scheme_sum_rate(t, scheme{s.kind, n}, rho, opts);
        if (first || adjusted > best.adjusted_rate)
        {
            best.n_star = n;
            best.adjusted_rate = adjusted;
            first = false;
        }
    }
    return best;
}

} // namespace beamrate
