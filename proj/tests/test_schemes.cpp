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

#include <catch2/catch_amalgamated.hpp>

#include "beam_select.hpp"
#include "capacity.hpp"
#include "common.hpp"
#include "prng.hpp"
#include "schemes.hpp"
#include "zf.hpp"

using namespace beamrate;

namespace
{

channel_tensor flat_unit_channel(arma::uword subcarriers)
{
    channel_tensor t;
    t.gains.set_size(1, 1, subcarriers);
    t.gains.fill(std::complex<double>(1.0, 0.0));
    return t;
}

channel_tensor random_tensor(arma::uword antennas, arma::uword users,
                             arma::uword subcarriers, std::uint64_t seed)
{
    channel_tensor t;
    t.gains.set_size(antennas, users, subcarriers);
    substream rng(seed, 0);
    for (arma::uword l = 0; l < subcarriers; ++l)
        for (arma::uword k = 0; k < users; ++k)
            for (arma::uword m = 0; m < antennas; ++m)
                t.gains(m, k, l) = rng.gaussian();
    return t;
}

} // namespace

TEST_CASE("aperture_subarray - endpoint and center placement")
{
    CHECK(aperture_subarray(8, 8) ==
          std::vector<arma::uword>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(aperture_subarray(8, 2) == std::vector<arma::uword>{0, 7});
    CHECK(aperture_subarray(9, 3) == std::vector<arma::uword>{0, 4, 8});
    CHECK(aperture_subarray(8, 1) == std::vector<arma::uword>{4});
    CHECK_THROWS_AS(aperture_subarray(4, 5), validation_error);
}

TEST_CASE("scheme_sum_rate - trivial reference values")
{
    channel_tensor t = flat_unit_channel(2);
    eval_options opts;
    CHECK(scheme_sum_rate(t, {scheme_kind::tdd, 0}, 1.0, opts) ==
          Catch::Approx(1.0).margin(1e-9));
    CHECK(scheme_sum_rate(t, {scheme_kind::kxk_baseline, 0}, 1.0, opts) ==
          Catch::Approx(1.0).margin(1e-9));
    CHECK(scheme_sum_rate(t, {scheme_kind::d_sub, 1}, 0.0, opts) == 0.0);
}

TEST_CASE("scheme_sum_rate - budget validation")
{
    channel_tensor t = random_tensor(4, 2, 2, 500);
    eval_options opts;
    opts.codebook_beams = 8;
    CHECK_THROWS_AS(scheme_sum_rate(t, {scheme_kind::d_sub, 1}, 1.0, opts),
                    validation_error); // below K
    CHECK_THROWS_AS(scheme_sum_rate(t, {scheme_kind::d_gob, 5}, 1.0, opts),
                    validation_error); // above M
    CHECK_THROWS_AS(scheme_sum_rate(t, {scheme_kind::h_gob, 0}, 1.0, opts),
                    validation_error);
}

TEST_CASE("scheme_sum_rate - subspace schemes reach the capacity at full budget")
{
    // Square (orthonormal) codebook with all beams selected spans everything,
    // so the subspace rate equals the reference capacity.
    channel_tensor t = normalize(random_tensor(4, 2, 3, 501));
    eval_options opts;
    opts.codebook_beams = 4;
    double reference = scheme_sum_rate(t, {scheme_kind::tdd, 0}, 1.0, opts);
    double d_sub = scheme_sum_rate(t, {scheme_kind::d_sub, 4}, 1.0, opts);
    double h_sub = scheme_sum_rate(t, {scheme_kind::h_sub, 4}, 1.0, opts);
    CHECK(d_sub == Catch::Approx(reference).epsilon(1e-6));
    CHECK(h_sub == Catch::Approx(reference).epsilon(1e-6));
}

TEST_CASE("scheme_sum_rate - grid-of-beams reaches perfect-CSI zero forcing")
{
    channel_tensor t = normalize(random_tensor(4, 2, 3, 502));
    eval_options opts;
    opts.codebook_beams = 4;
    double rho = 1.0;
    double d_gob = scheme_sum_rate(t, {scheme_kind::d_gob, 4}, rho, opts);

    double zf_perfect = 0.0;
    for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
    {
        arma::cx_mat H = t.channel_matrix(l);
        zf_perfect += zf_sum_rate(H, H, rho).sum_rate;
    }
    zf_perfect /= double(t.n_subcarriers());
    CHECK(d_gob == Catch::Approx(zf_perfect).epsilon(1e-6));
}

TEST_CASE("scheme_sum_rate - no scheme beats the reference capacity")
{
    channel_tensor t = normalize(random_tensor(6, 2, 2, 503));
    eval_options opts;
    opts.codebook_beams = 12;
    double rho = 1.5;
    double reference = scheme_sum_rate(t, {scheme_kind::tdd, 0}, rho, opts);
    for (scheme_kind kind : {scheme_kind::d_gob, scheme_kind::h_gob, scheme_kind::d_sub,
                             scheme_kind::h_sub, scheme_kind::a_gob,
                             scheme_kind::kxk_baseline})
    {
        scheme s{kind, arma::uword(kind == scheme_kind::d_sub || kind == scheme_kind::h_sub
                                       ? 3
                                       : 2)};
        INFO(scheme_name(kind));
        REQUIRE(scheme_sum_rate(t, s, rho, opts) <= reference + 1e-6);
    }
}

TEST_CASE("scheme_sum_rate - analog-only equals single-beam hybrid for one user")
{
    channel_tensor t = normalize(random_tensor(5, 1, 4, 504));
    eval_options opts;
    opts.codebook_beams = 20;
    double rho = 2.0;
    double analog = scheme_sum_rate(t, {scheme_kind::a_gob, 1}, rho, opts);
    double hybrid = scheme_sum_rate(t, {scheme_kind::h_gob, 1}, rho, opts);
    CHECK(analog == Catch::Approx(hybrid).margin(1e-9));
}

TEST_CASE("scheme_sum_rate - per-subcarrier subspace choice beats a common one")
{
    // With exhaustive selection on a small instance, optimizing each
    // subcarrier separately dominates one whole-band choice.
    channel_tensor t = normalize(random_tensor(4, 2, 2, 505));
    codebook cb = build_codebook(4, 6);
    double rho = 1.0;
    arma::uword n = 2;

    std::vector<arma::cx_mat> per_l;
    for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
        per_l.push_back(t.channel_matrix(l));

    double digital = 0.0;
    for (const auto& H : per_l)
    {
        beam_selection sel = exhaustive_bs({H}, cb, n, rho);
        digital += bc_capacity_with_beams(H, sel.beams, rho).first.value;
    }
    digital /= double(per_l.size());

    beam_selection common = exhaustive_bs(per_l, cb, n, rho);
    double hybrid = hsub_wideband_capacity(t, common.beams, rho);
    CHECK(hybrid <= digital + 1e-9);
}

TEST_CASE("required_snr - closed forms and consistency")
{
    eval_options opts;
    channel_tensor t = flat_unit_channel(1);

    // log2(1 + rho) = 2 at rho = 3.
    double rho = required_snr(t, {scheme_kind::tdd, 0}, 2.0, opts);
    CHECK(rho == Catch::Approx(3.0).margin(1e-3));

    // Single user, one whole-band beam: rate log2(1 + rho g) inverts to
    // (2^C - 1)/g with g the squared projection on the chosen beam.
    channel_tensor u = normalize(random_tensor(4, 1, 1, 506));
    eval_options opts4;
    opts4.codebook_beams = 16;
    codebook cb = build_codebook(4, 16);
    beam_selection sel = greedy_ue(u.user_channel(0, 0), cb, 1);
    double g = std::norm(arma::cdot(cb.beams.col(sel.indices[0]), u.user_channel(0, 0)));
    double c_star = 2.5;
    double rho_scheme = required_snr(u, {scheme_kind::h_gob, 1}, c_star, opts4);
    CHECK(rho_scheme ==
          Catch::Approx((std::pow(2.0, c_star) - 1.0) / g).epsilon(2e-3));

    // Round trip: evaluating at the required SNR recovers the target rate.
    channel_tensor v = normalize(random_tensor(4, 2, 2, 507));
    eval_options opts8;
    opts8.codebook_beams = 8;
    double target = 3.0;
    double rho_sub = required_snr(v, {scheme_kind::d_sub, 2}, target, opts8);
    CHECK(scheme_sum_rate(v, {scheme_kind::d_sub, 2}, rho_sub, opts8) ==
          Catch::Approx(target).margin(2e-4));
}

TEST_CASE("required_snr - interference-limited plateau is unreachable")
{
    // Two nearly identical users reporting one beam each: the zero-forcing
    // cross terms do not vanish, so the rate saturates.
    channel_tensor t = random_tensor(4, 2, 1, 508);
    t.gains.slice(0).col(1) = t.gains.slice(0).col(0) +
                              0.05 * random_tensor(4, 1, 1, 509).gains.slice(0).col(0);
    t = normalize(t);
    eval_options opts;
    opts.codebook_beams = 8;
    CHECK_THROWS_AS(required_snr(t, {scheme_kind::d_gob, 1}, 25.0, opts),
                    unreachable_rate_error);
}

TEST_CASE("snr_loss - reference against itself and capacity-achieving schemes")
{
    channel_tensor t = normalize(random_tensor(4, 2, 2, 510));
    eval_options opts;
    opts.codebook_beams = 4;

    snr_loss_result self = snr_loss(t, {scheme_kind::tdd, 0}, 2.0, opts);
    CHECK(self.linear == 1.0); // bit-exact: both bisections follow one path
    CHECK(self.loss_db == 0.0);

    // Full-budget subspace beamforming achieves the capacity, so its loss
    // stays within the bisection tolerance of 0 dB.
    snr_loss_result sub = snr_loss(t, {scheme_kind::d_sub, 4}, 2.0, opts);
    CHECK(std::abs(sub.loss_db) < 0.01);
}

TEST_CASE("snr_loss - single-beam loss equals the beam gain")
{
    channel_tensor t = normalize(random_tensor(4, 1, 1, 511));
    eval_options opts;
    opts.codebook_beams = 16;
    codebook cb = build_codebook(4, 16);
    beam_selection sel = greedy_ue(t.user_channel(0, 0), cb, 1);
    double g = std::norm(arma::cdot(cb.beams.col(sel.indices[0]), t.user_channel(0, 0)));

    // TDD needs rho* = (2^C - 1)/|h|^2 and the single-beam scheme
    // (2^C - 1)/g; with a unit-norm... the normalized channel has
    // |h|^2 = M here, so compare against the ratio directly.
    double h2 = std::pow(arma::norm(t.user_channel(0, 0)), 2);
    snr_loss_result loss = snr_loss(t, {scheme_kind::h_gob, 1}, 2.0, opts);
    CHECK(loss.linear == Catch::Approx(g / h2).epsilon(5e-3));
}

TEST_CASE("beams_for_loss_table - dyadic gain family inverts in closed form")
{
    // delta(N) = 1 - 2^-N for N = 1..10; the smallest admissible budget at
    // allowable loss beta (linear) is ceil(-log2(1 - beta)).
    std::vector<double> delta;
    for (int n = 1; n <= 10; ++n)
        delta.push_back(1.0 - std::pow(2.0, -n));

    std::vector<double> beta_lin = {0.3, 0.6, 0.9, 0.99};
    std::vector<double> allow_db;
    for (double b : beta_lin)
        allow_db.push_back(-10.0 * std::log10(b));

    auto rows = beams_for_loss_table(delta, 1, allow_db);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].n_beams == 1); // ceil(-log2(0.7))  = 1
    CHECK(rows[1].n_beams == 2); // ceil(-log2(0.4))  = 2
    CHECK(rows[2].n_beams == 4); // ceil(-log2(0.1))  = 4
    CHECK(rows[3].n_beams == 7); // ceil(-log2(0.01)) = 7
    for (const auto& row : rows)
        CHECK(row.reachable);

    // A loss nobody meets is reported unreachable, not an error.
    auto none = beams_for_loss_table(delta, 1, {0.0});
    CHECK_FALSE(none[0].reachable);
}

TEST_CASE("beams_for_loss - required budget shrinks as the allowance grows")
{
    channel_tensor t = normalize(random_tensor(4, 2, 2, 512));
    eval_options opts;
    opts.codebook_beams = 8;
    auto rows = beams_for_loss(t, scheme_kind::d_sub, 2.0, {0.25, 1.0, 3.0, 6.0}, opts);
    REQUIRE(rows.size() == 4);
    arma::uword prev = rows[0].reachable ? rows[0].n_beams : 999;
    for (const auto& row : rows)
    {
        if (!row.reachable)
            continue;
        REQUIRE(row.n_beams <= prev);
        prev = row.n_beams;
    }
}

TEST_CASE("tradeoff_reduce - hand-computed table")
{
    std::vector<tradeoff_cell> cells = {{2, 0.3, true}, {3, 0.55, true}, {4, 0.8, true}};

    tradeoff_pick all = tradeoff_reduce(cells, 0.25);
    CHECK(all.feasible);
    CHECK(all.n_beams == 2); // every cell feasible; smallest loss wins
    CHECK(all.monotone);

    tradeoff_pick mid = tradeoff_reduce(cells, 0.5);
    CHECK(mid.n_beams == 3); // first cell falls below the threshold

    tradeoff_pick none = tradeoff_reduce(cells, 0.9);
    CHECK_FALSE(none.feasible);

    // A dip in the middle makes the picked argmin non-monotone.
    std::vector<tradeoff_cell> dip = {{2, 0.5, true}, {3, 0.4, true}, {4, 0.7, true}};
    tradeoff_pick picked = tradeoff_reduce(dip, 0.35);
    CHECK(picked.n_beams == 3);
    CHECK_FALSE(picked.monotone);

    // Unreachable cells are excluded from the argmin.
    std::vector<tradeoff_cell> holes = {{2, 0.0, false}, {3, 0.6, true}};
    tradeoff_pick skip = tradeoff_reduce(holes, 0.5);
    CHECK(skip.n_beams == 3);
}

TEST_CASE("tradeoff_curve - full arrays meet a zero-loss requirement")
{
    channel_tensor t = normalize(random_tensor(4, 2, 2, 513));
    eval_options opts;
    opts.codebook_beams = 4;
    auto rows = tradeoff_curve(t, {0.0, 3.0}, 1.5, {4}, {2, 3, 4}, opts);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows)
    {
        REQUIRE(row.pick.feasible);
        CHECK(row.m_antennas == 4);
        // At m = M with the orthonormal codebook the full budget achieves
        // delta = 1 (0 dB loss), so even beta = 0 dB is satisfiable.
        CHECK(row.pick.delta_linear >= std::pow(10.0, -row.beta_db / 10.0) - 1e-9);
    }
}

TEST_CASE("pilot_count and adjusted rate arithmetic")
{
    CHECK(pilot_count(scheme_kind::d_gob, 10, 4) == 40.0);
    CHECK(pilot_count(scheme_kind::h_gob, 10, 4) == 40.0);
    CHECK(pilot_count(scheme_kind::d_sub, 10, 4) == 10.0);
    CHECK(pilot_count(scheme_kind::h_sub, 10, 4) == 10.0);
    CHECK_THROWS_AS(pilot_count(scheme_kind::tdd, 1, 4), validation_error);

    // (1 - 40/200) * 20 = 16.
    CHECK((1.0 - pilot_count(scheme_kind::d_gob, 10, 4) / 200.0) * 20.0 ==
          Catch::Approx(16.0).margin(0.0));
}

TEST_CASE("training_optimize - flat rate prefers the smallest budget")
{
    // Single user exactly on a codebook beam: the subspace rate does not
    // grow with extra beams, so overhead picks N = 1.
    codebook cb = build_codebook(4, 4);
    channel_tensor t;
    t.gains.set_size(4, 1, 2);
    for (arma::uword l = 0; l < 2; ++l)
        t.gains.slice(l).col(0) = cb.beams.col(2);
    eval_options opts;
    opts.codebook_beams = 4;
    training_result r = training_optimize(t, {scheme_kind::d_sub, 0}, 1.0, 50.0, opts);
    CHECK(r.n_star == 1);

    CHECK_THROWS_AS(training_optimize(t, {scheme_kind::tdd, 0}, 1.0, 50.0, opts),
                    validation_error);
}

TEST_CASE("training_optimize - matches an independent scan")
{
    channel_tensor t = normalize(random_tensor(4, 2, 2, 514));
    eval_options opts;
    opts.codebook_beams = 8;
    double rho = 1.0;

    for (scheme_kind kind : {scheme_kind::d_gob, scheme_kind::h_sub})
    {
        for (double tc : {6.0, 30.0, 200.0})
        {
            training_result r = training_optimize(t, {kind, 0}, rho, tc, opts);

            // Re-derive the scan: admissible budgets, share-clamped
            // adjusted rates, lowest budget on ties.
            arma::uword lo = is_sub_scheme(kind) ? t.n_users() : 1;
            arma::uword best_n = lo;
            double best = -1.0;
            for (arma::uword n = lo; n <= t.n_antennas(); ++n)
            {
                double pilots = is_sub_scheme(kind) ? double(n) : 2.0 * double(n);
                double share = std::max(0.0, 1.0 - pilots / tc);
                double rate =
                    share <= 0.0
                        ? 0.0
                        : share * scheme_sum_rate(t, scheme{kind, n}, rho, opts);
                if (rate > best)
                {
                    best = rate;
                    best_n = n;
                }
            }
            INFO(scheme_name(kind) << " Tc=" << tc);
            REQUIRE(r.n_star == best_n);
            REQUIRE(r.adjusted_rate == Catch::Approx(best).margin(1e-12));
        }
    }
}
