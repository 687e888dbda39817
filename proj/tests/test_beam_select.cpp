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

#include <algorithm>
#include <set>

#include "beam_select.hpp"
#include "capacity.hpp"
#include "common.hpp"
#include "prng.hpp"
#include "zf.hpp"

using namespace beamrate;

namespace
{

arma::cx_mat random_matrix(arma::uword rows, arma::uword cols, std::uint64_t seed)
{
    substream rng(seed, 0);
    arma::cx_mat m(rows, cols);
    for (arma::uword c = 0; c < cols; ++c)
        for (arma::uword r = 0; r < rows; ++r)
            m(r, c) = rng.gaussian();
    return m;
}

arma::cx_vec real_vector(arma::uword n, std::uint64_t seed)
{
    substream rng(seed, 1);
    arma::cx_vec v(n);
    for (arma::uword i = 0; i < n; ++i)
        v(i) = std::complex<double>(2.0 * rng.uniform() - 1.0, 0.0);
    return v;
}

// Reconstruction error of a beam subset, the quantity the UE-side search
// minimizes (gain-interpolating by default, orthogonal with hermitian).
double distortion(const arma::cx_mat& channels, const beam_selection& sel,
                  bool hermitian = false)
{
    double err = 0.0;
    for (arma::uword c = 0; c < channels.n_cols; ++c)
    {
        arma::cx_vec h = channels.col(c);
        err += std::pow(arma::norm(h - quantize_channel(h, sel.beams, hermitian)), 2);
    }
    return err;
}

} // namespace

TEST_CASE("greedy_ue - strongest entry on an identity codebook")
{
    // Hand-built orthonormal codebook with columns e1, e2.
    codebook cb;
    cb.beams.eye(2, 2);
    cb.angles = {0.0, 0.0};
    arma::cx_vec h = {std::complex<double>(0.6, 0.0), std::complex<double>(0.8, 0.0)};
    beam_selection sel = greedy_ue(h, cb, 1);
    REQUIRE(sel.indices.size() == 1);
    CHECK(sel.indices[0] == 1); // |0.8| beats |0.6|
}

TEST_CASE("greedy_ue - full budget exhausts the codebook")
{
    codebook cb = build_codebook(4, 8); // oversampled: span fills after 4 picks
    arma::cx_vec h = random_matrix(4, 1, 401).col(0);
    beam_selection sel = greedy_ue(h, cb, 8);
    std::set<arma::uword> got(sel.indices.begin(), sel.indices.end());
    REQUIRE(got.size() == 8);
    CHECK(*got.begin() == 0);
    CHECK(*got.rbegin() == 7);
}

TEST_CASE("greedy_ue - bracketed by exhaustive search")
{
    arma::cx_mat h = random_matrix(6, 1, 402);
    codebook cb = build_codebook(6, 8);

    beam_selection greedy = greedy_ue(h, cb, 2);

    // In the gain-interpolating metric the exhaustive minimum dominates any
    // candidate set, the greedy one included.
    beam_selection best = exhaustive_ue(h, cb, 2);
    CHECK(distortion(h, best) <= distortion(h, greedy) + 1e-12);

    // In the projection metric the greedy actually optimizes, it is
    // bracketed between an arbitrary subset and the exhaustive optimum.
    beam_selection best_h = exhaustive_ue(h, cb, 2, 1000000, true);
    double err_greedy = distortion(h, greedy, true);
    CHECK(distortion(h, best_h, true) <= err_greedy + 1e-12);
    CHECK(err_greedy <= distortion(h, extract_beams(cb, {0, 4}), true) + 1e-12);
}

TEST_CASE("greedy_ue - selection order is nested and deterministic")
{
    arma::cx_mat h = random_matrix(5, 3, 403); // wideband, three subcarriers
    codebook cb = build_codebook(5, 12);
    beam_selection wide = greedy_ue(h, cb, 4);
    for (arma::uword n = 1; n < 4; ++n)
    {
        beam_selection prefix = greedy_ue(h, cb, n);
        REQUIRE(prefix.indices ==
                std::vector<arma::uword>(wide.indices.begin(), wide.indices.begin() + n));
    }

    beam_selection again = greedy_ue(h, cb, 4);
    CHECK(again.indices == wide.indices);
}

TEST_CASE("greedy_ue - incremental projections match a fresh orthonormal basis")
{
    arma::cx_mat h = random_matrix(16, 1, 404);
    codebook cb = build_codebook(16, 32);
    beam_selection sel = greedy_ue(h, cb, 16);

    // From scratch: orthonormalize the selected beams in selection order and
    // compare the captured projection energy.
    arma::cx_mat q, r;
    arma::qr_econ(q, r, sel.beams);
    double fresh = std::pow(arma::norm(q.t() * h.col(0)), 2);
    arma::cx_vec h_hat = quantize_channel(h.col(0), sel.beams, true);
    double incremental = std::pow(arma::norm(h_hat), 2);
    CHECK(incremental == Catch::Approx(fresh).margin(1e-8));
}

TEST_CASE("greedy_ue - budget validation")
{
    codebook cb = build_codebook(4, 6);
    arma::cx_vec h = random_matrix(4, 1, 405).col(0);
    CHECK_THROWS_AS(greedy_ue(h, cb, 7), validation_error);
}

TEST_CASE("greedy_bs - single real user reduces to the UE rule")
{
    codebook cb = build_codebook(4, 4);
    arma::cx_vec h = real_vector(4, 406);
    beam_selection ue = greedy_ue(h, cb, 1);
    beam_selection bs = greedy_bs({arma::cx_mat(h.st())}, cb, 1, 1.0);
    REQUIRE(bs.indices.size() == 1);
    CHECK(bs.indices[0] == ue.indices[0]);
}

TEST_CASE("greedy_bs - full budget spans the codebook")
{
    arma::cx_mat H = random_matrix(2, 4, 407);
    codebook cb = build_codebook(4, 4);
    beam_selection sel = greedy_bs({H}, cb, 4, 1.5);
    double with_selection = bc_capacity_with_beams(H, sel.beams, 1.5).first.value;
    double with_full = bc_capacity_with_beams(H, cb.beams, 1.5).first.value;
    CHECK(with_selection == Catch::Approx(with_full).margin(1e-9));
}

TEST_CASE("greedy_bs - dominated by the exhaustive optimum")
{
    arma::cx_mat H = random_matrix(2, 5, 408);
    codebook cb = build_codebook(5, 6);
    double rho = 1.0;

    beam_selection greedy = greedy_bs({H}, cb, 2, rho);
    beam_selection best = exhaustive_bs({H}, cb, 2, rho);
    double cap_greedy = bc_capacity_with_beams(H, greedy.beams, rho).first.value;
    double cap_best = bc_capacity_with_beams(H, best.beams, rho).first.value;
    CHECK(cap_greedy <= cap_best + 1e-9);
}

TEST_CASE("greedy_bs - nested budgets give nondecreasing capacity")
{
    arma::cx_mat H = random_matrix(3, 6, 409);
    codebook cb = build_codebook(6, 10);
    double rho = 2.0;
    beam_selection full = greedy_bs({H}, cb, 6, rho);
    double prev = 0.0;
    for (arma::uword n = 1; n <= full.indices.size(); ++n)
    {
        std::vector<arma::uword> prefix(full.indices.begin(), full.indices.begin() + n);
        double cap = bc_capacity_with_beams(H, extract_beams(cb, prefix).beams, rho)
                         .first.value;
        REQUIRE(cap >= prev - 1e-9);
        prev = cap;
    }
}

TEST_CASE("greedy_bs - wideband objective uses every subcarrier")
{
    codebook cb = build_codebook(4, 8);
    // Subcarrier 1 strongly prefers a beam that subcarrier 0 ignores; the
    // wideband pick must not equal the per-subcarrier pick of slice 0 alone.
    arma::cx_mat h0 = arma::cx_mat(cb.beams.col(1) * 1.0).st();  // 1 x 4
    arma::cx_mat h1 = arma::cx_mat(cb.beams.col(6) * 10.0).st();
    beam_selection only0 = greedy_bs({arma::conj(h0)}, cb, 1, 1.0);
    beam_selection wideband = greedy_bs({arma::conj(h0), arma::conj(h1)}, cb, 1, 1.0);
    CHECK(only0.indices[0] == 1);
    CHECK(wideband.indices[0] == 6);
}

TEST_CASE("exhaustive_ue - full set and strongest entries")
{
    codebook cb = build_codebook(4, 4);

    // Full budget returns everything.
    arma::cx_mat h = random_matrix(4, 1, 410);
    beam_selection all = exhaustive_ue(h, cb, 4);
    std::set<arma::uword> got(all.indices.begin(), all.indices.end());
    CHECK(got == std::set<arma::uword>{0, 1, 2, 3});

    // Real channel, even budget: the minimizer is the set of the N largest
    // reported gains |c_i^T h| (for a real channel those pair up with the
    // orthogonal projections).
    arma::cx_vec hr = real_vector(4, 411);
    beam_selection sel = exhaustive_ue(arma::cx_mat(hr), cb, 2);

    arma::vec gains(4);
    for (arma::uword i = 0; i < 4; ++i)
        gains(i) = std::abs(arma::as_scalar(cb.beams.col(i).st() * hr));
    arma::uvec order = arma::sort_index(gains, "descend");
    std::set<arma::uword> strongest{order(0), order(1)};
    std::set<arma::uword> chosen(sel.indices.begin(), sel.indices.end());
    CHECK(chosen == strongest);
}

TEST_CASE("exhaustive - budget cap names the subset count")
{
    codebook cb = build_codebook(8, 24);
    arma::cx_mat h = random_matrix(8, 1, 412);
    CHECK_THROWS_MATCHES(exhaustive_ue(h, cb, 4, 100), budget_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("10626")));
    CHECK(subset_count(24, 4) == 10626);
}

TEST_CASE("exhaustive_bs - golden fixture on seed 42")
{
    // K=2, M=5 instance drawn from the project generator at seed 42; the
    // exhaustive optimum over C(6,2)=15 subsets is the frozen reference for
    // regressions (this search is itself the oracle).
    arma::cx_mat H = random_matrix(2, 5, 42);
    codebook cb = build_codebook(5, 6);
    beam_selection sel = exhaustive_bs({H}, cb, 2, 1.0);
    std::vector<arma::uword> frozen = {3, 4};
    CHECK(sel.indices == frozen);
    CHECK(bc_capacity_with_beams(H, sel.beams, 1.0).first.value ==
          Catch::Approx(1.759362752).margin(1e-8));
}

TEST_CASE("exhaustive_bs - optimum is nondecreasing in the budget")
{
    arma::cx_mat H = random_matrix(2, 4, 413);
    codebook cb = build_codebook(4, 6);
    double prev = 0.0;
    for (arma::uword n = 1; n <= 4; ++n)
    {
        beam_selection sel = exhaustive_bs({H}, cb, n, 1.0);
        double cap = bc_capacity_with_beams(H, sel.beams, 1.0).first.value;
        REQUIRE(cap >= prev - 1e-9);
        prev = cap;
    }
}

TEST_CASE("exhaustive - lexicographic tie-breaking")
{
    // All-zero channel ties every subset; the first combination wins.
    codebook cb = build_codebook(3, 4);
    arma::cx_mat h(3, 1, arma::fill::zeros);
    beam_selection sel = exhaustive_ue(h, cb, 2);
    CHECK(sel.indices == std::vector<arma::uword>{0, 1});
}
