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

#include <cstdio>
#include <fstream>

#include "channel.hpp"
#include "common.hpp"

using namespace beamrate;

namespace
{

scenario base_spec()
{
    scenario spec;
    spec.kind = scenario_kind::rician_los;
    spec.n_users = 2;
    spec.n_antennas = 4;
    spec.n_subcarriers = 3;
    spec.los_angles = {-0.5, 0.25};
    spec.num_taps = 4;
    spec.seed = 11;
    return spec;
}

std::string temp_path(const char* name)
{
    return std::string("beamrate_test_") + name + ".mmc1";
}

} // namespace

TEST_CASE("generate - infinite K-factor collapses to the array response")
{
    scenario spec = base_spec();
    spec.rician_k_factor_db = 300.0; // scattered term vanishes
    spec.los_angles = {0.0, 0.5};
    channel_tensor t = generate(spec);

    // At sine-angle 0 the response has identical phase on every antenna and
    // the channel repeats across subcarriers.
    arma::cx_vec expect = array_response(spec.n_antennas, 0.0);
    for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
        CHECK(arma::norm(t.user_channel(0, l) - expect) < 1e-12);

    // Collinearity with the response also for the second user.
    arma::cx_vec a1 = array_response(spec.n_antennas, 0.5);
    for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
    {
        arma::cx_vec h = t.user_channel(1, l);
        CHECK(std::abs(arma::cdot(a1, h)) == Catch::Approx(arma::norm(h)).margin(1e-9));
    }
}

TEST_CASE("generate - single tap is frequency flat")
{
    scenario spec = base_spec();
    spec.kind = scenario_kind::rayleigh_tdl;
    spec.num_taps = 1;
    channel_tensor t = generate(spec);
    for (arma::uword k = 0; k < spec.n_users; ++k)
        for (arma::uword m = 0; m < spec.n_antennas; ++m)
            for (arma::uword l = 1; l < spec.n_subcarriers; ++l)
                REQUIRE(std::abs(t.gains(m, k, l)) ==
                        Catch::Approx(std::abs(t.gains(m, k, 0))).margin(1e-14));
}

TEST_CASE("generate - deterministic in the seed")
{
    scenario spec = base_spec();
    spec.kind = scenario_kind::cluster;
    channel_tensor a = generate(spec);
    channel_tensor b = generate(spec);
    REQUIRE(a.gains.n_elem == b.gains.n_elem);
    for (arma::uword i = 0; i < a.gains.n_elem; ++i)
        REQUIRE(a.gains(i) == b.gains(i)); // bit-identical

    spec.seed += 1;
    channel_tensor c = generate(spec);
    CHECK(arma::norm(arma::abs(arma::vectorise(a.gains - c.gains))) > 1e-6);
}

TEST_CASE("generate - angle validation")
{
    scenario spec = base_spec();
    spec.los_angles = {-0.5, 1.0}; // 1.0 is outside [-1, 1)
    CHECK_THROWS_AS(generate(spec), validation_error);

    spec = base_spec();
    spec.kind = scenario_kind::file;
    spec.path = "definitely_missing_file.mmc1";
    CHECK_THROWS_AS(generate(spec), io_error);
}

TEST_CASE("normalize - unit average gain per user")
{
    scenario spec = base_spec();
    spec.kind = scenario_kind::rayleigh_tdl;
    channel_tensor t = generate(spec);
    t.gains *= 3.7; // arbitrary common scale
    channel_tensor n = normalize(t);

    double denom = double(spec.n_antennas * spec.n_subcarriers);
    for (arma::uword k = 0; k < spec.n_users; ++k)
    {
        double energy = 0.0;
        for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
            energy += arma::accu(arma::square(arma::abs(n.gains.slice(l).col(k))));
        REQUIRE(energy / denom == Catch::Approx(1.0).margin(1e-12));
    }

    // Idempotence.
    channel_tensor n2 = normalize(n);
    CHECK(arma::abs(arma::vectorise(n2.gains - n.gains)).max() < 1e-12);
}

TEST_CASE("normalize - constant modulus and per-user scaling")
{
    // |h| = 2 everywhere -> every entry halves.
    channel_tensor t;
    t.gains.set_size(2, 1, 2);
    t.gains.fill(std::complex<double>(0.0, 2.0));
    channel_tensor n = normalize(t);
    CHECK(arma::abs(arma::vectorise(n.gains)).max() == Catch::Approx(1.0).margin(1e-12));

    // Users with energies 4 and 1 scale by 1/2 and 1; within-user ratios
    // are untouched.
    channel_tensor u;
    u.gains.set_size(2, 2, 1);
    u.gains.slice(0).col(0) = arma::cx_vec{{2.0, 0.0}, {2.0, 0.0}};
    u.gains.slice(0).col(1) = arma::cx_vec{{1.0, 0.0}, {1.0, 0.0}};
    channel_tensor v = normalize(u);
    CHECK(std::abs(v.gains(0, 0, 0) - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(v.gains(0, 1, 0) - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(v.gains(0, 0, 0) / v.gains(1, 0, 0) -
                   u.gains(0, 0, 0) / u.gains(1, 0, 0)) < 1e-12);

    // All-zero user is degenerate.
    channel_tensor z;
    z.gains.set_size(2, 1, 1);
    z.gains.zeros();
    CHECK_THROWS_AS(normalize(z), validation_error);
}

TEST_CASE("channel file - smallest tensor is 32 bytes")
{
    channel_tensor t;
    t.gains.set_size(1, 1, 1);
    t.gains(0, 0, 0) = {1.0, 0.0};
    std::string path = temp_path("tiny");
    save_channel(t, path);

    std::ifstream is(path, std::ios::binary | std::ios::ate);
    REQUIRE(is.good());
    CHECK(is.tellg() == std::streampos(32)); // 4 magic + 12 dims + 16 sample
    is.seekg(0);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "MMC1");
    std::remove(path.c_str());
}

TEST_CASE("channel file - random roundtrip is bitwise")
{
    scenario spec = base_spec();
    spec.kind = scenario_kind::cluster;
    spec.n_antennas = 5;
    channel_tensor t = generate(spec);
    std::string path = temp_path("roundtrip");
    save_channel(t, path);
    channel_tensor u = load_channel(path);
    std::remove(path.c_str());

    REQUIRE(u.n_antennas() == t.n_antennas());
    REQUIRE(u.n_users() == t.n_users());
    REQUIRE(u.n_subcarriers() == t.n_subcarriers());
    for (arma::uword i = 0; i < t.gains.n_elem; ++i)
        REQUIRE(u.gains(i) == t.gains(i));
}

TEST_CASE("channel file - malformed inputs")
{
    std::string path = temp_path("bad");

    {
        std::ofstream os(path, std::ios::binary);
        os << "XXXXrest-of-file";
    }
    CHECK_THROWS_AS(load_channel(path), format_error);

    {
        std::ofstream os(path, std::ios::binary);
        os << "MMC1";
        os.put(2).put(0).put(0).put(0); // M=2
        os.put(1).put(0).put(0).put(0); // K=1
        os.put(1).put(0).put(0).put(0); // L=1
        os << "too short";
    }
    CHECK_THROWS_MATCHES(load_channel(path), format_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("truncated payload")));

    {
        std::ofstream os(path, std::ios::binary);
        os << "MMC1";
        os.put(1).put(0).put(0).put(0); // M=1
        os.put(2).put(0).put(0).put(0); // K=2 > M
        os.put(1).put(0).put(0).put(0);
    }
    CHECK_THROWS_MATCHES(
        load_channel(path), format_error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("field K")));

    std::remove(path.c_str());
}

TEST_CASE("subarray - keeps rows in index order")
{
    scenario spec = base_spec();
    channel_tensor t = generate(spec);
    channel_tensor s = t.subarray({0, 3});
    REQUIRE(s.n_antennas() == 2);
    CHECK(s.gains(0, 0, 0) == t.gains(0, 0, 0));
    CHECK(s.gains(1, 1, 2) == t.gains(3, 1, 2));
    CHECK_THROWS_AS(t.subarray({9}), validation_error);
}
