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

#include "channel.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "common.hpp"
#include "prng.hpp"

namespace beamrate
{

static constexpr double pi = 3.14159265358979323846;

// Substream ids: top byte selects the draw category so that adding a new
// category never shifts existing fixtures.
enum : std::uint64_t
{
    stream_tap_fading = 1,      // (user, tap): M antenna gains per draw
    stream_cluster_fading = 2,  // (user, cluster): per-cluster taps
    stream_cluster_geometry = 3 // (user, cluster): offset angle, specular phase/delay
};

static std::uint64_t substream_id(std::uint64_t category, arma::uword a, arma::uword b)
{
    return (category << 56) | (std::uint64_t(a) << 28) | std::uint64_t(b);
}

channel_tensor channel_tensor::subarray(const std::vector<arma::uword>& antenna_idx) const
{
    if (antenna_idx.empty())
        throw validation_error("subarray: empty antenna index list");
    channel_tensor out;
    out.gains.set_size(antenna_idx.size(), n_users(), n_subcarriers());
    for (arma::uword i = 0; i < antenna_idx.size(); ++i)
    {
        if (antenna_idx[i] >= n_antennas())
            throw validation_error("subarray: antenna index out of range");
        out.gains.row(i) = gains.row(antenna_idx[i]);
    }
    return out;
}

void channel_tensor::validate() const
{
    if (n_users() < 1 || n_subcarriers() < 1)
        throw validation_error("channel_tensor: K and L must be at least 1");
    if (n_antennas() < n_users())
        throw validation_error("channel_tensor: requires M >= K");
    if (!gains.is_finite())
        throw validation_error("channel_tensor: non-finite entries");
}

arma::cx_vec array_response(arma::uword n_antennas, double theta)
{
    arma::cx_vec a(n_antennas);
    double scale = 1.0 / std::sqrt(double(n_antennas));
    for (arma::uword m = 0; m < n_antennas; ++m)
        a(m) = std::polar(scale, pi * theta * double(m));
    return a;
}

static std::vector<double> resolve_tap_powers(const scenario& spec)
{
    if (spec.num_taps < 1)
        throw validation_error("scenario: num_taps must be at least 1");
    std::vector<double> p = spec.tap_powers;
    if (p.empty())
    {
        // Exponential profile, tap_decay_db per tap.
        p.resize(spec.num_taps);
        for (arma::uword t = 0; t < spec.num_taps; ++t)
            p[t] = std::pow(10.0, -spec.tap_decay_db * double(t) / 10.0);
    }
    if (p.size() != spec.num_taps)
        throw validation_error("scenario: tap_powers length must equal num_taps");
    double total = 0.0;
    for (double v : p)
    {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw validation_error("scenario: tap powers must be finite and nonnegative");
        total += v;
    }
    if (total <= 0.0)
        throw validation_error("scenario: tap powers sum to zero");
    for (double& v : p)
        v /= total;
    return p;
}

static void check_angles(const scenario& spec)
{
    if (spec.los_angles.size() != spec.n_users)
        throw validation_error("scenario: los_angles must list one sine-angle per user");
    for (double a : spec.los_angles)
        if (!(a >= -1.0 && a < 1.0))
            throw validation_error("scenario: sine-angles must lie in [-1, 1)");
}

// Tapped-delay-line frequency response for one (user, substream) over all
// subcarriers and antennas: taps are i.i.d. CN(0,1) scaled by the tap power,
// evaluated at subcarrier l through exp(-j 2 pi t l / L).
static arma::cx_mat tdl_response(std::uint64_t seed, std::uint64_t stream,
                                 const std::vector<double>& tap_powers, arma::uword category,
                                 arma::uword user, arma::uword n_antennas,
                                 arma::uword n_subcarriers)
{
    arma::cx_mat w(n_antennas, n_subcarriers, arma::fill::zeros);
    for (arma::uword t = 0; t < tap_powers.size(); ++t)
    {
        substream rng(seed, substream_id(category, user, (stream << 16) | t));
        arma::cx_vec g(n_antennas);
        for (arma::uword m = 0; m < n_antennas; ++m)
            g(m) = rng.gaussian();
        double amp = std::sqrt(tap_powers[t]);
        for (arma::uword l = 0; l < n_subcarriers; ++l)
        {
            std::complex<double> rot =
                std::polar(amp, -2.0 * pi * double(t) * double(l) / double(n_subcarriers));
            w.col(l) += rot * g;
        }
    }
    return w;
}

static channel_tensor generate_rician_los(const scenario& spec, bool include_los)
{
    if (include_los)
        check_angles(spec);
    auto tap_powers = resolve_tap_powers(spec);

    double kappa = include_los ? std::pow(10.0, spec.rician_k_factor_db / 10.0) : 0.0;
    double los_amp = include_los ? std::sqrt(kappa / (kappa + 1.0)) : 0.0;
    double scatter_amp = include_los ? std::sqrt(1.0 / (kappa + 1.0)) : 1.0;

    channel_tensor out;
    out.gains.set_size(spec.n_antennas, spec.n_users, spec.n_subcarriers);
    for (arma::uword k = 0; k < spec.n_users; ++k)
    {
        arma::cx_mat w = tdl_response(spec.seed, 0, tap_powers, stream_tap_fading, k,
                                      spec.n_antennas, spec.n_subcarriers);
        arma::cx_vec los = include_los
                               ? arma::cx_vec(los_amp * array_response(spec.n_antennas,
                                                                       spec.los_angles[k]))
                               : arma::cx_vec(spec.n_antennas, arma::fill::zeros);
        for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
            out.gains.slice(l).col(k) = los + scatter_amp * w.col(l);
    }
    return out;
}

// Cluster proxy: per user, the scattered part is a sum of cluster_count
// contributions, each confined to a direction drawn around the user's
// nominal angle and itself Rician (one specular ray at a cluster-specific
// delay plus tapped-delay-line diffuse fading).
static channel_tensor generate_cluster(const scenario& spec)
{
    check_angles(spec);
    if (spec.cluster_count < 1)
        throw validation_error("scenario: cluster_count must be at least 1");
    auto tap_powers = resolve_tap_powers(spec);

    double kappa = std::pow(10.0, spec.rician_k_factor_db / 10.0);
    double los_amp = std::sqrt(kappa / (kappa + 1.0));
    double scatter_amp = std::sqrt(1.0 / (kappa + 1.0));
    double kappa_c = std::pow(10.0, spec.cluster_k_factor_db / 10.0);
    double spec_amp = std::sqrt(kappa_c / (kappa_c + 1.0));
    double diff_amp = std::sqrt(1.0 / (kappa_c + 1.0));
    double per_cluster = 1.0 / std::sqrt(double(spec.cluster_count));
    double ant_scale = std::sqrt(double(spec.n_antennas)); // per-antenna unit magnitude

    channel_tensor out;
    out.gains.set_size(spec.n_antennas, spec.n_users, spec.n_subcarriers);
    out.gains.zeros();

    for (arma::uword k = 0; k < spec.n_users; ++k)
    {
        arma::cx_vec los = los_amp * array_response(spec.n_antennas, spec.los_angles[k]);
        for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
            out.gains.slice(l).col(k) = los;

        for (arma::uword c = 0; c < spec.cluster_count; ++c)
        {
            substream geo(spec.seed, substream_id(stream_cluster_geometry, k, c));
            double offset = spec.cluster_angular_spread * (2.0 * geo.uniform() - 1.0);
            double angle = spec.los_angles[k] + offset;
            angle = angle - 2.0 * std::floor((angle + 1.0) / 2.0); // wrap to [-1, 1)
            double phase = 2.0 * pi * geo.uniform();
            arma::uword delay = arma::uword(geo.uniform() * double(spec.num_taps));

            arma::cx_vec steer = ant_scale * array_response(spec.n_antennas, angle);
            arma::cx_mat diffuse = tdl_response(spec.seed, c + 1, tap_powers,
                                                stream_cluster_fading, k, 1,
                                                spec.n_subcarriers);
            for (arma::uword l = 0; l < spec.n_subcarriers; ++l)
            {
                std::complex<double> ray = std::polar(
                    spec_amp, phase - 2.0 * pi * double(delay) * double(l) /
                                          double(spec.n_subcarriers));
                std::complex<double> gain = ray + diff_amp * diffuse(0, l);
                out.gains.slice(l).col(k) += scatter_amp * per_cluster * gain * steer;
            }
        }
    }
    return out;
}

channel_tensor generate(const scenario& spec)
{
    if (spec.n_users < 1 || spec.n_subcarriers < 1)
        throw validation_error("scenario: K and L must be at least 1");
    if (spec.n_antennas < spec.n_users)
        throw validation_error("scenario: requires M >= K");

    channel_tensor out;
    switch (spec.kind)
    {
    case scenario_kind::rician_los:
        out = generate_rician_los(spec, true);
        break;
    case scenario_kind::rayleigh_tdl:
        out = generate_rician_los(spec, false);
        break;
    case scenario_kind::cluster:
        out = generate_cluster(spec);
        break;
    case scenario_kind::file:
        out = load_channel(spec.path);
        break;
    }
    out.validate();
    return out;
}

channel_tensor normalize(const channel_tensor& t)
{
    t.validate();
    channel_tensor out = t;
    double denom = double(t.n_antennas()) * double(t.n_subcarriers());
    for (arma::uword k = 0; k < t.n_users(); ++k)
    {
        double energy = 0.0;
        for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
            energy += arma::accu(arma::square(arma::abs(t.gains.slice(l).col(k))));
        double avg = energy / denom;
        if (avg <= 0.0)
            throw validation_error("normalize: user channel is identically zero");
        double scale = 1.0 / std::sqrt(avg);
        for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
            out.gains.slice(l).col(k) *= scale;
    }
    return out;
}

// ---- channel file ---------------------------------------------------------

static const unsigned char mmc1_magic[4] = {0x4D, 0x4D, 0x43, 0x31};

static void put_u32(std::string& buf, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        buf.push_back(char((v >> (8 * i)) & 0xFF));
}

static void put_f64(std::string& buf, double v)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        buf.push_back(char((bits >> (8 * i)) & 0xFF));
}

static std::uint32_t get_u32(const unsigned char* p)
{
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

static double get_f64(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= std::uint64_t(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

void save_channel(const channel_tensor& t, const std::string& path)
{
    t.validate();
    std::string buf;
    buf.reserve(16 + 16 * t.gains.n_elem);
    buf.append(reinterpret_cast<const char*>(mmc1_magic), 4);
    put_u32(buf, std::uint32_t(t.n_antennas()));
    put_u32(buf, std::uint32_t(t.n_users()));
    put_u32(buf, std::uint32_t(t.n_subcarriers()));
    for (arma::uword l = 0; l < t.n_subcarriers(); ++l)
        for (arma::uword k = 0; k < t.n_users(); ++k)
            for (arma::uword m = 0; m < t.n_antennas(); ++m)
            {
                put_f64(buf, t.gains(m, k, l).real());
                put_f64(buf, t.gains(m, k, l).imag());
            }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw io_error("cannot open for writing: " + path);
    os.write(buf.data(), std::streamsize(buf.size()));
    if (!os)
        throw io_error("write failed: " + path);
}

channel_tensor load_channel(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("cannot open for reading: " + path);
    std::string raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());

    if (raw.size() < 4 || std::memcmp(p, mmc1_magic, 4) != 0)
        throw format_error("channel file: bad magic (expected MMC1)");
    if (raw.size() < 16)
        throw format_error("channel file: truncated header (field M/K/L)");

    std::uint64_t n_ant = get_u32(p + 4);
    std::uint64_t n_usr = get_u32(p + 8);
    std::uint64_t n_sub = get_u32(p + 12);
    if (n_ant == 0)
        throw format_error("channel file: field M must be positive");
    if (n_usr == 0)
        throw format_error("channel file: field K must be positive");
    if (n_sub == 0)
        throw format_error("channel file: field L must be positive");
    if (n_ant < n_usr)
        throw format_error("channel file: field K exceeds M");

    // Sample count computed with overflow guards against u64 wraparound.
    constexpr std::uint64_t cap = std::uint64_t(1) << 40; // 16 TiB of payload
    if (n_ant * n_usr / n_ant != n_usr || (n_ant * n_usr) * n_sub / (n_ant * n_usr) != n_sub ||
        n_ant * n_usr * n_sub > cap)
        throw format_error("channel file: dimension overflow in M*K*L");
    std::uint64_t count = n_ant * n_usr * n_sub;
    if (raw.size() != 16 + 16 * count)
        throw format_error("channel file: truncated payload (expected " +
                           std::to_string(16 + 16 * count) + " bytes, got " +
                           std::to_string(raw.size()) + ")");

    channel_tensor t;
    t.gains.set_size(n_ant, n_usr, n_sub);
    const unsigned char* q = p + 16;
    for (arma::uword l = 0; l < n_sub; ++l)
        for (arma::uword k = 0; k < n_usr; ++k)
            for (arma::uword m = 0; m < n_ant; ++m)
            {
                t.gains(m, k, l) = {get_f64(q), get_f64(q + 8)};
                q += 16;
            }
    if (!t.gains.is_finite())
        throw format_error("channel file: non-finite sample in payload");
    return t;
}

} // namespace beamrate
