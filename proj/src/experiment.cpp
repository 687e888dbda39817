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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "common.hpp"

namespace beamrate
{

using nlohmann::json;

// ---- configuration parsing -------------------------------------------------

static void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw validation_error("config: unknown key '" + it.key() + "' in " + where);
}

static double require_number(const json& obj, const std::string& key)
{
    if (!obj.contains(key) || !obj[key].is_number())
        throw validation_error("config: missing or non-numeric '" + key + "'");
    return obj[key].get<double>();
}

static arma::uword require_count(const json& obj, const std::string& key)
{
    double v = require_number(obj, key);
    if (v < 1 || v != std::floor(v))
        throw validation_error("config: '" + key + "' must be a positive integer");
    return arma::uword(v);
}

static scenario parse_scenario(const json& obj)
{
    if (!obj.is_object())
        throw validation_error("config: 'scenario' must be an object");
    reject_unknown_keys(obj,
                        {"kind", "users", "antennas", "subcarriers", "rician_k_factor_db",
                         "los_angles", "num_taps", "tap_powers", "tap_decay_db", "clusters",
                         "seed", "path"},
                        "scenario");

    scenario spec;
    std::string kind = obj.value("kind", std::string("rician-los"));
    if (kind == "rician-los")
        spec.kind = scenario_kind::rician_los;
    else if (kind == "rayleigh-tdl")
        spec.kind = scenario_kind::rayleigh_tdl;
    else if (kind == "cluster")
        spec.kind = scenario_kind::cluster;
    else if (kind == "file")
        spec.kind = scenario_kind::file;
    else
        throw validation_error("config: unknown scenario kind '" + kind + "'");

    if (spec.kind == scenario_kind::file)
    {
        if (!obj.contains("path") || !obj["path"].is_string())
            throw validation_error("config: scenario kind 'file' needs a 'path'");
        spec.path = obj["path"].get<std::string>();
        return spec;
    }

    spec.n_users = require_count(obj, "users");
    spec.n_antennas = require_count(obj, "antennas");
    spec.n_subcarriers = require_count(obj, "subcarriers");
    if (obj.contains("rician_k_factor_db"))
        spec.rician_k_factor_db = require_number(obj, "rician_k_factor_db");
    if (obj.contains("num_taps"))
        spec.num_taps = require_count(obj, "num_taps");
    if (obj.contains("tap_decay_db"))
        spec.tap_decay_db = require_number(obj, "tap_decay_db");
    if (obj.contains("seed"))
        spec.seed = obj["seed"].get<std::uint64_t>();

    if (obj.contains("los_angles"))
    {
        if (!obj["los_angles"].is_array())
            throw validation_error("config: 'los_angles' must be an array");
        for (const auto& v : obj["los_angles"])
            spec.los_angles.push_back(v.get<double>());
    }
    if (obj.contains("tap_powers"))
    {
        if (!obj["tap_powers"].is_array())
            throw validation_error("config: 'tap_powers' must be an array");
        for (const auto& v : obj["tap_powers"])
            spec.tap_powers.push_back(v.get<double>());
    }
    if (obj.contains("clusters"))
    {
        const json& cl = obj["clusters"];
        reject_unknown_keys(cl, {"count", "angular_spread", "k_factor_db"}, "clusters");
        if (cl.contains("count"))
            spec.cluster_count = require_count(cl, "count");
        if (cl.contains("angular_spread"))
            spec.cluster_angular_spread = require_number(cl, "angular_spread");
        if (cl.contains("k_factor_db"))
            spec.cluster_k_factor_db = require_number(cl, "k_factor_db");
    }
    return spec;
}

static std::vector<double> parse_number_list(const json& obj, const std::string& key)
{
    std::vector<double> out;
    if (!obj.contains(key))
        return out;
    if (!obj[key].is_array())
        throw validation_error("config: '" + key + "' must be an array");
    for (const auto& v : obj[key])
    {
        if (!v.is_number())
            throw validation_error("config: '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

static std::vector<arma::uword> parse_count_list(const json& obj, const std::string& key)
{
    std::vector<arma::uword> out;
    for (double v : parse_number_list(obj, key))
    {
        if (v < 1 || v != std::floor(v))
            throw validation_error("config: '" + key + "' must hold positive integers");
        out.push_back(arma::uword(v));
    }
    return out;
}

static json parse_json_text(const std::string& text)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw validation_error(std::string("config: JSON parse failure: ") + e.what());
    }
}

experiment_config parse_config(const std::string& json_text)
{
    json root = parse_json_text(json_text);
    if (!root.is_object())
        throw validation_error("config: top level must be an object");
    reject_unknown_keys(root,
                        {"experiment", "seed", "scenario", "codebook", "schemes", "rho_db",
                         "n_beams", "c_star", "t_c", "beta_db", "m_grid", "normalize",
                         "output"},
                        "the top level");

    experiment_config cfg;
    std::string exp = root.value("experiment", std::string("capacity"));
    if (exp == "capacity")
        cfg.experiment = experiment_kind::capacity;
    else if (exp == "sweep-n")
        cfg.experiment = experiment_kind::sweep_n;
    else if (exp == "snr-loss")
        cfg.experiment = experiment_kind::snr_loss;
    else if (exp == "tradeoff")
        cfg.experiment = experiment_kind::tradeoff;
    else if (exp == "training")
        cfg.experiment = experiment_kind::training;
    else
        throw validation_error("config: unknown experiment '" + exp + "'");

    if (!root.contains("scenario"))
        throw validation_error("config: missing 'scenario'");
    cfg.channel_spec = parse_scenario(root["scenario"]);
    if (root.contains("seed") && !root["scenario"].contains("seed"))
        cfg.channel_spec.seed = root["seed"].get<std::uint64_t>();
    cfg.normalize_channel = root.value("normalize", true);

    if (root.contains("codebook"))
    {
        const json& cb = root["codebook"];
        reject_unknown_keys(cb, {"beams"}, "codebook");
        if (cb.contains("beams"))
            cfg.codebook_beams = require_count(cb, "beams");
    }

    if (!root.contains("schemes") || !root["schemes"].is_array() || root["schemes"].empty())
        throw validation_error("config: 'schemes' must be a nonempty array");
    for (const auto& v : root["schemes"])
    {
        if (!v.is_string())
            throw validation_error("config: scheme names must be strings");
        auto kind = parse_scheme_name(v.get<std::string>());
        if (!kind)
            throw validation_error("config: unknown scheme '" + v.get<std::string>() + "'");
        cfg.schemes.push_back(*kind);
    }

    cfg.rho_db = parse_number_list(root, "rho_db");
    for (double db : cfg.rho_db)
        cfg.rho_linear.push_back(std::pow(10.0, db / 10.0)); // dB -> linear, once
    cfg.n_beams = parse_count_list(root, "n_beams");
    cfg.t_c = parse_number_list(root, "t_c");
    cfg.beta_db = parse_number_list(root, "beta_db");
    cfg.m_grid = parse_count_list(root, "m_grid");
    if (root.contains("c_star"))
        cfg.c_star = require_number(root, "c_star");

    if (root.contains("output"))
    {
        const json& out = root["output"];
        reject_unknown_keys(out, {"path", "format"}, "output");
        if (out.contains("path"))
            cfg.output_path = out["path"].get<std::string>();
        if (out.contains("format"))
            cfg.output_format = out["format"].get<std::string>();
        if (cfg.output_format != "csv" && cfg.output_format != "json")
            throw validation_error("config: output format must be 'csv' or 'json'");
    }

    // Per-experiment list requirements, so a bad run fails at parse time.
    bool needs_rho = cfg.experiment == experiment_kind::capacity ||
                     cfg.experiment == experiment_kind::sweep_n ||
                     cfg.experiment == experiment_kind::training;
    if (needs_rho && cfg.rho_db.empty())
        throw validation_error("config: experiment '" + exp + "' needs a nonempty 'rho_db'");
    bool needs_n = cfg.experiment == experiment_kind::sweep_n ||
                   cfg.experiment == experiment_kind::snr_loss ||
                   cfg.experiment == experiment_kind::tradeoff;
    if (needs_n && cfg.n_beams.empty())
        throw validation_error("config: experiment '" + exp + "' needs a nonempty 'n_beams'");
    bool needs_target = cfg.experiment == experiment_kind::snr_loss ||
                        cfg.experiment == experiment_kind::tradeoff;
    if (needs_target && !(cfg.c_star > 0.0))
        throw validation_error("config: experiment '" + exp + "' needs a positive 'c_star'");
    if (cfg.experiment == experiment_kind::training && cfg.t_c.empty())
        throw validation_error("config: experiment 'training' needs a nonempty 't_c'");
    if (cfg.experiment == experiment_kind::tradeoff &&
        (cfg.beta_db.empty() || cfg.m_grid.empty()))
        throw validation_error("config: experiment 'tradeoff' needs 'beta_db' and 'm_grid'");
    if (cfg.experiment == experiment_kind::capacity)
        for (scheme_kind k : cfg.schemes)
            if (scheme_uses_beams(k))
                throw validation_error("config: experiment 'capacity' only takes TDD and "
                                       "KxK-baseline schemes (use 'sweep-n' for beam "
                                       "schemes)");
    return cfg;
}

static std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("cannot open for reading: " + path);
    return std::string((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
}

experiment_config load_config(const std::string& path)
{
    return parse_config(read_file(path));
}

scenario parse_scenario_config(const std::string& json_text)
{
    json root = parse_json_text(json_text);
    if (root.is_object() && root.contains("scenario"))
    {
        scenario spec = parse_scenario(root["scenario"]);
        if (root.contains("seed") && !root["scenario"].contains("seed"))
            spec.seed = root["seed"].get<std::uint64_t>();
        return spec;
    }
    return parse_scenario(root);
}

scenario load_scenario_config(const std::string& path)
{
    return parse_scenario_config(read_file(path));
}

// ---- experiment execution --------------------------------------------------

static std::string cell_name(const std::string& scheme, arma::uword n, double rho_db)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s, N=%llu, rho=%.6g dB", scheme.c_str(),
                  (unsigned long long)(n), rho_db);
    return buf;
}

// All numeric/runtime failures surface with the failing cell named.
template <typename Fn> static auto guarded(const std::string& cell, Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const validation_error&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw numeric_error("cell [" + cell + "]: " + e.what());
    }
}

static void sort_rows(sweep_result& result)
{
    std::sort(result.rows.begin(), result.rows.end(),
              [](const sweep_row& a, const sweep_row& b)
              {
                  if (a.scheme != b.scheme)
                      return a.scheme < b.scheme;
                  if (a.n_beams != b.n_beams)
                      return a.n_beams < b.n_beams;
                  if (a.rho_db != b.rho_db)
                      return a.rho_db < b.rho_db;
                  return a.flag < b.flag;
              });
}

sweep_result run_experiment(const experiment_config& cfg, int threads)
{
    channel_tensor t = generate(cfg.channel_spec);
    if (cfg.normalize_channel)
        t = normalize(t);

    eval_options opts;
    opts.codebook_beams = cfg.codebook_beams;
    opts.threads = threads;

    sweep_result result;
    auto add_row = [&](const std::string& name, arma::uword n, double rho_db, double rate,
                       double relative, const std::string& flag)
    {
        sweep_row row;
        row.scheme = name;
        row.n_beams = n;
        row.rho_db = rho_db;
        row.sum_rate = rate;
        row.relative_rate = relative;
        row.flag = flag;
        result.rows.push_back(std::move(row));
    };

    switch (cfg.experiment)
    {
    case experiment_kind::capacity:
    case experiment_kind::sweep_n:
    {
        for (std::size_t ri = 0; ri < cfg.rho_db.size(); ++ri)
        {
            double rho = cfg.rho_linear[ri];
            double rho_db = cfg.rho_db[ri];
            double reference = guarded(cell_name("TDD", 0, rho_db),
                                       [&] {
                                           return scheme_sum_rate(
                                               t, scheme{scheme_kind::tdd, 0}, rho, opts);
                                       });
            add_row("TDD", 0, rho_db, reference, 1.0, "ok");

            for (scheme_kind kind : cfg.schemes)
            {
                if (kind == scheme_kind::tdd)
                    continue; // reference row already emitted
                if (!scheme_uses_beams(kind))
                {
                    double rate = guarded(cell_name(scheme_name(kind), 0, rho_db),
                                          [&] {
                                              return scheme_sum_rate(t, scheme{kind, 0},
                                                                     rho, opts);
                                          });
                    add_row(scheme_name(kind), 0, rho_db, rate,
                            reference > 0.0 ? rate / reference : 0.0, "ok");
                    continue;
                }
                std::set<arma::uword> budgets;
                for (arma::uword n : cfg.n_beams)
                    budgets.insert(kind == scheme_kind::a_gob ? 1 : n);
                for (arma::uword n : budgets)
                {
                    if (is_sub_scheme(kind) && n < t.n_users())
                        continue; // subspace schemes start at N = K
                    double rate =
                        guarded(cell_name(scheme_name(kind), n, rho_db),
                                [&]
                                { return scheme_sum_rate(t, scheme{kind, n}, rho, opts); });
                    add_row(scheme_name(kind), n, rho_db, rate,
                            reference > 0.0 ? rate / reference : 0.0, "ok");
                }
            }
        }
        break;
    }

    case experiment_kind::snr_loss:
    {
        double rho_ref = guarded("TDD required SNR",
                                 [&] {
                                     return required_snr(t, scheme{scheme_kind::tdd, 0},
                                                         cfg.c_star, opts);
                                 });
        add_row("TDD", 0, 10.0 * std::log10(rho_ref), cfg.c_star, 1.0, "ok");

        for (scheme_kind kind : cfg.schemes)
        {
            if (kind == scheme_kind::tdd)
                continue;
            std::vector<arma::uword> budgets;
            if (!scheme_uses_beams(kind))
                budgets.push_back(0);
            else if (kind == scheme_kind::a_gob)
                budgets.push_back(1);
            else
                budgets.assign(cfg.n_beams.begin(), cfg.n_beams.end());

            for (arma::uword n : budgets)
            {
                if (is_sub_scheme(kind) && n < t.n_users())
                    continue;
                std::string cell = cell_name(scheme_name(kind), n, 0.0);
                try
                {
                    double rho_scheme = required_snr(t, scheme{kind, n}, cfg.c_star, opts);
                    add_row(scheme_name(kind), n, 10.0 * std::log10(rho_scheme), cfg.c_star,
                            rho_ref / rho_scheme, "ok");
                }
                catch (const unreachable_rate_error&)
                {
                    // The target sits above this scheme's plateau: a value,
                    // not a failure.
                    add_row(scheme_name(kind), n, 0.0, 0.0, 0.0, "unreachable");
                }
                catch (const validation_error&)
                {
                    throw;
                }
                catch (const std::exception& e)
                {
                    throw numeric_error("cell [" + cell + "]: " + e.what());
                }
            }
        }
        break;
    }

    case experiment_kind::tradeoff:
    {
        double rho_ref = guarded("TDD required SNR",
                                 [&] {
                                     return required_snr(t, scheme{scheme_kind::tdd, 0},
                                                         cfg.c_star, opts);
                                 });
        add_row("TDD", 0, 10.0 * std::log10(rho_ref), cfg.c_star, 1.0, "ok");

        auto rows = guarded("tradeoff level curves",
                            [&] {
                                return tradeoff_curve(t, cfg.beta_db, cfg.c_star,
                                                      cfg.m_grid, cfg.n_beams, opts);
                            });
        for (const auto& row : rows)
        {
            char tag[64];
            std::snprintf(tag, sizeof(tag), "m=%llu;beta_db=%.6g",
                          (unsigned long long)(row.m_antennas), row.beta_db);
            std::string flag = tag;
            if (!row.pick.feasible)
                add_row("H-SUB", 0, 0.0, cfg.c_star, 0.0, flag + ";infeasible");
            else
            {
                if (!row.pick.monotone)
                    flag += ";nonmonotone";
                double rho_scheme = rho_ref / row.pick.delta_linear;
                add_row("H-SUB", row.pick.n_beams, 10.0 * std::log10(rho_scheme),
                        cfg.c_star, row.pick.delta_linear, flag);
            }
        }
        break;
    }

    case experiment_kind::training:
    {
        for (std::size_t ri = 0; ri < cfg.rho_db.size(); ++ri)
        {
            double rho = cfg.rho_linear[ri];
            double rho_db = cfg.rho_db[ri];
            double reference = guarded(cell_name("TDD", 0, rho_db),
                                       [&] {
                                           return scheme_sum_rate(
                                               t, scheme{scheme_kind::tdd, 0}, rho, opts);
                                       });
            add_row("TDD", 0, rho_db, reference, 1.0, "ok");

            for (scheme_kind kind : cfg.schemes)
            {
                if (!scheme_uses_beams(kind))
                    continue;
                for (double tc : cfg.t_c)
                {
                    std::string cell = cell_name(scheme_name(kind), 0, rho_db);
                    training_result r =
                        guarded(cell,
                                [&] {
                                    return training_optimize(t, scheme{kind, 0}, rho, tc,
                                                             opts);
                                });
                    char tag[48];
                    std::snprintf(tag, sizeof(tag), "Tc=%.6g", tc);
                    add_row(scheme_name(kind), r.n_star, rho_db, r.adjusted_rate,
                            reference > 0.0 ? r.adjusted_rate / reference : 0.0, tag);
                }
            }
        }
        break;
    }
    }

    sort_rows(result);
    return result;
}

// ---- emission ---------------------------------------------------------------

static std::string digits9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string format_csv(const sweep_result& result)
{
    std::string out = "scheme,N,rho_db,sum_rate_bps_hz,relative_rate,flag\n";
    for (const auto& row : result.rows)
    {
        out += row.scheme;
        out += ',';
        out += std::to_string(row.n_beams);
        out += ',';
        out += digits9(row.rho_db);
        out += ',';
        out += digits9(row.sum_rate);
        out += ',';
        out += digits9(row.relative_rate);
        out += ',';
        out += row.flag;
        out += '\n';
    }
    return out;
}

std::string format_json(const sweep_result& result)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i)
    {
        const auto& row = result.rows[i];
        out += "  {\"scheme\":\"" + row.scheme + "\",\"N\":" + std::to_string(row.n_beams) +
               ",\"rho_db\":" + digits9(row.rho_db) +
               ",\"sum_rate_bps_hz\":" + digits9(row.sum_rate) +
               ",\"relative_rate\":" + digits9(row.relative_rate) + ",\"flag\":\"" +
               row.flag + "\"}";
        if (i + 1 < result.rows.size())
            out += ',';
        out += '\n';
    }
    out += "]\n";
    return out;
}

void write_result(const sweep_result& result, const std::string& path,
                  const std::string& format)
{
    std::string text;
    if (format == "csv")
        text = format_csv(result);
    else if (format == "json")
        text = format_json(result);
    else
        throw validation_error("write_result: format must be 'csv' or 'json'");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw io_error("cannot open for writing: " + path);
    os.write(text.data(), std::streamsize(text.size()));
    if (!os)
        throw io_error("write failed: " + path);
}

} // namespace beamrate
