// SPDX-License-Identifier: Apache-2.0
//
// beamalign: iterative beam alignment for reciprocal TDD MIMO links
// Copyright (C) 2026 The beamalign authors
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


#ifndef BEAMALIGN_CLI_HPP
#define BEAMALIGN_CLI_HPP

// Configuration parsing and output writers for the beamalign command-line
// tool. Config files are flat `key = value` lines; `#` starts a comment.

#include "harness.hpp"
#include "metrics.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace beamalign
{

using ConfigMap = std::map<std::string, std::string>;

inline const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> keys = {
        "m_r",     "m_t",        "snr_db",      "snr_db_o",     "snr_db_e",           "k_max",
        "runs",    "seed",       "algorithms",  "k_switch",     "alpha_init",         "channel",
        "clusters", "angular_spread_deg", "paths_per_cluster", "noiseless", "common_noise", "b_bits",
        "lisp_seeding",
    };
    return keys;
}

namespace detail
{

inline std::string trim(std::string s)
{
    const char *ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(trim(item));
    return out;
}

inline std::size_t parse_count(const std::string &key, const std::string &v, std::size_t min = 1)
{
    try
    {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument("negative");
        const unsigned long long x = std::stoull(v, &pos, 10);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        if (x < min)
            throw ConfigError(key, "expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
        return static_cast<std::size_t>(x);
    }
    catch (const ConfigError &)
    {
        throw;
    }
    catch (const std::exception &)
    {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument("negative");
        const unsigned long long x = std::stoull(v, &pos, 0);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return static_cast<std::uint64_t>(x);
    }
    catch (const std::exception &)
    {
        throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + v + "'");
    }
}

inline double parse_real(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return x;
    }
    catch (const std::exception &)
    {
        if (v == "-inf")
            return -INFINITY;
        throw ConfigError(key, "expected a real number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

} // namespace detail

// Reads `key = value` lines. Unknown keys and malformed lines are rejected.
inline ConfigMap read_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path + "': " + std::strerror(errno));
    ConfigMap m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        m[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return m;
}

// Builds a validated SimConfig from file entries overlaid with overrides.
inline SimConfig parse_config(const ConfigMap &file_entries, const ConfigMap &overrides = {})
{
    ConfigMap m = file_entries;
    for (const auto &[k, v] : overrides)
        m[k] = v;
    const auto &keys = config_keys();
    for (const auto &[k, v] : m)
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError(k, "unknown key");

    auto has = [&](const char *k) { return m.count(k) != 0; };
    auto get = [&](const char *k) { return m.at(k); };

    SimConfig c;
    c.channel.m_r = 4;
    c.channel.m_t = 32;

    // channel model first: the diagonal model fixes the dimensions
    if (has("channel"))
    {
        const std::string ch = get("channel");
        if (ch == "iid")
            c.channel.model = IidModel{};
        else if (ch == "sparse")
            c.channel.model = SparseModel{};
        else if (ch.rfind("diag:", 0) == 0)
        {
            DiagonalModel d;
            for (const auto &tok : detail::split(ch.substr(5), ','))
                d.h.push_back(detail::parse_real("channel", tok));
            c.channel.m_r = c.channel.m_t = d.h.size();
            c.channel.model = std::move(d);
        }
        else
            throw ConfigError("channel", "expected iid, sparse or diag:h1,h2,..., got '" + ch + "'");
    }
    if (has("m_r"))
        c.channel.m_r = detail::parse_count("m_r", get("m_r"));
    if (has("m_t"))
        c.channel.m_t = detail::parse_count("m_t", get("m_t"));

    if (has("clusters") || has("angular_spread_deg") || has("paths_per_cluster"))
    {
        auto *s = std::get_if<SparseModel>(&c.channel.model);
        if (!s)
            throw ConfigError(has("clusters") ? "clusters" : (has("angular_spread_deg") ? "angular_spread_deg" : "paths_per_cluster"),
                              "only valid with channel = sparse");
        if (has("clusters"))
            s->clusters = detail::parse_count("clusters", get("clusters"));
        if (has("angular_spread_deg"))
            s->angular_spread_deg = detail::parse_real("angular_spread_deg", get("angular_spread_deg"));
        if (has("paths_per_cluster"))
            s->paths_per_cluster = detail::parse_count("paths_per_cluster", get("paths_per_cluster"));
    }

    if (has("snr_db"))
        c.snr_db_o = c.snr_db_e = detail::parse_real("snr_db", get("snr_db"));
    if (has("snr_db_o"))
        c.snr_db_o = detail::parse_real("snr_db_o", get("snr_db_o"));
    if (has("snr_db_e"))
        c.snr_db_e = detail::parse_real("snr_db_e", get("snr_db_e"));
    if (has("k_max"))
        c.k_max = detail::parse_count("k_max", get("k_max"));
    if (has("runs"))
        c.runs = detail::parse_count("runs", get("runs"));
    if (has("seed"))
        c.base_seed = detail::parse_u64("seed", get("seed"));
    if (has("noiseless"))
        c.noiseless = detail::parse_bool("noiseless", get("noiseless"));
    if (has("common_noise"))
        c.common_noise = detail::parse_bool("common_noise", get("common_noise"));
    if (has("b_bits"))
        c.b_bits = detail::parse_count("b_bits", get("b_bits"));

    double alpha = 1000.0;
    if (has("alpha_init"))
    {
        alpha = detail::parse_real("alpha_init", get("alpha_init"));
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw ConfigError("alpha_init", "must be a positive real");
    }
    std::size_t k_switch = std::max(c.channel.m_r, c.channel.m_t);
    if (has("k_switch"))
        k_switch = detail::parse_count("k_switch", get("k_switch"));
    LispSeeding seeding = LispSeeding::Unit;
    if (has("lisp_seeding"))
    {
        const std::string s = get("lisp_seeding");
        if (s == "unit")
            seeding = LispSeeding::Unit;
        else if (s == "observation")
            seeding = LispSeeding::Observation;
        else if (s == "zero")
            seeding = LispSeeding::Zero;
        else
            throw ConfigError("lisp_seeding", "expected unit, observation or zero, got '" + s + "'");
    }

    std::vector<Algorithm> algos(kAllAlgorithms.begin(), kAllAlgorithms.end());
    if (has("algorithms"))
    {
        algos.clear();
        const std::string v = get("algorithms");
        if (v != "all")
            for (const auto &name : detail::split(v, ','))
            {
                const auto a = parse_algorithm(name);
                if (!a)
                    throw ConfigError("algorithms", "unknown algorithm '" + name + "'");
                if (std::find(algos.begin(), algos.end(), *a) != algos.end())
                    throw ConfigError("algorithms", "duplicate algorithm '" + name + "'");
                algos.push_back(*a);
            }
        else
            algos.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());
    }
    // enum order keeps the CSV row order stable
    std::sort(algos.begin(), algos.end());
    for (Algorithm a : algos)
        c.algorithms.push_back({a, alpha, k_switch, seeding});

    try
    {
        c.validate();
    }
    catch (const ConfigError &)
    {
        throw;
    }
    catch (const std::exception &e)
    {
        throw ConfigError("channel", e.what());
    }
    return c;
}

inline SimConfig parse_config(const std::string &path, const ConfigMap &overrides = {})
{
    return parse_config(path.empty() ? ConfigMap{} : read_config_file(path), overrides);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string format_g12(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void write_run_csv(const AggregateResult &r, std::ostream &out)
{
    out << "algorithm,k,mean_norm_gain,mean_angle_sq,runs,seed\n";
    for (const auto &c : r.curves)
        for (std::size_t k = 0; k < c.mean_norm_gain.size(); ++k)
            out << algorithm_name(c.kind.algorithm) << ',' << k << ',' << format_g12(c.mean_norm_gain[k]) << ','
                << format_g12(c.mean_angle_sq[k]) << ',' << r.runs << ',' << r.config.base_seed << '\n';
}

inline void write_sweep_csv(const SweepTable &t, std::ostream &out)
{
    out << "algorithm," << t.param_name << ",mean_norm_gain,sem,runs,seed\n";
    for (const auto &row : t.rows)
        out << algorithm_name(row.kind.algorithm) << ',' << format_g12(row.param) << ',' << format_g12(row.mean_norm_gain) << ','
            << format_g12(row.sem) << ',' << row.runs << ',' << row.seed << '\n';
}

namespace detail
{

template <class Writer>
void write_file(const std::string &path, Writer &&w)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open '" + path + "' for writing: " + std::strerror(errno));
    w(out);
    out.flush();
    if (!out)
        throw Error("write to '" + path + "' failed: " + std::strerror(errno));
}

inline std::string basename(const std::string &path)
{
    const auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

} // namespace detail

inline void emit_csv(const AggregateResult &r, const std::string &path)
{
    detail::write_file(path, [&](std::ostream &o) { write_run_csv(r, o); });
}

inline void emit_csv(const SweepTable &t, const std::string &path)
{
    detail::write_file(path, [&](std::ostream &o) { write_sweep_csv(t, o); });
}

// matplotlib script; run it from the CSV's directory or pass the CSV path.
// Run results get two panels (gain and squared angle against k), sweeps one.
inline std::string plot_script(const std::string &csv_path, const std::string &x_column, bool two_panels)
{
    std::ostringstream s;
    s << "#!/usr/bin/env python3\n"
         "# Generated by beamalign; the CSV next to this script is the data.\n"
         "import csv\n"
         "import os\n"
         "import sys\n"
         "from collections import defaultdict\n\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, \""
      << detail::basename(csv_path)
      << "\")\n"
         "series = defaultdict(lambda: ([], [], []))\n"
         "with open(path, newline=\"\") as fh:\n"
         "    for row in csv.DictReader(fh):\n"
         "        x, g, a = series[row[\"algorithm\"]]\n"
         "        x.append(float(row[\""
      << x_column
      << "\"]))\n"
         "        g.append(float(row[\"mean_norm_gain\"]))\n"
         "        a.append(float(row.get(\"mean_angle_sq\", \"nan\")))\n\n";
    if (two_panels)
        s << "fig, (ax_g, ax_a) = plt.subplots(1, 2, figsize=(11, 4))\n"
             "for name, (x, g, a) in series.items():\n"
             "    ax_g.plot(x, g, label=name)\n"
             "    ax_a.semilogy(x, a, label=name)\n"
             "ax_g.set_xlabel(\"k\")\n"
             "ax_g.set_ylabel(\"mean |z* H f|^2 / ||H||_2^2\")\n"
             "ax_a.set_xlabel(\"k\")\n"
             "ax_a.set_ylabel(\"mean phi_k^2\")\n"
             "for ax in (ax_g, ax_a):\n"
             "    ax.grid(True)\n"
             "    ax.legend()\n";
    else
        s << "fig, ax = plt.subplots(figsize=(6, 4))\n"
             "for name, (x, g, _) in series.items():\n"
             "    ax.plot(x, g, marker=\"o\", label=name)\n"
             "ax.set_xlabel(\""
          << x_column
          << "\")\n"
             "ax.set_ylabel(\"mean |z* H f|^2 / ||H||_2^2 at k_max\")\n"
             "ax.grid(True)\n"
             "ax.legend()\n";
    s << "fig.tight_layout()\n"
         "fig.savefig(os.path.splitext(path)[0] + \".png\", dpi=150)\n";
    return s.str();
}

inline void emit_plot_script(const AggregateResult &, const std::string &csv_path, const std::string &script_path)
{
    detail::write_file(script_path, [&](std::ostream &o) { o << plot_script(csv_path, "k", true); });
}

inline void emit_plot_script(const SweepTable &t, const std::string &csv_path, const std::string &script_path)
{
    detail::write_file(script_path, [&](std::ostream &o) { o << plot_script(csv_path, t.param_name, false); });
}

// One row per configured algorithm.
inline void report_cost(const SimConfig &c, std::ostream &out)
{
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-28s %s\n", "algorithm", "compute", "feedback_bits");
    out << line;
    for (const auto &kind : c.algorithms)
    {
        const CostReport r = cost_report(kind, c.k_max, c.channel.m_r, c.channel.m_t, c.b_bits);
        std::snprintf(line, sizeof line, "%-16s %-28s %llu\n", algorithm_name(kind.algorithm), r.flops_order.c_str(),
                      static_cast<unsigned long long>(r.feedback_bits));
        out << line;
    }
}

} // namespace beamalign

#endif
