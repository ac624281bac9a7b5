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


// beamalign command-line tool: run, sweep-antennas, sweep-kswitch, sweep-snr,
// report-cost. Exit 0 on success, 1 if any run failed, 2 on bad configuration.

#include <beamalign/beamalign.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct Options
{
    std::string config;
    std::string out = "beamalign.csv";
    std::map<std::string, std::string> values;
    bool noiseless = false;
    std::vector<std::size_t> mt_list;
    std::vector<std::size_t> kswitch_list;
    std::vector<double> snr_list;
};

void add_common(CLI::App *cmd, Options &o)
{
    cmd->add_option("--config", o.config, "key = value config file");
    struct Flag
    {
        const char *name;
        const char *key;
        const char *help;
    };
    static const Flag flags[] = {
        {"--mr", "m_r", "receive antennas (node 2)"},
        {"--mt", "m_t", "transmit antennas (node 1)"},
        {"--snr-db", "snr_db", "SNR of both links in dB"},
        {"--snr-db-o", "snr_db_o", "downlink SNR in dB"},
        {"--snr-db-e", "snr_db_e", "uplink SNR in dB"},
        {"--kmax", "k_max", "iterations per run"},
        {"--runs", "runs", "Monte Carlo runs"},
        {"--seed", "seed", "base seed"},
        {"--algos", "algorithms", "comma-separated algorithm names or 'all'"},
        {"--kswitch", "k_switch", "LISP switch iteration"},
        {"--alpha-init", "alpha_init", "initial covariance scale for sequential LS"},
        {"--channel", "channel", "iid | sparse | diag:h1,h2,..."},
    };
    for (const auto &f : flags)
    {
        const std::string key = f.key;
        cmd->add_option_function<std::string>(f.name, [&o, key](const std::string &v) { o.values[key] = v; }, f.help);
    }
    cmd->add_flag("--noiseless", o.noiseless, "disable receiver noise");
    cmd->add_option("--out", o.out, "output CSV path (plot script written next to it)");
}

std::string script_path(const std::string &csv)
{
    const auto dot = csv.find_last_of('.');
    const auto slash = csv.find_last_of('/');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? csv.substr(0, dot) : csv;
    return stem + "_plot.py";
}

int report_failures(const beamalign::MonteCarloError &e)
{
    nlohmann::json j;
    j["error"] = "run_failure";
    j["failed_runs"] = e.failures().size();
    auto &list = j["failures"] = nlohmann::json::array();
    for (const auto &f : e.failures())
        list.push_back({{"algorithm", f.algorithm}, {"run", f.run}, {"k", f.k}, {"message", f.message}});
    std::cerr << j.dump() << '\n';
    return 1;
}

int report_config_error(const std::string &key, const std::string &message)
{
    nlohmann::json j{{"error", "config"}, {"key", key}, {"message", message}};
    std::cerr << j.dump() << '\n';
    return 2;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Iterative beam alignment for reciprocal TDD MIMO links"};
    app.require_subcommand(1);

    Options o;
    auto *run = app.add_subcommand("run", "per-iteration gain and angle curves");
    auto *sw_ant = app.add_subcommand("sweep-antennas", "gain at k_max versus m_t");
    auto *sw_ks = app.add_subcommand("sweep-kswitch", "LISP gain at k_max versus k_switch");
    auto *sw_snr = app.add_subcommand("sweep-snr", "gain at k_max versus SNR (both links)");
    auto *cost = app.add_subcommand("report-cost", "feedback bits and compute order per algorithm");
    for (auto *cmd : {run, sw_ant, sw_ks, sw_snr, cost})
        add_common(cmd, o);
    sw_ant->add_option("--mt-list", o.mt_list, "m_t values")->delimiter(',')->required();
    sw_ks->add_option("--kswitch-list", o.kswitch_list, "k_switch values")->delimiter(',')->required();
    sw_snr->add_option("--snr-list", o.snr_list, "SNR values in dB")->delimiter(',')->required();

    CLI11_PARSE(app, argc, argv);

    if (o.noiseless)
        o.values["noiseless"] = "true";

    beamalign::SimConfig config;
    try
    {
        config = beamalign::parse_config(o.config, o.values);
    }
    catch (const beamalign::ConfigError &e)
    {
        return report_config_error(e.key(), e.what());
    }

    try
    {
        if (cost->parsed())
        {
            beamalign::report_cost(config, std::cout);
            return 0;
        }
        if (run->parsed())
        {
            const auto result = beamalign::run_monte_carlo(config);
            beamalign::emit_csv(result, o.out);
            beamalign::emit_plot_script(result, o.out, script_path(o.out));
        }
        else
        {
            beamalign::SweepTable table;
            if (sw_ant->parsed())
                table = beamalign::sweep_antennas(config, o.mt_list);
            else if (sw_ks->parsed())
                table = beamalign::sweep_kswitch(config, o.kswitch_list);
            else
                table = beamalign::sweep_snr(config, o.snr_list);
            beamalign::emit_csv(table, o.out);
            beamalign::emit_plot_script(table, o.out, script_path(o.out));
        }
        std::cout << o.out << '\n';
    }
    catch (const beamalign::MonteCarloError &e)
    {
        return report_failures(e);
    }
    catch (const beamalign::ConfigError &e)
    {
        return report_config_error(e.key(), e.what());
    }
    catch (const beamalign::InvalidDimension &e)
    {
        return report_config_error("", e.what());
    }
    catch (const std::exception &e)
    {
        nlohmann::json j{{"error", "io"}, {"message", e.what()}};
        std::cerr << j.dump() << '\n';
        return 1;
    }
    return 0;
}
