// SPDX-License-Identifier: Apache-2.0
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


#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eehp/selftest.hpp"
#include "eehp/sim_harness.hpp"
#include "eehp/zf_planning.hpp"

namespace
{
    struct RunOptions
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<int> trials;
    };

    struct PlanOptions
    {
        int n_tx = 100;
        double p_out_w = eehp::dbm_to_watt(33.0);
        double p_bb_w = 0.0;
        double p_c_prime_w = 20.0;
        double alpha = 0.38;
        double p_rf_w = 0.048;
        std::string variant = "paper";
    };

    void add_run_flags(CLI::App *cmd, RunOptions &o)
    {
        cmd->add_option("--config", o.config, "JSON config file (omit for defaults)");
        cmd->add_option("--seed", o.seed, "Master seed override");
        cmd->add_option("--out", o.out, "Output CSV path override");
        cmd->add_option("--trials", o.trials, "Trial count override");
    }

    void add_plan_flags(CLI::App *cmd, PlanOptions &o)
    {
        cmd->add_option("--n-tx", o.n_tx, "Number of BS antennas");
        cmd->add_option("--p-out-w", o.p_out_w, "Total transmit power (W)");
        cmd->add_option("--p-bb-w", o.p_bb_w, "Baseband power per stream (W)");
        cmd->add_option("--p-c-prime-w", o.p_c_prime_w, "Fixed BS power (W)");
        cmd->add_option("--alpha", o.alpha, "Power amplifier efficiency");
        cmd->add_option("--p-rf-w", o.p_rf_w, "Power per RF chain (W)");
        cmd->add_option("--variant", o.variant, "Antenna factor variant")->check(CLI::IsMember({"paper", "corrected"}));
    }

    eehp::SweepConfig resolve(const RunOptions &o, bool planning)
    {
        eehp::SweepConfig cfg;
        if (!o.config.empty())
            cfg = eehp::load_config(o.config);
        else
            cfg = eehp::parse_config(planning ? R"({"sweep_kind":"planning"})" : "{}");
        if (planning && cfg.sweep_kind != eehp::SweepKind::kPlanning)
            throw eehp::ConfigError("config field 'sweep_kind': the planning command needs sweep_kind \"planning\"");
        if (o.seed)
            cfg.seed = *o.seed;
        if (o.out)
            cfg.output_path = *o.out;
        if (o.trials)
            cfg.trials = *o.trials;
        cfg.validate();
        return cfg;
    }

    eehp::PlanningParams planning_params(const PlanOptions &o)
    {
        eehp::PlanningParams pp;
        pp.n_tx = o.n_tx;
        pp.p_out_w = o.p_out_w;
        pp.p_bb_w = o.p_bb_w;
        pp.p_c_prime_w = o.p_c_prime_w;
        pp.alpha = o.alpha;
        pp.p_rf_w = o.p_rf_w;
        pp.ee_variant = o.variant == "paper" ? eehp::EeVariant::kPaperLiteral : eehp::EeVariant::kOracleCorrected;
        pp.validate();
        return pp;
    }

    int run_sweep_command(const RunOptions &o)
    {
        const eehp::SweepConfig cfg = resolve(o, false);
        if (cfg.sweep_kind == eehp::SweepKind::kPlanning)
        {
            eehp::write_planning(cfg, eehp::run_planning(cfg), cfg.output_path);
            std::cout << "wrote " << cfg.output_path << "\n";
            return 0;
        }
        const eehp::SweepResult result = eehp::run_sweep(cfg);
        eehp::write_sweep(cfg, result, cfg.output_path);
        std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_path;
        if (!result.failures.empty())
            std::cout << " (" << result.failures.size() << " failed trials, see manifest)";
        std::cout << "\n";
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Energy-efficient hybrid precoding simulator"};
    app.set_version_flag("--version", eehp::tool_version());
    app.require_subcommand(1);

    RunOptions sweep_opts, plan_opts;
    PlanOptions cnas_opts, ueno_opts;
    auto *sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep and write CSV + manifest");
    add_run_flags(sweep, sweep_opts);
    auto *planning = app.add_subcommand("planning", "Evaluate the ZF upper bound over K for each N_Tx");
    add_run_flags(planning, plan_opts);
    auto *cnas_cmd = app.add_subcommand("cnas", "Critical number of antennas");
    add_plan_flags(cnas_cmd, cnas_opts);
    auto *ueno_cmd = app.add_subcommand("ueno", "EE-optimal number of UEs");
    add_plan_flags(ueno_cmd, ueno_opts);
    auto *selftest = app.add_subcommand("selftest", "Run the invariant checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try
    {
        if (*sweep)
            return run_sweep_command(sweep_opts);
        if (*planning)
        {
            const eehp::SweepConfig cfg = resolve(plan_opts, true);
            eehp::write_planning(cfg, eehp::run_planning(cfg), cfg.output_path);
            std::cout << "wrote " << cfg.output_path << "\n";
            return 0;
        }
        if (*cnas_cmd)
        {
            const auto n = eehp::cnas(planning_params(cnas_opts));
            std::cout << "n_tx_critical=" << (n ? std::to_string(*n) : std::string("none")) << "\n";
            return 0;
        }
        if (*ueno_cmd)
        {
            const auto pp = planning_params(ueno_opts);
            const auto r = eehp::ueno(ueno_opts.n_tx, pp);
            std::printf("k_opt=%d root=%.9g single_ue=%d\n", r.k_opt, r.root, r.single_ue ? 1 : 0);
            return 0;
        }
        if (*selftest)
            return eehp::run_selftest(std::cout) == 0 ? 0 : 2;
    }
    catch (const eehp::InvalidInput &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
