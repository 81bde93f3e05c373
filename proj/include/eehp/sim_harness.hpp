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


#ifndef EEHP_SIM_HARNESS_HPP
#define EEHP_SIM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "eehp/system_params.hpp"

namespace eehp
{
    // Raised for malformed or out-of-range configuration. The message names
    // the offending field, or the parse position for syntax errors.
    class ConfigError : public InvalidInput
    {
    public:
        using InvalidInput::InvalidInput;
    };

    enum class SweepKind
    {
        kPower,           // value: P_max in W, every iterate radiates exactly P_max
        kAntennas,        // value: N_Tx
        kRfChains,        // value: N_RF used by eedp / eehp; eehp_mrfc and zf unchanged
        kUes,             // value: K
        kMrfcConvergence, // value: K; one row per EE trace entry
        kPlanning         // value: N_Tx; see run_planning
    };

    const char *to_string(SweepKind kind);

    struct SweepConfig
    {
        SweepKind sweep_kind = SweepKind::kPower;
        std::vector<double> sweep_values;    // defaulted per kind when absent
        std::vector<std::string> algorithms; // subset of eedp, eehp, eehp_mrfc, zf
        int trials = 20;
        std::uint64_t seed = 1;
        std::string output_path = "results.csv";
        SystemParams system;

        void validate() const;
    };

    // Parses a JSON document. Unknown keys are rejected; missing keys take
    // Table I defaults.
    SweepConfig parse_config(const std::string &json_text);
    SweepConfig load_config(const std::string &path);

    // Fully resolved configuration as JSON, in the same key set that
    // parse_config accepts.
    std::string config_to_json(const SweepConfig &cfg);

    struct ResultRow
    {
        std::string sweep_kind;
        double sweep_value = 0.0;
        std::string algorithm;
        int trial = 0;
        std::uint64_t seed = 0;
        int n_rf = 0;
        double ee = 0.0;          // bits/J
        double sum_se = 0.0;      // bits/s/Hz
        double tx_power = 0.0;    // W
        double total_power = 0.0; // W
        bool feasible = false;
        int iterations = 0;
    };

    struct TrialFailure
    {
        double sweep_value = 0.0;
        int trial = 0;
        std::string algorithm;
        std::string message;
    };

    struct SweepResult
    {
        std::vector<ResultRow> rows;
        std::vector<TrialFailure> failures; // also present as rows with feasible = 0
    };

    inline constexpr const char *kCsvSchema = "result_row/v1";
    inline constexpr const char *kPlanningSchema = "planning_row/v1";

    // Per-trial seed from (master seed, sweep value index, trial index).
    std::uint64_t trial_seed(std::uint64_t master, std::uint64_t value_index, std::uint64_t trial_index);

    // Every algorithm of one (value, trial) cell runs on the same channel
    // draw. Power and rf_chains sweeps also share the draw across values
    // (value index 0 in the seed). Rows are ordered by value, trial,
    // algorithm.
    SweepResult run_sweep(const SweepConfig &cfg);

    std::string csv_header();
    std::string format_csv(const std::vector<ResultRow> &rows);

    // Writes the CSV to path and the run manifest to path + ".manifest.json".
    void write_sweep(const SweepConfig &cfg, const SweepResult &result, const std::string &path);

    struct PlanningRow
    {
        int n_tx = 0;
        int k = 0;
        double ee_upper_bound = 0.0;    // bits/s/Hz per W
        double ee_bits_per_joule = 0.0; // times W
        double g_value = 0.0;
        int k_opt = 0;
        int n_tx_critical = -1; // -1 when G(1, 100) < 0
    };

    // For every N_Tx value: ee_upper_bound over K = 1 .. max(200, 2 K_opt)
    // plus the UENO and CNAS outputs.
    std::vector<PlanningRow> run_planning(const SweepConfig &cfg);

    std::string planning_header();
    std::string format_planning_csv(const std::vector<PlanningRow> &rows);
    void write_planning(const SweepConfig &cfg, const std::vector<PlanningRow> &rows, const std::string &path);

    std::string tool_version();
}

#endif
