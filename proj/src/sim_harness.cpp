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


#include "eehp/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eehp/channel_model.hpp"
#include "eehp/eehp_core.hpp"
#include "eehp/eehp_mrfc.hpp"
#include "eehp/zf_planning.hpp"

#ifndef EEHP_VERSION
#define EEHP_VERSION "0.0.0"
#endif

namespace eehp
{
    using json = nlohmann::ordered_json;

    namespace
    {
        const std::vector<std::string> kAlgorithms = {"eedp", "eehp", "eehp_mrfc", "zf"};

        const std::map<std::string, SweepKind> kKinds = {
            {"power", SweepKind::kPower},
            {"antennas", SweepKind::kAntennas},
            {"rf_chains", SweepKind::kRfChains},
            {"ues", SweepKind::kUes},
            {"mrfc_convergence", SweepKind::kMrfcConvergence},
            {"planning", SweepKind::kPlanning},
        };

        [[noreturn]] void fail(const std::string &field, const std::string &what)
        {
            throw ConfigError("config field '" + field + "': " + what);
        }

        double as_number(const json &j, const std::string &field)
        {
            if (!j.is_number())
                fail(field, "expected a number");
            const double v = j.get<double>();
            if (!std::isfinite(v))
                fail(field, "must be finite");
            return v;
        }

        int as_int(const json &j, const std::string &field)
        {
            const double v = as_number(j, field);
            if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max())
                fail(field, "expected an integer");
            return static_cast<int>(v);
        }

        std::string as_string(const json &j, const std::string &field)
        {
            if (!j.is_string())
                fail(field, "expected a string");
            return j.get<std::string>();
        }

        void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &prefix)
        {
            if (!obj.is_object())
                fail(prefix.empty() ? "<root>" : prefix, "expected an object");
            for (const auto &item : obj.items())
                if (!allowed.count(item.key()))
                    fail(prefix + item.key(), "unknown key");
        }

        double watt_to_dbm(double w)
        {
            return 10.0 * std::log10(w) + 30.0;
        }

        void parse_system(const json &s, SystemParams &p)
        {
            static const std::set<std::string> keys = {
                "n_tx", "k_ues", "n_ray", "p_max_dbm", "gamma_min_se", "p_rf_w", "p_c_w", "alpha",
                "carrier_ghz", "bandwidth_hz", "noise_psd_dbm_hz", "pathloss_exp", "shadow_sigma_db",
                "cell_radius_m", "min_distance_m", "mu_grid_step", "tol_ee", "max_iters", "ee_variant",
                "p_bb_w", "p_c_prime_w"};
            check_keys(s, keys, "system.");
            auto num = [&](const char *key, double &dst)
            {
                if (s.contains(key))
                    dst = as_number(s.at(key), std::string("system.") + key);
            };
            auto integer = [&](const char *key, int &dst)
            {
                if (s.contains(key))
                    dst = as_int(s.at(key), std::string("system.") + key);
            };
            integer("n_tx", p.n_tx);
            integer("k_ues", p.k_ues);
            integer("n_ray", p.n_ray);
            if (s.contains("p_max_dbm"))
                p.p_max_w = dbm_to_watt(as_number(s.at("p_max_dbm"), "system.p_max_dbm"));
            num("gamma_min_se", p.gamma_min_se);
            num("p_rf_w", p.p_rf_w);
            num("p_c_w", p.p_c_w);
            num("alpha", p.alpha);
            num("carrier_ghz", p.carrier_ghz);
            num("bandwidth_hz", p.bandwidth_hz);
            if (s.contains("noise_psd_dbm_hz"))
            {
                const json &n = s.at("noise_psd_dbm_hz");
                if (n.is_string())
                {
                    if (n.get<std::string>() != "unit")
                        fail("system.noise_psd_dbm_hz", "expected a number or \"unit\"");
                    p.unit_noise = true;
                }
                else
                    p.noise_psd_dbm_hz = as_number(n, "system.noise_psd_dbm_hz");
            }
            num("pathloss_exp", p.pathloss_exp);
            num("shadow_sigma_db", p.shadow_sigma_db);
            num("cell_radius_m", p.cell_radius_m);
            num("min_distance_m", p.min_distance_m);
            num("mu_grid_step", p.solver.mu_grid_step);
            num("tol_ee", p.solver.tol_ee);
            integer("max_iters", p.solver.max_iters);
            if (s.contains("ee_variant"))
            {
                const std::string v = as_string(s.at("ee_variant"), "system.ee_variant");
                if (v == "paper" || v == "paper_literal")
                    p.ee_variant = EeVariant::kPaperLiteral;
                else if (v == "corrected" || v == "oracle_corrected")
                    p.ee_variant = EeVariant::kOracleCorrected;
                else
                    fail("system.ee_variant", "expected \"paper_literal\" or \"oracle_corrected\"");
            }
            num("p_bb_w", p.p_bb_w);
            num("p_c_prime_w", p.p_c_prime_w);
        }

        std::vector<double> default_values(const SweepConfig &cfg)
        {
            const auto &p = cfg.system;
            switch (cfg.sweep_kind)
            {
            case SweepKind::kPower:
                return {p.p_max_w};
            case SweepKind::kAntennas:
                return {static_cast<double>(p.n_tx)};
            case SweepKind::kRfChains:
            case SweepKind::kUes:
            case SweepKind::kMrfcConvergence:
                return {static_cast<double>(p.k_ues)};
            case SweepKind::kPlanning:
                return {100.0, 150.0, 200.0};
            }
            return {};
        }

        std::vector<std::string> default_algorithms(SweepKind kind)
        {
            if (kind == SweepKind::kMrfcConvergence)
                return {"eehp_mrfc"};
            return kAlgorithms;
        }

        std::string fmt(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            return buf;
        }

        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        // Parameters for one sweep cell.
        SystemParams cell_params(const SweepConfig &cfg, double value)
        {
            SystemParams p = cfg.system;
            switch (cfg.sweep_kind)
            {
            case SweepKind::kPower:
                p.p_max_w = value;
                p.solver.power_mode = PowerMode::kFixedTotal;
                break;
            case SweepKind::kAntennas:
                p.n_tx = static_cast<int>(value);
                break;
            case SweepKind::kUes:
            case SweepKind::kMrfcConvergence:
                p.k_ues = static_cast<int>(value);
                break;
            default:
                break;
            }
            return p;
        }

        ResultRow make_row(const SweepConfig &cfg, double value, const std::string &alg, int trial,
                           std::uint64_t seed, const EEReport &r)
        {
            ResultRow row;
            row.sweep_kind = to_string(cfg.sweep_kind);
            row.sweep_value = value;
            row.algorithm = alg;
            row.trial = trial;
            row.seed = seed;
            row.n_rf = r.n_rf;
            row.ee = r.ee;
            row.sum_se = r.sum_se;
            row.tx_power = r.tx_power;
            row.total_power = r.total_power;
            row.feasible = r.feasible;
            row.iterations = r.iterations;
            return row;
        }

        ResultRow failure_row(const SweepConfig &cfg, double value, const std::string &alg, int trial,
                              std::uint64_t seed)
        {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            ResultRow row;
            row.sweep_kind = to_string(cfg.sweep_kind);
            row.sweep_value = value;
            row.algorithm = alg;
            row.trial = trial;
            row.seed = seed;
            row.ee = row.sum_se = row.tx_power = row.total_power = nan;
            return row;
        }

        // Convergence rows: one per trace entry, iterations = entry index.
        void append_trace(std::vector<ResultRow> &rows, const SweepConfig &cfg, const SystemParams &p, double value,
                          const std::string &alg, int trial, std::uint64_t seed, const EEReport &final_report,
                          const std::vector<double> &se, const std::vector<double> &tx)
        {
            for (size_t i = 0; i < se.size(); ++i)
            {
                ResultRow row = make_row(cfg, value, alg, trial, seed, final_report);
                row.sum_se = se[i];
                row.tx_power = tx[i];
                row.total_power = total_power(tx[i], final_report.n_rf, p);
                row.ee = energy_efficiency(p.bandwidth_hz, se[i], row.total_power);
                row.iterations = static_cast<int>(i);
                rows.push_back(row);
            }
        }
    }

    const char *to_string(SweepKind kind)
    {
        for (const auto &[name, k] : kKinds)
            if (k == kind)
                return name.c_str();
        return "unknown";
    }

    void SweepConfig::validate() const
    {
        if (trials < 1)
            fail("trials", "must be >= 1");
        if (sweep_values.empty())
            fail("sweep_values", "must be non-empty");
        for (size_t i = 1; i < sweep_values.size(); ++i)
            if (!(sweep_values[i] > sweep_values[i - 1]))
                fail("sweep_values", "must be strictly increasing");
        if (algorithms.empty())
            fail("algorithms", "must be non-empty");
        for (const auto &a : algorithms)
            if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end())
                fail("algorithms", "unknown algorithm '" + a + "'");
        if (sweep_kind == SweepKind::kMrfcConvergence)
            for (const auto &a : algorithms)
                if (a != "eedp" && a != "eehp_mrfc")
                    fail("algorithms", "mrfc_convergence supports eedp and eehp_mrfc only");

        try
        {
            system.validate();
        }
        catch (const InvalidInput &e)
        {
            throw ConfigError(std::string("config field 'system': ") + e.what());
        }
        if (system.k_ues > system.n_tx && sweep_kind != SweepKind::kAntennas && sweep_kind != SweepKind::kUes &&
            sweep_kind != SweepKind::kMrfcConvergence && sweep_kind != SweepKind::kPlanning)
            fail("system.k_ues", "must not exceed system.n_tx");

        for (double v : sweep_values)
        {
            const bool integral = v == std::floor(v) && v >= 1.0 && v <= 1e6;
            switch (sweep_kind)
            {
            case SweepKind::kPower:
                if (!(v > 0.0))
                    fail("sweep_values", "transmit powers must be > 0 W");
                break;
            case SweepKind::kAntennas:
                if (!integral || v < system.k_ues)
                    fail("sweep_values", "antenna counts must be integers >= k_ues");
                break;
            case SweepKind::kRfChains:
                if (!integral || v < system.k_ues || v > std::min(system.n_tx, system.n_ray))
                    fail("sweep_values", "RF chain counts must be integers in [k_ues, min(n_tx, n_ray)]");
                break;
            case SweepKind::kUes:
            case SweepKind::kMrfcConvergence:
                if (!integral || v > system.n_tx)
                    fail("sweep_values", "UE counts must be integers in [1, n_tx]");
                break;
            case SweepKind::kPlanning:
                if (!integral)
                    fail("sweep_values", "antenna counts must be positive integers");
                break;
            }
        }
    }

    SweepConfig parse_config(const std::string &json_text)
    {
        json root;
        try
        {
            root = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        check_keys(root, {"sweep_kind", "sweep_values", "algorithms", "trials", "seed", "output_path", "system"}, "");

        SweepConfig cfg;
        if (root.contains("system"))
            parse_system(root.at("system"), cfg.system);
        if (root.contains("sweep_kind"))
        {
            const std::string k = as_string(root.at("sweep_kind"), "sweep_kind");
            const auto it = kKinds.find(k);
            if (it == kKinds.end())
                fail("sweep_kind", "unknown sweep kind '" + k + "'");
            cfg.sweep_kind = it->second;
        }
        if (root.contains("sweep_values"))
        {
            const json &v = root.at("sweep_values");
            if (!v.is_array())
                fail("sweep_values", "expected an array of numbers");
            for (size_t i = 0; i < v.size(); ++i)
                cfg.sweep_values.push_back(as_number(v[i], "sweep_values[" + std::to_string(i) + "]"));
        }
        else
            cfg.sweep_values = default_values(cfg);
        if (root.contains("algorithms"))
        {
            const json &a = root.at("algorithms");
            if (!a.is_array())
                fail("algorithms", "expected an array of strings");
            std::set<std::string> unique;
            for (size_t i = 0; i < a.size(); ++i)
                unique.insert(as_string(a[i], "algorithms[" + std::to_string(i) + "]"));
            cfg.algorithms.assign(unique.begin(), unique.end());
        }
        else
            cfg.algorithms = default_algorithms(cfg.sweep_kind);
        if (root.contains("trials"))
            cfg.trials = as_int(root.at("trials"), "trials");
        if (root.contains("seed"))
        {
            const json &s = root.at("seed");
            if (s.is_number_unsigned())
                cfg.seed = s.get<std::uint64_t>();
            else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
                cfg.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
            else
                fail("seed", "expected a non-negative 64-bit integer");
        }
        if (root.contains("output_path"))
            cfg.output_path = as_string(root.at("output_path"), "output_path");

        cfg.validate();
        return cfg;
    }

    SweepConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::string config_to_json(const SweepConfig &cfg)
    {
        const auto &p = cfg.system;
        json sys;
        sys["n_tx"] = p.n_tx;
        sys["k_ues"] = p.k_ues;
        sys["n_ray"] = p.n_ray;
        sys["p_max_dbm"] = watt_to_dbm(p.p_max_w);
        sys["gamma_min_se"] = p.gamma_min_se;
        sys["p_rf_w"] = p.p_rf_w;
        sys["p_c_w"] = p.p_c_w;
        sys["alpha"] = p.alpha;
        sys["carrier_ghz"] = p.carrier_ghz;
        sys["bandwidth_hz"] = p.bandwidth_hz;
        if (p.unit_noise)
            sys["noise_psd_dbm_hz"] = "unit";
        else
            sys["noise_psd_dbm_hz"] = p.noise_psd_dbm_hz;
        sys["pathloss_exp"] = p.pathloss_exp;
        sys["shadow_sigma_db"] = p.shadow_sigma_db;
        sys["cell_radius_m"] = p.cell_radius_m;
        sys["min_distance_m"] = p.min_distance_m;
        sys["mu_grid_step"] = p.solver.mu_grid_step;
        sys["tol_ee"] = p.solver.tol_ee;
        sys["max_iters"] = p.solver.max_iters;
        sys["ee_variant"] = to_string(p.ee_variant);
        sys["p_bb_w"] = p.p_bb_w;
        sys["p_c_prime_w"] = p.p_c_prime_w;

        json root;
        root["sweep_kind"] = to_string(cfg.sweep_kind);
        root["sweep_values"] = cfg.sweep_values;
        root["algorithms"] = cfg.algorithms;
        root["trials"] = cfg.trials;
        root["seed"] = cfg.seed;
        root["output_path"] = cfg.output_path;
        root["system"] = sys;
        return root.dump(2);
    }

    std::uint64_t trial_seed(std::uint64_t master, std::uint64_t value_index, std::uint64_t trial_index)
    {
        return splitmix64(splitmix64(splitmix64(master) ^ value_index) ^ (trial_index * 0xd1b54a32d192ed03ULL));
    }

    SweepResult run_sweep(const SweepConfig &cfg)
    {
        cfg.validate();
        if (cfg.sweep_kind == SweepKind::kPlanning)
            throw ConfigError("config field 'sweep_kind': planning runs through run_planning");

        auto wants = [&](const char *alg)
        { return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), alg) != cfg.algorithms.end(); };

        SweepResult out;
        for (size_t vi = 0; vi < cfg.sweep_values.size(); ++vi)
        {
            const double value = cfg.sweep_values[vi];
            const SystemParams p = cell_params(cfg, value);
            for (int t = 0; t < cfg.trials; ++t)
            {
                // Power and RF chain values do not change the channel law, so
                // every value reuses the trial's draw (paired comparison).
                const bool paired = cfg.sweep_kind == SweepKind::kPower || cfg.sweep_kind == SweepKind::kRfChains;
                const std::uint64_t seed = trial_seed(cfg.seed, paired ? 0 : vi, static_cast<std::uint64_t>(t));
                Rng rng(seed);
                const ChannelRealization ch = sample_mmwave_channel(p, rng);

                auto record_failure = [&](const std::string &alg, const std::string &msg)
                {
                    out.rows.push_back(failure_row(cfg, value, alg, t, seed));
                    out.failures.push_back({value, t, alg, msg});
                };

                if (cfg.sweep_kind == SweepKind::kMrfcConvergence)
                {
                    for (const auto &alg : cfg.algorithms)
                    {
                        try
                        {
                            if (alg == "eedp")
                            {
                                const DigitalSolution s = eehp_a(ch, p.k_ues, p);
                                append_trace(out.rows, cfg, p, value, alg, t, seed, s.report, s.se_trace, s.tx_trace);
                            }
                            else
                            {
                                const MrfcSolution s = eehp_mrfc(ch, p);
                                append_trace(out.rows, cfg, p, value, alg, t, seed, s.report, s.se_trace, s.tx_trace);
                            }
                        }
                        catch (const std::exception &e)
                        {
                            record_failure(alg, e.what());
                        }
                    }
                    continue;
                }

                // eedp and eehp share the RF chain search when n_rf is free.
                std::optional<EEHPSolution> search;
                std::string search_error;
                const bool fixed_nrf = cfg.sweep_kind == SweepKind::kRfChains;
                if (!fixed_nrf && (wants("eedp") || wants("eehp")))
                {
                    try
                    {
                        search = eehp(ch, p);
                    }
                    catch (const std::exception &e)
                    {
                        search_error = e.what();
                    }
                }

                for (const auto &alg : cfg.algorithms)
                {
                    try
                    {
                        EEReport r;
                        if (alg == "eedp" || alg == "eehp")
                        {
                            if (fixed_nrf)
                            {
                                const int n_rf = static_cast<int>(value);
                                DigitalSolution a = eehp_a(ch, n_rf, p);
                                if (alg == "eedp")
                                    r = a.report;
                                else
                                {
                                    const FactorizationResult f = eehp_b(a.precoder.B, ch.U, n_rf);
                                    r = evaluate_hybrid(ch.H, f.hybrid, p);
                                    r.iterations = a.report.iterations;
                                }
                            }
                            else
                            {
                                if (!search)
                                    throw NumericalError(search_error);
                                r = alg == "eedp" ? search->upper_report : search->report;
                            }
                        }
                        else if (alg == "eehp_mrfc")
                            r = eehp_mrfc(ch, p).report;
                        else
                            r = zf_baseline(ch.H, p.p_max_w, p);
                        out.rows.push_back(make_row(cfg, value, alg, t, seed, r));
                    }
                    catch (const std::exception &e)
                    {
                        record_failure(alg, e.what());
                    }
                }
            }
        }
        return out;
    }

    std::string csv_header()
    {
        return "sweep_kind,sweep_value,algorithm,trial,seed,n_rf,ee,sum_se,tx_power,total_power,feasible,iterations";
    }

    std::string format_csv(const std::vector<ResultRow> &rows)
    {
        std::string s = csv_header() + "\n";
        for (const auto &r : rows)
        {
            s += r.sweep_kind + "," + fmt(r.sweep_value) + "," + r.algorithm + "," + std::to_string(r.trial) + "," +
                 std::to_string(r.seed) + "," + std::to_string(r.n_rf) + "," + fmt(r.ee) + "," + fmt(r.sum_se) + "," +
                 fmt(r.tx_power) + "," + fmt(r.total_power) + "," + (r.feasible ? "1" : "0") + "," +
                 std::to_string(r.iterations) + "\n";
        }
        return s;
    }

    namespace
    {
        void write_text(const std::string &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot open '" + path + "' for writing");
            out << text;
            if (!out)
                throw std::runtime_error("write to '" + path + "' failed");
        }

        json manifest_base(const SweepConfig &cfg, const char *schema, size_t n_rows)
        {
            json m;
            m["tool"] = "eehp_sim";
            m["version"] = tool_version();
            m["csv_schema"] = schema;
            m["config"] = json::parse(config_to_json(cfg));
            m["rows"] = n_rows;
            return m;
        }
    }

    void write_sweep(const SweepConfig &cfg, const SweepResult &result, const std::string &path)
    {
        write_text(path, format_csv(result.rows));
        json m = manifest_base(cfg, kCsvSchema, result.rows.size());
        json failures = json::array();
        for (const auto &f : result.failures)
            failures.push_back({{"sweep_value", f.sweep_value},
                                {"trial", f.trial},
                                {"algorithm", f.algorithm},
                                {"error", f.message}});
        m["failures"] = failures;
        write_text(path + ".manifest.json", m.dump(2) + "\n");
    }

    std::vector<PlanningRow> run_planning(const SweepConfig &cfg)
    {
        if (cfg.sweep_values.empty())
            throw ConfigError("config field 'sweep_values': must be non-empty");
        std::vector<PlanningRow> rows;
        for (double v : cfg.sweep_values)
        {
            PlanningParams pp = PlanningParams::from(cfg.system);
            pp.n_tx = static_cast<int>(v);
            const UenoResult u = ueno(pp.n_tx, pp);
            const std::optional<int> critical = cnas(pp);
            const int k_max = std::max(200, 2 * u.k_opt);
            for (int k = 1; k <= k_max; ++k)
            {
                pp.k_ues = k;
                PlanningRow row;
                row.n_tx = pp.n_tx;
                row.k = k;
                row.ee_upper_bound = ee_upper_bound(pp);
                row.ee_bits_per_joule = ee_upper_bound_bits_per_joule(pp, cfg.system.bandwidth_hz);
                row.g_value = g_function(k, pp.n_tx, pp);
                row.k_opt = u.k_opt;
                row.n_tx_critical = critical.value_or(-1);
                rows.push_back(row);
            }
        }
        return rows;
    }

    std::string planning_header()
    {
        return "n_tx,k,ee_upper_bound,ee_bits_per_joule,g_value,k_opt,n_tx_critical";
    }

    std::string format_planning_csv(const std::vector<PlanningRow> &rows)
    {
        std::string s = planning_header() + "\n";
        for (const auto &r : rows)
            s += std::to_string(r.n_tx) + "," + std::to_string(r.k) + "," + fmt(r.ee_upper_bound) + "," +
                 fmt(r.ee_bits_per_joule) + "," + fmt(r.g_value) + "," + std::to_string(r.k_opt) + "," +
                 (r.n_tx_critical < 0 ? std::string() : std::to_string(r.n_tx_critical)) + "\n";
        return s;
    }

    void write_planning(const SweepConfig &cfg, const std::vector<PlanningRow> &rows, const std::string &path)
    {
        write_text(path, format_planning_csv(rows));
        json m = manifest_base(cfg, kPlanningSchema, rows.size());
        m["failures"] = json::array();
        write_text(path + ".manifest.json", m.dump(2) + "\n");
    }

    std::string tool_version()
    {
        return EEHP_VERSION;
    }
}
