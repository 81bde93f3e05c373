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

#ifndef EEHP_LINK_METRICS_HPP
#define EEHP_LINK_METRICS_HPP

#include <vector>

#include "eehp/common.hpp"
#include "eehp/system_params.hpp"

namespace eehp
{
    // Unconstrained N_Tx x K precoder, column k serves UE k.
    struct DigitalPrecoder
    {
        CMatrix B;
    };

    // Analog stage (N_Tx x N_RF, constant modulus 1/sqrt(N_Tx)) followed by
    // the baseband stage (N_RF x K).
    struct HybridPrecoder
    {
        CMatrix rf;
        CMatrix bb;

        int n_rf() const { return static_cast<int>(rf.cols()); }
        CMatrix combined() const { return rf * bb; }

        // Max deviation of |rf(i,j)| from 1/sqrt(N_Tx).
        double modulus_error() const;

        // Throws InvalidInput when the constant-modulus or K <= N_RF <= N_Tx
        // contracts are violated.
        void validate(double tol = 1e-9) const;
    };

    struct EEReport
    {
        RVector per_ue_se;          // bits/s/Hz
        double sum_se = 0.0;        // bits/s/Hz
        double tx_power = 0.0;      // W, radiated
        double total_power = 0.0;   // W, including PA loss, RF chains and fixed load
        double ee = 0.0;            // bits/J
        int n_rf = 0;
        bool rate_feasible = false; // R_k >= Gamma_k for every k
        bool power_feasible = false;
        bool feasible = false;
        int iterations = 0;
        std::vector<double> ee_trace;
    };

    // ||B_RF b_BB,k||^2
    double per_ue_tx_power(const HybridPrecoder &hp, int k);

    // Per-UE SINR-based spectrum efficiency for the effective precoder B
    // against channel rows H (K x N): log2(1 + |h_k^H b_k|^2 / (sum_{i!=k} |h_k^H b_i|^2 + noise)).
    RVector se_digital(const CMatrix &H, const CMatrix &B, double noise_power);
    RVector se_digital(const CMatrix &H, const CMatrix &B, const SystemParams &p);
    RVector se_hybrid(const CMatrix &H, const HybridPrecoder &hp, const SystemParams &p);

    // tx_power / alpha + n_rf * P_RF + P_C
    double total_power(double tx_power, int n_rf, const SystemParams &p);

    // W * sum_se / total_power
    double energy_efficiency(double bandwidth_hz, double sum_se, double total_power);

    // Assembles a report and evaluates the rate and power constraints with
    // relative slack p.solver.feasibility_slack.
    EEReport make_report(RVector per_ue_se, double tx_power, int n_rf, const SystemParams &p);

    EEReport evaluate_digital(const CMatrix &H, const CMatrix &B, int n_rf, const SystemParams &p);
    EEReport evaluate_hybrid(const CMatrix &H, const HybridPrecoder &hp, const SystemParams &p);
}

#endif
