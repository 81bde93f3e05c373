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


#ifndef EEHP_ZF_PLANNING_HPP
#define EEHP_ZF_PLANNING_HPP

#include <optional>

#include "eehp/channel_model.hpp"
#include "eehp/link_metrics.hpp"
#include "eehp/system_params.hpp"

namespace eehp
{
    // Zero-forcing precoder G^H (G G^H)^{-1} D for a K x M channel G, with D
    // diagonal so that every column carries P_out / K. Throws NumericalError
    // when G G^H is singular.
    CMatrix zf_precoder(const CMatrix &G, double p_out);

    // zf_precoder applied to the K x K equivalent channel.
    CMatrix zf_baseband(const CMatrix &H_eq, double p_out);

    // log2(1 + P_out / (K noise [(G G^H)^{-1}]_{k,k})) per UE.
    RVector zf_rate(const CMatrix &G, double p_out, double noise_power = 1.0);

    // Fully digital ZF on H at P_out with equal power; every antenna has its
    // own chain, so n_rf = N_Tx in the power model.
    EEReport zf_baseline(const CMatrix &H, double p_out, const SystemParams &p);

    struct PlanningParams
    {
        double p_out_w = dbm_to_watt(33.0);
        double p_rf_w = 0.048;
        double p_bb_w = 0.0; // per stream
        double p_c_prime_w = 20.0;
        double alpha = 0.38;
        int n_tx = 100;
        int k_ues = 1;
        EeVariant ee_variant = EeVariant::kPaperLiteral;

        void validate() const;
        static PlanningParams from(const SystemParams &p);
    };

    // E[[H_eq]_{k,k}^2]:
    //   kPaperLiteral    (N pi^2 - pi + 4) / 4
    //   kOracleCorrected (N pi - pi + 4) / 4
    double antenna_factor(int n_tx, EeVariant variant);

    // a = P_out antenna_factor, b = P_out / alpha + P'_C, c = P_RF + P_BB,
    // z = 1 / K.
    struct GFunctionCoeffs
    {
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;
        double z = 1.0;

        static GFunctionCoeffs from(const PlanningParams &pp);
    };

    // K log2(1 + a / K) / (P_out / alpha + K (P_RF + P_BB) + P'_C), in
    // bits/s/Hz per watt. Multiply by W for bits/J.
    double ee_upper_bound(const PlanningParams &pp);
    double ee_upper_bound_bits_per_joule(const PlanningParams &pp, double bandwidth_hz);

    // Sign function of d eta_hat / dz in terms of K:
    //   G(K, N) = a c / (b ln2) + a / (K ln2) - (1 + a/K) log2(1 + a/K)
    // K is real-valued here so the bisection can evaluate midpoints.
    double g_function(double k, int n_tx, const PlanningParams &pp);

    // f(z, a) = a c / (b ln2) + a z / ln2 - (1 + a z) log2(1 + a z), with b
    // and c from pp, and its derivative -a log2(1 + a z).
    double f_za(double z, double a, const PlanningParams &pp);
    double df_dz(double z, double a);

    // Critical antenna count: nullopt when G(1, 100) < 0, otherwise the
    // smallest integer N >= 100 with G(1, N) <= 0.
    std::optional<int> cnas(const PlanningParams &pp);

    struct UenoResult
    {
        int k_opt = 1;
        double root = 1.0;       // real-valued root of G(., N), or 1 when G(1, N) >= 0
        bool single_ue = false;  // G(1, N) >= 0 branch
    };

    // EE-optimal UE count at n_tx: integer closest to the root of G(., n_tx).
    UenoResult ueno(int n_tx, const PlanningParams &pp);
}

#endif
