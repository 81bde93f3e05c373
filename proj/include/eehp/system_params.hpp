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

#ifndef EEHP_SYSTEM_PARAMS_HPP
#define EEHP_SYSTEM_PARAMS_HPP

#include <vector>

#include "eehp/common.hpp"

namespace eehp
{
    // Which antenna factor the ZF planning analytics use:
    // kPaperLiteral -> (N*pi^2 - pi + 4) / 4
    // kOracleCorrected -> (N*pi - pi + 4) / 4, the exact second moment of the
    // phase-aligned equivalent channel diagonal under Rayleigh fading.
    enum class EeVariant
    {
        kPaperLiteral,
        kOracleCorrected
    };

    // kBudget: sum power <= P_max (inequality).
    // kFixedTotal: every iterate radiates exactly P_max. Used by the transmit
    // power sweep, where the total power is the abscissa.
    enum class PowerMode
    {
        kBudget,
        kFixedTotal
    };

    // kGaussSeidel: UE k's line search sees the already-updated columns of
    // UEs < k. kJacobi: all UEs are updated against the previous iterate.
    enum class UpdateOrder
    {
        kGaussSeidel,
        kJacobi
    };

    // Which rate constraints the line search enforces for UE k's step.
    // kUpdatedUe: R_k >= Gamma_k only. kAllSatisfied: every UE whose
    // constraint already holds must keep it.
    enum class RateGuard
    {
        kUpdatedUe,
        kAllSatisfied
    };

    struct SolverSettings
    {
        double mu_grid_step = 0.01; // line search grid on [0, 1]
        double tol_ee = 1e-6;       // relative EE improvement stopping rule
        int max_iters = 200;        // sweeps over all K UEs
        double feasibility_slack = 1e-9;
        double ridge_condition_limit = 1e12;
        PowerMode power_mode = PowerMode::kBudget;
        UpdateOrder update_order = UpdateOrder::kGaussSeidel;
        RateGuard rate_guard = RateGuard::kUpdatedUe;
    };

    struct SystemParams
    {
        // Link / power model
        double bandwidth_hz = 20e6;
        double p_max_w = dbm_to_watt(33.0);
        double gamma_min_se = 3.0;        // bits/s/Hz, applied to every UE
        std::vector<double> gamma_per_ue; // optional per-UE override, length K
        double p_rf_w = 0.048;
        double p_c_w = 20.0;
        double alpha = 0.38;
        double noise_psd_dbm_hz = -174.0;
        bool unit_noise = false; // sigma_n^2 = 1 instead of PSD * W

        // Geometry / propagation
        int n_tx = 200;
        int k_ues = 10;
        int n_ray = 30;
        double carrier_ghz = 28.0;
        double spacing_over_wavelength = 0.5;
        double pathloss_exp = 4.6;
        double shadow_sigma_db = 9.2;
        double cell_radius_m = 200.0;
        double min_distance_m = 10.0;

        // ZF planning analytics
        EeVariant ee_variant = EeVariant::kPaperLiteral;
        double p_bb_w = 0.0;
        double p_c_prime_w = 20.0;

        SolverSettings solver;

        double noise_power() const;
        double gamma(int k) const;

        // Throws InvalidInput naming the first offending field.
        void validate() const;

        static SystemParams table_defaults() { return {}; }

        // Small instance used by unit tests and CI sweeps.
        static SystemParams desk_scale();
    };

    const char *to_string(EeVariant v);
}

#endif
