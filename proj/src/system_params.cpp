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

#include "eehp/system_params.hpp"

#include <cmath>

namespace eehp
{
    double SystemParams::noise_power() const
    {
        if (unit_noise)
            return 1.0;
        return dbm_to_watt(noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz));
    }

    double SystemParams::gamma(int k) const
    {
        if (gamma_per_ue.empty())
            return gamma_min_se;
        return gamma_per_ue.at(static_cast<size_t>(k));
    }

    void SystemParams::validate() const
    {
        auto require = [](bool ok, const char *what)
        {
            if (!ok)
                throw InvalidInput(std::string("SystemParams: ") + what);
        };
        require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
        require(p_max_w >= 0.0, "p_max_w must be >= 0");
        require(p_rf_w >= 0.0, "p_rf_w must be >= 0");
        require(p_c_w >= 0.0, "p_c_w must be >= 0");
        require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        require(gamma_min_se >= 0.0, "gamma_min_se must be >= 0");
        for (double g : gamma_per_ue)
            require(g >= 0.0, "gamma_per_ue entries must be >= 0");
        require(gamma_per_ue.empty() || gamma_per_ue.size() == static_cast<size_t>(k_ues),
                "gamma_per_ue must have k_ues entries");
        require(std::isfinite(noise_psd_dbm_hz), "noise_psd_dbm_hz must be finite");
        require(noise_power() > 0.0, "noise power must be > 0");
        require(n_tx >= 1, "n_tx must be >= 1");
        require(k_ues >= 1, "k_ues must be >= 1");
        require(n_ray >= 1, "n_ray must be >= 1");
        require(spacing_over_wavelength > 0.0, "spacing_over_wavelength must be > 0");
        require(shadow_sigma_db >= 0.0, "shadow_sigma_db must be >= 0");
        require(min_distance_m > 0.0, "min_distance_m must be > 0");
        require(cell_radius_m >= min_distance_m, "cell_radius_m must be >= min_distance_m");
        require(p_bb_w >= 0.0, "p_bb_w must be >= 0");
        require(p_c_prime_w >= 0.0, "p_c_prime_w must be >= 0");
        require(solver.mu_grid_step > 0.0 && solver.mu_grid_step <= 1.0, "mu_grid_step must lie in (0, 1]");
        require(solver.tol_ee > 0.0, "tol_ee must be > 0");
        require(solver.max_iters >= 1, "max_iters must be >= 1");
    }

    SystemParams SystemParams::desk_scale()
    {
        SystemParams p;
        p.n_tx = 16;
        p.k_ues = 4;
        p.n_ray = 8;
        return p;
    }

    const char *to_string(EeVariant v)
    {
        return v == EeVariant::kPaperLiteral ? "paper_literal" : "oracle_corrected";
    }
}
