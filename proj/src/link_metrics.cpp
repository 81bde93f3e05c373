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

#include "eehp/link_metrics.hpp"

#include <cmath>

namespace eehp
{
    double HybridPrecoder::modulus_error() const
    {
        if (rf.size() == 0)
            return 0.0;
        const double target = 1.0 / std::sqrt(static_cast<double>(rf.rows()));
        return (rf.array().abs() - target).abs().maxCoeff();
    }

    void HybridPrecoder::validate(double tol) const
    {
        if (rf.cols() != bb.rows())
            throw DimensionMismatch("HybridPrecoder: rf.cols() must equal bb.rows()");
        if (bb.cols() > rf.cols() || rf.cols() > rf.rows())
            throw InvalidInput("HybridPrecoder: require K <= N_RF <= N_Tx");
        if (modulus_error() > tol)
            throw InvalidInput("HybridPrecoder: RF entries violate the constant-modulus constraint");
    }

    double per_ue_tx_power(const HybridPrecoder &hp, int k)
    {
        if (k < 0 || k >= hp.bb.cols())
            throw InvalidInput("per_ue_tx_power: UE index out of range");
        if (hp.rf.cols() != hp.bb.rows())
            throw DimensionMismatch("per_ue_tx_power: rf.cols() must equal bb.rows()");
        return (hp.rf * hp.bb.col(k)).squaredNorm();
    }

    RVector se_digital(const CMatrix &H, const CMatrix &B, double noise_power)
    {
        if (H.cols() != B.rows() || H.rows() != B.cols())
            throw DimensionMismatch("se: channel is K x N, precoder must be N x K");
        const CMatrix A = H * B; // A(k, i) = h_k^H b_i
        const Eigen::Index K = H.rows();
        RVector se(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double signal = std::norm(A(k, k));
            const double interference = A.row(k).squaredNorm() - signal;
            se(k) = std::log2(1.0 + signal / (interference + noise_power));
        }
        return se;
    }

    RVector se_digital(const CMatrix &H, const CMatrix &B, const SystemParams &p)
    {
        return se_digital(H, B, p.noise_power());
    }

    RVector se_hybrid(const CMatrix &H, const HybridPrecoder &hp, const SystemParams &p)
    {
        if (hp.rf.cols() != hp.bb.rows())
            throw DimensionMismatch("se_hybrid: rf.cols() must equal bb.rows()");
        return se_digital(H, hp.combined(), p.noise_power());
    }

    double total_power(double tx_power, int n_rf, const SystemParams &p)
    {
        return tx_power / p.alpha + n_rf * p.p_rf_w + p.p_c_w;
    }

    double energy_efficiency(double bandwidth_hz, double sum_se, double total_power)
    {
        if (!(total_power > 0.0))
            throw InvalidInput("energy_efficiency: total power must be > 0");
        return bandwidth_hz * sum_se / total_power;
    }

    EEReport make_report(RVector per_ue_se, double tx_power, int n_rf, const SystemParams &p)
    {
        EEReport r;
        r.per_ue_se = std::move(per_ue_se);
        r.sum_se = r.per_ue_se.sum();
        r.tx_power = tx_power;
        r.n_rf = n_rf;
        r.total_power = total_power(tx_power, n_rf, p);
        r.ee = energy_efficiency(p.bandwidth_hz, r.sum_se, r.total_power);

        const double slack = p.solver.feasibility_slack;
        r.rate_feasible = true;
        for (Eigen::Index k = 0; k < r.per_ue_se.size(); ++k)
            if (r.per_ue_se(k) < p.gamma(static_cast<int>(k)) * (1.0 - slack))
                r.rate_feasible = false;
        r.power_feasible = tx_power <= p.p_max_w * (1.0 + slack);
        r.feasible = r.rate_feasible && r.power_feasible;
        return r;
    }

    EEReport evaluate_digital(const CMatrix &H, const CMatrix &B, int n_rf, const SystemParams &p)
    {
        return make_report(se_digital(H, B, p), B.squaredNorm(), n_rf, p);
    }

    EEReport evaluate_hybrid(const CMatrix &H, const HybridPrecoder &hp, const SystemParams &p)
    {
        const CMatrix B = hp.combined();
        return make_report(se_digital(H, B, p), B.squaredNorm(), hp.n_rf(), p);
    }
}
