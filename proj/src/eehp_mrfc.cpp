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

#include "eehp/eehp_mrfc.hpp"

#include <cmath>

namespace eehp
{
    CMatrix build_rf_from_channel(const CMatrix &H)
    {
        if (H.size() == 0)
            throw InvalidInput("build_rf_from_channel: empty channel");
        const Eigen::Index K = H.rows();
        const Eigen::Index n_tx = H.cols();
        const double scale = 1.0 / std::sqrt(static_cast<double>(n_tx));
        CMatrix rf(n_tx, K);
        for (Eigen::Index i = 0; i < n_tx; ++i)
            for (Eigen::Index j = 0; j < K; ++j)
            {
                const cdouble h = std::conj(H(j, i));
                const double phase = h == cdouble(0.0, 0.0) ? 0.0 : std::arg(h);
                rf(i, j) = std::polar(scale, phase);
            }
        return rf;
    }

    EquivalentChannel equivalent_channel(const CMatrix &H, const CMatrix &B_RF)
    {
        if (B_RF.rows() != H.cols() || B_RF.cols() != H.rows())
            throw DimensionMismatch("equivalent_channel: B_RF must be N_Tx x K");
        EquivalentChannel eq{H * B_RF, B_RF};
        for (Eigen::Index k = 0; k < eq.H_eq.rows(); ++k)
            eq.H_eq(k, k) = eq.H_eq(k, k).real();
        return eq;
    }

    EquivalentChannel equivalent_channel(const CMatrix &H)
    {
        return equivalent_channel(H, build_rf_from_channel(H));
    }

    PrecodingProblem mrfc_problem(const EquivalentChannel &eq)
    {
        return {eq.H_eq, eq.B_RF.adjoint() * eq.B_RF, static_cast<int>(eq.H_eq.rows())};
    }

    CMatrix mrfc_init(const EquivalentChannel &eq, const SystemParams &p)
    {
        const Eigen::Index K = eq.H_eq.rows();
        CMatrix bb = CMatrix::Constant(K, K, cdouble(std::sqrt(p.p_max_w / static_cast<double>(K)), 0.0));
        const double tx = (eq.B_RF * bb).squaredNorm();
        if (p.solver.power_mode == PowerMode::kBudget && tx > p.p_max_w)
            bb *= std::sqrt(p.p_max_w / tx);
        return bb;
    }

    MrfcSolution eehp_mrfc(const CMatrix &H, const SystemParams &p)
    {
        if (H.rows() > H.cols())
            throw InvalidInput("eehp_mrfc: K must not exceed N_Tx");
        const EquivalentChannel eq = equivalent_channel(H);
        AscentResult r = maximize_ee(mrfc_problem(eq), mrfc_init(eq, p), p);

        MrfcSolution out;
        out.hybrid = {eq.B_RF, std::move(r.B)};
        out.report = evaluate_hybrid(H, out.hybrid, p);
        out.report.iterations = r.report.iterations;
        out.report.ee_trace = std::move(r.report.ee_trace);
        out.se_trace = std::move(r.se_trace);
        out.tx_trace = std::move(r.tx_trace);
        return out;
    }

    MrfcSolution eehp_mrfc(const ChannelRealization &ch, const SystemParams &p)
    {
        return eehp_mrfc(ch.H, p);
    }
}
