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

#ifndef EEHP_EEHP_MRFC_HPP
#define EEHP_EEHP_MRFC_HPP

#include <vector>

#include "eehp/channel_model.hpp"
#include "eehp/eehp_core.hpp"
#include "eehp/link_metrics.hpp"

namespace eehp
{
    // [B_RF]_{i,j} = exp(j arg(conj(H_{j,i}))) / sqrt(N_Tx). A zero channel
    // entry gets phase 0.
    CMatrix build_rf_from_channel(const CMatrix &H);

    struct EquivalentChannel
    {
        CMatrix H_eq; // K x K, row k is h_k^H B_RF
        CMatrix B_RF; // N_Tx x K
    };

    // H_eq = H B_RF. With the phase-extracted B_RF the diagonal is
    // (1/sqrt(N_Tx)) sum_i |H_{k,i}|, real and non-negative; the imaginary
    // part of the diagonal is cleared to remove rounding residue.
    EquivalentChannel equivalent_channel(const CMatrix &H, const CMatrix &B_RF);
    EquivalentChannel equivalent_channel(const CMatrix &H);

    // Baseband problem over B_BB (K x K) with G = H_eq, Q = B_RF^H B_RF and
    // n_rf = K.
    PrecodingProblem mrfc_problem(const EquivalentChannel &eq);

    // sqrt(P_max / K) in every entry of the K x K baseband, scaled down onto
    // the power budget when the analog stage concentrates power above P_max.
    CMatrix mrfc_init(const EquivalentChannel &eq, const SystemParams &p);

    struct MrfcSolution
    {
        HybridPrecoder hybrid;
        EEReport report;
        std::vector<double> se_trace;
        std::vector<double> tx_trace;
    };

    MrfcSolution eehp_mrfc(const ChannelRealization &ch, const SystemParams &p);
    MrfcSolution eehp_mrfc(const CMatrix &H, const SystemParams &p);
}

#endif
