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

#ifndef EEHP_EEHP_CORE_HPP
#define EEHP_EEHP_CORE_HPP

#include <optional>
#include <string>
#include <vector>

#include "eehp/channel_model.hpp"
#include "eehp/link_metrics.hpp"
#include "eehp/system_params.hpp"

namespace eehp
{
    /*
     * Energy-efficiency ascent over a precoder B (M x K) for an effective
     * channel G (K x M):
     *
     *   eta(B) = W sum_k R_k / P_total,   P_total = tr(B^H Q B)/alpha + N_RF P_RF + P_C
     *
     * The fully digital problem uses G = H, Q = I, M = N_Tx. The minimum
     * RF chain variant uses G = H B_RF, Q = B_RF^H B_RF, M = K.
     *
     * The per-UE gradient is written as d eta / d Re(b_k) + j d eta / d Im(b_k)
     * = (2 / Pbar^2) (Omega_k - Xi_k) b_k with Pbar = P_total / W and
     *
     *   Omega_k = Pbar g_k g_k^H / (ln2 (sum_j |g_k^H b_j|^2 + sigma^2))
     *   Xi_k    = sum_i R_i / (alpha W) Q
     *             + Pbar / ln2 sum_{i != k} S_i / (delta_i^2 + delta_i S_i) g_i g_i^H
     *
     * where S_i = |g_i^H b_i|^2 and delta_i is the interference-plus-noise of
     * UE i. Each sweep moves every b_k along Xi_k^{-1} Omega_k b_k - b_k with
     * a step chosen on a grid over [0, 1] subject to the power budget and the
     * currently satisfied rate constraints. The current point is always a
     * candidate, so the EE trace is non-decreasing.
     *
     * Cost per sweep is dominated by K Cholesky factorizations of M x M
     * matrices, O(K M^3); the greedy factorization (eehp_b) costs
     * O(N_Tx^2 K + N_RF^3 + N_RF^2 N_Tx + N_Tx N_RF K); the RF chain search
     * multiplies both by the number of N_RF candidates.
     */
    struct PrecodingProblem
    {
        CMatrix channel;      // K x M, row k is g_k^H
        CMatrix power_metric; // M x M; empty means identity
        int n_rf = 0;

        int k_ues() const { return static_cast<int>(channel.rows()); }
        int dim() const { return static_cast<int>(channel.cols()); }

        // sum_k b_k^H Q b_k
        double tx_power(const CMatrix &B) const;

        static PrecodingProblem digital(const CMatrix &H, int n_rf);
    };

    struct GradientTerms
    {
        CMatrix omega;
        CMatrix xi;
        double p_bar = 0.0; // P_total / W
        RVector delta;      // interference plus noise per UE
        RVector se;         // current per-UE spectrum efficiency
    };

    GradientTerms gradient_terms(const PrecodingProblem &problem, const CMatrix &B, int k, const SystemParams &p);

    // (2 / Pbar^2) (Omega_k - Xi_k) b_k
    CVector ee_gradient(const GradientTerms &terms, const CMatrix &B, int k);

    // W sum R / P_total for the given problem.
    double objective(const PrecodingProblem &problem, const CMatrix &B, const SystemParams &p);

    // Solves Xi x = rhs for Hermitian positive (semi)definite Xi. Adds a
    // ridge of 1e-10 tr(Xi)/M when the reciprocal condition estimate falls
    // below 1 / cond_limit.
    CVector solve_hermitian(const CMatrix &xi, const CVector &rhs, double cond_limit);

    struct AscentResult
    {
        CMatrix B;
        EEReport report;               // report.ee_trace[0] is the starting point
        std::vector<double> se_trace;  // sum SE per trace entry
        std::vector<double> tx_trace;  // radiated power per trace entry
    };

    // Shared ascent engine used by eehp_a and eehp_mrfc.
    AscentResult maximize_ee(const PrecodingProblem &problem, const CMatrix &init, const SystemParams &p);

    // b_k = h_k sqrt(P / K) / ||h_k||
    CMatrix matched_filter_init(const CMatrix &H, double p_total);

    struct DigitalSolution
    {
        DigitalPrecoder precoder;
        EEReport report;
        std::vector<double> se_trace;
        std::vector<double> tx_trace;
    };

    // Iterative digital precoder optimization. n_rf only enters P_total.
    DigitalSolution eehp_a(const ChannelRealization &ch, int n_rf, const SystemParams &p, const CMatrix &init);
    DigitalSolution eehp_a(const ChannelRealization &ch, int n_rf, const SystemParams &p);

    struct FactorizationResult
    {
        HybridPrecoder hybrid;
        std::vector<int> selected_columns;
        std::vector<double> residual_trace; // ||B_opt - B_RF B_BB,temp||_F after each selection
        double residual = 0.0;              // last entry, before power normalization
        bool rank_deficient = false;        // pseudo-inverse fallback was used
    };

    // Greedy selection of n_rf steering columns plus least-squares baseband,
    // rescaled so that ||B_RF B_BB||_F = ||B_opt||_F.
    FactorizationResult eehp_b(const CMatrix &b_opt, const CMatrix &U, int n_rf);

    struct NrfRange
    {
        int first = 1;
        int last = 1;
        int stride = 1;
    };

    struct NrfEvaluation
    {
        int n_rf = 0;
        EEReport hybrid_report;
        EEReport digital_report;
    };

    struct EEHPSolution
    {
        int n_rf_opt = 0;
        HybridPrecoder hybrid;
        DigitalPrecoder digital_upper;
        EEReport report;       // hybrid precoder at n_rf_opt
        EEReport upper_report; // digital precoder at n_rf_opt
        std::vector<NrfEvaluation> scan;
        std::vector<std::string> skipped; // n_rf values that failed, with reason
        bool n_rf_capped = false;         // requested range exceeded N_ray
    };

    // K .. min(N_Tx, N_ray), stride 1.
    NrfRange default_nrf_range(const ChannelRealization &ch);

    // RF chain count search: eehp_a then eehp_b for every n_rf in range,
    // argmax of the hybrid EE with ties broken toward fewer chains.
    EEHPSolution eehp(const ChannelRealization &ch, const SystemParams &p, std::optional<NrfRange> range = {});

    // Digital upper-bound curve: eehp_a's report at n_rf.
    EEReport eedp_evaluate(const ChannelRealization &ch, int n_rf, const SystemParams &p);
}

#endif
