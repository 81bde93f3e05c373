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


// Independent reference implementations used by the unit and acceptance
// tests. They use explicit loops and brute-force scans and share no code
// paths with the library beyond the PlanningParams / SystemParams structs.

#ifndef EEHP_TESTS_ORACLES_HPP
#define EEHP_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "eehp/eehp_core.hpp"
#include "eehp/zf_planning.hpp"

namespace oracle
{
    using eehp::CMatrix;
    using eehp::cdouble;

    inline std::vector<double> per_ue_se(const CMatrix &G, const CMatrix &B, double noise)
    {
        const long K = G.rows(), M = G.cols();
        std::vector<double> se(static_cast<size_t>(K));
        for (long k = 0; k < K; ++k)
        {
            double signal = 0.0, interference = 0.0;
            for (long j = 0; j < K; ++j)
            {
                cdouble acc = 0.0;
                for (long m = 0; m < M; ++m)
                    acc += G(k, m) * B(m, j);
                (j == k ? signal : interference) += std::norm(acc);
            }
            se[static_cast<size_t>(k)] = std::log(1.0 + signal / (interference + noise)) / std::log(2.0);
        }
        return se;
    }

    // sum_k b_k^H Q b_k with Q empty meaning identity.
    inline double radiated(const CMatrix &B, const CMatrix &Q)
    {
        double s = 0.0;
        for (long j = 0; j < B.cols(); ++j)
            for (long m = 0; m < B.rows(); ++m)
            {
                if (Q.size() == 0)
                {
                    s += std::norm(B(m, j));
                    continue;
                }
                for (long n = 0; n < B.rows(); ++n)
                    s += (std::conj(B(m, j)) * Q(m, n) * B(n, j)).real();
            }
        return s;
    }

    inline double ee(const CMatrix &G, const CMatrix &B, const CMatrix &Q, int n_rf, const eehp::SystemParams &p)
    {
        double sum = 0.0;
        for (double r : per_ue_se(G, B, p.noise_power()))
            sum += r;
        const double total = radiated(B, Q) / p.alpha + n_rf * p.p_rf_w + p.p_c_w;
        return p.bandwidth_hz * sum / total;
    }

    // Central differences along Re and Im of each entry of column k,
    // packed as a complex vector d/dRe + j d/dIm.
    inline eehp::CVector fd_gradient(const std::function<double(const CMatrix &)> &f, const CMatrix &B, int k,
                                     double h)
    {
        eehp::CVector g(B.rows());
        for (long m = 0; m < B.rows(); ++m)
        {
            double parts[2];
            for (int part = 0; part < 2; ++part)
            {
                const cdouble dir = part == 0 ? cdouble(1, 0) : cdouble(0, 1);
                CMatrix plus = B, minus = B;
                plus(m, k) += h * dir;
                minus(m, k) -= h * dir;
                parts[part] = (f(plus) - f(minus)) / (2.0 * h);
            }
            g(m) = cdouble(parts[0], parts[1]);
        }
        return g;
    }

    // Gauss-Jordan inverse with partial pivoting.
    inline CMatrix inverse(CMatrix a)
    {
        const long n = a.rows();
        CMatrix inv = CMatrix::Identity(n, n);
        for (long c = 0; c < n; ++c)
        {
            long piv = c;
            for (long r = c + 1; r < n; ++r)
                if (std::abs(a(r, c)) > std::abs(a(piv, c)))
                    piv = r;
            a.row(c).swap(a.row(piv));
            inv.row(c).swap(inv.row(piv));
            const cdouble d = a(c, c);
            a.row(c) /= d;
            inv.row(c) /= d;
            for (long r = 0; r < n; ++r)
                if (r != c)
                {
                    const cdouble f = a(r, c);
                    a.row(r) -= f * a.row(c);
                    inv.row(r) -= f * inv.row(c);
                }
        }
        return inv;
    }

    // Closed-form planning quantities, written in K directly.
    inline double upper_bound(int K, int n_tx, const eehp::PlanningParams &pp)
    {
        const double lead = pp.ee_variant == eehp::EeVariant::kPaperLiteral ? M_PI * M_PI : M_PI;
        const double second_moment = (n_tx * lead - M_PI + 4.0) / 4.0;
        const double snr = pp.p_out_w / K * second_moment;
        return K * std::log2(1.0 + snr) / (pp.p_out_w / pp.alpha + K * (pp.p_rf_w + pp.p_bb_w) + pp.p_c_prime_w);
    }

    // Smallest integer N >= 100 with G(1, N) <= 0, or -1 when G(1, 100) < 0.
    inline int cnas_scan(const eehp::PlanningParams &pp, int limit = 5000000)
    {
        if (eehp::g_function(1.0, 100, pp) < 0.0)
            return -1;
        for (int n = 100; n <= limit; ++n)
            if (eehp::g_function(1.0, n, pp) <= 0.0)
                return n;
        return -2;
    }

    // Integer nearest the root of G(., n_tx): locate K_s with
    // G(K_s) < 0 <= G(K_s + 1), then compare the root with K_s + 1/2.
    inline int ueno_scan(int n_tx, const eehp::PlanningParams &pp, int limit = 10000000)
    {
        if (eehp::g_function(1.0, n_tx, pp) >= 0.0)
            return 1;
        for (int k = 1; k < limit; ++k)
            if (eehp::g_function(k + 1, n_tx, pp) >= 0.0)
                return eehp::g_function(k + 0.5, n_tx, pp) >= 0.0 ? k : k + 1;
        return -1;
    }

    inline int argmax_upper_bound(int n_tx, const eehp::PlanningParams &pp, int k_max)
    {
        int best = 1;
        for (int k = 2; k <= k_max; ++k)
            if (upper_bound(k, n_tx, pp) > upper_bound(best, n_tx, pp))
                best = k;
        return best;
    }
}

#endif
