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


#include "eehp/zf_planning.hpp"

#include <cmath>

namespace eehp
{
    CMatrix zf_precoder(const CMatrix &G, double p_out)
    {
        if (G.rows() < 1 || G.rows() > G.cols())
            throw InvalidInput("zf_precoder: need 1 <= K <= M");
        if (p_out < 0.0)
            throw InvalidInput("zf_precoder: P_out must be >= 0");
        const Eigen::Index K = G.rows();
        const CMatrix gram = G * G.adjoint();
        Eigen::PartialPivLU<CMatrix> lu(gram);
        if (!(lu.rcond() > 1e-12))
            throw NumericalError("zf_precoder: G G^H is singular");
        CMatrix B = G.adjoint() * lu.inverse();
        const double per_ue = std::sqrt(p_out / static_cast<double>(K));
        for (Eigen::Index k = 0; k < K; ++k)
            B.col(k) *= per_ue / B.col(k).norm();
        return B;
    }

    CMatrix zf_baseband(const CMatrix &H_eq, double p_out)
    {
        if (H_eq.rows() != H_eq.cols())
            throw DimensionMismatch("zf_baseband: H_eq must be K x K");
        return zf_precoder(H_eq, p_out);
    }

    RVector zf_rate(const CMatrix &G, double p_out, double noise_power)
    {
        if (G.rows() < 1 || G.rows() > G.cols())
            throw InvalidInput("zf_rate: need 1 <= K <= M");
        const Eigen::Index K = G.rows();
        Eigen::PartialPivLU<CMatrix> lu(G * G.adjoint());
        if (!(lu.rcond() > 1e-12))
            throw NumericalError("zf_rate: G G^H is singular");
        const CMatrix inv = lu.inverse();
        RVector r(K);
        for (Eigen::Index k = 0; k < K; ++k)
            r(k) = std::log2(1.0 + p_out / (static_cast<double>(K) * noise_power * inv(k, k).real()));
        return r;
    }

    EEReport zf_baseline(const CMatrix &H, double p_out, const SystemParams &p)
    {
        const CMatrix B = zf_precoder(H, p_out);
        return evaluate_digital(H, B, static_cast<int>(H.cols()), p);
    }

    void PlanningParams::validate() const
    {
        auto require = [](bool ok, const char *what)
        {
            if (!ok)
                throw InvalidInput(std::string("PlanningParams: ") + what);
        };
        require(p_out_w > 0.0, "p_out_w must be > 0");
        require(p_rf_w >= 0.0, "p_rf_w must be >= 0");
        require(p_bb_w >= 0.0, "p_bb_w must be >= 0");
        require(p_c_prime_w >= 0.0, "p_c_prime_w must be >= 0");
        require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        require(p_rf_w + p_bb_w > 0.0, "p_rf_w + p_bb_w must be > 0");
        require(n_tx >= 1, "n_tx must be >= 1");
        require(k_ues >= 1, "k_ues must be >= 1");
    }

    PlanningParams PlanningParams::from(const SystemParams &p)
    {
        PlanningParams pp;
        pp.p_out_w = p.p_max_w;
        pp.p_rf_w = p.p_rf_w;
        pp.p_bb_w = p.p_bb_w;
        pp.p_c_prime_w = p.p_c_prime_w;
        pp.alpha = p.alpha;
        pp.n_tx = p.n_tx;
        pp.k_ues = p.k_ues;
        pp.ee_variant = p.ee_variant;
        return pp;
    }

    double antenna_factor(int n_tx, EeVariant variant)
    {
        const double n = static_cast<double>(n_tx);
        const double lead = variant == EeVariant::kPaperLiteral ? kPi * kPi : kPi;
        return (n * lead - kPi + 4.0) / 4.0;
    }

    GFunctionCoeffs GFunctionCoeffs::from(const PlanningParams &pp)
    {
        GFunctionCoeffs g;
        g.a = pp.p_out_w * antenna_factor(pp.n_tx, pp.ee_variant);
        g.b = pp.p_out_w / pp.alpha + pp.p_c_prime_w;
        g.c = pp.p_rf_w + pp.p_bb_w;
        g.z = 1.0 / static_cast<double>(pp.k_ues);
        return g;
    }

    double ee_upper_bound(const PlanningParams &pp)
    {
        pp.validate();
        const double K = static_cast<double>(pp.k_ues);
        const double a = pp.p_out_w * antenna_factor(pp.n_tx, pp.ee_variant);
        const double den = pp.p_out_w / pp.alpha + K * (pp.p_rf_w + pp.p_bb_w) + pp.p_c_prime_w;
        return K * std::log2(1.0 + a / K) / den;
    }

    double ee_upper_bound_bits_per_joule(const PlanningParams &pp, double bandwidth_hz)
    {
        return bandwidth_hz * ee_upper_bound(pp);
    }

    double g_function(double k, int n_tx, const PlanningParams &pp)
    {
        if (!(k > 0.0))
            throw InvalidInput("g_function: K must be > 0");
        PlanningParams q = pp;
        q.n_tx = n_tx;
        const GFunctionCoeffs g = GFunctionCoeffs::from(q);
        const double ratio = g.a / k;
        return g.a * g.c / (g.b * kLn2) + ratio / kLn2 - (1.0 + ratio) * std::log2(1.0 + ratio);
    }

    double f_za(double z, double a, const PlanningParams &pp)
    {
        const double b = pp.p_out_w / pp.alpha + pp.p_c_prime_w;
        const double c = pp.p_rf_w + pp.p_bb_w;
        const double az = a * z;
        return a * c / (b * kLn2) + az / kLn2 - (1.0 + az) * std::log2(1.0 + az);
    }

    double df_dz(double z, double a)
    {
        return -a * std::log2(1.0 + a * z);
    }

    std::optional<int> cnas(const PlanningParams &pp)
    {
        pp.validate();
        auto G = [&](int n) { return g_function(1.0, n, pp); };
        const double g100 = G(100);
        if (g100 < 0.0)
            return std::nullopt;
        if (g100 == 0.0)
            return 100;

        int low = 100;
        long long high = 1000;
        while (G(static_cast<int>(high)) > 0.0)
        {
            low = static_cast<int>(high);
            high *= 2;
            if (high > (1LL << 30))
                throw NumericalError("cnas: no sign change of G(1, N) below 2^30 antennas");
        }
        // G(1, low) > 0 >= G(1, high)
        int hi = static_cast<int>(high);
        while (hi - low > 1)
        {
            const int mid = low + (hi - low) / 2;
            if (G(mid) > 0.0)
                low = mid;
            else
                hi = mid;
        }
        return hi;
    }

    UenoResult ueno(int n_tx, const PlanningParams &pp)
    {
        pp.validate();
        if (n_tx < 1)
            throw InvalidInput("ueno: n_tx must be >= 1");
        auto G = [&](double k) { return g_function(k, n_tx, pp); };

        UenoResult out;
        if (G(1.0) >= 0.0)
        {
            out.single_ue = true;
            return out;
        }

        // G increases with K: G(low) < 0 <= G(high).
        double low = 1.0;
        double high = 40.0;
        while (G(high) < 0.0)
        {
            low = high;
            high *= 2.0;
            if (high > 1e12)
                throw NumericalError("ueno: no sign change of G(K, N) below 1e12 UEs");
        }
        while (high - low > 1e-10 * std::max(1.0, low))
        {
            const double mid = 0.5 * (low + high);
            if (G(mid) < 0.0)
                low = mid;
            else
                high = mid;
        }
        out.root = 0.5 * (low + high);

        // Closest integer n: G(n - 1/2) < 0 <= G(n + 1/2). The correction
        // loops only move when the root sits within bisection precision of a
        // half-integer.
        long long n = static_cast<long long>(std::ceil(out.root - 0.5));
        n = std::max(n, 1LL);
        while (G(static_cast<double>(n) + 0.5) < 0.0)
            ++n;
        while (n > 1 && G(static_cast<double>(n) - 0.5) >= 0.0)
            --n;
        out.k_opt = static_cast<int>(n);
        return out;
    }
}
