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

#include "eehp/eehp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eehp
{
    double PrecodingProblem::tx_power(const CMatrix &B) const
    {
        if (power_metric.size() == 0)
            return B.squaredNorm();
        return (B.adjoint() * power_metric * B).trace().real();
    }

    PrecodingProblem PrecodingProblem::digital(const CMatrix &H, int n_rf)
    {
        return {H, CMatrix(), n_rf};
    }

    namespace
    {
        void check_shapes(const PrecodingProblem &problem, const CMatrix &B)
        {
            if (B.rows() != problem.dim() || B.cols() != problem.k_ues())
                throw DimensionMismatch("precoder must be M x K for a K x M channel");
            if (problem.power_metric.size() != 0 &&
                (problem.power_metric.rows() != problem.dim() || problem.power_metric.cols() != problem.dim()))
                throw DimensionMismatch("power metric must be M x M");
        }

        // Everything the line search needs to score one candidate point.
        struct Context
        {
            const PrecodingProblem &problem;
            const SystemParams &p;
            double noise;
            std::vector<bool> active; // rate constraints that have been satisfied once
            int updated = -1;         // UE being stepped; -1 joint step; -2 incumbent (unguarded)
        };

        bool guarded(const Context &c, Eigen::Index i)
        {
            if (!c.active[static_cast<size_t>(i)])
                return false;
            if (c.updated == -2)
                return false;
            return c.p.solver.rate_guard == RateGuard::kAllSatisfied || c.updated < 0 || c.updated == i;
        }

        struct PointValue
        {
            bool admissible = false;
            double ee = 0.0;
        };

        // A = G B, tx = sum_k b_k^H Q b_k before any fixed-total rescaling.
        PointValue assess(const CMatrix &A, double tx, const Context &c)
        {
            const auto &s = c.p.solver;
            double scale = 1.0;
            if (s.power_mode == PowerMode::kFixedTotal)
            {
                if (!(tx > 0.0))
                    return {};
                scale = c.p.p_max_w / tx;
                tx = c.p.p_max_w;
            }
            else if (tx > c.p.p_max_w)
            {
                // Candidates beyond the budget are projected back onto it.
                scale = c.p.p_max_w / tx;
                tx = c.p.p_max_w;
            }

            double sum_se = 0.0;
            for (Eigen::Index i = 0; i < A.rows(); ++i)
            {
                const double signal = std::norm(A(i, i)) * scale;
                const double interference = A.row(i).squaredNorm() * scale - signal;
                const double r = std::log2(1.0 + signal / (std::max(interference, 0.0) + c.noise));
                if (guarded(c, i) && r < c.p.gamma(static_cast<int>(i)) * (1.0 - s.feasibility_slack))
                    return {};
                sum_se += r;
            }
            const double total = total_power(tx, c.problem.n_rf, c.p);
            return {true, c.p.bandwidth_hz * sum_se / total};
        }

        CVector metric_times(const PrecodingProblem &problem, const CVector &v)
        {
            if (problem.power_metric.size() == 0)
                return v;
            return problem.power_metric * v;
        }

        // Grid search over mu in [0, 1] for b_k + mu d. mu = 0 is the
        // incumbent; a larger step wins only on strict improvement.
        double line_search(const CMatrix &A, const CMatrix &B, double tx, int k, const CVector &d, Context &c)
        {
            c.updated = k;
            const CVector e = c.problem.channel * d;
            const CVector b = B.col(k);
            const CVector qb = metric_times(c.problem, b);
            const CVector qd = metric_times(c.problem, d);
            const double q0 = b.dot(qb).real();
            const double q1 = 2.0 * b.dot(qd).real();
            const double q2 = d.dot(qd).real();
            const double tx_other = tx - q0;

            // The incumbent always competes, even if another UE's step has
            // pushed R_k below its target, so the trace cannot decrease.
            c.updated = -2;
            PointValue best = assess(A, tx, c);
            c.updated = k;
            double best_mu = 0.0;

            const double step = c.p.solver.mu_grid_step;
            const int n_steps = static_cast<int>(std::floor(1.0 / step + 1e-9));
            CMatrix trial = A;
            for (int i = 1; i <= n_steps; ++i)
            {
                const double mu = std::min(1.0, i * step);
                trial.col(k) = A.col(k) + mu * e;
                const double t = tx_other + q0 + mu * q1 + mu * mu * q2;
                const PointValue v = assess(trial, t, c);
                if (v.admissible && v.ee > best.ee)
                {
                    best = v;
                    best_mu = mu;
                }
            }
            c.updated = -1;
            return best_mu;
        }

        // Same scaling that assess() applied to the accepted candidate.
        void rescale_onto_budget(CMatrix &B, const PrecodingProblem &problem, const SystemParams &p)
        {
            const double tx = problem.tx_power(B);
            if (p.solver.power_mode == PowerMode::kFixedTotal)
            {
                if (!(tx > 0.0))
                    throw NumericalError("fixed-total rescaling of a zero precoder");
                B *= std::sqrt(p.p_max_w / tx);
            }
            else if (tx > p.p_max_w)
                B *= std::sqrt(p.p_max_w / tx);
        }

        void refresh_active(const CMatrix &A, Context &c)
        {
            const RVector se = [&]
            {
                RVector out(A.rows());
                for (Eigen::Index i = 0; i < A.rows(); ++i)
                {
                    const double signal = std::norm(A(i, i));
                    const double interference = A.row(i).squaredNorm() - signal;
                    out(i) = std::log2(1.0 + signal / (std::max(interference, 0.0) + c.noise));
                }
                return out;
            }();
            for (Eigen::Index i = 0; i < se.size(); ++i)
                if (se(i) >= c.p.gamma(static_cast<int>(i)) * (1.0 - c.p.solver.feasibility_slack))
                    c.active[static_cast<size_t>(i)] = true;
        }

        CVector direction(const PrecodingProblem &problem, const CMatrix &B, int k, const SystemParams &p)
        {
            const GradientTerms t = gradient_terms(problem, B, k, p);
            const CVector rhs = t.omega * B.col(k);
            return solve_hermitian(t.xi, rhs, p.solver.ridge_condition_limit) - B.col(k);
        }
    }

    GradientTerms gradient_terms(const PrecodingProblem &problem, const CMatrix &B, int k, const SystemParams &p)
    {
        check_shapes(problem, B);
        const int K = problem.k_ues();
        if (k < 0 || k >= K)
            throw InvalidInput("gradient_terms: UE index out of range");

        const CMatrix &G = problem.channel;
        const CMatrix A = G * B;
        const double noise = p.noise_power();

        GradientTerms t;
        t.delta.resize(K);
        t.se.resize(K);
        RVector signal(K);
        for (int i = 0; i < K; ++i)
        {
            signal(i) = std::norm(A(i, i));
            t.delta(i) = std::max(A.row(i).squaredNorm() - signal(i), 0.0) + noise;
            t.se(i) = std::log2(1.0 + signal(i) / t.delta(i));
        }
        const double tx = problem.tx_power(B);
        t.p_bar = total_power(tx, problem.n_rf, p) / p.bandwidth_hz;

        const CVector gk = G.row(k).adjoint();
        t.omega = (t.p_bar / (kLn2 * (t.delta(k) + signal(k)))) * (gk * gk.adjoint());

        const double sum_se = t.se.sum();
        const double id_coeff = sum_se / (p.alpha * p.bandwidth_hz);
        if (problem.power_metric.size() == 0)
            t.xi = id_coeff * CMatrix::Identity(problem.dim(), problem.dim());
        else
            t.xi = id_coeff * problem.power_metric;
        for (int i = 0; i < K; ++i)
        {
            if (i == k)
                continue;
            const double w = t.p_bar / kLn2 * signal(i) / (t.delta(i) * (t.delta(i) + signal(i)));
            const CVector gi = G.row(i).adjoint();
            t.xi.noalias() += w * (gi * gi.adjoint());
        }
        return t;
    }

    CVector ee_gradient(const GradientTerms &terms, const CMatrix &B, int k)
    {
        return (2.0 / (terms.p_bar * terms.p_bar)) * ((terms.omega - terms.xi) * B.col(k));
    }

    double objective(const PrecodingProblem &problem, const CMatrix &B, const SystemParams &p)
    {
        check_shapes(problem, B);
        const RVector se = se_digital(problem.channel, B, p.noise_power());
        return energy_efficiency(p.bandwidth_hz, se.sum(), total_power(problem.tx_power(B), problem.n_rf, p));
    }

    CVector solve_hermitian(const CMatrix &xi, const CVector &rhs, double cond_limit)
    {
        Eigen::LLT<CMatrix> llt(xi);
        if (llt.info() == Eigen::Success && llt.rcond() * cond_limit >= 1.0)
            return llt.solve(rhs);

        const Eigen::Index m = xi.rows();
        double ridge = 1e-10 * xi.trace().real() / static_cast<double>(m);
        if (!(ridge > 0.0))
            ridge = 1.0;
        const CMatrix reg = xi + ridge * CMatrix::Identity(m, m);
        Eigen::LLT<CMatrix> llt_reg(reg);
        if (llt_reg.info() == Eigen::Success)
            return llt_reg.solve(rhs);
        return reg.completeOrthogonalDecomposition().solve(rhs);
    }

    AscentResult maximize_ee(const PrecodingProblem &problem, const CMatrix &init, const SystemParams &p)
    {
        p.validate();
        check_shapes(problem, init);
        if (!init.allFinite())
            throw InvalidInput("maximize_ee: initial precoder has non-finite entries");
        if (problem.n_rf < 0)
            throw InvalidInput("maximize_ee: n_rf must be >= 0");

        CMatrix B = init;
        if (p.solver.power_mode == PowerMode::kFixedTotal)
        {
            if (!(problem.tx_power(B) > 0.0))
                throw InvalidInput("maximize_ee: fixed-total mode needs a nonzero initial precoder");
            rescale_onto_budget(B, problem, p);
        }
        else if (problem.tx_power(B) > p.p_max_w * (1.0 + p.solver.feasibility_slack))
            throw InvalidInput("maximize_ee: initial precoder exceeds the power budget");

        const int K = problem.k_ues();
        Context ctx{problem, p, p.noise_power(), std::vector<bool>(static_cast<size_t>(K), false)};
        CMatrix A = problem.channel * B;
        refresh_active(A, ctx);

        AscentResult out;
        auto record = [&]
        {
            const RVector se = se_digital(problem.channel, B, ctx.noise);
            const double tx = problem.tx_power(B);
            out.se_trace.push_back(se.sum());
            out.tx_trace.push_back(tx);
            out.report.ee_trace.push_back(
                energy_efficiency(p.bandwidth_hz, se.sum(), total_power(tx, problem.n_rf, p)));
        };
        record();

        int sweeps = 0;
        for (int n = 1; n <= p.solver.max_iters; ++n)
        {
            sweeps = n;
            if (p.solver.update_order == UpdateOrder::kGaussSeidel)
            {
                for (int k = 0; k < K; ++k)
                {
                    const CVector d = direction(problem, B, k, p);
                    if (!d.allFinite())
                        continue;
                    const double mu = line_search(A, B, problem.tx_power(B), k, d, ctx);
                    if (mu == 0.0)
                        continue;
                    B.col(k) += mu * d;
                    rescale_onto_budget(B, problem, p);
                    A = problem.channel * B;
                    refresh_active(A, ctx);
                }
            }
            else
            {
                const double tx0 = problem.tx_power(B);
                const PointValue base = assess(A, tx0, ctx);
                std::vector<CVector> dirs(static_cast<size_t>(K));
                std::vector<double> mus(static_cast<size_t>(K), 0.0);
                for (int k = 0; k < K; ++k)
                {
                    dirs[static_cast<size_t>(k)] = direction(problem, B, k, p);
                    if (dirs[static_cast<size_t>(k)].allFinite())
                        mus[static_cast<size_t>(k)] = line_search(A, B, tx0, k, dirs[static_cast<size_t>(k)], ctx);
                }
                CMatrix accepted = B;
                for (int halvings = 0; halvings < 40; ++halvings)
                {
                    CMatrix cand = B;
                    bool moved = false;
                    for (int k = 0; k < K; ++k)
                        if (mus[static_cast<size_t>(k)] > 0.0)
                        {
                            cand.col(k) += mus[static_cast<size_t>(k)] * dirs[static_cast<size_t>(k)];
                            moved = true;
                        }
                    if (!moved)
                        break;
                    const PointValue v = assess(problem.channel * cand, problem.tx_power(cand), ctx);
                    if (v.admissible && v.ee >= base.ee)
                    {
                        accepted = cand;
                        break;
                    }
                    for (auto &mu : mus)
                        mu *= 0.5;
                }
                B = accepted;
                rescale_onto_budget(B, problem, p);
                A = problem.channel * B;
                refresh_active(A, ctx);
            }

            record();
            const auto &tr = out.report.ee_trace;
            const double prev = tr[tr.size() - 2];
            const double cur = tr.back();
            if (std::abs(cur - prev) <= p.solver.tol_ee * std::max(std::abs(prev), 1e-300))
                break;
        }

        std::vector<double> trace = std::move(out.report.ee_trace);
        out.report = make_report(se_digital(problem.channel, B, ctx.noise), problem.tx_power(B), problem.n_rf, p);
        out.report.ee_trace = std::move(trace);
        out.report.iterations = sweeps;
        out.B = std::move(B);
        return out;
    }

    CMatrix matched_filter_init(const CMatrix &H, double p_total)
    {
        if (p_total < 0.0)
            throw InvalidInput("matched_filter_init: power must be >= 0");
        const Eigen::Index K = H.rows();
        CMatrix B = CMatrix::Zero(H.cols(), K);
        const double per_ue = std::sqrt(p_total / static_cast<double>(K));
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double nrm = H.row(k).norm();
            if (nrm > 0.0)
                B.col(k) = H.row(k).adjoint() * (per_ue / nrm);
        }
        return B;
    }

    DigitalSolution eehp_a(const ChannelRealization &ch, int n_rf, const SystemParams &p, const CMatrix &init)
    {
        if (ch.k_ues() > ch.n_tx())
            throw InvalidInput("eehp_a: K must not exceed N_Tx");
        if (n_rf < 0)
            throw InvalidInput("eehp_a: n_rf must be >= 0");
        AscentResult r = maximize_ee(PrecodingProblem::digital(ch.H, n_rf), init, p);
        return {DigitalPrecoder{std::move(r.B)}, std::move(r.report), std::move(r.se_trace), std::move(r.tx_trace)};
    }

    DigitalSolution eehp_a(const ChannelRealization &ch, int n_rf, const SystemParams &p)
    {
        return eehp_a(ch, n_rf, p, matched_filter_init(ch.H, p.p_max_w));
    }

    FactorizationResult eehp_b(const CMatrix &b_opt, const CMatrix &U, int n_rf)
    {
        if (b_opt.rows() != U.rows())
            throw DimensionMismatch("eehp_b: B_opt and U must have N_Tx rows");
        if (n_rf < 1 || n_rf > U.cols())
            throw InvalidInput("eehp_b: n_rf must lie in [1, N_ray]");

        const Eigen::Index n_tx = U.rows();
        const Eigen::Index n_ray = U.cols();
        FactorizationResult out;
        std::vector<bool> taken(static_cast<size_t>(n_ray), false);
        CMatrix rf(n_tx, 0);
        CMatrix bb_temp;
        CMatrix residual_dir = b_opt;

        for (int step = 0; step < n_rf; ++step)
        {
            const RVector score = (U.adjoint() * residual_dir).rowwise().squaredNorm();
            Eigen::Index pick = -1;
            for (Eigen::Index j = 0; j < n_ray; ++j)
                if (!taken[static_cast<size_t>(j)] && (pick < 0 || score(j) > score(pick)))
                    pick = j;
            taken[static_cast<size_t>(pick)] = true;
            out.selected_columns.push_back(static_cast<int>(pick));
            rf.conservativeResize(Eigen::NoChange, rf.cols() + 1);
            rf.col(rf.cols() - 1) = U.col(pick);

            const CMatrix gram = rf.adjoint() * rf;
            Eigen::LLT<CMatrix> llt(gram);
            if (llt.info() == Eigen::Success && llt.rcond() > 1e-12)
                bb_temp = llt.solve(rf.adjoint() * b_opt);
            else
            {
                out.rank_deficient = true;
                bb_temp = rf.completeOrthogonalDecomposition().solve(b_opt);
            }

            const CMatrix residual = b_opt - rf * bb_temp;
            const double r = residual.norm();
            out.residual_trace.push_back(r);
            if (r > 0.0)
                residual_dir = residual / r;
        }
        out.residual = out.residual_trace.back();

        const double achieved = (rf * bb_temp).norm();
        const double target = b_opt.norm();
        out.hybrid.rf = std::move(rf);
        out.hybrid.bb = achieved > 0.0 ? CMatrix(bb_temp * (target / achieved)) : bb_temp;
        return out;
    }

    NrfRange default_nrf_range(const ChannelRealization &ch)
    {
        return {ch.k_ues(), std::min(ch.n_tx(), ch.n_ray), 1};
    }

    EEHPSolution eehp(const ChannelRealization &ch, const SystemParams &p, std::optional<NrfRange> range)
    {
        EEHPSolution sol;
        NrfRange r = range.value_or(default_nrf_range(ch));
        if (r.stride < 1)
            throw InvalidInput("eehp: n_rf stride must be >= 1");
        const int cap = std::min(ch.n_tx(), ch.n_ray);
        if (r.last > cap)
        {
            r.last = cap;
            sol.n_rf_capped = true;
        }
        if (r.first < ch.k_ues() || r.first > r.last)
            throw InvalidInput("eehp: n_rf range must satisfy K <= first <= min(N_Tx, N_ray)");

        double best = -std::numeric_limits<double>::infinity();
        for (int n = r.first; n <= r.last; n += r.stride)
        {
            try
            {
                DigitalSolution a = eehp_a(ch, n, p);
                FactorizationResult f = eehp_b(a.precoder.B, ch.U, n);
                EEReport rep = evaluate_hybrid(ch.H, f.hybrid, p);
                rep.iterations = a.report.iterations;
                rep.ee_trace = a.report.ee_trace;
                if (!std::isfinite(rep.ee))
                    throw NumericalError("non-finite hybrid EE");
                sol.scan.push_back({n, rep, a.report});
                if (rep.ee > best)
                {
                    best = rep.ee;
                    sol.n_rf_opt = n;
                    sol.hybrid = std::move(f.hybrid);
                    sol.digital_upper = std::move(a.precoder);
                    sol.report = rep;
                    sol.upper_report = a.report;
                }
            }
            catch (const std::exception &e)
            {
                sol.skipped.push_back("n_rf=" + std::to_string(n) + ": " + e.what());
            }
        }
        if (sol.scan.empty())
            throw NumericalError("eehp: every n_rf candidate failed");
        return sol;
    }

    EEReport eedp_evaluate(const ChannelRealization &ch, int n_rf, const SystemParams &p)
    {
        return eehp_a(ch, n_rf, p).report;
    }
}
