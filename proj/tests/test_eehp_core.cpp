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


#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eehp/channel_model.hpp"
#include "eehp/eehp_core.hpp"
#include "eehp/sim_harness.hpp"
#include "oracles.hpp"

using namespace eehp;

namespace
{
    SystemParams desk(int n_tx, int k, int n_ray)
    {
        SystemParams p = SystemParams::desk_scale();
        p.n_tx = n_tx;
        p.k_ues = k;
        p.n_ray = n_ray;
        return p;
    }

    CMatrix random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng)
    {
        CMatrix A(r, c);
        for (Eigen::Index i = 0; i < A.size(); ++i)
            A.data()[i] = draw_cn01(rng);
        return A;
    }

    ChannelRealization channel(const SystemParams &p, std::uint64_t seed)
    {
        Rng rng(seed);
        return sample_mmwave_channel(p, rng);
    }

    void check_non_decreasing(const std::vector<double> &tr)
    {
        for (size_t n = 1; n < tr.size(); ++n)
            CHECK(tr[n] >= tr[n - 1] - 1e-9 * std::abs(tr[n - 1]));
    }
}

TEST_CASE("gradient matches finite differences")
{
    const SystemParams p = desk(8, 2, 6);
    for (std::uint64_t s = 0; s < 5; ++s)
    {
        const ChannelRealization ch = channel(p, 100 + s);
        Rng rng(200 + s);
        CMatrix B = random_matrix(8, 2, rng);
        B *= std::sqrt(0.5 * p.p_max_w) / B.norm();
        const PrecodingProblem prob = PrecodingProblem::digital(ch.H, 2);
        for (int k = 0; k < 2; ++k)
        {
            const CVector an = ee_gradient(gradient_terms(prob, B, k, p), B, k);
            const CVector fd = oracle::fd_gradient(
                [&](const CMatrix &Y) { return oracle::ee(ch.H, Y, CMatrix(), 2, p); }, B, k,
                1e-5 * B.col(k).norm());
            CHECK((an - fd).norm() < 1e-4 * fd.norm());
        }
    }
}

TEST_CASE("gradient terms: single UE structure")
{
    SystemParams p = desk(6, 1, 4);
    p.unit_noise = true;
    Rng rng(1);
    const CMatrix H = random_matrix(1, 6, rng);
    const CMatrix B = random_matrix(6, 1, rng) * 0.3;
    const GradientTerms t = gradient_terms(PrecodingProblem::digital(H, 1), B, 0, p);
    const double r = oracle::per_ue_se(H, B, 1.0)[0];
    const CMatrix expected = r / (p.alpha * p.bandwidth_hz) * CMatrix::Identity(6, 6);
    CHECK((t.xi - expected).norm() < 1e-12 * expected.norm());
    CHECK(t.delta(0) == doctest::Approx(1.0));
    const double total = B.squaredNorm() / p.alpha + p.p_rf_w + p.p_c_w;
    CHECK(t.p_bar == doctest::Approx(total / p.bandwidth_hz));
}

TEST_CASE("gradient terms: zero precoder points along the channel")
{
    SystemParams p = desk(6, 2, 4);
    p.unit_noise = true;
    Rng rng(2);
    const CMatrix H = random_matrix(2, 6, rng);
    const CMatrix B = CMatrix::Zero(6, 2);
    const PrecodingProblem prob = PrecodingProblem::digital(H, 2);
    for (int k = 0; k < 2; ++k)
    {
        const GradientTerms t = gradient_terms(prob, B, k, p);
        CHECK(t.xi.norm() == 0.0);
        const CMatrix expected = t.p_bar / kLn2 * (H.row(k).adjoint() * H.row(k));
        CHECK((t.omega - expected).norm() < 1e-12 * expected.norm());
        for (int i = 0; i < 2; ++i)
            CHECK(t.delta(i) >= 1.0);
    }
    CHECK_THROWS_AS(gradient_terms(prob, B, 2, p), InvalidInput);
}

TEST_CASE("hermitian solve falls back on singular systems")
{
    CMatrix xi = CMatrix::Zero(3, 3);
    xi(0, 0) = 1.0;
    CVector rhs(3);
    rhs << 1.0, 0.0, 0.0;
    const CVector x = solve_hermitian(xi, rhs, 1e12);
    CHECK(x.allFinite());
    CHECK(std::abs(x(0) - cdouble(1.0, 0.0)) < 1e-6);

    Rng rng(3);
    const CMatrix A = random_matrix(4, 4, rng);
    const CMatrix spd = A * A.adjoint() + CMatrix::Identity(4, 4);
    const CVector b = random_matrix(4, 1, rng);
    CHECK((spd * solve_hermitian(spd, b, 1e12) - b).norm() < 1e-12 * b.norm());
}

TEST_CASE("ascent: EE trace is non-decreasing and iterates respect the budget")
{
    for (auto order : {UpdateOrder::kGaussSeidel, UpdateOrder::kJacobi})
        for (auto mode : {PowerMode::kBudget, PowerMode::kFixedTotal})
            for (std::uint64_t s = 0; s < 8; ++s)
            {
                SystemParams p = desk(16, 4, 8);
                p.solver.update_order = order;
                p.solver.power_mode = mode;
                const ChannelRealization ch = channel(p, 300 + s);
                const DigitalSolution sol = eehp_a(ch, p.k_ues, p);
                REQUIRE(sol.report.ee_trace.size() == sol.tx_trace.size());
                CHECK(sol.report.ee_trace.size() == static_cast<size_t>(sol.report.iterations) + 1);
                check_non_decreasing(sol.report.ee_trace);
                for (double tx : sol.tx_trace)
                {
                    CHECK(tx <= p.p_max_w * (1.0 + 1e-9));
                    if (mode == PowerMode::kFixedTotal)
                        CHECK(tx == doctest::Approx(p.p_max_w).epsilon(1e-9));
                }
                CHECK(sol.report.ee == doctest::Approx(sol.report.ee_trace.back()).epsilon(1e-12));
                CHECK(sol.report.ee >= sol.report.ee_trace.front());
                if (sol.report.rate_feasible)
                    for (int k = 0; k < p.k_ues; ++k)
                        CHECK(sol.report.per_ue_se(k) >= p.gamma(k) - 1e-9);
            }
}

TEST_CASE("ascent: stricter rate guard is also monotone")
{
    SystemParams p = desk(16, 4, 8);
    p.solver.rate_guard = RateGuard::kAllSatisfied;
    for (std::uint64_t s = 0; s < 5; ++s)
        check_non_decreasing(eehp_a(channel(p, 400 + s), p.k_ues, p).report.ee_trace);
}

TEST_CASE("ascent: zero-gradient start is returned unchanged")
{
    const SystemParams p = desk(8, 2, 4);
    const ChannelRealization ch = channel(p, 5);
    const DigitalSolution sol = eehp_a(ch, 2, p, CMatrix::Zero(8, 2));
    CHECK(sol.report.iterations == 1);
    CHECK(sol.precoder.B.norm() == 0.0);
}

TEST_CASE("ascent: single UE beats every scaled matched filter on a grid")
{
    SystemParams p = desk(4, 1, 3);
    p.unit_noise = true;
    p.gamma_min_se = 0.0;
    Rng rng(6);
    ChannelRealization ch;
    ch.H = random_matrix(1, 4, rng);
    const DigitalSolution sol = eehp_a(ch, 1, p);
    const CMatrix dir = ch.H.adjoint() / ch.H.norm();
    double best = 0.0;
    for (int i = 1; i <= 1000; ++i)
    {
        const double pw = p.p_max_w * i / 1000.0;
        best = std::max(best, oracle::ee(ch.H, dir * std::sqrt(pw), CMatrix(), 1, p));
    }
    CHECK(sol.report.ee >= oracle::ee(ch.H, dir * std::sqrt(p.p_max_w), CMatrix(), 1, p));
    CHECK(sol.report.ee >= best * (1.0 - 1e-4));
}

TEST_CASE("ascent: invalid starting points")
{
    SystemParams p = desk(8, 2, 4);
    const ChannelRealization ch = channel(p, 7);
    CMatrix big = matched_filter_init(ch.H, 2.0 * p.p_max_w);
    CHECK_THROWS_AS(eehp_a(ch, 2, p, big), InvalidInput);
    CHECK_THROWS_AS(eehp_a(ch, 2, p, CMatrix::Zero(8, 3)), DimensionMismatch);
    CMatrix nan = matched_filter_init(ch.H, p.p_max_w);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(eehp_a(ch, 2, p, nan), InvalidInput);
    p.solver.power_mode = PowerMode::kFixedTotal;
    CHECK_THROWS_AS(eehp_a(ch, 2, p, CMatrix::Zero(8, 2)), InvalidInput);
}

TEST_CASE("matched filter start splits power evenly")
{
    Rng rng(8);
    const CMatrix H = random_matrix(3, 10, rng);
    const CMatrix B = matched_filter_init(H, 1.5);
    for (int k = 0; k < 3; ++k)
    {
        CHECK(B.col(k).squaredNorm() == doctest::Approx(0.5));
        CHECK(std::abs(std::abs((H.row(k) * B.col(k))(0)) - H.row(k).norm() * std::sqrt(0.5)) < 1e-12);
    }
}

TEST_CASE("factorization: a single steering column is recovered exactly")
{
    const SystemParams p = desk(16, 2, 8);
    const ChannelRealization ch = channel(p, 9);
    const CMatrix b_opt = cdouble(0.3, -1.2) * ch.U.col(3);
    const FactorizationResult f = eehp_b(b_opt, ch.U, 1);
    REQUIRE(f.selected_columns.size() == 1);
    int exhaustive = 0;
    double best = -1.0;
    for (int j = 0; j < ch.U.cols(); ++j)
    {
        const double score = std::norm((ch.U.col(j).adjoint() * b_opt)(0));
        if (score > best)
            best = score, exhaustive = j;
    }
    CHECK(f.selected_columns[0] == exhaustive);
    CHECK(f.selected_columns[0] == 3);
    CHECK((f.hybrid.combined() - b_opt).norm() < 1e-12);
}

TEST_CASE("factorization: full span, residual and normalization contracts")
{
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const SystemParams p = desk(16, 3, 8);
        const ChannelRealization ch = channel(p, 500 + s);
        Rng rng(600 + s);
        const CMatrix spanned = ch.U * random_matrix(8, 3, rng);
        const FactorizationResult full = eehp_b(spanned, ch.U, 8);
        CHECK(full.residual < 1e-8 * spanned.norm());

        const CMatrix b_opt = eehp_a(ch, 4, p).precoder.B;
        for (int n_rf = 1; n_rf <= 8; ++n_rf)
        {
            const FactorizationResult f = eehp_b(b_opt, ch.U, n_rf);
            CHECK(f.hybrid.n_rf() == n_rf);
            CHECK(f.hybrid.combined().norm() == doctest::Approx(b_opt.norm()).epsilon(1e-9));
            CHECK(f.hybrid.modulus_error() < 1e-12);
            for (size_t i = 1; i < f.residual_trace.size(); ++i)
                CHECK(f.residual_trace[i] <= f.residual_trace[i - 1] * (1.0 + 1e-12));
            std::vector<int> cols = f.selected_columns;
            std::sort(cols.begin(), cols.end());
            CHECK(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
        }
    }
}

TEST_CASE("factorization: argument validation and rank deficiency")
{
    const SystemParams p = desk(8, 2, 4);
    const ChannelRealization ch = channel(p, 10);
    const CMatrix b = CMatrix::Ones(8, 2);
    CHECK_THROWS_AS(eehp_b(b, ch.U, 0), InvalidInput);
    CHECK_THROWS_AS(eehp_b(b, ch.U, 5), InvalidInput);
    CHECK_THROWS_AS(eehp_b(CMatrix::Ones(7, 2), ch.U, 2), DimensionMismatch);

    CMatrix dup(8, 2);
    dup.col(0) = ch.U.col(0);
    dup.col(1) = ch.U.col(0);
    const FactorizationResult f = eehp_b(ch.U.col(0) * 2.0, dup, 2);
    CHECK(f.rank_deficient);
    CHECK(f.hybrid.combined().allFinite());
}

TEST_CASE("RF chain search: argmax contract and bound ordering")
{
    for (std::uint64_t s = 0; s < 6; ++s)
    {
        const SystemParams p = desk(16, 2, 8);
        const ChannelRealization ch = channel(p, 700 + s);
        const EEHPSolution sol = eehp::eehp(ch, p);
        REQUIRE(sol.scan.size() == 7);
        double best = 0.0;
        int arg = 0;
        for (const auto &e : sol.scan)
            if (e.hybrid_report.ee > best)
                best = e.hybrid_report.ee, arg = e.n_rf;
        CHECK(sol.report.ee == best);
        CHECK(sol.n_rf_opt == arg);
        CHECK(sol.report.n_rf == sol.n_rf_opt);
        CHECK(sol.report.ee <= sol.upper_report.ee * (1.0 + 1e-9));
        CHECK_FALSE(sol.n_rf_capped);
        CHECK(sol.skipped.empty());

        const EEHPSolution wide = eehp::eehp(ch, p, NrfRange{2, 8, 1});
        CHECK(wide.n_rf_opt == sol.n_rf_opt);
        CHECK(wide.report.ee == sol.report.ee);
    }
}

TEST_CASE("RF chain search: single-value range equals the direct pipeline")
{
    const SystemParams p = desk(16, 3, 8);
    const ChannelRealization ch = channel(p, 800);
    const EEHPSolution sol = eehp::eehp(ch, p, NrfRange{3, 3, 1});
    const DigitalSolution a = eehp_a(ch, 3, p);
    const FactorizationResult f = eehp_b(a.precoder.B, ch.U, 3);
    const EEReport direct = evaluate_hybrid(ch.H, f.hybrid, p);
    CHECK(sol.n_rf_opt == 3);
    CHECK(sol.report.ee == direct.ee);
    CHECK(sol.hybrid.combined() == f.hybrid.combined());
}

TEST_CASE("RF chain search: range handling")
{
    const SystemParams p = desk(16, 2, 4);
    const ChannelRealization ch = channel(p, 900);
    const EEHPSolution capped = eehp::eehp(ch, p, NrfRange{2, 12, 1});
    CHECK(capped.n_rf_capped);
    CHECK(capped.scan.back().n_rf == 4);
    const EEHPSolution strided = eehp::eehp(ch, p, NrfRange{2, 4, 2});
    REQUIRE(strided.scan.size() == 2);
    CHECK(strided.scan[1].n_rf == 4);
    CHECK_THROWS_AS(eehp::eehp(ch, p, NrfRange{1, 4, 1}), InvalidInput);
    CHECK_THROWS_AS(eehp::eehp(ch, p, NrfRange{2, 4, 0}), InvalidInput);
}

TEST_CASE("digital upper bound equals the digital ascent report")
{
    const SystemParams p = desk(16, 4, 8);
    const ChannelRealization ch = channel(p, 1000);
    const EEReport a = eedp_evaluate(ch, 6, p);
    const EEReport b = eehp_a(ch, 6, p).report;
    CHECK(a.ee == b.ee);
    CHECK(a.ee_trace == b.ee_trace);
    CHECK(a.n_rf == 6);
    CHECK(eehp::eehp(ch, p, NrfRange{6, 6, 1}).report.ee <= a.ee * (1.0 + 1e-9));
}
