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


#include "eehp/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "eehp/channel_model.hpp"
#include "eehp/eehp_core.hpp"
#include "eehp/eehp_mrfc.hpp"
#include "eehp/sim_harness.hpp"
#include "eehp/zf_planning.hpp"

namespace eehp
{
    namespace
    {
        bool non_decreasing(const std::vector<double> &trace)
        {
            for (size_t i = 1; i < trace.size(); ++i)
                if (trace[i] < trace[i - 1] * (1.0 - 1e-9))
                    return false;
            return true;
        }

        // Central differences of eta along Re and Im of every entry of b_k.
        double gradient_error(const PrecodingProblem &problem, const CMatrix &B, int k, const SystemParams &p)
        {
            const CVector g = ee_gradient(gradient_terms(problem, B, k, p), B, k);
            const double h = 1e-6 * std::max(1e-12, B.col(k).norm());
            double err = 0.0;
            for (Eigen::Index m = 0; m < B.rows(); ++m)
                for (const cdouble dir : {cdouble(1, 0), cdouble(0, 1)})
                {
                    CMatrix plus = B, minus = B;
                    plus(m, k) += h * dir;
                    minus(m, k) -= h * dir;
                    const double fd = (objective(problem, plus, p) - objective(problem, minus, p)) / (2 * h);
                    const double an = dir.real() != 0.0 ? g(m).real() : g(m).imag();
                    err = std::max(err, std::abs(fd - an));
                }
            return err / std::max(g.norm(), 1e-300);
        }
    }

    int run_selftest(std::ostream &os)
    {
        int failures = 0;
        auto check = [&](const std::string &name, const std::function<bool()> &body)
        {
            bool ok = false;
            std::string detail;
            try
            {
                ok = body();
            }
            catch (const std::exception &e)
            {
                detail = std::string(" (") + e.what() + ")";
            }
            os << (ok ? "PASS " : "FAIL ") << name << detail << "\n";
            if (!ok)
                ++failures;
        };

        SystemParams p = SystemParams::desk_scale();
        Rng rng(20240601);
        const ChannelRealization ch = sample_mmwave_channel(p, rng);

        check("eehp_a trace non-decreasing", [&] { return non_decreasing(eehp_a(ch, p.k_ues, p).report.ee_trace); });
        check("eehp_mrfc trace non-decreasing", [&] { return non_decreasing(eehp_mrfc(ch, p).report.ee_trace); });
        check("digital gradient matches finite differences", [&]
              {
                  const CMatrix B = matched_filter_init(ch.H, p.p_max_w);
                  return gradient_error(PrecodingProblem::digital(ch.H, p.k_ues), B, 0, p) < 1e-4;
              });
        check("eehp_b preserves the Frobenius norm", [&]
              {
                  const DigitalSolution a = eehp_a(ch, p.k_ues, p);
                  const FactorizationResult f = eehp_b(a.precoder.B, ch.U, p.k_ues);
                  const double target = a.precoder.B.norm();
                  return std::abs(f.hybrid.combined().norm() - target) <= 1e-9 * target;
              });
        check("equivalent channel diagonal is real and non-negative", [&]
              {
                  const EquivalentChannel eq = equivalent_channel(ch.H);
                  for (Eigen::Index k = 0; k < eq.H_eq.rows(); ++k)
                      if (eq.H_eq(k, k).imag() != 0.0 || eq.H_eq(k, k).real() < 0.0)
                          return false;
                  return true;
              });
        check("ueno equals the integer scan", [&]
              {
                  PlanningParams pp = PlanningParams::from(SystemParams{});
                  const int n_tx = 100;
                  const int k_opt = ueno(n_tx, pp).k_opt;
                  return g_function(k_opt - 0.5, n_tx, pp) < 0.0 && g_function(k_opt + 0.5, n_tx, pp) >= 0.0;
              });
        check("sweep output is deterministic", [&]
              {
                  SweepConfig cfg = parse_config(R"({"sweep_kind":"ues","sweep_values":[2,3],"trials":2,
                      "algorithms":["eehp_mrfc","zf"],"system":{"n_tx":8,"n_ray":6}})");
                  return format_csv(run_sweep(cfg).rows) == format_csv(run_sweep(cfg).rows);
              });
        return failures;
    }
}
