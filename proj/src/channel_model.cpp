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

#include "eehp/channel_model.hpp"

#include <cmath>

namespace eehp
{
    void ArrayGeometry::validate() const
    {
        if (rows < 1 || cols < 1)
            throw InvalidInput("ArrayGeometry: rows and cols must be >= 1");
        if (!(spacing_over_wavelength > 0.0))
            throw InvalidInput("ArrayGeometry: spacing_over_wavelength must be > 0");
    }

    ArrayGeometry ArrayGeometry::most_square(int n_tx, double spacing_over_wavelength)
    {
        if (n_tx < 1)
            throw InvalidInput("ArrayGeometry: n_tx must be >= 1");
        int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_tx))));
        while (n_tx % rows != 0)
            --rows;
        return {rows, n_tx / rows, spacing_over_wavelength};
    }

    CVector steering_vector(double azimuth, double elevation, const ArrayGeometry &geom)
    {
        geom.validate();
        const int n_tx = geom.size();
        const double scale = 1.0 / std::sqrt(static_cast<double>(n_tx));
        const double k0 = 2.0 * kPi * geom.spacing_over_wavelength;
        const double row_phase = k0 * std::sin(azimuth) * std::sin(elevation);
        const double col_phase = k0 * std::cos(elevation);

        CVector u(n_tx);
        for (int m = 0; m < geom.rows; ++m)
            for (int n = 0; n < geom.cols; ++n)
                u(m * geom.cols + n) = std::polar(scale, m * row_phase + n * col_phase);
        return u;
    }

    double sample_large_scale(double distance_m, double pathloss_exp, double shadow_sigma_db, Rng &rng)
    {
        if (!(distance_m > 0.0))
            throw InvalidInput("sample_large_scale: distance must be > 0");
        double zeta = 1.0;
        if (shadow_sigma_db > 0.0)
        {
            std::normal_distribution<double> shadow(0.0, shadow_sigma_db);
            zeta = std::pow(10.0, shadow(rng) / 10.0);
        }
        return zeta / std::pow(distance_m, pathloss_exp);
    }

    std::vector<double> sample_ue_distances(int k_ues, double min_distance_m, double cell_radius_m, Rng &rng)
    {
        std::uniform_real_distribution<double> dist(min_distance_m, cell_radius_m);
        std::vector<double> out(static_cast<size_t>(k_ues));
        for (auto &d : out)
            d = dist(rng);
        return out;
    }

    ChannelRealization build_mmwave_channel(const ArrayGeometry &geom, std::span<const PathAngles> paths,
                                            const CMatrix &gains, const RVector &beta)
    {
        geom.validate();
        const int n_ray = static_cast<int>(paths.size());
        const int k_ues = static_cast<int>(beta.size());
        if (n_ray < 1 || k_ues < 1)
            throw InvalidInput("build_mmwave_channel: need at least one path and one UE");
        if (gains.rows() != k_ues || gains.cols() != n_ray)
            throw DimensionMismatch("build_mmwave_channel: gains must be K x N_ray");
        for (int k = 0; k < k_ues; ++k)
            if (!(beta(k) > 0.0))
                throw InvalidInput("build_mmwave_channel: beta must be positive");

        const int n_tx = geom.size();
        ChannelRealization ch;
        ch.geometry = geom;
        ch.n_ray = n_ray;
        ch.beta = beta;
        ch.U.resize(n_tx, n_ray);
        for (int i = 0; i < n_ray; ++i)
            ch.U.col(i) = steering_vector(paths[static_cast<size_t>(i)].azimuth,
                                          paths[static_cast<size_t>(i)].elevation, geom);

        // h_k = sqrt(N_Tx beta_k / N_ray) * U * rho_k; H stores h_k^H.
        ch.H.resize(k_ues, n_tx);
        for (int k = 0; k < k_ues; ++k)
        {
            const double amp = std::sqrt(n_tx * beta(k) / n_ray);
            const CVector h = amp * (ch.U * gains.row(k).transpose());
            ch.H.row(k) = h.adjoint();
        }
        return ch;
    }

    ChannelRealization sample_mmwave_channel(const SystemParams &params, const ArrayGeometry &geom,
                                             std::span<const double> ue_distances, Rng &rng)
    {
        const int k_ues = static_cast<int>(ue_distances.size());
        if (k_ues < 1 || params.n_ray < 1)
            throw InvalidInput("sample_mmwave_channel: K and N_ray must be >= 1");

        std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
        std::vector<PathAngles> paths(static_cast<size_t>(params.n_ray));
        for (auto &p : paths)
        {
            p.azimuth = angle(rng);
            p.elevation = angle(rng);
        }

        CMatrix gains(k_ues, params.n_ray);
        for (int k = 0; k < k_ues; ++k)
            for (int i = 0; i < params.n_ray; ++i)
                gains(k, i) = draw_cn01(rng);

        RVector beta(k_ues);
        for (int k = 0; k < k_ues; ++k)
            beta(k) = sample_large_scale(ue_distances[static_cast<size_t>(k)], params.pathloss_exp,
                                         params.shadow_sigma_db, rng);

        return build_mmwave_channel(geom, paths, gains, beta);
    }

    ChannelRealization sample_mmwave_channel(const SystemParams &params, Rng &rng)
    {
        const auto geom = ArrayGeometry::most_square(params.n_tx, params.spacing_over_wavelength);
        const auto distances = sample_ue_distances(params.k_ues, params.min_distance_m, params.cell_radius_m, rng);
        return sample_mmwave_channel(params, geom, distances, rng);
    }

    CMatrix sample_rayleigh_channel(int k_ues, int n_tx, Rng &rng)
    {
        if (k_ues < 1 || n_tx < 1)
            throw InvalidInput("sample_rayleigh_channel: K and N_Tx must be >= 1");
        CMatrix H(k_ues, n_tx);
        for (int k = 0; k < k_ues; ++k)
            for (int i = 0; i < n_tx; ++i)
                H(k, i) = draw_cn01(rng);
        return H;
    }
}
