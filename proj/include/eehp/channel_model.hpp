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

#ifndef EEHP_CHANNEL_MODEL_HPP
#define EEHP_CHANNEL_MODEL_HPP

#include <span>
#include <vector>

#include "eehp/common.hpp"
#include "eehp/system_params.hpp"

namespace eehp
{
    // Uniform planar array with `rows` x `cols` elements.
    struct ArrayGeometry
    {
        int rows = 1;
        int cols = 1;
        double spacing_over_wavelength = 0.5;

        int size() const { return rows * cols; }
        void validate() const;

        // Most-square factorization rows * cols = n_tx with rows <= cols.
        static ArrayGeometry most_square(int n_tx, double spacing_over_wavelength = 0.5);
    };

    // One multipath direction at the BS array, radians.
    struct PathAngles
    {
        double azimuth = 0.0;
        double elevation = 0.0;
    };

    // One downlink channel draw.
    //  H     K x N_Tx, row k holds h_k^H
    //  U     N_Tx x N_ray steering matrix shared by all UEs
    //  beta  large-scale gain per UE (linear)
    struct ChannelRealization
    {
        CMatrix H;
        CMatrix U;
        RVector beta;
        ArrayGeometry geometry;
        int n_ray = 0;

        int k_ues() const { return static_cast<int>(H.rows()); }
        int n_tx() const { return static_cast<int>(H.cols()); }
    };

    // Array response for element (m, n) stored at index m * cols + n:
    //   exp(j 2 pi d/lambda (m sin(az) sin(el) + n cos(el))) / sqrt(N_Tx)
    CVector steering_vector(double azimuth, double elevation, const ArrayGeometry &geom);

    // beta = zeta / l^gamma with 10 log10(zeta) ~ N(0, shadow_sigma_db^2).
    double sample_large_scale(double distance_m, double pathloss_exp, double shadow_sigma_db, Rng &rng);

    // Distances i.i.d. uniform on [min_distance_m, cell_radius_m].
    std::vector<double> sample_ue_distances(int k_ues, double min_distance_m, double cell_radius_m, Rng &rng);

    // Deterministic channel assembly from explicit paths and gains (K x N_ray).
    ChannelRealization build_mmwave_channel(const ArrayGeometry &geom, std::span<const PathAngles> paths,
                                            const CMatrix &gains, const RVector &beta);

    // GBSM draw: N_ray angle pairs shared by all UEs, i.i.d. CN(0,1) gains per (UE, path).
    ChannelRealization sample_mmwave_channel(const SystemParams &params, const ArrayGeometry &geom,
                                             std::span<const double> ue_distances, Rng &rng);

    // Convenience: geometry and distances from params.
    ChannelRealization sample_mmwave_channel(const SystemParams &params, Rng &rng);

    // K x N_Tx matrix of i.i.d. CN(0,1) entries.
    CMatrix sample_rayleigh_channel(int k_ues, int n_tx, Rng &rng);
}

#endif
