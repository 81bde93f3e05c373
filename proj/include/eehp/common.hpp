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

#ifndef EEHP_COMMON_HPP
#define EEHP_COMMON_HPP

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eehp
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;

    // All randomness is drawn from an explicitly passed engine
    using Rng = std::mt19937_64;

    // Bad arguments, violated preconditions, infeasible starting points
    class InvalidInput : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class DimensionMismatch : public InvalidInput
    {
    public:
        using InvalidInput::InvalidInput;
    };

    // Singular systems that cannot be recovered by regularization
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double kPi = 3.14159265358979323846;
    inline constexpr double kLn2 = 0.69314718055994530942;

    inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0 - 3.0); }

    // Circularly-symmetric complex Gaussian with unit variance
    inline cdouble draw_cn01(Rng &rng)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }
}

#endif
