// SPDX-License-Identifier: Apache-2.0
//
// ra-toolkit: rotatable-antenna channel modelling, optimization and estimation
// Copyright (C) 2026 The ra-toolkit authors
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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ra
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0; // m/s, exact
inline constexpr cdouble j_unit{0.0, 1.0};

inline Vec3 e1() { return Vec3::UnitX(); }
inline Vec3 e2() { return Vec3::UnitY(); }
inline Vec3 e3() { return Vec3::UnitZ(); }

// ------------------------------------------------------------------------
// Errors. Everything thrown by the library derives from ra::Error so callers
// (the CLI in particular) can separate library failures from std failures.
// ------------------------------------------------------------------------
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

#define RA_DEFINE_ERROR(Name)                 \
    class Name : public Error                 \
    {                                         \
      public:                                 \
        using Error::Error;                   \
    };

RA_DEFINE_ERROR(InvalidAngle)
RA_DEFINE_ERROR(InvalidDirection)
RA_DEFINE_ERROR(InvalidParameter)
RA_DEFINE_ERROR(ConfigurationError)
RA_DEFINE_ERROR(DegenerateGeometry)
RA_DEFINE_ERROR(InfeasibleError)
RA_DEFINE_ERROR(NumericError)
RA_DEFINE_ERROR(IllConditioned)
RA_DEFINE_ERROR(SubspaceRankError)
RA_DEFINE_ERROR(ValidationError)
RA_DEFINE_ERROR(IoError)

#undef RA_DEFINE_ERROR

// ------------------------------------------------------------------------
// Unit conversions (I/O boundary only; the library works in linear units)
// ------------------------------------------------------------------------
inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1000.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Reduce an angle into [0, 2*pi)
inline double wrap_two_pi(double angle)
{
    double r = std::fmod(angle, two_pi);
    if (r < 0.0)
        r += two_pi;
    if (r >= two_pi) // fmod of tiny negatives
        r = 0.0;
    return r;
}

// [x]_+
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Angle between two unit vectors, robust near 0 and pi.
inline double angle_between(const Vec3 &a, const Vec3 &b)
{
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline bool is_unit(const Vec3 &v, double tol = 1e-9)
{
    return std::abs(v.norm() - 1.0) <= tol;
}

} // namespace ra
