// SPDX-License-Identifier: Apache-2.0
//
// risfaultsim: RIS-aided uplink localization testbed with faulty elements
// Copyright (C) 2026 The risfaultsim Authors
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

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "risfault/rng.hpp"

namespace risfault
{

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s

/// Ratio of the geometric (first) path power to the per-path power of the
/// scattered paths.
inline constexpr double kDominantPowerRatio = 10.0;

/// Point in the global frame, meters.
struct Position3D
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Position3D() = default;
    Position3D(double x_, double y_, double z_); // throws InvalidInputError unless finite

    double distance_to(const Position3D &other) const;

    friend bool operator==(const Position3D &, const Position3D &) = default;
};

/// Uniform planar array. Elements are indexed elevation-major, 0-based:
/// element (m, n) has index m * n_azim + n.
class UpaGeometry
{
  public:
    /// Throws InvalidGeometryError for non-positive dimensions, spacing or wavelength.
    UpaGeometry(std::size_t n_elev, std::size_t n_azim, double spacing, double wavelength);

    /// Half-wavelength spaced array at the given carrier frequency.
    static UpaGeometry half_wavelength(std::size_t n_elev, std::size_t n_azim, double carrier_hz);

    std::size_t n_elev() const noexcept { return n_elev_; }
    std::size_t n_azim() const noexcept { return n_azim_; }
    std::size_t size() const noexcept { return n_elev_ * n_azim_; }
    double spacing() const noexcept { return spacing_; }
    double wavelength() const noexcept { return wavelength_; }

    friend bool operator==(const UpaGeometry &, const UpaGeometry &) = default;

  private:
    std::size_t n_elev_;
    std::size_t n_azim_;
    double spacing_;
    double wavelength_;
};

double wavelength_from_frequency(double carrier_hz);

/// Elevation and azimuth of a plane wave, both in (0, pi].
class PathAngles
{
  public:
    /// Throws InvalidInputError when either angle lies outside (0, pi].
    PathAngles(double elevation, double azimuth);

    double elevation() const noexcept { return elevation_; }
    double azimuth() const noexcept { return azimuth_; }

    friend bool operator==(const PathAngles &, const PathAngles &) = default;

  private:
    double elevation_;
    double azimuth_;
};

/// Smallest positive angle; exact zeros are clamped to it.
inline constexpr double kMinAngle = std::numeric_limits<double>::denorm_min();

struct Path
{
    std::complex<double> gain;
    PathAngles arrival;
    std::optional<PathAngles> departure;
};

/// Non-empty list of paths with finite gains. Either every path carries a
/// departure direction or none does.
class PathSet
{
  public:
    explicit PathSet(std::vector<Path> paths); // throws InvalidPathSetError

    const std::vector<Path> &paths() const noexcept { return paths_; }
    std::size_t size() const noexcept { return paths_.size(); }
    bool has_departure() const noexcept { return paths_.front().departure.has_value(); }

    const Path &operator[](std::size_t i) const { return paths_[i]; }

    friend bool operator==(const PathSet &, const PathSet &) = default;

  private:
    std::vector<Path> paths_;
};

struct ChannelRealization
{
    cvec g_ur; ///< MU-RIS channel, length N
    cmat h_rb; ///< RIS-BS channel, M x N
};

/// Transmitter and receiver of a link; the first path of a sampled set
/// follows the line between them.
struct LinkAnchor
{
    Position3D transmitter;
    Position3D receiver;
};

// -- array response ----------------------------------------------------------

/// Per-row factor exp(-j 2 pi d m cos(theta) / lambda), length n_elev.
cvec elevation_response(const UpaGeometry &geom, double elevation);

/// Per-column factor exp(-j 2 pi d n sin(theta) cos(phi) / lambda), length n_azim.
cvec azimuth_response(const UpaGeometry &geom, double elevation, double azimuth);

/// Kronecker product of the elevation and azimuth responses. Entry 0 is
/// exactly one and every entry has unit modulus.
cvec steering_vector(const UpaGeometry &geom, const PathAngles &angles);

/// Direction of `to` as seen from `from`.
///
/// Elevation is measured from the +z axis. Azimuth is the angle of the
/// horizontal displacement from the +x axis; negative values are reflected
/// (phi -> -phi) into (0, pi], which leaves every UPA response unchanged
/// because the response depends on phi only through cos(phi). Zero angles
/// are clamped to kMinAngle. Throws DegenerateGeometryError for coincident
/// points.
PathAngles angles_between(const Position3D &from, const Position3D &to);

/// True when `point` lies strictly on the +y side of a panel at `panel`.
bool in_front_of_panel(const Position3D &panel, const Position3D &point);

// -- path sampling -----------------------------------------------------------

/// Draws `count` paths. When `anchor` is given, path 0 takes its arrival
/// (and departure) direction from the anchor geometry; all other directions
/// are uniform on (0, pi]^2. Gains are CN(0, gain_scale^2), with path 0
/// drawn at `dominant_power_ratio` times that power.
PathSet sample_path_set(Rng &rng,
                        std::size_t count,
                        const std::optional<LinkAnchor> &anchor,
                        double gain_scale,
                        bool with_departure = false,
                        double dominant_power_ratio = kDominantPowerRatio);

// -- channel assembly ----------------------------------------------------------

/// g_ur = sum_p alpha_p a_R(arrival_p). Paths must not carry departures.
cvec mu_ris_channel(const PathSet &paths, const UpaGeometry &ris_geom);

/// H_rb = sum_j beta_j a_B(arrival_j) a_R(departure_j)^H.
cmat ris_bs_channel(const PathSet &paths, const UpaGeometry &bs_geom, const UpaGeometry &ris_geom);

} // namespace risfault
