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

#include "risfault/channelgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "risfault/error.hpp"

namespace risfault
{

namespace
{

constexpr double kPi = std::numbers::pi;

std::complex<double> unit_phasor(double phase)
{
    return {std::cos(phase), std::sin(phase)};
}

double clamp_angle(double a)
{
    return a > 0.0 ? a : kMinAngle;
}

PathAngles uniform_angles(Rng &rng)
{
    // 1 - u lies in (0, 1], hence pi * (1 - u) in (0, pi].
    const double elevation = kPi * (1.0 - rng.uniform());
    const double azimuth = kPi * (1.0 - rng.uniform());
    return {elevation, azimuth};
}

} // namespace

Position3D::Position3D(double x_, double y_, double z_) : x(x_), y(y_), z(z_)
{
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw InvalidInputError("Position3D: coordinates must be finite");
}

double Position3D::distance_to(const Position3D &other) const
{
    return std::hypot(other.x - x, other.y - y, other.z - z);
}

UpaGeometry::UpaGeometry(std::size_t n_elev, std::size_t n_azim, double spacing, double wavelength)
    : n_elev_(n_elev), n_azim_(n_azim), spacing_(spacing), wavelength_(wavelength)
{
    if (n_elev == 0 || n_azim == 0)
        throw InvalidGeometryError("UpaGeometry: element counts must be positive");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw InvalidGeometryError("UpaGeometry: spacing must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidGeometryError("UpaGeometry: wavelength must be positive");
}

UpaGeometry UpaGeometry::half_wavelength(std::size_t n_elev, std::size_t n_azim, double carrier_hz)
{
    const double lambda = wavelength_from_frequency(carrier_hz);
    return {n_elev, n_azim, lambda / 2.0, lambda};
}

double wavelength_from_frequency(double carrier_hz)
{
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
        throw InvalidGeometryError("carrier frequency must be positive");
    return kSpeedOfLight / carrier_hz;
}

PathAngles::PathAngles(double elevation, double azimuth) : elevation_(elevation), azimuth_(azimuth)
{
    if (!(elevation > 0.0 && elevation <= kPi))
        throw InvalidInputError("PathAngles: elevation " + std::to_string(elevation) + " outside (0, pi]");
    if (!(azimuth > 0.0 && azimuth <= kPi))
        throw InvalidInputError("PathAngles: azimuth " + std::to_string(azimuth) + " outside (0, pi]");
}

PathSet::PathSet(std::vector<Path> paths) : paths_(std::move(paths))
{
    if (paths_.empty())
        throw InvalidPathSetError("PathSet: at least one path required");
    const bool departure = paths_.front().departure.has_value();
    for (const auto &p : paths_)
    {
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
            throw InvalidPathSetError("PathSet: path gains must be finite");
        if (p.departure.has_value() != departure)
            throw InvalidPathSetError("PathSet: departure angles must be present for all paths or none");
    }
}

cvec elevation_response(const UpaGeometry &geom, double elevation)
{
    const double step = 2.0 * kPi * geom.spacing() * std::cos(elevation) / geom.wavelength();
    cvec a(static_cast<Eigen::Index>(geom.n_elev()));
    for (std::size_t m = 0; m < geom.n_elev(); ++m)
        a[static_cast<Eigen::Index>(m)] = unit_phasor(-step * static_cast<double>(m));
    return a;
}

cvec azimuth_response(const UpaGeometry &geom, double elevation, double azimuth)
{
    const double step = 2.0 * kPi * geom.spacing() * std::sin(elevation) * std::cos(azimuth) / geom.wavelength();
    cvec a(static_cast<Eigen::Index>(geom.n_azim()));
    for (std::size_t n = 0; n < geom.n_azim(); ++n)
        a[static_cast<Eigen::Index>(n)] = unit_phasor(-step * static_cast<double>(n));
    return a;
}

cvec steering_vector(const UpaGeometry &geom, const PathAngles &angles)
{
    const cvec ae = elevation_response(geom, angles.elevation());
    const cvec aa = azimuth_response(geom, angles.elevation(), angles.azimuth());
    const auto na = static_cast<Eigen::Index>(geom.n_azim());
    cvec a(static_cast<Eigen::Index>(geom.size()));
    for (Eigen::Index m = 0; m < ae.size(); ++m)
        a.segment(m * na, na) = ae[m] * aa;
    return a;
}

PathAngles angles_between(const Position3D &from, const Position3D &to)
{
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double dz = to.z - from.z;
    const double r = std::hypot(dx, dy, dz);
    if (!(r > 0.0))
        throw DegenerateGeometryError("angles_between: coincident points");
    const double elevation = std::acos(std::clamp(dz / r, -1.0, 1.0));
    const double azimuth = std::abs(std::atan2(dy, dx));
    return {clamp_angle(elevation), clamp_angle(azimuth)};
}

bool in_front_of_panel(const Position3D &panel, const Position3D &point)
{
    return point.y > panel.y;
}

PathSet sample_path_set(Rng &rng,
                        std::size_t count,
                        const std::optional<LinkAnchor> &anchor,
                        double gain_scale,
                        bool with_departure,
                        double dominant_power_ratio)
{
    if (count == 0)
        throw InvalidInputError("sample_path_set: count must be at least 1");
    if (!(gain_scale >= 0.0) || !(dominant_power_ratio > 0.0))
        throw InvalidInputError("sample_path_set: gain scale and power ratio must be non-negative");

    const double variance = gain_scale * gain_scale;
    std::vector<Path> paths;
    paths.reserve(count);
    for (std::size_t p = 0; p < count; ++p)
    {
        std::optional<PathAngles> arrival;
        std::optional<PathAngles> departure;
        if (p == 0 && anchor)
        {
            arrival = angles_between(anchor->receiver, anchor->transmitter);
            if (with_departure)
                departure = angles_between(anchor->transmitter, anchor->receiver);
        }
        else
        {
            arrival = uniform_angles(rng);
            if (with_departure)
                departure = uniform_angles(rng);
        }
        const double power = p == 0 ? dominant_power_ratio * variance : variance;
        paths.push_back({rng.complex_normal(power), *arrival, departure});
    }
    return PathSet(std::move(paths));
}

cvec mu_ris_channel(const PathSet &paths, const UpaGeometry &ris_geom)
{
    if (paths.has_departure())
        throw InvalidPathSetError("mu_ris_channel: MU-RIS paths carry no departure angles");
    cvec g = cvec::Zero(static_cast<Eigen::Index>(ris_geom.size()));
    for (const auto &p : paths.paths())
        g += p.gain * steering_vector(ris_geom, p.arrival);
    return g;
}

cmat ris_bs_channel(const PathSet &paths, const UpaGeometry &bs_geom, const UpaGeometry &ris_geom)
{
    if (!paths.has_departure())
        throw InvalidPathSetError("ris_bs_channel: every path needs departure angles");
    cmat h = cmat::Zero(static_cast<Eigen::Index>(bs_geom.size()), static_cast<Eigen::Index>(ris_geom.size()));
    for (const auto &p : paths.paths())
    {
        const cvec a_b = steering_vector(bs_geom, p.arrival);
        const cvec a_r = steering_vector(ris_geom, *p.departure);
        h.noalias() += p.gain * a_b * a_r.adjoint();
    }
    return h;
}

} // namespace risfault
