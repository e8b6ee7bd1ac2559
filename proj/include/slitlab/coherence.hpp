#pragma once

#include <cmath>
#include <numbers>

#include "slitlab/error.hpp"

namespace slitlab {

/// Pump beam and geometry that set the size of the down-conversion source.
struct SourceModel {
    double pump_wavelength = 405e-9;
    double pump_waist = 0.52e-3;  ///< unfocused half-width
    double focus_length = 0.25;   ///< pump focusing lens
    double crystal_distance = 0.30; ///< crystal to slits

    void validate() const
    {
        detail::require(pump_wavelength > 0.0, "pump_wavelength must be > 0");
        detail::require(pump_waist > 0.0, "pump_waist must be > 0");
        detail::require(focus_length > 0.0, "focus_length must be > 0");
        detail::require(crystal_distance > 0.0, "crystal_distance must be > 0");
    }
};

/// Waist of the focused pump: equating the geometric convergence angle
/// w / f0 with the Gaussian-beam divergence lambda0 / (pi w0).
inline double focused_waist(const SourceModel& s)
{
    return s.pump_wavelength * s.focus_length / (std::numbers::pi * s.pump_waist);
}

/// Full angular size 2 w / z of a source of half-width w at distance z.
inline double source_angular_size(double half_width, double distance)
{
    return 2.0 * half_width / distance;
}

/// Angular size of the focused pump spot seen from the slits.
inline double source_angular_size(const SourceModel& s)
{
    return source_angular_size(focused_waist(s), s.crystal_distance);
}

/// Fringe visibility from a Gaussian source of waist w0 at distance z
/// (van Cittert-Zernike): exp(-(pi d w0)^2 / (lambda z)^2).
inline double visibility_gaussian_source(double slit_separation, double source_waist,
                                         double wavelength, double distance)
{
    const double u = std::numbers::pi * slit_separation * source_waist / (wavelength * distance);
    return std::exp(-u * u);
}

inline double visibility_gaussian_source(double slit_separation, const SourceModel& s,
                                         double wavelength)
{
    return visibility_gaussian_source(slit_separation, focused_waist(s), wavelength,
                                      s.crystal_distance);
}

} // namespace slitlab
