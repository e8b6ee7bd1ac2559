#pragma once

#include <cmath>
#include <numbers>

#include "slitlab/error.hpp"
#include "slitlab/quadrature.hpp"

namespace slitlab {

/// Map an angle into (-pi, pi].
inline double normalize_phase(double phase)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(phase, two_pi); // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

/// Far-field slit pattern parameters, SI units throughout.
struct PatternParams {
    double wavelength = 810e-9;
    double slit_separation = 0.62e-3; ///< center-to-center
    double slit_width = 0.13e-3;
    double screen_distance = 1.52; ///< slit-to-screen (lens focal length in the Fourier setup)
    double peak_rate = 1.0;        ///< counts/s at the pattern maximum (envelope amplitude for partial coherence)
    double visibility = 1.0;       ///< modulus of the complex degree of coherence
    double phase = 0.0;            ///< in (-pi, pi]
    double center = 0.0;           ///< transverse position of the pattern center

    /// Throws ValidationError naming the first violated invariant.
    void validate() const
    {
        detail::require(std::isfinite(wavelength) && wavelength > 0.0, "wavelength must be > 0");
        detail::require(std::isfinite(slit_width) && slit_width > 0.0, "slit_width must be > 0");
        detail::require(std::isfinite(screen_distance) && screen_distance > 0.0,
                        "screen_distance must be > 0");
        detail::require(std::isfinite(slit_separation) && slit_separation >= slit_width,
                        "slit_separation must be >= slit_width");
        detail::require(std::isfinite(peak_rate) && peak_rate >= 0.0, "peak_rate must be >= 0");
        detail::require(visibility >= 0.0 && visibility <= 1.0, "visibility must lie in [0, 1]");
        detail::require(std::isfinite(phase), "phase must be finite");
        detail::require(std::isfinite(center), "center must be finite");
    }

    /// Validated copy with the phase folded into (-pi, pi].
    [[nodiscard]] PatternParams normalized() const
    {
        PatternParams p = *this;
        p.phase = normalize_phase(p.phase);
        p.validate();
        return p;
    }
};

/// Half the two-slit phase difference at screen position x (small-angle form).
inline double alpha(double x, const PatternParams& p)
{
    return std::numbers::pi * p.slit_separation * (x - p.center) / (p.wavelength * p.screen_distance);
}

/// Half the edge-to-edge phase difference across one slit at x.
inline double beta(double x, const PatternParams& p)
{
    return std::numbers::pi * p.slit_width * (x - p.center) / (p.wavelength * p.screen_distance);
}

/// (sin b / b)^2 with the removable singularity filled in.
inline double sinc_sq(double b)
{
    if (std::abs(b) < 1e-8) {
        return 1.0 - b * b / 3.0;
    }
    const double s = std::sin(b) / b;
    return s * s;
}

/// Ideal double-slit rate: N_m sinc^2(beta) cos^2(alpha).
inline double double_slit_density(double x, const PatternParams& p)
{
    const double c = std::cos(alpha(x, p));
    return p.peak_rate * sinc_sq(beta(x, p)) * c * c;
}

/// Double-slit rate with partial spatial coherence:
/// N0 sinc^2(beta) (1 + |V| cos(2 alpha + delta)) / 2.
inline double partial_coherence_density(double x, const PatternParams& p)
{
    return p.peak_rate * sinc_sq(beta(x, p)) * 0.5 *
           (1.0 + p.visibility * std::cos(2.0 * alpha(x, p) + p.phase));
}

/// Single-slit diffraction rate; slit_separation is ignored.
inline double single_slit_density(double x, const PatternParams& p)
{
    return p.peak_rate * sinc_sq(beta(x, p));
}

/// Distance between the two first-order envelope minima, 2 lambda L / b.
inline double envelope_width(const PatternParams& p)
{
    return 2.0 * p.wavelength * p.screen_distance / p.slit_width;
}

/// Spacing between adjacent interference maxima, lambda L / d.
inline double fringe_spacing(const PatternParams& p)
{
    return p.wavelength * p.screen_distance / p.slit_separation;
}

/// Mean of `base` over a collection aperture of width `aperture` centred on x.
template <class Density>
double aperture_averaged_density(double x, const PatternParams& p, double aperture, Density&& base)
{
    return window_mean([&](double u) { return base(u, p); }, x, aperture);
}

/// Factor by which a top-hat aperture of width a scales the contrast of
/// fringes with period `period`: sin(pi a / period) / (pi a / period).
inline double aperture_visibility_factor(double aperture, double period)
{
    const double u = std::numbers::pi * aperture / period;
    return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
}

} // namespace slitlab
