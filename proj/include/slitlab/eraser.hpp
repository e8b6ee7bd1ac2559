#pragma once

#include <cmath>
#include <optional>

#include "slitlab/error.hpp"
#include "slitlab/pattern.hpp"

namespace slitlab {

/// Polarization optics of the quantum-eraser configuration. Angles are
/// transmission axes measured from the vertical, in radians.
struct EraserSetup {
    double input_angle = 0.0;
    std::optional<double> slit_a_polarizer;
    std::optional<double> slit_b_polarizer;
    std::optional<double> analyzer;

    [[nodiscard]] bool has_slit_polarizers() const { return slit_a_polarizer.has_value(); }

    void validate() const
    {
        detail::require(slit_a_polarizer.has_value() == slit_b_polarizer.has_value(),
                        "eraser: slit polarizers must be given for both slits or neither");
        detail::require(std::isfinite(input_angle), "eraser: input_angle must be finite");
    }
};

struct EraserAmplitudes {
    double amp_a = 1.0; ///< transmitted amplitude magnitude through slit A
    double amp_b = 1.0;
    /// True when no which-slit information survives to the detector: no slit
    /// polarizers, or an analyzer projects both paths onto one polarization.
    bool coherent = true;
    /// |cos(pol_a - pol_b)|; 1 for coherent configurations.
    double path_coherence = 1.0;
    /// Signed weight of the interference cross term, A_a A_b <e_a|e_b>.
    double cross = 1.0;

    /// Fringe visibility 2 cross / (A_a^2 + A_b^2); negative values mean
    /// inverted fringes. Zero when nothing is transmitted.
    [[nodiscard]] double visibility() const
    {
        const double total = amp_a * amp_a + amp_b * amp_b;
        return total > 0.0 ? 2.0 * cross / total : 0.0;
    }
};

/// Malus-law projection of the input polarization through each slit's
/// polarizer and the optional analyzer. Mutually non-orthogonal slit
/// polarizers give a cross term weighted by the overlap of their axes.
inline EraserAmplitudes eraser_amplitudes(const EraserSetup& e)
{
    e.validate();
    double a = 1.0;
    double b = 1.0;
    double dir_a = e.input_angle;
    double dir_b = e.input_angle;
    if (e.has_slit_polarizers()) {
        a = std::cos(*e.slit_a_polarizer - e.input_angle);
        b = std::cos(*e.slit_b_polarizer - e.input_angle);
        dir_a = *e.slit_a_polarizer;
        dir_b = *e.slit_b_polarizer;
    }
    double overlap = std::cos(dir_a - dir_b);
    if (e.analyzer) {
        a *= std::cos(*e.analyzer - dir_a);
        b *= std::cos(*e.analyzer - dir_b);
        overlap = 1.0;
    }
    EraserAmplitudes out;
    out.amp_a = std::abs(a);
    out.amp_b = std::abs(b);
    out.coherent = !e.has_slit_polarizers() || e.analyzer.has_value();
    out.path_coherence = out.coherent ? 1.0 : std::abs(overlap);
    out.cross = a * b * overlap;
    return out;
}

/// Detected rate behind the eraser optics. The source coherence |V| and
/// phase of `p` multiply the cross term, so with no polarizers this reduces
/// to partial_coherence_density (and to double_slit_density for |V| = 1).
inline double eraser_density(double x, const PatternParams& p, const EraserAmplitudes& amps)
{
    const double direct = amps.amp_a * amps.amp_a + amps.amp_b * amps.amp_b;
    const double fringe = 2.0 * amps.cross * p.visibility * std::cos(2.0 * alpha(x, p) + p.phase);
    return 0.25 * p.peak_rate * sinc_sq(beta(x, p)) * (direct + fringe);
}

inline double eraser_density(double x, const PatternParams& p, const EraserSetup& e)
{
    return eraser_density(x, p, eraser_amplitudes(e));
}

} // namespace slitlab
