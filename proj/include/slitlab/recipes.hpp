#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "slitlab/eraser.hpp"
#include "slitlab/fit.hpp"
#include "slitlab/guess.hpp"
#include "slitlab/scan.hpp"

namespace slitlab {

/// Standard eraser layout: vertical input, slit polarizers at
/// +45 and -45 degrees, optional analyzer.
inline EraserSetup crossed_polarizer_eraser(std::optional<double> analyzer)
{
    EraserSetup e;
    e.input_angle = 0.0;
    e.slit_a_polarizer = std::numbers::pi / 4.0;
    e.slit_b_polarizer = -std::numbers::pi / 4.0;
    e.analyzer = analyzer;
    return e;
}

struct VisibilityFit {
    FitResult fit;
    double visibility = 0.0; ///< fitted fringe contrast
    double error = 0.0;
    bool inverted = false;   ///< fringes shifted by pi relative to the slit-centred pattern
};

/// Fringe contrast of scan data with the slit separation known: fits the
/// partial-coherence pattern with |V|, b, x0 and N0 free and the phase held
/// at 0 and at pi, keeping the better of the two. Holding the phase keeps the
/// fit well posed when the fringes vanish.
inline VisibilityFit fit_fringe_visibility(const std::vector<DataPoint>& data,
                                           const PatternParams& apparatus, double aperture)
{
    PatternModel model;
    model.kind = ModelKind::partial_coherence;
    model.aperture = aperture;
    const std::vector<Param> free = {Param::visibility, Param::slit_width, Param::center,
                                     Param::peak_rate};
    std::optional<VisibilityFit> best;
    for (double phase : {0.0, std::numbers::pi}) {
        PatternParams app = apparatus;
        app.phase = phase;
        VisibilityFit v;
        v.fit = fit_data(data, model, app, free);
        v.visibility = v.fit.estimate(Param::visibility);
        v.error = v.fit.error(Param::visibility);
        v.inverted = phase != 0.0;
        if (!best || v.fit.cost < best->fit.cost) {
            best = std::move(v);
        }
    }
    return *best;
}

struct EraserRun {
    EraserSetup optics;
    double predicted_visibility = 0.0; ///< |2 A_a A_b <e_a|e_b>| / (A_a^2 + A_b^2) times the source |V|
    std::vector<ScanRecord> records;
    VisibilityFit measured;
};

/// Simulate one eraser configuration and measure its fringe contrast.
inline EraserRun run_eraser(const ScanConfig& cfg, const PatternParams& truth, const EraserSetup& optics)
{
    EraserRun run;
    run.optics = optics;
    run.predicted_visibility = std::abs(eraser_amplitudes(optics).visibility()) * truth.visibility;
    if (run.predicted_visibility < 1e-12) run.predicted_visibility = 0.0; // cos(pi/2) residue
    run.records = run_scan(cfg, truth, optics);
    run.measured = fit_fringe_visibility(to_data(run.records), truth, cfg.aperture);
    return run;
}

} // namespace slitlab
