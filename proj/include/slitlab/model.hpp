#pragma once

#include <string>
#include <string_view>

#include "slitlab/eraser.hpp"
#include "slitlab/error.hpp"
#include "slitlab/pattern.hpp"

namespace slitlab {

enum class ModelKind { double_slit, single_slit, partial_coherence, eraser };

inline std::string_view to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::double_slit: return "double";
    case ModelKind::single_slit: return "single";
    case ModelKind::partial_coherence: return "partial";
    case ModelKind::eraser: return "eraser";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view name)
{
    if (name == "double") return ModelKind::double_slit;
    if (name == "single") return ModelKind::single_slit;
    if (name == "partial") return ModelKind::partial_coherence;
    if (name == "eraser") return ModelKind::eraser;
    throw ValidationError("unknown model '" + std::string(name) +
                          "' (expected double, single, partial or eraser)");
}

/// A rate model x -> counts/s: one of the analytic patterns, seen through a
/// collection aperture of the given width.
struct PatternModel {
    ModelKind kind = ModelKind::partial_coherence;
    EraserAmplitudes eraser{}; ///< used only by ModelKind::eraser
    double aperture = 0.0;

    /// Rate at a point detector.
    [[nodiscard]] double point_rate(double x, const PatternParams& p) const
    {
        switch (kind) {
        case ModelKind::double_slit: return double_slit_density(x, p);
        case ModelKind::single_slit: return single_slit_density(x, p);
        case ModelKind::partial_coherence: return partial_coherence_density(x, p);
        case ModelKind::eraser: return eraser_density(x, p, eraser);
        }
        return 0.0;
    }

    /// Rate averaged over the collection aperture.
    [[nodiscard]] double rate(double x, const PatternParams& p) const
    {
        return window_mean([&](double u) { return point_rate(u, p); }, x, aperture);
    }
};

} // namespace slitlab
