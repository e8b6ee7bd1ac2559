#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "slitlab/error.hpp"
#include "slitlab/quadrature.hpp"

namespace slitlab {

/// Inverse-CDF sampler over a tabulated density. Each grid cell carries the
/// integral of the density over it; within a cell positions are uniform.
class PositionSampler {
public:
    static constexpr std::size_t min_cells = 4096;

    template <class Density>
    PositionSampler(Density&& density, double lower, double upper, std::size_t cells = 8192)
        : lower_(lower), width_((upper - lower) / static_cast<double>(std::max(cells, min_cells)))
    {
        detail::require(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
                        "sampler: range must satisfy lower < upper");
        cells = std::max(cells, min_cells);
        cumulative_.resize(cells + 1, 0.0);
        static const GaussLegendre<4> rule;
        for (std::size_t i = 0; i < cells; ++i) {
            const double mid = lower_ + (static_cast<double>(i) + 0.5) * width_;
            double mass = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                const double f = density(mid + 0.5 * width_ * rule.nodes[k]);
                detail::require(f >= 0.0 && std::isfinite(f), "sampler: density must be finite and >= 0");
                mass += rule.weights[k] * f;
            }
            cumulative_[i + 1] = cumulative_[i] + 0.5 * width_ * mass;
        }
        if (!(cumulative_.back() > 0.0)) {
            throw NumericError("degenerate density: integrates to zero over the sampling range");
        }
    }

    template <class Rng>
    double operator()(Rng& rng) const
    {
        std::uniform_real_distribution<double> uniform(0.0, cumulative_.back());
        const double u = uniform(rng);
        // First cell whose upper cumulative bound exceeds u; zero-mass cells
        // have equal bounds and are never selected.
        auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), u);
        if (it == cumulative_.end()) {
            --it;
        }
        const auto cell = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        const double mass = cumulative_[cell + 1] - cumulative_[cell];
        const double frac = mass > 0.0 ? (u - cumulative_[cell]) / mass : 0.5;
        return lower_ + (static_cast<double>(cell) + std::clamp(frac, 0.0, 1.0)) * width_;
    }

    [[nodiscard]] std::size_t cells() const { return cumulative_.size() - 1; }
    [[nodiscard]] double cell_width() const { return width_; }
    [[nodiscard]] double lower() const { return lower_; }
    [[nodiscard]] double upper() const { return lower_ + width_ * static_cast<double>(cells()); }
    /// Integral of the density over the whole range.
    [[nodiscard]] double total_mass() const { return cumulative_.back(); }

private:
    double lower_;
    double width_;
    std::vector<double> cumulative_;
};

template <class Density>
PositionSampler build_sampler(Density&& density, double lower, double upper,
                              std::size_t cells = 8192)
{
    return PositionSampler(std::forward<Density>(density), lower, upper, cells);
}

} // namespace slitlab
