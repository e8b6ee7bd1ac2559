#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "slitlab/eraser.hpp"
#include "slitlab/error.hpp"
#include "slitlab/model.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/quadrature.hpp"
#include "slitlab/random.hpp"

namespace slitlab {

/// Stage scan and counting electronics. Defaults follow the double-slit run:
/// 35,000/s herald singles, 3,000/s signal singles at the peak, 7/s true
/// coincidences at the peak (pair_efficiency = 7 / 35,000), 10 s per point,
/// 0.7 mm collection slit, 341 points over 25 mm.
struct ScanConfig {
    double start = -12.5e-3;
    double stop = 12.5e-3;
    double step = 25e-3 / 340.0;
    double dwell = 10.0;
    double aperture = 0.7e-3;
    double herald_rate = 35000.0;
    double signal_rate = 3000.0;
    double pair_efficiency = 7.0 / 35000.0;
    double coincidence_window = 3e-9; // not stated for the apparatus; assumed
    double background_rate = 25.0;    // dark counts; assumed
    std::uint64_t seed = 1;

    void validate() const
    {
        detail::require(std::isfinite(start) && std::isfinite(stop) && start < stop,
                        "scan: start must be < stop");
        detail::require(step > 0.0, "scan: step must be > 0");
        detail::require(dwell > 0.0, "scan: dwell must be > 0");
        detail::require(aperture >= 0.0, "scan: aperture must be >= 0");
        detail::require(herald_rate >= 0.0 && signal_rate >= 0.0 && background_rate >= 0.0,
                        "scan: rates must be >= 0");
        detail::require(pair_efficiency >= 0.0 && pair_efficiency <= 1.0,
                        "scan: pair_efficiency must lie in [0, 1]");
        detail::require(coincidence_window > 0.0, "scan: coincidence_window must be > 0");
    }

    [[nodiscard]] std::size_t point_count() const
    {
        return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    }

    /// Stage positions from start to stop inclusive.
    [[nodiscard]] std::vector<double> positions() const
    {
        std::vector<double> xs(point_count());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = start + static_cast<double>(i) * step;
        }
        return xs;
    }

    /// True coincidence rate when the detector sits on the pattern maximum.
    [[nodiscard]] double peak_coincidence_rate() const { return herald_rate * pair_efficiency; }
};

struct ScanRecord {
    double position = 0.0;
    double dwell = 0.0;
    std::int64_t coincidences = 0;
    std::int64_t singles_signal = 0;
    std::int64_t singles_herald = 0;

    friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

namespace detail {
template <class Rng>
std::int64_t poisson(Rng& rng, double mean)
{
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}
} // namespace detail

/// A point-detector density seen through the scan aperture, normalized so its
/// maximum over the scan range is 1.
class ScanShape {
public:
    static constexpr std::size_t peak_search_points = 4097;

    template <class Density>
    ScanShape(const ScanConfig& cfg, Density density)
        : aperture_(cfg.aperture), density_(std::move(density))
    {
        double peak = 0.0;
        const double span = cfg.stop - cfg.start;
        for (std::size_t i = 0; i < peak_search_points; ++i) {
            const double x = cfg.start + span * static_cast<double>(i) /
                                             static_cast<double>(peak_search_points - 1);
            peak = std::max(peak, raw(x));
        }
        if (!(peak > 0.0)) {
            throw NumericError("degenerate density: zero everywhere on the scan range");
        }
        norm_ = peak;
    }

    /// Normalized aperture-averaged density at x, in [0, 1] up to grid error.
    double operator()(double x) const { return raw(x) / norm_; }

private:
    double raw(double x) const { return window_mean(density_, x, aperture_); }

    double aperture_;
    std::function<double(double)> density_;
    double norm_ = 1.0;
};

/// Mean rates at one stage position.
struct PointRates {
    double true_coincidence = 0.0;
    double accidental = 0.0;
    double signal = 0.0;
    double herald = 0.0;

    [[nodiscard]] double coincidence() const { return true_coincidence + accidental; }
};

inline PointRates modeled_rates(double shape, const ScanConfig& cfg)
{
    PointRates r;
    r.herald = cfg.herald_rate;
    r.true_coincidence = cfg.herald_rate * cfg.pair_efficiency * shape;
    r.signal = cfg.signal_rate * shape + cfg.background_rate;
    r.accidental = r.herald * r.signal * cfg.coincidence_window;
    return r;
}

/// Counts for one dwell at one stage position. Pairs are counted in both
/// singles channels; accidentals pair uncorrelated herald and signal clicks and
/// are capped by the number of such clicks, so coincidences never exceed
/// either singles count. All draws use streams keyed on (seed, index).
inline ScanRecord simulate_point(std::size_t index, double position, const ScanConfig& cfg,
                                 const ScanShape& shape)
{
    const PointRates rates = modeled_rates(std::clamp(shape(position), 0.0, 1.0), cfg);
    const double t = cfg.dwell;

    auto pair_rng = make_stream(cfg.seed, index, Channel::pairs);
    auto herald_rng = make_stream(cfg.seed, index, Channel::herald);
    auto signal_rng = make_stream(cfg.seed, index, Channel::signal);
    auto accidental_rng = make_stream(cfg.seed, index, Channel::accidentals);

    const std::int64_t pairs = detail::poisson(pair_rng, rates.true_coincidence * t);
    const std::int64_t herald_only =
        detail::poisson(herald_rng, std::max(rates.herald - rates.true_coincidence, 0.0) * t);
    const std::int64_t signal_only =
        detail::poisson(signal_rng, std::max(rates.signal - rates.true_coincidence, 0.0) * t);
    const std::int64_t accidentals = std::min(
        {detail::poisson(accidental_rng, rates.accidental * t), herald_only, signal_only});

    ScanRecord rec;
    rec.position = position;
    rec.dwell = t;
    rec.coincidences = pairs + accidentals;
    rec.singles_signal = pairs + signal_only;
    rec.singles_herald = pairs + herald_only;
    return rec;
}

/// One record per stage position; output depends only on the arguments.
inline std::vector<ScanRecord> run_scan(const ScanConfig& cfg, const ScanShape& shape)
{
    cfg.validate();
    const auto xs = cfg.positions();
    std::vector<ScanRecord> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.push_back(simulate_point(i, xs[i], cfg, shape));
    }
    return out;
}

inline std::vector<ScanRecord> run_scan(const ScanConfig& cfg, const PatternModel& model,
                                        const PatternParams& p)
{
    cfg.validate();
    p.validate();
    const ScanShape shape(cfg, [model, p](double x) { return model.point_rate(x, p); });
    return run_scan(cfg, shape);
}

/// Partial-coherence pattern, or the eraser pattern when optics are given.
inline std::vector<ScanRecord> run_scan(const ScanConfig& cfg, const PatternParams& p,
                                        const std::optional<EraserSetup>& eraser = std::nullopt)
{
    PatternModel model;
    if (eraser) {
        model.kind = ModelKind::eraser;
        model.eraser = eraser_amplitudes(*eraser);
    }
    return run_scan(cfg, model, p);
}

} // namespace slitlab
