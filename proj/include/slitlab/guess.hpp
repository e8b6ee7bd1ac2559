#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slitlab/fit.hpp"
#include "slitlab/model.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/scan.hpp"

namespace slitlab {

struct InitialGuess {
    PatternParams params;
    bool fallback = false; ///< some value came from the caller-supplied defaults
    std::vector<std::string> notes;
};

namespace detail {

/// Centred moving average over a window of `width` (same units as xs).
inline std::vector<double> boxcar(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double width)
{
    std::vector<double> out(ys.size());
    std::size_t lo = 0;
    std::size_t hi = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        while (hi < ys.size() && xs[hi] <= xs[i] + 0.5 * width) {
            sum += ys[hi++];
        }
        while (xs[lo] < xs[i] - 0.5 * width) {
            sum -= ys[lo++];
        }
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

/// Spatial frequency (cycles per unit x) of the strongest oscillation in ys,
/// scanned on a fine grid and refined by parabolic interpolation.
inline double dominant_frequency(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double f_min, double f_max)
{
    constexpr std::size_t steps = 3000;
    std::vector<double> power(steps + 1);
    const double df = (f_max - f_min) / static_cast<double>(steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double w = 2.0 * std::numbers::pi * (f_min + df * static_cast<double>(k));
        std::complex<double> acc{};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            acc += ys[i] * std::polar(1.0, -w * xs[i]);
        }
        power[k] = std::norm(acc);
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(power.begin(), power.end()) - power.begin());
    double shift = 0.0;
    if (best > 0 && best < steps) {
        const double a = power[best - 1];
        const double b = power[best];
        const double c = power[best + 1];
        const double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            shift = 0.5 * (a - c) / denom;
        }
    }
    return f_min + df * (static_cast<double>(best) + shift);
}

inline double interpolate_crossing(double x0, double y0, double x1, double y1, double level)
{
    return y1 == y0 ? x0 : x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

} // namespace detail

/// Starting values for a fit from the shape of the data. wavelength and
/// screen_distance come from `apparatus`; any value that cannot be read off
/// the data is taken from `apparatus` too and flagged.
inline InitialGuess initial_guess(std::vector<DataPoint> data, const PatternModel& model,
                                  const PatternParams& apparatus)
{
    InitialGuess g;
    g.params = apparatus;
    g.params.phase = 0.0;
    if (data.size() < 8) {
        g.fallback = true;
        g.notes.emplace_back("too few points for a data-driven guess; using supplied values");
        return g;
    }
    std::sort(data.begin(), data.end(),
              [](const DataPoint& a, const DataPoint& b) { return a.position < b.position; });
    std::vector<double> xs;
    std::vector<double> rates;
    for (const auto& d : data) {
        xs.push_back(d.position);
        rates.push_back(d.count / d.dwell);
    }
    const double span = xs.back() - xs.front();
    const double step = span / static_cast<double>(xs.size() - 1);
    const double mean_dwell = data.front().dwell;
    const double lambda_l = apparatus.wavelength * apparatus.screen_distance;

    double total = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        total += rates[i];
        moment += rates[i] * xs[i];
    }
    if (!(total > 0.0)) {
        g.fallback = true;
        g.notes.emplace_back("no counts; using supplied values");
        return g;
    }
    g.params.center = moment / total;

    const bool has_fringes = model.kind != ModelKind::single_slit;

    // Fringe period from the periodogram of the data minus a broad trend.
    double period = 0.0;
    if (has_fringes) {
        const auto trend = detail::boxcar(xs, rates, span / 8.0);
        const double trend_max = *std::max_element(trend.begin(), trend.end());
        std::vector<double> cx;
        std::vector<double> cy;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (trend[i] >= 0.2 * trend_max) {
                cx.push_back(xs[i]);
                cy.push_back(rates[i] - trend[i]);
            }
        }
        if (cx.size() >= 8) {
            const double region = cx.back() - cx.front();
            const double f = detail::dominant_frequency(cx, cy, 2.0 / region, 1.0 / (3.0 * step));
            period = 1.0 / f;
            g.params.slit_separation = lambda_l * f;
        } else {
            g.fallback = true;
            g.notes.emplace_back("central region too narrow for a fringe period; d from supplied value");
            period = fringe_spacing(apparatus);
        }
    }

    // Envelope: smooth over one fringe period (or a small fraction of the
    // span for a single slit), then walk out from the peak to the minima.
    const double env_width = has_fringes ? period : std::max(span / 50.0, 3.0 * step);
    const auto env = detail::boxcar(xs, rates, env_width);
    const auto peak_it = std::max_element(env.begin(), env.end());
    const auto ip = static_cast<std::size_t>(peak_it - env.begin());
    const double env_max = *peak_it;
    const auto points_in = [&](double w) { return std::max(1.0, w / step); };

    const auto find_minimum = [&](int dir) -> std::optional<double> {
        std::size_t jmin = ip;
        for (std::size_t j = ip;; j = static_cast<std::size_t>(static_cast<long>(j) + dir)) {
            if (env[j] < env[jmin]) {
                jmin = j;
            }
            const double noise =
                std::sqrt(std::max(env[jmin] * mean_dwell, 1.0) / points_in(env_width)) / mean_dwell;
            if (env[jmin] < 0.3 * env_max && env[j] > env[jmin] + 0.01 * env_max + 3.0 * noise) {
                return xs[jmin];
            }
            if ((dir < 0 && j == 0) || (dir > 0 && j + 1 == xs.size())) {
                return std::nullopt;
            }
        }
    };
    const auto left = find_minimum(-1);
    const auto right = find_minimum(+1);
    double envelope = 0.0;
    if (left && right) {
        envelope = *right - *left;
        g.params.center = 0.5 * (*left + *right);
    } else if (left || right) {
        envelope = 2.0 * std::abs((left ? *left : *right) - xs[ip]);
    } else {
        // Half-maximum width of sinc^2 is 1.39156 / pi of the minima spacing.
        std::optional<double> lo;
        std::optional<double> hi;
        for (std::size_t j = ip; j > 0; --j) {
            if (env[j - 1] < 0.5 * env_max) {
                lo = detail::interpolate_crossing(xs[j - 1], env[j - 1], xs[j], env[j], 0.5 * env_max);
                break;
            }
        }
        for (std::size_t j = ip; j + 1 < xs.size(); ++j) {
            if (env[j + 1] < 0.5 * env_max) {
                hi = detail::interpolate_crossing(xs[j], env[j], xs[j + 1], env[j + 1], 0.5 * env_max);
                break;
            }
        }
        if (lo && hi) {
            envelope = (*hi - *lo) * std::numbers::pi / 1.39156;
            g.notes.emplace_back("envelope minima not found; slit width from half-maximum width");
        }
    }
    if (envelope > 0.0) {
        g.params.slit_width = 2.0 * lambda_l / envelope;
    } else {
        g.fallback = true;
        g.notes.emplace_back("envelope not located; slit width from supplied value");
    }

    // Peak rate from a lightly smoothed profile (raw maxima are biased up by noise).
    const auto light = detail::boxcar(xs, rates, 3.0 * step);
    const double peak = *std::max_element(light.begin(), light.end());
    g.params.peak_rate = peak;

    if (model.kind == ModelKind::partial_coherence || model.kind == ModelKind::eraser) {
        // Contrast between the central maximum and its neighbouring minima.
        const double w = std::max(period / 6.0, step);
        const auto fine = detail::boxcar(xs, rates, w);
        const double xc = g.params.center;
        double vmax = -1.0;
        double xm = xc;
        double min_left = std::numeric_limits<double>::infinity();
        double min_right = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::abs(xs[i] - xc) <= 0.5 * period && fine[i] > vmax) {
                vmax = fine[i];
                xm = xs[i];
            }
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double u = xs[i] - xm;
            if (u >= 0.25 * period && u <= 0.75 * period) min_right = std::min(min_right, fine[i]);
            if (-u >= 0.25 * period && -u <= 0.75 * period) min_left = std::min(min_left, fine[i]);
        }
        double v = 0.0;
        if (vmax > 0.0 && std::isfinite(min_left) && std::isfinite(min_right)) {
            const double vmin = 0.5 * (min_left + min_right);
            v = (vmax - vmin) / (vmax + vmin);
            // Undo the contrast lost to the aperture and the smoothing window.
            v /= aperture_visibility_factor(model.aperture, period) * aperture_visibility_factor(w, period);
        }
        g.params.visibility = std::clamp(v, 0.0, 1.0);
        if (model.kind == ModelKind::partial_coherence) {
            g.params.peak_rate = 2.0 * peak / (1.0 + g.params.visibility);
        }
    }
    if (g.params.slit_separation < g.params.slit_width) {
        g.params.slit_separation = g.params.slit_width;
    }
    return g;
}

/// Bounds used when a parameter is freed without explicit limits.
inline FreeParam default_bounds(Param which, const std::vector<DataPoint>& data)
{
    double lo = data.empty() ? -1.0 : data.front().position;
    double hi = lo;
    double max_rate = 0.0;
    for (const auto& d : data) {
        lo = std::min(lo, d.position);
        hi = std::max(hi, d.position);
        max_rate = std::max(max_rate, d.count / d.dwell);
    }
    switch (which) {
    case Param::wavelength: return {which, 100e-9, 10e-6};
    case Param::slit_separation: return {which, 1e-6, 20e-3};
    case Param::slit_width: return {which, 1e-6, 10e-3};
    case Param::screen_distance: return {which, 1e-3, 100.0};
    case Param::peak_rate: return {which, 0.0, 10.0 * max_rate + 1.0};
    case Param::visibility: return {which, 0.0, 1.0};
    case Param::phase: return {which, -2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
    case Param::center: return {which, lo, hi};
    }
    return {which, 0.0, 1.0};
}

/// Parameters each model frees by default: the geometry it depends on, the
/// pattern centre and the amplitude; wavelength and distance stay fixed.
inline std::vector<Param> default_free_params(ModelKind kind)
{
    switch (kind) {
    case ModelKind::double_slit:
        return {Param::slit_separation, Param::slit_width, Param::center, Param::peak_rate};
    case ModelKind::single_slit:
        return {Param::slit_width, Param::center, Param::peak_rate};
    case ModelKind::partial_coherence:
        return {Param::slit_separation, Param::slit_width, Param::visibility,
                Param::phase,           Param::center,     Param::peak_rate};
    case ModelKind::eraser:
        return {Param::slit_width, Param::center, Param::peak_rate};
    }
    return {};
}

inline std::vector<DataPoint> to_data(const std::vector<ScanRecord>& records)
{
    std::vector<DataPoint> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.position, static_cast<double>(r.coincidences), r.dwell});
    }
    return out;
}

/// Guess, bound and fit in one call. `apparatus` supplies the fixed values
/// and the fallbacks for anything the guess cannot determine.
inline FitResult fit_data(const std::vector<DataPoint>& data, const PatternModel& model,
                          const PatternParams& apparatus, std::vector<Param> free = {},
                          const LmOptions& options = {})
{
    if (free.empty()) {
        free = default_free_params(model.kind);
    }
    if (!data.empty() && std::all_of(data.begin(), data.end(), [](const DataPoint& d) { return d.count == 0.0; })) {
        throw NumericError("degenerate fit: every count is zero");
    }
    FitProblem problem;
    problem.data = data;
    problem.model = model;
    InitialGuess guess = initial_guess(data, model, apparatus);
    PatternParams start = guess.params;
    for (Param p : all_params) {
        if (std::find(free.begin(), free.end(), p) == free.end()) {
            param_ref(start, p) = param_value(apparatus, p);
        }
    }
    problem.fixed = start;
    for (Param p : free) {
        FreeParam f = default_bounds(p, data);
        param_ref(start, p) = std::clamp(param_value(start, p), f.lower, f.upper);
        problem.free.push_back(f);
    }
    // A start half a fringe off sits where the phase gradient vanishes, so
    // try the quadrants and begin from the cheapest.
    if (std::find(free.begin(), free.end(), Param::phase) != free.end()) {
        double best_phase = start.phase;
        double best_cost = residuals(problem, start).squaredNorm();
        for (double q : {0.5, 1.0, -0.5}) {
            PatternParams trial = start;
            trial.phase = start.phase + q * std::numbers::pi;
            const double c = residuals(problem, trial).squaredNorm();
            if (c < best_cost) {
                best_cost = c;
                best_phase = trial.phase;
            }
        }
        start.phase = best_phase;
    }
    FitResult res = levenberg_marquardt(problem, start, options);
    res.notes = std::move(guess.notes);
    if (guess.fallback) {
        res.notes.insert(res.notes.begin(), "initial guess used supplied fallback values");
    }
    return res;
}

} // namespace slitlab
