#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "slitlab/error.hpp"
#include "slitlab/random.hpp"
#include "slitlab/scan.hpp"

namespace slitlab {

/// What accompanies each herald (gate) in the beam-splitter arm.
enum class G2Source {
    heralded,   ///< at most one photon, present with probability pair_efficiency
    poissonian, ///< Poisson photon number with mean pair_efficiency (classical light)
};

struct G2Result {
    std::int64_t n_gate = 0;
    std::int64_t n_gt = 0;  ///< gate and transmitted-arm coincidences
    std::int64_t n_gr = 0;  ///< gate and reflected-arm coincidences
    std::int64_t n_gtr = 0; ///< triple coincidences
    double g2 = 0.0;
    double std_error = 0.0;
};

/// Probabilities that, in one gate window, only T fires, only R fires, or both.
struct GateOutcome {
    double t_only = 0.0;
    double r_only = 0.0;
    double both = 0.0;
};

inline GateOutcome gate_outcome(const ScanConfig& cfg, double splitter_ratio, G2Source source)
{
    const double eta = cfg.pair_efficiency;
    const double r = splitter_ratio;
    // Uncorrelated clicks in either arm during the window.
    const double acc_t =
        -std::expm1(-(r * cfg.signal_rate + cfg.background_rate) * cfg.coincidence_window);
    const double acc_r =
        -std::expm1(-((1.0 - r) * cfg.signal_rate + cfg.background_rate) * cfg.coincidence_window);

    GateOutcome o;
    if (source == G2Source::heralded) {
        // A single photon goes one way or the other, never both.
        o.both = eta * r * acc_r + eta * (1.0 - r) * acc_t + (1.0 - eta) * acc_t * acc_r;
        o.t_only = eta * r * (1.0 - acc_r) + (1.0 - eta) * acc_t * (1.0 - acc_r);
        o.r_only = eta * (1.0 - r) * (1.0 - acc_t) + (1.0 - eta) * (1.0 - acc_t) * acc_r;
    } else {
        // Splitting a Poisson number gives independent arms.
        const double fire_t = 1.0 - std::exp(-eta * r) * (1.0 - acc_t);
        const double fire_r = 1.0 - std::exp(-eta * (1.0 - r)) * (1.0 - acc_r);
        o.both = fire_t * fire_r;
        o.t_only = fire_t * (1.0 - fire_r);
        o.r_only = (1.0 - fire_t) * fire_r;
    }
    return o;
}

/// Three-detector anticorrelation measurement: herald gates, a beam splitter
/// sending the partner to T with probability splitter_ratio, and accidental
/// clicks in each arm. Gate counts are Poisson; outcomes per gate are a
/// multinomial draw. Estimator g2 = N_G N_GTR / (N_GT N_GR).
inline G2Result run_g2(const ScanConfig& cfg, double splitter_ratio, double dwell_total,
                       G2Source source = G2Source::heralded)
{
    cfg.validate();
    detail::require(splitter_ratio > 0.0 && splitter_ratio < 1.0,
                    "g2: splitter_ratio must lie in (0, 1)");
    detail::require(dwell_total > 0.0, "g2: dwell_total must be > 0");

    const GateOutcome o = gate_outcome(cfg, splitter_ratio, source);
    auto gate_rng = make_stream(cfg.seed, 0, Channel::gates);
    auto split_rng = make_stream(cfg.seed, 0, Channel::splitter);

    G2Result res;
    res.n_gate = detail::poisson(gate_rng, cfg.herald_rate * dwell_total);

    auto binomial = [&](std::int64_t n, double p) -> std::int64_t {
        if (n <= 0 || !(p > 0.0)) return 0;
        if (p >= 1.0) return n;
        std::binomial_distribution<std::int64_t> dist(n, p);
        return dist(split_rng);
    };
    const std::int64_t both = binomial(res.n_gate, o.both);
    const double rest = 1.0 - o.both;
    const std::int64_t t_only = binomial(res.n_gate - both, rest > 0.0 ? o.t_only / rest : 0.0);
    const double rest2 = rest - o.t_only;
    const std::int64_t r_only =
        binomial(res.n_gate - both - t_only, rest2 > 0.0 ? o.r_only / rest2 : 0.0);

    res.n_gtr = both;
    res.n_gt = both + t_only;
    res.n_gr = both + r_only;
    if (res.n_gt == 0 || res.n_gr == 0) {
        throw NumericError("insufficient counts: no gate coincidences in one arm (N_GT = " +
                           std::to_string(res.n_gt) + ", N_GR = " + std::to_string(res.n_gr) + ")");
    }
    const double g = static_cast<double>(res.n_gate);
    const double t = static_cast<double>(res.n_gt);
    const double r = static_cast<double>(res.n_gr);
    const double tr = static_cast<double>(res.n_gtr);
    res.g2 = g * tr / (t * r);
    // Poisson errors on the three coincidence counts; an empty triple channel
    // is assigned a one-count scale.
    res.std_error = tr > 0.0 ? res.g2 * std::sqrt(1.0 / tr + 1.0 / t + 1.0 / r) : g / (t * r);
    return res;
}

} // namespace slitlab
