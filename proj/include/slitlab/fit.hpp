#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "slitlab/error.hpp"
#include "slitlab/lm.hpp"
#include "slitlab/model.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/quadrature.hpp"

namespace slitlab {

enum class Param {
    wavelength,
    slit_separation,
    slit_width,
    screen_distance,
    peak_rate,
    visibility,
    phase,
    center,
};

inline constexpr std::array<Param, 8> all_params = {
    Param::wavelength, Param::slit_separation, Param::slit_width, Param::screen_distance,
    Param::peak_rate,  Param::visibility,      Param::phase,      Param::center,
};

inline std::string_view param_name(Param p)
{
    switch (p) {
    case Param::wavelength: return "wavelength";
    case Param::slit_separation: return "slit_separation";
    case Param::slit_width: return "slit_width";
    case Param::screen_distance: return "screen_distance";
    case Param::peak_rate: return "peak_rate";
    case Param::visibility: return "visibility";
    case Param::phase: return "phase";
    case Param::center: return "center";
    }
    return "?";
}

inline double& param_ref(PatternParams& p, Param which)
{
    switch (which) {
    case Param::wavelength: return p.wavelength;
    case Param::slit_separation: return p.slit_separation;
    case Param::slit_width: return p.slit_width;
    case Param::screen_distance: return p.screen_distance;
    case Param::peak_rate: return p.peak_rate;
    case Param::visibility: return p.visibility;
    case Param::phase: return p.phase;
    case Param::center: return p.center;
    }
    return p.center;
}

inline double param_value(const PatternParams& p, Param which)
{
    return param_ref(const_cast<PatternParams&>(p), which);
}

struct DataPoint {
    double position = 0.0;
    double count = 0.0;
    double dwell = 1.0;
};

struct FreeParam {
    Param param;
    double lower;
    double upper;
};

/// Weighted least-squares problem: counts_i ~ dwell_i * model(x_i).
struct FitProblem {
    std::vector<DataPoint> data;
    PatternModel model;
    std::vector<FreeParam> free;
    PatternParams fixed; ///< values of the parameters that are not free

    void validate() const
    {
        detail::require(!free.empty(), "fit: no free parameters");
        detail::require(data.size() >= 2 * free.size(),
                        "fit: need at least twice as many data points as free parameters (have " +
                            std::to_string(data.size()) + " points, " + std::to_string(free.size()) +
                            " parameters)");
        for (std::size_t i = 0; i < free.size(); ++i) {
            const auto& f = free[i];
            detail::require(std::isfinite(f.lower) && std::isfinite(f.upper) && f.lower < f.upper,
                            "fit: bounds for " + std::string(param_name(f.param)) +
                                " must be finite with lower < upper");
            for (std::size_t j = 0; j < i; ++j) {
                detail::require(free[j].param != f.param,
                                "fit: " + std::string(param_name(f.param)) + " listed twice");
            }
        }
        for (const auto& d : data) {
            detail::require(std::isfinite(d.position), "fit: non-finite position");
            detail::require(d.count >= 0.0 && std::isfinite(d.count), "fit: counts must be >= 0");
            detail::require(d.dwell > 0.0, "fit: dwell must be > 0");
        }
    }

    [[nodiscard]] std::size_t size() const { return free.size(); }

    [[nodiscard]] PatternParams apply(const Eigen::VectorXd& v) const
    {
        PatternParams p = fixed;
        for (std::size_t j = 0; j < free.size(); ++j) {
            param_ref(p, free[j].param) = v[static_cast<Eigen::Index>(j)];
        }
        return p;
    }

    [[nodiscard]] Eigen::VectorXd extract(const PatternParams& p) const
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(free.size()));
        for (std::size_t j = 0; j < free.size(); ++j) {
            v[static_cast<Eigen::Index>(j)] = param_value(p, free[j].param);
        }
        return v;
    }

    [[nodiscard]] Eigen::VectorXd clamp(Eigen::VectorXd v) const
    {
        for (std::size_t j = 0; j < free.size(); ++j) {
            auto& x = v[static_cast<Eigen::Index>(j)];
            x = std::clamp(x, free[j].lower, free[j].upper);
        }
        return v;
    }
};

/// Poisson weight sqrt(max(count, 1)).
inline double count_sigma(double count) { return std::sqrt(std::max(count, 1.0)); }

/// r_i = (count_i - dwell_i model(x_i)) / sigma_i.
inline Eigen::VectorXd residuals(const FitProblem& problem, const PatternParams& params)
{
    Eigen::VectorXd r(static_cast<Eigen::Index>(problem.data.size()));
    for (std::size_t i = 0; i < problem.data.size(); ++i) {
        const auto& d = problem.data[i];
        r[static_cast<Eigen::Index>(i)] =
            (d.count - d.dwell * problem.model.rate(d.position, params)) / count_sigma(d.count);
    }
    return r;
}

namespace detail {
/// Size below which a relative step makes no sense: the phase is an angle and
/// the centre an offset from an arbitrary stage zero.
inline double step_scale(Param p)
{
    switch (p) {
    case Param::phase: return 1.0;
    case Param::center: return 1e-3;
    default: return 0.0;
    }
}
} // namespace detail

/// Central-difference Jacobian of the residuals, step
/// max(1e-6 max(|p|, typical scale), 1e-12).
inline Eigen::MatrixXd numeric_jacobian(const FitProblem& problem, const PatternParams& params)
{
    const auto n = static_cast<Eigen::Index>(problem.data.size());
    const auto m = static_cast<Eigen::Index>(problem.size());
    Eigen::MatrixXd jac(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Param which = problem.free[static_cast<std::size_t>(j)].param;
        const double value = param_value(params, which);
        const double h = std::max(1e-6 * std::max(std::abs(value), detail::step_scale(which)), 1e-12);
        PatternParams up = params;
        PatternParams down = params;
        param_ref(up, which) = value + h;
        param_ref(down, which) = value - h;
        jac.col(j) = (residuals(problem, up) - residuals(problem, down)) / (2.0 * h);
    }
    return jac;
}

namespace detail {

/// d/dbeta of sinc^2(beta).
inline double sinc_sq_derivative(double b)
{
    if (std::abs(b) < 1e-4) {
        return -2.0 * b / 3.0 + 8.0 * b * b * b / 45.0;
    }
    const double s = std::sin(b);
    return 2.0 * s * (b * std::cos(b) - s) / (b * b * b);
}

/// Gradient of the partial-coherence point density with respect to every
/// PatternParams field, in all_params order.
inline std::array<double, 8> partial_coherence_gradient(double x, const PatternParams& p)
{
    const double k = std::numbers::pi / (p.wavelength * p.screen_distance);
    const double u = x - p.center;
    const double a = k * p.slit_separation * u;
    const double b = k * p.slit_width * u;
    const double phi = 2.0 * a + p.phase;
    const double env = sinc_sq(b);
    const double denv = sinc_sq_derivative(b);
    const double fringe = 0.5 * (1.0 + p.visibility * std::cos(phi));
    const double dfringe_dphi = -0.5 * p.visibility * std::sin(phi);
    const double n0 = p.peak_rate;

    // Chain rule through alpha and beta.
    const auto via = [&](double dalpha, double dbeta) {
        return n0 * (denv * dbeta * fringe + env * dfringe_dphi * 2.0 * dalpha);
    };
    std::array<double, 8> g{};
    g[0] = via(-a / p.wavelength, -b / p.wavelength);
    g[1] = via(k * u, 0.0);
    g[2] = via(0.0, k * u);
    g[3] = via(-a / p.screen_distance, -b / p.screen_distance);
    g[4] = env * fringe;
    g[5] = n0 * env * 0.5 * std::cos(phi);
    g[6] = n0 * env * dfringe_dphi;
    g[7] = via(-k * p.slit_separation, -k * p.slit_width);
    return g;
}

} // namespace detail

/// Closed-form Jacobian of the residuals for the partial-coherence model,
/// including aperture averaging (averaging is linear, so derivatives are
/// averaged with the same quadrature).
inline Eigen::MatrixXd analytic_jacobian(const FitProblem& problem, const PatternParams& params)
{
    detail::require(problem.model.kind == ModelKind::partial_coherence,
                    "analytic Jacobian is available only for the partial-coherence model");
    const auto n = static_cast<Eigen::Index>(problem.data.size());
    const auto m = static_cast<Eigen::Index>(problem.size());
    Eigen::MatrixXd jac(n, m);
    const double aperture = problem.model.aperture;
    const auto& rule = aperture_rule();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& d = problem.data[static_cast<std::size_t>(i)];
        std::array<double, 8> g{};
        if (aperture == 0.0) {
            g = detail::partial_coherence_gradient(d.position, params);
        } else {
            for (std::size_t q = 0; q < aperture_quadrature_order; ++q) {
                const auto gq = detail::partial_coherence_gradient(
                    d.position + 0.5 * aperture * rule.nodes[q], params);
                for (std::size_t c = 0; c < g.size(); ++c) {
                    g[c] += 0.5 * rule.weights[q] * gq[c];
                }
            }
        }
        const double scale = -d.dwell / count_sigma(d.count);
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto which = static_cast<std::size_t>(problem.free[static_cast<std::size_t>(j)].param);
            jac(i, j) = scale * g[which];
        }
    }
    return jac;
}

/// Analytic Jacobian where available, finite differences otherwise.
inline Eigen::MatrixXd jacobian(const FitProblem& problem, const PatternParams& params)
{
    if (problem.model.kind == ModelKind::partial_coherence) {
        return analytic_jacobian(problem, params);
    }
    return numeric_jacobian(problem, params);
}

struct FitResult {
    std::vector<Param> params;
    Eigen::VectorXd estimates;
    Eigen::VectorXd errors;     ///< sqrt(diag(covariance))
    Eigen::MatrixXd covariance; ///< (J^T J)^-1 scaled by the reduced chi-square
    PatternParams best;         ///< fixed values merged with the estimates
    double cost = 0.0;          ///< 0.5 * sum r_i^2
    double reduced_chi_square = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination;
    std::vector<double> cost_history; ///< initial cost, then every accepted step
    std::vector<std::string> notes;

    [[nodiscard]] double estimate(Param p) const
    {
        for (std::size_t j = 0; j < params.size(); ++j) {
            if (params[j] == p) return estimates[static_cast<Eigen::Index>(j)];
        }
        return param_value(best, p);
    }

    [[nodiscard]] double error(Param p) const
    {
        for (std::size_t j = 0; j < params.size(); ++j) {
            if (params[j] == p) return errors[static_cast<Eigen::Index>(j)];
        }
        return 0.0;
    }
};

namespace detail {

/// Throws NumericError if the columns of J are (nearly) linearly dependent,
/// naming the parameters involved.
inline void check_identifiable(const FitProblem& problem, const Eigen::MatrixXd& normal)
{
    const auto m = normal.rows();
    Eigen::VectorXd scale(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        if (!(normal(j, j) > 0.0) || !std::isfinite(normal(j, j))) {
            throw NumericError("degenerate fit: the data do not depend on " +
                               std::string(param_name(problem.free[static_cast<std::size_t>(j)].param)));
        }
        scale[j] = 1.0 / std::sqrt(normal(j, j));
    }
    const Eigen::MatrixXd corr = scale.asDiagonal() * normal * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[m - 1];
    if (lo < 1e-13 * hi) {
        const Eigen::VectorXd v = eig.eigenvectors().col(0);
        std::ostringstream msg;
        msg << "degenerate fit: parameter combination not determined by the data:";
        for (Eigen::Index j = 0; j < m; ++j) {
            if (std::abs(v[j]) > 0.1) {
                msg << ' ' << (v[j] >= 0 ? '+' : '-') << std::abs(v[j]) << '*'
                    << param_name(problem.free[static_cast<std::size_t>(j)].param);
            }
        }
        throw NumericError(msg.str());
    }
}

} // namespace detail

/// Levenberg-Marquardt fit of a FitProblem, with covariance (J^T J)^-1 scaled
/// by the reduced chi-square at the solution.
inline FitResult levenberg_marquardt(const FitProblem& problem, const PatternParams& initial,
                                     const LmOptions& opt = {})
{
    problem.validate();
    Eigen::VectorXd p = problem.extract(initial);
    for (std::size_t j = 0; j < problem.size(); ++j) {
        const auto& f = problem.free[j];
        const double v = p[static_cast<Eigen::Index>(j)];
        detail::require(v >= f.lower && v <= f.upper,
                        "fit: initial " + std::string(param_name(f.param)) + " = " +
                            std::to_string(v) + " lies outside its bounds");
    }

    const auto m = static_cast<Eigen::Index>(problem.size());
    const auto n = static_cast<Eigen::Index>(problem.data.size());
    Eigen::VectorXd lower(m);
    Eigen::VectorXd upper(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        lower[j] = problem.free[static_cast<std::size_t>(j)].lower;
        upper[j] = problem.free[static_cast<std::size_t>(j)].upper;
    }
    LmOutcome lm = minimize_least_squares(
        [&](const Eigen::VectorXd& v) { return residuals(problem, problem.apply(v)); },
        [&](const Eigen::VectorXd& v) { return jacobian(problem, problem.apply(v)); }, p, lower, upper,
        opt);
    p = lm.solution;
    const double cost = lm.cost;

    FitResult res;
    res.iterations = lm.iterations;
    res.converged = lm.converged;
    res.termination = std::move(lm.termination);
    res.cost_history = std::move(lm.cost_history);
    res.params.reserve(problem.size());
    for (const auto& f : problem.free) {
        res.params.push_back(f.param);
    }
    res.cost = cost;
    const auto dof = static_cast<double>(n - m);
    res.reduced_chi_square = 2.0 * cost / dof;

    const Eigen::MatrixXd jac = jacobian(problem, problem.apply(p));
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    detail::check_identifiable(problem, normal);
    // Invert in correlation scaling to keep the conditioning sane.
    const Eigen::VectorXd scale = normal.diagonal().array().sqrt().inverse();
    const Eigen::MatrixXd corr = scale.asDiagonal() * normal * scale.asDiagonal();
    const Eigen::MatrixXd corr_inv = corr.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
    res.covariance = scale.asDiagonal() * corr_inv * scale.asDiagonal();
    res.covariance = 0.5 * (res.covariance + res.covariance.transpose()).eval();
    res.covariance *= res.reduced_chi_square;
    res.errors = res.covariance.diagonal().array().max(0.0).sqrt();

    for (Eigen::Index j = 0; j < m; ++j) {
        if (res.params[static_cast<std::size_t>(j)] == Param::phase) {
            p[j] = normalize_phase(p[j]);
        }
    }
    res.estimates = p;
    res.best = problem.apply(p);
    res.best.phase = normalize_phase(res.best.phase);
    return res;
}

} // namespace slitlab
