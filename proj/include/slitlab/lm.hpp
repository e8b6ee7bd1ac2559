#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slitlab/error.hpp"

namespace slitlab {

struct LmOptions {
    int max_iterations = 200;
    double cost_tolerance = 1e-10;     ///< relative cost change
    double gradient_tolerance = 1e-10; ///< max |g_j| / sqrt((J^T J)_jj)
    double initial_damping = 1e-3;
};

struct LmOutcome {
    Eigen::VectorXd solution;
    double cost = 0.0; ///< 0.5 * sum r_i^2
    int iterations = 0;
    bool converged = false;
    std::string termination;
    std::vector<double> cost_history; ///< initial cost, then every accepted step
};

/// Bound-constrained Levenberg-Marquardt on residuals r(p) with Jacobian
/// J(p): Marquardt diagonal scaling, bounds by projection, a step is kept only
/// if it does not raise the cost.
template <class Residuals, class Jacobian>
LmOutcome minimize_least_squares(Residuals&& residuals, Jacobian&& jacobian, Eigen::VectorXd p,
                                 const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const LmOptions& opt = {})
{
    detail::require(lower.size() == p.size() && upper.size() == p.size(), "lm: bounds size mismatch");
    constexpr double tiny = std::numeric_limits<double>::min();
    const auto clamp = [&](Eigen::VectorXd v) { return v.cwiseMax(lower).cwiseMin(upper).eval(); };

    LmOutcome out;
    Eigen::VectorXd r = residuals(p);
    double cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(cost)) {
        throw NumericError("lm: residuals are not finite at the starting point");
    }
    out.cost_history.push_back(cost);
    double damping = opt.initial_damping;

    for (out.iterations = 1; out.iterations <= opt.max_iterations; ++out.iterations) {
        const Eigen::MatrixXd jac = jacobian(p);
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        // A parameter can drop out transiently (phase when visibility sits at
        // 0); keep it inert rather than failing.
        Eigen::VectorXd diag = normal.diagonal();
        const double diag_floor = std::max(diag.maxCoeff(), 1.0) * 1e-20;
        diag = diag.cwiseMax(diag_floor);
        const double scaled_grad = (grad.array().abs() / diag.array().sqrt()).maxCoeff();
        if (scaled_grad < opt.gradient_tolerance) {
            out.converged = true;
            out.termination = "gradient";
            break;
        }

        bool accepted = false;
        double relative_change = 0.0;
        while (!accepted) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += damping * diag;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            const Eigen::VectorXd step = ldlt.solve(-grad);
            if (ldlt.info() == Eigen::Success && step.allFinite()) {
                const Eigen::VectorXd trial = clamp(p + step);
                const Eigen::VectorXd r_trial = residuals(trial);
                const double trial_cost = 0.5 * r_trial.squaredNorm();
                if (std::isfinite(trial_cost) && trial_cost <= cost) {
                    relative_change = (cost - trial_cost) / std::max(cost, tiny);
                    p = trial;
                    r = r_trial;
                    cost = trial_cost;
                    out.cost_history.push_back(cost);
                    damping = std::max(damping / 10.0, 1e-12);
                    accepted = true;
                    break;
                }
            }
            damping *= 10.0;
            if (damping > 1e16) {
                break;
            }
        }
        if (!accepted) {
            out.converged = true;
            out.termination = "no downhill step";
            break;
        }
        if (relative_change < opt.cost_tolerance) {
            out.converged = true;
            out.termination = "cost";
            break;
        }
    }
    if (!out.converged) {
        out.iterations = opt.max_iterations;
        out.termination = "max iterations";
    }
    out.solution = p;
    out.cost = cost;
    return out;
}

} // namespace slitlab
