#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace slitlab {

/// Nodes and weights of an N-point Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendre {
    static_assert(N >= 2);

    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre()
    {
        // Newton iteration on P_N from the Chebyshev-like initial guess; the
        // rule is symmetric so only half the roots are solved for.
        for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double kk = static_cast<double>(k);
                    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
            // Recompute the derivative at the converged root.
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= N; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            weights[i] = w;
            weights[N - 1 - i] = w;
        }
        if constexpr (N % 2 == 1) {
            nodes[N / 2] = 0.0;
        }
    }
};

inline constexpr std::size_t aperture_quadrature_order = 33;

inline const GaussLegendre<aperture_quadrature_order>& aperture_rule()
{
    static const GaussLegendre<aperture_quadrature_order> rule;
    return rule;
}

/// Mean of f over [center - width/2, center + width/2]. width == 0 returns
/// f(center) exactly.
template <class F>
double window_mean(F&& f, double center, double width)
{
    if (width == 0.0) {
        return f(center);
    }
    const auto& rule = aperture_rule();
    const double half = 0.5 * width;
    double sum = 0.0;
    for (std::size_t i = 0; i < aperture_quadrature_order; ++i) {
        sum += rule.weights[i] * f(center + half * rule.nodes[i]);
    }
    return 0.5 * sum;
}

} // namespace slitlab
