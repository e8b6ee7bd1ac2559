#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "slitlab/coherence.hpp"
#include "slitlab/error.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/quadrature.hpp"
#include "slitlab/units.hpp"

using namespace slitlab;
using std::numbers::pi;

namespace {

PatternParams apparatus(double d_mm = 0.62, double b_mm = 0.13)
{
    PatternParams p;
    p.wavelength = 810e-9;
    p.screen_distance = 1.52;
    p.slit_separation = d_mm * 1e-3;
    p.slit_width = b_mm * 1e-3;
    p.peak_rate = 7.0;
    return p;
}

double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// Local maximum of f on [lo, hi] by golden-section search.
template <class F>
double golden_max(F f, double lo, double hi)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
        const double c = b - g * (b - a);
        const double d = a + g * (b - a);
        if (f(c) > f(d)) b = d; else a = c;
    }
    return 0.5 * (a + b);
}

} // namespace

TEST(Alpha, ZeroAtCenter)
{
    auto p = apparatus();
    p.center = 1.3e-3;
    EXPECT_EQ(alpha(p.center, p), 0.0);
    EXPECT_EQ(beta(p.center, p), 0.0);
}

TEST(Alpha, OneMillimetreOffAxis)
{
    const auto p = apparatus();
    // pi * 0.62e-3 * 1e-3 / (810e-9 * 1.52), evaluated by hand: 1.582023
    EXPECT_NEAR(alpha(1e-3, p), 1.582023, 1e-6);
    EXPECT_NEAR(alpha(1e-3, p), 1.5818, 1e-3);
}

TEST(Alpha, LinearInSeparation)
{
    auto p = apparatus();
    const double a1 = alpha(2.7e-3, p);
    p.slit_separation *= 2.0;
    EXPECT_DOUBLE_EQ(alpha(2.7e-3, p), 2.0 * a1);
}

TEST(Beta, FirstEnvelopeMinimumNearNinePointFiveMillimetres)
{
    const auto p = apparatus();
    EXPECT_NEAR(beta(9.47e-3, p), pi, 1e-3);
    // sin(beta)/beta vanishes at beta = +-pi
    const double x1 = p.wavelength * p.screen_distance / p.slit_width;
    EXPECT_NEAR(std::sin(beta(x1, p)), 0.0, 1e-12);
    EXPECT_NEAR(std::sin(beta(-x1, p)), 0.0, 1e-12);
    EXPECT_LT(single_slit_density(x1, p), 1e-25);
}

TEST(SincSq, RemovableSingularity)
{
    EXPECT_EQ(sinc_sq(0.0), 1.0);
    // continuous across the series switch
    EXPECT_NEAR(sinc_sq(0.99e-8), 1.0, 1e-15);
    EXPECT_NEAR(sinc_sq(1.01e-8), 1.0, 1e-15);
    EXPECT_NEAR(sinc_sq(1e-3), std::pow(std::sin(1e-3) / 1e-3, 2), 1e-15);
}

TEST(SincSq, SecondaryMaximaFourPointSevenAndOnePointSixPercent)
{
    const double m1 = sinc_sq(golden_max(sinc_sq, 1.1 * pi, 1.9 * pi));
    const double m2 = sinc_sq(golden_max(sinc_sq, 2.1 * pi, 2.9 * pi));
    EXPECT_NEAR(m1, 0.047, 0.001);
    EXPECT_NEAR(m2, 0.016, 0.001);
}

TEST(DoubleSlit, PeakAtCenter)
{
    auto p = apparatus();
    p.center = -0.4e-3;
    EXPECT_DOUBLE_EQ(double_slit_density(p.center, p), p.peak_rate);
}

TEST(DoubleSlit, ZeroHalfAFringeAway)
{
    const auto p = apparatus();
    const double half = 0.5 * p.wavelength * p.screen_distance / p.slit_separation;
    EXPECT_LT(double_slit_density(half, p), 1e-30 * p.peak_rate + 1e-30);
    EXPECT_LT(double_slit_density(-half, p), 1e-30 * p.peak_rate + 1e-30);
}

namespace {
std::vector<double> central_lobe(const PatternParams& p)
{
    const double edge = p.wavelength * p.screen_distance / p.slit_width;
    const int n = 200001;
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        const double x = -edge + 2.0 * edge * i / (n - 1);
        y[static_cast<std::size_t>(i)] = double_slit_density(x, p);
    }
    return y;
}

// every strict local maximum, partial fringes at the envelope edge included
int local_maxima(const std::vector<double>& y)
{
    int count = 0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] > y[i + 1]) ++count;
    }
    return count;
}

// maxima with an interference minimum on both sides
int full_fringes(const std::vector<double>& y)
{
    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] <= y[i - 1] && y[i] < y[i + 1]) minima.push_back(i);
    }
    int count = 0;
    for (std::size_t k = 0; k + 1 < minima.size(); ++k) {
        for (std::size_t i = minima[k] + 1; i < minima[k + 1]; ++i) {
            if (y[i] > y[i - 1] && y[i] > y[i + 1]) {
                ++count;
                break;
            }
        }
    }
    return count;
}
} // namespace

TEST(DoubleSlit, SevenMaximaInsideEnvelopeForRatioFour)
{
    EXPECT_EQ(full_fringes(central_lobe(apparatus(0.52, 0.13))), 7);
}

TEST(DoubleSlit, MaximaCountIsTwoRatioMinusOne)
{
    for (int ratio : {2, 3, 5, 6}) {
        EXPECT_EQ(full_fringes(central_lobe(apparatus(0.1 * ratio, 0.1))), 2 * ratio - 1) << "d/b = " << ratio;
    }
}

TEST(DoubleSlit, PartialFringesSitBetweenLastMinimumAndEnvelopeZero)
{
    for (int ratio : {2, 3, 4, 5, 6}) {
        EXPECT_EQ(local_maxima(central_lobe(apparatus(0.1 * ratio, 0.1))), 2 * ratio + 1) << "d/b = " << ratio;
    }
}

TEST(PartialCoherence, FullVisibilityIsDoubleSlit)
{
    auto p = apparatus();
    p.visibility = 1.0;
    p.phase = 0.0;
    for (int i = -500; i <= 500; ++i) {
        const double x = i * 25e-6;
        const double a = double_slit_density(x, p);
        const double b = partial_coherence_density(x, p);
        EXPECT_LE(std::abs(a - b), 1e-12 * p.peak_rate) << x;
    }
}

TEST(PartialCoherence, ZeroVisibilityIsHalfTheEnvelope)
{
    auto p = apparatus();
    p.visibility = 0.0;
    p.phase = 0.9;
    for (int i = -500; i <= 500; ++i) {
        const double x = i * 23e-6 + 1e-7;
        const double s = single_slit_density(x, p);
        if (s < 1e-12) continue;
        EXPECT_NEAR(partial_coherence_density(x, p) / s, 0.5, 1e-12) << x;
    }
}

TEST(PartialCoherence, MaxMinRatioFromVisibility)
{
    auto p = apparatus();
    p.visibility = 0.65;
    // fringe extrema with the envelope divided out
    const double spacing = fringe_spacing(p);
    const double top = partial_coherence_density(spacing, p) / sinc_sq(beta(spacing, p));
    const double bottom = partial_coherence_density(1.5 * spacing, p) / sinc_sq(beta(1.5 * spacing, p));
    EXPECT_NEAR(top / bottom, 1.65 / 0.35, 1e-9);
    EXPECT_NEAR(top / bottom, 4.71, 0.01);
}

TEST(SingleSlit, PeakAndSymmetry)
{
    auto p = apparatus(0.62, 0.285);
    p.center = 0.25e-3;
    EXPECT_DOUBLE_EQ(single_slit_density(p.center, p), p.peak_rate);
    for (int i = 1; i < 300; ++i) {
        const double u = i * 41e-6;
        EXPECT_NEAR(single_slit_density(p.center + u, p), single_slit_density(p.center - u, p),
                    1e-12 * p.peak_rate);
    }
}

namespace {
// k-th zero of the envelope at x > 0, located by bisection on sin(beta).
double envelope_zero(const PatternParams& p, int k)
{
    const double guess = k * p.wavelength * p.screen_distance / p.slit_width;
    double lo = 0.9 * guess, hi = 1.1 * guess;
    const auto f = [&](double x) { return std::sin(beta(x, p)) * (k % 2 ? 1.0 : -1.0); };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}
} // namespace

TEST(SingleSlit, MinimaSpacing)
{
    // b = 0.285 mm: second-order minima at +-2 lambda L / b
    const auto p = apparatus(0.62, 0.285);
    EXPECT_NEAR(2.0 * envelope_zero(p, 2), 4.0 * p.wavelength * p.screen_distance / p.slit_width, 1e-12);
    EXPECT_NEAR(2.0 * envelope_zero(p, 2) * 1e3, 17.28, 0.01);
    // b = 0.25 mm nominal: the innermost minima sit about 10 mm apart
    EXPECT_NEAR(2.0 * envelope_zero(apparatus(0.62, 0.25), 1) * 1e3, 10.0, 0.2);
}

TEST(Geometry, EnvelopeWidth)
{
    EXPECT_NEAR(envelope_width(apparatus()) * 1e3, 18.94, 0.01);
    EXPECT_NEAR(envelope_width(apparatus()) * 1e3, 19.0, 0.5);
    EXPECT_NEAR(envelope_width(apparatus(0.62, 0.12)) * 1e3, 20.5, 0.05);
    EXPECT_DOUBLE_EQ(envelope_width(apparatus(0.62, 0.26)), 0.5 * envelope_width(apparatus(0.62, 0.13)));
}

TEST(Geometry, FringeSpacing)
{
    EXPECT_NEAR(fringe_spacing(apparatus()) * 1e3, 2.0, 0.02);
    for (double d : {0.3, 0.62, 0.9}) {
        const auto p = apparatus(d, 0.11);
        EXPECT_NEAR(fringe_spacing(p), envelope_width(p) * p.slit_width / (2.0 * p.slit_separation), 1e-15);
    }
    // d/b = 4 with a 20 mm envelope: 20 / 8 = 2.5 mm fringes
    PatternParams p = apparatus(0.48, 0.12);
    const double dx = 20e-3;
    EXPECT_NEAR(dx * p.slit_width / (2.0 * p.slit_separation) * 1e3, 2.5, 1e-12);
}

TEST(Params, Validation)
{
    auto p = apparatus();
    EXPECT_NO_THROW(p.validate());
    p.slit_separation = 0.05e-3;
    EXPECT_THROW(p.validate(), ValidationError);
    p = apparatus();
    p.visibility = 1.2;
    EXPECT_THROW(p.validate(), ValidationError);
    p = apparatus();
    p.wavelength = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = apparatus();
    p.screen_distance = -1.0;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Params, PhaseNormalization)
{
    EXPECT_DOUBLE_EQ(normalize_phase(pi), pi);
    EXPECT_DOUBLE_EQ(normalize_phase(-pi), pi);
    EXPECT_NEAR(normalize_phase(3.0 * pi / 2.0), -pi / 2.0, 1e-15);
    for (double phi = -20.0; phi < 20.0; phi += 0.37) {
        const double n = normalize_phase(phi);
        EXPECT_GT(n, -pi);
        EXPECT_LE(n, pi);
        EXPECT_NEAR(std::cos(n), std::cos(phi), 1e-12);
    }
}

TEST(Densities, NonNegativeAndSymmetric)
{
    auto p = apparatus();
    p.visibility = 0.77;
    p.center = 0.3e-3;
    for (int i = 0; i <= 4000; ++i) {
        const double u = i * 7.3e-6;
        for (auto f : {double_slit_density, partial_coherence_density, single_slit_density}) {
            const double plus = f(p.center + u, p);
            const double minus = f(p.center - u, p);
            ASSERT_GE(plus, 0.0);
            ASSERT_GE(minus, 0.0);
            EXPECT_LE(std::abs(plus - minus), 1e-12 * std::max(plus, 1e-12 * p.peak_rate)) << u;
        }
    }
}

TEST(Coherence, FocusedWaist)
{
    SourceModel s;
    s.pump_wavelength = 405e-9;
    s.focus_length = 0.25;
    s.pump_waist = 0.52e-3;
    EXPECT_NEAR(focused_waist(s) * 1e3, 0.062, 0.001);
    EXPECT_NEAR(focused_waist(s) * 1e3, 0.064, 0.05 * 0.064);
    const double w = focused_waist(s);
    s.focus_length *= 2.0;
    EXPECT_DOUBLE_EQ(focused_waist(s), 2.0 * w);
    s.pump_waist = 1e6;
    EXPECT_LT(focused_waist(s), 1e-12);
}

TEST(Coherence, SourceAngularSize)
{
    EXPECT_NEAR(source_angular_size(0.064e-3, 0.30), 4.3e-4, 0.05e-4);
    // unfocused 1 mm beam
    EXPECT_NEAR(source_angular_size(0.5e-3, 0.30), 3.3e-3, 0.05e-3);
    SourceModel s;
    const double a = source_angular_size(s);
    s.crystal_distance *= 2.0;
    EXPECT_DOUBLE_EQ(source_angular_size(s), 0.5 * a);
}

TEST(Coherence, GaussianSourceVisibility)
{
    EXPECT_NEAR(visibility_gaussian_source(0.62e-3, 0.064e-3, 810e-9, 0.30), 0.77, 0.01);
    EXPECT_NEAR(visibility_gaussian_source(1e-12, 0.064e-3, 810e-9, 0.30), 1.0, 1e-12);
    EXPECT_NEAR(visibility_gaussian_source(0.62e-3, 1e-15, 810e-9, 0.30), 1.0, 1e-12);
}

TEST(Coherence, VisibilityDecreasesWithSeparationAndWaist)
{
    double prev = 2.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = visibility_gaussian_source(i * 0.02e-3, 0.064e-3, 810e-9, 0.30);
        EXPECT_LT(v, prev);
        EXPECT_GT(v, 0.0);
        prev = v;
    }
    prev = 2.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = visibility_gaussian_source(0.62e-3, i * 0.005e-3, 810e-9, 0.30);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Aperture, ZeroWidthIsPointValue)
{
    auto p = apparatus();
    p.visibility = 0.5;
    for (double x : {-3e-3, 0.0, 0.77e-3, 8e-3}) {
        EXPECT_EQ(aperture_averaged_density(x, p, 0.0, partial_coherence_density),
                  partial_coherence_density(x, p));
    }
}

TEST(Aperture, CosineAttenuationMatchesClosedForm)
{
    // mean of cos(2 pi u / P) over [x - a/2, x + a/2] = cos(2 pi x / P) sinc(pi a / P)
    const double period = 2e-3;
    PatternParams p = apparatus();
    const auto cosine = [&](double u, const PatternParams&) { return std::cos(2.0 * pi * u / period); };
    for (double a : {0.1e-3, 0.35e-3, 0.7e-3, 1.3e-3, 2e-3}) {
        for (double x : {0.0, 0.3e-3, 1.1e-3}) {
            const double got = aperture_averaged_density(x, p, a, cosine);
            const double want = std::cos(2.0 * pi * x / period) * aperture_visibility_factor(a, period);
            EXPECT_NEAR(got, want, 1e-9) << "a=" << a << " x=" << x;
        }
    }
    EXPECT_NEAR(aperture_visibility_factor(period, period), 0.0, 1e-15);
    EXPECT_NEAR(aperture_visibility_factor(0.7e-3, 2e-3), 0.81, 0.01);
}

TEST(Aperture, FullPeriodFlattensFringes)
{
    auto p = apparatus();
    p.slit_width = 1e-9; // flat envelope
    const double period = fringe_spacing(p);
    for (double x : {0.0, 0.25 * period, 0.5 * period}) {
        EXPECT_NEAR(aperture_averaged_density(x, p, period, double_slit_density), 0.5 * p.peak_rate,
                    1e-9 * p.peak_rate);
    }
}

TEST(Quadrature, IntegratesPolynomialsExactly)
{
    const auto& rule = aperture_rule();
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14);
    // degree 64 is within 2N - 1
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) integral += rule.weights[i] * std::pow(rule.nodes[i], 64);
    EXPECT_NEAR(integral, 2.0 / 65.0, 1e-14);
}

TEST(Units, RoundTrip)
{
    EXPECT_DOUBLE_EQ(units::to_mm(units::mm(0.62)), 0.62);
    EXPECT_DOUBLE_EQ(units::to_nm(units::nm(810)), 810.0);
    EXPECT_NEAR(units::deg(180.0), pi, 1e-15);
}
