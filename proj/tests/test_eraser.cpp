#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slitlab/eraser.hpp"
#include "slitlab/error.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/recipes.hpp"
#include "slitlab/units.hpp"

using namespace slitlab;
using std::numbers::pi;

namespace {

PatternParams apparatus()
{
    PatternParams p;
    p.peak_rate = 7.0;
    return p;
}

// Contrast of the fringes near the pattern centre, with the envelope divided out.
double measured_visibility(const PatternParams& p, const EraserSetup& e)
{
    const double spacing = fringe_spacing(p);
    double hi = 0.0, lo = 1e300;
    for (int i = 1; i <= 400; ++i) {
        const double x = 1e-9 + spacing * i / 400.0;
        const double v = eraser_density(x, p, e) / sinc_sq(beta(x, p));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return (hi - lo) / (hi + lo);
}

} // namespace

TEST(EraserAmplitudes, CrossedPolarizersNoAnalyzer)
{
    const auto a = eraser_amplitudes(crossed_polarizer_eraser(std::nullopt));
    EXPECT_NEAR(a.amp_a, 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(a.amp_b, 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_FALSE(a.coherent);
    EXPECT_NEAR(a.visibility(), 0.0, 1e-15);
    EXPECT_NEAR(measured_visibility(apparatus(), crossed_polarizer_eraser(std::nullopt)), 0.0, 1e-12);
}

TEST(EraserAmplitudes, VerticalAnalyzerErasesPathInformation)
{
    const auto a = eraser_amplitudes(crossed_polarizer_eraser(0.0));
    EXPECT_NEAR(a.amp_a, 0.5, 1e-15);
    EXPECT_NEAR(a.amp_b, 0.5, 1e-15);
    EXPECT_TRUE(a.coherent);
    EXPECT_NEAR(a.visibility(), 1.0, 1e-15);
    EXPECT_NEAR(measured_visibility(apparatus(), crossed_polarizer_eraser(0.0)), 1.0, 1e-9);
}

TEST(EraserAmplitudes, AnalyzerAlongOnePolarizerBlocksTheOtherSlit)
{
    const auto a = eraser_amplitudes(crossed_polarizer_eraser(pi / 4.0));
    EXPECT_NEAR(a.amp_b, 0.0, 1e-15);
    EXPECT_GT(a.amp_a, 0.5);
    // only the single-slit envelope survives
    const auto p = apparatus();
    const auto e = crossed_polarizer_eraser(pi / 4.0);
    for (int i = -200; i <= 200; ++i) {
        const double x = i * 51e-6;
        EXPECT_NEAR(eraser_density(x, p, e), 0.25 * a.amp_a * a.amp_a * single_slit_density(x, p), 1e-12 * p.peak_rate);
    }
}

TEST(EraserAmplitudes, VisibilityFollowsCosTwiceAnalyzerAngle)
{
    // brute force over a 181-point grid from -90 to +90 degrees
    for (int i = 0; i <= 180; ++i) {
        const double theta = units::deg(-90.0 + i);
        const double aa = std::cos(theta - pi / 4.0) / std::sqrt(2.0);
        const double ab = std::cos(theta + pi / 4.0) / std::sqrt(2.0);
        const double oracle = std::abs(2.0 * aa * ab / (aa * aa + ab * ab));
        const double got = std::abs(eraser_amplitudes(crossed_polarizer_eraser(theta)).visibility());
        EXPECT_NEAR(got, oracle, 1e-9) << "theta=" << i - 90;
        EXPECT_NEAR(got, std::abs(std::cos(2.0 * theta)), 1e-9) << "theta=" << i - 90;
    }
}

TEST(EraserAmplitudes, InvertedFringesBeyondFortyFiveDegrees)
{
    EXPECT_NEAR(eraser_amplitudes(crossed_polarizer_eraser(pi / 2.0)).visibility(), -1.0, 1e-12);
    const auto p = apparatus();
    const auto e = crossed_polarizer_eraser(pi / 2.0);
    EXPECT_NEAR(eraser_density(0.0, p, e), 0.0, 1e-12);
}

TEST(EraserDensity, NoPolarizersIsDoubleSlit)
{
    const auto p = apparatus();
    const EraserSetup none;
    for (int i = -300; i <= 300; ++i) {
        const double x = i * 37e-6;
        EXPECT_NEAR(eraser_density(x, p, none), double_slit_density(x, p), 1e-12 * p.peak_rate);
    }
}

TEST(EraserDensity, NonOrthogonalPolarizersPartialContrast)
{
    EraserSetup e;
    e.slit_a_polarizer = units::deg(20.0);
    e.slit_b_polarizer = units::deg(-20.0);
    const auto a = eraser_amplitudes(e);
    EXPECT_FALSE(a.coherent);
    EXPECT_NEAR(a.path_coherence, std::cos(units::deg(40.0)), 1e-15);
    EXPECT_NEAR(measured_visibility(apparatus(), e), std::cos(units::deg(40.0)), 1e-9);
}

TEST(EraserSetup, RejectsSinglePolarizer)
{
    EraserSetup e;
    e.slit_a_polarizer = 0.3;
    EXPECT_THROW(eraser_amplitudes(e), ValidationError);
    EXPECT_THROW((void)eraser_density(0.0, apparatus(), e), ValidationError);
}

TEST(EraserDensity, NonNegative)
{
    auto p = apparatus();
    p.visibility = 0.9;
    for (int k = 0; k < 36; ++k) {
        const auto e = crossed_polarizer_eraser(units::deg(5.0 * k));
        for (int i = -100; i <= 100; ++i) {
            EXPECT_GE(eraser_density(i * 97e-6, p, e), 0.0);
        }
    }
}
