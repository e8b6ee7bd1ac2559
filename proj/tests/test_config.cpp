#include <string>

#include <gtest/gtest.h>

#include "slitlab/error.hpp"
#include "slitlab/io/config.hpp"

using namespace slitlab;
using namespace slitlab::io;

namespace {

// Message of the ValidationError thrown while parsing `text`.
std::string parse_error(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "<no error>";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

} // namespace

TEST(Config, EmptyFileGivesApparatusDefaults)
{
    const auto cfg = parse_config("");
    EXPECT_EQ(cfg.mode, Mode::double_slit);
    EXPECT_DOUBLE_EQ(cfg.pattern.wavelength, 810e-9);
    EXPECT_DOUBLE_EQ(cfg.pattern.slit_separation, 0.62e-3);
    EXPECT_DOUBLE_EQ(cfg.pattern.slit_width, 0.13e-3);
    EXPECT_DOUBLE_EQ(cfg.pattern.screen_distance, 1.52);
    EXPECT_DOUBLE_EQ(cfg.scan.aperture, 0.7e-3);
    EXPECT_EQ(cfg.scan.point_count(), 341u);
    EXPECT_DOUBLE_EQ(cfg.scan.herald_rate, 35000.0);
    EXPECT_DOUBLE_EQ(cfg.scan.peak_coincidence_rate(), 7.0);
    EXPECT_FALSE(cfg.eraser.has_slit_polarizers());
}

TEST(Config, DefaultsTextParsesToDefaults)
{
    const auto a = parse_config(default_config_text());
    const auto b = parse_config("");
    EXPECT_EQ(a.pattern.slit_separation, b.pattern.slit_separation);
    EXPECT_EQ(a.scan.step, b.scan.step);
    EXPECT_EQ(a.scan.seed, b.scan.seed);
    EXPECT_TRUE(contains(default_config_text(), "coincidence_window_ns"));
}

TEST(Config, ValuesAndComments)
{
    const auto cfg = parse_config(
        "# reference run\n"
        "mode = eraser\n"
        "slit_width_mm = 0.12   # narrower\n"
        "\n"
        "slit_a_polarizer_deg = 45\n"
        "slit_b_polarizer_deg = -45\n"
        "analyzer_deg = 0\n"
        "seed = 18446744073709551615\n"
        "dwell_s = 3\n");
    EXPECT_EQ(cfg.mode, Mode::eraser);
    EXPECT_DOUBLE_EQ(cfg.pattern.slit_width, 0.12e-3);
    ASSERT_TRUE(cfg.eraser.analyzer.has_value());
    EXPECT_DOUBLE_EQ(*cfg.eraser.analyzer, 0.0);
    EXPECT_NEAR(*cfg.eraser.slit_a_polarizer, 0.7853981633974483, 1e-15);
    EXPECT_EQ(cfg.scan.seed, 18446744073709551615ULL);
    EXPECT_DOUBLE_EQ(cfg.scan.dwell, 3.0);
    EXPECT_EQ(cfg.model().kind, ModelKind::eraser);
}

TEST(Config, AutoVisibilityFromSource)
{
    const auto cfg = parse_config("visibility = auto\n");
    EXPECT_TRUE(cfg.visibility_from_source);
    EXPECT_NEAR(cfg.pattern.visibility, 0.78, 0.02);
}

TEST(Config, SeparationSmallerThanWidthRejected)
{
    const auto msg = parse_error("slit_separation_mm = 0.05\n");
    EXPECT_TRUE(contains(msg, "slit_separation_mm")) << msg;
    EXPECT_TRUE(contains(msg, "line 1")) << msg;
}

TEST(Config, VisibilityOutOfRange)
{
    const auto msg = parse_error("\nvisibility = 1.2\n");
    EXPECT_TRUE(contains(msg, "visibility")) << msg;
    EXPECT_TRUE(contains(msg, "line 2")) << msg;
    EXPECT_TRUE(contains(msg, "range")) << msg;
}

TEST(Config, UnknownKeyNamesLine)
{
    const auto msg = parse_error("mode = double\nslit_spacing_mm = 0.6\n");
    EXPECT_TRUE(contains(msg, "line 2")) << msg;
    EXPECT_TRUE(contains(msg, "slit_spacing_mm")) << msg;
}

TEST(Config, UnitMismatch)
{
    const auto msg = parse_error("slit_width_um = 130\n");
    EXPECT_TRUE(contains(msg, "unit")) << msg;
    EXPECT_TRUE(contains(msg, "slit_width")) << msg;
}

TEST(Config, OtherErrors)
{
    EXPECT_TRUE(contains(parse_error("dwell_s = 3\ndwell_s = 4\n"), "duplicate"));
    EXPECT_TRUE(contains(parse_error("dwell_s = ten\n"), "dwell_s"));
    EXPECT_TRUE(contains(parse_error("dwell_s = 0\n"), "dwell_s"));
    EXPECT_TRUE(contains(parse_error("dwell_s\n"), "line 1"));
    EXPECT_TRUE(contains(parse_error("mode = triple\n"), "mode"));
    EXPECT_TRUE(contains(parse_error("seed = -3\n"), "seed"));
    EXPECT_TRUE(contains(parse_error("slit_a_polarizer_deg = 45\n"), "slit_a_polarizer_deg"));
    EXPECT_TRUE(contains(parse_error("scan_start_mm = 5\nscan_stop_mm = 1\n"), "scan_stop_mm"));
    EXPECT_TRUE(contains(parse_error("pair_efficiency = 2\n"), "pair_efficiency"));
    EXPECT_TRUE(contains(parse_error("splitter_ratio = 1\n"), "splitter_ratio"));
    EXPECT_TRUE(contains(parse_error("wavelength_nm = nan\n"), "wavelength_nm"));
    EXPECT_TRUE(contains(parse_error("g2_source = laser\n"), "g2_source"));
}

TEST(Config, ModeSelectsModel)
{
    EXPECT_EQ(parse_config("mode = single\n").model().kind, ModelKind::single_slit);
    EXPECT_EQ(parse_config("mode = double\n").model().kind, ModelKind::partial_coherence);
    EXPECT_EQ(parse_config("mode = g2\ng2_source = poissonian\n").g2_source, G2Source::poissonian);
    EXPECT_EQ(parse_config("mode = pattern-only\n").mode, Mode::pattern_only);
}
