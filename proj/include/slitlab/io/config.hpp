#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slitlab/coherence.hpp"
#include "slitlab/eraser.hpp"
#include "slitlab/error.hpp"
#include "slitlab/g2.hpp"
#include "slitlab/model.hpp"
#include "slitlab/pattern.hpp"
#include "slitlab/scan.hpp"
#include "slitlab/units.hpp"

namespace slitlab::io {

enum class Mode { double_slit, single_slit, eraser, g2, pattern_only };

inline std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::double_slit: return "double";
    case Mode::single_slit: return "single";
    case Mode::eraser: return "eraser";
    case Mode::g2: return "g2";
    case Mode::pattern_only: return "pattern-only";
    }
    return "?";
}

/// Everything needed to reproduce one experiment recipe.
struct ExperimentConfig {
    Mode mode = Mode::double_slit;
    PatternParams pattern{.peak_rate = 7.0};
    bool visibility_from_source = false;
    SourceModel source;
    EraserSetup eraser;
    ScanConfig scan;
    double splitter_ratio = 0.5;
    double g2_dwell = 1e6;
    G2Source g2_source = G2Source::heralded;

    /// Rate model implied by the mode: the partial-coherence pattern (ideal
    /// double slit when |V| = 1), the single slit, or the eraser optics.
    [[nodiscard]] PatternModel model() const
    {
        PatternModel m;
        m.aperture = scan.aperture;
        switch (mode) {
        case Mode::single_slit: m.kind = ModelKind::single_slit; break;
        case Mode::eraser:
            m.kind = ModelKind::eraser;
            m.eraser = eraser_amplitudes(eraser);
            break;
        default: m.kind = ModelKind::partial_coherence; break;
        }
        return m;
    }
};

namespace detail {

enum class Kind { number, angle_or_none, integer, mode, g2_source, visibility };

struct KeyInfo {
    std::string_view key;
    Kind kind;
    double scale; ///< file unit -> SI
    std::string_view fallback;
    std::string_view help;
};

// Order here is the order of --print-defaults.
inline const std::vector<KeyInfo>& key_table()
{
    static const std::vector<KeyInfo> table = {
        {"mode", Kind::mode, 1.0, "double", "double | single | eraser | g2 | pattern-only"},
        {"wavelength_nm", Kind::number, 1e-9, "810", "down-converted photon wavelength"},
        {"slit_separation_mm", Kind::number, 1e-3, "0.62", "center-to-center slit separation d"},
        {"slit_width_mm", Kind::number, 1e-3, "0.13", "slit width b"},
        {"screen_distance_mm", Kind::number, 1e-3, "1520", "slit-to-screen distance (lens focal length)"},
        {"peak_rate_per_s", Kind::number, 1.0, "7", "pattern amplitude for theoretical curves"},
        {"visibility", Kind::visibility, 1.0, "1", "|V| in [0, 1], or 'auto' to compute it from the source model"},
        {"phase_rad", Kind::number, 1.0, "0", "fringe phase delta"},
        {"center_mm", Kind::number, 1e-3, "0", "pattern center x0"},
        {"pump_wavelength_nm", Kind::number, 1e-9, "405", "pump laser wavelength"},
        {"pump_waist_mm", Kind::number, 1e-3, "0.52", "unfocused pump half-width"},
        {"focus_length_mm", Kind::number, 1e-3, "250", "pump focusing lens"},
        {"crystal_distance_mm", Kind::number, 1e-3, "300", "crystal-to-slits distance"},
        {"input_angle_deg", Kind::number, std::numbers::pi / 180.0, "0", "input polarization (0 = vertical)"},
        {"slit_a_polarizer_deg", Kind::angle_or_none, std::numbers::pi / 180.0, "none", "polarizer over slit A"},
        {"slit_b_polarizer_deg", Kind::angle_or_none, std::numbers::pi / 180.0, "none", "polarizer over slit B"},
        {"analyzer_deg", Kind::angle_or_none, std::numbers::pi / 180.0, "none", "polarizer after the slits"},
        {"scan_start_mm", Kind::number, 1e-3, "-12.5", "first stage position"},
        {"scan_stop_mm", Kind::number, 1e-3, "12.5", "last stage position (inclusive)"},
        {"scan_step_mm", Kind::number, 1e-3, "0.0735294117647059", "stage increment (25 mm / 340 = 341 points)"},
        {"dwell_s", Kind::number, 1.0, "10", "integration time per point"},
        {"aperture_mm", Kind::number, 1e-3, "0.7", "collection slit width a"},
        {"herald_rate_per_s", Kind::number, 1.0, "35000", "herald detector singles"},
        {"signal_rate_per_s", Kind::number, 1.0, "3000", "scan detector singles at the pattern peak"},
        {"pair_efficiency", Kind::number, 1.0, "0.0002", "P(herald has a detected partner at the peak); assumed, gives 7 coincidences/s"},
        {"coincidence_window_ns", Kind::number, 1e-9, "3", "coincidence window; assumed, not stated for the apparatus"},
        {"background_rate_per_s", Kind::number, 1.0, "25", "uncorrelated dark/stray singles; assumed"},
        {"seed", Kind::integer, 1.0, "1", "master random seed"},
        {"splitter_ratio", Kind::number, 1.0, "0.5", "g2: probability of transmission at the beam splitter"},
        {"g2_dwell_s", Kind::number, 1.0, "1e6", "g2: total integration time"},
        {"g2_source", Kind::g2_source, 1.0, "heralded", "g2: heralded | poissonian"},
    };
    return table;
}

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string_view unit_stem(std::string_view key)
{
    for (std::string_view suffix : {"_per_s", "_mm", "_nm", "_um", "_ns", "_ms", "_s", "_m", "_deg", "_rad", "_cm"}) {
        if (key.size() > suffix.size() && key.substr(key.size() - suffix.size()) == suffix) {
            return key.substr(0, key.size() - suffix.size());
        }
    }
    return key;
}

struct Setting {
    std::string value;
    int line = 0; ///< 0 for defaults
};

inline std::string where(int line)
{
    return line > 0 ? "config line " + std::to_string(line) : "config default";
}

} // namespace detail

/// Text of a config file holding every key at its default, with comments.
inline std::string default_config_text()
{
    std::ostringstream out;
    out << "# slitlab experiment config: key = value, '#' starts a comment.\n"
        << "# Units are in the key suffix (_mm, _nm, _ns, _s, _deg, _per_s).\n";
    for (const auto& k : detail::key_table()) {
        out << k.key << " = " << k.fallback << "  # " << k.help << '\n';
    }
    return out.str();
}

/// Parse and validate a flat `key = value` config. Omitted keys take their
/// defaults. Errors name the key and line.
inline ExperimentConfig parse_config(std::string_view text)
{
    using detail::Kind;
    std::map<std::string, detail::Setting, std::less<>> settings;
    for (const auto& k : detail::key_table()) {
        settings[std::string(k.key)] = {std::string(k.fallback), 0};
    }

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::map<std::string, int, std::less<>> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(detail::where(line_no) + ": expected 'key = value', got '" +
                                  std::string(line) + "'");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (!settings.contains(key)) {
            const auto stem = detail::unit_stem(key);
            for (const auto& k : detail::key_table()) {
                if (detail::unit_stem(k.key) == stem && stem != k.key) {
                    throw ValidationError(detail::where(line_no) + ": unit mismatch for '" + key +
                                          "'; this quantity is given as '" + std::string(k.key) + "'");
                }
            }
            throw ValidationError(detail::where(line_no) + ": unknown key '" + key + "'");
        }
        if (auto it = seen.find(key); it != seen.end()) {
            throw ValidationError(detail::where(line_no) + ": duplicate key '" + key +
                                  "' (first set on line " + std::to_string(it->second) + ")");
        }
        if (value.empty()) {
            throw ValidationError(detail::where(line_no) + ": missing value for '" + key + "'");
        }
        seen[key] = line_no;
        settings[key] = {value, line_no};
    }

    // Typed accessors; every failure names key and line.
    const auto fail = [&](std::string_view key, const std::string& what) -> ValidationError {
        const auto& s = settings.at(std::string(key));
        return ValidationError(detail::where(s.line) + ": " + std::string(key) + " = " + s.value + ": " + what);
    };
    const auto info_of = [](std::string_view key) -> const detail::KeyInfo& {
        for (const auto& k : detail::key_table()) {
            if (k.key == key) return k;
        }
        throw std::logic_error("config key table is missing " + std::string(key));
    };
    const auto number = [&](std::string_view key) {
        const auto v = detail::parse_double(settings.at(std::string(key)).value);
        if (!v) throw fail(key, "not a number");
        return *v * info_of(key).scale;
    };
    const auto positive = [&](std::string_view key) {
        const double v = number(key);
        if (!(v > 0.0)) throw fail(key, "must be > 0");
        return v;
    };
    const auto nonnegative = [&](std::string_view key) {
        const double v = number(key);
        if (!(v >= 0.0)) throw fail(key, "must be >= 0");
        return v;
    };
    const auto optional_angle = [&](std::string_view key) -> std::optional<double> {
        if (settings.at(std::string(key)).value == "none") return std::nullopt;
        return number(key);
    };

    ExperimentConfig cfg;
    {
        const auto& m = settings.at("mode").value;
        if (m == "double") cfg.mode = Mode::double_slit;
        else if (m == "single") cfg.mode = Mode::single_slit;
        else if (m == "eraser") cfg.mode = Mode::eraser;
        else if (m == "g2") cfg.mode = Mode::g2;
        else if (m == "pattern-only") cfg.mode = Mode::pattern_only;
        else throw fail("mode", "expected double, single, eraser, g2 or pattern-only");
    }

    auto& p = cfg.pattern;
    p.wavelength = positive("wavelength_nm");
    p.slit_separation = positive("slit_separation_mm");
    p.slit_width = positive("slit_width_mm");
    p.screen_distance = positive("screen_distance_mm");
    p.peak_rate = nonnegative("peak_rate_per_s");
    p.phase = normalize_phase(number("phase_rad"));
    p.center = number("center_mm");
    if (p.slit_separation < p.slit_width) {
        const bool d_later = settings.at("slit_separation_mm").line >= settings.at("slit_width_mm").line;
        throw fail(d_later ? "slit_separation_mm" : "slit_width_mm",
                   "slit_separation_mm must be >= slit_width_mm (slits cannot overlap)");
    }

    cfg.source.pump_wavelength = positive("pump_wavelength_nm");
    cfg.source.pump_waist = positive("pump_waist_mm");
    cfg.source.focus_length = positive("focus_length_mm");
    cfg.source.crystal_distance = positive("crystal_distance_mm");

    if (settings.at("visibility").value == "auto") {
        cfg.visibility_from_source = true;
        p.visibility = visibility_gaussian_source(p.slit_separation, cfg.source, p.wavelength);
    } else {
        const double v = number("visibility");
        if (v < 0.0 || v > 1.0) throw fail("visibility", "out of range [0, 1]");
        p.visibility = v;
    }

    cfg.eraser.input_angle = number("input_angle_deg");
    cfg.eraser.slit_a_polarizer = optional_angle("slit_a_polarizer_deg");
    cfg.eraser.slit_b_polarizer = optional_angle("slit_b_polarizer_deg");
    cfg.eraser.analyzer = optional_angle("analyzer_deg");
    if (cfg.eraser.slit_a_polarizer.has_value() != cfg.eraser.slit_b_polarizer.has_value()) {
        const auto key = cfg.eraser.slit_a_polarizer ? "slit_a_polarizer_deg" : "slit_b_polarizer_deg";
        throw fail(key, "slit polarizers must be set for both slits or neither");
    }

    auto& s = cfg.scan;
    s.start = number("scan_start_mm");
    s.stop = number("scan_stop_mm");
    if (!(s.start < s.stop)) throw fail("scan_stop_mm", "must be greater than scan_start_mm");
    s.step = positive("scan_step_mm");
    s.dwell = positive("dwell_s");
    s.aperture = nonnegative("aperture_mm");
    s.herald_rate = nonnegative("herald_rate_per_s");
    s.signal_rate = nonnegative("signal_rate_per_s");
    s.pair_efficiency = number("pair_efficiency");
    if (s.pair_efficiency < 0.0 || s.pair_efficiency > 1.0) throw fail("pair_efficiency", "out of range [0, 1]");
    s.coincidence_window = positive("coincidence_window_ns");
    s.background_rate = nonnegative("background_rate_per_s");
    {
        const auto& v = settings.at("seed").value;
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
        if (ec != std::errc{} || ptr != v.data() + v.size()) throw fail("seed", "not a non-negative integer");
        s.seed = seed;
    }

    cfg.splitter_ratio = number("splitter_ratio");
    if (!(cfg.splitter_ratio > 0.0 && cfg.splitter_ratio < 1.0)) throw fail("splitter_ratio", "out of range (0, 1)");
    cfg.g2_dwell = positive("g2_dwell_s");
    {
        const auto& v = settings.at("g2_source").value;
        if (v == "heralded") cfg.g2_source = G2Source::heralded;
        else if (v == "poissonian") cfg.g2_source = G2Source::poissonian;
        else throw fail("g2_source", "expected heralded or poissonian");
    }

    p.validate();
    cfg.source.validate();
    cfg.eraser.validate();
    s.validate();
    return cfg;
}

} // namespace slitlab::io
