#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "slitlab/error.hpp"
#include "slitlab/scan.hpp"

namespace slitlab::io {

inline constexpr std::string_view scan_csv_header =
    "position_mm,dwell_s,coincidences,singles_signal,singles_herald";
inline constexpr std::string_view pattern_csv_header = "position_mm,rate_per_s";

namespace detail {

/// Shortest decimal that parses back to v.
inline std::string shortest(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Exact decimal text for `meters` expressed in millimetres: the shortest
/// round-trip digits of the SI value with the decimal point moved three
/// places, rendered without an exponent.
inline std::string meters_to_mm_text(double meters)
{
    if (meters == 0.0) return "0";
    std::array<char, 64> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), meters, std::chars_format::scientific);
    const std::string_view sci(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
    const auto e = sci.find('e');
    std::string_view mant = sci.substr(0, e);
    const int exp10 = std::atoi(std::string(sci.substr(e + 1)).c_str()) + 3;
    std::string sign;
    if (mant.front() == '-') {
        sign = "-";
        mant.remove_prefix(1);
    }
    std::string digits;
    for (char c : mant) {
        if (c != '.') digits.push_back(c);
    }
    // value = 0.d1d2d3... * 10^(exp10 + 1)
    const int point = exp10 + 1;
    std::string out;
    if (point <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    } else if (static_cast<std::size_t>(point) >= digits.size()) {
        out = digits + std::string(static_cast<std::size_t>(point) - digits.size(), '0');
    } else {
        out = digits.substr(0, static_cast<std::size_t>(point)) + "." +
              digits.substr(static_cast<std::size_t>(point));
    }
    return sign + out;
}

/// Parse a millimetre decimal into metres with a single rounding, by
/// shifting the decimal exponent rather than dividing.
inline bool mm_text_to_meters(std::string_view text, double& meters)
{
    std::string s(text);
    int exp_adjust = -3;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        int exp10 = 0;
        const auto tail = std::string_view(s).substr(e + 1);
        const char* first = tail.data();
        if (!tail.empty() && tail.front() == '+') ++first;
        const auto [p, ec] = std::from_chars(first, tail.data() + tail.size(), exp10);
        if (ec != std::errc{} || p != tail.data() + tail.size()) return false;
        exp_adjust += exp10;
        s.resize(e);
    }
    s += "e" + std::to_string(exp_adjust);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), meters);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(meters);
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string csv_where(int line) { return "csv line " + std::to_string(line); }

} // namespace detail

inline std::string write_scan_csv(const std::vector<ScanRecord>& records)
{
    std::string out(scan_csv_header);
    out += '\n';
    for (const auto& r : records) {
        out += detail::meters_to_mm_text(r.position);
        out += ',';
        out += detail::shortest(r.dwell);
        out += ',' + std::to_string(r.coincidences) + ',' + std::to_string(r.singles_signal) + ',' +
               std::to_string(r.singles_herald) + '\n';
    }
    return out;
}

inline std::vector<ScanRecord> read_scan_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    bool header_seen = false;
    std::vector<ScanRecord> out;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_fields(line);
        if (!header_seen) {
            if (line != scan_csv_header) {
                throw ValidationError(detail::csv_where(line_no) + ": expected header '" +
                                      std::string(scan_csv_header) + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 5) {
            throw ValidationError(detail::csv_where(line_no) + ": expected 5 fields, found " +
                                  std::to_string(fields.size()));
        }
        ScanRecord r;
        if (!detail::mm_text_to_meters(fields[0], r.position)) {
            throw ValidationError(detail::csv_where(line_no) + ": bad position_mm '" + std::string(fields[0]) + "'");
        }
        {
            const auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), r.dwell);
            if (ec != std::errc{} || p != fields[1].data() + fields[1].size() || !(r.dwell > 0.0)) {
                throw ValidationError(detail::csv_where(line_no) + ": dwell_s must be a positive number, got '" +
                                      std::string(fields[1]) + "'");
            }
        }
        const std::array<std::string_view, 3> names{"coincidences", "singles_signal", "singles_herald"};
        std::array<std::int64_t*, 3> targets{&r.coincidences, &r.singles_signal, &r.singles_herald};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto f = fields[k + 2];
            const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), *targets[k]);
            if (ec != std::errc{} || p != f.data() + f.size() || *targets[k] < 0) {
                throw ValidationError(detail::csv_where(line_no) + ": " + std::string(names[k]) +
                                      " must be a non-negative integer, got '" + std::string(f) + "'");
            }
        }
        out.push_back(r);
    }
    if (!header_seen) {
        throw ValidationError("csv: empty input (missing header '" + std::string(scan_csv_header) + "')");
    }
    return out;
}

struct CurvePoint {
    double position = 0.0;
    double rate = 0.0;
};

inline std::string write_pattern_csv(const std::vector<CurvePoint>& curve)
{
    std::string out(pattern_csv_header);
    out += '\n';
    for (const auto& c : curve) {
        out += detail::meters_to_mm_text(c.position) + ',' + detail::shortest(c.rate) + '\n';
    }
    return out;
}

inline std::vector<CurvePoint> read_pattern_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    bool header_seen = false;
    std::vector<CurvePoint> out;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != pattern_csv_header) {
                throw ValidationError(detail::csv_where(line_no) + ": expected header '" +
                                      std::string(pattern_csv_header) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_fields(line);
        CurvePoint c;
        if (fields.size() != 2 || !detail::mm_text_to_meters(fields[0], c.position)) {
            throw ValidationError(detail::csv_where(line_no) + ": malformed row");
        }
        const auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), c.rate);
        if (ec != std::errc{} || p != fields[1].data() + fields[1].size()) {
            throw ValidationError(detail::csv_where(line_no) + ": bad rate_per_s '" + std::string(fields[1]) + "'");
        }
        out.push_back(c);
    }
    if (!header_seen) {
        throw ValidationError("csv: empty input (missing header '" + std::string(pattern_csv_header) + "')");
    }
    return out;
}

/// Theoretical curve of `model` on an evenly spaced grid.
inline std::vector<CurvePoint> sample_curve(const PatternModel& model, const PatternParams& p,
                                            double start, double stop, std::size_t points)
{
    slitlab::detail::require(points >= 2, "curve: need at least 2 points");
    slitlab::detail::require(start < stop, "curve: start must be < stop");
    std::vector<CurvePoint> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
        out[i] = {x, model.rate(x, p)};
    }
    return out;
}

} // namespace slitlab::io
