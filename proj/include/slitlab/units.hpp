#pragma once

#include <numbers>

// Everything inside the library is SI (m, s, rad). These helpers are for I/O
// boundaries and tests.
namespace slitlab::units {

constexpr double mm(double v) { return v * 1e-3; }
constexpr double um(double v) { return v * 1e-6; }
constexpr double nm(double v) { return v * 1e-9; }
constexpr double ns(double v) { return v * 1e-9; }
constexpr double deg(double v) { return v * std::numbers::pi / 180.0; }

constexpr double to_mm(double m) { return m * 1e3; }
constexpr double to_nm(double m) { return m * 1e9; }
constexpr double to_ns(double s) { return s * 1e9; }
constexpr double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

} // namespace slitlab::units
