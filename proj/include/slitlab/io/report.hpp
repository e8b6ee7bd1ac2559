#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "slitlab/error.hpp"
#include "slitlab/fit.hpp"
#include "slitlab/g2.hpp"
#include "slitlab/model.hpp"

namespace slitlab::io {

/// Report key and SI -> report-unit factor for each parameter. Keys match
/// the config file.
struct ReportUnit {
    std::string_view key;
    double scale;
};

inline ReportUnit report_unit(Param p)
{
    switch (p) {
    case Param::wavelength: return {"wavelength_nm", 1e9};
    case Param::slit_separation: return {"slit_separation_mm", 1e3};
    case Param::slit_width: return {"slit_width_mm", 1e3};
    case Param::screen_distance: return {"screen_distance_mm", 1e3};
    case Param::peak_rate: return {"peak_rate_per_s", 1.0};
    case Param::visibility: return {"visibility", 1.0};
    case Param::phase: return {"phase_rad", 1.0};
    case Param::center: return {"center_mm", 1e3};
    }
    return {"?", 1.0};
}

inline Param parse_param(std::string_view name)
{
    for (Param p : all_params) {
        if (name == param_name(p) || name == report_unit(p).key) return p;
    }
    throw ValidationError("unknown fit parameter '" + std::string(name) + "'");
}

namespace detail {
inline std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
} // namespace detail

/// `key = value ± error` lines, run diagnostics, then a [covariance] block in
/// report units.
inline std::string format_fit_report(const FitResult& r, ModelKind model, std::size_t points)
{
    std::ostringstream out;
    out << "# slitlab fit report\n";
    out << "model = " << to_string(model) << '\n';
    out << "points = " << points << '\n';
    for (std::size_t j = 0; j < r.params.size(); ++j) {
        const auto u = report_unit(r.params[j]);
        const auto jj = static_cast<Eigen::Index>(j);
        out << u.key << " = " << detail::num(r.estimates[jj] * u.scale) << " ± "
            << detail::num(r.errors[jj] * u.scale) << '\n';
    }
    out << "reduced_chi_square = " << detail::num(r.reduced_chi_square) << '\n';
    out << "cost = " << detail::num(r.cost) << '\n';
    out << "iterations = " << r.iterations << '\n';
    out << "converged = " << (r.converged ? "true" : "false") << '\n';
    out << "termination = " << r.termination << '\n';
    for (const auto& n : r.notes) {
        out << "note = " << n << '\n';
    }
    out << "[covariance]\n";
    out << "params =";
    for (std::size_t j = 0; j < r.params.size(); ++j) {
        out << (j ? ", " : " ") << report_unit(r.params[j]).key;
    }
    out << '\n';
    for (std::size_t i = 0; i < r.params.size(); ++i) {
        const double si = report_unit(r.params[i]).scale;
        for (std::size_t j = 0; j < r.params.size(); ++j) {
            const double sj = report_unit(r.params[j]).scale;
            out << (j ? ", " : "")
                << detail::num(r.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * si * sj);
        }
        out << '\n';
    }
    return out.str();
}

inline std::string format_g2_report(const G2Result& g, G2Source source)
{
    std::ostringstream out;
    out << "# slitlab g2 report\n";
    out << "source = " << (source == G2Source::heralded ? "heralded" : "poissonian") << '\n';
    out << "n_gate = " << g.n_gate << '\n';
    out << "n_gt = " << g.n_gt << '\n';
    out << "n_gr = " << g.n_gr << '\n';
    out << "n_gtr = " << g.n_gtr << '\n';
    out << "g2 = " << detail::num(g.g2) << " ± " << detail::num(g.std_error) << '\n';
    return out.str();
}

/// Read `key = value [± error]` lines up to the first [section]; values are
/// kept as text.
inline std::map<std::string, std::string> parse_report(std::string_view text)
{
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '[') break;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        auto key = line.substr(0, eq);
        if (key == "note") continue;
        out[key] = line.substr(eq + 3);
    }
    return out;
}

} // namespace slitlab::io
