// slitlab: simulate and fit single-photon slit-interference scans.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slitlab/coherence.hpp"
#include "slitlab/error.hpp"
#include "slitlab/fit.hpp"
#include "slitlab/g2.hpp"
#include "slitlab/guess.hpp"
#include "slitlab/io/config.hpp"
#include "slitlab/io/csv.hpp"
#include "slitlab/io/plot.hpp"
#include "slitlab/io/report.hpp"
#include "slitlab/recipes.hpp"
#include "slitlab/scan.hpp"
#include "slitlab/units.hpp"

namespace {

using namespace slitlab;
namespace fs = std::filesystem;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_numeric = 2;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
}

/// Write to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", config_path, "experiment config file (key = value)");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--out", out, "output file (directory for 'eraser')");
    }

    [[nodiscard]] io::ExperimentConfig load() const
    {
        io::ExperimentConfig cfg = io::parse_config(config_path.empty() ? std::string{} : read_file(config_path));
        if (seed) cfg.scan.seed = *seed;
        return cfg;
    }
};

struct PatternCmd {
    Common common;
    std::string model;
    std::optional<double> b_mm, d_mm, visibility, aperture_mm, start_mm, stop_mm;
    std::size_t points = 1001;

    int run() const
    {
        io::ExperimentConfig cfg = common.load();
        PatternModel m = cfg.model();
        if (!model.empty()) m.kind = parse_model_kind(model);
        m.aperture = aperture_mm ? units::mm(*aperture_mm) : 0.0;
        PatternParams p = cfg.pattern;
        if (b_mm) p.slit_width = units::mm(*b_mm);
        if (d_mm) p.slit_separation = units::mm(*d_mm);
        if (visibility) p.visibility = *visibility;
        if (m.kind == ModelKind::single_slit) p.slit_separation = std::max(p.slit_separation, p.slit_width);
        p.validate();
        const double start = start_mm ? units::mm(*start_mm) : cfg.scan.start;
        const double stop = stop_mm ? units::mm(*stop_mm) : cfg.scan.stop;
        emit(common.out, io::write_pattern_csv(io::sample_curve(m, p, start, stop, points)));
        return exit_ok;
    }
};

struct SimulateCmd {
    Common common;

    int run() const
    {
        const io::ExperimentConfig cfg = common.load();
        if (cfg.mode == io::Mode::g2 || cfg.mode == io::Mode::pattern_only) {
            throw ValidationError("simulate: mode must be double, single or eraser (config has '" +
                                  std::string(io::to_string(cfg.mode)) + "'); use 'g2' or 'pattern'");
        }
        emit(common.out, io::write_scan_csv(run_scan(cfg.scan, cfg.model(), cfg.pattern)));
        return exit_ok;
    }
};

struct FitCmd {
    Common common;
    std::string input;
    std::string model;
    std::vector<std::string> free;
    std::optional<double> aperture_mm;

    int run() const
    {
        const io::ExperimentConfig cfg = common.load();
        const auto records = io::read_scan_csv(read_file(input));
        PatternModel m;
        m.kind = cfg.mode == io::Mode::single_slit ? ModelKind::single_slit : ModelKind::partial_coherence;
        if (!model.empty()) m.kind = parse_model_kind(model);
        if (m.kind == ModelKind::eraser) m.eraser = eraser_amplitudes(cfg.eraser);
        m.aperture = aperture_mm ? units::mm(*aperture_mm) : cfg.scan.aperture;
        std::vector<Param> params;
        for (const auto& name : free) params.push_back(io::parse_param(name));
        const auto data = to_data(records);
        FitResult r = fit_data(data, m, cfg.pattern, params);
        if (m.kind == ModelKind::partial_coherence && params.empty()) {
            r.notes.emplace_back("phase and center were fitted as free parameters");
        }
        emit(common.out, io::format_fit_report(r, m.kind, data.size()));
        return exit_ok;
    }
};

struct EraserCmd {
    Common common;
    std::vector<std::string> analyzers{"none", "0", "45"};

    int run() const
    {
        const io::ExperimentConfig cfg = common.load();
        std::string dir = common.out;
        if (dir.empty()) {
            if (const char* env = std::getenv("SLITLAB_OUT_DIR")) dir = env;
        }
        std::ostringstream report;
        report << "# slitlab eraser report (slit polarizers +45/-45 deg, input vertical)\n";
        for (std::size_t i = 0; i < analyzers.size(); ++i) {
            std::optional<double> analyzer;
            if (analyzers[i] != "none") {
                const auto v = io::detail::parse_double(analyzers[i]);
                if (!v) throw ValidationError("--analyzer-deg: '" + analyzers[i] + "' is not a number or 'none'");
                analyzer = units::deg(*v);
            }
            ScanConfig scan = cfg.scan;
            scan.seed = cfg.scan.seed + i;
            const EraserRun run = run_eraser(scan, cfg.pattern, crossed_polarizer_eraser(analyzer));
            const std::string label = analyzer ? "analyzer_" + analyzers[i] : std::string("no_analyzer");
            report << "[" << label << "]\n"
                   << "analyzer_deg = " << analyzers[i] << '\n'
                   << "coherent = " << (eraser_amplitudes(run.optics).coherent ? "true" : "false") << '\n'
                   << "predicted_visibility = " << io::detail::num(run.predicted_visibility) << '\n'
                   << "visibility = " << io::detail::num(run.measured.visibility) << " ± "
                   << io::detail::num(run.measured.error) << '\n'
                   << "fringes = " << (run.measured.inverted ? "inverted" : "normal") << '\n';
            if (!dir.empty()) {
                fs::create_directories(dir);
                write_file(fs::path(dir) / ("eraser_" + label + ".csv"), io::write_scan_csv(run.records));
            }
        }
        std::cout << report.str();
        if (!dir.empty()) write_file(fs::path(dir) / "eraser_report.txt", report.str());
        return exit_ok;
    }
};

struct G2Cmd {
    Common common;
    bool poissonian = false;
    std::optional<double> dwell_s;
    std::optional<double> splitter_ratio;

    int run() const
    {
        const io::ExperimentConfig cfg = common.load();
        const G2Source source = poissonian ? G2Source::poissonian : cfg.g2_source;
        const G2Result g = run_g2(cfg.scan, splitter_ratio.value_or(cfg.splitter_ratio),
                                  dwell_s.value_or(cfg.g2_dwell), source);
        emit(common.out, io::format_g2_report(g, source));
        return exit_ok;
    }
};

struct PlotCmd {
    std::string input;
    std::string svg;
    std::string column = "coincidences";

    int run() const
    {
        const std::string text = read_file(input);
        std::vector<double> xs;
        std::vector<double> ys;
        std::string y_label;
        if (text.rfind(io::pattern_csv_header, 0) == 0) {
            for (const auto& c : io::read_pattern_csv(text)) {
                xs.push_back(units::to_mm(c.position));
                ys.push_back(c.rate);
            }
            y_label = "rate_per_s";
        } else {
            for (const auto& r : io::read_scan_csv(text)) {
                xs.push_back(units::to_mm(r.position));
                if (column == "coincidences") ys.push_back(static_cast<double>(r.coincidences));
                else if (column == "singles_signal") ys.push_back(static_cast<double>(r.singles_signal));
                else if (column == "singles_herald") ys.push_back(static_cast<double>(r.singles_herald));
                else throw ValidationError("--column: expected coincidences, singles_signal or singles_herald");
            }
            y_label = column;
        }
        std::cout << io::ascii_plot(xs, ys, "position_mm", y_label);
        if (!svg.empty()) write_file(svg, io::svg_plot(xs, ys, "position_mm", y_label, fs::path(input).filename().string()));
        return exit_ok;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"slitlab: single-photon double-slit simulator and fitter"};
    app.require_subcommand(0, 1);
    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "print every config key with its default and exit");

    PatternCmd pattern;
    auto* pattern_cmd = app.add_subcommand("pattern", "emit a theoretical rate curve as CSV");
    pattern.common.attach(pattern_cmd);
    pattern_cmd->add_option("--model", pattern.model, "double | single | partial | eraser");
    pattern_cmd->add_option("--b-mm", pattern.b_mm, "slit width");
    pattern_cmd->add_option("--d-mm", pattern.d_mm, "slit separation");
    pattern_cmd->add_option("--visibility", pattern.visibility, "fringe visibility |V|");
    pattern_cmd->add_option("--aperture-mm", pattern.aperture_mm, "collection aperture (default 0)");
    pattern_cmd->add_option("--start-mm", pattern.start_mm, "first position");
    pattern_cmd->add_option("--stop-mm", pattern.stop_mm, "last position");
    pattern_cmd->add_option("--points", pattern.points, "number of samples")->check(CLI::Range(2, 10000000));

    SimulateCmd simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a heralded scan and write CSV");
    simulate.common.attach(simulate_cmd);

    FitCmd fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a pattern model to a scan CSV");
    fit.common.attach(fit_cmd);
    fit_cmd->add_option("input", fit.input, "scan CSV")->required();
    fit_cmd->add_option("--model", fit.model, "double | single | partial | eraser");
    fit_cmd->add_option("--free", fit.free, "free parameters (e.g. slit_width_mm,center_mm)")->delimiter(',');
    fit_cmd->add_option("--aperture-mm", fit.aperture_mm, "collection aperture (default from config)");

    EraserCmd eraser;
    auto* eraser_cmd = app.add_subcommand("eraser", "simulate and fit the quantum-eraser configurations");
    eraser.common.attach(eraser_cmd);
    eraser_cmd->add_option("--analyzer-deg", eraser.analyzers, "analyzer angles ('none' for no analyzer)")
        ->delimiter(',');

    G2Cmd g2;
    auto* g2_cmd = app.add_subcommand("g2", "simulate the three-detector g2(0) measurement");
    g2.common.attach(g2_cmd);
    g2_cmd->add_flag("--poissonian", g2.poissonian, "replace heralded pairs by Poissonian light");
    g2_cmd->add_option("--dwell-s", g2.dwell_s, "total integration time");
    g2_cmd->add_option("--splitter-ratio", g2.splitter_ratio, "beam-splitter transmission probability");

    PlotCmd plot;
    auto* plot_cmd = app.add_subcommand("plot", "ASCII plot of a CSV, optionally also SVG");
    plot_cmd->add_option("input", plot.input, "scan or pattern CSV")->required();
    plot_cmd->add_option("--svg", plot.svg, "write an SVG plot here");
    plot_cmd->add_option("--column", plot.column, "scan column to plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (print_defaults) {
            std::cout << io::default_config_text();
            return exit_ok;
        }
        if (*pattern_cmd) return pattern.run();
        if (*simulate_cmd) return simulate.run();
        if (*fit_cmd) return fit.run();
        if (*eraser_cmd) return eraser.run();
        if (*g2_cmd) return g2.run();
        if (*plot_cmd) return plot.run();
        std::cerr << app.help();
        return exit_validation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
