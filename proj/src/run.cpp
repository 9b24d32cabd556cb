#include "pkgfield/run.hpp"

#include "pkgfield/compare.hpp"
#include "pkgfield/error.hpp"
#include "pkgfield/fieldmap.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace pkgfield {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return f;
}

fs::path prepare_out_dir(const RunConfig& c) {
    fs::path dir = c.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

unsigned effective_workers(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

int run_map(const RunConfig& c, std::ostream& out) {
    const auto dir = prepare_out_dir(c);
    const auto options = c.field_options();

    const auto t0 = std::chrono::steady_clock::now();
    const auto field = compute_field_map(c.geometry(), c.stack(), c.grid(), options);
    const auto t1 = std::chrono::steady_clock::now();
    const double sweep_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    {
        auto f = open_output(dir / c.map_csv);
        write_field_csv(f, field);
    }
    {
        auto f = open_output(dir / c.summary_file);
        f << "mode = map\n"
          << "frequency_ghz = " << format_sig9(c.frequency_ghz) << '\n'
          << "grid_points_per_axis = " << field.grid.size << '\n'
          << "cells_evaluated = " << field.evaluated_cells() << '\n'
          << "workers = " << effective_workers(c.workers) << '\n'
          << "db_reference = " << (c.db_reference == DbReference::Peak ? "peak" : "absolute") << '\n'
          << "reference_amplitude = " << format_sig9(field.reference) << '\n'
          << "sweep_ms = " << format_sig9(sweep_ms) << '\n';
    }
    out << "map: " << field.evaluated_cells() << " cells in " << format_sig9(sweep_ms) << " ms -> "
        << (dir / c.map_csv).string() << '\n';
    return kExitSuccess;
}

int run_link(const RunConfig& c, std::ostream& out) {
    const auto geo = c.geometry();
    const Point2 rx = c.link_receiver();
    const auto link = point_to_point_field(geo.antenna, rx, geo, c.stack(), c.field_options());

    auto db = [](Complex v) { return 20.0 * std::log10(std::abs(v)); };
    auto deg = [](double rad) { return rad * 180.0 / kPi; };
    char buf[160];
    out << "link (" << format_sig9(c.antenna_x_mm) << ", " << format_sig9(c.antenna_y_mm) << ") mm -> ("
        << format_sig9(c.rx_x_mm) << ", " << format_sig9(c.rx_y_mm) << ") mm at " << format_sig9(c.frequency_ghz)
        << " GHz\n";
    std::snprintf(buf, sizeof buf, "%-11s %-4s %12s %11s %10s %12s %11s\n", "component", "wall", "path_mm",
                  "launch_deg", "|coef|", "amp_db", "phase_deg");
    out << buf;
    for (const auto& comp : link.components) {
        std::snprintf(buf, sizeof buf, "%-11s %-4s %12.6f %11.4f %10.6f %12.4f %11.4f\n", to_string(comp.kind),
                      comp.wall ? to_string(*comp.wall) : "-", comp.path_length() * 1e3, deg(comp.launch_angle),
                      std::abs(comp.coefficient), db(comp.amplitude), deg(std::arg(comp.amplitude)));
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-11s %-4s %12s %11s %10s %12.4f %11.4f\n", "total", "-", "-", "-", "-",
                  db(link.total), deg(std::arg(link.total)));
    out << buf;
    return kExitSuccess;
}

int run_compare(const RunConfig& c, const RunOptions& opts, std::ostream& out) {
    const auto dir = prepare_out_dir(c);
    const DbMap reference = load_reference(c.reference_csv);
    const DbMap model = c.model_csv.empty()
                            ? to_db_map(compute_field_map(c.geometry(), c.stack(), c.grid(), c.field_options()))
                            : load_reference(c.model_csv);
    const auto report = compare_maps(model, reference, c.resampling);

    {
        auto f = open_output(dir / c.report_file);
        write_report(f, report);
    }
    {
        auto f = open_output(dir / c.error_map_csv);
        write_error_map_csv(f, report);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "geometric mean error: %.3f dB, max %.3f dB over %zu cells (%s)\n",
                  report.geometric_mean_error_db, report.max_error_db, report.cells_compared,
                  to_string(report.alignment));
    out << buf;

    if (opts.fail_above_db && report.geometric_mean_error_db > *opts.fail_above_db) {
        std::snprintf(buf, sizeof buf, "error %.3f dB exceeds threshold %.3f dB\n", report.geometric_mean_error_db,
                      *opts.fail_above_db);
        out << buf;
        return kExitThreshold;
    }
    return kExitSuccess;
}

} // namespace

int run(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    switch (config.mode) {
    case Mode::Map: return run_map(config, out);
    case Mode::Link: return run_link(config, out);
    case Mode::Compare: return run_compare(config, options, out);
    }
    return kExitUsage;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pkgfield: ray-traced electric-field maps inside a flip-chip package"};
    app.footer(config_reference());

    std::string config_path;
    std::string mode_text;
    std::string out_dir;
    std::optional<unsigned> workers;
    std::optional<double> fail_above;
    bool emit_example = false;

    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--mode", mode_text, "override the run mode")->check(CLI::IsMember({"map", "link", "compare"}));
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--workers", workers, "sweep threads (0 = all hardware threads, 1 = sequential)");
    app.add_option("--fail-above-db", fail_above, "compare mode: exit 3 when the mean error exceeds this many dB");
    app.add_flag("--emit-example-config", emit_example, "print a complete example config and exit");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (emit_example) {
        out << emit_config(RunConfig::example());
        return kExitSuccess;
    }
    if (config_path.empty()) {
        err << "error: --config is required\n" << app.help();
        return kExitUsage;
    }

    try {
        RunConfig config = parse_config(config_path);
        if (!mode_text.empty()) config.mode = *parse_mode(mode_text);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (workers) config.workers = *workers;
        validate_config(config, config_path);
        return run(config, RunOptions{fail_above}, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.kind() == ErrorKind::NumericalFailure ? kExitNumerical : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace pkgfield
