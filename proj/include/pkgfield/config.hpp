#pragma once

#include "pkgfield/compare.hpp"
#include "pkgfield/fieldmap.hpp"
#include "pkgfield/geometry.hpp"
#include "pkgfield/materials.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace pkgfield {

enum class Mode { Map, Link, Compare };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// A run as written in the config file. Values stay in the file's units
/// (mm, um, GHz) so that emitting and re-parsing is exact; the accessors
/// convert to SI for the engine.
struct RunConfig {
    // [run]
    Mode mode = Mode::Map;
    double frequency_ghz = 0.0;
    unsigned workers = 0;

    // [geometry]
    double die_side_mm = 0.0;
    double package_side_mm = 0.0;
    double t_sio2_um = 0.0;
    double t_si_mm = 0.7;
    double antenna_x_mm = 0.0;
    double antenna_y_mm = 0.0;
    double reflector_offset_mm = 0.0;
    double grid_resolution_mm = 0.0;
    std::optional<double> grid_extent_mm;

    // [propagation]
    AlphaWavelength alpha_lambda_mode = AlphaWavelength::FreeSpace;
    double spreading_exponent = 0.0;

    // [material.<id>]; "sio2" is the interconnect layer, "si" the bulk.
    std::map<std::string, MaterialProperties> materials;

    // [antenna]
    std::string pattern_file; // empty: isotropic

    // [raytrace]
    bool heatsink_enabled = true;
    bool edges_enabled = true;
    Polarization polarization_heatsink = Polarization::Parallel;
    Polarization polarization_edge = Polarization::Perpendicular;
    double diffraction_coeff_re = 0.0;
    double diffraction_coeff_im = 0.0;
    double reflector_magnitude = 1.0;
    std::string edge_material = "air";

    // [nearfield]
    bool near_field_enabled = true;
    double near_field_radius_mm = 1.3;
    NearFieldRadiusMode near_field_radius_mode = NearFieldRadiusMode::Fixed;

    // [output]
    std::string out_dir = ".";
    std::string map_csv = "field_map.csv";
    std::string summary_file = "run_summary.txt";
    DbReference db_reference = DbReference::Peak;
    double reference_amplitude = 1.0;

    // [link]
    double rx_x_mm = 5.0;
    double rx_y_mm = 0.0;

    // [compare]
    std::string reference_csv;
    std::string model_csv; // empty: compute the model map from this config
    Resampling resampling = Resampling::Nearest;
    std::string report_file = "comparison_report.txt";
    std::string error_map_csv = "error_map.csv";

    RunConfig();

    bool operator==(const RunConfig&) const = default;

    PackageGeometry geometry() const;
    GridSpec grid() const;
    StackMaterials stack() const;
    /// Loads the antenna pattern file when one is configured.
    FieldOptions field_options() const;
    Point2 link_receiver() const;

    /// The 22/33 mm package at 60 GHz with a centered antenna.
    static RunConfig example();
};

/// Line-oriented "key = value" with [section] headers; full-line comments
/// start with '#' or ';'. Unknown keys, duplicate keys, missing required keys
/// and out-of-range values raise Error(Config) with file/line context.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, const std::string& source_name);

/// Cross-key checks that depend on the mode (reference file present in
/// compare mode, link receiver inside the die, ...). parse_config calls this
/// for the configured mode; callers re-run it after overriding the mode.
void validate_config(const RunConfig& config, const std::string& source_name);

/// A complete, commented config that parses back to an equal RunConfig.
std::string emit_config(const RunConfig& config);

/// Every key with its default, for --help.
std::string config_reference();

} // namespace pkgfield
