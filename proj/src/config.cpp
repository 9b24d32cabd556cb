#include "pkgfield/config.hpp"

#include "pkgfield/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace pkgfield {

const char* to_string(Mode mode) {
    switch (mode) {
    case Mode::Map: return "map";
    case Mode::Link: return "link";
    case Mode::Compare: return "compare";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
    if (text == "map") return Mode::Map;
    if (text == "link") return Mode::Link;
    if (text == "compare") return Mode::Compare;
    return std::nullopt;
}

RunConfig::RunConfig() {
    materials.emplace("sio2", presets::silicon_dioxide());
    materials.emplace("si", presets::silicon());
    materials.emplace("air", presets::air());
}

PackageGeometry RunConfig::geometry() const {
    PackageGeometry g;
    g.die_side = die_side_mm * 1e-3;
    g.package_side = package_side_mm * 1e-3;
    g.t_sio2 = t_sio2_um * 1e-6;
    g.t_si = t_si_mm * 1e-3;
    g.reflector_offset = reflector_offset_mm * 1e-3;
    g.antenna = {antenna_x_mm * 1e-3, antenna_y_mm * 1e-3};
    return g;
}

GridSpec RunConfig::grid() const {
    GridSpec spec;
    spec.resolution = grid_resolution_mm * 1e-3;
    if (grid_extent_mm) spec.extent = *grid_extent_mm * 1e-3;
    return spec;
}

StackMaterials RunConfig::stack() const {
    auto lookup = [&](const std::string& id) {
        auto it = materials.find(id);
        if (it == materials.end()) throw Error(ErrorKind::Config, "material '" + id + "' is not defined");
        return it->second;
    };
    return {lookup("sio2"), lookup("si"), lookup(edge_material)};
}

FieldOptions RunConfig::field_options() const {
    FieldOptions o;
    o.frequency = frequency_ghz * 1e9;
    o.alpha_mode = alpha_lambda_mode;
    o.trace.heatsink_polarization = polarization_heatsink;
    o.trace.edge_polarization = polarization_edge;
    o.trace.reflector_magnitude = reflector_magnitude;
    o.trace.spreading_exponent = spreading_exponent;
    o.trace.pattern = pattern_file.empty() ? AntennaPattern::isotropic() : AntennaPattern::load(pattern_file);
    o.heatsink = heatsink_enabled;
    o.edges = edges_enabled;
    o.diffraction = {diffraction_coeff_re, diffraction_coeff_im};
    o.near_field.enabled = near_field_enabled;
    o.near_field.radius = near_field_radius_mm * 1e-3;
    o.near_field.radius_mode = near_field_radius_mode;
    o.db_reference = db_reference;
    o.reference_amplitude = reference_amplitude;
    o.workers = workers;
    return o;
}

Point2 RunConfig::link_receiver() const { return {rx_x_mm * 1e-3, rx_y_mm * 1e-3}; }

RunConfig RunConfig::example() {
    RunConfig c;
    c.frequency_ghz = 60.0;
    c.die_side_mm = 22.0;
    c.package_side_mm = 33.0;
    c.t_sio2_um = 13.0;
    c.grid_resolution_mm = 0.1;
    return c;
}

namespace {

// Raised by value setters; the parser adds file/line/key context.
struct ValueError {
    std::string message;
};

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(v))
        throw ValueError{"expected a finite number, got '" + text + "'"};
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ValueError{"expected true or false, got '" + text + "'"};
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct KeyDef {
    std::string section;
    std::string key;
    bool required;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

using Check = std::function<bool(double)>;

KeyDef number_key(std::string section, std::string key, bool required, std::string help,
                  double RunConfig::*member, Check ok, std::string range) {
    return {std::move(section), std::move(key), required, std::move(help),
            [member, ok, range](RunConfig& c, const std::string& v) {
                const double x = parse_number(v);
                if (ok && !ok(x)) throw ValueError{"value " + v + " out of range (" + range + ")"};
                c.*member = x;
            },
            [member](const RunConfig& c) { return format_number(c.*member); }};
}

KeyDef bool_key(std::string section, std::string key, std::string help, bool RunConfig::*member) {
    return {std::move(section), std::move(key), false, std::move(help),
            [member](RunConfig& c, const std::string& v) { c.*member = parse_bool(v); },
            [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

KeyDef string_key(std::string section, std::string key, std::string help, std::string RunConfig::*member,
                  bool allow_empty) {
    return {std::move(section), std::move(key), false, std::move(help),
            [member, allow_empty](RunConfig& c, const std::string& v) {
                if (!allow_empty && v.empty()) throw ValueError{"value must not be empty"};
                c.*member = v;
            },
            [member](const RunConfig& c) { return c.*member; }};
}

template <typename E>
KeyDef enum_key(std::string section, std::string key, std::string help, E RunConfig::*member,
                std::vector<std::pair<std::string, E>> names) {
    return {std::move(section), std::move(key), false, std::move(help),
            [member, names](RunConfig& c, const std::string& v) {
                std::string options;
                for (const auto& [n, e] : names) {
                    if (n == v) {
                        c.*member = e;
                        return;
                    }
                    options += (options.empty() ? "" : " | ") + n;
                }
                throw ValueError{"expected one of " + options + ", got '" + v + "'"};
            },
            [member, names](const RunConfig& c) {
                for (const auto& [n, e] : names)
                    if (e == c.*member) return n;
                return std::string("?");
            }};
}

const Check positive = [](double x) { return x > 0.0; };
const Check non_negative = [](double x) { return x >= 0.0; };

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> keys = [] {
        std::vector<KeyDef> k;
        k.push_back(enum_key<Mode>("run", "mode", "run mode: map | link | compare", &RunConfig::mode,
                                   {{"map", Mode::Map}, {"link", Mode::Link}, {"compare", Mode::Compare}}));
        k.push_back(number_key("run", "frequency_ghz", true, "carrier frequency, GHz", &RunConfig::frequency_ghz,
                               positive, "> 0"));
        k.push_back({"run", "workers", false, "sweep threads; 0 uses every hardware thread, 1 runs sequentially",
                     [](RunConfig& c, const std::string& v) {
                         const double x = parse_number(v);
                         if (x < 0.0 || x > 4096.0 || x != std::floor(x))
                             throw ValueError{"value " + v + " out of range (integer in [0, 4096])"};
                         c.workers = static_cast<unsigned>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.workers); }});

        k.push_back(number_key("geometry", "die_side_mm", true, "silicon die side, mm", &RunConfig::die_side_mm,
                               positive, "> 0"));
        k.push_back(number_key("geometry", "package_side_mm", true, "package carrier side, mm",
                               &RunConfig::package_side_mm, positive, "> 0"));
        k.push_back(number_key("geometry", "t_sio2_um", true, "interconnect (SiO2) layer thickness, um",
                               &RunConfig::t_sio2_um, positive, "> 0"));
        k.push_back(number_key("geometry", "t_si_mm", false, "bulk silicon thickness, mm", &RunConfig::t_si_mm,
                               positive, "> 0"));
        k.push_back(number_key("geometry", "antenna_x_mm", false, "antenna x in the die plane, mm (origin: die center)",
                               &RunConfig::antenna_x_mm, nullptr, ""));
        k.push_back(number_key("geometry", "antenna_y_mm", false, "antenna y in the die plane, mm",
                               &RunConfig::antenna_y_mm, nullptr, ""));
        k.push_back(number_key("geometry", "reflector_offset_mm", false,
                               "gap between the Si top and the heatsink plane, mm (filled with the bulk medium)",
                               &RunConfig::reflector_offset_mm, non_negative, ">= 0"));
        k.push_back(number_key("geometry", "grid_resolution_mm", true, "map cell size, mm",
                               &RunConfig::grid_resolution_mm, positive, "> 0"));
        k.push_back({"geometry", "grid_extent_mm", false, "map half-width, mm; empty covers the whole die",
                     [](RunConfig& c, const std::string& v) {
                         if (v.empty()) {
                             c.grid_extent_mm.reset();
                             return;
                         }
                         const double x = parse_number(v);
                         if (!(x > 0.0)) throw ValueError{"value " + v + " out of range (> 0)"};
                         c.grid_extent_mm = x;
                     },
                     [](const RunConfig& c) { return c.grid_extent_mm ? format_number(*c.grid_extent_mm) : ""; }});

        k.push_back(enum_key<AlphaWavelength>(
            "propagation", "alpha_lambda_mode",
            "wavelength in the attenuation constant: free_space (lambda0) | in_medium (lambda0/sqrt(eps_r))",
            &RunConfig::alpha_lambda_mode,
            {{"free_space", AlphaWavelength::FreeSpace}, {"in_medium", AlphaWavelength::InMedium}}));
        k.push_back(number_key("propagation", "spreading_exponent", false,
                               "geometric spreading d^-p on the unfolded path length; 0 disables",
                               &RunConfig::spreading_exponent, non_negative, ">= 0"));

        k.push_back(string_key("antenna", "pattern_file", "two-column pattern file (angle_deg, gain); empty is isotropic",
                               &RunConfig::pattern_file, true));

        k.push_back(bool_key("raytrace", "heatsink_enabled", "include the heatsink-reflected ray",
                             &RunConfig::heatsink_enabled));
        k.push_back(bool_key("raytrace", "edges_enabled", "include the four die-edge reflections",
                             &RunConfig::edges_enabled));
        const std::vector<std::pair<std::string, Polarization>> pols = {{"parallel", Polarization::Parallel},
                                                                       {"perpendicular", Polarization::Perpendicular}};
        k.push_back(enum_key("raytrace", "polarization_heatsink", "polarization for the heatsink bounce",
                             &RunConfig::polarization_heatsink, pols));
        k.push_back(enum_key("raytrace", "polarization_edge", "polarization for edge bounces",
                             &RunConfig::polarization_edge, pols));
        k.push_back(number_key("raytrace", "diffraction_coeff_re", false,
                               "diffraction coefficient, real part; 0 + 0j disables the diffracted ray",
                               &RunConfig::diffraction_coeff_re, nullptr, ""));
        k.push_back(number_key("raytrace", "diffraction_coeff_im", false, "diffraction coefficient, imaginary part",
                               &RunConfig::diffraction_coeff_im, nullptr, ""));
        k.push_back(number_key("raytrace", "reflector_magnitude", false, "|R| of the heatsink (1 = perfect conductor)",
                               &RunConfig::reflector_magnitude, [](double x) { return x >= 0.0 && x <= 1.0; },
                               "[0, 1]"));
        k.push_back(string_key("raytrace", "edge_material", "material id beyond the die edges",
                               &RunConfig::edge_material, false));

        k.push_back(bool_key("nearfield", "near_field_enabled", "splice the near-field law onto the direct ray",
                             &RunConfig::near_field_enabled));
        k.push_back(number_key("nearfield", "near_field_radius_mm", false, "near-field radius, mm (fixed mode)",
                               &RunConfig::near_field_radius_mm, positive, "> 0"));
        k.push_back(enum_key<NearFieldRadiusMode>(
            "nearfield", "near_field_radius_mode",
            "fixed (near_field_radius_mm) | in_medium_wavelength (lambda0/sqrt(eps_r) of sio2)",
            &RunConfig::near_field_radius_mode,
            {{"fixed", NearFieldRadiusMode::Fixed}, {"in_medium_wavelength", NearFieldRadiusMode::InMediumWavelength}}));

        k.push_back(string_key("output", "out_dir", "output directory", &RunConfig::out_dir, false));
        k.push_back(string_key("output", "map_csv", "field map file name", &RunConfig::map_csv, false));
        k.push_back(string_key("output", "summary_file", "run summary file name", &RunConfig::summary_file, false));
        k.push_back(enum_key<DbReference>("output", "db_reference",
                                          "0 dB reference: peak (strongest cell) | absolute (reference_amplitude)",
                                          &RunConfig::db_reference,
                                          {{"peak", DbReference::Peak}, {"absolute", DbReference::Absolute}}));
        k.push_back(number_key("output", "reference_amplitude", false, "linear amplitude mapped to 0 dB in absolute mode",
                               &RunConfig::reference_amplitude, positive, "> 0"));

        k.push_back(number_key("link", "rx_x_mm", false, "link-mode receiver x, mm", &RunConfig::rx_x_mm, nullptr, ""));
        k.push_back(number_key("link", "rx_y_mm", false, "link-mode receiver y, mm", &RunConfig::rx_y_mm, nullptr, ""));

        k.push_back(string_key("compare", "reference_csv", "reference field map (required in compare mode)",
                               &RunConfig::reference_csv, true));
        k.push_back(string_key("compare", "model_csv", "model field map; empty computes it from this config",
                               &RunConfig::model_csv, true));
        k.push_back(enum_key<Resampling>("compare", "resampling", "reference resampling: nearest | bilinear",
                                         &RunConfig::resampling,
                                         {{"nearest", Resampling::Nearest}, {"bilinear", Resampling::Bilinear}}));
        k.push_back(string_key("compare", "report_file", "comparison report file name", &RunConfig::report_file, false));
        k.push_back(string_key("compare", "error_map_csv", "per-cell error map file name", &RunConfig::error_map_csv,
                               false));
        return k;
    }();
    return keys;
}

const std::vector<std::string>& section_order() {
    static const std::vector<std::string> s = {"run",      "geometry",  "propagation", "antenna", "raytrace",
                                               "nearfield", "output",   "link",        "compare"};
    return s;
}

constexpr std::string_view kMaterialPrefix = "material.";

bool valid_material_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
    });
}

const std::set<std::string>& builtin_materials() {
    static const std::set<std::string> ids = {"sio2", "si", "air"};
    return ids;
}

} // namespace

RunConfig parse_config_text(std::string_view text, const std::string& source_name) {
    auto error_at = [&](int line, const std::string& what) {
        return Error(ErrorKind::Config, source_name + ":" + std::to_string(line) + ": " + what);
    };

    RunConfig cfg;
    std::map<std::string, int> seen; // "section.key" -> line
    std::set<std::string> touched_materials;
    std::string section;
    int line_no = 0;

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw error_at(line_no, "malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::find(section_order().begin(), section_order().end(), section) != section_order().end();
            const bool material = section.rfind(kMaterialPrefix, 0) == 0;
            if (material && !valid_material_id(section.substr(kMaterialPrefix.size())))
                throw error_at(line_no, "material id must be lowercase [a-z0-9_]: [" + section + "]");
            if (!known && !material) throw error_at(line_no, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw error_at(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) throw error_at(line_no, "key '" + key + "' appears before any [section]");
        if (key.empty()) throw error_at(line_no, "empty key");

        const std::string full = section + "." + key;
        if (auto it = seen.find(full); it != seen.end())
            throw error_at(line_no, "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                                        std::to_string(it->second) + ")");
        seen.emplace(full, line_no);

        try {
            if (section.rfind(kMaterialPrefix, 0) == 0) {
                const std::string id = section.substr(kMaterialPrefix.size());
                auto [it, inserted] = cfg.materials.try_emplace(
                    id, MaterialProperties{id, std::nan(""), std::nan(""), false});
                touched_materials.insert(id);
                auto& m = it->second;
                if (key == "name") {
                    if (value.empty()) throw ValueError{"value must not be empty"};
                    m.name = value;
                } else if (key == "epsilon_r") {
                    const double x = parse_number(value);
                    if (x < 1.0) throw ValueError{"value " + value + " out of range (>= 1)"};
                    m.epsilon_r = x;
                } else if (key == "tan_delta") {
                    const double x = parse_number(value);
                    if (x < 0.0) throw ValueError{"value " + value + " out of range (>= 0)"};
                    m.tan_delta = x;
                } else {
                    throw error_at(line_no, "unknown key '" + key + "' in [" + section + "]");
                }
                continue;
            }
            const auto& keys = registry();
            auto def = std::find_if(keys.begin(), keys.end(),
                                    [&](const KeyDef& d) { return d.section == section && d.key == key; });
            if (def == keys.end()) throw error_at(line_no, "unknown key '" + key + "' in [" + section + "]");
            def->set(cfg, value);
        } catch (const ValueError& e) {
            throw error_at(line_no, "key '" + key + "': " + e.message);
        }
    }

    std::vector<std::string> missing;
    for (const auto& d : registry())
        if (d.required && !seen.count(d.section + "." + d.key)) missing.push_back(d.section + "." + d.key);
    for (const auto& id : touched_materials) {
        if (builtin_materials().count(id)) continue;
        for (const char* k : {"epsilon_r", "tan_delta"})
            if (!seen.count("material." + id + "." + k)) missing.push_back("material." + id + "." + k);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw Error(ErrorKind::Config, source_name + ": missing required keys: " + list);
    }

    validate_config(cfg, source_name);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path.string());
}

void validate_config(const RunConfig& c, const std::string& source_name) {
    auto fail = [&](const std::string& what) { return Error(ErrorKind::Config, source_name + ": " + what); };

    const auto geo = c.geometry();
    try {
        geo.validate();
        c.stack().validate();
    } catch (const Error& e) {
        throw fail(e.what());
    }
    if (c.grid_resolution_mm > c.die_side_mm) throw fail("key 'grid_resolution_mm' larger than the die");
    if (c.grid_extent_mm && *c.grid_extent_mm > 0.5 * c.die_side_mm)
        throw fail("key 'grid_extent_mm' reaches outside the die footprint");

    auto require_file = [&](const std::string& key, const std::string& path) {
        if (!path.empty() && !std::filesystem::is_regular_file(path))
            throw fail("key '" + key + "': file not found: " + path);
    };
    require_file("pattern_file", c.pattern_file);

    if (c.mode == Mode::Compare) {
        if (c.reference_csv.empty()) throw fail("compare mode requires key 'reference_csv'");
        require_file("reference_csv", c.reference_csv);
        require_file("model_csv", c.model_csv);
    }
    if (c.mode == Mode::Link) {
        const Point2 rx = c.link_receiver();
        if (!geo.inside_die(rx)) throw fail("link receiver lies outside the die footprint");
        if (rx == geo.antenna) throw fail("link receiver coincides with the antenna");
    }
}

std::string emit_config(const RunConfig& config) {
    std::ostringstream out;
    out << "# pkgfield run configuration\n"
        << "# 'key = value' lines under [section] headers; lines starting with '#' are comments.\n";
    for (const auto& section : section_order()) {
        out << "\n[" << section << "]\n";
        for (const auto& d : registry()) {
            if (d.section != section) continue;
            out << "# " << d.help << (d.required ? " (required)" : "") << '\n';
            out << d.key << " = " << d.get(config) << '\n';
        }
    }
    for (const auto& [id, m] : config.materials) {
        out << "\n[material." << id << "]\n"
            << "name = " << m.name << '\n'
            << "epsilon_r = " << format_number(m.epsilon_r) << '\n'
            << "tan_delta = " << format_number(m.tan_delta) << '\n';
    }
    return out.str();
}

std::string config_reference() {
    const RunConfig defaults;
    std::ostringstream out;
    out << "Config keys ([section] key: default):\n";
    for (const auto& d : registry()) {
        out << "  [" << d.section << "] " << d.key << ": ";
        if (d.required) {
            out << "required";
        } else {
            const auto v = d.get(defaults);
            out << (v.empty() ? "(empty)" : v);
        }
        out << "  -- " << d.help << '\n';
    }
    out << "  [material.<id>] name, epsilon_r, tan_delta; built-in ids:";
    for (const auto& [id, m] : defaults.materials)
        out << ' ' << id << " (" << format_number(m.epsilon_r) << ", " << format_number(m.tan_delta) << ")";
    out << "\n  'sio2' is the interconnect layer and 'si' the bulk silicon.\n";
    return out.str();
}

} // namespace pkgfield
