#pragma once

#include "pkgfield/fieldmap.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pkgfield {

/// A dB field map on a rectilinear lattice. Coordinates in millimeters,
/// ascending; NaN in db marks a lattice node without data.
struct DbMap {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> db;       // row-major, iy * xs.size() + ix
    std::vector<Complex> values;  // same layout when the source had re/im, else empty

    std::size_t valid_cells() const;
    double at(std::size_t ix, std::size_t iy) const { return db[iy * xs.size() + ix]; }
};

DbMap to_db_map(const FieldGrid& field);

/// Reads the field CSV schema: a header naming at least x_mm, y_mm and
/// mag_db (re and im optional, unknown columns ignored), then one row per
/// cell. Descending coordinates are normalized to ascending order.
///
/// Malformed rows raise Error(Parse) with the line number. Duplicate
/// coordinates, a missing required column, or a point set that is not a
/// lattice raise Error(Schema). A lattice may have holes (the antenna cell),
/// but every lattice line must be more than half populated.
DbMap parse_reference(std::istream& in, const std::string& source_name);
DbMap load_reference(const std::filesystem::path& path);

enum class Resampling { Nearest, Bilinear };

const char* to_string(Resampling r);

struct ComparisonReport {
    std::vector<double> xs; // model lattice, mm
    std::vector<double> ys;
    std::vector<double> error_map_db; // |model - reference| after peak re-referencing; NaN if not compared
    double geometric_mean_error_db = 0.0;
    double max_error_db = 0.0;
    std::size_t cells_compared = 0;
    Resampling alignment = Resampling::Nearest;
};

/// Resamples the reference onto the model lattice (on dB values), re-references
/// both to their peak over the compared cells, and reports the mean and max
/// absolute dB difference. Throws Error(EmptyComparison) with no overlap.
ComparisonReport compare_maps(const DbMap& model, const DbMap& reference,
                              Resampling alignment = Resampling::Nearest);
ComparisonReport compare_maps(const FieldGrid& model, const DbMap& reference,
                              Resampling alignment = Resampling::Nearest);

/// Key-value summary; the header states how the mean is defined.
void write_report(std::ostream& out, const ComparisonReport& report);
/// "x_mm,y_mm,error_db", one row per compared cell.
void write_error_map_csv(std::ostream& out, const ComparisonReport& report);

} // namespace pkgfield
