#pragma once

#include "pkgfield/geometry.hpp"
#include "pkgfield/materials.hpp"
#include "pkgfield/nearfield.hpp"
#include "pkgfield/raytrace.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pkgfield {

enum class NearFieldRadiusMode {
    Fixed,                 // the configured radius
    InMediumWavelength,    // lambda0 / sqrt(eps_r) of the interconnect medium
};

struct NearFieldSettings {
    bool enabled = true;
    double radius = 1.3e-3; // m
    NearFieldRadiusMode radius_mode = NearFieldRadiusMode::Fixed;
};

enum class DbReference {
    Peak,     // strongest evaluated cell is 0 dB
    Absolute, // 20*log10(|E| / reference_amplitude)
};

struct FieldOptions {
    double frequency = 60e9; // Hz
    AlphaWavelength alpha_mode = AlphaWavelength::FreeSpace;
    TraceSettings trace;
    bool heatsink = true;
    bool edges = true;
    Complex diffraction{0.0, 0.0}; // disabled when zero
    NearFieldSettings near_field;
    DbReference db_reference = DbReference::Peak;
    double reference_amplitude = 1.0;
    unsigned workers = 0; // 0: hardware concurrency
};

struct LinkResult {
    Complex total{0.0, 0.0};
    /// Summation order: Direct, HeatsinkReflect, EdgeReflect by wall id, DiffractHeatsink.
    std::vector<RayComponent> components;
};

/// Resolved per-run state: trace context and, when enabled, the near-field
/// splice for the direct ray. Read-only once built.
class FieldEngine {
public:
    FieldEngine(const PackageGeometry& geometry, const StackMaterials& materials,
                const FieldOptions& options);

    LinkResult evaluate(Point2 src, Point2 rx) const;

    const TraceContext& context() const { return ctx_; }
    const FieldOptions& options() const { return options_; }
    const std::optional<NearFieldModel>& near_field() const { return near_field_; }

    /// |direct amplitude| at distance d under the far-field law.
    double direct_far_magnitude(double d) const;

private:
    TraceContext ctx_;
    FieldOptions options_;
    std::optional<NearFieldModel> near_field_;
};

LinkResult point_to_point_field(Point2 src, Point2 rx, const PackageGeometry& geometry,
                                const StackMaterials& materials, const FieldOptions& options);

struct FieldGrid {
    GridSpec spec;
    Grid grid;
    std::vector<Complex> values;
    std::vector<double> magnitudes_db;
    std::vector<bool> excluded;
    double reference = 1.0; // linear amplitude mapped to 0 dB

    std::size_t evaluated_cells() const;
};

/// Sweeps every non-excluded grid node with the antenna as source. Rows are
/// split across workers; each cell is written to its own slot so the result
/// does not depend on the worker count.
FieldGrid compute_field_map(const PackageGeometry& geometry, const StackMaterials& materials,
                            const GridSpec& grid, const FieldOptions& options);

/// "x_mm,y_mm,mag_db,re,im", one row per non-excluded cell in row-major order,
/// 9 significant digits.
void write_field_csv(std::ostream& out, const FieldGrid& field);

/// printf("%.9g") formatting shared by every CSV the tool writes.
std::string format_sig9(double v);

} // namespace pkgfield
