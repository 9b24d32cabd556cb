#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace pkgfield {

/// A position in the die plane, meters, origin at the die center.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b);

/// Flip-chip stack seen from the antenna. All lengths in meters.
///
/// Vertical layout (z upward, z = 0 at the bottom of the interconnect layer):
/// the antenna sits mid-way through the interconnect (SiO2) layer, bulk Si
/// lies on top of it, and the metallic heatsink reflector is at the top of the
/// Si plus an optional offset. The offset is filled with the bulk medium.
struct PackageGeometry {
    double die_side = 22e-3;
    double package_side = 33e-3;
    double t_sio2 = 13e-6;
    double t_si = 0.7e-3;
    double reflector_offset = 0.0;
    Point2 antenna{};

    /// Vertical distance from the antenna to the SiO2/Si interface.
    double antenna_to_interface() const { return 0.5 * t_sio2; }
    /// Thickness of the bulk-medium leg between the interface and the reflector.
    double bulk_leg_height() const { return t_si + reflector_offset; }
    double heatsink_plane_z() const { return t_sio2 + t_si + reflector_offset; }
    double half_die() const { return 0.5 * die_side; }

    /// Closed footprint test, |x|,|y| <= die_side/2.
    bool inside_die(Point2 p) const;

    /// Throws Error(InvalidInput) when any structural invariant is broken.
    void validate() const;

    bool operator==(const PackageGeometry&) const = default;
};

/// Lateral distance covered by the up-refract-reflect-down heatsink path for
/// launch angle theta1 (in the interconnect medium). Infinite once the ray in
/// the bulk medium would be past grazing.
double heatsink_lateral_coverage(double theta1, const PackageGeometry& geo, double n_interconnect,
                                 double n_bulk);

/// Launch angle theta1 in [0, pi/2) whose heatsink path lands exactly
/// lateral_separation away at the antenna depth. Bisection on the lateral
/// residual; throws Error(NumericalFailure) if it does not converge.
double solve_heatsink_crossing(double lateral_separation, const PackageGeometry& geo,
                               double n_interconnect, double n_bulk);

inline constexpr double kCrossingTolerance = 1e-9; // m, lateral residual
inline constexpr int kCrossingMaxIterations = 200;

enum class Wall { PosX = 0, NegX = 1, PosY = 2, NegY = 3 };
inline constexpr std::array<Wall, 4> kAllWalls{Wall::PosX, Wall::NegX, Wall::PosY, Wall::NegY};

const char* to_string(Wall wall);

struct ImageSource {
    Wall wall;
    Point2 position;
};

/// Mirror images of src across the four die edges, in wall-id order.
std::array<ImageSource, 4> image_sources_for_edges(Point2 src, const PackageGeometry& geo);

struct GridSpec {
    double resolution = 0.1e-3;   // m per cell
    std::optional<double> extent; // half-width in m; die_side/2 when unset

    bool operator==(const GridSpec&) const = default;
};

/// Square lattice over the die plane, centered on the die. Points are
/// row-major: index = iy * size + ix with both axes ascending.
struct Grid {
    double resolution = 0.0;
    double extent = 0.0;
    std::size_t size = 0;          // points per axis (odd)
    std::vector<double> coords;    // axis coordinates, shared by x and y
    std::optional<std::size_t> antenna_cell;

    std::size_t point_count() const { return size * size; }
    Point2 point(std::size_t index) const { return {coords[index % size], coords[index / size]}; }
    std::vector<Point2> points() const;
};

/// Axis size is floor(2*extent/resolution) + 1, reduced by one when even so the
/// die center is always a node. The antenna cell is the node nearest the antenna.
Grid grid_points(const GridSpec& spec, const PackageGeometry& geo);

} // namespace pkgfield
