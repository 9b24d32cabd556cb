#include "pkgfield/geometry.hpp"

#include "pkgfield/error.hpp"
#include "pkgfield/materials.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pkgfield {

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

bool PackageGeometry::inside_die(Point2 p) const {
    return std::abs(p.x) <= half_die() && std::abs(p.y) <= half_die();
}

void PackageGeometry::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::InvalidInput, std::string("geometry: ") + what);
    };
    require(std::isfinite(die_side) && die_side > 0.0, "die_side must be positive");
    require(std::isfinite(package_side) && die_side <= package_side,
            "die_side must not exceed package_side");
    require(std::isfinite(t_sio2) && t_sio2 > 0.0, "t_sio2 must be positive");
    require(std::isfinite(t_si) && t_si > 0.0, "t_si must be positive");
    require(std::isfinite(reflector_offset) && reflector_offset >= 0.0,
            "reflector_offset must be >= 0");
    require(std::isfinite(antenna.x) && std::isfinite(antenna.y), "antenna position must be finite");
    require(std::abs(antenna.x) < half_die() && std::abs(antenna.y) < half_die(),
            "antenna must lie strictly inside the die footprint");
}

namespace {

// Largest usable launch angle: grazing in the interconnect layer, or the
// critical angle when the bulk medium is optically thinner.
double max_launch_angle(double n_interconnect, double n_bulk) {
    const double ratio = n_interconnect / n_bulk;
    return ratio >= 1.0 ? std::asin(1.0 / ratio) : 0.5 * kPi;
}

} // namespace

double heatsink_lateral_coverage(double theta1, const PackageGeometry& geo, double n_interconnect,
                                 double n_bulk) {
    const double s2 = n_interconnect / n_bulk * std::sin(theta1);
    if (s2 >= 1.0) return std::numeric_limits<double>::infinity();
    const double tan2 = s2 / std::sqrt(1.0 - s2 * s2);
    return 2.0 * (geo.antenna_to_interface() * std::tan(theta1) + geo.bulk_leg_height() * tan2);
}

double solve_heatsink_crossing(double lateral_separation, const PackageGeometry& geo,
                               double n_interconnect, double n_bulk) {
    if (!(lateral_separation >= 0.0) || !std::isfinite(lateral_separation))
        throw Error(ErrorKind::InvalidInput, "lateral separation must be finite and >= 0");
    if (!(n_interconnect > 0.0) || !(n_bulk > 0.0))
        throw Error(ErrorKind::InvalidInput, "refractive indices must be positive");
    if (lateral_separation <= kCrossingTolerance) return 0.0;

    double lo = 0.0;
    double hi = std::nextafter(max_launch_angle(n_interconnect, n_bulk), 0.0);
    if (heatsink_lateral_coverage(hi, geo, n_interconnect, n_bulk) < lateral_separation)
        throw Error(ErrorKind::NumericalFailure, "heatsink crossing: separation beyond reachable range");

    // Bisect down to adjacent doubles; the tolerance is the acceptance bound on
    // the best residual, not the stopping rule.
    double best = lo;
    double best_residual = lateral_separation;
    for (int i = 0; i < kCrossingMaxIterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double residual =
            heatsink_lateral_coverage(mid, geo, n_interconnect, n_bulk) - lateral_separation;
        if (std::abs(residual) < best_residual) {
            best = mid;
            best_residual = std::abs(residual);
        }
        if (residual == 0.0) break;
        if (residual < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (best_residual <= kCrossingTolerance) return best;

    std::ostringstream msg;
    msg << "heatsink crossing: bisection did not converge for separation " << lateral_separation
        << " m (residual " << best_residual << " m)";
    throw Error(ErrorKind::NumericalFailure, msg.str());
}

const char* to_string(Wall wall) {
    switch (wall) {
    case Wall::PosX: return "+x";
    case Wall::NegX: return "-x";
    case Wall::PosY: return "+y";
    case Wall::NegY: return "-y";
    }
    return "?";
}

std::array<ImageSource, 4> image_sources_for_edges(Point2 src, const PackageGeometry& geo) {
    const double h = geo.half_die();
    return {{
        {Wall::PosX, {2.0 * h - src.x, src.y}},
        {Wall::NegX, {-2.0 * h - src.x, src.y}},
        {Wall::PosY, {src.x, 2.0 * h - src.y}},
        {Wall::NegY, {src.x, -2.0 * h - src.y}},
    }};
}

std::vector<Point2> Grid::points() const {
    std::vector<Point2> out;
    out.reserve(point_count());
    for (std::size_t i = 0; i < point_count(); ++i) out.push_back(point(i));
    return out;
}

Grid grid_points(const GridSpec& spec, const PackageGeometry& geo) {
    const double extent = spec.extent.value_or(geo.half_die());
    if (!(spec.resolution > 0.0) || !std::isfinite(spec.resolution))
        throw Error(ErrorKind::InvalidGrid, "grid resolution must be positive");
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw Error(ErrorKind::InvalidGrid, "grid extent must be positive");
    if (spec.resolution > geo.die_side)
        throw Error(ErrorKind::InvalidGrid, "grid resolution larger than the die");
    if (extent > geo.half_die() * (1.0 + 1e-12))
        throw Error(ErrorKind::InvalidGrid, "grid extent reaches outside the die footprint");

    // The small slack absorbs ratios like 0.022/0.0001 = 219.99999999999997.
    auto cells = static_cast<std::size_t>(std::floor(2.0 * extent / spec.resolution + 1e-9));
    std::size_t size = cells + 1;
    if (size % 2 == 0) --size;

    Grid grid;
    grid.resolution = spec.resolution;
    grid.extent = extent;
    grid.size = size;
    grid.coords.resize(size);
    const auto half = static_cast<std::ptrdiff_t>(size / 2);
    for (std::size_t i = 0; i < size; ++i)
        grid.coords[i] = static_cast<double>(static_cast<std::ptrdiff_t>(i) - half) * spec.resolution;

    // Nearest node per axis; flagged only when the antenna falls inside that cell.
    auto nearest = [&](double v) -> std::optional<std::size_t> {
        const double k = std::round(v / spec.resolution) + static_cast<double>(half);
        if (k < 0.0 || k >= static_cast<double>(size)) return std::nullopt;
        const auto idx = static_cast<std::size_t>(k);
        if (std::abs(grid.coords[idx] - v) > 0.5 * spec.resolution) return std::nullopt;
        return idx;
    };
    const auto ix = nearest(geo.antenna.x);
    const auto iy = nearest(geo.antenna.y);
    if (ix && iy) grid.antenna_cell = *iy * size + *ix;
    return grid;
}

} // namespace pkgfield
