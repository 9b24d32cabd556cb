#include "pkgfield/fieldmap.hpp"

#include "pkgfield/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace pkgfield {

namespace {

double near_field_radius(const NearFieldSettings& s, const PropagationConstants& interconnect) {
    if (s.radius_mode == NearFieldRadiusMode::InMediumWavelength)
        return 2.0 * kPi / interconnect.beta; // lambda0 / sqrt(eps_r)
    return s.radius;
}

} // namespace

FieldEngine::FieldEngine(const PackageGeometry& geometry, const StackMaterials& materials,
                         const FieldOptions& options)
    : ctx_(TraceContext::build(geometry, materials, options.frequency, options.trace, options.alpha_mode)),
      options_(options) {
    if (options.near_field.enabled) {
        const double radius = near_field_radius(options.near_field, ctx_.interconnect);
        near_field_.emplace(ctx_.interconnect.beta, radius,
                            [this](double d) { return direct_far_magnitude(d); });
    }
}

double FieldEngine::direct_far_magnitude(double d) const {
    return std::abs(path_amplitude(ctx_, {{Medium::Interconnect, d}}, 0.5 * kPi, 1.0));
}

LinkResult FieldEngine::evaluate(Point2 src, Point2 rx) const {
    if (src == rx) throw Error(ErrorKind::InvalidInput, "source and receiver coincide");

    LinkResult out;
    out.components.reserve(7);

    auto direct = trace_direct(src, rx, ctx_);
    const double d = direct.segments.front().length;
    if (near_field_ && d < near_field_->radius())
        direct.amplitude = std::polar(near_field_->near_magnitude(d), -ctx_.interconnect.beta * d);
    out.components.push_back(std::move(direct));

    if (options_.heatsink) out.components.push_back(trace_heatsink(src, rx, ctx_));
    if (options_.edges)
        for (auto& c : trace_edges(src, rx, ctx_)) out.components.push_back(std::move(c));
    if (auto c = trace_diffracted(src, rx, ctx_, options_.diffraction)) out.components.push_back(std::move(*c));

    for (const auto& c : out.components) out.total += c.amplitude;
    return out;
}

LinkResult point_to_point_field(Point2 src, Point2 rx, const PackageGeometry& geometry,
                                const StackMaterials& materials, const FieldOptions& options) {
    if (!geometry.inside_die(src) || !geometry.inside_die(rx))
        throw Error(ErrorKind::InvalidInput, "link endpoints must lie inside the die footprint");
    return FieldEngine(geometry, materials, options).evaluate(src, rx);
}

std::size_t FieldGrid::evaluated_cells() const {
    return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), false));
}

FieldGrid compute_field_map(const PackageGeometry& geometry, const StackMaterials& materials,
                            const GridSpec& grid_spec, const FieldOptions& options) {
    if (options.db_reference == DbReference::Absolute &&
        (!(options.reference_amplitude > 0.0) || !std::isfinite(options.reference_amplitude)))
        throw Error(ErrorKind::InvalidInput, "reference amplitude must be positive");

    const FieldEngine engine(geometry, materials, options);

    FieldGrid field;
    field.spec = grid_spec;
    field.grid = grid_points(grid_spec, geometry);
    const auto& grid = field.grid;
    const std::size_t cells = grid.point_count();
    field.values.assign(cells, Complex{0.0, 0.0});
    field.magnitudes_db.assign(cells, std::numeric_limits<double>::quiet_NaN());
    field.excluded.assign(cells, false);
    if (grid.antenna_cell) field.excluded[*grid.antenna_cell] = true;
    for (std::size_t i = 0; i < cells; ++i)
        if (grid.point(i) == geometry.antenna) field.excluded[i] = true;

    unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(grid.size));

    std::atomic<std::size_t> next_row{0};
    std::mutex failure_mutex;
    std::size_t failed_cell = cells;
    std::string failure_message;
    ErrorKind failure_kind = ErrorKind::InvalidInput;

    auto sweep = [&] {
        for (std::size_t row; (row = next_row.fetch_add(1)) < grid.size;) {
            for (std::size_t col = 0; col < grid.size; ++col) {
                const std::size_t i = row * grid.size + col;
                if (field.excluded[i]) continue;
                try {
                    field.values[i] = engine.evaluate(geometry.antenna, grid.point(i)).total;
                } catch (const Error& e) {
                    std::lock_guard lock(failure_mutex);
                    if (i < failed_cell) {
                        failed_cell = i;
                        failure_message = e.what();
                        failure_kind = e.kind();
                    }
                    return;
                }
            }
        }
    };

    if (workers == 1) {
        sweep();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(sweep);
    }

    if (failed_cell < cells) {
        const Point2 p = grid.point(failed_cell);
        std::ostringstream msg;
        msg << "cell (" << p.x * 1e3 << " mm, " << p.y * 1e3 << " mm): " << failure_message;
        throw Error(failure_kind, msg.str());
    }

    if (options.db_reference == DbReference::Absolute) {
        field.reference = options.reference_amplitude;
    } else {
        double peak = 0.0;
        for (std::size_t i = 0; i < cells; ++i)
            if (!field.excluded[i]) peak = std::max(peak, std::abs(field.values[i]));
        if (!(peak > 0.0)) throw Error(ErrorKind::NumericalFailure, "field map has no nonzero cell");
        field.reference = peak;
    }
    for (std::size_t i = 0; i < cells; ++i)
        if (!field.excluded[i])
            field.magnitudes_db[i] = 20.0 * std::log10(std::abs(field.values[i]) / field.reference);
    return field;
}

std::string format_sig9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_field_csv(std::ostream& out, const FieldGrid& field) {
    out << "x_mm,y_mm,mag_db,re,im\n";
    for (std::size_t i = 0; i < field.grid.point_count(); ++i) {
        if (field.excluded[i]) continue;
        const Point2 p = field.grid.point(i);
        out << format_sig9(p.x * 1e3) << ',' << format_sig9(p.y * 1e3) << ','
            << format_sig9(field.magnitudes_db[i]) << ',' << format_sig9(field.values[i].real()) << ','
            << format_sig9(field.values[i].imag()) << '\n';
    }
}

} // namespace pkgfield
