#include "pkgfield/compare.hpp"

#include "pkgfield/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace pkgfield {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& tok, double& v) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    return ec == std::errc{} && ptr == last && first != last;
}

struct Row {
    double x, y, db;
    std::optional<Complex> value;
    int line;
};

} // namespace

std::size_t DbMap::valid_cells() const {
    return static_cast<std::size_t>(std::count_if(db.begin(), db.end(), [](double v) { return !std::isnan(v); }));
}

DbMap to_db_map(const FieldGrid& field) {
    DbMap map;
    const auto& g = field.grid;
    map.xs.reserve(g.size);
    for (double c : g.coords) map.xs.push_back(c * 1e3);
    map.ys = map.xs;
    map.db = field.magnitudes_db;
    map.values = field.values;
    for (std::size_t i = 0; i < field.excluded.size(); ++i)
        if (field.excluded[i]) {
            map.db[i] = kNaN;
            map.values[i] = Complex{kNaN, kNaN};
        }
    return map;
}

DbMap parse_reference(std::istream& in, const std::string& source_name) {
    auto fail = [&](ErrorKind kind, int line, const std::string& what) -> Error {
        std::ostringstream msg;
        msg << source_name;
        if (line > 0) msg << ':' << line;
        msg << ": " << what;
        return Error(kind, msg.str());
    };

    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        header = split_csv(t);
        break;
    }
    if (header.empty()) throw fail(ErrorKind::Schema, 0, "missing header line");

    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
    for (const char* required : {"x_mm", "y_mm", "mag_db"})
        if (!column.count(required))
            throw fail(ErrorKind::Schema, line_no, std::string("missing required column '") + required + "'");
    const bool has_re = column.count("re") > 0;
    const bool has_im = column.count("im") > 0;
    if (has_re != has_im) throw fail(ErrorKind::Schema, line_no, "columns 're' and 'im' must appear together");

    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_csv(t);
        if (fields.size() != header.size())
            throw fail(ErrorKind::Parse, line_no,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        auto number = [&](const char* col) {
            double v = 0.0;
            const auto& tok = fields[column.at(col)];
            if (!parse_double(tok, v) || !std::isfinite(v))
                throw fail(ErrorKind::Parse, line_no, std::string("bad value '") + tok + "' in column " + col);
            return v;
        };
        Row r{number("x_mm"), number("y_mm"), number("mag_db"), std::nullopt, line_no};
        if (has_re) r.value = Complex{number("re"), number("im")};
        rows.push_back(r);
    }
    if (rows.empty()) throw fail(ErrorKind::Schema, 0, "no data rows");

    DbMap map;
    for (const auto& r : rows) {
        map.xs.push_back(r.x);
        map.ys.push_back(r.y);
    }
    for (auto* axis : {&map.xs, &map.ys}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }
    const std::size_t nx = map.xs.size();
    const std::size_t ny = map.ys.size();
    map.db.assign(nx * ny, kNaN);
    if (has_re) map.values.assign(nx * ny, Complex{kNaN, kNaN});

    std::vector<int> seen_line(nx * ny, 0);
    std::vector<std::size_t> per_x(nx, 0), per_y(ny, 0);
    for (const auto& r : rows) {
        const auto ix = static_cast<std::size_t>(std::lower_bound(map.xs.begin(), map.xs.end(), r.x) - map.xs.begin());
        const auto iy = static_cast<std::size_t>(std::lower_bound(map.ys.begin(), map.ys.end(), r.y) - map.ys.begin());
        const std::size_t i = iy * nx + ix;
        if (seen_line[i])
            throw fail(ErrorKind::Schema, r.line,
                       "duplicate coordinate (also on line " + std::to_string(seen_line[i]) + ")");
        seen_line[i] = r.line;
        map.db[i] = r.db;
        if (r.value) map.values[i] = *r.value;
        ++per_x[ix];
        ++per_y[iy];
    }
    for (std::size_t c : per_x)
        if (2 * c <= ny) throw fail(ErrorKind::Schema, 0, "non-rectangular grid: sparse lattice column");
    for (std::size_t c : per_y)
        if (2 * c <= nx) throw fail(ErrorKind::Schema, 0, "non-rectangular grid: sparse lattice row");
    return map;
}

DbMap load_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open reference map " + path.string());
    return parse_reference(in, path.string());
}

const char* to_string(Resampling r) { return r == Resampling::Nearest ? "nearest" : "bilinear"; }

namespace {

struct AxisSample {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double w = 0.0; // weight of hi
};

// Relative slack on coordinate matching; coordinates pass through 9-digit text.
constexpr double kCoordSlack = 1e-9;

double axis_slack(const std::vector<double>& axis) {
    const double span = axis.back() - axis.front();
    return kCoordSlack * std::max({span, std::abs(axis.front()), std::abs(axis.back()), 1.0});
}

std::optional<std::size_t> nearest_index(const std::vector<double>& axis, double v) {
    const double slack = axis_slack(axis);
    const std::size_t n = axis.size();
    const double below = n > 1 ? 0.5 * (axis[1] - axis[0]) : 0.0;
    const double above = n > 1 ? 0.5 * (axis[n - 1] - axis[n - 2]) : 0.0;
    if (v < axis.front() - below - slack || v > axis.back() + above + slack) return std::nullopt;
    auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.end()) return n - 1;
    auto idx = static_cast<std::size_t>(it - axis.begin());
    if (idx > 0 && v - axis[idx - 1] <= axis[idx] - v) --idx;
    return idx;
}

std::optional<AxisSample> bilinear_sample(const std::vector<double>& axis, double v) {
    const double slack = axis_slack(axis);
    if (v < axis.front() - slack || v > axis.back() + slack) return std::nullopt;
    if (axis.size() == 1) return AxisSample{0, 0, 0.0};
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - axis.begin()), 1, axis.size() - 1);
    std::size_t lo = hi - 1;
    double w = std::clamp((v - axis[lo]) / (axis[hi] - axis[lo]), 0.0, 1.0);
    if (w < kCoordSlack) w = 0.0;
    if (w > 1.0 - kCoordSlack) w = 1.0;
    return AxisSample{lo, hi, w};
}

double resample(const DbMap& ref, double x, double y, Resampling alignment) {
    if (alignment == Resampling::Nearest) {
        const auto ix = nearest_index(ref.xs, x);
        const auto iy = nearest_index(ref.ys, y);
        if (!ix || !iy) return kNaN;
        return ref.at(*ix, *iy);
    }
    const auto sx = bilinear_sample(ref.xs, x);
    const auto sy = bilinear_sample(ref.ys, y);
    if (!sx || !sy) return kNaN;
    double acc = 0.0;
    const std::pair<std::size_t, double> xs[2] = {{sx->lo, 1.0 - sx->w}, {sx->hi, sx->w}};
    const std::pair<std::size_t, double> ys[2] = {{sy->lo, 1.0 - sy->w}, {sy->hi, sy->w}};
    for (const auto& [iy, wy] : ys)
        for (const auto& [ix, wx] : xs) {
            const double w = wx * wy;
            if (w == 0.0) continue;
            const double v = ref.at(ix, iy);
            if (std::isnan(v)) return kNaN;
            acc += w * v;
        }
    return acc;
}

} // namespace

ComparisonReport compare_maps(const DbMap& model, const DbMap& reference, Resampling alignment) {
    ComparisonReport report;
    report.alignment = alignment;
    report.xs = model.xs;
    report.ys = model.ys;
    const std::size_t nx = model.xs.size();
    const std::size_t cells = model.db.size();
    report.error_map_db.assign(cells, kNaN);
    if (reference.xs.empty() || reference.ys.empty() || cells == 0)
        throw Error(ErrorKind::EmptyComparison, "no overlapping cells between model and reference");

    std::vector<double> ref_db(cells, kNaN);
    double model_peak = -std::numeric_limits<double>::infinity();
    double ref_peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells; ++i) {
        if (std::isnan(model.db[i])) continue;
        const double r = resample(reference, model.xs[i % nx], model.ys[i / nx], alignment);
        if (std::isnan(r)) continue;
        ref_db[i] = r;
        model_peak = std::max(model_peak, model.db[i]);
        ref_peak = std::max(ref_peak, r);
        ++report.cells_compared;
    }
    if (report.cells_compared == 0)
        throw Error(ErrorKind::EmptyComparison, "no overlapping cells between model and reference");

    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        if (std::isnan(ref_db[i])) continue;
        const double err = std::abs((model.db[i] - model_peak) - (ref_db[i] - ref_peak));
        report.error_map_db[i] = err;
        sum += err;
        report.max_error_db = std::max(report.max_error_db, err);
    }
    report.geometric_mean_error_db = sum / static_cast<double>(report.cells_compared);
    return report;
}

ComparisonReport compare_maps(const FieldGrid& model, const DbMap& reference, Resampling alignment) {
    return compare_maps(to_db_map(model), reference, alignment);
}

void write_report(std::ostream& out, const ComparisonReport& report) {
    out << "# pkgfield comparison report\n"
        << "# geometric_mean_error_db: mean of |model_db - reference_db| over compared cells, each map\n"
        << "# re-referenced to its own peak first; equals the geometric mean of the linear magnitude\n"
        << "# ratios (each folded to >= 1) expressed in dB.\n"
        << "alignment = " << to_string(report.alignment) << '\n'
        << "cells_compared = " << report.cells_compared << '\n'
        << "geometric_mean_error_db = " << format_sig9(report.geometric_mean_error_db) << '\n'
        << "max_error_db = " << format_sig9(report.max_error_db) << '\n';
}

void write_error_map_csv(std::ostream& out, const ComparisonReport& report) {
    out << "x_mm,y_mm,error_db\n";
    const std::size_t nx = report.xs.size();
    for (std::size_t i = 0; i < report.error_map_db.size(); ++i) {
        if (std::isnan(report.error_map_db[i])) continue;
        out << format_sig9(report.xs[i % nx]) << ',' << format_sig9(report.ys[i / nx]) << ','
            << format_sig9(report.error_map_db[i]) << '\n';
    }
}

} // namespace pkgfield
