#include "pkgfield/fieldmap.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace pkgfield;
using testing::rel_err;

namespace {

FieldOptions direct_only() {
    FieldOptions o;
    o.heatsink = false;
    o.edges = false;
    o.near_field.enabled = false;
    o.db_reference = DbReference::Absolute;
    o.reference_amplitude = 1.0;
    return o;
}

FieldGrid sweep(const GridSpec& spec, FieldOptions opts = {}, PackageGeometry geo = {}) {
    return compute_field_map(geo, presets::default_stack(), spec, opts);
}

std::string to_csv(const FieldGrid& f) {
    std::ostringstream s;
    write_field_csv(s, f);
    return s.str();
}

} // namespace

TEST_CASE("link result sums components in a fixed order") {
    FieldOptions opts;
    opts.diffraction = {0.3, 0.1};
    const auto link = point_to_point_field({0, 0}, {5e-3, 1e-3}, PackageGeometry{}, presets::default_stack(), opts);
    REQUIRE(link.components.size() == 7);
    CHECK(link.components[0].kind == ComponentKind::Direct);
    CHECK(link.components[1].kind == ComponentKind::HeatsinkReflect);
    for (std::size_t w = 0; w < 4; ++w) {
        CHECK(link.components[2 + w].kind == ComponentKind::EdgeReflect);
        CHECK(link.components[2 + w].wall == kAllWalls[w]);
    }
    CHECK(link.components[6].kind == ComponentKind::DiffractHeatsink);
    Complex sum{0, 0};
    for (const auto& c : link.components) sum += c.amplitude;
    CHECK(sum == link.total);
}

TEST_CASE("link endpoints are validated") {
    const auto stack = presets::default_stack();
    CHECK_THROWS_KIND(point_to_point_field({0, 0}, {0, 0}, {}, stack, {}), ErrorKind::InvalidInput);
    CHECK_THROWS_KIND(point_to_point_field({0, 0}, {12e-3, 0}, {}, stack, {}), ErrorKind::InvalidInput);
}

TEST_CASE("3x3 map against the independent path sum") {
    FieldOptions opts;
    opts.near_field.enabled = false;
    opts.db_reference = DbReference::Absolute;
    const auto f = sweep({11e-3, 11e-3}, opts);
    REQUIRE(f.grid.size == 3);
    CHECK(f.excluded[4]);
    CHECK(std::isnan(f.magnitudes_db[4]));
    CHECK(f.evaluated_cells() == 8);

    oracle::HeatsinkSetup hs;
    for (std::size_t i = 0; i < 9; ++i) {
        if (i == 4) continue;
        const Point2 p = f.grid.point(i);
        oracle::cplx expected = oracle::direct_amplitude({0, 0}, {p.x, p.y}, oracle::kSiO2, 60e9);
        expected += oracle::heatsink_amplitude(std::hypot(p.x, p.y), hs);
        for (auto e : oracle::edge_amplitudes({0, 0}, {p.x, p.y}, 22e-3, oracle::kSiO2, 1.0, 60e9, true))
            expected += e;
        CHECK(rel_err(f.values[i], expected) < 1e-9);
        CHECK(f.magnitudes_db[i] == doctest::Approx(20 * std::log10(std::abs(expected))).epsilon(1e-9));
    }
}

TEST_CASE("centered antenna gives a map with the square's symmetry") {
    const auto f = sweep({0.5e-3, std::nullopt});
    const std::size_t n = f.grid.size;
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const std::size_t i = iy * n + ix;
            if (f.excluded[i]) continue;
            const double v = f.magnitudes_db[i];
            CHECK(std::abs(v - f.magnitudes_db[iy * n + (n - 1 - ix)]) < 1e-9);
            CHECK(std::abs(v - f.magnitudes_db[(n - 1 - iy) * n + ix]) < 1e-9);
            CHECK(std::abs(v - f.magnitudes_db[ix * n + iy]) < 1e-9);
        }
}

TEST_CASE("direct-only map decays as exp(-alpha d)") {
    const auto f = sweep({0.5e-3, std::nullopt}, direct_only());
    const double alpha = oracle::alpha(oracle::kSiO2, 60e9);
    for (std::size_t i = 0; i < f.grid.point_count(); ++i) {
        if (f.excluded[i]) continue;
        const Point2 p = f.grid.point(i);
        const double expected = 20.0 * std::log10(std::exp(-alpha * std::hypot(p.x, p.y)));
        CHECK(std::abs(f.magnitudes_db[i] - expected) < 1e-9);
    }
}

TEST_CASE("peak reference puts the strongest cell at 0 dB") {
    const auto f = sweep({1e-3, std::nullopt});
    double peak = -1e300;
    for (std::size_t i = 0; i < f.grid.point_count(); ++i)
        if (!f.excluded[i]) {
            peak = std::max(peak, f.magnitudes_db[i]);
            CHECK(f.magnitudes_db[i] <= 0.0);
        }
    CHECK(peak == 0.0);
}

TEST_CASE("worker count does not change the output") {
    FieldOptions opts;
    opts.workers = 1;
    const auto one = to_csv(sweep({0.25e-3, std::nullopt}, opts));
    for (unsigned w : {2u, 3u, 8u}) {
        opts.workers = w;
        CHECK(to_csv(sweep({0.25e-3, std::nullopt}, opts)) == one);
    }
}

TEST_CASE("CSV layout") {
    const auto f = sweep({11e-3, 11e-3});
    const auto csv = to_csv(f);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x_mm,y_mm,mag_db,re,im");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
    }
    CHECK(rows == 8);
    CHECK(csv.find("\n-11,-11,") != std::string::npos);
    CHECK(format_sig9(0.1) == "0.1");
    CHECK(format_sig9(-123.456789012) == "-123.456789");
}

TEST_CASE("off-center antenna") {
    PackageGeometry geo;
    geo.antenna = {3e-3, -2e-3};
    const auto f = sweep({1e-3, std::nullopt}, {}, geo);
    REQUIRE(f.grid.antenna_cell.has_value());
    CHECK(f.grid.point(*f.grid.antenna_cell) == Point2{3e-3, -2e-3});
    CHECK(f.evaluated_cells() == f.grid.point_count() - 1);
}

TEST_CASE("field map errors") {
    FieldOptions bad_ref;
    bad_ref.db_reference = DbReference::Absolute;
    bad_ref.reference_amplitude = 0.0;
    CHECK_THROWS_KIND(sweep({1e-3, std::nullopt}, bad_ref), ErrorKind::InvalidInput);

    auto stack = presets::default_stack();
    stack.interconnect.tan_delta = 1e6;
    FieldOptions dead;
    dead.near_field.enabled = false;
    dead.heatsink = false;
    dead.edges = false;
    CHECK_THROWS_KIND(compute_field_map({}, stack, {1e-3, std::nullopt}, dead), ErrorKind::NumericalFailure);
}
