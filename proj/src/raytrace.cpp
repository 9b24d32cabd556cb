#include "pkgfield/raytrace.hpp"

#include "pkgfield/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace pkgfield {

const char* to_string(Polarization pol) {
    return pol == Polarization::Parallel ? "parallel" : "perpendicular";
}

const char* to_string(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::Direct: return "direct";
    case ComponentKind::HeatsinkReflect: return "heatsink";
    case ComponentKind::EdgeReflect: return "edge";
    case ComponentKind::DiffractHeatsink: return "diffracted";
    }
    return "?";
}

InterfaceCoefficients fresnel(double theta_i, double n1, double n2, Polarization pol) {
    if (!(theta_i >= 0.0) || !(theta_i < 0.5 * kPi))
        throw Error(ErrorKind::InvalidInput, "fresnel: incidence angle outside [0, pi/2)");
    if (!(n1 > 0.0) || !(n2 > 0.0) || !std::isfinite(n1) || !std::isfinite(n2))
        throw Error(ErrorKind::InvalidInput, "fresnel: refractive indices must be positive");

    const double cos_i = std::cos(theta_i);
    const double sin_t = n1 / n2 * std::sin(theta_i);

    InterfaceCoefficients out;
    out.polarization = pol;
    Complex cos_t;
    if (sin_t <= 1.0) {
        cos_t = std::sqrt(1.0 - sin_t * sin_t);
        out.theta_t = std::asin(sin_t);
    } else {
        cos_t = Complex(0.0, -std::sqrt(sin_t * sin_t - 1.0));
        out.total_internal_reflection = true;
    }

    if (pol == Polarization::Perpendicular) {
        const Complex den = n1 * cos_i + n2 * cos_t;
        out.r = (n1 * cos_i - n2 * cos_t) / den;
        out.t = 2.0 * n1 * cos_i / den;
    } else {
        const Complex den = n1 * cos_t + n2 * cos_i;
        out.r = (n1 * cos_t - n2 * cos_i) / den;
        out.t = 2.0 * n1 * cos_i / den;
    }
    return out;
}

Complex reflector_coefficient(double theta_i, double magnitude) {
    if (!(theta_i >= 0.0) || !(theta_i < 0.5 * kPi))
        throw Error(ErrorKind::InvalidInput, "reflector: incidence angle outside [0, pi/2)");
    return {-magnitude, 0.0};
}

AntennaPattern AntennaPattern::from_table(std::vector<std::pair<double, double>> nodes_deg) {
    if (nodes_deg.empty()) throw Error(ErrorKind::InvalidPattern, "pattern table is empty");
    AntennaPattern p;
    p.nodes_.reserve(nodes_deg.size());
    for (std::size_t i = 0; i < nodes_deg.size(); ++i) {
        const auto [deg, gain] = nodes_deg[i];
        if (!std::isfinite(deg) || deg < 0.0 || deg > 180.0)
            throw Error(ErrorKind::InvalidPattern, "pattern angle outside [0, 180] degrees");
        if (!std::isfinite(gain) || gain < 0.0)
            throw Error(ErrorKind::InvalidPattern, "pattern gain must be finite and >= 0");
        if (i > 0 && !(deg > nodes_deg[i - 1].first))
            throw Error(ErrorKind::InvalidPattern, "pattern angles must be strictly ascending");
        p.nodes_.emplace_back(deg * kPi / 180.0, gain);
    }
    return p;
}

AntennaPattern AntennaPattern::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open pattern file " + path.string());

    std::vector<std::pair<double, double>> nodes;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a)) continue;
        auto number = [&](const std::string& tok, double& v) {
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            return ec == std::errc{} && ptr == tok.data() + tok.size();
        };
        double deg = 0.0, gain = 0.0;
        if (!(fields >> b) || (fields >> extra) || !number(a, deg) || !number(b, gain)) {
            throw Error(ErrorKind::InvalidPattern, path.string() + ":" + std::to_string(line_no) +
                                                       ": expected 'angle_degrees, amplitude_gain'");
        }
        nodes.emplace_back(deg, gain);
    }
    try {
        return from_table(std::move(nodes));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

double AntennaPattern::gain(double theta) const {
    if (nodes_.empty()) return 1.0;
    if (theta <= nodes_.front().first) return nodes_.front().second;
    if (theta >= nodes_.back().first) return nodes_.back().second;
    auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), theta,
                               [](double v, const auto& node) { return v < node.first; });
    auto lo = std::prev(hi);
    if (theta == lo->first) return lo->second;
    const double w = (theta - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

double pattern_gain(double theta, const AntennaPattern& pattern) { return pattern.gain(theta); }

double RayComponent::path_length() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.length;
    return total;
}

TraceContext TraceContext::build(const PackageGeometry& geometry, const StackMaterials& materials,
                                 double frequency, const TraceSettings& settings,
                                 AlphaWavelength alpha_mode) {
    geometry.validate();
    materials.validate();
    if (!(settings.reflector_magnitude >= 0.0 && settings.reflector_magnitude <= 1.0))
        throw Error(ErrorKind::InvalidInput, "reflector magnitude must lie in [0, 1]");
    if (!(settings.spreading_exponent >= 0.0) || !std::isfinite(settings.spreading_exponent))
        throw Error(ErrorKind::InvalidInput, "spreading exponent must be >= 0");

    TraceContext ctx;
    ctx.geometry = geometry;
    ctx.interconnect = propagation_constants(materials.interconnect, frequency, alpha_mode);
    ctx.bulk = propagation_constants(materials.bulk, frequency, alpha_mode);
    ctx.n_interconnect = materials.interconnect.refractive_index();
    ctx.n_bulk = materials.bulk.refractive_index();
    ctx.n_edge = materials.edge.refractive_index();
    ctx.settings = settings;
    return ctx;
}

Complex path_amplitude(const TraceContext& ctx, const std::vector<PathSegment>& segments,
                       double launch_angle, Complex coefficient) {
    Complex a = coefficient * ctx.settings.pattern.gain(launch_angle);
    double total = 0.0;
    for (const auto& s : segments) {
        a *= complex_attenuation(ctx.constants(s.medium), s.length, 0.0);
        total += s.length;
    }
    if (ctx.settings.spreading_exponent != 0.0) a *= std::pow(total, -ctx.settings.spreading_exponent);
    return a;
}

RayComponent trace_direct(Point2 src, Point2 rx, const TraceContext& ctx) {
    const double d = distance(src, rx);
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidInput, "direct ray: source and receiver coincide");

    RayComponent c;
    c.kind = ComponentKind::Direct;
    c.segments = {{Medium::Interconnect, d}};
    c.launch_angle = 0.5 * kPi;
    c.coefficient = 1.0;
    c.amplitude = path_amplitude(ctx, c.segments, c.launch_angle, c.coefficient);
    return c;
}

namespace {

struct HeatsinkPath {
    double theta1 = 0.0; // in the interconnect layer
    double theta2 = 0.0; // in the bulk layer
    std::vector<PathSegment> segments;
};

HeatsinkPath heatsink_path(Point2 src, Point2 rx, const TraceContext& ctx) {
    const auto& geo = ctx.geometry;
    HeatsinkPath p;
    p.theta1 = solve_heatsink_crossing(distance(src, rx), geo, ctx.n_interconnect, ctx.n_bulk);
    const double s2 = ctx.n_interconnect / ctx.n_bulk * std::sin(p.theta1);
    p.theta2 = std::asin(s2);
    const double leg1 = geo.antenna_to_interface() / std::cos(p.theta1);
    const double leg2 = geo.bulk_leg_height() / std::sqrt(1.0 - s2 * s2);
    p.segments = {{Medium::Interconnect, leg1},
                  {Medium::Bulk, leg2},
                  {Medium::Bulk, leg2},
                  {Medium::Interconnect, leg1}};
    return p;
}

} // namespace

RayComponent trace_heatsink(Point2 src, Point2 rx, const TraceContext& ctx) {
    const auto path = heatsink_path(src, rx, ctx);
    const auto pol = ctx.settings.heatsink_polarization;

    RayComponent c;
    c.kind = ComponentKind::HeatsinkReflect;
    c.launch_angle = path.theta1;
    c.coefficient = fresnel(path.theta1, ctx.n_interconnect, ctx.n_bulk, pol).t *
                    reflector_coefficient(path.theta2, ctx.settings.reflector_magnitude) *
                    fresnel(path.theta2, ctx.n_bulk, ctx.n_interconnect, pol).t;
    c.segments = path.segments;
    c.amplitude = path_amplitude(ctx, c.segments, c.launch_angle, c.coefficient);
    return c;
}

std::optional<RayComponent> trace_diffracted(Point2 src, Point2 rx, const TraceContext& ctx,
                                             Complex diffraction_coefficient) {
    if (diffraction_coefficient == Complex{0.0, 0.0}) return std::nullopt;
    const auto path = heatsink_path(src, rx, ctx);
    const auto pol = ctx.settings.heatsink_polarization;

    RayComponent c;
    c.kind = ComponentKind::DiffractHeatsink;
    c.launch_angle = path.theta1;
    c.coefficient = diffraction_coefficient *
                    reflector_coefficient(path.theta2, ctx.settings.reflector_magnitude) *
                    fresnel(path.theta2, ctx.n_bulk, ctx.n_interconnect, pol).t;
    c.segments = path.segments;
    c.amplitude = path_amplitude(ctx, c.segments, c.launch_angle, c.coefficient);
    return c;
}

std::vector<RayComponent> trace_edges(Point2 src, Point2 rx, const TraceContext& ctx) {
    const auto& geo = ctx.geometry;
    const double h = geo.half_die();
    // Slack for receivers sitting exactly on an edge.
    const double tol = 1e-12 * geo.die_side;

    std::vector<RayComponent> out;
    out.reserve(4);
    for (const auto& image : image_sources_for_edges(src, geo)) {
        const bool x_wall = image.wall == Wall::PosX || image.wall == Wall::NegX;
        const double wall_pos = (image.wall == Wall::PosX || image.wall == Wall::PosY) ? h : -h;
        const double dx = rx.x - image.position.x;
        const double dy = rx.y - image.position.y;
        const double normal_span = x_wall ? dx : dy;
        if (normal_span == 0.0) continue;

        const double s = (wall_pos - (x_wall ? image.position.x : image.position.y)) / normal_span;
        const Point2 hit{image.position.x + s * dx, image.position.y + s * dy};
        const double along = x_wall ? hit.y : hit.x;
        if (s < 0.0 || s > 1.0 + 1e-12 || std::abs(along) > h + tol) continue;

        const double theta = std::atan2(std::abs(x_wall ? dy : dx), std::abs(normal_span));

        RayComponent c;
        c.kind = ComponentKind::EdgeReflect;
        c.wall = image.wall;
        c.launch_angle = 0.5 * kPi;
        for (double len : {distance(src, hit), distance(hit, rx)})
            if (len > 0.0) c.segments.push_back({Medium::Interconnect, len});
        if (c.segments.empty()) continue;
        c.coefficient = fresnel(theta, ctx.n_interconnect, ctx.n_edge, ctx.settings.edge_polarization).r;
        c.amplitude = path_amplitude(ctx, c.segments, c.launch_angle, c.coefficient);
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace pkgfield
