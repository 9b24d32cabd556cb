#pragma once

#include "pkgfield/geometry.hpp"
#include "pkgfield/materials.hpp"

#include <complex>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace pkgfield {

using Complex = std::complex<double>;

enum class Polarization { Parallel, Perpendicular };

const char* to_string(Polarization pol);

/// Amplitude coefficients of a planar dielectric interface.
///
/// Sign convention: r_perp = (n1 cos_i - n2 cos_t) / (n1 cos_i + n2 cos_t) and
/// r_par = (n1 cos_t - n2 cos_i) / (n1 cos_t + n2 cos_i), so both reduce to
/// (n1 - n2) / (n1 + n2) at normal incidence. Past the critical angle cos_t is
/// taken as -j*sqrt(sin_t^2 - 1) (evanescent decay for the exp(-j*beta*d)
/// convention) and |r| = 1; t is then the evanescent amplitude.
struct InterfaceCoefficients {
    Complex r;
    Complex t;
    std::optional<double> theta_t; // unset under total internal reflection
    bool total_internal_reflection = false;
    Polarization polarization = Polarization::Perpendicular;
};

InterfaceCoefficients fresnel(double theta_i, double n1, double n2, Polarization pol);

/// Heatsink reflection. Perfect conductor by default (-1 at every angle);
/// magnitude < 1 models a lossy metal with the same phase.
Complex reflector_coefficient(double theta_i, double magnitude = 1.0);

/// Transmit amplitude pattern over the polar angle from the vertical (+z,
/// towards the heatsink), theta in [0, pi]. In-plane rays launch at pi/2.
class AntennaPattern {
public:
    static AntennaPattern isotropic() { return AntennaPattern{}; }
    /// (angle in degrees, amplitude gain) nodes, strictly ascending within [0, 180].
    static AntennaPattern from_table(std::vector<std::pair<double, double>> nodes_deg);
    /// Two columns per line: angle_degrees and amplitude_gain, separated by a
    /// comma or whitespace. '#' starts a comment.
    static AntennaPattern load(const std::filesystem::path& path);

    bool is_isotropic() const { return nodes_.empty(); }
    /// Linear interpolation between bracketing nodes, clamped to the end nodes.
    double gain(double theta) const;

    bool operator==(const AntennaPattern&) const = default;

private:
    std::vector<std::pair<double, double>> nodes_; // (radians, gain)
};

double pattern_gain(double theta, const AntennaPattern& pattern);

enum class Medium { Interconnect, Bulk };

struct PathSegment {
    Medium medium;
    double length; // m, > 0
};

enum class ComponentKind { Direct, HeatsinkReflect, EdgeReflect, DiffractHeatsink };

const char* to_string(ComponentKind kind);

struct RayComponent {
    ComponentKind kind = ComponentKind::Direct;
    std::optional<Wall> wall; // EdgeReflect only
    std::vector<PathSegment> segments;
    double launch_angle = 0.0;  // polar angle from +z at the source
    Complex coefficient{1.0, 0.0};
    Complex amplitude{0.0, 0.0};

    double path_length() const;
};

struct TraceSettings {
    Polarization heatsink_polarization = Polarization::Parallel;
    Polarization edge_polarization = Polarization::Perpendicular;
    double reflector_magnitude = 1.0;
    double spreading_exponent = 0.0;
    AntennaPattern pattern = AntennaPattern::isotropic();
};

/// Everything a single trace needs, resolved once per run and shared
/// read-only across workers.
struct TraceContext {
    PackageGeometry geometry;
    PropagationConstants interconnect;
    PropagationConstants bulk;
    double n_interconnect = 1.0;
    double n_bulk = 1.0;
    double n_edge = 1.0;
    TraceSettings settings;

    static TraceContext build(const PackageGeometry& geometry, const StackMaterials& materials,
                              double frequency, const TraceSettings& settings = {},
                              AlphaWavelength alpha_mode = AlphaWavelength::FreeSpace);

    const PropagationConstants& constants(Medium m) const {
        return m == Medium::Interconnect ? interconnect : bulk;
    }
};

/// coefficient * pattern gain * L^(-p) * prod_i exp(-gamma_i * l_i), L the
/// unfolded path length and p the spreading exponent.
Complex path_amplitude(const TraceContext& ctx, const std::vector<PathSegment>& segments,
                       double launch_angle, Complex coefficient);

RayComponent trace_direct(Point2 src, Point2 rx, const TraceContext& ctx);

/// Up through the interconnect, refract into the bulk, bounce off the
/// heatsink, come back down. Same depth at both ends.
RayComponent trace_heatsink(Point2 src, Point2 rx, const TraceContext& ctx);

/// Single bounce off each die edge via image sources, in wall-id order.
std::vector<RayComponent> trace_edges(Point2 src, Point2 rx, const TraceContext& ctx);

/// Heatsink-shaped path where the upward interface transmission is replaced by
/// a caller-supplied diffraction coefficient. None when the coefficient is 0.
std::optional<RayComponent> trace_diffracted(Point2 src, Point2 rx, const TraceContext& ctx,
                                             Complex diffraction_coefficient);

} // namespace pkgfield
