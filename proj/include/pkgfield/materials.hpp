#pragma once

#include <complex>
#include <string>

namespace pkgfield {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// One medium of the package stack.
struct MaterialProperties {
    std::string name;
    double epsilon_r = 1.0;  // relative permittivity
    double tan_delta = 0.0;  // loss tangent
    bool is_conductor = false;

    /// n = sqrt(epsilon_r). Only meaningful for dielectrics.
    double refractive_index() const;

    /// Throws Error(InvalidInput) when epsilon_r < 1 (dielectrics), tan_delta < 0
    /// or a value is not finite.
    void validate() const;

    bool operator==(const MaterialProperties&) const = default;
};

/// gamma = alpha + j*beta for one medium at one frequency.
struct PropagationConstants {
    double alpha = 0.0;     // Np/m
    double beta = 0.0;      // rad/m
    double frequency = 0.0; // Hz
    double lambda0 = 0.0;   // m
};

/// Which wavelength enters the attenuation constant. FreeSpace gives
/// alpha = pi*sqrt(eps_r)*tan_delta/lambda0 = (beta/2)*tan_delta; InMedium divides
/// by lambda0/sqrt(eps_r) instead, i.e. multiplies alpha by sqrt(eps_r).
enum class AlphaWavelength { FreeSpace, InMedium };

PropagationConstants propagation_constants(const MaterialProperties& material, double frequency,
                                           AlphaWavelength mode = AlphaWavelength::FreeSpace);

/// d^(-spreading_exponent) * exp(-alpha*d) * exp(-j*beta*d).
std::complex<double> complex_attenuation(const PropagationConstants& pc, double distance,
                                         double spreading_exponent = 0.0);

/// The three media a trace needs: the interconnect layer the antenna sits in,
/// the bulk silicon between it and the heatsink, and whatever bounds the die edges.
struct StackMaterials {
    MaterialProperties interconnect;
    MaterialProperties bulk;
    MaterialProperties edge;

    void validate() const;
};

namespace presets {

// Handbook permittivities; loss tangents are the 60 GHz figures.
MaterialProperties silicon_dioxide();
MaterialProperties silicon();
MaterialProperties air();
StackMaterials default_stack();

} // namespace presets

} // namespace pkgfield
