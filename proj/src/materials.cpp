#include "pkgfield/materials.hpp"

#include "pkgfield/error.hpp"

#include <cmath>

namespace pkgfield {

double MaterialProperties::refractive_index() const { return std::sqrt(epsilon_r); }

void MaterialProperties::validate() const {
    if (!std::isfinite(epsilon_r) || !std::isfinite(tan_delta))
        throw Error(ErrorKind::InvalidInput, "material '" + name + "': non-finite constant");
    if (tan_delta < 0.0)
        throw Error(ErrorKind::InvalidInput, "material '" + name + "': tan_delta must be >= 0");
    if (!is_conductor && epsilon_r < 1.0)
        throw Error(ErrorKind::InvalidInput, "material '" + name + "': epsilon_r must be >= 1");
}

PropagationConstants propagation_constants(const MaterialProperties& material, double frequency,
                                           AlphaWavelength mode) {
    if (!(frequency > 0.0) || !std::isfinite(frequency))
        throw Error(ErrorKind::InvalidInput, "frequency must be positive");
    if (material.is_conductor)
        throw Error(ErrorKind::UnsupportedMaterial,
                    "material '" + material.name + "' is a conductor; no propagation constants");
    material.validate();

    const double lambda0 = kSpeedOfLight / frequency;
    const double n = material.refractive_index();
    const double alpha_wavelength = mode == AlphaWavelength::FreeSpace ? lambda0 : lambda0 / n;

    PropagationConstants pc;
    pc.frequency = frequency;
    pc.lambda0 = lambda0;
    pc.beta = 2.0 * kPi / lambda0 * n;
    pc.alpha = kPi * n / alpha_wavelength * material.tan_delta;
    return pc;
}

std::complex<double> complex_attenuation(const PropagationConstants& pc, double distance,
                                         double spreading_exponent) {
    if (!(distance > 0.0) || !std::isfinite(distance))
        throw Error(ErrorKind::InvalidDistance, "attenuation distance must be positive");
    if (!(spreading_exponent >= 0.0))
        throw Error(ErrorKind::InvalidInput, "spreading exponent must be >= 0");

    const double magnitude = std::exp(-pc.alpha * distance) *
                             (spreading_exponent == 0.0 ? 1.0 : std::pow(distance, -spreading_exponent));
    return std::polar(magnitude, -pc.beta * distance);
}

void StackMaterials::validate() const {
    for (const auto* m : {&interconnect, &bulk, &edge}) {
        if (m->is_conductor)
            throw Error(ErrorKind::UnsupportedMaterial,
                        "material '" + m->name + "' cannot be a conductor in the dielectric stack");
        m->validate();
    }
}

namespace presets {

MaterialProperties silicon_dioxide() { return {"SiO2", 3.9, 0.098, false}; }
MaterialProperties silicon() { return {"Si", 11.9, 0.252, false}; }
MaterialProperties air() { return {"air", 1.0, 0.0, false}; }
StackMaterials default_stack() { return {silicon_dioxide(), silicon(), air()}; }

} // namespace presets

} // namespace pkgfield
