#include "pkgfield/nearfield.hpp"

#include "pkgfield/error.hpp"

#include <cmath>

namespace pkgfield {

double near_field_relative_power(double k, double distance) {
    if (!(distance > 0.0) || !std::isfinite(distance))
        throw Error(ErrorKind::InvalidDistance, "near-field distance must be positive");
    if (!(k > 0.0)) throw Error(ErrorKind::InvalidInput, "near-field k must be positive");
    const double inv2 = 1.0 / ((k * distance) * (k * distance));
    return inv2 * (1.0 + inv2 * (1.0 + inv2));
}

NearFieldModel::NearFieldModel(double k, double radius, const MagnitudeLaw& far_model)
    : k_(k), radius_(radius), scale_(0.0) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw Error(ErrorKind::InvalidInput, "near-field k must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw Error(ErrorKind::InvalidInput, "near-field radius must be positive");
    const double far_at_radius = far_model ? far_model(radius) : 0.0;
    if (!(far_at_radius > 0.0) || !std::isfinite(far_at_radius))
        throw Error(ErrorKind::InvalidInput, "far-field law undefined at the near-field radius");
    scale_ = far_at_radius / std::sqrt(near_field_relative_power(k, radius));
}

double NearFieldModel::near_magnitude(double distance) const {
    return scale_ * std::sqrt(near_field_relative_power(k_, distance));
}

double blended_magnitude(double distance, const MagnitudeLaw& far_model, const NearFieldModel& nf) {
    if (!(distance > 0.0)) throw Error(ErrorKind::InvalidDistance, "distance must be positive");
    return distance >= nf.radius() ? far_model(distance) : nf.near_magnitude(distance);
}

} // namespace pkgfield
