#pragma once

#include <functional>

namespace pkgfield {

/// 1/(kd)^2 + 1/(kd)^4 + 1/(kd)^6. Field magnitude scales as its square root.
double near_field_relative_power(double k, double distance);

using MagnitudeLaw = std::function<double(double)>;

/// Reactive near-field law spliced onto a far-field magnitude law at
/// radius d_nf, with one multiplicative factor making the two agree there.
class NearFieldModel {
public:
    /// Throws Error(InvalidInput) for non-positive k or radius, or when the far
    /// law is not finite and positive at the radius.
    NearFieldModel(double k, double radius, const MagnitudeLaw& far_model);

    double k() const { return k_; }
    double radius() const { return radius_; }
    double scale() const { return scale_; }

    /// scale * sqrt(near_field_relative_power(k, d)).
    double near_magnitude(double distance) const;

private:
    double k_;
    double radius_;
    double scale_;
};

/// far_model(d) for d >= radius, the scaled near-field law inside it.
double blended_magnitude(double distance, const MagnitudeLaw& far_model, const NearFieldModel& nf);

} // namespace pkgfield
