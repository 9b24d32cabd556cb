#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library: formulas are re-derived by a different route (frequency
// instead of wavelength, sine-law Fresnel forms, mirrored receivers instead
// of mirrored sources, brute-force angle scans instead of bisection).

#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

struct Dielectric {
    double eps_r;
    double tan_delta;
};

inline constexpr Dielectric kSiO2{3.9, 0.098};
inline constexpr Dielectric kSi{11.9, 0.252};
inline constexpr double kC0 = 299792458.0;

double alpha(Dielectric m, double frequency);
double beta(Dielectric m, double frequency);
/// exp(-(alpha + j beta) L)
cplx propagate(Dielectric m, double frequency, double length);

// Sine-law Fresnel forms. Below the critical angle only, except r_* which
// also cover total internal reflection in closed form.
cplx r_perp(double theta_i, double n1, double n2);
cplx r_par(double theta_i, double n1, double n2);
double t_perp(double theta_i, double n1, double n2);
double t_par(double theta_i, double n1, double n2);

/// Heatsink launch angle by scanning `coarse` uniform angles and then
/// re-scanning the best bracket with 1000 points until it stops shrinking.
double heatsink_angle_scan(double separation, double h, double t_bulk, double n1, double n2,
                           int coarse = 1000000);

struct HeatsinkSetup {
    double h = 6.5e-6;     // antenna to SiO2/Si interface
    double t_bulk = 0.7e-3;
    Dielectric interconnect = kSiO2;
    Dielectric bulk = kSi;
    double frequency = 60e9;
    bool parallel = true;
    double reflector = -1.0;
    int coarse = 1000000;
};

/// Full heatsink-path amplitude (isotropic, no spreading) for a lateral separation.
cplx heatsink_amplitude(double separation, const HeatsinkSetup& s);

struct Pt {
    double x, y;
};

/// Edge reflections by mirroring the receiver; wall order +x, -x, +y, -y.
std::vector<cplx> edge_amplitudes(Pt src, Pt rx, double die_side, Dielectric interconnect, double n_edge,
                                  double frequency, bool perpendicular);

/// Direct ray, isotropic, no spreading, no near-field splice.
cplx direct_amplitude(Pt src, Pt rx, Dielectric interconnect, double frequency);

/// Term-by-term 1/(kd)^2 + 1/(kd)^4 + 1/(kd)^6.
double near_field_power(double k, double d);

} // namespace oracle
