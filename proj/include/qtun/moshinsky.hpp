#pragma once

// Moshinsky function M(y_s) = (1/2) exp(i m x^2 / 2 hbar t) w(i y_s) with
//   y_s = exp(-i pi/4) sqrt(m / 2 hbar t) (x - hbar s t / m),
// the building block of every shutter-problem solution here.  The index s is
// the incident wavenumber (+-k) or a resonance pole k_{+-n}.
//
// The t -> 0 limit is distributional (|y_s| diverges like t^{-1/2}); callers
// needing t = 0 use the initial condition directly, so t <= 0 is rejected.

#include <complex>
#include <stdexcept>

#include "faddeeva.hpp"
#include "units.hpp"

namespace qtun {

struct MArgument {
    double x;                // nm, measured from the barrier origin
    double t;                // fs, strictly positive
    std::complex<double> s;  // wavenumber index, nm^-1
    double mass_ratio;
};

/// y_s of the M-function argument.
inline std::complex<double> moshinsky_y(const MArgument& a) {
    if (!(a.t > 0.0)) throw std::domain_error("moshinsky_y: t must be > 0");
    const double hb2m = constants().hbar2_over_2me / a.mass_ratio;
    const double c = std::sqrt(constants().hbar / (4.0 * hb2m * a.t));  // sqrt(m/2 hbar t)
    const std::complex<double> v = 2.0 * hb2m / constants().hbar * a.s; // hbar s / m
    const std::complex<double> e_m_i_pi4(M_SQRT1_2, -M_SQRT1_2);
    return e_m_i_pi4 * (c * (a.x - v * a.t));
}

inline std::complex<double> moshinsky_m(const MArgument& a) {
    if (!(a.t > 0.0)) throw std::domain_error("moshinsky_m: t must be > 0");
    const double hb2m = constants().hbar2_over_2me / a.mass_ratio;
    const double c2 = constants().hbar / (4.0 * hb2m * a.t);            // m / (2 hbar t)
    const double c = std::sqrt(c2);
    const std::complex<double> v = 2.0 * hb2m / constants().hbar * a.s;
    // i y_s = exp(i pi/4) c (x - v t)
    const std::complex<double> e_i_pi4(M_SQRT1_2, M_SQRT1_2);
    const std::complex<double> iy = e_i_pi4 * (c * (a.x - v * a.t));
    const double phase = c2 * a.x * a.x;  // m x^2 / (2 hbar t)
    const std::complex<double> front(0.5 * std::cos(phase), 0.5 * std::sin(phase));
    return front * faddeeva_w(iy);
}

}  // namespace qtun
