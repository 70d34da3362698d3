#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for arbitrary complex z.
//
// Evaluation is split by region in the closed upper half-plane:
//   |z| <= 1    Maclaurin series, w = exp(-z^2) + (2iz/sqrt(pi)) M(1,3/2,-z^2)
//   1 < |z| < 12  pole-corrected trapezoidal sum over exp(-t^2)/(z-t); the
//                 quadrature error e^{-pi^2/h^2} is below double precision at
//                 h = 1/4, so the sum is exact up to roundoff.  Two staggered
//                 node sets are used so Re z never comes near a node or a
//                 zero of the pole-correction denominator.
//   |z| >= 12   asymptotic Laurent series w ~ (i/sqrt(pi)) sum (2m-1)!!/(2z^2)^m / z
// Lower half-plane: w(z) = 2 exp(-z^2) - w(-z); the exponential can exceed
// double range there, in which case an overflow error is thrown.
// Left half-plane: w(-conj(z)) = conj(w(z)).
//
// Relative accuracy (modulus) is ~1e-14 over |z| <= 10 and ~1e-13 beyond,
// locked by the oracle suite in tests/.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qtun {

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kTrapH = 0.25;   // node spacing
inline constexpr int kTrapN = 27;        // node pairs; exp(-(N h)^2) ~ 4e-20

struct TrapTables {
    double g_int[kTrapN];  // exp(-(k h)^2),       k = 0..N-1
    double g_mid[kTrapN];  // exp(-((k+1/2) h)^2), k = 0..N-1
    TrapTables() {
        for (int k = 0; k < kTrapN; ++k) {
            const double ti = k * kTrapH;
            const double tm = (k + 0.5) * kTrapH;
            g_int[k] = std::exp(-ti * ti);
            g_mid[k] = std::exp(-tm * tm);
        }
    }
};

inline const TrapTables& trap_tables() {
    static const TrapTables t;
    return t;
}

// Upper half-plane, Re z >= 0, |z| <= 1.
inline std::complex<double> w_maclaurin(std::complex<double> z) {
    const std::complex<double> mz2 = -z * z;
    std::complex<double> sum = 1.0, term = 1.0;
    for (int m = 0; m < 64; ++m) {
        term *= mz2 / (m + 1.5);
        sum += term;
        if (std::norm(term) < 1e-36 * std::norm(sum)) break;
    }
    return std::exp(mz2) + 2.0 * std::complex<double>(0.0, 1.0) * z / kSqrtPi * sum;
}

// Upper half-plane, Re z >= 0, 1 < |z| < 12.
inline std::complex<double> w_trapezoid(std::complex<double> z) {
    const TrapTables& tab = trap_tables();
    const double x = z.real();
    const double frac = x / kTrapH - std::floor(x / kTrapH);
    const std::complex<double> z2 = z * z;
    const std::complex<double> two_z = 2.0 * z;
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> q = std::exp(2.0 * M_PI * i * z / kTrapH);
    std::complex<double> sum, corr;
    if (frac >= 0.25 && frac < 0.75) {
        // integer nodes t = k h; x is at least h/4 away from every node
        sum = 1.0 / z;
        for (int k = 1; k < kTrapN; ++k) {
            const double t = k * kTrapH;
            sum += tab.g_int[k] * two_z / (z2 - t * t);
        }
        corr = -2.0 * std::exp(-z2) * q / (1.0 - q);
    } else {
        // midpoint nodes t = (k+1/2) h
        sum = 0.0;
        for (int k = 0; k < kTrapN; ++k) {
            const double t = (k + 0.5) * kTrapH;
            sum += tab.g_mid[k] * two_z / (z2 - t * t);
        }
        corr = 2.0 * std::exp(-z2) * q / (1.0 + q);
    }
    return i * kTrapH / M_PI * sum + corr;
}

// Upper half-plane, |z| >= 12.
inline std::complex<double> w_asymptotic(std::complex<double> z) {
    const std::complex<double> inv2z2 = 0.5 / (z * z);
    std::complex<double> sum = 1.0, term = 1.0;
    for (int m = 0; m < 40; ++m) {
        term *= double(2 * m + 1) * inv2z2;
        sum += term;
        if (std::norm(term) < 1e-32 * std::norm(sum)) break;
    }
    return std::complex<double>(0.0, 1.0) / (kSqrtPi * z) * sum;
}

inline std::complex<double> w_upper(std::complex<double> z) {
    if (z.real() < 0.0) return std::conj(w_upper(-std::conj(z)));
    const double r2 = std::norm(z);
    if (r2 <= 1.0) return w_maclaurin(z);
    if (r2 >= 144.0) return w_asymptotic(z);
    return w_trapezoid(z);
}

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
/// Throws std::domain_error on non-finite input and std::overflow_error when
/// the value exceeds double range (possible only deep in the lower half-plane).
inline std::complex<double> faddeeva_w(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error("faddeeva_w: non-finite argument");
    if (z.imag() >= 0.0) return detail::w_upper(z);
    // w(z) = 2 exp(-z^2) - w(-z); |w(-z)| <= 1 so the exponential dominates.
    const std::complex<double> mz2 = -z * z;
    if (mz2.real() > 709.0)
        throw std::overflow_error("faddeeva_w: |w(z)| exceeds double range");
    return 2.0 * std::exp(mz2) - detail::w_upper(-z);
}

}  // namespace qtun
