#pragma once

// Stationary scattering off the rectangular barrier: transmission and
// reflection amplitudes, unwrapped phase, the closed-form delay time, the
// critical-opacity analysis and Hartman's transmission time.
//
// Amplitudes are evaluated through the entire function
//   G(k) = 4 k cos(qL) - 2i (2k^2 - k0^2) sin(qL)/q,   q^2 = k^2 - k0^2,
// so that T(k) = 4 k e^{-ikL} / G(k) is manifestly independent of the branch
// of q and extends to complex k (needed by the pole solver).  G is D(k)/q
// for D = (k+q)^2 e^{-iqL} - (k-q)^2 e^{iqL}, whose zeros are the poles.

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "units.hpp"

namespace qtun {

namespace detail {

// sin(qL)/q and cos(qL) as functions of q^2 (entire, branch-free).
inline std::complex<double> sinq_over_q(std::complex<double> q2, double L) {
    if (std::abs(q2) * L * L < 1e-8) {
        const std::complex<double> w = q2 * L * L;
        return L * (1.0 - w / 6.0 * (1.0 - w / 20.0));
    }
    const std::complex<double> q = std::sqrt(q2);
    return std::sin(q * L) / q;
}

inline std::complex<double> cosq(std::complex<double> q2, double L) {
    if (std::abs(q2) * L * L < 1e-8) {
        const std::complex<double> w = q2 * L * L;
        return 1.0 - w / 2.0 * (1.0 - w / 12.0);
    }
    return std::cos(std::sqrt(q2) * L);
}

}  // namespace detail

/// Denominator of the transmission amplitude divided by q: an entire
/// function of k whose zeros are the resonance poles.
inline std::complex<double> barrier_denominator(const BarrierSpec& spec, std::complex<double> k) {
    const double k02 = spec.V0 / spec.hb2m();
    const std::complex<double> q2 = k * k - k02;
    return 4.0 * k * detail::cosq(q2, spec.L) -
           std::complex<double>(0.0, 2.0) * (2.0 * k * k - k02) * detail::sinq_over_q(q2, spec.L);
}

/// Transmission amplitude at (possibly complex) wavenumber k.
inline std::complex<double> transmission_amplitude(const BarrierSpec& spec, std::complex<double> k) {
    spec.validate();
    if (k == std::complex<double>(0.0, 0.0))
        throw std::domain_error("transmission: k must be nonzero");
    const std::complex<double> G = barrier_denominator(spec, k);
    const std::complex<double> i(0.0, 1.0);
    return 4.0 * k * std::exp(-i * k * spec.L) / G;
}

struct TransmissionData {
    std::complex<double> T;
    std::complex<double> R;
    double magnitude2;  // |T|^2
    double phase;       // principal arg T; see phase_unwrapped for a continuous table
    bool underflow = false;  // extreme kappa*L, |T|^2 saturated to 0
};

inline TransmissionData transmission(const BarrierSpec& spec, std::complex<double> k) {
    spec.validate();
    if (k == std::complex<double>(0.0, 0.0))
        throw std::domain_error("transmission: k must be nonzero");
    const double k02 = spec.V0 / spec.hb2m();
    const std::complex<double> q2 = k * k - k02;
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> G = barrier_denominator(spec, k);
    TransmissionData out;
    if (!std::isfinite(G.real()) || !std::isfinite(G.imag())) {
        // cosh(kappa L) overflowed; |T|^2 saturates to 0 and all flux reflects.
        out.T = 0.0;
        out.magnitude2 = 0.0;
        out.underflow = true;
        out.phase = 0.0;
        out.R = 0.0;
        if (k.imag() == 0.0 && k.real() > 0.0 && k.real() * k.real() < k02) {
            const double kr = k.real();
            const double kap = std::sqrt(k02 - kr * kr);
            const double A = 0.5 * (kap / kr - kr / kap);
            const double B = 0.5 * (kap / kr + kr / kap);
            out.phase = -kr * spec.L - std::atan(A);                // kappa L -> inf limit
            out.R = -i * B / (1.0 + i * A);                         // |R| = 1
        }
        return out;
    }
    out.T = 4.0 * k * std::exp(-i * k * spec.L) / G;
    // R = (i/2) (q^2 - k^2) [sin(qL)/q] T e^{ikL} / k
    out.R = 0.5 * i * (q2 - k * k) * detail::sinq_over_q(q2, spec.L) * out.T *
            std::exp(i * k * spec.L) / k;
    out.magnitude2 = std::norm(out.T);
    out.phase = std::arg(out.T);
    return out;
}

inline TransmissionData transmission(const BarrierSpec& spec, double k) {
    return transmission(spec, std::complex<double>(k, 0.0));
}

struct PhasePoint {
    double k;
    double phase;  // unwrapped, continuous in k
};

/// Unwrapped transmission phase on a monotone positive k grid.  Throws if
/// the grid is too coarse for the pi-jump guard.
inline std::vector<PhasePoint> phase_unwrapped(const BarrierSpec& spec, std::span<const double> k_grid) {
    if (k_grid.empty()) throw std::invalid_argument("phase_unwrapped: empty grid");
    std::vector<PhasePoint> out;
    out.reserve(k_grid.size());
    double prev_raw = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1])))
            throw std::invalid_argument("phase_unwrapped: grid must be positive and strictly increasing");
        const double raw = transmission(spec, k_grid[i]).phase;
        if (i == 0) {
            acc = raw;
        } else {
            double d = raw - prev_raw;
            d -= 2.0 * M_PI * std::round(d / (2.0 * M_PI));
            if (std::abs(d) >= M_PI * 0.95)
                throw std::runtime_error("phase_unwrapped: grid too coarse (adjacent jump >= pi)");
            acc += d;
        }
        prev_raw = raw;
        out.push_back({k_grid[i], acc});
    }
    return out;
}

/// Closed-form delay time t_phi = (dphi/dk)/v_k for E < V0, in fs.
inline double delay_time(const BarrierSpec& spec) {
    const DerivedScales s = derive_scales(spec);
    if (!s.kappa) throw std::domain_error("delay_time: requires E < V0");
    const double k = s.k, kap = *s.kappa, k04 = s.k0 * s.k0 * s.k0 * s.k0;
    const double kL = kap * spec.L;
    double ratio;
    if (kL > 300.0) {
        ratio = 2.0;  // coth(kL) and every correction are 1 to double precision
    } else {
        const double num = k04 * std::sinh(2.0 * kL) - 2.0 * kL * k * k * (k * k - kap * kap);
        const double den = 4.0 * k * k * kap * kap + k04 * std::sinh(kL) * std::sinh(kL);
        ratio = num / den;
    }
    return ratio / (s.v_k * kap) - s.t0_free;
}

/// Dimensionless delay t_phi / t0 with t0 = mL/(hbar k0), as a function of
/// the opacity alpha and the ratio u = V0/E > 1.
inline double delay_time_dimensionless(double alpha, double u) {
    if (!(alpha > 0.0)) throw std::invalid_argument("delay_time_dimensionless: alpha must be > 0");
    if (!(u > 1.0)) throw std::domain_error("delay_time_dimensionless: requires u > 1");
    const double g = 2.0 * alpha * std::sqrt(1.0 - 1.0 / u);
    const double g2a2 = g * g / (alpha * alpha);
    const double root = std::sqrt(4.0 - g2a2);
    if (g > 600.0) {
        // scale out e^g; sinh g, cosh g, sinh^2(g/2) ~ e^g {1/2, 1/2, 1/4}
        const double num = 0.5 * (4.0 / g - 1.0);
        const double den = 0.25 * root;
        return num / den;
    }
    const double num = 4.0 / g * std::sinh(g) - std::cosh(g) + g2a2 - 3.0;
    const double sh = std::sinh(0.5 * g);
    const double den = (g2a2 - 0.25 * g2a2 * g2a2 + sh * sh) * root;
    return num / den;
}

namespace detail {

template <class F, class DF>
inline double bisect_newton(F f, DF df, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double fx = f(x), dfx = df(x);
        if (dfx == 0.0) break;
        const double step = fx / dfx;
        x -= step;
        if (x < lo || x > hi) { x = 0.5 * (lo + hi); break; }
        if (std::abs(step) < 1e-16 * std::abs(x)) break;
    }
    return x;
}

}  // namespace detail

/// Critical opacity alpha_c: root of cosh(2a) - (2/a) sinh(2a) = 1 on (0, inf),
/// excluding the removable a -> 0 behavior (bracket starts at 0.5).
inline double critical_opacity() {
    auto f = [](double a) { return std::cosh(2.0 * a) - 2.0 / a * std::sinh(2.0 * a) - 1.0; };
    auto df = [](double a) {
        return 2.0 * std::sinh(2.0 * a) + 2.0 / (a * a) * std::sinh(2.0 * a) -
               4.0 / a * std::cosh(2.0 * a);
    };
    static const double root = detail::bisect_newton(f, df, 0.5, 6.0);
    return root;
}

/// The u > 1 at which the positive-to-negative delay transition occurs for a
/// given opacity.  Solves the transition condition for gamma on (0, 2 alpha),
/// then inverts u = 1/(1 - (gamma/2 alpha)^2).  Throws when alpha <= alpha_c
/// (the transition does not occur).
inline double transition_u(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("transition_u: alpha must be > 0");
    if (!(alpha > critical_opacity()))
        throw std::domain_error("transition_u: no transition below the critical opacity");
    const double a2 = alpha * alpha;
    auto f = [a2](double g) {
        return 4.0 / g * std::sinh(g) - std::cosh(g) - 3.0 + g * g / a2;
    };
    auto df = [a2](double g) {
        return -4.0 / (g * g) * std::sinh(g) + 4.0 / g * std::cosh(g) - std::sinh(g) + 2.0 * g / a2;
    };
    const double gmax = 2.0 * alpha * (1.0 - 1e-12);
    const int nscan = 4000;
    double lo = 0.0, hi = 0.0;
    double gprev = gmax * 1e-7;
    double fprev = f(gprev);
    for (int j = 1; j <= nscan; ++j) {
        const double g = gmax * j / nscan;
        const double fg = f(g);
        if ((fg > 0.0) != (fprev > 0.0)) { lo = gprev; hi = g; break; }
        gprev = g; fprev = fg;
    }
    if (hi == 0.0) throw std::domain_error("transition_u: no sign change found (alpha at/below critical)");
    const double g = detail::bisect_newton(f, df, lo, hi);
    const double r = g / (2.0 * alpha);
    return 1.0 / (1.0 - r * r);
}

struct HartmanTime {
    double tau_H;      // t_phi + mL/(hbar k), fs
    double asymptote;  // 2m/(hbar k kappa), fs
};

inline HartmanTime hartman_time(const BarrierSpec& spec) {
    const DerivedScales s = derive_scales(spec);
    if (!s.kappa) throw std::domain_error("hartman_time: requires E < V0");
    const double tphi = delay_time(spec);
    return {tphi + s.t0_free, 2.0 / (s.v_k * *s.kappa)};
}

enum class DelaySign { positive_delay, negative_delay, transition };

struct DelayReport {
    double t_phi;                 // fs
    double t_phi_dimensionless;   // t_phi / (mL/hbar k0)
    double tau_H;                 // fs
    double hartman_asymptote;     // fs
    DelaySign sign_class;
};

inline DelayReport delay_report(const BarrierSpec& spec) {
    const DerivedScales s = derive_scales(spec);
    const double tphi = delay_time(spec);
    const HartmanTime h = hartman_time(spec);
    DelayReport r;
    r.t_phi = tphi;
    r.t_phi_dimensionless = tphi / s.t0_barrier;
    r.tau_H = h.tau_H;
    r.hartman_asymptote = h.asymptote;
    r.sign_class = std::abs(tphi) <= 1e-9 ? DelaySign::transition
                  : tphi > 0.0 ? DelaySign::positive_delay
                               : DelaySign::negative_delay;
    return r;
}

}  // namespace qtun
