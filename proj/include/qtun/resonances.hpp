#pragma once

// Complex poles k_n = a_n - i b_n of the transmission amplitude, the
// resonant (Gamow) states' boundary values u_n(0), u_n(L), and the expansion
// coefficients T_n of the resonant sum.
//
// Poles are the zeros of D(k) = (k+q)^2 e^{-iqL} - (k-q)^2 e^{iqL} with
// q = sqrt(k^2 - k0^2).  They sit near a_n ~ sqrt((n pi/L)^2 + k0^2) and are
// well separated, so per-index Newton iteration from the analytic seed is
// reliable; an argument-principle count over the search rectangle audits
// that none are missed.
//
// Normalization follows the Gamow-state rule
//   int_0^L u_n^2 dx + i (u_n(0)^2 + u_n(L)^2) / (2 k_n) = 1
// which makes the residue of T(k) at k_n equal i u_n(0) u_n(L) e^{-i k_n L};
// the test suite checks that relation by contour quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "barrier.hpp"
#include "units.hpp"

namespace qtun {

struct ResonancePole {
    int n = 0;                   // 1-based index after sorting by Re k
    std::complex<double> k;      // nm^-1, fourth quadrant
    std::complex<double> E;      // hbar^2 k^2 / 2m = eps_n - i Gamma_n/2, eV
    double a() const { return k.real(); }
    double b() const { return -k.imag(); }
    double eps() const { return E.real(); }
    double gamma_width() const { return -2.0 * E.imag(); }
};

struct ResonantMode {
    ResonancePole pole;
    std::complex<double> u0;  // u_n(0)
    std::complex<double> uL;  // u_n(L)
    double L = 0.0;           // barrier width the state belongs to, nm
};

namespace detail {

inline std::complex<double> pole_D(const BarrierSpec& spec, std::complex<double> k) {
    const double k02 = spec.V0 / spec.hb2m();
    const std::complex<double> q = std::sqrt(k * k - k02);
    const std::complex<double> i(0.0, 1.0);
    return (k + q) * (k + q) * std::exp(-i * q * spec.L) -
           (k - q) * (k - q) * std::exp(i * q * spec.L);
}

inline std::complex<double> pole_D_prime(const BarrierSpec& spec, std::complex<double> k) {
    const double k02 = spec.V0 / spec.hb2m();
    const std::complex<double> q = std::sqrt(k * k - k02);
    const std::complex<double> qp = k / q;  // dq/dk
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> em = std::exp(-i * q * spec.L);
    const std::complex<double> ep = std::exp(i * q * spec.L);
    const std::complex<double> p = k + q, m = k - q;
    return (2.0 * p * (1.0 + qp) - i * spec.L * qp * p * p) * em -
           (2.0 * m * (1.0 - qp) + i * spec.L * qp * m * m) * ep;
}

}  // namespace detail

/// Scaled residual |D(k)| / |D'(k) k|; the pole contract is < 1e-10.
inline double pole_residual(const BarrierSpec& spec, std::complex<double> k) {
    return std::abs(detail::pole_D(spec, k)) /
           (std::abs(detail::pole_D_prime(spec, k)) * std::abs(k));
}

/// The N fourth-quadrant poles with smallest real part, sorted by Re k.
inline std::vector<ResonancePole> find_poles(const BarrierSpec& spec, int N) {
    spec.validate();
    if (N < 1) throw std::invalid_argument("find_poles: N must be >= 1");
    const DerivedScales s = derive_scales(spec);
    std::vector<ResonancePole> out;
    out.reserve(N);
    for (int n = 1; n <= N; ++n) {
        const double re0 = std::sqrt(std::pow(n * M_PI / spec.L, 2) + s.k0 * s.k0);
        std::complex<double> k(re0, -0.05 * s.k0);
        // deep poles (thin barriers) sit many level spacings below the seed;
        // clamping each step to half a spacing keeps the walk in one basin
        const double smax = 0.5 * std::max(1.0, M_PI / spec.L);
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const std::complex<double> D = detail::pole_D(spec, k);
            const std::complex<double> Dp = detail::pole_D_prime(spec, k);
            std::complex<double> step = D / Dp;
            if (std::abs(step) > smax) step *= smax / std::abs(step);
            k -= step;
            if (std::abs(step) < 1e-13 * std::abs(k)) { converged = true; break; }
        }
        // a roundoff two-cycle can stall the step criterion; the residual decides
        if (!converged && pole_residual(spec, k) < 1e-12) converged = true;
        if (!converged || pole_residual(spec, k) > 1e-10)
            throw std::runtime_error("find_poles: Newton did not converge for n=" + std::to_string(n));
        if (!(k.real() > 0.0 && k.imag() < 0.0))
            throw std::runtime_error("find_poles: root for n=" + std::to_string(n) +
                                     " escaped the fourth quadrant");
        for (const ResonancePole& p : out)
            if (std::abs(p.k - k) < 1e-8)
                throw std::runtime_error("find_poles: duplicate root at n=" + std::to_string(n));
        ResonancePole pole;
        pole.k = k;
        pole.E = spec.hb2m() * k * k;
        out.push_back(pole);
    }
    std::sort(out.begin(), out.end(),
              [](const ResonancePole& a, const ResonancePole& b) { return a.k.real() < b.k.real(); });
    for (int j = 0; j < N; ++j) out[j].n = j + 1;
    return out;
}

/// Gamow state boundary values for one pole, under the normalization above.
/// The interior solution u = A cos(qx) + B sin(qx) with u'(0) = -i k_n u(0)
/// is handled in the exponential basis u = P e^{iqx} + M e^{-iqx}; the
/// trigonometric closed form of the norm integral cancels pairs of e^{|Im q|L}
/// terms and loses digits for the broad high-n states.
inline ResonantMode resonant_mode(const BarrierSpec& spec, const ResonancePole& pole) {
    const double k02 = spec.V0 / spec.hb2m();
    const std::complex<double> kn = pole.k;
    const std::complex<double> q = std::sqrt(kn * kn - k02);
    if (std::abs(q) < 1e-8 * std::abs(kn))
        throw std::runtime_error("resonant_mode: degenerate q_n ~ 0 (pole at branch point)");
    const std::complex<double> i(0.0, 1.0);
    const double L = spec.L;
    // A = 1, B = -i k_n/q  =>  P = (A - iB)/2, M = (A + iB)/2
    const std::complex<double> P = 0.5 * (1.0 - kn / q);
    const std::complex<double> Mc = 0.5 * (1.0 + kn / q);
    const std::complex<double> ep = std::exp(i * q * L);   // e^{iqL}
    const std::complex<double> em = std::exp(-i * q * L);  // e^{-iqL}
    // int_0^L u^2 dx = P^2 (e^{2iqL}-1)/(2iq) - M^2 (e^{-2iqL}-1)/(2iq) + 2 P M L
    const std::complex<double> integral = (P * P * (ep * ep - 1.0) - Mc * Mc * (em * em - 1.0)) /
                                              (2.0 * i * q) +
                                          2.0 * P * Mc * L;
    const std::complex<double> u0 = P + Mc;
    const std::complex<double> uL = P * ep + Mc * em;
    const std::complex<double> norm = integral + i * (u0 * u0 + uL * uL) / (2.0 * kn);
    const std::complex<double> scale = 1.0 / std::sqrt(norm);
    return {pole, u0 * scale, uL * scale, spec.L};
}

inline std::vector<ResonantMode> resonant_modes(const BarrierSpec& spec, int N) {
    std::vector<ResonantMode> out;
    const std::vector<ResonancePole> poles = find_poles(spec, N);
    out.reserve(poles.size());
    for (const ResonancePole& p : poles) out.push_back(resonant_mode(spec, p));
    return out;
}

/// Third-quadrant partner at k_{-n} = -conj(k_n); u_{-n} = conj(u_n).
inline ResonantMode mirror_of(const ResonantMode& m) {
    ResonantMode out;
    out.pole.n = -m.pole.n;
    out.pole.k = -std::conj(m.pole.k);
    out.pole.E = std::conj(m.pole.E);
    out.u0 = std::conj(m.u0);
    out.uL = std::conj(m.uL);
    out.L = m.L;
    return out;
}

/// Expansion coefficient T_n = 2 i k u_n(0) u_n(L) e^{-i k_n L} / (k^2 - k_n^2).
inline std::complex<double> coefficient_Tn(double k, const ResonantMode& mode) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> kn = mode.pole.k;
    return 2.0 * i * k * mode.u0 * mode.uL * std::exp(-i * kn * mode.L) / (k * k - kn * kn);
}

struct PoleRectangle {
    double re_min, re_max, im_min, im_max;
    bool contains(std::complex<double> k) const {
        return k.real() > re_min && k.real() < re_max && k.imag() > im_min && k.imag() < im_max;
    }
};

/// Default audit rectangle [0, a_N + pi/L] x [-3 k0, 0].
inline PoleRectangle audit_rectangle(const BarrierSpec& spec, const std::vector<ResonancePole>& poles) {
    const DerivedScales s = derive_scales(spec);
    return {0.0, poles.back().k.real() + M_PI / spec.L, -3.0 * s.k0, 0.0};
}

/// Number of transmission poles inside a rectangle, by the argument
/// principle applied to the entire denominator G(k) along the boundary.
inline int pole_count_argument_principle(const BarrierSpec& spec, const PoleRectangle& r) {
    const std::complex<double> corners[5] = {
        {r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max},
        {r.re_min, r.im_max}, {r.re_min, r.im_min}};
    double total = 0.0;
    auto G = [&spec](std::complex<double> k) { return barrier_denominator(spec, k); };
    for (int e = 0; e < 4; ++e) {
        const std::complex<double> a = corners[e], b = corners[e + 1];
        // adaptive argument tracking: keep each step's phase change under pi/2
        double t = 0.0;
        std::complex<double> ga = G(a + t * (b - a));
        double dt = 1.0 / 256.0;
        while (t < 1.0) {
            double tn = std::min(1.0, t + dt);
            int depth = 0;
            for (;;) {
                const std::complex<double> gb = G(a + tn * (b - a));
                if (std::abs(gb) == 0.0)
                    throw std::runtime_error("pole_count: zero of D on the contour");
                const double darg = std::arg(gb / ga);
                if (std::abs(darg) < M_PI_2 || depth >= 48) {
                    total += darg;
                    ga = gb;
                    break;
                }
                tn = t + 0.5 * (tn - t);
                ++depth;
            }
            dt = std::min(1.0 / 256.0, 2.0 * (tn - t));
            t = tn;
        }
    }
    const double winding = total / (2.0 * M_PI);
    const long n = std::lround(winding);
    if (std::abs(winding - double(n)) > 0.25)
        throw std::runtime_error("pole_count: winding number failed to converge to an integer");
    return int(n);
}

struct PoleAudit {
    PoleRectangle rect;
    int winding;        // zeros inside, by the argument principle
    int found_in_rect;  // Newton-found poles inside (spares included)
    bool consistent() const { return winding == found_in_rect; }
};

/// Cross-check the Newton search against the argument principle over the
/// search rectangle.  The rectangle edge a_N + pi/L can take in the next
/// pole when the level spacing dips below pi/L, so a few spare indices are
/// searched and counted too; the audit passes when every zero the contour
/// sees was found.
inline PoleAudit audit_poles(const BarrierSpec& spec, int N, int spares = 3) {
    const std::vector<ResonancePole> all = find_poles(spec, N + spares);
    std::vector<ResonancePole> first(all.begin(), all.begin() + N);
    PoleAudit a;
    a.rect = audit_rectangle(spec, first);
    a.winding = pole_count_argument_principle(spec, a.rect);
    a.found_in_rect = 0;
    for (const ResonancePole& p : all)
        if (a.rect.contains(p.k)) ++a.found_in_rect;
    return a;
}

}  // namespace qtun
