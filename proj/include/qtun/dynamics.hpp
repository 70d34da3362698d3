#pragma once

// Exact transmitted wave for the reflecting-cutoff initial condition and its
// decomposition into the quasi-monochromatic part, the resonant sum, their
// interference, the free reference solution, and the one-pole forerunner
// approximation.
//
//   psi   = psi_q + psi_r                    (x >= L, t > 0)
//   psi_q = T_k M(y_k) - T_{-k} M(y_{-k})
//   psi_r = - sum_n T_n M(y_{k_n})           (fourth-quadrant poles and
//                                             their third-quadrant mirrors)
//   psi_0 = M(y_k) - M(y_{-k})
//
// The resonant sum runs over pole pairs in increasing Re k_n; it stops when
// the last three pair terms together contribute less than tol times the
// magnitude of the running sum.

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "barrier.hpp"
#include "moshinsky.hpp"
#include "resonances.hpp"
#include "units.hpp"

namespace qtun {

struct WaveParts {
    std::complex<double> psi_q;
    std::complex<double> psi_r;
    std::complex<double> psi;   // psi_q + psi_r
    double dens_q;
    double dens_r;
    double dens_total;
    double interference;        // 2 Re(conj(psi_q) psi_r)
    int truncation_order;       // pole pairs summed
    bool converged;
};

struct SeriesResult {
    std::complex<double> value;
    int truncation_order;
    bool converged;
};

inline std::complex<double> psi_q(const BarrierSpec& spec, double x, double t) {
    if (x < spec.L) throw std::domain_error("psi_q: x must be >= L (transmitted region)");
    const DerivedScales s = derive_scales(spec);
    const std::complex<double> Tk = transmission(spec, s.k).T;
    const std::complex<double> Mp = moshinsky_m({x, t, {s.k, 0.0}, spec.mass_ratio});
    const std::complex<double> Mm = moshinsky_m({x, t, {-s.k, 0.0}, spec.mass_ratio});
    return Tk * Mp - std::conj(Tk) * Mm;
}

inline std::complex<double> psi_free(const BarrierSpec& spec, double x, double t) {
    const DerivedScales s = derive_scales(spec);
    const std::complex<double> Mp = moshinsky_m({x, t, {s.k, 0.0}, spec.mass_ratio});
    const std::complex<double> Mm = moshinsky_m({x, t, {-s.k, 0.0}, spec.mass_ratio});
    return Mp - Mm;
}

/// Resonant sum over the supplied modes (sorted by Re k_n) and their
/// third-quadrant mirrors.  Non-convergence is reported, not thrown.
inline SeriesResult psi_r(const BarrierSpec& spec, std::span<const ResonantMode> modes,
                          double x, double t, double tol) {
    if (x < spec.L) throw std::domain_error("psi_r: x must be >= L (transmitted region)");
    if (!(tol > 0.0)) throw std::invalid_argument("psi_r: tol must be > 0");
    const DerivedScales s = derive_scales(spec);
    std::complex<double> sum = 0.0;
    double block[3] = {0.0, 0.0, 0.0};
    int used = 0;
    bool converged = false;
    for (const ResonantMode& mode : modes) {
        const std::complex<double> Tn = coefficient_Tn(s.k, mode);
        const std::complex<double> term_fourth = Tn * moshinsky_m({x, t, mode.pole.k, spec.mass_ratio});
        // mirror partner: k_{-n} = -conj(k_n), T_{-n} = -conj(T_n) for real k
        const std::complex<double> term_third =
            -std::conj(Tn) * moshinsky_m({x, t, -std::conj(mode.pole.k), spec.mass_ratio});
        const std::complex<double> pair = -(term_fourth + term_third);
        sum += pair;
        block[used % 3] = std::abs(pair);
        ++used;
        if (used >= 3 && block[0] + block[1] + block[2] < tol * std::abs(sum)) {
            converged = true;
            break;
        }
    }
    return {sum, used, converged};
}

/// Assemble all wave parts at one (x, t).  With normalize set, the four
/// density fields are divided by |T_k|^2 as in the figures.
inline WaveParts evaluate(const BarrierSpec& spec, std::span<const ResonantMode> modes,
                          double x, double t, double tol, bool normalize = true) {
    WaveParts w;
    w.psi_q = psi_q(spec, x, t);
    const SeriesResult r = psi_r(spec, modes, x, t, tol);
    w.psi_r = r.value;
    w.truncation_order = r.truncation_order;
    w.converged = r.converged;
    w.psi = w.psi_q + w.psi_r;
    w.dens_q = std::norm(w.psi_q);
    w.dens_r = std::norm(w.psi_r);
    w.dens_total = std::norm(w.psi);
    w.interference = 2.0 * (std::conj(w.psi_q) * w.psi_r).real();
    if (normalize) {
        const DerivedScales s = derive_scales(spec);
        const double T2 = transmission(spec, s.k).magnitude2;
        w.dens_q /= T2;
        w.dens_r /= T2;
        w.dens_total /= T2;
        w.interference /= T2;
    }
    return w;
}

/// One-pole forerunner approximation: |T_1(k)|^2 times the closed form
///   (1/2 pi) (hbar t/m) / [(x0 - hbar a_1 t/m)^2 + (hbar b_1 t/m)^2].
/// Valid near the forerunner peak, where -pi/2 < arg y_{k_1} < pi/2; it is
/// evaluated everywhere but degrades away from the peak.
inline double forerunner_density(const BarrierSpec& spec, const ResonantMode& mode1,
                                 double x0, double t) {
    if (!(t > 0.0)) throw std::domain_error("forerunner_density: t must be > 0");
    if (x0 < spec.L) throw std::domain_error("forerunner_density: x0 must be >= L");
    const DerivedScales s = derive_scales(spec);
    const double T1sq = std::norm(coefficient_Tn(s.k, mode1));
    const double va = velocity_of(mode1.pole.a(), spec.mass_ratio);
    const double vb = velocity_of(mode1.pole.b(), spec.mass_ratio);
    const double hbar_t_over_m = velocity_of(1.0, spec.mass_ratio) * t;
    const double dx = x0 - va * t;
    const double dy = vb * t;
    return T1sq * hbar_t_over_m / (2.0 * M_PI * (dx * dx + dy * dy));
}

struct TimeSeries {
    double x0 = 0.0;                  // nm
    std::vector<double> t;            // fs, strictly increasing
    std::vector<WaveParts> rows;      // one per grid point
    std::vector<double> free_density; // |psi_0|^2, never normalized
    BarrierSpec spec;
    double tol = 0.0;
    int npoles = 0;
    bool normalized = true;
};

inline TimeSeries time_series(const BarrierSpec& spec, std::span<const ResonantMode> modes,
                              double x0, std::span<const double> t_grid, double tol,
                              bool normalize = true) {
    if (t_grid.empty()) throw std::invalid_argument("time_series: empty grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("time_series: grid must be strictly increasing");
    TimeSeries ts;
    ts.x0 = x0;
    ts.spec = spec;
    ts.tol = tol;
    ts.npoles = int(modes.size());
    ts.normalized = normalize;
    ts.t.assign(t_grid.begin(), t_grid.end());
    ts.rows.reserve(t_grid.size());
    ts.free_density.reserve(t_grid.size());
    for (double t : t_grid) {
        try {
            ts.rows.push_back(evaluate(spec, modes, x0, t, tol, normalize));
            ts.free_density.push_back(std::norm(psi_free(spec, x0, t)));
        } catch (const std::exception& e) {
            throw std::runtime_error("time_series: row failed at t=" + std::to_string(t) +
                                     " fs: " + e.what());
        }
    }
    return ts;
}

inline std::vector<double> linear_grid(double a, double b, int n) {
    if (n < 2 || !(b > a)) throw std::invalid_argument("linear_grid: bad parameters");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
}

inline std::vector<double> log_grid(double a, double b, int n) {
    if (n < 2 || !(a > 0.0) || !(b > a)) throw std::invalid_argument("log_grid: bad parameters");
    std::vector<double> g(n);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * i / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

/// Logarithmic head + linear tail when the window spans more than two
/// decades, otherwise uniform.
inline std::vector<double> hybrid_grid(double a, double b, int n) {
    if (n < 4 || !(a > 0.0) || !(b > a)) throw std::invalid_argument("hybrid_grid: bad parameters");
    if (b / a <= 100.0) return linear_grid(a, b, n);
    const double split = b / 50.0;
    const int nlog = n / 3;
    std::vector<double> g = log_grid(a, split, nlog);
    const std::vector<double> lin = linear_grid(split, b, n - nlog + 1);
    g.insert(g.end(), lin.begin() + 1, lin.end());
    return g;
}

}  // namespace qtun
