// Acceptance suite: one pass/fail line per criterion, at the stated
// tolerances.  Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "oracle/faddeeva_oracle.hpp"
#include "qtun/analysis.hpp"
#include "qtun/barrier.hpp"
#include "qtun/dynamics.hpp"
#include "qtun/faddeeva.hpp"
#include "qtun/io.hpp"
#include "qtun/resonances.hpp"
#include "qtun/units.hpp"

using cplx = std::complex<double>;
using qtun::BarrierSpec;
using qtun::ResonantMode;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// affine least-squares slope of t against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& t) {
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / t.size();
    double sxx = 0.0, sxt = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sxx += (x[j] - xm) * (x[j] - xm);
        sxt += (x[j] - xm) * (t[j] - tm);
    }
    return sxt / sxx;
}

// refined location of the highest sample of one column
struct PeakLoc {
    double t, v;
};
PeakLoc top_peak(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t i = std::max_element(v.begin(), v.end()) - v.begin();
    if (i == 0 || i + 1 == v.size()) throw std::runtime_error("peak on window edge");
    PeakLoc p{};
    bool refined = false;
    qtun::detail::refine_peak(t[i - 1], v[i - 1], t[i], v[i], t[i + 1], v[i + 1], p.t, p.v, refined);
    return p;
}

const BarrierSpec kSpec;  // V0 = 0.3 eV, L = 5 nm, m = 0.067 m_e, E = 0.01 eV

void criterion1() {
    struct Anchor {
        double V0, L, alpha, tol;
    } anchors[] = {{0.3, 5.0, 3.63, 0.01},  {0.3, 15.0, 10.88, 0.02}, {0.3, 3.0, 2.17, 0.01},
                   {0.3, 2.0, 1.45, 0.01},  {0.2, 5.0, 2.96, 0.01},   {0.1, 5.0, 2.095, 0.01}};
    double worst = 0.0;
    for (const Anchor& a : anchors)
        worst = std::max(worst, std::abs(qtun::opacity_of(a.V0, a.L, 0.067) - a.alpha) - a.tol);
    report("1", worst <= 0.0,
           "opacity anchors 3.63/10.88/2.17/1.45/2.96/2.095, worst margin " + num(worst));
}

void criterion2() {
    const double ac = qtun::critical_opacity();
    const double res = std::cosh(2.0 * ac) - 2.0 / ac * std::sinh(2.0 * ac) - 1.0;
    const bool pass = std::abs(ac - 2.0653) < 5e-4 && std::abs(res) < 1e-12;
    report("2", pass, "alpha_c = " + num(ac) + ", residual " + num(res));
}

void criterion3(const std::vector<ResonantMode>& modes) {
    const std::optional<qtun::PeakRecord> p = qtun::time_domain_resonance(kSpec, 1e-10);
    if (!p) {
        report("3", false, "no time-domain resonance found");
        return;
    }
    const qtun::WaveParts w = qtun::evaluate(kSpec, modes, kSpec.L, p->t_peak, 1e-10, true);
    const bool pass = std::abs(p->t_peak - 5.4) < 0.2 && w.dens_r > w.dens_q;
    report("3", pass, "t_p = " + num(p->t_peak) + " fs (target 5.4 +- 0.2), dens_r/dens_q at peak = " +
                          num(w.dens_r / w.dens_q));
}

void criterion4(const std::vector<ResonantMode>& modes) {
    const qtun::DerivedScales s = qtun::derive_scales(kSpec);
    // (a) exactly two separated structures at x0 = 50 nm
    const auto grid50 = qtun::linear_grid(0.5, 1200.0, 3000);
    const qtun::TimeSeries ts50 = qtun::time_series(kSpec, modes, 50.0, grid50, 1e-10, true);
    std::vector<double> scratch;
    const auto& vtot = qtun::series_column(ts50, qtun::Column::dens_total, scratch);
    const double vmax = *std::max_element(vtot.begin(), vtot.end());
    const auto structures = qtun::find_structures(ts50.t, vtot, 0.05 * vmax);
    const bool two = structures.size() == 2;

    // (b,c) peak kinematics of the resonant part and the quasi part
    const double va = qtun::velocity_of(modes.front().pole.a(), kSpec.mass_ratio);
    std::vector<double> xs = {50.0, 100.0, 200.0, 400.0};
    std::vector<double> t_fore, t_main;
    for (double x0 : xs) {
        const auto gf = qtun::linear_grid(0.4 * x0 / va, 2.2 * x0 / va, 1600);
        const qtun::TimeSeries tf = qtun::time_series(kSpec, modes, x0, gf, 1e-10, true);
        std::vector<double> sc;
        t_fore.push_back(top_peak(tf.t, qtun::series_column(tf, qtun::Column::dens_r, sc)).t);
        const auto gm = qtun::linear_grid(0.5 * x0 / s.v_k, 3.5 * x0 / s.v_k, 1600);
        const qtun::TimeSeries tm = qtun::time_series(kSpec, modes, x0, gm, 1e-10, true);
        std::vector<double> sc2;
        t_main.push_back(top_peak(tm.t, qtun::series_column(tm, qtun::Column::dens_q, sc2)).t);
    }
    const double slope_fore = fit_slope(xs, t_fore);
    const double slope_main = fit_slope(xs, t_main);
    const double dev_fore = std::abs(slope_fore * va - 1.0);
    const double dev_main = std::abs(slope_main * s.v_k - 1.0);
    const bool pass = two && dev_fore < 0.05 && dev_main < 0.05;
    report("4", pass,
           "structures at 50 nm = " + std::to_string(structures.size()) +
               ", forerunner slope dev " + num(dev_fore) + ", main-front slope dev " +
               num(dev_main) + " (tolerance 0.05 each)");
}

void criterion5(const std::vector<ResonantMode>& modes) {
    // formula peak against the exact forerunner peak at x0 = 50 nm
    const double x0 = 50.0;
    const double va = qtun::velocity_of(modes.front().pole.a(), kSpec.mass_ratio);
    auto formula_peak = [&](double xx) {
        double best = -1.0;
        for (int j = 0; j < 40000; ++j) {
            const double t = (0.2 + 2.3 * j / 39999.0) * xx / va;
            best = std::max(best, qtun::forerunner_density(kSpec, modes.front(), xx, t));
        }
        return best;
    };
    const double T2 = qtun::transmission(kSpec, qtun::derive_scales(kSpec).k).magnitude2;
    const double approx50 = formula_peak(x0) / T2;  // normalized like the exact density
    const auto grid = qtun::linear_grid(10.0, 80.0, 2000);
    const qtun::TimeSeries ts = qtun::time_series(kSpec, modes, x0, grid, 1e-10, true);
    std::vector<double> sc;
    const double exact50 = top_peak(ts.t, qtun::series_column(ts, qtun::Column::dens_total, sc)).v;
    const double dev = std::abs(approx50 / exact50 - 1.0);
    const double ratio = formula_peak(400.0) / formula_peak(800.0);
    const bool pass = dev < 0.15 && std::abs(ratio - 2.0) < 0.1;
    report("5", pass, "formula/exact peak at 50 nm = " + num(approx50 / exact50) +
                          " (within 15%), x0-doubling peak ratio = " + num(ratio) + " (2 +- 0.1)");
}

void criterion6() {
    const qtun::DerivedScales s = qtun::derive_scales(kSpec);
    const double h = 1e-6;
    double worst_fd = 0.0;
    for (int j = 1; j < 100; ++j) {
        const double k = (0.2 + 0.75 * j / 100.0) * s.k0;
        BarrierSpec sp = kSpec;
        sp.E = sp.hb2m() * k * k;
        const double tphi = qtun::delay_time(sp);
        double dphi =
            qtun::transmission(kSpec, k + h).phase - qtun::transmission(kSpec, k - h).phase;
        dphi -= 2.0 * M_PI * std::round(dphi / (2.0 * M_PI));
        const double fd = dphi / (2.0 * h) / qtun::velocity_of(k, kSpec.mass_ratio);
        worst_fd = std::max(worst_fd, std::abs(tphi - fd) / std::abs(tphi));
    }
    double worst_dim = 0.0;
    for (double V0 : {0.1, 0.3, 0.6})
        for (double L : {1.0, 5.0, 12.0})
            for (double E : {0.01, 0.05}) {
                if (E >= V0) continue;
                BarrierSpec sp;
                sp.V0 = V0;
                sp.L = L;
                sp.E = E;
                const qtun::DerivedScales d = qtun::derive_scales(sp);
                const double lhs = qtun::delay_time(sp) / d.t0_barrier;
                const double rhs = qtun::delay_time_dimensionless(d.alpha, d.u);
                worst_dim = std::max(worst_dim, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
    const bool pass = worst_fd < 1e-6 && worst_dim < 1e-10;
    report("6", pass, "max fd-route deviation " + num(worst_fd) +
                          " (<1e-6), dimensional/dimensionless " + num(worst_dim) + " (<1e-10)");
}

struct DeltaScan {
    std::vector<double> L;
    std::vector<double> delta_t;
    std::vector<double> t_phi;
    std::vector<double> t0_free;
};

DeltaScan delta_scan_far() {
    DeltaScan out;
    const double x0 = 1e5;
    const qtun::DerivedScales s0 = qtun::derive_scales(kSpec);
    const double tcl = x0 / s0.v_k;  // E fixed along the L scan
    const auto grid = qtun::linear_grid(0.75 * tcl, 1.40 * tcl, 3000);
    // free reference peak does not depend on L
    std::vector<double> vfree(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        vfree[j] = std::norm(qtun::psi_free(kSpec, x0, grid[j]));
    const PeakLoc pfree = top_peak(grid, vfree);
    for (int j = 1; j <= 36; ++j) {
        BarrierSpec sp = kSpec;
        sp.L = 0.5 * j;
        const auto modes = qtun::resonant_modes(sp, 60);
        std::vector<double> vtot(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            vtot[i] = qtun::evaluate(sp, modes, x0, grid[i], 1e-10, true).dens_total;
        const PeakLoc ptot = top_peak(grid, vtot);
        out.L.push_back(sp.L);
        out.delta_t.push_back(ptot.t - pfree.t);
        out.t_phi.push_back(qtun::delay_time(sp));
        out.t0_free.push_back(qtun::derive_scales(sp).t0_free);
    }
    return out;
}

void criterion7(const DeltaScan& ds) {
    double max_tphi = 0.0, max_dev = 0.0;
    for (double t : ds.t_phi) max_tphi = std::max(max_tphi, std::abs(t));
    for (std::size_t j = 0; j < ds.L.size(); ++j)
        max_dev = std::max(max_dev, std::abs(ds.delta_t[j] - ds.t_phi[j]));
    // sign change location of both curves
    int cross_dt = -1, cross_tphi = -1;
    for (std::size_t j = 1; j < ds.L.size(); ++j) {
        if (cross_dt < 0 && (ds.delta_t[j] < 0.0) != (ds.delta_t[j - 1] < 0.0)) cross_dt = int(j);
        if (cross_tphi < 0 && (ds.t_phi[j] < 0.0) != (ds.t_phi[j - 1] < 0.0)) cross_tphi = int(j);
    }
    const bool pass = max_dev <= 0.02 * max_tphi && cross_dt >= 0 &&
                      std::abs(cross_dt - cross_tphi) <= 1;
    report("7", pass, "max |Delta t - t_phi| = " + num(max_dev) + " fs vs allowance " +
                          num(0.02 * max_tphi) + " fs; sign change at L = " +
                          num(ds.L[std::max(cross_dt, 0)]) + " vs " +
                          num(ds.L[std::max(cross_tphi, 0)]));
}

void criterion8(const DeltaScan& ds) {
    BarrierSpec w15 = kSpec, w25 = kSpec;
    w15.L = 15.0;
    w25.L = 25.0;
    const qtun::HartmanTime h15 = qtun::hartman_time(w15);
    const qtun::HartmanTime h25 = qtun::hartman_time(w25);
    const double dev_pair = std::abs(h15.tau_H - h25.tau_H) / std::abs(h15.tau_H);
    const double dev_asym = std::abs(h15.tau_H - h15.asymptote) / std::abs(h15.tau_H);

    // delta_H far from the barrier tracks tau_H
    double worst_far = 0.0;
    for (std::size_t j = 0; j < ds.L.size(); ++j) {
        const double dH = ds.delta_t[j] + ds.t0_free[j];
        const double tH = ds.t_phi[j] + ds.t0_free[j];
        worst_far = std::max(worst_far, std::abs(dH - tH) / std::abs(tH));
    }

    // delta_H at the barrier edge does not: >10% off somewhere on the grid
    double worst_edge = 0.0;
    for (double L : {2.0, 5.0, 10.0, 15.0}) {
        BarrierSpec sp = kSpec;
        sp.L = L;
        const auto modes = qtun::resonant_modes(sp, 60);
        const qtun::DerivedScales s = qtun::derive_scales(sp);
        const double tcl = L / s.v_k;
        const auto grid = qtun::linear_grid(0.2 * tcl, 3.0 * tcl, 4000);
        std::vector<double> vtot(grid.size()), vfree(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            vtot[i] = qtun::evaluate(sp, modes, L, grid[i], 1e-10, true).dens_total;
            vfree[i] = std::norm(qtun::psi_free(sp, L, grid[i]));
        }
        const double dH = top_peak(grid, vtot).t - top_peak(grid, vfree).t + s.t0_free;
        const double tH = qtun::hartman_time(sp).tau_H;
        worst_edge = std::max(worst_edge, std::abs(dH - tH) / std::abs(tH));
    }
    const bool pass = dev_pair < 0.01 && dev_asym < 0.01 && worst_far < 0.02 && worst_edge > 0.10;
    report("8", pass, "tau_H(15) vs tau_H(25) dev " + num(dev_pair) + ", vs asymptote " +
                          num(dev_asym) + " (<1%); delta_H far-field dev " + num(worst_far) +
                          " (<2%); edge dev " + num(worst_edge) + " (>10%)");
}

void criterion9(const std::vector<ResonantMode>& modes) {
    // Eq. (5c) identity
    double worst_id = 0.0;
    for (double t : {0.5, 5.4, 20.0, 120.0}) {
        const qtun::WaveParts w = qtun::evaluate(kSpec, modes, 50.0, t, 1e-10, true);
        worst_id = std::max(worst_id, std::abs(w.dens_total - (w.dens_q + w.dens_r + w.interference)));
    }
    // initial condition
    const double T2 = qtun::transmission(kSpec, qtun::derive_scales(kSpec).k).magnitude2;
    double worst_ic = 0.0;
    for (int j = 0; j <= 20; ++j) {
        const qtun::WaveParts w = qtun::evaluate(kSpec, modes, kSpec.L + j, 1e-4, 1e-10, false);
        worst_ic = std::max(worst_ic, w.dens_total / T2);
    }
    // long-time stationarity
    double worst_lt = 0.0;
    for (double x0 : {50.0, 1000.0}) {
        const qtun::WaveParts w = qtun::evaluate(kSpec, modes, x0, 1e6, 1e-10, true);
        worst_lt = std::max(worst_lt, std::abs(w.dens_total - 1.0));
    }
    // unitarity and conjugation
    const qtun::DerivedScales s = qtun::derive_scales(kSpec);
    double worst_u = 0.0, worst_c = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double k = 2.5 * s.k0 * j / 100.0;
        const qtun::TransmissionData td = qtun::transmission(kSpec, k);
        worst_u = std::max(worst_u, std::abs(std::norm(td.T) + std::norm(td.R) - 1.0));
        worst_c = std::max(worst_c,
                           std::abs(qtun::transmission(kSpec, -k).T - std::conj(td.T)));
    }
    const bool pass = worst_id < 1e-12 && worst_ic < 1e-4 && worst_lt < 1e-3 &&
                      worst_u < 1e-12 && worst_c < 1e-12;
    report("9", pass, "decomposition " + num(worst_id) + ", reconstruction " + num(worst_ic) +
                          ", stationarity " + num(worst_lt) + ", unitarity " + num(worst_u) +
                          ", conjugation " + num(worst_c));
}

void criterion10(const std::vector<ResonantMode>& modes) {
    const qtun::PoleAudit audit = qtun::audit_poles(kSpec, 30);
    const int count = audit.winding;
    double worst_res = 0.0;
    for (int n = 0; n < 5; ++n) {
        const ResonantMode& m = modes[n];
        const double gap = std::abs(modes[n + 1].pole.k - m.pole.k);
        const double rho = 0.25 * std::min(gap, m.pole.b());
        cplx res = 0.0;
        const int M = 128;
        for (int j = 0; j < M; ++j) {
            const cplx dk = std::polar(rho, 2.0 * M_PI * j / M);
            res += qtun::transmission_amplitude(kSpec, m.pole.k + dk) * dk;
        }
        res /= double(M);
        const cplx pred = cplx(0.0, 1.0) * m.u0 * m.uL *
                          std::exp(cplx(0.0, -1.0) * m.pole.k * kSpec.L);
        worst_res = std::max(worst_res, std::abs(res - pred) / std::abs(pred));
    }
    double worst_tr = 0.0;
    std::span<const ResonantMode> m30(modes.data(), 30);
    std::span<const ResonantMode> m60(modes.data(), 60);
    // Fig. 2 feature points: forerunner peak, two midway samples, main front
    for (double t : {33.0, 60.0, 120.0, 218.0}) {
        const double d30 = std::norm(qtun::psi_r(kSpec, m30, 50.0, t, 1e-300).value);
        const double d60 = std::norm(qtun::psi_r(kSpec, m60, 50.0, t, 1e-300).value);
        worst_tr = std::max(worst_tr, std::abs(d60 - d30));
    }
    const bool pass = count == 30 && audit.consistent() && worst_res < 1e-6 && worst_tr < 1e-8;
    report("10", pass, "winding count " + std::to_string(count) + "/30 (audit " +
                           (audit.consistent() ? "consistent" : "inconsistent") +
                           "), residue dev " + num(worst_res) +
                           " (<1e-6), truncation-doubling shift " + num(worst_tr) + " (<1e-8)");
}

void criterion11() {
    BarrierSpec thin = kSpec;
    thin.L = 2.0;
    BarrierSpec low = kSpec;
    low.V0 = 0.1;
    const auto c_thin = qtun::forerunner_exists(thin, 50.0).classification;
    const auto c_def = qtun::forerunner_exists(kSpec, 50.0).classification;
    const auto c_low = qtun::forerunner_exists(low, 50.0).classification;
    const bool pass = c_thin == qtun::ForerunnerClass::absent &&
                      c_def == qtun::ForerunnerClass::present &&
                      c_low != qtun::ForerunnerClass::present;
    report("11", pass, std::string("L=2nm: ") + qtun::to_string(c_thin) +
                           ", default: " + qtun::to_string(c_def) +
                           ", V0=0.1eV: " + qtun::to_string(c_low));
}

void criterion12() {
    const double radii[] = {0.05, 0.2, 0.5, 0.8, 0.99, 1.01, 1.3, 1.7, 2.2, 3.0, 4.0,
                            5.0, 6.0, 6.9, 8.0, 9.9, 11.9, 12.1, 15.0, 20.0, 30.0};
    double worst_near = 0.0, worst_far = 0.0, worst_ident = 0.0;
    int npts = 0;
    for (double r : radii)
        for (int j = 0; j < 32; ++j) {
            const cplx z = std::polar(r, 2.0 * M_PI * (j + 0.37) / 32.0);
            if (z.imag() < 0.0 && z.imag() * z.imag() - z.real() * z.real() > 600.0) continue;
            ++npts;
            const cplx w = qtun::faddeeva_w(z);
            const cplx ref = oracle::faddeeva_w(z);
            const double e = std::abs(w - ref) / std::abs(ref);
            (std::abs(z) <= 10.0 ? worst_near : worst_far) =
                std::max(std::abs(z) <= 10.0 ? worst_near : worst_far, e);
            if (std::abs(z.imag() * z.imag() - z.real() * z.real()) <= 600.0) {
                const cplx lhs = w + qtun::faddeeva_w(-z);
                const cplx rhs = 2.0 * std::exp(-z * z);
                const double scale = std::max({std::abs(lhs), std::abs(rhs), std::abs(w)});
                worst_ident = std::max(worst_ident, std::abs(lhs - rhs) / scale);
            }
        }
    const bool pass = npts >= 500 && worst_near <= 1e-12 && worst_far <= 1e-10 &&
                      worst_ident <= 1e-11;
    report("12", pass, std::to_string(npts) + " points; rel err " + num(worst_near) +
                           " (|z|<=10, <=1e-12) / " + num(worst_far) +
                           " (beyond, <=1e-10); identity " + num(worst_ident) + " (<=1e-11)");
}

}  // namespace

int main() {
    std::printf("acceptance suite: default barrier V0=%.2g eV, L=%.2g nm, E=%.2g eV, m=%.3g m_e\n",
                kSpec.V0, kSpec.L, kSpec.E, kSpec.mass_ratio);
    const std::vector<ResonantMode> modes = qtun::resonant_modes(kSpec, 60);
    criterion1();
    criterion2();
    criterion3(modes);
    criterion4(modes);
    criterion5(modes);
    criterion6();
    const DeltaScan ds = delta_scan_far();
    criterion7(ds);
    criterion8(ds);
    criterion9(modes);
    criterion10(modes);
    criterion11();
    criterion12();
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures;
}
