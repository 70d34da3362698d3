#pragma once

// Peak extraction and the derived observables: the time-domain-resonance
// peak t_p, the dynamically measured delay Delta t and delta_H, the
// forerunner-existence classifier, and the parameter-scan driver.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "barrier.hpp"
#include "dynamics.hpp"
#include "resonances.hpp"
#include "units.hpp"

namespace qtun {

struct PeakRecord {
    double t_peak;      // fs, quadratically refined
    double value;       // curve value at the refined peak
    double prominence;  // height above the higher of the two enclosing saddles
    double width;       // fs at half prominence (0 when undefined)
    bool refined;
};

enum class Column { dens_total, dens_q, dens_r, interference, dens_free };

namespace detail {

// Vertex of the parabola through three (t, v) samples.  Falls back to the
// middle sample when the data is degenerate.
inline void refine_peak(double t0, double v0, double t1, double v1, double t2, double v2,
                        double& t_out, double& v_out, bool& refined) {
    const double d0 = (v0 - v1) / (t0 - t1);
    const double d1 = (v2 - v1) / (t2 - t1);
    const double curv = (d1 - d0) / (t2 - t0);  // second divided difference
    if (!(curv < 0.0)) {
        t_out = t1; v_out = v1; refined = false;
        return;
    }
    const double ts = 0.5 * (t0 + t1 - d0 / curv);
    t_out = ts;
    // Newton form: v(t) = v0 + d0 (t - t0) + curv (t - t0)(t - t1)
    v_out = v0 + d0 * (ts - t0) + curv * (ts - t0) * (ts - t1);
    refined = true;
}

}  // namespace detail

/// Local maxima with prominence >= prominence_floor, refined through the
/// three bracketing samples and ordered by t_peak.
inline std::vector<PeakRecord> find_peaks(std::span<const double> t, std::span<const double> v,
                                          double prominence_floor) {
    if (t.size() != v.size()) throw std::invalid_argument("find_peaks: size mismatch");
    if (prominence_floor < 0.0) throw std::invalid_argument("find_peaks: negative floor");
    const std::size_t n = t.size();
    std::vector<PeakRecord> out;
    if (n < 3) return out;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        // prominence: walk out on both sides until ground higher than v[i]
        double left_base = v[i], right_base = v[i];
        for (std::size_t j = i; j-- > 0;) {
            if (v[j] > v[i]) break;
            left_base = std::min(left_base, v[j]);
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (v[j] > v[i]) break;
            right_base = std::min(right_base, v[j]);
        }
        const double prom = v[i] - std::max(left_base, right_base);
        if (prom < prominence_floor) continue;
        PeakRecord p;
        detail::refine_peak(t[i - 1], v[i - 1], t[i], v[i], t[i + 1], v[i + 1],
                            p.t_peak, p.value, p.refined);
        p.prominence = prom;
        // half-prominence width by linear interpolation
        const double half = v[i] - 0.5 * prom;
        double tl = t.front(), tr = t.back();
        for (std::size_t j = i; j-- > 0;)
            if (v[j] < half) { tl = t[j] + (t[j + 1] - t[j]) * (half - v[j]) / (v[j + 1] - v[j]); break; }
        for (std::size_t j = i + 1; j < n; ++j)
            if (v[j] < half) { tr = t[j - 1] + (t[j] - t[j - 1]) * (half - v[j - 1]) / (v[j] - v[j - 1]); break; }
        p.width = tr - tl;
        out.push_back(p);
    }
    return out;
}

inline const std::vector<double>& series_column(const TimeSeries& ts, Column c,
                                                std::vector<double>& scratch) {
    if (c == Column::dens_free) return ts.free_density;
    scratch.resize(ts.rows.size());
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        switch (c) {
            case Column::dens_total: scratch[i] = ts.rows[i].dens_total; break;
            case Column::dens_q: scratch[i] = ts.rows[i].dens_q; break;
            case Column::dens_r: scratch[i] = ts.rows[i].dens_r; break;
            case Column::interference: scratch[i] = ts.rows[i].interference; break;
            default: break;
        }
    }
    return scratch;
}

inline std::vector<PeakRecord> find_peaks(const TimeSeries& ts, Column c, double prominence_floor) {
    std::vector<double> scratch;
    const std::vector<double>& v = series_column(ts, c, scratch);
    return find_peaks(ts.t, v, prominence_floor);
}

/// Number of separated structures: peaks whose connecting trough drops below
/// merge_ratio times the smaller peak count separately; Fresnel sub-lobes
/// riding on one wavefront merge into a single structure.
inline std::vector<PeakRecord> find_structures(std::span<const double> t, std::span<const double> v,
                                               double prominence_floor, double merge_ratio = 0.5) {
    std::vector<PeakRecord> peaks = find_peaks(t, v, prominence_floor);
    if (peaks.size() < 2) return peaks;
    std::vector<PeakRecord> merged;
    merged.push_back(peaks.front());
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        const PeakRecord& prev = merged.back();
        const PeakRecord& cur = peaks[i];
        // trough between the two peaks
        double trough = cur.value;
        for (std::size_t j = 0; j < t.size(); ++j)
            if (t[j] > prev.t_peak && t[j] < cur.t_peak) trough = std::min(trough, v[j]);
        if (trough > merge_ratio * std::min(prev.value, cur.value)) {
            if (cur.value > prev.value) merged.back() = cur;  // same structure, keep the taller
        } else {
            merged.push_back(cur);
        }
    }
    return merged;
}

/// First prominent peak of the normalized density at the barrier edge
/// (the time-domain resonance); absence is a report, not an error.
inline std::optional<PeakRecord> time_domain_resonance(const BarrierSpec& spec, double tol,
                                                       int npoles = 60) {
    const std::vector<ResonantMode> modes = resonant_modes(spec, npoles);
    const std::vector<double> grid = linear_grid(0.05, 60.0, 1200);
    const TimeSeries ts = time_series(spec, modes, spec.L, grid, tol, true);
    std::vector<double> scratch;
    const std::vector<double>& v = series_column(ts, Column::dens_total, scratch);
    const double vmax = *std::max_element(v.begin(), v.end());
    const double vmin = *std::min_element(v.begin(), v.end());
    const std::vector<PeakRecord> peaks = find_structures(ts.t, v, 0.05 * (vmax - vmin));
    if (peaks.empty()) return std::nullopt;
    return peaks.front();
}

struct Window {
    double tmin;  // fs
    double tmax;  // fs
};

struct DeltaReport {
    double x0;       // nm
    double delta_t;  // fs, t_peak(|psi|^2) - t_peak(|psi_0|^2)
    double delta_H;  // fs, delta_t + mL/(hbar k)
    double t_phi;    // fs, closed form
    double tau_H;    // fs, closed form
};

/// Dynamically measured delay: time difference of the maxima of the
/// transmitted and free densities inside a window bracketing the main front.
inline DeltaReport delta_t(const BarrierSpec& spec, std::span<const ResonantMode> modes,
                           double x0, Window window, double tol = 1e-10, int npts = 1500) {
    if (!(window.tmax > window.tmin) || !(window.tmin > 0.0))
        throw std::invalid_argument("delta_t: bad window");
    const std::vector<double> grid = linear_grid(window.tmin, window.tmax, npts);
    const TimeSeries ts = time_series(spec, modes, x0, grid, tol, true);
    std::vector<double> scratch;
    const std::vector<double>& vt = series_column(ts, Column::dens_total, scratch);
    auto top = [&](std::span<const double> v) -> PeakRecord {
        std::size_t imax = std::max_element(v.begin(), v.end()) - v.begin();
        if (imax == 0 || imax + 1 == v.size())
            throw std::runtime_error("delta_t: density maximum sits on the window edge");
        PeakRecord p{};
        detail::refine_peak(ts.t[imax - 1], v[imax - 1], ts.t[imax], v[imax],
                            ts.t[imax + 1], v[imax + 1], p.t_peak, p.value, p.refined);
        return p;
    };
    const PeakRecord ptot = top(vt);
    const PeakRecord pfree = top(ts.free_density);
    const DerivedScales s = derive_scales(spec);
    DeltaReport r;
    r.x0 = x0;
    r.delta_t = ptot.t_peak - pfree.t_peak;
    r.delta_H = r.delta_t + s.t0_free;
    r.t_phi = spec.tunneling() ? delay_time(spec) : std::numeric_limits<double>::quiet_NaN();
    r.tau_H = spec.tunneling() ? hartman_time(spec).tau_H : std::numeric_limits<double>::quiet_NaN();
    return r;
}

enum class ForerunnerClass { present, absent, marginal };

inline const char* to_string(ForerunnerClass c) {
    switch (c) {
        case ForerunnerClass::present: return "present";
        case ForerunnerClass::absent: return "absent";
        default: return "marginal";
    }
}

struct ForerunnerReport {
    ForerunnerClass classification;
    double alpha;
    double alpha_c;
    bool alpha_predicts_present;       // a-priori predictor alpha > alpha_c
    std::optional<PeakRecord> forerunner;
    PeakRecord main_front;
};

/// Classify whether a forerunner precedes the main front at x0.
/// 'present' needs a preceding peak with prominence >= 5% of the main-front
/// height, 'absent' means nothing above 0.5%, 'marginal' in between.
inline ForerunnerReport forerunner_exists(const BarrierSpec& spec, double x0,
                                          double tol = 1e-10, int npoles = 60, int npts = 3000) {
    if (x0 < spec.L) throw std::invalid_argument("forerunner_exists: x0 must be >= L");
    const std::vector<ResonantMode> modes = resonant_modes(spec, npoles);
    const DerivedScales s = derive_scales(spec);
    const double t_main = x0 / s.v_k;
    const double v_r = velocity_of(modes.front().pole.a(), spec.mass_ratio);
    const double t_fore = x0 / v_r;
    const double tlo = std::max(0.02, 0.2 * t_fore);
    // the half-shadow diffraction offset puts the front peak well past x0/v_k
    // at short distances, so the window extends far beyond it
    const double thi = 3.5 * t_main;
    const std::vector<double> grid = linear_grid(tlo, thi, npts);
    const TimeSeries ts = time_series(spec, modes, x0, grid, tol, true);
    std::vector<double> scratch;
    const std::vector<double>& v = series_column(ts, Column::dens_total, scratch);
    // main front: highest sample in the window centered on x0/v_k
    std::size_t imax = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (ts.t[i] > 0.6 * t_main && (imax == 0 || v[i] > v[imax])) imax = i;
    PeakRecord main{};
    if (imax > 0 && imax + 1 < v.size())
        detail::refine_peak(ts.t[imax - 1], v[imax - 1], ts.t[imax], v[imax], ts.t[imax + 1],
                            v[imax + 1], main.t_peak, main.value, main.refined);
    else { main.t_peak = ts.t[imax]; main.value = v[imax]; }
    // candidate forerunners strictly before the main front
    const std::vector<PeakRecord> peaks = find_peaks(ts.t, v, 0.0);
    std::optional<PeakRecord> best;
    for (const PeakRecord& p : peaks) {
        if (p.t_peak >= 0.75 * main.t_peak) continue;
        if (!best || p.prominence > best->prominence) best = p;
    }
    ForerunnerReport rep;
    rep.alpha = s.alpha;
    rep.alpha_c = critical_opacity();
    rep.alpha_predicts_present = s.alpha > rep.alpha_c;
    rep.main_front = main;
    rep.forerunner = best;
    const double prom = best ? best->prominence : 0.0;
    if (prom >= 0.05 * main.value) rep.classification = ForerunnerClass::present;
    else if (prom < 0.005 * main.value) rep.classification = ForerunnerClass::absent;
    else rep.classification = ForerunnerClass::marginal;
    return rep;
}

enum class ScanAxis { L, V0, E, x0 };
enum class Observable { t_phi, tau_H, delta_t, delta_H, t_p, classification };

struct ScanOptions {
    double x0 = 1e5;     // nm, observation point for dynamic observables
    double tol = 1e-10;
    int npoles = 60;
    int npts = 1500;     // grid points per dynamic row
    double window_lo = 0.75;  // window = [lo, hi] * x0/v_k for delta_t rows
    double window_hi = 1.40;
};

struct ScanRow {
    double axis_value;
    double value;        // NaN when not applicable
    std::string label;   // classification, absence reports
    std::string status;  // "ok" or the per-row error
};

inline BarrierSpec with_axis(BarrierSpec spec, ScanAxis axis, double value, double& x0, ScanOptions opt) {
    x0 = opt.x0;
    switch (axis) {
        case ScanAxis::L: spec.L = value; break;
        case ScanAxis::V0: spec.V0 = value; break;
        case ScanAxis::E: spec.E = value; break;
        case ScanAxis::x0: x0 = value; break;
    }
    return spec;
}

/// One row per grid point; rows are independent and per-row errors are
/// recorded in the row while the scan continues.
inline std::vector<ScanRow> scan(const BarrierSpec& spec_template, ScanAxis axis,
                                 std::span<const double> grid, Observable obs,
                                 ScanOptions opt = {}) {
    std::vector<ScanRow> out;
    out.reserve(grid.size());
    for (double g : grid) {
        ScanRow row{g, std::numeric_limits<double>::quiet_NaN(), "", "ok"};
        try {
            double x0 = opt.x0;
            const BarrierSpec spec = with_axis(spec_template, axis, g, x0, opt);
            spec.validate();
            switch (obs) {
                case Observable::t_phi:
                    row.value = delay_time(spec);
                    break;
                case Observable::tau_H:
                    row.value = hartman_time(spec).tau_H;
                    break;
                case Observable::delta_t:
                case Observable::delta_H: {
                    const DerivedScales s = derive_scales(spec);
                    const double t0 = x0 / s.v_k;
                    const std::vector<ResonantMode> modes = resonant_modes(spec, opt.npoles);
                    const DeltaReport dr = delta_t(spec, modes, x0,
                                                   {opt.window_lo * t0, opt.window_hi * t0},
                                                   opt.tol, opt.npts);
                    row.value = (obs == Observable::delta_t) ? dr.delta_t : dr.delta_H;
                    break;
                }
                case Observable::t_p: {
                    const std::optional<PeakRecord> p = time_domain_resonance(spec, opt.tol, opt.npoles);
                    if (p) row.value = p->t_peak;
                    else row.label = "absent";
                    break;
                }
                case Observable::classification: {
                    const ForerunnerReport rep = forerunner_exists(spec, x0, opt.tol, opt.npoles);
                    row.label = to_string(rep.classification);
                    break;
                }
            }
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace qtun
