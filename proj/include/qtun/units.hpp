#pragma once

// Unit conventions and the scalar scales derived from the barrier parameters.
//
// Everything in the library works in eV / nm / fs.  With these units
//   hbar            = 0.6582119569 eV fs
//   hbar^2 / (2 m_e) = 0.0380998   eV nm^2
// so for a particle of mass m = mass_ratio * m_e,
//   E = (hbar^2/2m) k^2,   v = hbar k / m = 2 (hbar^2/2m) k / hbar.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace qtun {

struct PhysicalConstants {
    double hbar = 0.6582119569;         // eV fs
    double hbar2_over_2me = 0.0380998;  // eV nm^2, free-electron mass
};

/// The single shared instance every module reads.
inline const PhysicalConstants& constants() {
    static const PhysicalConstants c;
    return c;
}

/// Rectangular barrier of height V0 on [0, L] hit by a cutoff reflecting
/// wave of energy E; the particle mass is mass_ratio * m_e.
struct BarrierSpec {
    double V0 = 0.3;          // eV
    double L = 5.0;           // nm
    double mass_ratio = 0.067;
    double E = 0.01;          // eV

    /// hbar^2/(2m) in eV nm^2 for this particle.
    double hb2m() const { return constants().hbar2_over_2me / mass_ratio; }

    void validate() const {
        if (!(V0 > 0.0)) throw std::invalid_argument("BarrierSpec: V0 must be > 0");
        if (!(L > 0.0)) throw std::invalid_argument("BarrierSpec: L must be > 0");
        if (!(mass_ratio > 0.0)) throw std::invalid_argument("BarrierSpec: mass_ratio must be > 0");
        if (!(E > 0.0)) throw std::invalid_argument("BarrierSpec: E must be > 0");
    }

    bool tunneling() const { return E < V0; }
};

struct DerivedScales {
    double k;                     // incident wavenumber, nm^-1
    double k0;                    // sqrt(2 m V0)/hbar, nm^-1
    std::optional<double> kappa;  // sqrt(k0^2 - k^2), present iff E < V0
    double alpha;                 // opacity k0 L
    double u;                     // V0 / E
    std::optional<double> gamma;  // 2 alpha sqrt(1 - 1/u), present iff E <= V0
    double t0_barrier;            // m L / (hbar k0), fs
    double t0_free;               // m L / (hbar k), fs
    double v_k;                   // hbar k / m, nm/fs
};

/// Group velocity hbar*s/m for wavenumber s [nm^-1], in nm/fs.
inline double velocity_of(double s, double mass_ratio) {
    return 2.0 * constants().hbar2_over_2me * s / (constants().hbar * mass_ratio);
}

/// Opacity alpha = k0 L = L sqrt(2 m V0) / hbar.
inline double opacity_of(double V0, double L, double mass_ratio) {
    if (!(V0 > 0.0) || !(L > 0.0) || !(mass_ratio > 0.0))
        throw std::invalid_argument("opacity_of: inputs must be positive");
    return L * std::sqrt(V0 * mass_ratio / constants().hbar2_over_2me);
}

inline DerivedScales derive_scales(const BarrierSpec& spec) {
    spec.validate();
    const double hb2m = spec.hb2m();
    DerivedScales s;
    s.k = std::sqrt(spec.E / hb2m);
    s.k0 = std::sqrt(spec.V0 / hb2m);
    s.alpha = s.k0 * spec.L;
    s.u = spec.V0 / spec.E;
    if (spec.E < spec.V0) s.kappa = std::sqrt(s.k0 * s.k0 - s.k * s.k);
    if (spec.E <= spec.V0) s.gamma = 2.0 * s.alpha * std::sqrt(1.0 - 1.0 / s.u);
    s.v_k = velocity_of(s.k, spec.mass_ratio);
    s.t0_free = spec.L / s.v_k;
    s.t0_barrier = spec.L / velocity_of(s.k0, spec.mass_ratio);
    return s;
}

}  // namespace qtun
