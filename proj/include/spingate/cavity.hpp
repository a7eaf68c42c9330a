#pragma once

#include <complex>
#include <string>
#include <vector>

namespace spingate {

using Complex = std::complex<double>;

// Physical parameters of a double-sided optical microcavity with a single
// embedded two-level emitter. All rates and frequencies are expressed in
// units of the in/out coupling rate kappa of one mirror; frequencies are
// detunings from a common reference. normalized_to() converts a parameter
// set given in absolute energy units (e.g. micro-eV) into this form.
struct CavityParams {
    double g = 0.0;       // emitter-cavity coupling
    double kappa = 1.0;   // coupling rate into each of the two access modes
    double kappa_s = 0.0; // side leakage rate
    double gamma = 0.0;   // emitter dipole decay rate
    double omega_c = 0.0; // cavity mode frequency
    double omega_x = 0.0; // emitter transition frequency

    // Throws InvalidParameter unless kappa > 0, the other rates are
    // non-negative and every field is finite.
    void validate() const;

    // Returns an equivalent parameter set rescaled so kappa == 1, with
    // frequencies re-expressed relative to omega_c of this set.
    CavityParams normalized_to(double kappa_ref) const;
};

struct ProbeFrequency {
    double omega = 0.0; // probe detuning, same units as CavityParams
};

// Reflection and transmission amplitudes at one probe frequency.
struct CoefficientPair {
    Complex r;
    Complex t;
};

// Scattering coefficients of the bare cavity (emitter decoupled or absent).
// On resonance with no side leakage: t = -1, r = 0.
CoefficientPair empty_cavity_coeffs(const CavityParams& p, ProbeFrequency f);

// Scattering coefficients with the emitter coupled to the cavity mode.
// r is constructed as 1 + t, so r - t == 1 holds bitwise.
CoefficientPair coupled_cavity_coeffs(const CavityParams& p, ProbeFrequency f);

// Worst-case overlap of gate output with the ideal conditional gate,
// |t0| / sqrt(|t0|^2 + |t|^2). Equals 1/sqrt(2) when g = 0 and approaches 1
// as the coupled transmission is suppressed. Throws DegenerateFidelity if
// both amplitudes vanish.
double gate_fidelity(const CavityParams& p, ProbeFrequency f);

struct SpectraRow {
    double omega;
    double abs_r0;
    double abs_t0;
    double abs_r;
    double abs_t;
    double fidelity;
};

struct SpectraTable {
    std::vector<SpectraRow> rows;

    // CSV body: header line then one row per frequency, 17 significant
    // digits, '.' decimal separator, LF line endings.
    std::string to_csv() const;
};

// Uniform scan of [omega_min, omega_max] inclusive with `points` samples
// (points >= 2, omega_min < omega_max).
SpectraTable sweep_spectra(const CavityParams& p, double omega_min,
                           double omega_max, int points);

} // namespace spingate
