#include "spingate/cavity.hpp"

#include "spingate/errors.hpp"

#include <cmath>
#include <cstdio>

namespace spingate {

namespace {

bool all_finite(const CavityParams& p) {
    return std::isfinite(p.g) && std::isfinite(p.kappa) &&
           std::isfinite(p.kappa_s) && std::isfinite(p.gamma) &&
           std::isfinite(p.omega_c) && std::isfinite(p.omega_x);
}

} // namespace

void CavityParams::validate() const {
    if (!all_finite(*this))
        throw InvalidParameter("cavity parameters must be finite");
    if (!(kappa > 0.0))
        throw InvalidParameter(
            "kappa must be positive; a cavity with no in/out coupling "
            "transmits nothing");
    if (g < 0.0 || kappa_s < 0.0 || gamma < 0.0)
        throw InvalidParameter("rates g, kappa_s, gamma must be >= 0");
}

CavityParams CavityParams::normalized_to(double kappa_ref) const {
    if (!(kappa_ref > 0.0) || !std::isfinite(kappa_ref))
        throw InvalidParameter("reference kappa must be positive and finite");
    CavityParams n;
    n.g = g / kappa_ref;
    n.kappa = kappa / kappa_ref;
    n.kappa_s = kappa_s / kappa_ref;
    n.gamma = gamma / kappa_ref;
    n.omega_c = 0.0;
    n.omega_x = (omega_x - omega_c) / kappa_ref;
    return n;
}

CoefficientPair empty_cavity_coeffs(const CavityParams& p, ProbeFrequency f) {
    p.validate();
    if (!std::isfinite(f.omega))
        throw InvalidParameter("probe frequency must be finite");
    const Complex i(0.0, 1.0);
    const Complex den = i * (p.omega_c - f.omega) + p.kappa + p.kappa_s / 2.0;
    CoefficientPair c;
    c.r = (i * (p.omega_c - f.omega) + p.kappa_s / 2.0) / den;
    c.t = -p.kappa / den;
    return c;
}

CoefficientPair coupled_cavity_coeffs(const CavityParams& p, ProbeFrequency f) {
    p.validate();
    if (!std::isfinite(f.omega))
        throw InvalidParameter("probe frequency must be finite");
    const Complex i(0.0, 1.0);
    const Complex dx = i * (p.omega_x - f.omega) + p.gamma / 2.0;
    const Complex dc = i * (p.omega_c - f.omega) + p.kappa + p.kappa_s / 2.0;
    CoefficientPair c;
    if (p.g == 0.0 && dx == Complex{0.0, 0.0}) {
        // 0/0 at the decoupled, lossless, resonant point; the limit is the
        // bare cavity response.
        c.t = empty_cavity_coeffs(p, f).t;
    } else {
        c.t = -p.kappa * dx / (dx * dc + p.g * p.g);
    }
    c.r = 1.0 + c.t;
    return c;
}

double gate_fidelity(const CavityParams& p, ProbeFrequency f) {
    const double at0 = std::abs(empty_cavity_coeffs(p, f).t);
    const double at = std::abs(coupled_cavity_coeffs(p, f).t);
    const double norm = std::sqrt(at0 * at0 + at * at);
    if (norm == 0.0)
        throw DegenerateFidelity(
            "both transmission amplitudes vanish; fidelity undefined");
    return at0 / norm;
}

std::string SpectraTable::to_csv() const {
    std::string out = "omega,abs_r0,abs_t0,abs_r,abs_t,fidelity\n";
    char buf[256];
    for (const SpectraRow& row : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.omega,
                      row.abs_r0, row.abs_t0, row.abs_r, row.abs_t,
                      row.fidelity);
        out += buf;
    }
    return out;
}

SpectraTable sweep_spectra(const CavityParams& p, double omega_min,
                           double omega_max, int points) {
    p.validate();
    if (!std::isfinite(omega_min) || !std::isfinite(omega_max) ||
        !(omega_min < omega_max))
        throw InvalidParameter("sweep range requires omega_min < omega_max");
    if (points < 2)
        throw InvalidParameter("sweep requires at least 2 points");

    SpectraTable table;
    table.rows.reserve(static_cast<std::size_t>(points));
    const double step = (omega_max - omega_min) / (points - 1);
    for (int k = 0; k < points; ++k) {
        ProbeFrequency f{omega_min + step * k};
        if (k == points - 1) f.omega = omega_max;
        const CoefficientPair empty = empty_cavity_coeffs(p, f);
        const CoefficientPair coupled = coupled_cavity_coeffs(p, f);
        SpectraRow row;
        row.omega = f.omega;
        row.abs_r0 = std::abs(empty.r);
        row.abs_t0 = std::abs(empty.t);
        row.abs_r = std::abs(coupled.r);
        row.abs_t = std::abs(coupled.t);
        row.fidelity = gate_fidelity(p, f);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace spingate
