#include "spingate/gate.hpp"

#include "spingate/errors.hpp"

#include <cmath>

namespace spingate {

namespace {

constexpr double kOmegaTol = 1e-12;

nlohmann::json complex_to_json(Complex z) {
    return nlohmann::json{z.real(), z.imag()};
}

} // namespace

GateOperator build_gate(const CavityParams& p, ProbeFrequency f,
                        GateMode mode) {
    GateOperator op;
    op.mode = mode;
    op.params = p;
    op.omega = f.omega;
    op.t_empty = empty_cavity_coeffs(p, f).t;
    op.t_coupled = coupled_cavity_coeffs(p, f).t;
    const Complex t_branch =
        mode == GateMode::Full ? op.t_coupled : Complex{0.0, 0.0};
    op.diag[0] = op.t_empty; // R up
    op.diag[1] = t_branch;   // R down
    op.diag[2] = t_branch;   // L up
    op.diag[3] = op.t_empty; // L down
    return op;
}

GateApplication apply_gate(const QuantumRegister& reg,
                           const std::string& photon_id,
                           const std::string& spin_id,
                           const GateOperator& op) {
    const std::size_t ppos = reg.index_of(photon_id);
    const std::size_t spos = reg.index_of(spin_id);
    if (reg.labels[ppos].kind != QubitKind::Photon)
        throw KindMismatch("gate photon slot given non-photon qubit " +
                           photon_id);
    if (reg.labels[spos].kind != QubitKind::Spin)
        throw KindMismatch("gate spin slot given non-spin qubit " + spin_id);
    const std::optional<double>& omega = reg.labels[ppos].omega;
    if (omega && std::abs(*omega - op.omega) > kOmegaTol)
        throw FrequencyMismatch("photon " + photon_id +
                                " frequency differs from gate probe");

    const double before = reg.norm2();
    if (before == 0.0)
        throw ZeroNormRegister("gate applied to a zero-norm register");

    const std::size_t n = reg.n_qubits();
    const std::size_t pmask = std::size_t{1} << (n - 1 - ppos);
    const std::size_t smask = std::size_t{1} << (n - 1 - spos);

    GateApplication out;
    out.state = reg;
    for (std::size_t idx = 0; idx < out.state.dim(); ++idx) {
        const int pbit = (idx & pmask) ? 1 : 0;
        const int sbit = (idx & smask) ? 1 : 0;
        out.state.amps[idx] *= op.diag[pbit * 2 + sbit];
    }
    out.p_transmit = out.state.norm2() / before;
    return out;
}

nlohmann::json gate_to_json(const GateOperator& op) {
    return nlohmann::json{
        {"mode", op.mode == GateMode::Full ? "full" : "ideal"},
        {"omega", op.omega},
        {"t_empty", complex_to_json(op.t_empty)},
        {"t_coupled", complex_to_json(op.t_coupled)},
        {"diag",
         {complex_to_json(op.diag[0]), complex_to_json(op.diag[1]),
          complex_to_json(op.diag[2]), complex_to_json(op.diag[3])}},
        {"basis_order", {"R_up", "R_down", "L_up", "L_down"}},
        {"params",
         {{"g", op.params.g},
          {"kappa", op.params.kappa},
          {"kappa_s", op.params.kappa_s},
          {"gamma", op.params.gamma},
          {"omega_c", op.params.omega_c},
          {"omega_x", op.params.omega_x}}}};
}

} // namespace spingate
