#pragma once

#include "spingate/cavity.hpp"
#include "spingate/qstate.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace spingate {

// Full applies the physical transmission amplitudes (t for the coupled spin
// branch). Ideal replaces t by 0, the limit the protocols are designed
// around; both keep t0 on the uncoupled branches.
enum class GateMode { Full, Ideal };

// Spin-conditioned photon transmission. Diagonal in the joint basis
// (R up, R down, L up, L down): the R/up and L/down branches see the bare
// cavity (amplitude t0), the other two see the coupled cavity (t or 0).
// The operator is non-unitary; the missing weight is the reflected branch,
// which post-selection on transmission discards.
struct GateOperator {
    GateMode mode = GateMode::Full;
    Complex diag[4];
    Complex t_empty;
    Complex t_coupled; // physical value also in Ideal mode, for reporting
    CavityParams params;
    double omega = 0.0;
};

GateOperator build_gate(const CavityParams& p, ProbeFrequency f,
                        GateMode mode);

struct GateApplication {
    // Post-gate register, not renormalized: norm2() shrinks by the
    // transmission probability.
    QuantumRegister state;
    // Conditional probability that the photon is transmitted, given the
    // register state the gate acted on.
    double p_transmit;
};

// Applies the gate to one photon and one spin of the register. The photon
// label's frequency must match the gate's probe frequency within 1e-12.
GateApplication apply_gate(const QuantumRegister& reg,
                           const std::string& photon_id,
                           const std::string& spin_id,
                           const GateOperator& op);

nlohmann::json gate_to_json(const GateOperator& op);

} // namespace spingate
