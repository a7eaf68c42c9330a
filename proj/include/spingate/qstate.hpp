#pragma once

#include "spingate/cavity.hpp"
#include "spingate/rng.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace spingate {

enum class QubitKind { Photon, Spin };

// Measurement bases. Circular and Linear address photon polarization
// (outcomes R/L and H/V), SpinZ addresses the emitter spin (outcomes
// up/down). Using a basis on the wrong qubit kind throws KindMismatch.
enum class Basis { Circular, Linear, SpinZ };

struct QubitLabel {
    QubitKind kind = QubitKind::Photon;
    std::string id;
    // Carrier frequency of a photonic qubit, same units as CavityParams.
    // Spins carry no frequency.
    std::optional<double> omega;
};

// One qubit of a product-state preparation: alpha|0> + beta|1>, where
// basis value 0 means R (photon) or up (spin) and 1 means L or down.
struct QubitInit {
    QubitLabel label;
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
};

struct SingleQubitOp {
    Complex m[2][2];

    static SingleQubitOp identity();
    static SingleQubitOp hadamard();
    static SingleQubitOp pauli_x();
    static SingleQubitOp pauli_z();
};

// Dense state vector over an ordered list of labeled qubits. labels[0] is
// the most significant bit of the amplitude index. Registers may be
// sub-normalized: norm2() below 1 is the cumulative success probability of
// the post-selections that produced the state, and operations preserve that
// meaning unless documented otherwise.
struct QuantumRegister {
    std::vector<QubitLabel> labels;
    std::vector<Complex> amps;

    std::size_t n_qubits() const { return labels.size(); }
    std::size_t dim() const { return amps.size(); }
    double norm2() const;

    // Position of the qubit with the given id; throws UnknownLabel.
    std::size_t index_of(const std::string& id) const;

    // Scales to unit norm; throws ZeroNormRegister if norm2() == 0.
    void renormalize();
};

// Builds the product state of the given qubits. Each (alpha, beta) must be
// finite and normalized within 1e-9. At most 16 qubits, ids unique, spins
// without a frequency.
QuantumRegister make_register(const std::vector<QubitInit>& qubits);

// Joint register with a's qubits in front of b's.
QuantumRegister tensor_product(const QuantumRegister& a,
                               const QuantumRegister& b);

void apply_single_qubit(QuantumRegister& reg, const std::string& id,
                        const SingleQubitOp& op);

struct ProjectionResult {
    // Absolute branch weight <psi|P|psi>. Over both outcomes of one basis
    // these sum to the register's norm2(), not to 1.
    double prob;
    // Post-projection state, renormalized to unit norm, qubit retained.
    // All-zero when prob == 0; querying an empty branch is not an error.
    QuantumRegister collapsed;
};

ProjectionResult project_qubit(const QuantumRegister& reg,
                               const std::string& id, Basis basis,
                               int outcome);

struct MeasurementResult {
    int outcome;
    double prob; // absolute weight of the sampled branch
    QuantumRegister collapsed;
};

// Samples an outcome with the conditional distribution w_k / norm2(), then
// collapses as project_qubit would.
MeasurementResult measure_qubit(const QuantumRegister& reg,
                                const std::string& id, Basis basis,
                                SeededRng& rng);

// Contracts one qubit against a basis outcome and removes it from the
// register. The result is left unnormalized, so its norm2() equals the
// absolute weight of that branch.
QuantumRegister project_out(const QuantumRegister& reg, const std::string& id,
                            Basis basis, int outcome);

// |psi><psi| as a dense matrix; trace equals norm2().
Eigen::MatrixXcd to_density(const QuantumRegister& reg);

// Reduced density matrix over keep_ids, in the order given.
Eigen::MatrixXcd partial_trace(const QuantumRegister& reg,
                               const std::vector<std::string>& keep_ids);

// Wootters concurrence of a two-qubit density matrix (normalized by its
// trace internally). 0 for separable states, 1 for maximally entangled.
double concurrence(const Eigen::MatrixXcd& rho);

// |<a|b>|^2 after normalizing both states. The two registers must carry the
// same qubit-kind sequence; ids are not compared.
double state_fidelity(const QuantumRegister& a, const QuantumRegister& b);

// Human-readable outcome label: R/L, H/V, or up/down.
std::string outcome_name(Basis basis, int outcome);

nlohmann::json register_to_json(const QuantumRegister& reg);

} // namespace spingate
