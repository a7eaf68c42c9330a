#include "spingate/qstate.hpp"

#include "spingate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spingate {

namespace {

constexpr std::size_t kMaxQubits = 16;
constexpr double kNormTol = 1e-9;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void check_unique_ids(const std::vector<QubitLabel>& labels) {
    std::set<std::string> seen;
    for (const QubitLabel& l : labels)
        if (!seen.insert(l.id).second)
            throw DuplicateLabel("duplicate qubit id: " + l.id);
}

void check_label(const QubitLabel& l) {
    if (l.id.empty()) throw InvalidParameter("qubit id must be non-empty");
    if (l.kind == QubitKind::Spin && l.omega.has_value())
        throw InvalidParameter("spin qubit " + l.id +
                               " must not carry a frequency");
    if (l.omega && !std::isfinite(*l.omega))
        throw NonFiniteInput("frequency of qubit " + l.id + " is not finite");
}

// Outcome states of a basis as columns in the computational basis.
// Linear measurement projects directly onto (|R> +/- |L>)/sqrt(2).
void basis_vectors(Basis basis, QubitKind kind, const std::string& id,
                   Complex v0[2], Complex v1[2]) {
    switch (basis) {
        case Basis::Circular:
        case Basis::Linear:
            if (kind != QubitKind::Photon)
                throw KindMismatch("polarization basis applied to spin " + id);
            break;
        case Basis::SpinZ:
            if (kind != QubitKind::Spin)
                throw KindMismatch("spin basis applied to photon " + id);
            break;
    }
    if (basis == Basis::Linear) {
        v0[0] = kInvSqrt2;
        v0[1] = kInvSqrt2;
        v1[0] = kInvSqrt2;
        v1[1] = -kInvSqrt2;
    } else {
        v0[0] = 1.0;
        v0[1] = 0.0;
        v1[0] = 0.0;
        v1[1] = 1.0;
    }
}

struct BranchWeights {
    double w0;
    double w1;
};

// Absolute weights of both outcomes of one basis on one qubit.
BranchWeights branch_weights(const QuantumRegister& reg, std::size_t pos,
                             Basis basis) {
    Complex v0[2], v1[2];
    basis_vectors(basis, reg.labels[pos].kind, reg.labels[pos].id, v0, v1);
    const std::size_t n = reg.n_qubits();
    const std::size_t mask = std::size_t{1} << (n - 1 - pos);
    BranchWeights w{0.0, 0.0};
    for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
        if (idx & mask) continue;
        const Complex a0 = reg.amps[idx];
        const Complex a1 = reg.amps[idx | mask];
        const Complex c0 = std::conj(v0[0]) * a0 + std::conj(v0[1]) * a1;
        const Complex c1 = std::conj(v1[0]) * a0 + std::conj(v1[1]) * a1;
        w.w0 += std::norm(c0);
        w.w1 += std::norm(c1);
    }
    return w;
}

} // namespace

SingleQubitOp SingleQubitOp::identity() {
    return SingleQubitOp{{{1.0, 0.0}, {0.0, 1.0}}};
}

SingleQubitOp SingleQubitOp::hadamard() {
    return SingleQubitOp{
        {{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}}};
}

SingleQubitOp SingleQubitOp::pauli_x() {
    return SingleQubitOp{{{0.0, 1.0}, {1.0, 0.0}}};
}

SingleQubitOp SingleQubitOp::pauli_z() {
    return SingleQubitOp{{{1.0, 0.0}, {0.0, -1.0}}};
}

double QuantumRegister::norm2() const {
    double s = 0.0;
    for (const Complex& a : amps) s += std::norm(a);
    return s;
}

std::size_t QuantumRegister::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].id == id) return i;
    throw UnknownLabel("no qubit with id: " + id);
}

void QuantumRegister::renormalize() {
    const double n2 = norm2();
    if (n2 == 0.0)
        throw ZeroNormRegister("cannot renormalize a zero-norm register");
    const double scale = 1.0 / std::sqrt(n2);
    for (Complex& a : amps) a *= scale;
}

QuantumRegister make_register(const std::vector<QubitInit>& qubits) {
    if (qubits.empty())
        throw InvalidParameter("register needs at least one qubit");
    if (qubits.size() > kMaxQubits)
        throw RegisterTooLarge("register limited to 16 qubits, got " +
                               std::to_string(qubits.size()));

    QuantumRegister reg;
    reg.labels.reserve(qubits.size());
    for (const QubitInit& q : qubits) {
        check_label(q.label);
        reg.labels.push_back(q.label);
    }
    check_unique_ids(reg.labels);

    reg.amps = {Complex{1.0, 0.0}};
    for (const QubitInit& q : qubits) {
        if (!finite(q.alpha) || !finite(q.beta))
            throw NonFiniteInput("amplitudes of qubit " + q.label.id +
                                 " are not finite");
        const double n2 = std::norm(q.alpha) + std::norm(q.beta);
        if (std::abs(n2 - 1.0) > kNormTol)
            throw NonNormalizedInput("qubit " + q.label.id +
                                     " amplitudes not normalized");
        std::vector<Complex> next(reg.amps.size() * 2);
        for (std::size_t i = 0; i < reg.amps.size(); ++i) {
            next[2 * i] = reg.amps[i] * q.alpha;
            next[2 * i + 1] = reg.amps[i] * q.beta;
        }
        reg.amps = std::move(next);
    }
    return reg;
}

QuantumRegister tensor_product(const QuantumRegister& a,
                               const QuantumRegister& b) {
    if (a.n_qubits() + b.n_qubits() > kMaxQubits)
        throw RegisterTooLarge("joint register would exceed 16 qubits");
    QuantumRegister reg;
    reg.labels = a.labels;
    reg.labels.insert(reg.labels.end(), b.labels.begin(), b.labels.end());
    check_unique_ids(reg.labels);
    reg.amps.resize(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            reg.amps[i * b.dim() + j] = a.amps[i] * b.amps[j];
    return reg;
}

void apply_single_qubit(QuantumRegister& reg, const std::string& id,
                        const SingleQubitOp& op) {
    const std::size_t pos = reg.index_of(id);
    const std::size_t mask = std::size_t{1} << (reg.n_qubits() - 1 - pos);
    for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
        if (idx & mask) continue;
        const Complex a0 = reg.amps[idx];
        const Complex a1 = reg.amps[idx | mask];
        reg.amps[idx] = op.m[0][0] * a0 + op.m[0][1] * a1;
        reg.amps[idx | mask] = op.m[1][0] * a0 + op.m[1][1] * a1;
    }
}

ProjectionResult project_qubit(const QuantumRegister& reg,
                               const std::string& id, Basis basis,
                               int outcome) {
    if (outcome != 0 && outcome != 1)
        throw InvalidParameter("outcome must be 0 or 1");
    const std::size_t pos = reg.index_of(id);
    Complex v0[2], v1[2];
    basis_vectors(basis, reg.labels[pos].kind, reg.labels[pos].id, v0, v1);
    const Complex* v = outcome == 0 ? v0 : v1;

    const std::size_t mask = std::size_t{1} << (reg.n_qubits() - 1 - pos);
    ProjectionResult res;
    res.collapsed.labels = reg.labels;
    res.collapsed.amps.assign(reg.dim(), Complex{0.0, 0.0});
    res.prob = 0.0;
    for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
        if (idx & mask) continue;
        const Complex c = std::conj(v[0]) * reg.amps[idx] +
                          std::conj(v[1]) * reg.amps[idx | mask];
        res.prob += std::norm(c);
        res.collapsed.amps[idx] = v[0] * c;
        res.collapsed.amps[idx | mask] = v[1] * c;
    }
    if (res.prob > 0.0) res.collapsed.renormalize();
    return res;
}

MeasurementResult measure_qubit(const QuantumRegister& reg,
                                const std::string& id, Basis basis,
                                SeededRng& rng) {
    const std::size_t pos = reg.index_of(id);
    const BranchWeights w = branch_weights(reg, pos, basis);
    const double total = w.w0 + w.w1;
    if (total == 0.0)
        throw ZeroNormRegister("cannot measure a zero-norm register");
    const int outcome = rng.uniform() * total < w.w0 ? 0 : 1;
    const ProjectionResult proj = project_qubit(reg, id, basis, outcome);
    return MeasurementResult{outcome, proj.prob, proj.collapsed};
}

QuantumRegister project_out(const QuantumRegister& reg, const std::string& id,
                            Basis basis, int outcome) {
    if (outcome != 0 && outcome != 1)
        throw InvalidParameter("outcome must be 0 or 1");
    const std::size_t pos = reg.index_of(id);
    Complex v0[2], v1[2];
    basis_vectors(basis, reg.labels[pos].kind, reg.labels[pos].id, v0, v1);
    const Complex* v = outcome == 0 ? v0 : v1;

    const std::size_t n = reg.n_qubits();
    const std::size_t mask = std::size_t{1} << (n - 1 - pos);
    const std::size_t low = mask - 1;

    QuantumRegister out;
    out.labels = reg.labels;
    out.labels.erase(out.labels.begin() +
                     static_cast<std::ptrdiff_t>(pos));
    out.amps.resize(reg.dim() / 2);
    for (std::size_t k = 0; k < out.amps.size(); ++k) {
        const std::size_t idx = ((k & ~low) << 1) | (k & low);
        out.amps[k] = std::conj(v[0]) * reg.amps[idx] +
                      std::conj(v[1]) * reg.amps[idx | mask];
    }
    return out;
}

Eigen::MatrixXcd to_density(const QuantumRegister& reg) {
    const auto d = static_cast<Eigen::Index>(reg.dim());
    Eigen::VectorXcd psi(d);
    for (Eigen::Index i = 0; i < d; ++i)
        psi(i) = reg.amps[static_cast<std::size_t>(i)];
    return psi * psi.adjoint();
}

Eigen::MatrixXcd partial_trace(const QuantumRegister& reg,
                               const std::vector<std::string>& keep_ids) {
    if (keep_ids.empty())
        throw InvalidParameter("partial_trace needs at least one kept qubit");
    const std::size_t n = reg.n_qubits();
    std::vector<std::size_t> keep_pos;
    keep_pos.reserve(keep_ids.size());
    for (const std::string& id : keep_ids)
        keep_pos.push_back(reg.index_of(id));
    {
        std::set<std::size_t> uniq(keep_pos.begin(), keep_pos.end());
        if (uniq.size() != keep_pos.size())
            throw DuplicateLabel("partial_trace keep list repeats a qubit");
    }
    std::vector<std::size_t> traced_pos;
    for (std::size_t p = 0; p < n; ++p)
        if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end())
            traced_pos.push_back(p);

    const std::size_t dk = std::size_t{1} << keep_pos.size();
    const std::size_t dt = std::size_t{1} << traced_pos.size();

    // Full-register index for kept-part value i and traced-part value e.
    // Bit j of i addresses keep_pos[j], most significant first.
    auto full_index = [&](std::size_t i, std::size_t e) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < keep_pos.size(); ++j)
            if (i & (std::size_t{1} << (keep_pos.size() - 1 - j)))
                idx |= std::size_t{1} << (n - 1 - keep_pos[j]);
        for (std::size_t j = 0; j < traced_pos.size(); ++j)
            if (e & (std::size_t{1} << (traced_pos.size() - 1 - j)))
                idx |= std::size_t{1} << (n - 1 - traced_pos[j]);
        return idx;
    };

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t i = 0; i < dk; ++i)
        for (std::size_t j = 0; j < dk; ++j) {
            Complex s{0.0, 0.0};
            for (std::size_t e = 0; e < dt; ++e)
                s += reg.amps[full_index(i, e)] *
                     std::conj(reg.amps[full_index(j, e)]);
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                s;
        }
    return rho;
}

double concurrence(const Eigen::MatrixXcd& rho_in) {
    if (rho_in.rows() != 4 || rho_in.cols() != 4)
        throw WrongDimension("concurrence requires a 4x4 density matrix");
    const Complex tr = rho_in.trace();
    if (std::abs(tr) == 0.0)
        throw ZeroNormRegister("density matrix has zero trace");
    const Eigen::MatrixXcd rho = rho_in / tr;

    Eigen::MatrixXcd yy = Eigen::MatrixXcd::Zero(4, 4);
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;

    const Eigen::MatrixXcd flipped = yy * rho.conjugate() * yy;
    const Eigen::MatrixXcd prod = rho * flipped;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(prod, false);
    std::vector<double> s;
    for (Eigen::Index i = 0; i < 4; ++i)
        s.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()(i).real())));
    std::sort(s.begin(), s.end(), std::greater<>());
    return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

double state_fidelity(const QuantumRegister& a, const QuantumRegister& b) {
    if (a.n_qubits() != b.n_qubits())
        throw ShapeMismatch("registers differ in qubit count");
    for (std::size_t i = 0; i < a.n_qubits(); ++i)
        if (a.labels[i].kind != b.labels[i].kind)
            throw ShapeMismatch("registers differ in qubit kinds at slot " +
                                std::to_string(i));
    const double na = a.norm2();
    const double nb = b.norm2();
    if (na == 0.0 || nb == 0.0)
        throw ZeroNormRegister("fidelity of a zero-norm register");
    Complex ov{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        ov += std::conj(a.amps[i]) * b.amps[i];
    return std::norm(ov) / (na * nb);
}

std::string outcome_name(Basis basis, int outcome) {
    if (outcome != 0 && outcome != 1)
        throw InvalidParameter("outcome must be 0 or 1");
    switch (basis) {
        case Basis::Circular: return outcome == 0 ? "R" : "L";
        case Basis::Linear: return outcome == 0 ? "H" : "V";
        case Basis::SpinZ: return outcome == 0 ? "up" : "down";
    }
    throw InvalidParameter("unknown basis");
}

nlohmann::json register_to_json(const QuantumRegister& reg) {
    nlohmann::json labels = nlohmann::json::array();
    for (const QubitLabel& l : reg.labels) {
        nlohmann::json entry{
            {"kind", l.kind == QubitKind::Photon ? "photon" : "spin"},
            {"id", l.id}};
        if (l.omega) entry["omega"] = *l.omega;
        labels.push_back(entry);
    }
    nlohmann::json amps = nlohmann::json::array();
    for (const Complex& a : reg.amps)
        amps.push_back({a.real(), a.imag()});
    return nlohmann::json{{"labels", labels}, {"amplitudes", amps}};
}

} // namespace spingate
