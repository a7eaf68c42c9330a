#include "spingate/protocols.hpp"

#include "spingate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

namespace spingate {

namespace {

// Mixture component produced by dephasing splits. The register itself stays
// unnormalized (gate losses live in its norm); weight is the classical
// mixture probability, 1 for a single coherent branch.
struct WeightedBranch {
    double weight;
    QuantumRegister reg;
};

using Branches = std::vector<WeightedBranch>;

void apply_gate_all(Branches& branches, const std::string& photon_id,
                    const std::string& spin_id, const GateOperator& op) {
    for (WeightedBranch& b : branches)
        b.reg = apply_gate(b.reg, photon_id, spin_id, op).state;
}

void hadamard_all(Branches& branches, const std::string& id) {
    for (WeightedBranch& b : branches)
        apply_single_qubit(b.reg, id, SingleQubitOp::hadamard());
}

void dephase_all(Branches& branches, const std::string& spin_id, double q) {
    if (q == 0.0) return;
    Branches next;
    next.reserve(branches.size() * 2);
    for (WeightedBranch& b : branches) {
        WeightedBranch flip{b.weight * q, b.reg};
        apply_single_qubit(flip.reg, spin_id, SingleQubitOp::pauli_z());
        b.weight *= 1.0 - q;
        next.push_back(std::move(b));
        next.push_back(std::move(flip));
    }
    branches = std::move(next);
}

double herald_weight(const Branches& branches, const std::string& id,
                     Basis basis, int outcome) {
    double w = 0.0;
    for (const WeightedBranch& b : branches)
        w += b.weight * project_out(b.reg, id, basis, outcome).norm2();
    return w;
}

QuantumRegister make_target(const std::vector<QubitLabel>& labels,
                            Complex head, Complex tail) {
    QuantumRegister t;
    t.labels = labels;
    t.amps.assign(std::size_t{1} << labels.size(), Complex{0.0, 0.0});
    t.amps.front() = head;
    t.amps.back() += tail;
    return t;
}

// Ideal heralded targets over the output qubits: plus/minus variants of
// head |0..0> +/- tail |1..1>, normalized. Returns false when both
// coefficients vanish and no target exists.
bool ghz_targets(const std::vector<QubitLabel>& labels, Complex head,
                 Complex tail, QuantumRegister& plus, QuantumRegister& minus) {
    const double n2 = std::norm(head) + std::norm(tail);
    if (n2 == 0.0) return false;
    const double s = 1.0 / std::sqrt(n2);
    plus = make_target(labels, head * s, tail * s);
    minus = make_target(labels, head * s, -tail * s);
    return true;
}

struct FinishSpec {
    std::string herald_id;
    Basis herald_basis = Basis::Linear;
    std::vector<std::string> output_ids;
    // Ideal target for herald outcome 0 / 1. Empty amps mean no target is
    // defined and target_overlap stays 0.
    QuantumRegister target0;
    QuantumRegister target1;
    // Qubit that receives the Z correction for outcome 1; empty disables.
    std::string correction_id;
    // Output is the partial trace over output_ids (spin left in register).
    bool probe_mode = false;
};

std::vector<QubitLabel> output_labels(const QuantumRegister& reg,
                                      const std::vector<std::string>& ids) {
    std::vector<QubitLabel> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) out.push_back(reg.labels[reg.index_of(id)]);
    return out;
}

void fix_phase(QuantumRegister& reg) {
    std::size_t imax = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < reg.dim(); ++i) {
        const double m = std::norm(reg.amps[i]);
        if (m > best) {
            best = m;
            imax = i;
        }
    }
    if (best == 0.0) return;
    const Complex phase = reg.amps[imax] / std::abs(reg.amps[imax]);
    for (Complex& a : reg.amps) a /= phase;
}

ProtocolOutcome finish_exact(Branches branches, const FinishSpec& spec,
                             const ProtocolOptions& opt, SeededRng& rng) {
    const double w0 =
        herald_weight(branches, spec.herald_id, spec.herald_basis, 0);
    const double w1 =
        herald_weight(branches, spec.herald_id, spec.herald_basis, 1);
    const double total = w0 + w1;
    if (total == 0.0)
        throw ZeroNormRegister(
            "protocol has zero success probability for these inputs");

    int outcome;
    if (w0 == 0.0)
        outcome = 1;
    else if (w1 == 0.0)
        outcome = 0;
    else
        outcome = rng.uniform() * total < w0 ? 0 : 1;

    Branches cond;
    cond.reserve(branches.size());
    for (const WeightedBranch& b : branches) {
        WeightedBranch c{b.weight, project_out(b.reg, spec.herald_id,
                                               spec.herald_basis, outcome)};
        if (opt.herald_correction && outcome == 1 &&
            !spec.correction_id.empty())
            apply_single_qubit(c.reg, spec.correction_id,
                               SingleQubitOp::pauli_z());
        cond.push_back(std::move(c));
    }

    const QuantumRegister* target = &spec.target0;
    if (outcome == 1 && !(opt.herald_correction && !spec.correction_id.empty()))
        target = &spec.target1;

    ProtocolOutcome out;
    out.p_success = total;
    out.herald_weights = {
        {outcome_name(spec.herald_basis, 0), w0},
        {outcome_name(spec.herald_basis, 1), w1}};
    out.herald = HeraldEvent{spec.herald_id, spec.herald_basis, outcome,
                             outcome_name(spec.herald_basis, outcome)};

    const bool mixed = cond.size() > 1 || spec.probe_mode;
    if (!mixed) {
        QuantumRegister reg = std::move(cond.front().reg);
        reg.renormalize();
        if (!target->amps.empty())
            out.target_overlap = state_fidelity(reg, *target);
        out.final_state = std::move(reg);
        return out;
    }

    const std::vector<QubitLabel> labels =
        output_labels(cond.front().reg, spec.output_ids);
    const auto dim =
        static_cast<Eigen::Index>(std::size_t{1} << labels.size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (const WeightedBranch& b : cond)
        rho += b.weight * partial_trace(b.reg, spec.output_ids);
    const double tr = rho.trace().real();
    if (tr <= 0.0)
        throw ZeroNormRegister("herald branch carries no output weight");
    rho /= tr;
    rho = (rho + rho.adjoint().eval()) / 2.0;

    if (!target->amps.empty()) {
        Eigen::VectorXcd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            v(i) = target->amps[static_cast<std::size_t>(i)];
        out.target_overlap = (v.adjoint() * rho * v)(0, 0).real();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    QuantumRegister lead;
    lead.labels = labels;
    lead.amps.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i)
        lead.amps[static_cast<std::size_t>(i)] =
            solver.eigenvectors().col(dim - 1)(i);
    fix_phase(lead);
    out.final_state = std::move(lead);
    out.final_mixed = std::move(rho);
    return out;
}

using TrialFn =
    std::function<std::optional<std::string>(SeededRng&)>;

TrialStats run_trials(std::uint64_t n, int threads, std::uint64_t base,
                      const TrialFn& trial) {
    TrialStats stats;
    stats.n_trials = n;
    if (n == 0) return stats;

    const int nw = std::max(
        1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(
                                      n, std::uint64_t{64}))));
    std::vector<TrialStats> local(static_cast<std::size_t>(nw));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nw));
    std::vector<std::thread> workers;

    auto work = [&](int w) {
        const std::uint64_t lo = n * static_cast<std::uint64_t>(w) /
                                 static_cast<std::uint64_t>(nw);
        const std::uint64_t hi = n * static_cast<std::uint64_t>(w + 1) /
                                 static_cast<std::uint64_t>(nw);
        TrialStats& s = local[static_cast<std::size_t>(w)];
        try {
            for (std::uint64_t i = lo; i < hi; ++i) {
                SeededRng child = SeededRng::child(base, i);
                const std::optional<std::string> herald = trial(child);
                if (herald) {
                    ++s.n_success;
                    ++s.herald_counts[*herald];
                } else {
                    ++s.herald_counts["loss"];
                }
            }
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (nw == 1) {
        work(0);
    } else {
        workers.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) workers.emplace_back(work, w);
        for (std::thread& t : workers) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    for (const TrialStats& s : local) {
        stats.n_success += s.n_success;
        for (const auto& [k, v] : s.herald_counts) stats.herald_counts[k] += v;
    }
    return stats;
}

// One Monte Carlo gate pass: Bernoulli on the transmission probability,
// renormalizing on success.
bool mc_gate_pass(QuantumRegister& reg, const std::string& photon_id,
                  const std::string& spin_id, const GateOperator& op,
                  SeededRng& rng) {
    GateApplication app = apply_gate(reg, photon_id, spin_id, op);
    if (!rng.bernoulli(app.p_transmit)) return false;
    reg = std::move(app.state);
    reg.renormalize();
    return true;
}

void add_dephasing_warning(const ProtocolOptions& opt,
                           ProtocolOutcome& out) {
    if (!opt.dephasing) return;
    const DephasingParams& d = *opt.dephasing;
    if (std::isfinite(d.t1) && d.t > d.t1 / 10.0)
        out.warnings.push_back(
            "spin idle time exceeds t1/10; amplitude damping is not modeled "
            "and reported fidelities are optimistic");
}

// Shared engine: one photon crosses each cavity (one spin per cavity), then
// heralds on the photon. Covers the QND readout, the spin entangler chain
// and the photon-to-spin transfer.
ProtocolOutcome run_photon_over_spins(const std::vector<CavityParams>& cavs,
                                      double omega,
                                      const AmplitudePair& photon_amp,
                                      const std::vector<AmplitudePair>& spins,
                                      Basis herald_basis,
                                      const ProtocolOptions& opt,
                                      SeededRng& rng) {
    if (cavs.empty() || cavs.size() != spins.size())
        throw ShapeMismatch("need exactly one cavity per spin");
    if (!std::isfinite(omega))
        throw NonFiniteInput("photon frequency is not finite");
    photon_amp.validate("photon");

    std::vector<QubitInit> init;
    init.push_back(QubitInit{{QubitKind::Photon, "p1", omega},
                             photon_amp.alpha, photon_amp.beta});
    std::vector<std::string> spin_ids;
    for (std::size_t k = 0; k < spins.size(); ++k) {
        spins[k].validate("spin " + std::to_string(k + 1));
        const std::string id = "s" + std::to_string(k + 1);
        spin_ids.push_back(id);
        init.push_back(QubitInit{{QubitKind::Spin, id, std::nullopt},
                                 spins[k].alpha, spins[k].beta});
    }
    const QuantumRegister initial = make_register(init);

    std::vector<GateOperator> gates;
    gates.reserve(cavs.size());
    for (const CavityParams& cav : cavs)
        gates.push_back(build_gate(cav, ProbeFrequency{omega}, opt.mode));

    Branches branches{{1.0, initial}};
    for (std::size_t k = 0; k < gates.size(); ++k)
        apply_gate_all(branches, "p1", spin_ids[k], gates[k]);

    FinishSpec spec;
    spec.herald_id = "p1";
    spec.herald_basis = herald_basis;
    spec.output_ids = spin_ids;

    const std::vector<QubitLabel> out_labels =
        output_labels(initial, spin_ids);
    if (herald_basis == Basis::Circular) {
        // Photon R/L heralds the spin projected up/down.
        spec.target0 = make_target(out_labels, Complex{1.0, 0.0},
                                   Complex{0.0, 0.0});
        spec.target1 = make_target(out_labels, Complex{0.0, 0.0},
                                   Complex{1.0, 0.0});
    } else {
        // Ideal pre-herald state is head |up..up> + tail |down..down> up to
        // the transmission amplitude, with the photon folded in.
        Complex head = photon_amp.alpha;
        Complex tail = photon_amp.beta;
        for (const AmplitudePair& s : spins) {
            head *= s.alpha;
            tail *= s.beta;
        }
        if (!ghz_targets(out_labels, head, tail, spec.target0, spec.target1))
            spec.target0.amps.clear();
        spec.correction_id = spin_ids.back();
    }

    ProtocolOutcome out = finish_exact(std::move(branches), spec, opt, rng);
    if (spec.target0.amps.empty())
        out.warnings.push_back(
            "ideal heralded target undefined for these inputs; overlap "
            "reported as 0");
    if (opt.dephasing)
        out.warnings.push_back(
            "dephasing models the spin idle time between photon passes; "
            "this protocol has a single pass and ignores it");

    if (opt.trials > 0) {
        const std::uint64_t base = rng.raw64();
        out.trials = run_trials(
            opt.trials, opt.threads, base,
            [&](SeededRng& trng) -> std::optional<std::string> {
                QuantumRegister reg = initial;
                for (std::size_t k = 0; k < gates.size(); ++k)
                    if (!mc_gate_pass(reg, "p1", spin_ids[k], gates[k], trng))
                        return std::nullopt;
                const MeasurementResult m =
                    measure_qubit(reg, "p1", herald_basis, trng);
                return outcome_name(herald_basis, m.outcome);
            });
    }
    return out;
}

// Shared engine: each photon crosses the one cavity in sequence, then the
// spin heralds in the rotated basis, either projectively or through a probe
// photon. Covers the photon entangler chain and the spin-to-photon
// transfer.
ProtocolOutcome run_photons_over_spin(const CavityParams& cav,
                                      const AmplitudePair& spin_amp,
                                      const std::vector<PhotonInput>& photons,
                                      const ProtocolOptions& opt,
                                      SeededRng& rng) {
    if (photons.empty())
        throw InvalidParameter("need at least one photon");
    spin_amp.validate("spin");
    if (opt.dephasing) opt.dephasing->validate();

    std::vector<QubitInit> init;
    std::vector<std::string> photon_ids;
    for (std::size_t j = 0; j < photons.size(); ++j) {
        photons[j].amp.validate("photon " + std::to_string(j + 1));
        if (!std::isfinite(photons[j].omega))
            throw NonFiniteInput("photon frequency is not finite");
        const std::string id = "p" + std::to_string(j + 1);
        photon_ids.push_back(id);
        init.push_back(QubitInit{{QubitKind::Photon, id, photons[j].omega},
                                 photons[j].amp.alpha, photons[j].amp.beta});
    }
    init.push_back(QubitInit{{QubitKind::Spin, "s", std::nullopt},
                             spin_amp.alpha, spin_amp.beta});
    const QuantumRegister initial = make_register(init);

    std::vector<GateOperator> gates;
    gates.reserve(photons.size());
    for (const PhotonInput& ph : photons)
        gates.push_back(build_gate(cav, ProbeFrequency{ph.omega}, opt.mode));

    const double q = opt.dephasing ? opt.dephasing->q() : 0.0;
    const double probe_omega = opt.probe_omega.value_or(cav.omega_c);
    const GateOperator probe_gate =
        build_gate(cav, ProbeFrequency{probe_omega}, opt.mode);
    const QubitInit probe_init{{QubitKind::Photon, "probe", probe_omega},
                               AmplitudePair::balanced().alpha,
                               AmplitudePair::balanced().beta};

    Branches branches{{1.0, initial}};
    for (std::size_t j = 0; j < gates.size(); ++j) {
        apply_gate_all(branches, photon_ids[j], "s", gates[j]);
        if (opt.dephasing && j + 1 < gates.size())
            dephase_all(branches, "s", q);
    }
    hadamard_all(branches, "s");

    FinishSpec spec;
    spec.output_ids = photon_ids;
    if (opt.spin_readout == SpinReadout::Projective) {
        spec.herald_id = "s";
        spec.herald_basis = Basis::SpinZ;
    } else {
        const QuantumRegister probe_reg = make_register({probe_init});
        for (WeightedBranch& b : branches) {
            b.reg = tensor_product(b.reg, probe_reg);
            b.reg = apply_gate(b.reg, "probe", "s", probe_gate).state;
        }
        spec.herald_id = "probe";
        spec.herald_basis = Basis::Circular;
        spec.probe_mode = true;
    }

    Complex head = spin_amp.alpha;
    Complex tail = spin_amp.beta;
    for (const PhotonInput& ph : photons) {
        head *= ph.amp.alpha;
        tail *= ph.amp.beta;
    }
    const std::vector<QubitLabel> out_labels =
        output_labels(initial, photon_ids);
    if (!ghz_targets(out_labels, head, tail, spec.target0, spec.target1))
        spec.target0.amps.clear();
    spec.correction_id = photon_ids.back();

    ProtocolOutcome out = finish_exact(std::move(branches), spec, opt, rng);
    if (spec.target0.amps.empty())
        out.warnings.push_back(
            "ideal heralded target undefined for these inputs; overlap "
            "reported as 0");
    add_dephasing_warning(opt, out);

    if (opt.trials > 0) {
        const std::uint64_t base = rng.raw64();
        out.trials = run_trials(
            opt.trials, opt.threads, base,
            [&](SeededRng& trng) -> std::optional<std::string> {
                QuantumRegister reg = initial;
                for (std::size_t j = 0; j < gates.size(); ++j) {
                    if (!mc_gate_pass(reg, photon_ids[j], "s", gates[j],
                                      trng))
                        return std::nullopt;
                    if (opt.dephasing && j + 1 < gates.size() &&
                        trng.bernoulli(q))
                        apply_single_qubit(reg, "s",
                                           SingleQubitOp::pauli_z());
                }
                apply_single_qubit(reg, "s", SingleQubitOp::hadamard());
                if (opt.spin_readout == SpinReadout::Projective) {
                    const MeasurementResult m =
                        measure_qubit(reg, "s", Basis::SpinZ, trng);
                    return outcome_name(Basis::SpinZ, m.outcome);
                }
                reg = tensor_product(reg, make_register({probe_init}));
                if (!mc_gate_pass(reg, "probe", "s", probe_gate, trng))
                    return std::nullopt;
                const MeasurementResult m =
                    measure_qubit(reg, "probe", Basis::Circular, trng);
                return outcome_name(Basis::Circular, m.outcome);
            });
    }
    return out;
}

} // namespace

void AmplitudePair::validate(const std::string& what) const {
    const bool finite =
        std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) &&
        std::isfinite(beta.real()) && std::isfinite(beta.imag());
    if (!finite)
        throw NonFiniteInput(what + " amplitudes are not finite");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
        throw NonNormalizedInput(what + " amplitudes not normalized");
}

void DephasingParams::validate() const {
    if (!std::isfinite(t) || t < 0.0)
        throw InvalidParameter("dephasing interval t must be finite and >= 0");
    if (std::isnan(t2) || t2 <= 0.0)
        throw InvalidParameter("t2 must be positive");
    if (std::isnan(t1) || t1 <= 0.0)
        throw InvalidParameter("t1 must be positive");
}

ProtocolOutcome qnd_spin_measurement(const CavityParams& cav, double omega,
                                     const AmplitudePair& spin,
                                     const ProtocolOptions& opt,
                                     SeededRng& rng) {
    return run_photon_over_spins({cav}, omega, AmplitudePair::balanced(),
                                 {spin}, Basis::Circular, opt, rng);
}

ProtocolOutcome ghz_spins(const std::vector<CavityParams>& cavs, double omega,
                          const std::vector<AmplitudePair>& spins,
                          const ProtocolOptions& opt, SeededRng& rng) {
    if (cavs.size() < 2)
        throw InvalidParameter("spin entangler needs at least two spins");
    return run_photon_over_spins(cavs, omega, AmplitudePair::balanced(),
                                 spins, Basis::Linear, opt, rng);
}

ProtocolOutcome entangle_spins(const CavityParams& cav1,
                               const CavityParams& cav2, double omega,
                               const AmplitudePair& spin1,
                               const AmplitudePair& spin2,
                               const ProtocolOptions& opt, SeededRng& rng) {
    return ghz_spins({cav1, cav2}, omega, {spin1, spin2}, opt, rng);
}

ProtocolOutcome ghz_photons(const CavityParams& cav,
                            const std::vector<PhotonInput>& photons,
                            const ProtocolOptions& opt, SeededRng& rng) {
    if (photons.size() < 2)
        throw InvalidParameter("photon entangler needs at least two photons");
    return run_photons_over_spin(cav, AmplitudePair::balanced(), photons, opt,
                                 rng);
}

ProtocolOutcome entangle_photons(const CavityParams& cav,
                                 const PhotonInput& p1, const PhotonInput& p2,
                                 const ProtocolOptions& opt, SeededRng& rng) {
    return ghz_photons(cav, {p1, p2}, opt, rng);
}

ProtocolOutcome photon_to_spin(const CavityParams& cav,
                               const PhotonInput& photon,
                               const ProtocolOptions& opt, SeededRng& rng) {
    return run_photon_over_spins({cav}, photon.omega, photon.amp,
                                 {AmplitudePair::balanced()}, Basis::Linear,
                                 opt, rng);
}

ProtocolOutcome spin_to_photon(const CavityParams& cav, double omega,
                               const AmplitudePair& spin,
                               const ProtocolOptions& opt, SeededRng& rng) {
    return run_photons_over_spin(
        cav, spin, {PhotonInput{AmplitudePair::balanced(), omega}}, opt, rng);
}

DephasedSpin spin_dephase(const QuantumRegister& reg,
                          const std::string& spin_id,
                          const DephasingParams& d) {
    d.validate();
    const std::size_t pos = reg.index_of(spin_id);
    if (reg.labels[pos].kind != QubitKind::Spin)
        throw KindMismatch("dephasing applied to non-spin qubit " + spin_id);
    DephasedSpin out;
    out.keep = reg;
    out.flip = reg;
    apply_single_qubit(out.flip, spin_id, SingleQubitOp::pauli_z());
    out.q = d.q();
    return out;
}

double entanglement_fidelity(const CavityParams& cav, double omega,
                             const DephasingParams& d, GateMode mode,
                             SeededRng& rng) {
    ProtocolOptions opt;
    opt.mode = mode;
    opt.dephasing = d;
    const PhotonInput ph{AmplitudePair::balanced(), omega};
    return entangle_photons(cav, ph, ph, opt, rng).target_overlap;
}

} // namespace spingate
