#pragma once

#include "spingate/cavity.hpp"
#include "spingate/gate.hpp"
#include "spingate/qstate.hpp"
#include "spingate/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spingate {

// Qubit amplitudes alpha|0> + beta|1> with 0 = R or up, 1 = L or down.
struct AmplitudePair {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    void validate(const std::string& what) const;

    static AmplitudePair balanced() {
        const double s = 1.0 / std::sqrt(2.0);
        return AmplitudePair{{s, 0.0}, {s, 0.0}};
    }
};

struct PhotonInput {
    AmplitudePair amp;
    double omega = 0.0;
};

// Pure-dephasing model for a stored spin: over an interval t the coherence
// decays by exp(-t/t2), realized as a phase flip with probability q().
// Amplitude damping is not modeled; if t exceeds t1/10 the protocol attaches
// a warning instead.
struct DephasingParams {
    double t = 0.0;
    double t2 = 1.0;
    double t1 = std::numeric_limits<double>::infinity();

    void validate() const;
    double offdiag() const { return std::exp(-t / t2); }
    double q() const { return 0.5 * (1.0 - offdiag()); }
};

// How protocols that end in a spin readout perform it. Projective reads the
// spin directly. ProbePhoton reads it with an extra transmitted photon, the
// QND scheme; success probability gains a factor |t0_probe|^2 / 2 and the
// heralds become the probe's R/L outcomes.
enum class SpinReadout { Projective, ProbePhoton };

struct ProtocolOptions {
    GateMode mode = GateMode::Full;
    // When true, a Z correction on the last output qubit folds the minus
    // herald branch onto the plus target. Off by default; the reported
    // target then follows the herald.
    bool herald_correction = false;
    SpinReadout spin_readout = SpinReadout::Projective;
    // Probe frequency for ProbePhoton readout; defaults to the cavity
    // resonance.
    std::optional<double> probe_omega;
    // Monte Carlo trials; 0 runs the exact path only.
    std::uint64_t trials = 0;
    // Worker threads for the Monte Carlo loop. Tallies are derived from
    // per-trial seed streams and merged by summation, so results do not
    // depend on this value.
    int threads = 1;
    std::optional<DephasingParams> dephasing;
};

struct HeraldEvent {
    std::string qubit_id;
    Basis basis = Basis::Circular;
    int outcome = 0;
    std::string label; // R/L, H/V, up/down
};

struct TrialStats {
    std::uint64_t n_trials = 0;
    // Trials where every photon was transmitted and detected.
    std::uint64_t n_success = 0;
    // Herald label -> count; failed trials tally under "loss".
    std::map<std::string, std::uint64_t> herald_counts;

    double p_success() const {
        return n_trials == 0
                   ? 0.0
                   : static_cast<double>(n_success) /
                         static_cast<double>(n_trials);
    }
};

struct ProtocolOutcome {
    // Herald-conditioned output state over the output qubits, unit norm.
    // When the exact output is mixed (dephasing, or ProbePhoton readout)
    // this is the dominant eigenvector of final_mixed.
    QuantumRegister final_state;
    HeraldEvent herald; // sampled with the exact herald distribution
    // Exact total success probability, summed over heralds.
    double p_success = 0.0;
    // Exact absolute weight per herald label; sums to p_success.
    std::vector<std::pair<std::string, double>> herald_weights;
    // Overlap of the herald-conditioned output with the ideal target for
    // that herald (after the optional correction).
    double target_overlap = 0.0;
    // Herald-conditioned output density matrix, set when the output is not
    // guaranteed pure. Trace normalized to 1.
    std::optional<Eigen::MatrixXcd> final_mixed;
    std::optional<TrialStats> trials;
    std::vector<std::string> warnings;
};

// Reads out a spin by transmitting one linearly polarized photon and
// detecting its circular polarization: R heralds up, L heralds down. The
// spin survives in the heralded state. Succeeds with probability
// (|t0|^2 + |t|^2) / 2, which is 1/2 for an ideal resonant gate.
ProtocolOutcome qnd_spin_measurement(const CavityParams& cav, double omega,
                                     const AmplitudePair& spin,
                                     const ProtocolOptions& opt,
                                     SeededRng& rng);

// One photon crosses every cavity in turn, then is measured in the linear
// basis; H or V heralds the joint spin state
// a1..aN |up..up> +/- b1..bN |down..down> (normalized). For ideal gates the
// success probability is (|prod a|^2 + |prod b|^2)/2 times prod |t0_k|^2.
ProtocolOutcome ghz_spins(const std::vector<CavityParams>& cavs, double omega,
                          const std::vector<AmplitudePair>& spins,
                          const ProtocolOptions& opt, SeededRng& rng);

// Two-spin case of ghz_spins.
ProtocolOutcome entangle_spins(const CavityParams& cav1,
                               const CavityParams& cav2, double omega,
                               const AmplitudePair& spin1,
                               const AmplitudePair& spin2,
                               const ProtocolOptions& opt, SeededRng& rng);

// The photons cross one cavity in sequence; the spin, prepared in
// (up + down)/sqrt(2), is then read out in the rotated basis and heralds
// the joint photon state a1..aN |R..R> +/- b1..bN |L..L>. Dephasing, if
// configured, acts on the spin over each interval between passes.
ProtocolOutcome ghz_photons(const CavityParams& cav,
                            const std::vector<PhotonInput>& photons,
                            const ProtocolOptions& opt, SeededRng& rng);

// Two-photon case of ghz_photons.
ProtocolOutcome entangle_photons(const CavityParams& cav,
                                 const PhotonInput& p1, const PhotonInput& p2,
                                 const ProtocolOptions& opt, SeededRng& rng);

// Writes an unknown photon polarization state onto a spin prepared in
// (up + down)/sqrt(2). A linear-basis detection of the transmitted photon
// heralds alpha|up> +/- beta|down> on the spin.
ProtocolOutcome photon_to_spin(const CavityParams& cav,
                               const PhotonInput& photon,
                               const ProtocolOptions& opt, SeededRng& rng);

// Reads an unknown spin state onto a transmitted photon; the spin is then
// measured in the rotated basis and heralds alpha|R> +/- beta|L>.
ProtocolOutcome spin_to_photon(const CavityParams& cav, double omega,
                               const AmplitudePair& spin,
                               const ProtocolOptions& opt, SeededRng& rng);

// Phase-flip decomposition of dephasing on one spin: the state becomes the
// mixture (1 - q) |keep><keep| + q |flip><flip|.
struct DephasedSpin {
    QuantumRegister keep;
    QuantumRegister flip;
    double q = 0.0;
};

DephasedSpin spin_dephase(const QuantumRegister& reg,
                          const std::string& spin_id,
                          const DephasingParams& d);

// Overlap of the dephased two-photon entangler output with its Bell target:
// (1 + exp(-t/t2)) / 2 for an ideal resonant gate. Runs the exact protocol
// with balanced inputs rather than the closed form.
double entanglement_fidelity(const CavityParams& cav, double omega,
                             const DephasingParams& d, GateMode mode,
                             SeededRng& rng);

} // namespace spingate
