#include "spingate/cavity.hpp"
#include "spingate/config.hpp"
#include "spingate/errors.hpp"
#include "spingate/gate.hpp"
#include "spingate/protocols.hpp"
#include "spingate/qstate.hpp"
#include "spingate/rng.hpp"
#include "spingate/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace {

using nlohmann::json;
using namespace spingate;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> out;
    int threads = 1;
    bool dump_state = false;
};

std::uint64_t resolve_seed(const CommonArgs& args,
                           const ScenarioConfig& cfg) {
    if (args.seed) return *args.seed;
    if (cfg.seed) return *cfg.seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const std::optional<std::string>& path,
                  const std::string& content) {
    if (!path) {
        std::cout << content;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file: " + *path);
    out << content;
}

std::string csv_meta(const ScenarioConfig& cfg, std::uint64_t seed) {
    std::string head;
    head += "# config_hash=" + config_hash(cfg.raw) + "\n";
    head += "# seed=" + std::to_string(seed) + "\n";
    head += "# version=" + std::string(kVersion) + "\n";
    return head;
}

json meta_object(const ScenarioConfig& cfg, std::uint64_t seed) {
    return json{{"config_hash", config_hash(cfg.raw)},
                {"seed", seed},
                {"version", kVersion},
                {"timestamp", iso_timestamp()}};
}

const char* basis_name(Basis b) {
    switch (b) {
        case Basis::Circular: return "circular";
        case Basis::Linear: return "linear";
        case Basis::SpinZ: return "spin_z";
    }
    return "?";
}

int cmd_spectra(const CommonArgs& args) {
    const ScenarioConfig cfg = load_config(args.config_path);
    const SpectraRequest req = parse_spectra(cfg);
    const std::uint64_t seed = resolve_seed(args, cfg);
    const SpectraTable table =
        sweep_spectra(req.cavity, req.omega_min, req.omega_max, req.points);
    const std::optional<std::string> out =
        args.out ? args.out : cfg.out_path;
    write_output(out, csv_meta(cfg, seed) + table.to_csv());
    return 0;
}

int cmd_decoherence(const CommonArgs& args) {
    const ScenarioConfig cfg = load_config(args.config_path);
    const DecoherenceRequest req = parse_decoherence(cfg);
    const std::uint64_t seed = resolve_seed(args, cfg);
    SeededRng rng(seed);

    std::string body = "t,offdiag,fidelity\n";
    const double step = (req.t_max - req.t_min) / (req.points - 1);
    for (int k = 0; k < req.points; ++k) {
        DephasingParams d = req.dephasing;
        d.t = k == req.points - 1 ? req.t_max : req.t_min + step * k;
        const double fid =
            entanglement_fidelity(req.cavity, req.omega, d, req.mode, rng);
        body += fmt17(d.t) + "," + fmt17(d.offdiag()) + "," + fmt17(fid) +
                "\n";
    }
    const std::optional<std::string> out =
        args.out ? args.out : cfg.out_path;
    write_output(out, csv_meta(cfg, seed) + body);
    return 0;
}

int cmd_protocol(const CommonArgs& args) {
    const ScenarioConfig cfg = load_config(args.config_path);
    ProtocolRequest req = parse_protocol(cfg);
    const std::uint64_t seed = resolve_seed(args, cfg);
    req.options.trials = args.trials.value_or(cfg.trials);
    req.options.threads = args.threads;

    SeededRng rng(seed);
    const ProtocolOutcome outcome = run_named_protocol(req, rng);

    json herald_weights = json::object();
    for (const auto& [label, w] : outcome.herald_weights)
        herald_weights[label] = w;

    json exact{
        {"p_success", outcome.p_success},
        {"herald_weights", herald_weights},
        {"herald",
         {{"qubit", outcome.herald.qubit_id},
          {"basis", basis_name(outcome.herald.basis)},
          {"outcome", outcome.herald.label}}},
        {"target_overlap", outcome.target_overlap}};
    if (args.dump_state)
        exact["final_state"] = register_to_json(outcome.final_state);

    json report{
        {"meta", meta_object(cfg, seed)},
        {"protocol",
         {{"name", req.name},
          {"mode", req.options.mode == GateMode::Full ? "full" : "ideal"},
          {"readout", req.options.spin_readout == SpinReadout::Projective
                          ? "projective"
                          : "probe"},
          {"correction", req.options.herald_correction},
          {"omega", req.omega}}},
        {"exact", exact},
        {"warnings", outcome.warnings}};

    if (outcome.trials) {
        const TrialStats& t = *outcome.trials;
        const double p = t.p_success();
        json counts = json::object();
        for (const auto& [label, n] : t.herald_counts) counts[label] = n;
        report["trials"] = {
            {"n_trials", t.n_trials},
            {"n_success", t.n_success},
            {"p_success", p},
            {"std_error",
             t.n_trials == 0
                 ? 0.0
                 : std::sqrt(p * (1.0 - p) /
                             static_cast<double>(t.n_trials))},
            {"herald_counts", counts}};
    }

    const std::optional<std::string> out =
        args.out ? args.out : cfg.out_path;
    write_output(out, report.dump(2) + "\n");
    return 0;
}

int cmd_gate_describe(const CommonArgs& args) {
    const ScenarioConfig cfg = load_config(args.config_path);
    const GateRequest req = parse_gate(cfg);
    const std::uint64_t seed = resolve_seed(args, cfg);
    const GateOperator op =
        build_gate(req.cavity, ProbeFrequency{req.omega}, req.mode);
    json report{{"meta", meta_object(cfg, seed)},
                {"gate", gate_to_json(op)}};
    const std::optional<std::string> out =
        args.out ? args.out : cfg.out_path;
    write_output(out, report.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Simulator for a spin-conditioned photon transmission gate in a "
        "double-sided microcavity: spectra, heralded protocols, and "
        "decoherence sweeps"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&](CLI::App* sub, bool with_trials) {
        sub->add_option("--config", args.config_path, "Scenario JSON file")
            ->required();
        sub->add_option("--seed", args.seed,
                        "Seed override (otherwise config seed, otherwise "
                        "entropy)");
        sub->add_option("--out", args.out,
                        "Output path (otherwise config `out`, otherwise "
                        "stdout)");
        if (with_trials) {
            sub->add_option("--trials", args.trials,
                            "Monte Carlo trials override");
            sub->add_option("--threads", args.threads,
                            "Monte Carlo worker threads")
                ->check(CLI::PositiveNumber);
        }
    };

    CLI::App* spectra =
        app.add_subcommand("spectra", "Write a transmission/reflection "
                                      "spectra CSV over a frequency range");
    add_common(spectra, false);

    CLI::App* protocol = app.add_subcommand(
        "protocol", "Run a heralded protocol, exact and Monte Carlo");
    add_common(protocol, true);
    protocol->add_flag("--dump-state", args.dump_state,
                       "Include the heralded output state in the report");

    CLI::App* decoherence = app.add_subcommand(
        "decoherence", "Write a dephasing sweep CSV (t, offdiag, fidelity)");
    add_common(decoherence, false);

    CLI::App* gate = app.add_subcommand("gate", "Gate inspection commands");
    gate->require_subcommand(1);
    CLI::App* describe = gate->add_subcommand(
        "describe", "Print the gate operator for a configured cavity");
    add_common(describe, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectra->parsed()) return cmd_spectra(args);
        if (protocol->parsed()) return cmd_protocol(args);
        if (decoherence->parsed()) return cmd_decoherence(args);
        if (gate->parsed() && describe->parsed())
            return cmd_gate_describe(args);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
