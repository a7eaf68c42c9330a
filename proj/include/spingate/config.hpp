#pragma once

#include "spingate/cavity.hpp"
#include "spingate/gate.hpp"
#include "spingate/protocols.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spingate {

// Bad or missing configuration. The CLI maps this to exit code 2; messages
// name the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed scenario document. Cavities are stored normalized to kappa units;
// command-specific blocks stay as JSON and are interpreted by the parse_*
// helpers below.
struct ScenarioConfig {
    nlohmann::json raw;
    std::map<std::string, CavityParams> cavities;
    std::optional<std::uint64_t> seed;
    std::uint64_t trials = 0;
    std::optional<std::string> out_path;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

// FNV-1a 64-bit hash of the canonical (sorted-key, compact) dump, as hex.
std::string config_hash(const nlohmann::json& doc);

struct SpectraRequest {
    CavityParams cavity;
    double omega_min = 0.0;
    double omega_max = 0.0;
    int points = 0;
};

struct ProtocolRequest {
    std::string name;
    std::vector<CavityParams> cavities;
    double omega = 0.0;
    std::vector<AmplitudePair> spins;
    std::vector<PhotonInput> photons;
    ProtocolOptions options;
};

struct DecoherenceRequest {
    DephasingParams dephasing; // t holds t_min until the sweep fills it in
    double t_min = 0.0;
    double t_max = 0.0;
    int points = 0;
    CavityParams cavity;
    double omega = 0.0;
    GateMode mode = GateMode::Ideal;
};

struct GateRequest {
    CavityParams cavity;
    double omega = 0.0;
    GateMode mode = GateMode::Full;
};

SpectraRequest parse_spectra(const ScenarioConfig& cfg);
ProtocolRequest parse_protocol(const ScenarioConfig& cfg);
DecoherenceRequest parse_decoherence(const ScenarioConfig& cfg);
GateRequest parse_gate(const ScenarioConfig& cfg);

// Dispatches a parsed protocol request to the protocol implementation.
ProtocolOutcome run_named_protocol(const ProtocolRequest& req, SeededRng& rng);

} // namespace spingate
