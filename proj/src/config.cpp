#include "spingate/config.hpp"

#include "spingate/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace spingate {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key,
                    const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("config field " + where + "." + key +
                          " is required");
    return obj.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ConfigError("config field " + where + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError("config field " + where + " must be finite");
    return d;
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as_number(obj.at(key), where + "." + key);
}

int as_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("config field " + where +
                          " must be a non-negative integer");
    return static_cast<int>(v.get<long long>());
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string())
        throw ConfigError("config field " + where + " must be a string");
    return v.get<std::string>();
}

Complex as_complex(const json& v, const std::string& where) {
    if (v.is_number()) return Complex{as_number(v, where), 0.0};
    if (v.is_array() && v.size() == 2)
        return Complex{as_number(v.at(0), where + "[0]"),
                       as_number(v.at(1), where + "[1]")};
    throw ConfigError("config field " + where +
                      " must be a number or [re, im] pair");
}

AmplitudePair as_amplitudes(const json& v, const std::string& where) {
    AmplitudePair amp;
    amp.alpha = as_complex(require(v, "alpha", where), where + ".alpha");
    amp.beta = as_complex(require(v, "beta", where), where + ".beta");
    try {
        amp.validate(where);
    } catch (const SimError& e) {
        throw ConfigError(std::string("config field ") + where + ": " +
                          e.what());
    }
    return amp;
}

CavityParams parse_cavity_block(const json& block, const std::string& where) {
    CavityParams p;
    p.g = number_or(block, "g", 0.0, where);
    p.kappa = number_or(block, "kappa", 1.0, where);
    p.kappa_s = number_or(block, "kappa_s", 0.0, where);
    p.gamma = number_or(block, "gamma", 0.0, where);
    p.omega_c = number_or(block, "omega_c", 0.0, where);
    p.omega_x = number_or(block, "omega_x", p.omega_c, where);

    std::string units = "kappa";
    if (block.contains("units")) units = as_string(block.at("units"), where + ".units");
    try {
        if (units == "kappa") {
            p.validate();
        } else if (units == "ueV") {
            const double ref =
                number_or(block, "kappa_ref", p.kappa, where);
            p = p.normalized_to(ref);
            p.validate();
        } else {
            throw ConfigError("config field " + where +
                              ".units must be \"kappa\" or \"ueV\"");
        }
    } catch (const SimError& e) {
        throw ConfigError(std::string("config field ") + where + ": " +
                          e.what());
    }
    return p;
}

const CavityParams& resolve_cavity(const ScenarioConfig& cfg,
                                   const std::string& name,
                                   const std::string& where) {
    const auto it = cfg.cavities.find(name);
    if (it == cfg.cavities.end())
        throw ConfigError("config field " + where +
                          " references unknown cavity \"" + name + "\"");
    return it->second;
}

GateMode parse_mode(const json& obj, const std::string& where,
                    GateMode fallback) {
    if (!obj.is_object() || !obj.contains("mode")) return fallback;
    const std::string m = as_string(obj.at("mode"), where + ".mode");
    if (m == "full") return GateMode::Full;
    if (m == "ideal") return GateMode::Ideal;
    throw ConfigError("config field " + where +
                      ".mode must be \"full\" or \"ideal\"");
}

std::optional<DephasingParams> parse_dephasing(const json& obj,
                                               const std::string& where) {
    if (!obj.is_object() || !obj.contains("dephasing")) return std::nullopt;
    const json& d = obj.at("dephasing");
    DephasingParams out;
    out.t = as_number(require(d, "t", where + ".dephasing"),
                      where + ".dephasing.t");
    out.t2 = as_number(require(d, "t2", where + ".dephasing"),
                       where + ".dephasing.t2");
    out.t1 = number_or(d, "t1", out.t1, where + ".dephasing");
    try {
        out.validate();
    } catch (const SimError& e) {
        throw ConfigError(std::string("config field ") + where +
                          ".dephasing: " + e.what());
    }
    return out;
}

} // namespace

ScenarioConfig parse_config(const json& doc) {
    if (!doc.is_object())
        throw ConfigError("config root must be a JSON object");
    ScenarioConfig cfg;
    cfg.raw = doc;

    if (doc.contains("cavities")) {
        const json& cavs = doc.at("cavities");
        if (!cavs.is_object())
            throw ConfigError(
                "config field cavities must map names to cavity blocks");
        for (const auto& [name, block] : cavs.items())
            cfg.cavities.emplace(
                name, parse_cavity_block(block, "cavities." + name));
    }

    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned())
            throw ConfigError(
                "config field seed must be an unsigned integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("trials")) {
        const json& t = doc.at("trials");
        if (!t.is_number_unsigned())
            throw ConfigError(
                "config field trials must be an unsigned integer");
        cfg.trials = t.get<std::uint64_t>();
    }
    if (doc.contains("out"))
        cfg.out_path = as_string(doc.at("out"), "out");
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") +
                          e.what());
    }
    return parse_config(doc);
}

std::string config_hash(const json& doc) {
    const std::string canon = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

SpectraRequest parse_spectra(const ScenarioConfig& cfg) {
    const json& block = require(cfg.raw, "spectra", "config");
    SpectraRequest req;
    req.cavity = resolve_cavity(
        cfg, as_string(require(block, "cavity", "spectra"), "spectra.cavity"),
        "spectra.cavity");
    req.omega_min = as_number(require(block, "omega_min", "spectra"),
                              "spectra.omega_min");
    req.omega_max = as_number(require(block, "omega_max", "spectra"),
                              "spectra.omega_max");
    req.points =
        as_count(require(block, "points", "spectra"), "spectra.points");
    if (!(req.omega_min < req.omega_max))
        throw ConfigError(
            "config field spectra.omega_min must be below spectra.omega_max");
    if (req.points < 2)
        throw ConfigError("config field spectra.points must be at least 2");
    return req;
}

ProtocolRequest parse_protocol(const ScenarioConfig& cfg) {
    const json& block = require(cfg.raw, "protocol", "config");
    ProtocolRequest req;
    req.name = as_string(require(block, "name", "protocol"), "protocol.name");

    const json& cav_names = require(block, "cavities", "protocol");
    if (!cav_names.is_array() || cav_names.empty())
        throw ConfigError(
            "config field protocol.cavities must be a non-empty array");
    for (std::size_t i = 0; i < cav_names.size(); ++i) {
        const std::string where =
            "protocol.cavities[" + std::to_string(i) + "]";
        req.cavities.push_back(
            resolve_cavity(cfg, as_string(cav_names.at(i), where), where));
    }

    req.omega = number_or(block, "omega", 0.0, "protocol");
    req.options.mode = parse_mode(block, "protocol", GateMode::Full);
    req.options.dephasing = parse_dephasing(block, "protocol");
    if (block.contains("correction")) {
        const json& c = block.at("correction");
        if (!c.is_boolean())
            throw ConfigError(
                "config field protocol.correction must be a boolean");
        req.options.herald_correction = c.get<bool>();
    }
    if (block.contains("readout")) {
        const std::string r =
            as_string(block.at("readout"), "protocol.readout");
        if (r == "projective")
            req.options.spin_readout = SpinReadout::Projective;
        else if (r == "probe")
            req.options.spin_readout = SpinReadout::ProbePhoton;
        else
            throw ConfigError(
                "config field protocol.readout must be \"projective\" or "
                "\"probe\"");
    }
    if (block.contains("probe_omega"))
        req.options.probe_omega =
            as_number(block.at("probe_omega"), "protocol.probe_omega");

    if (block.contains("spins")) {
        const json& spins = block.at("spins");
        if (!spins.is_array())
            throw ConfigError("config field protocol.spins must be an array");
        for (std::size_t i = 0; i < spins.size(); ++i)
            req.spins.push_back(as_amplitudes(
                spins.at(i), "protocol.spins[" + std::to_string(i) + "]"));
    }
    if (block.contains("photons")) {
        const json& photons = block.at("photons");
        if (!photons.is_array())
            throw ConfigError(
                "config field protocol.photons must be an array");
        for (std::size_t i = 0; i < photons.size(); ++i) {
            const std::string where =
                "protocol.photons[" + std::to_string(i) + "]";
            const json& ph = photons.at(i);
            if (!ph.is_object())
                throw ConfigError("config field " + where +
                                  " must be an object");
            PhotonInput input;
            if (ph.is_object() && ph.contains("alpha"))
                input.amp = as_amplitudes(ph, where);
            else
                input.amp = AmplitudePair::balanced();
            input.omega = number_or(ph, "omega", req.omega, where);
            req.photons.push_back(input);
        }
    }
    if (block.contains("count")) {
        if (!req.photons.empty())
            throw ConfigError(
                "config field protocol.count conflicts with protocol.photons");
        const int n = as_count(block.at("count"), "protocol.count");
        for (int i = 0; i < n; ++i)
            req.photons.push_back(
                PhotonInput{AmplitudePair::balanced(), req.omega});
    }
    return req;
}

DecoherenceRequest parse_decoherence(const ScenarioConfig& cfg) {
    const json& block = require(cfg.raw, "decoherence", "config");
    DecoherenceRequest req;
    req.dephasing.t2 = as_number(require(block, "t2", "decoherence"),
                                 "decoherence.t2");
    req.dephasing.t1 =
        number_or(block, "t1", req.dephasing.t1, "decoherence");
    req.t_min = number_or(block, "t_min", 0.0, "decoherence");
    req.t_max =
        as_number(require(block, "t_max", "decoherence"), "decoherence.t_max");
    req.points =
        as_count(require(block, "points", "decoherence"), "decoherence.points");
    if (!(req.t_min < req.t_max))
        throw ConfigError(
            "config field decoherence.t_min must be below decoherence.t_max");
    if (req.t_min < 0.0)
        throw ConfigError("config field decoherence.t_min must be >= 0");
    if (req.points < 2)
        throw ConfigError(
            "config field decoherence.points must be at least 2");
    req.dephasing.t = req.t_min;
    try {
        req.dephasing.validate();
    } catch (const SimError& e) {
        throw ConfigError(std::string("config field decoherence: ") +
                          e.what());
    }

    // Default gate: ideal, lossless, resonant, so the fidelity column is
    // governed purely by the dephasing channel.
    req.mode = parse_mode(block, "decoherence", GateMode::Ideal);
    if (block.contains("cavity"))
        req.cavity = resolve_cavity(
            cfg, as_string(block.at("cavity"), "decoherence.cavity"),
            "decoherence.cavity");
    else
        req.cavity = CavityParams{1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    req.omega = number_or(block, "omega", req.cavity.omega_c, "decoherence");
    return req;
}

GateRequest parse_gate(const ScenarioConfig& cfg) {
    const json& block = require(cfg.raw, "gate", "config");
    GateRequest req;
    req.cavity = resolve_cavity(
        cfg, as_string(require(block, "cavity", "gate"), "gate.cavity"),
        "gate.cavity");
    req.omega = number_or(block, "omega", req.cavity.omega_c, "gate");
    req.mode = parse_mode(block, "gate", GateMode::Full);
    return req;
}

ProtocolOutcome run_named_protocol(const ProtocolRequest& req,
                                   SeededRng& rng) {
    const auto need_spins = [&](std::size_t n) {
        if (req.cavities.size() != n)
            throw ConfigError("protocol \"" + req.name + "\" needs exactly " +
                              std::to_string(n) + " cavities");
        if (!req.spins.empty() && req.spins.size() != n)
            throw ConfigError("protocol \"" + req.name + "\" needs " +
                              std::to_string(n) + " spin entries");
    };

    std::vector<AmplitudePair> spins = req.spins;

    if (req.name == "qnd") {
        need_spins(1);
        if (spins.empty()) spins.push_back(AmplitudePair::balanced());
        return qnd_spin_measurement(req.cavities[0], req.omega, spins[0],
                                    req.options, rng);
    }
    if (req.name == "entangle_spins" || req.name == "ghz_spins") {
        if (req.name == "entangle_spins" && req.cavities.size() != 2)
            throw ConfigError(
                "protocol \"entangle_spins\" needs exactly 2 cavities");
        if (req.cavities.size() < 2)
            throw ConfigError(
                "protocol \"ghz_spins\" needs at least 2 cavities");
        if (spins.empty())
            spins.assign(req.cavities.size(), AmplitudePair::balanced());
        if (spins.size() != req.cavities.size())
            throw ConfigError(
                "config field protocol.spins must match protocol.cavities");
        return ghz_spins(req.cavities, req.omega, spins, req.options, rng);
    }
    if (req.name == "entangle_photons" || req.name == "ghz_photons") {
        if (req.cavities.size() != 1)
            throw ConfigError("protocol \"" + req.name +
                              "\" needs exactly 1 cavity");
        if (req.photons.size() < 2)
            throw ConfigError("protocol \"" + req.name +
                              "\" needs at least 2 photons");
        if (req.name == "entangle_photons" && req.photons.size() != 2)
            throw ConfigError(
                "protocol \"entangle_photons\" needs exactly 2 photons");
        return ghz_photons(req.cavities[0], req.photons, req.options, rng);
    }
    if (req.name == "photon_to_spin") {
        if (req.cavities.size() != 1)
            throw ConfigError(
                "protocol \"photon_to_spin\" needs exactly 1 cavity");
        if (req.photons.size() != 1)
            throw ConfigError(
                "protocol \"photon_to_spin\" needs exactly 1 photon");
        return photon_to_spin(req.cavities[0], req.photons[0], req.options,
                              rng);
    }
    if (req.name == "spin_to_photon") {
        need_spins(1);
        if (spins.empty())
            throw ConfigError(
                "protocol \"spin_to_photon\" needs a spin entry");
        return spin_to_photon(req.cavities[0], req.omega, spins[0],
                              req.options, rng);
    }
    throw ConfigError("unknown protocol name \"" + req.name + "\"");
}

} // namespace spingate
