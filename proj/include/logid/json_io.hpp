#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

#include "logid/levy.hpp"
#include "logid/simulator.hpp"

namespace logid {

using json = nlohmann::json;

/// Wire shape: {"sigma2": number, "atoms": [[u, w], ...]}.
inline json spectrum_to_json(const LevySpectrum& spec) {
    json atoms = json::array();
    for (const auto& a : spec.atoms) atoms.push_back(json::array({a.u, a.weight}));
    return json{{"sigma2", spec.sigma2}, {"atoms", atoms}};
}

inline LevySpectrum spectrum_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("spectrum: expected a JSON object");
    if (!j.contains("sigma2") || !j["sigma2"].is_number())
        throw std::invalid_argument("spectrum: field \"sigma2\" must be a number");
    LevySpectrum spec;
    spec.sigma2 = j["sigma2"].get<double>();
    if (j.contains("atoms")) {
        if (!j["atoms"].is_array())
            throw std::invalid_argument("spectrum: field \"atoms\" must be an array of [u, w] pairs");
        for (const auto& e : j["atoms"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw std::invalid_argument("spectrum: each atom must be a [u, w] number pair");
            spec.atoms.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (key != "sigma2" && key != "atoms")
            throw std::invalid_argument("spectrum: unknown field \"" + key + "\"");
    }
    spec.validate();
    return spec;
}

inline json sim_config_to_json(const SimConfig& cfg) {
    return json{{"epsilon", cfg.epsilon},
                {"grid_n", cfg.grid_n},
                {"paths", cfg.paths},
                {"seed", cfg.seed},
                {"mu", cfg.mu}};
}

inline SimConfig sim_config_from_json(const json& j) {
    SimConfig cfg;
    try {
        cfg.epsilon = j.at("epsilon").get<double>();
        cfg.grid_n = j.at("grid_n").get<int>();
        cfg.paths = j.at("paths").get<long>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.mu = j.at("mu").get<double>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sim config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

} // namespace logid
