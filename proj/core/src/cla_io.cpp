#include <algorithm>
#include <cmath>

#include "evac/cla.hpp"
#include "evac/errors.hpp"
#include "json.hpp"

namespace evac {

using Json = nlohmann::ordered_json;

std::string claModelToJson(const ClaModel& model, const ScenarioData& scenario, const std::string& provenanceJson) {
    Json prov = Json::parse(provenanceJson);
    prov["seed"] = model.seed;
    prov["M"] = model.sampleCount;
    prov["scenario_hash"] = model.scenarioHash;
    Json fns = Json::array();
    for (const auto& [key, f] : model.functions()) {
        Json a1 = Json::object();
        for (std::size_t k = 0; k < f.a1.size(); ++k) {
            if (std::abs(f.a1[k]) >= 1e-12) a1[scenario.evBuses()[k]] = f.a1[k];
        }
        fns.push_back(Json{{"node", scenario.network().nodes()[f.node].str()},
                           {"t", f.t},
                           {"sense", toString(f.sense)},
                           {"a0", f.a0},
                           {"a1", a1}});
    }
    Json j;
    j["provenance"] = prov;
    j["functions"] = fns;
    return j.dump(2) + "\n";
}

ClaModel claModelFromJson(std::string_view text, const ScenarioData& scenario) {
    Json j;
    try {
        j = Json::parse(std::string(text));
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("CLA model: invalid JSON: ") + e.what());
    }
    ClaModel model;
    try {
        const Json& prov = j.at("provenance");
        model.seed = prov.at("seed").get<std::uint64_t>();
        model.sampleCount = prov.at("M").get<std::size_t>();
        model.scenarioHash = prov.at("scenario_hash").get<std::string>();
        if (model.scenarioHash != scenarioHash(scenario)) {
            throw InputError("CLA model was fitted for a different scenario (hash " + model.scenarioHash + ")");
        }
        const auto& buses = scenario.evBuses();
        for (const Json& rec : j.at("functions")) {
            ClaFunction f;
            const NodeId node = NodeId::parse(rec.at("node").get<std::string>());
            const auto idx = scenario.network().nodeIndex(node);
            if (!idx) throw InputError("CLA model: unknown node " + node.str());
            f.node = *idx;
            f.t = rec.at("t").get<int>();
            if (f.t < 1 || f.t > scenario.horizon()) throw InputError("CLA model: t out of range for " + node.str());
            f.sense = parseSense(rec.at("sense").get<std::string>());
            f.a0 = rec.at("a0").get<double>();
            f.a1.assign(buses.size(), 0.0);
            for (const auto& [bus, coef] : rec.at("a1").items()) {
                const auto it = std::find(buses.begin(), buses.end(), bus);
                if (it == buses.end()) throw InputError("CLA model: a1 references bus " + bus + " which hosts no EV");
                f.a1[static_cast<std::size_t>(it - buses.begin())] = coef.get<double>();
            }
            if (model.contains(f.key())) throw InputError("CLA model: duplicate function for " + node.str());
            model.insert(std::move(f));
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("CLA model: ") + e.what());
    }
    return model;
}

}  // namespace evac
