#include "evac/provenance.hpp"

#include "evac/types.hpp"
#include "evac/errors.hpp"
#include "json.hpp"

namespace evac {

const char* toString(Sense s) { return s == Sense::over ? "over" : "under"; }

Sense parseSense(std::string_view s) {
    if (s == "over") return Sense::over;
    if (s == "under") return Sense::under;
    throw InputError("unknown sense '" + std::string(s) + "' (expected over or under)");
}

std::string Provenance::csvHeader() const {
    std::string out = "# tool: " + std::string(kToolName) + " " + kToolVersion + "\n";
    if (seed) out += "# seed: " + std::to_string(*seed) + "\n";
    for (const auto& [label, hash] : inputs) out += "# input: " + label + " sha256=" + hash + "\n";
    for (const auto& [key, value] : extra) out += "# " + key + ": " + value + "\n";
    return out;
}

std::string Provenance::json() const {
    nlohmann::ordered_json j;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    if (seed) j["seed"] = *seed;
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [label, hash] : inputs) in[label] = hash;
    j["inputs"] = in;
    for (const auto& [key, value] : extra) j[key] = value;
    return j.dump();
}

}  // namespace evac
