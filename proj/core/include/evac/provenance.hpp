#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evac {

inline constexpr const char* kToolName = "evacharge";
inline constexpr const char* kToolVersion = "0.1.0";

// Origin of an artifact: tool version, seed and hashes of the inputs it was derived from.
struct Provenance {
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> inputs;  // (label, sha256)
    std::vector<std::pair<std::string, std::string>> extra;   // free-form key/value pairs

    // '#'-prefixed lines placed before a CSV header.
    std::string csvHeader() const;
    // Compact JSON object text.
    std::string json() const;
};

}  // namespace evac
