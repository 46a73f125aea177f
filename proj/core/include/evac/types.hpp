#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

namespace evac {

// Which bound a surrogate or a violation refers to: over-voltage (v_max) or under-voltage (v_min).
enum class Sense { over, under };

const char* toString(Sense s);
Sense parseSense(std::string_view s);

// Identifies one surrogate constraint: node index, time step (1-based) and sense.
struct ClaKey {
    std::size_t node = 0;
    int t = 0;
    Sense sense = Sense::over;

    auto operator<=>(const ClaKey&) const = default;
};

}  // namespace evac
