#include "evac/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "json.hpp"

namespace evac {
namespace {

constexpr double kExact = 1e-9;
constexpr double kBudgetTolerance = 1e-6;

std::size_t idx(int t) { return static_cast<std::size_t>(t - 1); }

}  // namespace

double ChargeSchedule::predictedSlackTotal() const {
    double s = 0.0;
    for (const auto& [key, v] : predictedSlacks) s += v;
    return s;
}

std::vector<std::uint8_t> ChargeSchedule::chargingAt(int t) const {
    std::vector<std::uint8_t> on(evCharging.size(), 0);
    for (std::size_t e = 0; e < evCharging.size(); ++e) on[e] = evCharging[e][idx(t)];
    return on;
}

std::optional<std::pair<int, int>> ChargeSchedule::tazWindow(std::size_t taz) const {
    int first = 0, last = 0;
    for (int t = 1; t <= horizon; ++t) {
        if (!tazCharging[taz][idx(t)]) continue;
        if (first == 0) first = t;
        last = t;
    }
    if (first == 0) return std::nullopt;
    return std::make_pair(first, last);
}

int gammaFromCharging(const ChargeSchedule& schedule) {
    int gamma = schedule.horizon;
    for (std::size_t k = 0; k < schedule.tazCharging.size(); ++k) {
        if (const auto w = schedule.tazWindow(k)) gamma = std::min(gamma, w->first);
    }
    return gamma;
}

void deriveScheduleState(ChargeSchedule& s, const ScenarioData& scenario) {
    const int T = s.horizon;
    const int beta = scenario.beta();
    s.battery.assign(scenario.evs().size(), std::vector<double>(static_cast<std::size_t>(T) + 1, 0.0));
    for (std::size_t e = 0; e < scenario.evs().size(); ++e) {
        // Levels are kept as exact multiples of 1/beta: L^t = L^{t-1} + C^{t-1}/beta, with C^0 = 0.
        int units = beta - scenario.evSteps(e);
        s.battery[e][0] = static_cast<double>(units) / beta;
        for (int t = 1; t <= T; ++t) {
            if (t > 1 && s.evCharging[e][idx(t - 1)]) ++units;
            s.battery[e][static_cast<std::size_t>(t)] = static_cast<double>(units) / beta;
        }
    }
    bool anyCharging = false;
    for (std::size_t k = 0; k < s.tazCharging.size(); ++k) anyCharging = anyCharging || s.tazWindow(k).has_value();
    s.gammaMax = gammaFromCharging(s);
    s.tau.assign(static_cast<std::size_t>(T), 0);
    if (anyCharging) {
        for (int t = s.gammaMax; t <= T; ++t) s.tau[idx(t)] = 1;
    }
}

ChargeSchedule scheduleFromStarts(const ScenarioData& scenario, std::span<const int> starts) {
    const int T = scenario.horizon();
    const std::size_t nTaz = scenario.tazs().size();
    if (starts.size() != nTaz) throw InputError("scheduleFromStarts: one start per TAZ required");
    ChargeSchedule s;
    s.horizon = T;
    s.tazCharging.assign(nTaz, std::vector<std::uint8_t>(static_cast<std::size_t>(T), 0));
    s.evCharging.assign(scenario.evs().size(), std::vector<std::uint8_t>(static_cast<std::size_t>(T), 0));
    for (std::size_t k = 0; k < nTaz; ++k) {
        const int w = scenario.tazWindow(k);
        if (w == 0) continue;
        const int start = starts[k];
        if (start < 1 || start + w - 1 > T) {
            throw InputError("scheduleFromStarts: window of TAZ " + scenario.tazs()[k].id + " leaves the horizon");
        }
        for (int t = start; t < start + w; ++t) s.tazCharging[k][idx(t)] = 1;
        for (std::size_t e : scenario.tazEvs(k)) {
            for (int t = start; t < start + scenario.evSteps(e); ++t) s.evCharging[e][idx(t)] = 1;
        }
    }
    deriveScheduleState(s, scenario);
    return s;
}

void validateSchedule(const ScenarioData& scenario, const ChargeSchedule& s, double lambdaMax) {
    const int T = scenario.horizon();
    const auto fail = [](const std::string& msg) { throw ScheduleError("schedule invalid: " + msg); };
    if (s.horizon != T || s.tau.size() != idx(T + 1) || s.tazCharging.size() != scenario.tazs().size() ||
        s.evCharging.size() != scenario.evs().size() || s.battery.size() != scenario.evs().size()) {
        fail("dimensions do not match the scenario");
    }
    for (std::size_t k = 0; k < scenario.tazs().size(); ++k) {
        const std::string& id = scenario.tazs()[k].id;
        if (s.tazCharging[k].size() != idx(T + 1)) fail("TAZ " + id + " has wrong horizon");
        const int w = scenario.tazWindow(k);
        const auto window = s.tazWindow(k);
        if (w == 0) {
            if (window) fail("TAZ " + id + " charges although all its EVs start full");
            continue;
        }
        if (!window) fail("TAZ " + id + " never charges");
        for (int t = window->first; t <= window->second; ++t) {
            if (!s.tazCharging[k][idx(t)]) fail("TAZ " + id + " charging window is not contiguous");
        }
        if (window->second - window->first + 1 != w) {
            fail("TAZ " + id + " window length " + std::to_string(window->second - window->first + 1) +
                 " differs from required " + std::to_string(w));
        }
    }
    const int beta = scenario.beta();
    for (std::size_t e = 0; e < scenario.evs().size(); ++e) {
        const std::string& id = scenario.evs()[e].id;
        const std::size_t k = scenario.evTaz(e);
        if (s.evCharging[e].size() != idx(T + 1) || s.battery[e].size() != idx(T + 2)) fail("EV " + id + " has wrong horizon");
        if (std::abs(s.battery[e][0] - scenario.evs()[e].soc0) > kExact) fail("EV " + id + " initial level differs from soc0");
        int steps = 0, first = 0, last = 0;
        for (int t = 1; t <= T; ++t) {
            if (!s.evCharging[e][idx(t)]) continue;
            if (!s.tazCharging[k][idx(t)]) fail("EV " + id + " charges at t=" + std::to_string(t) + " while its TAZ does not");
            ++steps;
            if (first == 0) first = t;
            last = t;
        }
        if (steps != scenario.evSteps(e)) fail("EV " + id + " charges " + std::to_string(steps) + " steps, needs " + std::to_string(scenario.evSteps(e)));
        if (steps > 0) {
            if (last - first + 1 != steps) fail("EV " + id + " charging steps are not consecutive");
            if (first != s.tazWindow(k)->first) fail("EV " + id + " does not start with its TAZ");
        }
        for (int t = 1; t <= T; ++t) {
            const double expected = s.battery[e][idx(t)] + (t > 1 && s.evCharging[e][idx(t - 1)] ? 1.0 / beta : 0.0);
            if (std::abs(s.battery[e][static_cast<std::size_t>(t)] - expected) > kExact) {
                fail("EV " + id + " battery recursion broken at t=" + std::to_string(t));
            }
            if (s.battery[e][static_cast<std::size_t>(t)] > 1.0 + kExact) fail("EV " + id + " battery above 1 at t=" + std::to_string(t));
        }
        const int d = scenario.tazs()[k].departure;
        if (std::abs(s.battery[e][static_cast<std::size_t>(d)] - 1.0) > kExact) {
            fail("EV " + id + " not full at departure t=" + std::to_string(d));
        }
    }
    const int gamma = gammaFromCharging(s);
    if (s.gammaMax != gamma) fail("gamma_max " + std::to_string(s.gammaMax) + " differs from first start " + std::to_string(gamma));
    bool seen = false;
    for (int t = 1; t <= T; ++t) {
        bool charging = false;
        for (const auto& row : s.tazCharging) charging = charging || row[idx(t)];
        seen = seen || charging;
        if (seen && !s.tau[idx(t)]) fail("tau is 0 at t=" + std::to_string(t) + " after charging began");
        if (t > 1 && s.tau[idx(t)] < s.tau[idx(t - 1)]) fail("tau decreases at t=" + std::to_string(t));
    }
    for (const auto& [key, v] : s.predictedSlacks) {
        if (v < -kBudgetTolerance) fail("negative predicted slack");
    }
    if (std::isfinite(lambdaMax) && s.predictedSlackTotal() > lambdaMax + kBudgetTolerance) {
        fail("predicted slack total exceeds the violation budget");
    }
}

std::vector<std::vector<double>> scheduleToDemand(const ChargeSchedule& schedule, const ScenarioData& scenario) {
    const double r = scenario.ratePu();
    std::vector<std::vector<double>> p(static_cast<std::size_t>(schedule.horizon),
                                       std::vector<double>(scenario.evBuses().size(), 0.0));
    for (int t = 1; t <= schedule.horizon; ++t) {
        for (std::size_t e = 0; e < scenario.evs().size(); ++e) {
            if (schedule.evCharging[e][idx(t)]) p[idx(t)][scenario.evBusSlot(e)] += r;
        }
    }
    return p;
}

std::string scheduleToCsv(const ChargeSchedule& s, const ScenarioData& scenario, const Provenance& prov) {
    std::string out = prov.csvHeader() + "taz,t,charging\n";
    for (std::size_t k = 0; k < scenario.tazs().size(); ++k) {
        for (int t = 1; t <= s.horizon; ++t) {
            out += scenario.tazs()[k].id + "," + std::to_string(t) + "," + (s.tazCharging[k][idx(t)] ? "1" : "0") + "\n";
        }
    }
    return out;
}

std::string evScheduleToCsv(const ChargeSchedule& s, const ScenarioData& scenario, const Provenance& prov) {
    std::string out = prov.csvHeader() + "ev,t,charging,battery\n";
    for (std::size_t e = 0; e < scenario.evs().size(); ++e) {
        for (int t = 0; t <= s.horizon; ++t) {
            const bool on = t >= 1 && s.evCharging[e][idx(t)];
            out += scenario.evs()[e].id + "," + std::to_string(t) + "," + (on ? "1" : "0") + "," +
                   formatExact(s.battery[e][static_cast<std::size_t>(t)]) + "\n";
        }
    }
    return out;
}

std::string ganttToJson(const ChargeSchedule& s, const ScenarioData& scenario, const Provenance& prov) {
    nlohmann::ordered_json j;
    j["provenance"] = nlohmann::ordered_json::parse(prov.json());
    j["gamma_max"] = s.gammaMax;
    j["horizon"] = s.horizon;
    nlohmann::ordered_json bars = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < scenario.tazs().size(); ++k) {
        const auto w = s.tazWindow(k);
        if (!w) continue;
        bars.push_back({{"taz", scenario.tazs()[k].id}, {"start_t", w->first}, {"end_t", w->second}});
    }
    j["bars"] = bars;
    return j.dump(2) + "\n";
}

}  // namespace evac
