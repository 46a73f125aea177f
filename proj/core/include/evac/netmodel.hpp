#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evac/provenance.hpp"

namespace evac {

using Complex = std::complex<double>;

enum class Phase : std::uint8_t { a = 0, b = 1, c = 2 };

char phaseChar(Phase p);
Phase parsePhase(std::string_view s);

class PhaseSet {
public:
    constexpr PhaseSet() = default;
    static PhaseSet fromString(std::string_view s);  // e.g. "abc", "a", "bc"
    static constexpr PhaseSet all() { return PhaseSet(0b111); }

    constexpr bool contains(Phase p) const { return (mask_ >> static_cast<int>(p)) & 1u; }
    constexpr void insert(Phase p) { mask_ |= static_cast<std::uint8_t>(1u << static_cast<int>(p)); }
    constexpr bool empty() const { return mask_ == 0; }
    int size() const;
    bool isSubsetOf(PhaseSet other) const { return (mask_ & ~other.mask_) == 0; }
    // Phases in canonical a, b, c order.
    std::vector<Phase> list() const;
    std::string str() const;

    constexpr bool operator==(const PhaseSet&) const = default;

private:
    constexpr explicit PhaseSet(std::uint8_t mask) : mask_(mask) {}
    std::uint8_t mask_ = 0;
};

// A single-phase node (bus, phase).
struct NodeId {
    std::string bus;
    Phase phase = Phase::a;

    // "bus.phase", e.g. "n3.b"
    std::string str() const;
    static NodeId parse(std::string_view s);

    auto operator<=>(const NodeId&) const = default;
};

struct Bus {
    std::string id;
    PhaseSet phases;
};

struct Line {
    std::string from;
    std::string to;
    PhaseSet phases;
    // Series impedance in p.u., row-major over phases.list(); dimension |phases|^2.
    std::vector<Complex> z;

    Complex impedance(int row, int col) const { return z[static_cast<std::size_t>(row * phases.size() + col)]; }
};

// Multi-phase radial feeder with a single fixed-voltage source bus.
// Immutable once built; the constructor validates every structural invariant.
class NetworkModel {
public:
    NetworkModel(std::vector<Bus> buses, std::vector<Line> lines, std::string sourceBus,
                 std::array<Complex, 3> sourceVoltage, double baseKv, double baseKva);

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Line>& lines() const { return lines_; }
    const std::string& sourceBus() const { return sourceBus_; }
    std::size_t sourceIndex() const { return sourceIndex_; }
    const std::array<Complex, 3>& sourceVoltage() const { return sourceVoltage_; }
    double baseKv() const { return baseKv_; }
    // Per-phase power base; a node demand of base_kva kW is 1 p.u.
    double baseKva() const { return baseKva_; }

    std::optional<std::size_t> busIndex(std::string_view id) const;
    const Bus& bus(std::size_t idx) const { return buses_[idx]; }

    // Every single-phase node, ordered by bus declaration order then phase.
    const std::vector<NodeId>& nodes() const { return nodes_; }
    std::optional<std::size_t> nodeIndex(const NodeId& node) const;
    // Node index of (bus, phase) or -1 when the bus lacks that phase.
    int nodeIndex(std::size_t busIdx, Phase p) const { return busNodes_[busIdx][static_cast<int>(p)]; }

    // Radial topology oriented away from the source.
    const std::vector<std::size_t>& breadthFirstOrder() const { return bfsOrder_; }
    // Index of the line feeding this bus, -1 for the source.
    int parentLine(std::size_t busIdx) const { return parentLine_[busIdx]; }
    std::size_t parentBus(std::size_t busIdx) const { return parentBus_[busIdx]; }
    const std::vector<std::size_t>& children(std::size_t busIdx) const { return children_[busIdx]; }
    // True when `node` lies in the subtree rooted at `root` (including root itself).
    bool isDownstream(std::size_t root, std::size_t busIdx) const;

    double kwToPu(double kw) const { return kw / baseKva_; }

private:
    void validate();

    std::vector<Bus> buses_;
    std::vector<Line> lines_;
    std::string sourceBus_;
    std::size_t sourceIndex_ = 0;
    std::array<Complex, 3> sourceVoltage_;
    double baseKv_;
    double baseKva_;

    std::map<std::string, std::size_t, std::less<>> busIndex_;
    std::vector<NodeId> nodes_;
    std::map<NodeId, std::size_t> nodeIndex_;
    std::vector<std::array<int, 3>> busNodes_;
    std::vector<std::size_t> bfsOrder_;
    std::vector<int> parentLine_;
    std::vector<std::size_t> parentBus_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<int> depth_;
};

// Source phasors 1.0 p.u. at 0, -120 and +120 degrees.
std::array<Complex, 3> balancedSourceVoltage(double magnitude = 1.0);

struct Taz {
    std::string id;
    int departure = 0;  // d_xi in 1..T
};

struct Ev {
    std::string id;
    std::string taz;
    NodeId node;
    double soc0 = 0.0;
};

struct ScenarioConfig {
    int horizon = 96;       // T, 15-minute periods
    int beta = 32;          // periods for a 0 -> 100 % charge
    double rateKw = 7.5;    // R
    double vMax = 1.1025;   // squared p.u.
    double vMin = 0.9025;   // squared p.u.
    double lambdaMax = 0.0; // squared-p.u. x steps
};

// Network plus evacuation data. Immutable once built.
class ScenarioData {
public:
    // background[t-1][node] holds the complex node demand in kW + j kvar.
    ScenarioData(NetworkModel network, ScenarioConfig config, std::vector<std::vector<Complex>> background,
                 std::vector<Taz> tazs, std::vector<Ev> evs);

    const NetworkModel& network() const { return network_; }
    const ScenarioConfig& config() const { return config_; }
    int horizon() const { return config_.horizon; }
    int beta() const { return config_.beta; }
    const std::vector<Taz>& tazs() const { return tazs_; }
    const std::vector<Ev>& evs() const { return evs_; }

    // Background demand at time t (1-based) for node index i, kW + j kvar.
    Complex backgroundKw(int t, std::size_t node) const { return background_[static_cast<std::size_t>(t - 1)][node]; }
    const std::vector<Complex>& backgroundKw(int t) const { return background_[static_cast<std::size_t>(t - 1)]; }
    // Same in p.u. on the network power base.
    std::vector<Complex> backgroundPu(int t) const;

    // Buses hosting at least one EV (set K), in network bus order.
    const std::vector<std::string>& evBuses() const { return evBuses_; }
    std::size_t evBusSlot(std::size_t ev) const { return evBusSlot_[ev]; }
    std::size_t evNodeIndex(std::size_t ev) const { return evNode_[ev]; }
    std::size_t evTaz(std::size_t ev) const { return evTaz_[ev]; }
    const std::vector<std::size_t>& tazEvs(std::size_t taz) const { return tazEvs_[taz]; }
    // Charging steps EV needs to reach full charge, (1 - soc0) * beta.
    int evSteps(std::size_t ev) const { return evSteps_[ev]; }
    // Length of the TAZ charging window: max over its EVs of evSteps.
    int tazWindow(std::size_t taz) const;
    double ratePu() const { return network_.kwToPu(config_.rateKw); }

private:
    NetworkModel network_;
    ScenarioConfig config_;
    std::vector<std::vector<Complex>> background_;
    std::vector<Taz> tazs_;
    std::vector<Ev> evs_;

    std::vector<std::string> evBuses_;
    std::vector<std::size_t> evBusSlot_;
    std::vector<std::size_t> evNode_;
    std::vector<std::size_t> evTaz_;
    std::vector<std::vector<std::size_t>> tazEvs_;
    std::vector<int> evSteps_;
};

// ---- file formats ----

NetworkModel parseNetwork(const std::filesystem::path& path);
NetworkModel parseNetworkJson(std::string_view text);
std::string networkToJson(const NetworkModel& net);

struct ScenarioPaths {
    std::filesystem::path network;
    std::filesystem::path loads;
    std::filesystem::path evs;
    std::filesystem::path tazs;
    std::filesystem::path config;  // optional; empty means all defaults
};

// Missing file path yields the defaults; unknown keys are rejected.
ScenarioConfig parseConfig(const std::filesystem::path& path);
// background[t-1][node] in kW + j kvar; entries not listed are zero.
std::vector<std::vector<Complex>> parseLoads(const NetworkModel& net, const std::filesystem::path& path, int horizon);

ScenarioData parseScenario(const NetworkModel& net, const std::filesystem::path& loads,
                           const std::filesystem::path& evs, const std::filesystem::path& tazs,
                           const std::filesystem::path& config);
ScenarioData loadScenario(const ScenarioPaths& paths);

// Writes network.json, loads.csv, evs.csv, tazs.csv, config.json into `dir`, optionally stamped
// with a provenance block.
ScenarioPaths writeScenario(const ScenarioData& scenario, const std::filesystem::path& dir,
                            const Provenance* prov = nullptr);

std::string loadsToCsv(const ScenarioData& scenario);
std::string evsToCsv(const ScenarioData& scenario);
std::string tazsToCsv(const ScenarioData& scenario);
std::string configToJson(const ScenarioConfig& config);

// Hex SHA-256 of the canonical serialization of the scenario.
std::string scenarioHash(const ScenarioData& scenario);

}  // namespace evac
