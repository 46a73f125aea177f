#include "evac/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

#include "evac/errors.hpp"

namespace evac {

char phaseChar(Phase p) { return "abc"[static_cast<int>(p)]; }

Phase parsePhase(std::string_view s) {
    if (s == "a" || s == "A") return Phase::a;
    if (s == "b" || s == "B") return Phase::b;
    if (s == "c" || s == "C") return Phase::c;
    throw InputError("invalid phase '" + std::string(s) + "' (expected a, b or c)");
}

PhaseSet PhaseSet::fromString(std::string_view s) {
    PhaseSet set;
    for (char ch : s) {
        const Phase p = parsePhase(std::string_view(&ch, 1));
        if (set.contains(p)) throw InputError("duplicate phase in '" + std::string(s) + "'");
        set.insert(p);
    }
    return set;
}

int PhaseSet::size() const { return (mask_ & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1); }

std::vector<Phase> PhaseSet::list() const {
    std::vector<Phase> out;
    for (Phase p : {Phase::a, Phase::b, Phase::c}) {
        if (contains(p)) out.push_back(p);
    }
    return out;
}

std::string PhaseSet::str() const {
    std::string s;
    for (Phase p : list()) s.push_back(phaseChar(p));
    return s;
}

std::string NodeId::str() const { return bus + "." + phaseChar(phase); }

NodeId NodeId::parse(std::string_view s) {
    const auto dot = s.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 2 != s.size()) {
        throw InputError("invalid node '" + std::string(s) + "' (expected busid.phase)");
    }
    return NodeId{std::string(s.substr(0, dot)), parsePhase(s.substr(dot + 1))};
}

std::array<Complex, 3> balancedSourceVoltage(double magnitude) {
    const double shift = 2.0 * std::numbers::pi / 3.0;
    return {std::polar(magnitude, 0.0), std::polar(magnitude, -shift), std::polar(magnitude, shift)};
}

NetworkModel::NetworkModel(std::vector<Bus> buses, std::vector<Line> lines, std::string sourceBus,
                           std::array<Complex, 3> sourceVoltage, double baseKv, double baseKva)
    : buses_(std::move(buses)),
      lines_(std::move(lines)),
      sourceBus_(std::move(sourceBus)),
      sourceVoltage_(sourceVoltage),
      baseKv_(baseKv),
      baseKva_(baseKva) {
    validate();
}

void NetworkModel::validate() {
    if (!(baseKv_ > 0.0) || !std::isfinite(baseKv_)) throw InputError("base_kv must be positive");
    if (!(baseKva_ > 0.0) || !std::isfinite(baseKva_)) throw InputError("base_kva must be positive");
    if (buses_.empty()) throw InputError("buses: network has no buses");

    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (b.id.empty()) throw InputError("buses[" + std::to_string(i) + "].id is empty");
        if (b.phases.empty()) throw InputError("buses[" + std::to_string(i) + "].phases is empty (bus " + b.id + ")");
        if (!busIndex_.emplace(b.id, i).second) throw InputError("buses: duplicate bus id '" + b.id + "'");
    }
    const auto src = busIndex(sourceBus_);
    if (!src) throw InputError("source.bus '" + sourceBus_ + "' is not a declared bus");
    sourceIndex_ = *src;
    for (const Complex& v : sourceVoltage_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) <= 0.0) {
            throw InputError("source.voltage_pu must be finite and nonzero");
        }
    }

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(buses_.size());
    for (std::size_t k = 0; k < lines_.size(); ++k) {
        const Line& ln = lines_[k];
        const std::string where = "lines[" + std::to_string(k) + "]";
        const auto f = busIndex(ln.from);
        const auto t = busIndex(ln.to);
        if (!f) throw InputError(where + ".from references unknown bus '" + ln.from + "'");
        if (!t) throw InputError(where + ".to references unknown bus '" + ln.to + "'");
        if (*f == *t) throw TopologyError(where + " is a self-loop on bus '" + ln.from + "'");
        if (ln.phases.empty()) throw InputError(where + ".phases is empty");
        if (!ln.phases.isSubsetOf(buses_[*f].phases) || !ln.phases.isSubsetOf(buses_[*t].phases)) {
            throw TopologyError("phase mismatch: " + where + " (" + ln.from + " -> " + ln.to + ") carries phases '" +
                                ln.phases.str() + "' not present on both endpoints");
        }
        const int n = ln.phases.size();
        if (ln.z.size() != static_cast<std::size_t>(n * n)) {
            throw InputError(where + ".z_pu must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        double scale = 0.0;
        for (const Complex& z : ln.z) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError(where + ".z_pu has non-finite entry");
            scale = std::max(scale, std::abs(z));
        }
        for (int r = 0; r < n; ++r) {
            if (ln.impedance(r, r).real() < 0.0) throw InputError(where + ".z_pu diagonal has negative resistance");
            for (int c = r + 1; c < n; ++c) {
                if (std::abs(ln.impedance(r, c) - ln.impedance(c, r)) > 1e-12 * std::max(1.0, scale)) {
                    throw InputError(where + ".z_pu is not symmetric");
                }
            }
        }
        adjacency[*f].emplace_back(*t, k);
        adjacency[*t].emplace_back(*f, k);
    }

    if (lines_.size() >= buses_.size()) {
        throw TopologyError("non-radial network: " + std::to_string(lines_.size()) + " lines for " +
                            std::to_string(buses_.size()) + " buses (a radial feeder has |buses|-1)");
    }

    const std::size_t nb = buses_.size();
    parentLine_.assign(nb, -1);
    parentBus_.assign(nb, sourceIndex_);
    children_.assign(nb, {});
    depth_.assign(nb, -1);
    std::deque<std::size_t> queue{sourceIndex_};
    depth_[sourceIndex_] = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        bfsOrder_.push_back(u);
        for (const auto& [v, k] : adjacency[u]) {
            if (static_cast<int>(k) == parentLine_[u]) continue;
            if (depth_[v] >= 0) throw TopologyError("non-radial network: cycle through bus '" + buses_[v].id + "'");
            depth_[v] = depth_[u] + 1;
            parentLine_[v] = static_cast<int>(k);
            parentBus_[v] = u;
            children_[u].push_back(v);
            queue.push_back(v);
        }
    }
    for (std::size_t i = 0; i < nb; ++i) {
        if (depth_[i] < 0) throw TopologyError("disconnected node: bus '" + buses_[i].id + "' is not reachable from source");
    }

    // A node is reachable on its phase only if the feeding line carries that phase.
    for (std::size_t i = 0; i < nb; ++i) {
        if (i == sourceIndex_) continue;
        const Line& feed = lines_[static_cast<std::size_t>(parentLine_[i])];
        for (Phase p : buses_[i].phases.list()) {
            if (!feed.phases.contains(p)) {
                throw TopologyError("disconnected node: " + NodeId{buses_[i].id, p}.str() +
                                    " is not served by its feeding line " + feed.from + " -> " + feed.to);
            }
        }
    }

    busNodes_.assign(nb, {-1, -1, -1});
    for (std::size_t i = 0; i < nb; ++i) {
        for (Phase p : buses_[i].phases.list()) {
            busNodes_[i][static_cast<int>(p)] = static_cast<int>(nodes_.size());
            nodeIndex_.emplace(NodeId{buses_[i].id, p}, nodes_.size());
            nodes_.push_back(NodeId{buses_[i].id, p});
        }
    }
}

std::optional<std::size_t> NetworkModel::busIndex(std::string_view id) const {
    const auto it = busIndex_.find(id);
    if (it == busIndex_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> NetworkModel::nodeIndex(const NodeId& node) const {
    const auto it = nodeIndex_.find(node);
    if (it == nodeIndex_.end()) return std::nullopt;
    return it->second;
}

bool NetworkModel::isDownstream(std::size_t root, std::size_t busIdx) const {
    while (depth_[busIdx] > depth_[root]) busIdx = parentBus_[busIdx];
    return busIdx == root;
}

ScenarioData::ScenarioData(NetworkModel network, ScenarioConfig config, std::vector<std::vector<Complex>> background,
                           std::vector<Taz> tazs, std::vector<Ev> evs)
    : network_(std::move(network)),
      config_(config),
      background_(std::move(background)),
      tazs_(std::move(tazs)),
      evs_(std::move(evs)) {
    const auto& c = config_;
    if (c.horizon < 1) throw InputError("config.T must be >= 1");
    if (c.beta < 1) throw InputError("config.beta must be >= 1");
    if (!(c.rateKw > 0.0)) throw InputError("config.rate_kw must be positive");
    if (!(c.vMin < c.vMax)) throw InputError("config: v_min_pu2 must be below v_max_pu2");
    if (!(c.lambdaMax >= 0.0)) throw InputError("config.lambda_max must be non-negative");

    if (background_.size() != static_cast<std::size_t>(c.horizon)) {
        throw InputError("background load series has " + std::to_string(background_.size()) + " periods, expected T=" +
                         std::to_string(c.horizon));
    }
    for (const auto& row : background_) {
        if (row.size() != network_.nodes().size()) throw InputError("background load row does not cover every node");
    }

    std::map<std::string, std::size_t> tazIndex;
    for (std::size_t k = 0; k < tazs_.size(); ++k) {
        const Taz& z = tazs_[k];
        if (!tazIndex.emplace(z.id, k).second) throw InputError("tazs: duplicate taz_id '" + z.id + "'");
        if (z.departure < 1 || z.departure > c.horizon) {
            throw InputError("TAZ '" + z.id + "' departure_t=" + std::to_string(z.departure) + " outside 1..T (T=" +
                             std::to_string(c.horizon) + ")");
        }
    }
    if (evs_.empty()) throw InputError("evs: scenario has no EVs (set of EV buses would be empty)");

    tazEvs_.assign(tazs_.size(), {});
    std::set<std::string> evIds;
    std::vector<bool> busHasEv(network_.buses().size(), false);
    for (std::size_t e = 0; e < evs_.size(); ++e) {
        const Ev& ev = evs_[e];
        if (!evIds.insert(ev.id).second) throw InputError("evs: duplicate ev_id '" + ev.id + "'");
        const auto tz = tazIndex.find(ev.taz);
        if (tz == tazIndex.end()) throw InputError("EV '" + ev.id + "' references unknown TAZ '" + ev.taz + "'");
        const auto node = network_.nodeIndex(ev.node);
        if (!node) throw InputError("EV '" + ev.id + "' references unknown node '" + ev.node.str() + "'");
        if (!(ev.soc0 >= 0.0 && ev.soc0 <= 1.0)) throw InputError("EV '" + ev.id + "' soc0 outside [0,1]");
        const double steps = ev.soc0 * c.beta;
        const double nearest = std::round(steps);
        if (std::abs(steps - nearest) > 1e-9) {
            throw InputError("EV '" + ev.id + "' soc0=" + std::to_string(ev.soc0) + " is not a multiple of 1/beta (beta=" +
                             std::to_string(c.beta) + "); nearest valid value is " + std::to_string(nearest / c.beta));
        }
        evNode_.push_back(*node);
        evTaz_.push_back(tz->second);
        tazEvs_[tz->second].push_back(e);
        evSteps_.push_back(c.beta - static_cast<int>(nearest));
        busHasEv[*network_.busIndex(ev.node.bus)] = true;
    }
    for (std::size_t k = 0; k < tazs_.size(); ++k) {
        if (tazEvs_[k].empty()) throw InputError("TAZ '" + tazs_[k].id + "' has no EVs");
    }

    std::vector<std::size_t> slotOfBus(network_.buses().size(), 0);
    for (std::size_t b = 0; b < busHasEv.size(); ++b) {
        if (!busHasEv[b]) continue;
        slotOfBus[b] = evBuses_.size();
        evBuses_.push_back(network_.bus(b).id);
    }
    for (const Ev& ev : evs_) evBusSlot_.push_back(slotOfBus[*network_.busIndex(ev.node.bus)]);
}

std::vector<Complex> ScenarioData::backgroundPu(int t) const {
    std::vector<Complex> out = backgroundKw(t);
    for (Complex& s : out) s /= network_.baseKva();
    return out;
}

int ScenarioData::tazWindow(std::size_t taz) const {
    int w = 0;
    for (std::size_t e : tazEvs_[taz]) w = std::max(w, evSteps_[e]);
    return w;
}

}  // namespace evac
