#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/hashing.hpp"
#include "evac/netmodel.hpp"

namespace evac {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw InputError(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + "." + key + " is required");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw InputError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InputError(where + " must be finite");
    return v;
}

std::string string(const json& j, const std::string& where) {
    if (!j.is_string()) throw InputError(where + " must be a string");
    return j.get<std::string>();
}

PhaseSet phases(const json& j, const std::string& where) {
    if (j.is_string()) return PhaseSet::fromString(j.get<std::string>());
    if (j.is_array()) {
        std::string s;
        for (const auto& p : j) s += string(p, where + "[]");
        return PhaseSet::fromString(s);
    }
    throw InputError(where + " must be a phase string like \"abc\" or an array of phases");
}

Complex complexPair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw InputError(where + " must be a [real, imag] pair");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

}  // namespace

NetworkModel parseNetworkJson(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("network.json: malformed JSON: ") + e.what());
    }
    const std::string root = "network";
    const double baseKv = number(field(doc, "base_kv", root), "base_kv");
    const double baseKva = number(field(doc, "base_kva", root), "base_kva");

    const json& src = field(doc, "source", root);
    const std::string sourceBus = string(field(src, "bus", "source"), "source.bus");
    auto voltage = balancedSourceVoltage();
    if (src.contains("voltage_pu")) {
        const json& vs = src["voltage_pu"];
        if (!vs.is_array()) throw InputError("source.voltage_pu must be an array");
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const std::string w = "source.voltage_pu[" + std::to_string(i) + "]";
            const Phase p = parsePhase(string(field(vs[i], "phase", w), w + ".phase"));
            const double mag = number(field(vs[i], "mag", w), w + ".mag");
            const double ang = number(field(vs[i], "angle_deg", w), w + ".angle_deg");
            voltage[static_cast<int>(p)] = std::polar(mag, ang * std::numbers::pi / 180.0);
        }
    }

    const json& jb = field(doc, "buses", root);
    if (!jb.is_array()) throw InputError("buses must be an array");
    std::vector<Bus> buses;
    for (std::size_t i = 0; i < jb.size(); ++i) {
        const std::string w = "buses[" + std::to_string(i) + "]";
        buses.push_back(Bus{string(field(jb[i], "id", w), w + ".id"), phases(field(jb[i], "phases", w), w + ".phases")});
    }

    const json& jl = field(doc, "lines", root);
    if (!jl.is_array()) throw InputError("lines must be an array");
    std::vector<Line> lines;
    for (std::size_t k = 0; k < jl.size(); ++k) {
        const std::string w = "lines[" + std::to_string(k) + "]";
        Line ln;
        ln.from = string(field(jl[k], "from", w), w + ".from");
        ln.to = string(field(jl[k], "to", w), w + ".to");
        ln.phases = phases(field(jl[k], "phases", w), w + ".phases");
        const json& zr = field(jl[k], "z_pu", w);
        const auto n = static_cast<std::size_t>(ln.phases.size());
        if (!zr.is_array() || zr.size() != n) {
            throw InputError(w + ".z_pu must be a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (!zr[r].is_array() || zr[r].size() != n) {
                throw InputError(w + ".z_pu[" + std::to_string(r) + "] must have " + std::to_string(n) + " entries");
            }
            for (std::size_t c = 0; c < n; ++c) {
                ln.z.push_back(complexPair(zr[r][c], w + ".z_pu[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
            }
        }
        lines.push_back(std::move(ln));
    }
    return NetworkModel(std::move(buses), std::move(lines), sourceBus, voltage, baseKv, baseKva);
}

NetworkModel parseNetwork(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InputError("network file not found: " + path.string());
    return parseNetworkJson(readTextFile(path));
}

std::string networkToJson(const NetworkModel& net) {
    json doc;
    doc["base_kv"] = net.baseKv();
    doc["base_kva"] = net.baseKva();
    // Polar form drifts by an ulp per conversion; rounding keeps repeated round trips stable.
    auto settle = [](double v) { return std::round(v * 1e12) / 1e12; };
    json volts = json::array();
    for (Phase p : net.bus(net.sourceIndex()).phases.list()) {
        const Complex v = net.sourceVoltage()[static_cast<int>(p)];
        volts.push_back({{"phase", std::string(1, phaseChar(p))},
                         {"mag", settle(std::abs(v))},
                         {"angle_deg", settle(std::arg(v) * 180.0 / std::numbers::pi)}});
    }
    doc["source"] = {{"bus", net.sourceBus()}, {"voltage_pu", volts}};
    json buses = json::array();
    for (const Bus& b : net.buses()) buses.push_back({{"id", b.id}, {"phases", b.phases.str()}});
    doc["buses"] = buses;
    json lines = json::array();
    for (const Line& ln : net.lines()) {
        const int n = ln.phases.size();
        json z = json::array();
        for (int r = 0; r < n; ++r) {
            json row = json::array();
            for (int c = 0; c < n; ++c) row.push_back({ln.impedance(r, c).real(), ln.impedance(r, c).imag()});
            z.push_back(row);
        }
        lines.push_back({{"from", ln.from}, {"to", ln.to}, {"phases", ln.phases.str()}, {"z_pu", z}});
    }
    doc["lines"] = lines;
    return doc.dump(2) + "\n";
}

ScenarioConfig parseConfig(const std::filesystem::path& path) {
    ScenarioConfig cfg;
    if (path.empty()) return cfg;
    json doc;
    try {
        doc = json::parse(readTextFile(path));
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw InputError(path.string() + ": config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        const std::string w = "config." + key;
        if (key == "T") {
            cfg.horizon = static_cast<int>(number(value, w));
            if (cfg.horizon != number(value, w)) throw InputError(w + " must be an integer");
        } else if (key == "beta") {
            cfg.beta = static_cast<int>(number(value, w));
            if (cfg.beta != number(value, w)) throw InputError(w + " must be an integer");
        } else if (key == "rate_kw") {
            cfg.rateKw = number(value, w);
        } else if (key == "v_max_pu2") {
            cfg.vMax = number(value, w);
        } else if (key == "v_min_pu2") {
            cfg.vMin = number(value, w);
        } else if (key == "lambda_max") {
            cfg.lambdaMax = number(value, w);
        } else if (key == "provenance") {
            continue;
        } else {
            throw InputError(w + " is not a recognized setting");
        }
    }
    return cfg;
}

std::string configToJson(const ScenarioConfig& c) {
    json doc{{"T", c.horizon},          {"beta", c.beta},           {"rate_kw", c.rateKw},
             {"v_max_pu2", c.vMax},     {"v_min_pu2", c.vMin},     {"lambda_max", c.lambdaMax}};
    return doc.dump(2) + "\n";
}

std::vector<std::vector<Complex>> parseLoads(const NetworkModel& net, const std::filesystem::path& loadsPath, int horizon) {
    std::vector<std::vector<Complex>> background(static_cast<std::size_t>(horizon),
                                                 std::vector<Complex>(net.nodes().size()));
    std::vector<std::vector<bool>> seen(background.size(), std::vector<bool>(net.nodes().size(), false));
    const CsvTable loads = readCsv(loadsPath, {"node", "t", "p_kw", "q_kvar"});
    for (std::size_t r = 0; r < loads.rows.size(); ++r) {
        const auto& row = loads.rows[r];
        const std::string where = loadsPath.string() + ":" + std::to_string(loads.lineNumbers[r]);
        const NodeId node = NodeId::parse(row[0]);
        const auto idx = net.nodeIndex(node);
        if (!idx) throw InputError(where + ": unknown node '" + row[0] + "'");
        const auto t = parseInt(row[1], where + " t");
        if (t < 1 || t > horizon) throw InputError(where + ": t=" + row[1] + " outside 1..T");
        const auto ti = static_cast<std::size_t>(t - 1);
        if (seen[ti][*idx]) throw InputError(where + ": duplicate load entry for " + row[0] + " at t=" + row[1]);
        seen[ti][*idx] = true;
        background[ti][*idx] = Complex(parseDouble(row[2], where + " p_kw"), parseDouble(row[3], where + " q_kvar"));
    }
    return background;
}

ScenarioData parseScenario(const NetworkModel& net, const std::filesystem::path& loadsPath,
                           const std::filesystem::path& evsPath, const std::filesystem::path& tazsPath,
                           const std::filesystem::path& configPath) {
    const ScenarioConfig cfg = parseConfig(configPath);
    if (cfg.horizon < 1) throw InputError("config.T must be >= 1");

    auto background = parseLoads(net, loadsPath, cfg.horizon);

    std::vector<Taz> tazs;
    const CsvTable tz = readCsv(tazsPath, {"taz_id", "departure_t"});
    for (std::size_t r = 0; r < tz.rows.size(); ++r) {
        const std::string where = tazsPath.string() + ":" + std::to_string(tz.lineNumbers[r]);
        tazs.push_back(Taz{tz.rows[r][0], static_cast<int>(parseInt(tz.rows[r][1], where + " departure_t"))});
    }

    std::vector<Ev> evs;
    const CsvTable ev = readCsv(evsPath, {"ev_id", "taz_id", "node", "soc0"});
    for (std::size_t r = 0; r < ev.rows.size(); ++r) {
        const std::string where = evsPath.string() + ":" + std::to_string(ev.lineNumbers[r]);
        const auto& row = ev.rows[r];
        evs.push_back(Ev{row[0], row[1], NodeId::parse(row[2]), parseDouble(row[3], where + " soc0")});
    }
    return ScenarioData(net, cfg, std::move(background), std::move(tazs), std::move(evs));
}

ScenarioData loadScenario(const ScenarioPaths& paths) {
    return parseScenario(parseNetwork(paths.network), paths.loads, paths.evs, paths.tazs, paths.config);
}

std::string loadsToCsv(const ScenarioData& s) {
    std::ostringstream out;
    out << "node,t,p_kw,q_kvar\n";
    const auto& nodes = s.network().nodes();
    for (int t = 1; t <= s.horizon(); ++t) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Complex load = s.backgroundKw(t, i);
            if (load == Complex(0.0, 0.0)) continue;
            out << nodes[i].str() << ',' << t << ',' << formatExact(load.real()) << ',' << formatExact(load.imag()) << '\n';
        }
    }
    return out.str();
}

std::string evsToCsv(const ScenarioData& s) {
    std::ostringstream out;
    out << "ev_id,taz_id,node,soc0\n";
    for (const Ev& ev : s.evs()) out << ev.id << ',' << ev.taz << ',' << ev.node.str() << ',' << formatExact(ev.soc0) << '\n';
    return out.str();
}

std::string tazsToCsv(const ScenarioData& s) {
    std::ostringstream out;
    out << "taz_id,departure_t\n";
    for (const Taz& z : s.tazs()) out << z.id << ',' << z.departure << '\n';
    return out.str();
}

ScenarioPaths writeScenario(const ScenarioData& scenario, const std::filesystem::path& dir, const Provenance* prov) {
    std::filesystem::create_directories(dir);
    ScenarioPaths p{dir / "network.json", dir / "loads.csv", dir / "evs.csv", dir / "tazs.csv", dir / "config.json"};
    const std::string header = prov ? prov->csvHeader() : std::string();
    auto stamped = [&](const std::string& text) {
        if (!prov) return text;
        json doc = json::parse(text);
        doc["provenance"] = json::parse(prov->json());
        return doc.dump(2) + "\n";
    };
    writeTextFile(p.network, stamped(networkToJson(scenario.network())));
    writeTextFile(p.loads, header + loadsToCsv(scenario));
    writeTextFile(p.evs, header + evsToCsv(scenario));
    writeTextFile(p.tazs, header + tazsToCsv(scenario));
    writeTextFile(p.config, stamped(configToJson(scenario.config())));
    return p;
}

std::string scenarioHash(const ScenarioData& s) {
    return sha256Hex(networkToJson(s.network()) + loadsToCsv(s) + evsToCsv(s) + tazsToCsv(s) + configToJson(s.config()));
}

}  // namespace evac
