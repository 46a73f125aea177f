#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/mathprog.hpp"

namespace evac::mp {
namespace {

constexpr const char* kObjectiveRow = "OBJ";

std::string shortColumnName(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "X%07zu", j + 1);
    return buf;
}

std::string shortRowName(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "R%07zu", i + 1);
    return buf;
}

// Numeric field of at most 12 characters.
std::string mpsNumber(double v) {
    for (int digits = 12; digits >= 1; --digits) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
        if (std::string(buf).size() <= 12) return buf;
    }
    throw InputError("MPS: value does not fit a fixed-format field");
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

// Fixed-format record: field 1 in columns 2-3, field 2 in 5-12, field 3 in 15-22, field 4 in 25-36,
// field 5 in 40-47, field 6 in 50-61.
std::string record(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                   const std::string& f4 = {}, const std::string& f5 = {}, const std::string& f6 = {}) {
    std::string line = " " + pad(f1, 2) + " " + pad(f2, 8);
    if (!f3.empty() || !f4.empty()) line += "  " + pad(f3, 8);
    if (!f4.empty()) line += "  " + pad(f4, 12);
    if (!f5.empty()) line += "   " + pad(f5, 8) + "  " + pad(f6, 12);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line;
}

bool needsNameMapping(const Program& p) {
    auto bad = [](const std::string& n) {
        return n.size() > 8 || n.find_first_of(" \t") != std::string::npos || n == kObjectiveRow;
    };
    for (const auto& v : p.variables()) {
        if (bad(v.name)) return true;
    }
    for (const auto& c : p.constraints()) {
        if (bad(c.name)) return true;
    }
    return false;
}

std::vector<std::string> splitWords(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string w; ss >> w;) out.push_back(w);
    return out;
}

}  // namespace

void exportMps(const Program& p, const std::filesystem::path& path) {
    const bool mapped = needsNameMapping(p);
    std::vector<std::string> colName, rowName;
    for (std::size_t j = 0; j < p.variables().size(); ++j) colName.push_back(mapped ? shortColumnName(j) : p.variables()[j].name);
    for (std::size_t i = 0; i < p.constraints().size(); ++i) rowName.push_back(mapped ? shortRowName(i) : p.constraints()[i].name);

    std::ostringstream out;
    out << "NAME          EVAC\n";
    out << "OBJSENSE\n    " << (p.sense() == ObjSense::maximize ? "MAX" : "MIN") << "\n";
    out << "ROWS\n";
    out << record("N", kObjectiveRow) << "\n";
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        const char* type = "L";
        if (p.constraints()[i].rel == Relation::ge) type = "G";
        if (p.constraints()[i].rel == Relation::eq) type = "E";
        out << record(type, rowName[i]) << "\n";
    }

    // Column-major coefficient lists, duplicates summed.
    std::vector<std::map<std::size_t, double>> entries(p.variables().size());
    std::vector<double> objCoef(p.variables().size(), 0.0);
    for (const Term& t : p.objective()) objCoef[t.var] += t.coef;
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        for (const Term& t : p.constraints()[i].terms) entries[t.var][i] += t.coef;
    }
    out << "COLUMNS\n";
    for (std::size_t j = 0; j < p.variables().size(); ++j) {
        std::vector<std::pair<std::string, double>> cells;
        if (objCoef[j] != 0.0) cells.emplace_back(kObjectiveRow, objCoef[j]);
        for (const auto& [row, coef] : entries[j]) {
            if (coef != 0.0) cells.emplace_back(rowName[row], coef);
        }
        if (cells.empty()) cells.emplace_back(kObjectiveRow, 0.0);
        for (std::size_t k = 0; k < cells.size(); k += 2) {
            if (k + 1 < cells.size()) {
                out << record("", colName[j], cells[k].first, mpsNumber(cells[k].second), cells[k + 1].first,
                              mpsNumber(cells[k + 1].second))
                    << "\n";
            } else {
                out << record("", colName[j], cells[k].first, mpsNumber(cells[k].second)) << "\n";
            }
        }
    }

    out << "RHS\n";
    if (p.objectiveConstant() != 0.0) out << record("", "RHS", kObjectiveRow, mpsNumber(-p.objectiveConstant())) << "\n";
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        if (p.constraints()[i].rhs != 0.0) out << record("", "RHS", rowName[i], mpsNumber(p.constraints()[i].rhs)) << "\n";
    }

    out << "BOUNDS\n";
    for (std::size_t j = 0; j < p.variables().size(); ++j) {
        const Variable& v = p.variables()[j];
        if (v.kind == VarKind::binary) {
            out << record("BV", "BND", colName[j]) << "\n";
            if (v.lower > 0.0) out << record("LO", "BND", colName[j], mpsNumber(v.lower)) << "\n";
            if (v.upper < 1.0) out << record("UP", "BND", colName[j], mpsNumber(v.upper)) << "\n";
            continue;
        }
        const bool loInf = !std::isfinite(v.lower);
        const bool upInf = !std::isfinite(v.upper);
        if (loInf && upInf) {
            out << record("FR", "BND", colName[j]) << "\n";
        } else if (!loInf && !upInf && v.lower == v.upper) {
            out << record("FX", "BND", colName[j], mpsNumber(v.lower)) << "\n";
        } else {
            if (loInf) out << record("MI", "BND", colName[j]) << "\n";
            else if (v.lower != 0.0) out << record("LO", "BND", colName[j], mpsNumber(v.lower)) << "\n";
            if (!upInf) out << record("UP", "BND", colName[j], mpsNumber(v.upper)) << "\n";
        }
    }
    out << "ENDATA\n";
    writeTextFile(path, out.str());

    const std::filesystem::path sidecar = path.string() + ".names";
    if (mapped) {
        std::ostringstream names;
        for (std::size_t j = 0; j < colName.size(); ++j) names << colName[j] << ' ' << p.variables()[j].name << '\n';
        for (std::size_t i = 0; i < rowName.size(); ++i) names << rowName[i] << ' ' << p.constraints()[i].name << '\n';
        writeTextFile(sidecar, names.str());
    } else if (std::filesystem::exists(sidecar)) {
        std::filesystem::remove(sidecar);
    }
}

Program importMps(const std::filesystem::path& path) {
    std::map<std::string, std::string> longName;
    const std::filesystem::path sidecar = path.string() + ".names";
    if (std::filesystem::exists(sidecar)) {
        std::istringstream in(readTextFile(sidecar));
        for (std::string s, l; in >> s >> l;) longName[s] = l;
    }
    auto resolve = [&](const std::string& n) {
        const auto it = longName.find(n);
        return it == longName.end() ? n : it->second;
    };

    struct RowData {
        std::string name;
        Relation rel;
        std::vector<Term> terms;
        double rhs = 0.0;
    };
    std::vector<RowData> rows;
    std::map<std::string, std::size_t> rowIdx;
    std::string objRow;
    ObjSense sense = ObjSense::minimize;
    std::vector<Variable> vars;
    std::map<std::string, std::size_t> varIdx;
    std::vector<Term> objective;
    double objConstant = 0.0;
    bool intMarker = false;

    auto varOf = [&](const std::string& n) -> std::size_t {
        const auto it = varIdx.find(n);
        if (it != varIdx.end()) return it->second;
        vars.push_back(Variable{resolve(n), intMarker ? VarKind::binary : VarKind::continuous, 0.0,
                                intMarker ? 1.0 : kInf});
        varIdx[n] = vars.size() - 1;
        return vars.size() - 1;
    };

    std::istringstream in(readTextFile(path));
    std::string section;
    int lineNo = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        const auto w = splitWords(line);
        if (w.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineNo);
        if (line[0] != ' ' && line[0] != '\t') {
            section = w[0];
            if (section == "OBJSENSE" && w.size() > 1) sense = (w[1] == "MAX" || w[1] == "MAXIMIZE") ? ObjSense::maximize : ObjSense::minimize;
            if (section == "ENDATA") break;
            continue;
        }
        if (section == "OBJSENSE") {
            sense = (w[0] == "MAX" || w[0] == "MAXIMIZE") ? ObjSense::maximize : ObjSense::minimize;
        } else if (section == "ROWS") {
            if (w.size() != 2) throw InputError(where + ": malformed ROWS record");
            if (w[0] == "N") {
                if (objRow.empty()) objRow = w[1];
                continue;
            }
            Relation rel = Relation::le;
            if (w[0] == "G") rel = Relation::ge;
            else if (w[0] == "E") rel = Relation::eq;
            else if (w[0] != "L") throw InputError(where + ": unknown row type " + w[0]);
            rowIdx[w[1]] = rows.size();
            rows.push_back(RowData{resolve(w[1]), rel, {}, 0.0});
        } else if (section == "COLUMNS") {
            if (w.size() >= 3 && w[1] == "'MARKER'") {
                intMarker = (w[2] == "'INTORG'");
                continue;
            }
            if (w.size() != 3 && w.size() != 5) throw InputError(where + ": malformed COLUMNS record");
            const std::size_t j = varOf(w[0]);
            for (std::size_t k = 1; k + 1 < w.size(); k += 2) {
                const double v = parseDouble(w[k + 1], where);
                if (w[k] == objRow) {
                    if (v != 0.0) objective.push_back(Term{j, v});
                } else {
                    const auto it = rowIdx.find(w[k]);
                    if (it == rowIdx.end()) throw InputError(where + ": unknown row " + w[k]);
                    rows[it->second].terms.push_back(Term{j, v});
                }
            }
        } else if (section == "RHS") {
            if (w.size() != 3 && w.size() != 5) throw InputError(where + ": malformed RHS record");
            for (std::size_t k = 1; k + 1 < w.size(); k += 2) {
                const double v = parseDouble(w[k + 1], where);
                if (w[k] == objRow) {
                    objConstant = -v;
                    continue;
                }
                const auto it = rowIdx.find(w[k]);
                if (it == rowIdx.end()) throw InputError(where + ": unknown row " + w[k]);
                rows[it->second].rhs = v;
            }
        } else if (section == "BOUNDS") {
            if (w.size() < 3) throw InputError(where + ": malformed BOUNDS record");
            const auto it = varIdx.find(w[2]);
            if (it == varIdx.end()) throw InputError(where + ": unknown column " + w[2]);
            Variable& v = vars[it->second];
            const std::string& type = w[0];
            auto val = [&] {
                if (w.size() < 4) throw InputError(where + ": bound value missing");
                return parseDouble(w[3], where);
            };
            if (type == "UP") v.upper = val();
            else if (type == "LO") v.lower = val();
            else if (type == "FX") v.lower = v.upper = val();
            else if (type == "FR") { v.lower = -kInf; v.upper = kInf; }
            else if (type == "MI") v.lower = -kInf;
            else if (type == "PL") v.upper = kInf;
            else if (type == "BV") { v.kind = VarKind::binary; v.lower = 0.0; v.upper = 1.0; }
            else throw InputError(where + ": unsupported bound type " + type);
        } else if (section == "NAME" || section == "RANGES") {
            if (section == "RANGES") throw InputError(where + ": RANGES section is not supported");
        } else {
            throw InputError(where + ": record outside a known section");
        }
    }

    Program p;
    for (const Variable& v : vars) p.addVariable(v.name, v.kind, v.lower, v.upper);
    for (RowData& r : rows) p.addConstraint(r.name, std::move(r.terms), r.rel, r.rhs);
    p.setObjective(sense, std::move(objective), objConstant);
    return p;
}

Solution importSolution(const Program& p, const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InputError("solution file not found: " + path.string());
    Solution s;
    s.values.assign(p.variables().size(), 0.0);
    std::istringstream in(readTextFile(path));
    int lineNo = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineNo;
        const auto w = splitWords(line);
        if (w.empty() || w[0][0] == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(lineNo);
        if (w.size() != 2) throw InputError(where + ": malformed solution line (expected '<name> <value>')");
        auto idx = p.findVariable(w[0]);
        if (!idx && w[0].size() == 8 && w[0][0] == 'X') {
            const long long k = std::atoll(w[0].c_str() + 1);
            if (k >= 1 && static_cast<std::size_t>(k) <= p.variables().size() && shortColumnName(static_cast<std::size_t>(k - 1)) == w[0]) {
                idx = static_cast<std::size_t>(k - 1);
            }
        }
        if (!idx) throw InputError(where + ": unknown variable '" + w[0] + "'");
        s.values[*idx] = parseDouble(w[1], where);
    }
    s.status = Status::optimal;
    s.objective = p.evaluateObjective(s.values);
    s.bound = s.objective;
    return s;
}

void writeSolution(const Program& p, const Solution& s, const std::filesystem::path& path) {
    if (!s.hasIncumbent()) throw SolverError("writeSolution: solution has no values");
    std::ostringstream out;
    for (std::size_t j = 0; j < p.variables().size(); ++j) out << p.variables()[j].name << ' ' << formatExact(s.values[j]) << '\n';
    writeTextFile(path, out.str());
}

Solution solveExternal(const Program& p, const std::string& commandTemplate, const std::filesystem::path& workDir) {
    std::filesystem::create_directories(workDir);
    const auto mps = workDir / "eevc.mps";
    const auto sol = workDir / "eevc.sol";
    exportMps(p, mps);
    if (std::filesystem::exists(sol)) std::filesystem::remove(sol);
    std::string cmd = commandTemplate;
    auto substitute = [&](const std::string& key, const std::string& value) {
        for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
            cmd.replace(pos, key.size(), value);
        }
    };
    substitute("{mps}", mps.string());
    substitute("{sol}", sol.string());
    const int rc = std::system(cmd.c_str());
    if (rc != 0) throw SolverError("external solver exited with status " + std::to_string(rc) + ": " + cmd);
    return importSolution(p, sol);
}

}  // namespace evac::mp
