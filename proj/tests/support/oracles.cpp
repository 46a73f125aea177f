#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evac::testing {
namespace {

constexpr double kEps = 1e-10;

struct Tableau {
    std::vector<std::vector<double>> a;  // m rows, columns 0..n-1 plus rhs at n
    std::vector<std::size_t> basis;
    std::size_t cols = 0;

    void pivot(std::size_t row, std::size_t col) {
        const double piv = a[row][col];
        for (double& v : a[row]) v /= piv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row) continue;
            const double f = a[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) a[i][j] -= f * a[row][j];
        }
        basis[row] = col;
    }

    double objective(const std::vector<double>& c) const {
        double z = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) z += c[basis[i]] * a[i][cols];
        return z;
    }

    // Minimizes c over the current basis with Bland's rule. Returns false when unbounded.
    bool run(const std::vector<double>& c, const std::vector<bool>& allowed) {
        for (int guard = 0; guard < 100000; ++guard) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols && enter == cols; ++j) {
                if (!allowed[j]) continue;
                double r = c[j];
                for (std::size_t i = 0; i < a.size(); ++i) r -= c[basis[i]] * a[i][j];
                if (r < -1e-9) enter = j;
            }
            if (enter == cols) return true;
            std::size_t leave = a.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i][enter] <= kEps) continue;
                const double ratio = a[i][cols] / a[i][enter];
                if (leave == a.size() || ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == a.size()) return false;
            pivot(leave, enter);
        }
        throw std::runtime_error("tableau simplex: iteration guard hit");
    }
};

}  // namespace

OracleLp tableauSimplex(const mp::Program& p) {
    std::vector<double> lo, up;
    for (const auto& v : p.variables()) {
        lo.push_back(v.lower);
        up.push_back(v.upper);
    }
    return tableauSimplex(p, lo, up);
}

OracleLp tableauSimplex(const mp::Program& p, std::span<const double> lower, std::span<const double> upper) {
    const std::size_t n = p.variables().size();
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lower[j])) throw std::invalid_argument("tableau simplex needs finite lower bounds");
        if (upper[j] < lower[j]) return {};
    }

    // Rows in y = x - lower >= 0: coefficients, relation, rhs.
    struct Row {
        std::vector<double> coef;
        mp::Relation rel;
        double rhs;
    };
    std::vector<Row> rows;
    for (const auto& c : p.constraints()) {
        Row r{std::vector<double>(n, 0.0), c.rel, c.rhs};
        for (const auto& t : c.terms) {
            r.coef[t.var] += t.coef;
            r.rhs -= t.coef * lower[t.var];
        }
        rows.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(upper[j])) continue;
        Row r{std::vector<double>(n, 0.0), mp::Relation::le, upper[j] - lower[j]};
        r.coef[j] = 1.0;
        rows.push_back(std::move(r));
    }
    for (Row& r : rows) {
        if (r.rhs >= 0.0) continue;
        for (double& v : r.coef) v = -v;
        r.rhs = -r.rhs;
        if (r.rel == mp::Relation::le) {
            r.rel = mp::Relation::ge;
        } else if (r.rel == mp::Relation::ge) {
            r.rel = mp::Relation::le;
        }
    }

    const std::size_t m = rows.size();
    std::size_t slacks = 0, artificials = 0;
    for (const Row& r : rows) {
        if (r.rel != mp::Relation::eq) ++slacks;
        if (r.rel != mp::Relation::le) ++artificials;
    }
    Tableau tab;
    tab.cols = n + slacks + artificials;
    tab.a.assign(m, std::vector<double>(tab.cols + 1, 0.0));
    tab.basis.assign(m, 0);
    std::vector<bool> isArtificial(tab.cols, false);
    std::size_t s = n, art = n + slacks;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab.a[i][j] = rows[i].coef[j];
        tab.a[i][tab.cols] = rows[i].rhs;
        if (rows[i].rel == mp::Relation::le) {
            tab.a[i][s] = 1.0;
            tab.basis[i] = s++;
        } else {
            if (rows[i].rel == mp::Relation::ge) tab.a[i][s++] = -1.0;
            tab.a[i][art] = 1.0;
            isArtificial[art] = true;
            tab.basis[i] = art++;
        }
    }

    std::vector<bool> allowed(tab.cols, true);
    if (artificials > 0) {
        std::vector<double> phase1(tab.cols, 0.0);
        for (std::size_t j = 0; j < tab.cols; ++j) phase1[j] = isArtificial[j] ? 1.0 : 0.0;
        tab.run(phase1, allowed);
        if (tab.objective(phase1) > 1e-9) return {};
        for (std::size_t i = 0; i < m; ++i) {
            if (!isArtificial[tab.basis[i]]) continue;
            for (std::size_t j = 0; j < tab.cols; ++j) {
                if (!isArtificial[j] && std::abs(tab.a[i][j]) > 1e-9) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < tab.cols; ++j) allowed[j] = !isArtificial[j];
    }

    const double sign = p.sense() == mp::ObjSense::maximize ? -1.0 : 1.0;
    std::vector<double> cost(tab.cols, 0.0);
    for (const auto& t : p.objective()) cost[t.var] += sign * t.coef;
    if (!tab.run(cost, allowed)) return OracleLp{OracleStatus::unbounded, 0.0, {}};

    OracleLp out;
    out.status = OracleStatus::optimal;
    out.x.assign(lower.begin(), lower.end());
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] < n) out.x[tab.basis[i]] += tab.a[i][tab.cols];
    }
    out.objective = p.evaluateObjective(out.x);
    return out;
}

OracleLp enumerateMilp(const mp::Program& p) {
    std::vector<std::size_t> bins;
    std::vector<double> lo, up;
    for (std::size_t j = 0; j < p.variables().size(); ++j) {
        const auto& v = p.variables()[j];
        lo.push_back(v.lower);
        up.push_back(v.upper);
        if (v.kind == mp::VarKind::binary) bins.push_back(j);
    }
    if (bins.size() > 20) throw std::invalid_argument("enumerateMilp: too many binaries");
    const bool maximize = p.sense() == mp::ObjSense::maximize;
    OracleLp best;
    for (std::size_t mask = 0; mask < (std::size_t{1} << bins.size()); ++mask) {
        bool skip = false;
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const double v = static_cast<double>((mask >> b) & 1u);
            if (v < p.variables()[bins[b]].lower || v > p.variables()[bins[b]].upper) skip = true;
            lo[bins[b]] = up[bins[b]] = v;
        }
        if (skip) continue;
        OracleLp r = tableauSimplex(p, lo, up);
        if (r.status == OracleStatus::unbounded) return r;
        if (r.status != OracleStatus::optimal) continue;
        if (best.status != OracleStatus::optimal ||
            (maximize ? r.objective > best.objective : r.objective < best.objective)) {
            best = std::move(r);
        }
    }
    return best;
}

double twoBusSquaredVoltage(double r, double x, double p, double q, double v0sq) {
    const double b = v0sq - 2.0 * (p * r + q * x);
    const double c = (p * p + q * q) * (r * r + x * x);
    return (b + std::sqrt(b * b - 4.0 * c)) / 2.0;
}

std::string scheduleInvariantBreach(const ScenarioData& sc, const ChargeSchedule& s) {
    const int T = sc.horizon();
    const double beta = sc.beta();
    auto runs = [&](const std::vector<std::uint8_t>& flags) {
        int count = 0;
        for (int t = 0; t < T; ++t) {
            if (flags[static_cast<std::size_t>(t)] && (t == 0 || !flags[static_cast<std::size_t>(t - 1)])) ++count;
        }
        return count;
    };
    if (s.horizon != T || s.tazCharging.size() != sc.tazs().size() || s.evCharging.size() != sc.evs().size()) {
        return "dimensions";
    }
    for (std::size_t k = 0; k < sc.tazs().size(); ++k) {
        if (runs(s.tazCharging[k]) > 1) return "TAZ " + sc.tazs()[k].id + " window is not contiguous";
    }
    for (std::size_t h = 0; h < sc.evs().size(); ++h) {
        const Ev& ev = sc.evs()[h];
        const std::size_t k = sc.evTaz(h);
        const auto& b = s.battery[h];
        if (b.size() != static_cast<std::size_t>(T + 1)) return "EV " + ev.id + " battery length";
        if (std::abs(b[0] - ev.soc0) > 1e-12 || std::abs(b[1] - ev.soc0) > 1e-12) return "EV " + ev.id + " initial charge";
        // L^t = L^{t-1} + C^{t-1} / beta: charging in a step shows up in the next step's level.
        for (int t = 1; t <= T; ++t) {
            const auto i = static_cast<std::size_t>(t);
            const double expected = t == 1 ? ev.soc0 : b[i - 1] + s.evCharging[h][i - 2] / beta;
            if (std::abs(b[i] - expected) > 1e-9) return "EV " + ev.id + " battery recursion at t=" + std::to_string(t);
            if (b[i] > 1.0 + 1e-9) return "EV " + ev.id + " overcharged at t=" + std::to_string(t);
            if (s.evCharging[h][i - 1] && !s.tazCharging[k][i - 1]) {
                return "EV " + ev.id + " charges while its TAZ is idle at t=" + std::to_string(t);
            }
        }
        if (b[static_cast<std::size_t>(sc.tazs()[k].departure)] < 1.0 - 1e-9) return "EV " + ev.id + " not full by departure";
    }
    return {};
}

}  // namespace evac::testing
