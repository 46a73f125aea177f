#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "evac/errors.hpp"
#include "evac/mathprog.hpp"

namespace evac::mp {
namespace {

enum class State : std::uint8_t { basic, atLower, atUpper, freeZero };

constexpr double kCostTolerance = 1e-9;
constexpr double kTieTolerance = 1e-12;
constexpr double kPhaseOneTolerance = 1e-7;

struct SparseRow {
    std::vector<std::size_t> cols;
    std::vector<double> vals;
};

// Tableau simplex over columns [structurals | slacks | artificials], rows a.x + s = b.
class DenseSimplex {
public:
    DenseSimplex(std::vector<SparseRow> rows, std::vector<double> rhs, std::vector<double> lower,
                 std::vector<double> upper, std::vector<double> cost, std::size_t structurals, const LpOptions& opts)
        : rows_(std::move(rows)),
          rhs_(std::move(rhs)),
          lower_(std::move(lower)),
          upper_(std::move(upper)),
          structCost_(std::move(cost)),
          n_(structurals),
          m_(rows_.size()),
          opts_(opts) {}

    Status run() {
        setup();
        if (artificials_ > 0) {
            setPhaseOneCosts();
            const Status s = iterate();
            if (s == Status::limit) return s;
            refreshBasics();
            double infeasibility = 0.0;
            for (std::size_t c = artStart(); c < cols_; ++c) infeasibility += std::abs(x_[c]);
            if (infeasibility > kPhaseOneTolerance) return Status::infeasible;
            driveOutArtificials();
        }
        setPhaseTwoCosts();
        const Status s = iterate();
        refreshBasics();
        return s;
    }

    double structuralValue(std::size_t j) const { return x_[j]; }
    double rowDual(std::size_t i) const { return -d_[n_ + i]; }
    double reducedCost(std::size_t j) const { return d_[j]; }
    std::size_t iterations() const { return iterations_; }

private:
    std::size_t artStart() const { return n_ + m_; }
    double& tab(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
    double tab(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }

    void setup() {
        // Count artificials first so the tableau is allocated once.
        std::vector<double> xN(n_ + m_, 0.0);
        state_.assign(n_ + m_, State::atLower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lower_[j])) {
                xN[j] = lower_[j];
                state_[j] = State::atLower;
            } else if (std::isfinite(upper_[j])) {
                xN[j] = upper_[j];
                state_[j] = State::atUpper;
            } else {
                xN[j] = 0.0;
                state_[j] = State::freeZero;
            }
        }
        std::vector<double> residual(m_);
        std::vector<int> artSign(m_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            double r = rhs_[i];
            for (std::size_t k = 0; k < rows_[i].cols.size(); ++k) r -= rows_[i].vals[k] * xN[rows_[i].cols[k]];
            residual[i] = r;
            const std::size_t s = n_ + i;
            if (r >= lower_[s] - 1e-12 && r <= upper_[s] + 1e-12) continue;
            const double bound = (r < lower_[s]) ? lower_[s] : upper_[s];
            xN[s] = bound;
            state_[s] = (r < lower_[s]) ? State::atLower : State::atUpper;
            artSign[i] = (r - bound) > 0 ? 1 : -1;
            ++artificials_;
        }
        cols_ = n_ + m_ + artificials_;
        tab_.assign(m_ * cols_, 0.0);
        x_.assign(cols_, 0.0);
        std::copy(xN.begin(), xN.end(), x_.begin());
        state_.resize(cols_, State::basic);
        lower_.resize(cols_, 0.0);
        upper_.resize(cols_, kInf);
        basis_.assign(m_, 0);

        std::size_t art = artStart();
        for (std::size_t i = 0; i < m_; ++i) {
            const double sigma = artSign[i] == 0 ? 1.0 : static_cast<double>(artSign[i]);
            for (std::size_t k = 0; k < rows_[i].cols.size(); ++k) tab(i, rows_[i].cols[k]) += sigma * rows_[i].vals[k];
            tab(i, n_ + i) = sigma;
            if (artSign[i] == 0) {
                basis_[i] = n_ + i;
                state_[n_ + i] = State::basic;
                x_[n_ + i] = residual[i];
            } else {
                tab(i, art) = 1.0;
                basis_[i] = art;
                state_[art] = State::basic;
                x_[art] = std::abs(residual[i] - x_[n_ + i]);
                ++art;
            }
        }
    }

    void computeReducedCosts(const std::vector<double>& cost) {
        d_ = cost;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &tab_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
        }
    }

    void setPhaseOneCosts() {
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t c = artStart(); c < cols_; ++c) cost[c] = 1.0;
        computeReducedCosts(cost);
    }

    void setPhaseTwoCosts() {
        std::vector<double> cost(cols_, 0.0);
        std::copy(structCost_.begin(), structCost_.end(), cost.begin());
        computeReducedCosts(cost);
    }

    void pivot(std::size_t r, std::size_t q) {
        double* prow = &tab_[r * cols_];
        const double inv = 1.0 / prow[q];
        nz_.clear();
        for (std::size_t j = 0; j < cols_; ++j) {
            if (prow[j] == 0.0) continue;
            prow[j] *= inv;
            nz_.push_back(j);
        }
        prow[q] = 1.0;
        // Only the pivot row's nonzero columns change in the other rows.
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &tab_[i * cols_];
            const double f = row[q];
            if (f == 0.0) continue;
            for (std::size_t j : nz_) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double dq = d_[q];
        if (dq != 0.0) {
            for (std::size_t j : nz_) d_[j] -= dq * prow[j];
            d_[q] = 0.0;
        }
        basis_[r] = q;
    }

    Status iterate() {
        std::size_t degenerate = 0;
        bool bland = false;
        while (true) {
            if (iterations_ >= opts_.maxIterations) return Status::limit;

            std::size_t q = cols_;
            int dir = 0;
            double best = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                const State st = state_[j];
                if (st == State::basic || lower_[j] == upper_[j]) continue;
                const double dj = d_[j];
                int cand = 0;
                if ((st == State::atLower || st == State::freeZero) && dj < -kCostTolerance) cand = 1;
                else if ((st == State::atUpper || st == State::freeZero) && dj > kCostTolerance) cand = -1;
                if (cand == 0) continue;
                if (bland) {
                    q = j;
                    dir = cand;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    q = j;
                    dir = cand;
                }
            }
            if (q == cols_) return Status::optimal;

            double theta = (std::isfinite(lower_[q]) && std::isfinite(upper_[q])) ? upper_[q] - lower_[q] : kInf;
            std::size_t leave = m_;
            double leaveAlpha = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = dir * tab(i, q);
                if (std::abs(alpha) <= opts_.pivotTolerance) continue;
                const std::size_t b = basis_[i];
                double ratio;
                if (alpha > 0.0) {
                    if (!std::isfinite(lower_[b])) continue;
                    ratio = (x_[b] - lower_[b]) / alpha;
                } else {
                    if (!std::isfinite(upper_[b])) continue;
                    ratio = (upper_[b] - x_[b]) / -alpha;
                }
                ratio = std::max(ratio, 0.0);
                bool take = false;
                if (ratio < theta - kTieTolerance) {
                    take = true;
                } else if (ratio <= theta + kTieTolerance && leave != m_) {
                    take = bland ? (b < basis_[leave]) : (std::abs(alpha) > std::abs(leaveAlpha));
                }
                if (take) {
                    theta = ratio;
                    leave = i;
                    leaveAlpha = alpha;
                }
            }
            if (!std::isfinite(theta)) return Status::unbounded;

            ++iterations_;
            if (theta <= kTieTolerance) {
                if (++degenerate >= opts_.degenerateSwitch) bland = true;
            } else {
                degenerate = 0;
                bland = false;
            }

            x_[q] += dir * theta;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = tab(i, q);
                if (a != 0.0) x_[basis_[i]] -= dir * theta * a;
            }

            if (leave == m_) {
                // Entering variable hits its own opposite bound.
                if (dir > 0) {
                    x_[q] = upper_[q];
                    state_[q] = State::atUpper;
                } else {
                    x_[q] = lower_[q];
                    state_[q] = State::atLower;
                }
                continue;
            }
            const std::size_t out = basis_[leave];
            if (leaveAlpha > 0.0) {
                x_[out] = lower_[out];
                state_[out] = State::atLower;
            } else {
                x_[out] = upper_[out];
                state_[out] = State::atUpper;
            }
            state_[q] = State::basic;
            pivot(leave, q);
        }
    }

    void driveOutArtificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < artStart()) continue;
            std::size_t q = cols_;
            double best = 1e-9;
            for (std::size_t j = 0; j < artStart(); ++j) {
                if (state_[j] == State::basic) continue;
                if (std::abs(tab(i, j)) > best) {
                    best = std::abs(tab(i, j));
                    q = j;
                }
            }
            if (q == cols_) continue;  // redundant row; artificial stays basic at zero
            const std::size_t out = basis_[i];
            x_[out] = 0.0;
            state_[out] = State::atLower;
            state_[q] = State::basic;
            pivot(i, q);
        }
        for (std::size_t c = artStart(); c < cols_; ++c) {
            lower_[c] = 0.0;
            upper_[c] = 0.0;
            if (state_[c] != State::basic) x_[c] = 0.0;
        }
    }

    // x_B = B^-1 (b - N x_N); B^-1 sits in the slack columns of the tableau.
    void refreshBasics() {
        std::vector<double> r(rhs_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t k = 0; k < rows_[i].cols.size(); ++k) {
                const std::size_t j = rows_[i].cols[k];
                if (state_[j] != State::basic) r[i] -= rows_[i].vals[k] * x_[j];
            }
            if (state_[n_ + i] != State::basic) r[i] -= x_[n_ + i];
        }
        // Nonbasic artificials are at zero; basic ones are recovered by the solve below.
        std::vector<double> xb(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < m_; ++k) v += tab(i, n_ + k) * r[k];
            xb[i] = v;
        }
        for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
    }

    std::vector<SparseRow> rows_;
    std::vector<double> rhs_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> structCost_;
    std::size_t n_;
    std::size_t m_;
    LpOptions opts_;

    std::size_t artificials_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> tab_;
    std::vector<double> x_;
    std::vector<double> d_;
    std::vector<State> state_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nz_;
    std::size_t iterations_ = 0;
};

}  // namespace

Solution solveLp(const Program& p, const LpOptions& options) {
    std::vector<double> lo, hi;
    for (const Variable& v : p.variables()) {
        lo.push_back(v.lower);
        hi.push_back(v.upper);
    }
    return solveLp(p, lo, hi, options);
}

Solution solveLp(const Program& p, std::span<const double> lower, std::span<const double> upper,
                 const LpOptions& options) {
    const auto& vars = p.variables();
    const std::size_t n = vars.size();
    if (lower.size() != n || upper.size() != n) throw InputError("solveLp: bound vectors do not match variables");

    Solution sol;
    for (std::size_t j = 0; j < n; ++j) {
        if (lower[j] > upper[j] + 1e-12) {
            sol.status = Status::infeasible;
            sol.diagnostics = "variable '" + vars[j].name + "' has lower bound above upper bound";
            return sol;
        }
    }

    // Fixed variables are substituted out.
    std::vector<long> colOf(n, -1);
    std::vector<double> fixedValue(n, 0.0);
    std::vector<double> lo, hi;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < n; ++j) {
        if (upper[j] - lower[j] <= 1e-12) {
            fixedValue[j] = lower[j];
        } else {
            colOf[j] = static_cast<long>(kept.size());
            kept.push_back(j);
            lo.push_back(lower[j]);
            hi.push_back(upper[j]);
        }
    }
    const double sign = p.sense() == ObjSense::maximize ? -1.0 : 1.0;
    std::vector<double> cost(kept.size(), 0.0);
    for (const Term& t : p.objective()) {
        if (colOf[t.var] >= 0) cost[static_cast<std::size_t>(colOf[t.var])] += sign * t.coef;
    }

    std::vector<SparseRow> rows;
    std::vector<double> rhs;
    std::vector<long> rowOf(p.constraints().size(), -1);
    std::vector<double> dense(kept.size(), 0.0);
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        const Constraint& c = p.constraints()[i];
        double b = c.rhs;
        SparseRow row;
        for (const Term& t : c.terms) {
            if (colOf[t.var] < 0) {
                b -= t.coef * fixedValue[t.var];
                continue;
            }
            const auto col = static_cast<std::size_t>(colOf[t.var]);
            if (dense[col] == 0.0) row.cols.push_back(col);
            dense[col] += t.coef;
        }
        SparseRow compact;
        for (std::size_t col : row.cols) {
            if (dense[col] != 0.0) {
                compact.cols.push_back(col);
                compact.vals.push_back(dense[col]);
            }
            dense[col] = 0.0;
        }
        if (compact.cols.empty()) {
            const double tol = options.feasibilityTolerance;
            const bool ok = (c.rel == Relation::le && b >= -tol) || (c.rel == Relation::ge && b <= tol) ||
                            (c.rel == Relation::eq && std::abs(b) <= tol);
            if (!ok) {
                sol.status = Status::infeasible;
                sol.diagnostics = "constraint '" + c.name + "' is violated by fixed variables";
                return sol;
            }
            continue;
        }
        rowOf[i] = static_cast<long>(rows.size());
        rows.push_back(std::move(compact));
        rhs.push_back(b);
        switch (c.rel) {
            case Relation::le: lo.push_back(0.0); hi.push_back(kInf); break;
            case Relation::ge: lo.push_back(-kInf); hi.push_back(0.0); break;
            case Relation::eq: lo.push_back(0.0); hi.push_back(0.0); break;
        }
    }

    DenseSimplex simplex(std::move(rows), std::move(rhs), std::move(lo), std::move(hi), std::move(cost), kept.size(),
                         options);
    const Status status = simplex.run();
    sol.iterations = simplex.iterations();
    sol.nodes = 1;
    sol.status = status;
    if (status == Status::infeasible || status == Status::unbounded) {
        sol.diagnostics = std::string("simplex: ") + toString(status);
        return sol;
    }
    if (status == Status::limit) {
        sol.diagnostics = "simplex: iteration limit reached";
        return sol;
    }

    sol.values.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (colOf[j] >= 0) {
            double v = simplex.structuralValue(static_cast<std::size_t>(colOf[j]));
            v = std::clamp(v, lower[j], upper[j]);
            sol.values[j] = v;
        } else {
            sol.values[j] = fixedValue[j];
        }
    }
    sol.objective = p.evaluateObjective(sol.values);
    sol.bound = sol.objective;
    sol.duals.assign(p.constraints().size(), 0.0);
    for (std::size_t i = 0; i < rowOf.size(); ++i) {
        if (rowOf[i] >= 0) sol.duals[i] = sign * simplex.rowDual(static_cast<std::size_t>(rowOf[i]));
    }
    sol.reducedCosts.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (colOf[j] >= 0) sol.reducedCosts[j] = sign * simplex.reducedCost(static_cast<std::size_t>(colOf[j]));
    }

    // Numerical breakdown guard: re-check the answer against the original rows.
    double worst = 0.0;
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        const auto& c = p.constraints()[i];
        const double a = p.rowActivity(i, sol.values);
        switch (c.rel) {
            case Relation::le: worst = std::max(worst, a - c.rhs); break;
            case Relation::ge: worst = std::max(worst, c.rhs - a); break;
            case Relation::eq: worst = std::max(worst, std::abs(a - c.rhs)); break;
        }
    }
    if (worst > options.feasibilityTolerance) {
        std::ostringstream msg;
        msg << "simplex: numerical breakdown, max row violation " << worst;
        sol.status = Status::limit;
        sol.diagnostics = msg.str();
    }
    return sol;
}

}  // namespace evac::mp
