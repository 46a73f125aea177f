#include <algorithm>
#include <cmath>

#include "evac/errors.hpp"
#include "evac/mathprog.hpp"

namespace evac::mp {

const char* toString(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::limit: return "limit";
    }
    return "unknown";
}

std::size_t Program::addVariable(std::string name, VarKind kind, double lower, double upper) {
    if (name.empty()) throw InputError("program: variable name is empty");
    if (kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
        throw InputError("program: binary '" + name + "' must have bounds within [0,1]");
    }
    if (std::isnan(lower) || std::isnan(upper)) throw InputError("program: NaN bound on '" + name + "'");
    const std::size_t idx = vars_.size();
    if (!varIndex_.emplace(name, idx).second) throw InputError("program: duplicate variable '" + name + "'");
    vars_.push_back(Variable{std::move(name), kind, lower, upper});
    return idx;
}

std::size_t Program::addConstraint(std::string name, std::vector<Term> terms, Relation rel, double rhs) {
    if (name.empty()) throw InputError("program: constraint name is empty");
    for (const Term& t : terms) {
        if (t.var >= vars_.size()) throw InputError("program: constraint '" + name + "' references undeclared variable");
        if (!std::isfinite(t.coef)) throw InputError("program: constraint '" + name + "' has non-finite coefficient");
    }
    if (!std::isfinite(rhs)) throw InputError("program: constraint '" + name + "' has non-finite rhs");
    const std::size_t idx = rows_.size();
    if (!rowIndex_.emplace(name, idx).second) throw InputError("program: duplicate constraint '" + name + "'");
    rows_.push_back(Constraint{std::move(name), std::move(terms), rel, rhs});
    return idx;
}

void Program::setObjective(ObjSense sense, std::vector<Term> terms, double constant) {
    for (const Term& t : terms) {
        if (t.var >= vars_.size()) throw InputError("program: objective references undeclared variable");
    }
    sense_ = sense;
    objective_ = std::move(terms);
    objConstant_ = constant;
}

std::optional<std::size_t> Program::findVariable(const std::string& name) const {
    const auto it = varIndex_.find(name);
    if (it == varIndex_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Program::findConstraint(const std::string& name) const {
    const auto it = rowIndex_.find(name);
    if (it == rowIndex_.end()) return std::nullopt;
    return it->second;
}

bool Program::hasBinaries() const {
    return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; });
}

double Program::evaluateObjective(std::span<const double> x) const {
    double v = objConstant_;
    for (const Term& t : objective_) v += t.coef * x[t.var];
    return v;
}

double Program::rowActivity(std::size_t row, std::span<const double> x) const {
    double a = 0.0;
    for (const Term& t : rows_[row].terms) a += t.coef * x[t.var];
    return a;
}

double Program::maxViolation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        worst = std::max({worst, vars_[j].lower - x[j], x[j] - vars_[j].upper});
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double a = rowActivity(i, x);
        const double r = rows_[i].rhs;
        switch (rows_[i].rel) {
            case Relation::le: worst = std::max(worst, a - r); break;
            case Relation::ge: worst = std::max(worst, r - a); break;
            case Relation::eq: worst = std::max(worst, std::abs(a - r)); break;
        }
    }
    return worst;
}

double Solution::value(const Program& p, const std::string& name) const {
    const auto idx = p.findVariable(name);
    if (!idx) throw InputError("solution: unknown variable '" + name + "'");
    if (values.empty()) throw SolverError("solution has no values (status " + std::string(toString(status)) + ")");
    return values[*idx];
}

}  // namespace evac::mp
