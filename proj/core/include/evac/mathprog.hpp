#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evac::mp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Relation { le, ge, eq };
enum class ObjSense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, limit };

const char* toString(Status s);

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = kInf;
};

struct Term {
    std::size_t var;
    double coef;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

// Linear or mixed-binary program. Names are unique; terms reference declared variables.
class Program {
public:
    std::size_t addVariable(std::string name, VarKind kind = VarKind::continuous, double lower = 0.0,
                            double upper = kInf);
    std::size_t addBinary(std::string name) { return addVariable(std::move(name), VarKind::binary, 0.0, 1.0); }
    std::size_t addConstraint(std::string name, std::vector<Term> terms, Relation rel, double rhs);
    void setObjective(ObjSense sense, std::vector<Term> terms, double constant = 0.0);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    ObjSense sense() const { return sense_; }
    const std::vector<Term>& objective() const { return objective_; }
    double objectiveConstant() const { return objConstant_; }

    std::optional<std::size_t> findVariable(const std::string& name) const;
    std::optional<std::size_t> findConstraint(const std::string& name) const;
    bool hasBinaries() const;

    double evaluateObjective(std::span<const double> x) const;
    double rowActivity(std::size_t row, std::span<const double> x) const;
    // Largest bound or constraint violation of x.
    double maxViolation(std::span<const double> x) const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    std::map<std::string, std::size_t> varIndex_;
    std::map<std::string, std::size_t> rowIndex_;
    ObjSense sense_ = ObjSense::minimize;
    std::vector<Term> objective_;
    double objConstant_ = 0.0;
};

struct Solution {
    Status status = Status::limit;
    std::vector<double> values;
    double objective = 0.0;
    // Best proven bound on the optimum (MILP); equals objective for solved LPs.
    double bound = 0.0;
    double gap = 0.0;
    std::size_t nodes = 0;
    std::size_t iterations = 0;
    // LP only: row duals and structural reduced costs, in the program's objective sense.
    std::vector<double> duals;
    std::vector<double> reducedCosts;
    std::string diagnostics;

    bool hasIncumbent() const { return !values.empty(); }
    double value(const Program& p, const std::string& name) const;
};

struct LpOptions {
    std::size_t maxIterations = 200000;
    double pivotTolerance = 1e-9;
    double feasibilityTolerance = 1e-6;
    // Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerateSwitch = 50;
};

struct MilpOptions {
    std::size_t nodeLimit = 200000;
    double absoluteGap = 1e-6;
    double integralityTolerance = 1e-6;
    // Optional per-variable branching class; the most fractional binary of the highest class
    // that has any fractional value is branched on. Empty means a single class.
    std::vector<int> branchPriority;
    // When every integer-feasible objective value is a multiple of this step (> 0), nodes whose
    // bound cannot reach the next multiple beyond the incumbent are pruned.
    double objectiveGranularity = 0.0;
    LpOptions lp;
};

// Dense bounded-variable two-phase primal simplex. Binaries are relaxed to [0,1].
Solution solveLp(const Program& p, const LpOptions& options = {});
// Same, with per-variable bounds overriding the program's.
Solution solveLp(const Program& p, std::span<const double> lower, std::span<const double> upper,
                 const LpOptions& options = {});

// Branch-and-bound over LP relaxations: most-fractional branching, depth-first search
// with best-bound tie-breaking among equally deep nodes.
Solution solveMilp(const Program& p, const MilpOptions& options = {});

// ---- file interchange ----

// Fixed-format MPS with OBJSENSE; binaries as BV bounds. When any name exceeds 8 characters
// every row and column gets a generated short name and `<path>.names` maps short to original.
void exportMps(const Program& p, const std::filesystem::path& path);
Program importMps(const std::filesystem::path& path);

// `<name> <value>` per line; names may be original or short MPS names.
Solution importSolution(const Program& p, const std::filesystem::path& path);
void writeSolution(const Program& p, const Solution& s, const std::filesystem::path& path);

// Environment variable holding the external solver command template, e.g. "cbc {mps} solve solu {sol}".
inline constexpr const char* kExternalSolverEnv = "EVAC_EXTERNAL_SOLVER";

// Exports the program, runs the external command with {mps} and {sol} substituted, imports the result.
Solution solveExternal(const Program& p, const std::string& commandTemplate, const std::filesystem::path& workDir);

}  // namespace evac::mp
