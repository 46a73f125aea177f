#include <algorithm>
#include <cmath>

#include "evac/errors.hpp"
#include "evac/mathprog.hpp"

namespace evac::mp {
namespace {

struct Node {
    std::vector<double> lower;
    std::vector<double> upper;
    int depth = 0;
    double parentBound = 0.0;
    std::size_t seq = 0;
};

}  // namespace

Solution solveMilp(const Program& p, const MilpOptions& opts) {
    if (!p.hasBinaries()) {
        Solution s = solveLp(p, opts.lp);
        s.nodes = 1;
        return s;
    }
    const bool maximize = p.sense() == ObjSense::maximize;
    const double worst = maximize ? -kInf : kInf;
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };

    Solution result;
    bool haveIncumbent = false;
    double incumbent = worst;
    if (!opts.branchPriority.empty() && opts.branchPriority.size() != p.variables().size()) {
        throw InputError("branch-and-bound: branch priority must list every variable");
    }
    const double step = opts.objectiveGranularity;
    auto canImprove = [&](double bound) {
        if (!haveIncumbent) return true;
        if (step > 0.0) {
            // Next attainable objective beyond the incumbent.
            const double target = maximize ? incumbent + step : incumbent - step;
            return maximize ? bound > target - opts.absoluteGap : bound < target + opts.absoluteGap;
        }
        return maximize ? bound > incumbent + opts.absoluteGap : bound < incumbent - opts.absoluteGap;
    };

    std::vector<Node> open;
    std::size_t seq = 0;
    {
        Node root;
        for (const Variable& v : p.variables()) {
            root.lower.push_back(v.lower);
            root.upper.push_back(v.upper);
        }
        root.parentBound = maximize ? kInf : -kInf;
        root.seq = seq++;
        open.push_back(std::move(root));
    }

    std::size_t nodes = 0;
    std::size_t lpIterations = 0;
    bool hitLimit = false;
    std::string diagnostics;
    // Bound of subtrees abandoned because their relaxation could not be solved.
    double abandonedBound = worst;

    while (!open.empty()) {
        if (nodes >= opts.nodeLimit) {
            hitLimit = true;
            diagnostics = "branch-and-bound: node limit " + std::to_string(opts.nodeLimit) + " reached";
            break;
        }
        // Deepest node first; among equally deep nodes the better parent bound, then the newest.
        auto pick = open.begin();
        for (auto it = open.begin(); it != open.end(); ++it) {
            if (it->depth != pick->depth) {
                if (it->depth > pick->depth) pick = it;
                continue;
            }
            if (better(it->parentBound, pick->parentBound) ||
                (it->parentBound == pick->parentBound && it->seq > pick->seq)) {
                pick = it;
            }
        }
        Node node = std::move(*pick);
        open.erase(pick);
        if (!canImprove(node.parentBound)) continue;

        const Solution lp = solveLp(p, node.lower, node.upper, opts.lp);
        ++nodes;
        lpIterations += lp.iterations;
        if (lp.status == Status::infeasible) continue;
        if (lp.status == Status::unbounded) {
            result.status = Status::unbounded;
            result.nodes = nodes;
            result.diagnostics = "LP relaxation is unbounded";
            return result;
        }
        if (lp.status == Status::limit) {
            hitLimit = true;
            diagnostics = "branch-and-bound: LP relaxation failed (" + lp.diagnostics + ")";
            if (better(node.parentBound, abandonedBound)) abandonedBound = node.parentBound;
            continue;
        }
        if (!canImprove(lp.objective)) continue;

        std::size_t branchVar = p.variables().size();
        double mostFractional = opts.integralityTolerance;
        int bestClass = 0;
        for (std::size_t j = 0; j < p.variables().size(); ++j) {
            if (p.variables()[j].kind != VarKind::binary) continue;
            const double x = lp.values[j];
            const double frac = std::abs(x - std::round(x));
            if (frac <= opts.integralityTolerance) continue;
            const int cls = opts.branchPriority.empty() ? 0 : opts.branchPriority[j];
            if (branchVar == p.variables().size() || cls > bestClass || (cls == bestClass && frac > mostFractional)) {
                mostFractional = frac;
                bestClass = cls;
                branchVar = j;
            }
        }

        if (branchVar == p.variables().size()) {
            std::vector<double> x = lp.values;
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (p.variables()[j].kind == VarKind::binary) x[j] = std::round(x[j]);
            }
            const double obj = p.evaluateObjective(x);
            if (!haveIncumbent || better(obj, incumbent)) {
                haveIncumbent = true;
                incumbent = obj;
                result.values = std::move(x);
            }
            continue;
        }

        const double xv = lp.values[branchVar];
        Node down{node.lower, node.upper, node.depth + 1, lp.objective, 0};
        down.upper[branchVar] = 0.0;
        Node up{std::move(node.lower), std::move(node.upper), node.depth + 1, lp.objective, 0};
        up.lower[branchVar] = 1.0;
        // The child nearer the LP value gets the higher sequence number and is explored first.
        if (xv >= 0.5) {
            down.seq = seq++;
            up.seq = seq++;
        } else {
            up.seq = seq++;
            down.seq = seq++;
        }
        open.push_back(std::move(down));
        open.push_back(std::move(up));
    }

    result.nodes = nodes;
    result.iterations = lpIterations;
    result.diagnostics = diagnostics;
    if (haveIncumbent) result.objective = incumbent;

    if (!hitLimit) {
        result.status = haveIncumbent ? Status::optimal : Status::infeasible;
        result.bound = haveIncumbent ? incumbent : worst;
        result.gap = 0.0;
        return result;
    }
    double bound = haveIncumbent ? incumbent : worst;
    if (better(abandonedBound, bound)) bound = abandonedBound;
    for (const Node& n : open) {
        if (better(n.parentBound, bound)) bound = n.parentBound;
    }
    result.status = Status::limit;
    result.bound = bound;
    result.gap = haveIncumbent ? std::abs(bound - incumbent) : kInf;
    return result;
}

}  // namespace evac::mp
