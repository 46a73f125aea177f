#include "random_programs.hpp"

#include <cmath>

namespace evac::testing {

namespace {

mp::Relation randomRelation(std::mt19937_64& rng) {
    switch (rng() % 4) {
        case 0: return mp::Relation::ge;
        case 1: return mp::Relation::eq;
        default: return mp::Relation::le;
    }
}

}  // namespace

mp::Program randomLp(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_int_distribution<int> nv(2, 8), nr(1, 7);
    mp::Program p;
    const int n = nv(rng);
    for (int j = 0; j < n; ++j) {
        const double lo = (rng() % 3 == 0) ? -2.0 : 0.0;
        const double up = (rng() % 3 == 0) ? mp::kInf : lo + 1.0 + static_cast<double>(rng() % 6);
        p.addVariable("x" + std::to_string(j), mp::VarKind::continuous, lo, up);
    }
    const int m = nr(rng);
    for (int i = 0; i < m; ++i) {
        std::vector<mp::Term> terms;
        for (int j = 0; j < n; ++j) {
            if (rng() % 3 != 0) terms.push_back({static_cast<std::size_t>(j), std::round(coef(rng) * 4.0) / 4.0});
        }
        p.addConstraint("r" + std::to_string(i), terms, randomRelation(rng), std::round(coef(rng) * 8.0) / 4.0);
    }
    std::vector<mp::Term> obj;
    for (int j = 0; j < n; ++j) obj.push_back({static_cast<std::size_t>(j), coef(rng)});
    p.setObjective(rng() % 2 ? mp::ObjSense::maximize : mp::ObjSense::minimize, obj, coef(rng));
    return p;
}

mp::Program randomMilp(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-4.0, 4.0);
    mp::Program p;
    const int bins = 4 + static_cast<int>(rng() % 9);
    const int conts = static_cast<int>(rng() % 4);
    for (int j = 0; j < bins; ++j) p.addBinary("b" + std::to_string(j));
    for (int j = 0; j < conts; ++j) p.addVariable("c" + std::to_string(j), mp::VarKind::continuous, 0.0, 3.0);
    const int n = bins + conts;
    const int m = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < m; ++i) {
        std::vector<mp::Term> terms;
        for (int j = 0; j < n; ++j) {
            if (rng() % 2 == 0) terms.push_back({static_cast<std::size_t>(j), std::round(coef(rng) * 2.0) / 2.0});
        }
        const mp::Relation rel = rng() % 5 == 0 ? mp::Relation::ge : mp::Relation::le;
        p.addConstraint("r" + std::to_string(i), terms, rel, std::round(coef(rng) * 2.0) / 2.0 + (rel == mp::Relation::le ? 2.0 : -2.0));
    }
    std::vector<mp::Term> obj;
    for (int j = 0; j < n; ++j) obj.push_back({static_cast<std::size_t>(j), coef(rng)});
    p.setObjective(rng() % 2 ? mp::ObjSense::maximize : mp::ObjSense::minimize, obj);
    return p;
}

}  // namespace evac::testing
