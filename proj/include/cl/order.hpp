#pragma once

// Simulation preorder, the ⪯ ordering on models, mutual-simulation
// equivalence, bisimilarity for pure models, and the distinguishing-formula
// constructor.

#include "cl/semantics.hpp"

namespace cl {

// Either the lattice bottom or a model. Bottom satisfies every formula by
// fiat and lies below every model.
struct LatticeModel {
    std::optional<CathoristicModel> model;

    bool is_bottom() const { return !model.has_value(); }
    static LatticeModel bottom() { return LatticeModel{std::nullopt}; }
    static LatticeModel of(CathoristicModel m) { return LatticeModel{std::move(m)}; }
};

inline bool lattice_satisfies(const LatticeModel& m, const Formula& f) {
    return m.is_bottom() || satisfies(*m.model, f);
}

using SimulationWitness = std::set<std::pair<StateId, StateId>>;

// Greatest simulation from m1 to m2 containing the start pair, if any:
// initialize with all pairs meeting the label condition λ₁(x) ⊇ λ₂(y),
// iteratively remove pairs violating the transfer condition.
inline std::optional<SimulationWitness> simulation_exists(const CathoristicModel& m1,
                                                          const CathoristicModel& m2) {
    SimulationWitness rel;
    for (const auto& x : m1.ts.states)
        for (const auto& y : m2.ts.states)
            if (m1.ts.label(x).superset_of(m2.ts.label(y))) rel.insert({x, y});

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = rel.begin(); it != rel.end();) {
            const auto& [x, y] = *it;
            bool ok = true;
            for (auto& [a, xs] : m1.ts.out(x)) {
                auto ys = m2.ts.step(y, a);
                if (!ys || !rel.count({xs, *ys})) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                it = rel.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    if (!rel.count({m1.start, m2.start})) return std::nullopt;
    return rel;
}

// m1 ⪯ m2: m1 is ⊥, or the lower model m1 simulates m2 (simulation from m2
// to m1), so m1 satisfies every formula m2 does.
inline bool preceq(const LatticeModel& m1, const LatticeModel& m2) {
    if (m1.is_bottom()) return true;
    if (m2.is_bottom()) return false;
    return simulation_exists(*m2.model, *m1.model).has_value();
}

// Mutual simulation: the artifact's notion of model equality.
inline bool equivalent(const LatticeModel& m1, const LatticeModel& m2) {
    return preceq(m1, m2) && preceq(m2, m1);
}
inline bool equivalent(const CathoristicModel& m1, const CathoristicModel& m2) {
    return equivalent(LatticeModel::of(m1), LatticeModel::of(m2));
}

// Bisimilarity for (possibly non-deterministic) pure models, by greatest
// fixpoint over the full relation.
inline bool bisimilar(const PureModel& p1, const PureModel& p2) {
    std::set<std::pair<StateId, StateId>> rel;
    for (const auto& x : p1.states)
        for (const auto& y : p2.states) rel.insert({x, y});

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = rel.begin(); it != rel.end();) {
            const auto& [x, y] = *it;
            bool ok = true;
            for (auto& [a, xs] : p1.out(x)) {
                bool matched = false;
                for (const auto& ys : p2.step_all(y, a))
                    if (rel.count({xs, ys})) {
                        matched = true;
                        break;
                    }
                if (!matched) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                for (auto& [a, ys] : p2.out(y)) {
                    bool matched = false;
                    for (const auto& xs : p1.step_all(x, a))
                        if (rel.count({xs, ys})) {
                            matched = true;
                            break;
                        }
                    if (!matched) {
                        ok = false;
                        break;
                    }
                }
            if (!ok) {
                it = rel.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return rel.count({p1.start, p2.start}) > 0;
}

// neg(y, blocked): a core formula true at y but jointly unsatisfiable with
// blocked, defined whenever y does not satisfy blocked.
inline Formula distinguishing_at(const PureModel& p, const StateId& y,
                                 const Formula& blocked) {
    switch (blocked->kind) {
        case FKind::Top:
            throw std::invalid_argument("distinguishing_formula: Top cannot occur");
        case FKind::And: {
            const bool l = satisfies_pure_at(p, y, blocked->lhs);
            const bool r = satisfies_pure_at(p, y, blocked->rhs);
            if (!l && r)
                return f_and(distinguishing_at(p, y, blocked->lhs), blocked->rhs);
            if (l && !r)
                return f_and(blocked->lhs, distinguishing_at(p, y, blocked->rhs));
            return f_and(distinguishing_at(p, y, blocked->lhs),
                         distinguishing_at(p, y, blocked->rhs));
        }
        case FKind::Bang: {
            // Some a ∈ Σ∖A with an a-transition from y witnesses the failure.
            for (auto& [a, t] : p.out(y))
                if (!blocked->acts.count(a)) return f_may(a, f_top());
            throw std::logic_error("distinguishing_formula: Bang case with no witness");
        }
        case FKind::May: {
            auto succs = p.step_all(y, blocked->action);
            if (succs.empty()) return f_bang(p.out_actions(y));
            std::vector<Formula> conj;
            for (const auto& z : succs)
                conj.push_back(
                    f_may(blocked->action, distinguishing_at(p, z, blocked->sub)));
            return f_and_all(conj);
        }
        default:
            throw std::invalid_argument("distinguishing_formula: core dialect only");
    }
}

inline Formula distinguishing_formula(const PureModel& p_true, const Formula& blocked) {
    if (satisfies_pure(p_true, blocked))
        throw std::invalid_argument("BlockedIsSatisfied");
    return distinguishing_at(p_true, p_true.start, blocked);
}

} // namespace cl
