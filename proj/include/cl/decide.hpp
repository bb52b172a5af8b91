#pragma once

// Decision procedures: quadratic entailment via simpl, Brandom
// incompatibility machinery, and the negation-extension procedure
// (¬_S elimination, DNF, S-extensions).

#include <functional>
#include <queue>

#include "cl/lattice.hpp"

namespace cl {

// φ ⊨ ψ iff simpl(φ) ⊨ ψ.
inline bool entails(const Formula& f, const Formula& g) {
    LatticeModel m = simpl(f);
    if (m.is_bottom()) return true;
    return satisfies(*m.model, g);
}

// φ and ψ are incompatible iff no model satisfies both.
inline bool incompatible(const Formula& f, const Formula& g) {
    return simpl(f_and(f, g)).is_bottom();
}

// Witness for a failed entailment per the incompatibility-semantics theorem:
// a formula ξ with incompatible(g, ξ) and not incompatible(f, ξ), built by
// adding a blocking label restriction (case i) or an extra transition
// (case ii) to simpl(f).
inline Formula brandom_witness(const Formula& f, const Formula& g) {
    if (entails(f, g)) throw std::invalid_argument("entailment holds; no witness");
    LatticeModel sf = simpl(f);
    // simpl(f) ≠ ⊥, otherwise f would entail everything.
    CathoristicModel m = *sf.model;
    if (simpl(g).is_bottom()) return f_top();

    // Find a conjunction-free consequence of g failing on m: walk g,
    // tracking the action path.
    std::vector<Action> path;
    std::vector<Action> fail_path;
    const FormulaNode* fail_leaf = nullptr;
    std::function<bool(const Formula&)> walk = [&](const Formula& h) -> bool {
        switch (h->kind) {
            case FKind::And:
                return walk(h->lhs) && walk(h->rhs);
            case FKind::May: {
                path.push_back(h->action);
                bool ok = walk(h->sub);
                path.pop_back();
                return ok;
            }
            default: {
                // Evaluate ⟨path⟩h on m.
                StateId s = m.start;
                std::size_t i = 0;
                for (; i < path.size(); ++i) {
                    auto t = m.ts.step(s, path[i]);
                    if (!t) break;
                    s = *t;
                }
                bool holds = i == path.size() &&
                             (h->kind == FKind::Top ||
                              (h->kind == FKind::Bang && m.ts.label(s).subset_of(h->acts)));
                if (!holds && !fail_leaf) {
                    fail_path = path;
                    fail_leaf = h.get();
                }
                return holds;
            }
        }
    };
    walk(g);
    if (!fail_leaf) throw std::logic_error("no failing consequence found");

    // Walk the failing path as far as it exists in m.
    std::vector<StateId> states{m.start};
    std::size_t i = 0;
    for (; i < fail_path.size(); ++i) {
        auto t = m.ts.step(states.back(), fail_path[i]);
        if (!t) break;
        states.push_back(*t);
    }

    CathoristicTS ts = m.ts;
    if (i < fail_path.size()) {
        // Case (i): the path breaks at depth i; forbid a_{i+1} at the end
        // state by shrinking its label to the exact out-set.
        ts.labels.erase(states.back());
        ts.labels.emplace(states.back(),
                          StateLabel::finite(m.ts.out_actions(states.back())));
    } else {
        // Case (ii): the whole path exists but the tantum fails; ensure a
        // transition with an action outside the set.
        const ActionSet& A = fail_leaf->acts;
        StateId end = states.back();
        ActionSet outs = m.ts.out_actions(end);
        bool have = false;
        for (const auto& b : outs)
            if (!A.count(b)) have = true;
        if (!have) {
            const StateLabel& l = m.ts.label(end);
            Action b;
            if (!l.all) {
                for (const auto& c : l.acts)
                    if (!A.count(c)) b = c;
            } else {
                b = "w0";
                while (A.count(b)) b += "w";
            }
            StateId fresh = end + "_x";
            while (ts.states.count(fresh)) fresh += "x";
            ts.states.insert(fresh);
            ts.labels.emplace(fresh, StateLabel::all_actions());
            ts.transitions.insert({end, b, fresh});
        }
    }
    return char_formula(LatticeModel::of(validate_model(ts, m.start)));
}

// ---------------------------------------------------------------------------
// Negation elimination relative to a finite action set S.

inline Formula neg_s(const Formula& f, const ActionSet& S);

// ¬_S over an already Neg-eliminated argument.
inline Formula neg_s_of(const Formula& f, const ActionSet& S) {
    switch (f->kind) {
        case FKind::Top: return f_bot();
        case FKind::Bottom: return f_top();
        case FKind::And:
            return f_or(neg_s_of(f->lhs, S), neg_s_of(f->rhs, S));
        case FKind::Or:
            return f_and(neg_s_of(f->lhs, S), neg_s_of(f->rhs, S));
        case FKind::May: {
            ActionSet rest = S;
            rest.erase(f->action);
            return f_or(f_bang(std::move(rest)),
                        f_may(f->action, neg_s_of(f->sub, S)));
        }
        case FKind::Bang: {
            std::vector<Formula> disj;
            for (const auto& a : S)
                if (!f->acts.count(a)) disj.push_back(f_may(a, f_top()));
            // The empty disjunction is ⊥.
            return f_or_all(disj);
        }
        default:
            throw std::logic_error("neg_s_of: unexpected Neg");
    }
}

// Removes all Neg nodes, innermost-out.
inline Formula neg_s(const Formula& f, const ActionSet& S) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Bang: return f;
        case FKind::May: return f_may(f->action, neg_s(f->sub, S));
        case FKind::And: return f_and(neg_s(f->lhs, S), neg_s(f->rhs, S));
        case FKind::Or: return f_or(neg_s(f->lhs, S), neg_s(f->rhs, S));
        case FKind::Neg: return neg_s_of(neg_s(f->sub, S), S);
    }
    return f;
}

inline Formula neg_eliminate(const Formula& f, const ActionSet& S) {
    return neg_s(f, S);
}

// ---------------------------------------------------------------------------
// Disjunctive normal form: list of Or-free disjuncts.

inline void dnf_into(const Formula& f, std::vector<Formula>& out) {
    switch (f->kind) {
        case FKind::Or:
            dnf_into(f->lhs, out);
            dnf_into(f->rhs, out);
            break;
        case FKind::And: {
            std::vector<Formula> ls, rs;
            dnf_into(f->lhs, ls);
            dnf_into(f->rhs, rs);
            for (const auto& l : ls)
                for (const auto& r : rs) out.push_back(f_and(l, r));
            break;
        }
        case FKind::May: {
            std::vector<Formula> subs;
            dnf_into(f->sub, subs);
            for (const auto& s : subs) out.push_back(f_may(f->action, s));
            break;
        }
        case FKind::Neg:
            throw std::invalid_argument("to_dnf: eliminate negation first");
        default: out.push_back(f);
    }
}

inline std::vector<Formula> to_dnf(const Formula& f) {
    std::vector<Formula> out;
    dnf_into(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// S-extensions.

struct SExtensionSpec {
    CathoristicModel base;
    ActionSet S;
    std::size_t bound = 0;
};

namespace detail {

// All deterministic trees over S with every label Σ and height ≤ h,
// represented as children maps; enumerated as vectors of (action, subtree).
struct FreshTree {
    std::vector<std::pair<Action, std::shared_ptr<FreshTree>>> children;
};
using FreshTreeP = std::shared_ptr<FreshTree>;

inline const std::vector<FreshTreeP>& fresh_trees(const ActionSet& S, std::size_t h,
                                                  std::map<std::size_t,
                                                           std::vector<FreshTreeP>>& memo) {
    auto it = memo.find(h);
    if (it != memo.end()) return it->second;
    std::vector<FreshTreeP> result;
    if (h == 0) {
        result.push_back(std::make_shared<FreshTree>());
    } else {
        const auto& subs = fresh_trees(S, h - 1, memo);
        // Per action: absent or one of the height-(h-1) subtrees.
        std::vector<FreshTreeP> acc{std::make_shared<FreshTree>()};
        for (const auto& a : S) {
            std::vector<FreshTreeP> next;
            for (const auto& partial : acc) {
                next.push_back(partial);
                for (const auto& sub : subs) {
                    auto t = std::make_shared<FreshTree>(*partial);
                    t->children.emplace_back(a, sub);
                    next.push_back(t);
                }
            }
            acc = std::move(next);
        }
        result = std::move(acc);
    }
    return memo.emplace(h, std::move(result)).first->second;
}

inline void graft(CathoristicTS& ts, const StateId& at, const FreshTree& tree,
                  int& counter) {
    for (const auto& [a, sub] : tree.children) {
        StateId fresh = "e" + std::to_string(counter++);
        ts.states.insert(fresh);
        ts.labels.emplace(fresh, StateLabel::all_actions());
        ts.transitions.insert({at, a, fresh});
        graft(ts, fresh, *sub, counter);
    }
}

} // namespace detail

// Enumerates every S-extension of the base tree: at each base state, fresh
// Σ-labelled subtrees over S may be grafted through actions allowed by the
// base label, with the grafted material never reaching deeper than `bound`
// transitions from the root.
inline std::vector<CathoristicModel> s_extensions(const SExtensionSpec& spec) {
    if (!is_tree(spec.base))
        throw std::invalid_argument("NotATree: s_extensions requires a tree base");

    // Depth of every base state.
    std::map<StateId, std::size_t> depth;
    depth[spec.base.start] = 0;
    std::queue<StateId> q;
    q.push(spec.base.start);
    std::vector<StateId> order{spec.base.start};
    while (!q.empty()) {
        StateId s = q.front();
        q.pop();
        for (auto& [a, t] : spec.base.ts.out(s)) {
            depth[t] = depth[s] + 1;
            order.push_back(t);
            q.push(t);
        }
    }

    // Per base state, the list of possible additions: a choice per available
    // action of either nothing or a fresh subtree.
    std::map<std::size_t, std::vector<detail::FreshTreeP>> memo;
    struct Slot {
        StateId state;
        Action action;
        std::vector<detail::FreshTreeP> options;  // first entry: no addition
    };
    std::vector<Slot> slots;
    for (const auto& s : order) {
        if (depth[s] + 1 > spec.bound) continue;
        std::size_t budget = spec.bound - depth[s] - 1;
        ActionSet outs = spec.base.ts.out_actions(s);
        for (const auto& a : spec.S) {
            if (!spec.base.ts.label(s).allows(a) || outs.count(a)) continue;
            Slot slot{s, a, {nullptr}};
            for (const auto& t : detail::fresh_trees(spec.S, budget, memo))
                slot.options.push_back(t);
            slots.push_back(std::move(slot));
        }
    }

    std::vector<CathoristicModel> result;
    std::vector<std::size_t> pick(slots.size(), 0);
    while (true) {
        CathoristicTS ts = spec.base.ts;
        int counter = 0;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (pick[i] == 0) continue;
            const auto& tree = slots[i].options[pick[i]];
            StateId fresh = "e" + std::to_string(counter++);
            ts.states.insert(fresh);
            ts.labels.emplace(fresh, StateLabel::all_actions());
            ts.transitions.insert({slots[i].state, slots[i].action, fresh});
            detail::graft(ts, fresh, *tree, counter);
        }
        result.push_back(CathoristicModel{std::move(ts), spec.base.start});
        // Next combination.
        std::size_t i = 0;
        for (; i < slots.size(); ++i) {
            if (++pick[i] < slots[i].options.size()) break;
            pick[i] = 0;
        }
        if (i == slots.size()) break;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Entailment for the negation extension.

inline Action fresh_action(const ActionSet& used) {
    Action a = "z";
    int n = 0;
    while (used.count(a)) a = "z" + std::to_string(++n);
    return a;
}

inline bool entails_neg(const Formula& f, const Formula& g,
                        std::optional<std::size_t> bound_override = std::nullopt) {
    ActionSet S = actions_of(f);
    ActionSet ag = actions_of(g);
    S.insert(ag.begin(), ag.end());
    S.insert(fresh_action(S));

    // Only the antecedent is rewritten; the consequent is evaluated
    // classically on each extension.
    Formula f2 = neg_s(f, S);
    std::size_t bound = bound_override ? *bound_override : modal_depth(g);
    for (const Formula& d : to_dnf(f2)) {
        LatticeModel m = simpl(d);
        if (m.is_bottom()) continue;
        for (const auto& ext : s_extensions({*m.model, S, bound}))
            if (!eval_extended(ext, g)) return false;
    }
    return true;
}

} // namespace cl
