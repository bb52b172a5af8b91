#pragma once

// The bounded lattice of models: glb via merge with state identification,
// lub via shared-transition product, simpl, and characteristic formulae.

#include "cl/order.hpp"

namespace cl {

namespace detail {

// Union-find over state ids.
class UnionFind {
public:
    StateId find(const StateId& x) {
        auto it = parent_.find(x);
        if (it == parent_.end() || it->second == x) return x;
        StateId root = find(it->second);
        parent_[x] = root;
        return root;
    }
    // Returns true if the two were previously distinct.
    bool unite(const StateId& a, const StateId& b) {
        StateId ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent_[rb] = ra;
        return true;
    }

private:
    std::map<StateId, StateId> parent_;
};

inline CathoristicModel rename_states(const CathoristicModel& m, const std::string& pfx) {
    CathoristicTS ts;
    for (const auto& s : m.ts.states) ts.states.insert(pfx + s);
    for (const auto& t : m.ts.transitions)
        ts.transitions.insert({pfx + t.src, t.act, pfx + t.dst});
    for (const auto& [s, l] : m.ts.labels) ts.labels.emplace(pfx + s, l);
    return CathoristicModel{std::move(ts), pfx + m.start};
}

} // namespace detail

// Greatest lower bound. Implements merge with state-identification pairs:
// starting from the two start states, identified pairs propagate along
// shared actions (determinism closure, via union-find), the inconsistency
// condition is checked on every identified group, and the final model joins
// both systems with labels intersected at identified states.
inline LatticeModel glb(const LatticeModel& a, const LatticeModel& b) {
    if (a.is_bottom() || b.is_bottom()) return LatticeModel::bottom();
    const CathoristicModel m1 = detail::rename_states(*a.model, "l_");
    const CathoristicModel m2 = detail::rename_states(*b.model, "r_");
    if (!is_tree(m1) || !is_tree(m2))
        throw std::invalid_argument("NotATree: glb requires tree models");

    // Merged view of both systems.
    CathoristicTS all;
    for (const auto* m : {&m1, &m2}) {
        all.states.insert(m->ts.states.begin(), m->ts.states.end());
        all.transitions.insert(m->ts.transitions.begin(), m->ts.transitions.end());
        all.labels.insert(m->ts.labels.begin(), m->ts.labels.end());
    }

    detail::UnionFind uf;
    std::vector<std::pair<StateId, StateId>> work{{m1.start, m2.start}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        if (!uf.unite(x, y)) continue;
        // Determinism propagation: identified states' matching transitions
        // identify their targets.
        for (auto& [ax, tx] : all.out(x))
            for (auto& [ay, ty] : all.out(y))
                if (ax == ay) work.push_back({tx, ty});
    }

    // Group states by representative.
    std::map<StateId, std::vector<StateId>> groups;
    for (const auto& s : all.states) groups[uf.find(s)].push_back(s);

    // Inconsistency: an identified pair where one side's out-transitions
    // violate the other side's label. After closure this is equivalent to
    // checking the group's united out-set against its intersected label.
    for (const auto& [rep, members] : groups) {
        StateLabel lab = StateLabel::all_actions();
        ActionSet outs;
        for (const auto& s : members) {
            lab = StateLabel::intersect(lab, all.label(s));
            ActionSet o = all.out_actions(s);
            outs.insert(o.begin(), o.end());
        }
        if (!lab.all)
            for (const auto& o : outs)
                if (!lab.acts.count(o)) return LatticeModel::bottom();
    }

    // Join under the identification.
    CathoristicTS out;
    for (const auto& [rep, members] : groups) {
        out.states.insert(rep);
        StateLabel lab = StateLabel::all_actions();
        for (const auto& s : members) lab = StateLabel::intersect(lab, all.label(s));
        out.labels.emplace(rep, std::move(lab));
    }
    for (const auto& t : all.transitions)
        out.transitions.insert({uf.find(t.src), t.act, uf.find(t.dst)});
    return LatticeModel::of(validate_model(out, uf.find(m1.start)));
}

// Least upper bound: synchronized product over shared transitions, labels
// united at paired states.
inline LatticeModel lub(const LatticeModel& a, const LatticeModel& b) {
    if (a.is_bottom()) return b;
    if (b.is_bottom()) return a;
    const CathoristicModel& m1 = *a.model;
    const CathoristicModel& m2 = *b.model;

    CathoristicTS out;
    std::map<std::pair<StateId, StateId>, StateId> names;
    std::vector<std::pair<StateId, StateId>> work{{m1.start, m2.start}};
    auto state_for = [&](const StateId& w, const StateId& w2) {
        auto it = names.find({w, w2});
        if (it != names.end()) return it->second;
        StateId fresh = "j" + std::to_string(names.size());
        names.emplace(std::make_pair(w, w2), fresh);
        out.states.insert(fresh);
        out.labels.emplace(fresh,
                           StateLabel::unite(m1.ts.label(w), m2.ts.label(w2)));
        return fresh;
    };
    StateId root = state_for(m1.start, m2.start);
    while (!work.empty()) {
        auto [w, w2] = work.back();
        work.pop_back();
        StateId x = state_for(w, w2);
        for (auto& [act, t1] : m1.ts.out(w)) {
            auto t2 = m2.ts.step(w2, act);
            if (!t2) continue;
            bool seen = names.count({t1, *t2}) > 0;
            StateId y = state_for(t1, *t2);
            out.transitions.insert({x, act, y});
            if (!seen) work.push_back({t1, *t2});
        }
    }
    return LatticeModel::of(validate_model(out, root));
}

// simpl(φ): the least upper bound of the models satisfying φ.
inline LatticeModel simpl(const Formula& f) {
    static const std::string kFresh = "v";
    switch (f->kind) {
        case FKind::Top: {
            CathoristicModel m = make_model({{"v0", StateLabel::all_actions()}}, {}, "v0");
            return LatticeModel::of(std::move(m));
        }
        case FKind::Bottom: return LatticeModel::bottom();
        case FKind::Bang: {
            CathoristicModel m =
                make_model({{"v0", StateLabel::finite(f->acts)}}, {}, "v0");
            return LatticeModel::of(std::move(m));
        }
        case FKind::And: return glb(simpl(f->lhs), simpl(f->rhs));
        case FKind::May: {
            LatticeModel sub = simpl(f->sub);
            // The naive clause assumes a model sub-result; ⟨a⟩⊥ ⊢ ⊥ forces
            // ⊥-propagation.
            if (sub.is_bottom()) return sub;
            CathoristicTS ts = std::move(sub.model->ts);  // sub is dead after
            StateId root = kFresh + std::to_string(ts.states.size()) + "r";
            while (ts.states.count(root)) root += "r";
            ts.states.insert(root);
            ts.labels.emplace(root, StateLabel::all_actions());
            ts.transitions.insert({root, f->action, sub.model->start});
            return LatticeModel::of(CathoristicModel{std::move(ts), root});
        }
        default:
            throw std::invalid_argument("simpl: core dialect only");
    }
}

// bang(M,w): !A when λ(w) is the finite set A, ⊤ when λ(w) = Σ.
inline Formula bang_of(const StateLabel& l) {
    return l.all ? f_top() : f_bang(l.acts);
}

inline Formula char_at(const CathoristicModel& m, const StateId& w) {
    std::vector<Formula> conj;
    Formula b = bang_of(m.ts.label(w));
    if (b->kind != FKind::Top) conj.push_back(b);
    for (auto& [a, t] : m.ts.out(w)) conj.push_back(f_may(a, char_at(m, t)));
    return f_and_all(conj);
}

// Characteristic formula: satisfied by exactly the models ⪯ m.
inline Formula char_formula(const LatticeModel& m,
                            const Alphabet& sigma = Alphabet::make_open()) {
    if (m.is_bottom()) {
        Action a = sigma.open ? Action("a0") : *sigma.actions.begin();
        return f_and(f_may(a, f_top()), f_bang({}));
    }
    if (!is_tree(*m.model))
        throw std::invalid_argument("NotATree: char requires a finite tree");
    return char_at(*m.model, m.model->start);
}

} // namespace cl
