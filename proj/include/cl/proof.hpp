#pragma once

// Sequent calculus for the core dialect: derivation trees over the thirteen
// rules, a structural checker, admissible-rule constructions, and a
// synthesizer that produces an explicit derivation for every valid
// entailment (via characteristic formulae).

#include <cctype>
#include <sstream>

#include "cl/decide.hpp"

namespace cl {

struct Sequent {
    Formula lhs;
    Formula rhs;
};

inline bool sequent_equal(const Sequent& a, const Sequent& b) {
    return struct_equal(a.lhs, b.lhs) && struct_equal(a.rhs, b.rhs);
}

enum class Rule {
    Id,
    TopRight,
    BotLeft,
    Trans,
    AndLeft1,
    AndLeft2,
    AndRight,
    BotRight1,
    BotRight2,
    BangRight1,
    BangRight2,
    Normal,
    Det,
};

inline const char* rule_name(Rule r) {
    switch (r) {
        case Rule::Id: return "Id";
        case Rule::TopRight: return "Top-Right";
        case Rule::BotLeft: return "Bot-Left";
        case Rule::Trans: return "Trans";
        case Rule::AndLeft1: return "And-Left1";
        case Rule::AndLeft2: return "And-Left2";
        case Rule::AndRight: return "And-Right";
        case Rule::BotRight1: return "Bot-Right1";
        case Rule::BotRight2: return "Bot-Right2";
        case Rule::BangRight1: return "Bang-Right1";
        case Rule::BangRight2: return "Bang-Right2";
        case Rule::Normal: return "Normal";
        case Rule::Det: return "Det";
    }
    return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& s) {
    for (Rule r : {Rule::Id, Rule::TopRight, Rule::BotLeft, Rule::Trans,
                   Rule::AndLeft1, Rule::AndLeft2, Rule::AndRight,
                   Rule::BotRight1, Rule::BotRight2, Rule::BangRight1,
                   Rule::BangRight2, Rule::Normal, Rule::Det})
        if (s == rule_name(r)) return r;
    return std::nullopt;
}

inline std::size_t rule_arity(Rule r) {
    switch (r) {
        case Rule::Id:
        case Rule::TopRight:
        case Rule::BotLeft:
        case Rule::BotRight1:
        case Rule::BotRight2: return 0;
        case Rule::AndLeft1:
        case Rule::AndLeft2:
        case Rule::BangRight1:
        case Rule::Normal:
        case Rule::Det: return 1;
        case Rule::Trans:
        case Rule::AndRight:
        case Rule::BangRight2: return 2;
    }
    return 0;
}

struct Derivation {
    Rule rule;
    Sequent concl;
    std::vector<Derivation> premises;
};

// ---------------------------------------------------------------------------
// Rule constructors. Each enforces its side conditions, so derivations built
// through them are correct by construction.

inline Derivation d_id(const Formula& f) { return {Rule::Id, {f, f}, {}}; }

inline Derivation d_top_right(const Formula& f) {
    return {Rule::TopRight, {f, f_top()}, {}};
}

inline Derivation d_bot_left(const Formula& f) {
    return {Rule::BotLeft, {f_bot(), f}, {}};
}

inline Derivation d_trans(Derivation a, Derivation b) {
    if (!struct_equal(a.concl.rhs, b.concl.lhs))
        throw std::logic_error("Trans: cut formulae differ");
    Sequent c{a.concl.lhs, b.concl.rhs};
    return {Rule::Trans, std::move(c), {std::move(a), std::move(b)}};
}

inline Derivation d_and_left1(Derivation d, const Formula& xi) {
    Sequent c{f_and(d.concl.lhs, xi), d.concl.rhs};
    return {Rule::AndLeft1, std::move(c), {std::move(d)}};
}

inline Derivation d_and_left2(Derivation d, const Formula& xi) {
    Sequent c{f_and(xi, d.concl.lhs), d.concl.rhs};
    return {Rule::AndLeft2, std::move(c), {std::move(d)}};
}

inline Derivation d_and_right(Derivation a, Derivation b) {
    if (!struct_equal(a.concl.lhs, b.concl.lhs))
        throw std::logic_error("And-Right: antecedents differ");
    Sequent c{a.concl.lhs, f_and(a.concl.rhs, b.concl.rhs)};
    return {Rule::AndRight, std::move(c), {std::move(a), std::move(b)}};
}

inline Derivation d_bot_right1(const ActionSet& A, const Action& a,
                               const Formula& phi) {
    if (A.count(a)) throw std::logic_error("Bot-Right1: action not excluded");
    return {Rule::BotRight1, {f_and(f_bang(A), f_may(a, phi)), f_bot()}, {}};
}

inline Derivation d_bot_right2(const Action& a) {
    return {Rule::BotRight2, {f_may(a, f_bot()), f_bot()}, {}};
}

inline Derivation d_bang_right1(Derivation d, const ActionSet& bigger) {
    if (d.concl.rhs->kind != FKind::Bang)
        throw std::logic_error("Bang-Right1: premise succedent is not a tantum");
    for (const auto& a : d.concl.rhs->acts)
        if (!bigger.count(a))
            throw std::logic_error("Bang-Right1: not a superset");
    Sequent c{d.concl.lhs, f_bang(bigger)};
    return {Rule::BangRight1, std::move(c), {std::move(d)}};
}

inline Derivation d_bang_right2(Derivation a, Derivation b) {
    if (a.concl.rhs->kind != FKind::Bang || b.concl.rhs->kind != FKind::Bang)
        throw std::logic_error("Bang-Right2: succedents must be tanta");
    if (!struct_equal(a.concl.lhs, b.concl.lhs))
        throw std::logic_error("Bang-Right2: antecedents differ");
    ActionSet inter;
    for (const auto& x : a.concl.rhs->acts)
        if (b.concl.rhs->acts.count(x)) inter.insert(x);
    Sequent c{a.concl.lhs, f_bang(std::move(inter))};
    return {Rule::BangRight2, std::move(c), {std::move(a), std::move(b)}};
}

inline Derivation d_normal(const Action& a, Derivation d) {
    Sequent c{f_may(a, d.concl.lhs), f_may(a, d.concl.rhs)};
    return {Rule::Normal, std::move(c), {std::move(d)}};
}

inline Derivation d_det(Derivation d) {
    const Formula& r = d.concl.rhs;
    if (r->kind != FKind::And || r->lhs->kind != FKind::May ||
        r->rhs->kind != FKind::May || r->lhs->action != r->rhs->action)
        throw std::logic_error("Det: premise succedent is not <a>psi /\\ <a>xi");
    Sequent c{d.concl.lhs, f_may(r->lhs->action, f_and(r->lhs->sub, r->rhs->sub))};
    return {Rule::Det, std::move(c), {std::move(d)}};
}

// ---------------------------------------------------------------------------
// Structural checker: verifies an arbitrary derivation tree node by node and
// reports every violation with its position (root, 0, 0.1, ...).

struct ProofCheck {
    bool ok = true;
    std::vector<std::string> errors;
};

namespace detail {

inline void check_node(const Derivation& d, const std::string& at, ProofCheck& out) {
    auto fail = [&](const std::string& msg) {
        out.ok = false;
        out.errors.push_back(at + ": " + std::string(rule_name(d.rule)) + ": " + msg);
    };
    const Sequent& c = d.concl;
    if (d.premises.size() != rule_arity(d.rule)) {
        fail("expected " + std::to_string(rule_arity(d.rule)) + " premises, got " +
             std::to_string(d.premises.size()));
        return;
    }
    auto p = [&](std::size_t i) -> const Sequent& { return d.premises[i].concl; };
    switch (d.rule) {
        case Rule::Id:
            if (!struct_equal(c.lhs, c.rhs)) fail("sides differ");
            break;
        case Rule::TopRight:
            if (c.rhs->kind != FKind::Top) fail("succedent is not T");
            break;
        case Rule::BotLeft:
            if (c.lhs->kind != FKind::Bottom) fail("antecedent is not F");
            break;
        case Rule::Trans:
            if (!struct_equal(p(0).lhs, c.lhs)) fail("left premise antecedent mismatch");
            if (!struct_equal(p(1).rhs, c.rhs)) fail("right premise succedent mismatch");
            if (!struct_equal(p(0).rhs, p(1).lhs)) fail("cut formulae differ");
            break;
        case Rule::AndLeft1:
            if (c.lhs->kind != FKind::And || !struct_equal(c.lhs->lhs, p(0).lhs) ||
                !struct_equal(c.rhs, p(0).rhs))
                fail("conclusion is not premise weakened on the right conjunct");
            break;
        case Rule::AndLeft2:
            if (c.lhs->kind != FKind::And || !struct_equal(c.lhs->rhs, p(0).lhs) ||
                !struct_equal(c.rhs, p(0).rhs))
                fail("conclusion is not premise weakened on the left conjunct");
            break;
        case Rule::AndRight:
            if (c.rhs->kind != FKind::And || !struct_equal(c.rhs->lhs, p(0).rhs) ||
                !struct_equal(c.rhs->rhs, p(1).rhs) ||
                !struct_equal(c.lhs, p(0).lhs) || !struct_equal(c.lhs, p(1).lhs))
                fail("conclusion does not combine the premises");
            break;
        case Rule::BotRight1:
            if (c.rhs->kind != FKind::Bottom || c.lhs->kind != FKind::And ||
                c.lhs->lhs->kind != FKind::Bang || c.lhs->rhs->kind != FKind::May)
                fail("conclusion is not !A /\\ <a>phi |- F");
            else if (c.lhs->lhs->acts.count(c.lhs->rhs->action))
                fail("action is allowed by the tantum");
            break;
        case Rule::BotRight2:
            if (c.rhs->kind != FKind::Bottom || c.lhs->kind != FKind::May ||
                c.lhs->sub->kind != FKind::Bottom)
                fail("conclusion is not <a>F |- F");
            break;
        case Rule::BangRight1: {
            if (c.rhs->kind != FKind::Bang || p(0).rhs->kind != FKind::Bang ||
                !struct_equal(c.lhs, p(0).lhs)) {
                fail("shape mismatch");
                break;
            }
            for (const auto& a : p(0).rhs->acts)
                if (!c.rhs->acts.count(a)) {
                    fail("tantum set is not enlarged");
                    break;
                }
            break;
        }
        case Rule::BangRight2: {
            if (c.rhs->kind != FKind::Bang || p(0).rhs->kind != FKind::Bang ||
                p(1).rhs->kind != FKind::Bang || !struct_equal(c.lhs, p(0).lhs) ||
                !struct_equal(c.lhs, p(1).lhs)) {
                fail("shape mismatch");
                break;
            }
            ActionSet inter;
            for (const auto& x : p(0).rhs->acts)
                if (p(1).rhs->acts.count(x)) inter.insert(x);
            if (c.rhs->acts != inter) fail("succedent is not the intersection");
            break;
        }
        case Rule::Normal:
            if (c.lhs->kind != FKind::May || c.rhs->kind != FKind::May ||
                c.lhs->action != c.rhs->action ||
                !struct_equal(c.lhs->sub, p(0).lhs) ||
                !struct_equal(c.rhs->sub, p(0).rhs))
                fail("conclusion is not the premise under one modality");
            break;
        case Rule::Det: {
            const Formula& r = p(0).rhs;
            if (r->kind != FKind::And || r->lhs->kind != FKind::May ||
                r->rhs->kind != FKind::May || r->lhs->action != r->rhs->action ||
                !struct_equal(c.lhs, p(0).lhs) || c.rhs->kind != FKind::May ||
                c.rhs->action != r->lhs->action || c.rhs->sub->kind != FKind::And ||
                !struct_equal(c.rhs->sub->lhs, r->lhs->sub) ||
                !struct_equal(c.rhs->sub->rhs, r->rhs->sub))
                fail("conclusion does not merge the premise modalities");
            break;
        }
    }
    for (std::size_t i = 0; i < d.premises.size(); ++i)
        check_node(d.premises[i], at == "root" ? std::to_string(i)
                                               : at + "." + std::to_string(i),
                   out);
}

} // namespace detail

inline ProofCheck check_derivation(const Derivation& d) {
    ProofCheck out;
    detail::check_node(d, "root", out);
    return out;
}

// ---------------------------------------------------------------------------
// Admissible rules.

// From φ₁ ∧ … ∧ φₙ ⊢ ψ infer ⟨a⟩φ₁ ∧ … ∧ ⟨a⟩φₙ ⊢ ⟨a⟩ψ, keeping the
// association of the antecedent.
inline Derivation derived_rule_normal_multi(const Action& a, const Derivation& d) {
    const Formula& ant = d.concl.lhs;
    if (ant->kind != FKind::And) return d_normal(a, d);
    std::function<Formula(const Formula&)> mapped = [&](const Formula& t) -> Formula {
        if (t->kind == FKind::And) return f_and(mapped(t->lhs), mapped(t->rhs));
        return f_may(a, t);
    };
    Formula big = mapped(ant);
    // D(t): big ⊢ ⟨a⟩t for every subtree t of the antecedent.
    std::function<Derivation(const Formula&, const Formula&)> select =
        [&](const Formula& whole, const Formula& target) -> Derivation {
        if (struct_equal(whole, target)) return d_id(target);
        if (whole->kind != FKind::And) throw std::logic_error("conjunct not found");
        std::function<bool(const Formula&)> has = [&](const Formula& t) -> bool {
            if (struct_equal(t, target)) return true;
            return t->kind == FKind::And && (has(t->lhs) || has(t->rhs));
        };
        if (has(whole->lhs)) return d_and_left1(select(whole->lhs, target), whole->rhs);
        return d_and_left2(select(whole->rhs, target), whole->lhs);
    };
    std::function<Derivation(const Formula&)> build = [&](const Formula& t) -> Derivation {
        if (t->kind != FKind::And) return select(big, f_may(a, t));
        return d_det(d_and_right(build(t->lhs), build(t->rhs)));
    };
    return d_trans(build(ant), d_normal(a, d));
}

// From φ ∧ !A′ ⊢ ψ infer φ ∧ !A ⊢ ψ whenever A ⊆ A′.
inline Derivation derived_rule_bang_left(const Derivation& d, const ActionSet& A) {
    const Formula& ant = d.concl.lhs;
    if (ant->kind != FKind::And || ant->rhs->kind != FKind::Bang)
        throw std::logic_error("Bang-Left: antecedent is not phi /\\ !A'");
    const Formula phi = ant->lhs;
    Derivation strengthen = d_and_right(
        d_and_left1(d_id(phi), f_bang(A)),
        d_bang_right1(d_and_left2(d_id(f_bang(A)), phi), ant->rhs->acts));
    return d_trans(strengthen, d);
}

// ---------------------------------------------------------------------------
// Derivation synthesis for valid entailments.

namespace detail {

// whole ⊢ target where target is a conjunct leaf of whole's ∧-tree.
inline Derivation select_conjunct(const Formula& whole, const Formula& target) {
    if (struct_equal(whole, target)) return d_id(target);
    if (whole->kind != FKind::And)
        throw std::logic_error("select_conjunct: target not found");
    std::function<bool(const Formula&)> has = [&](const Formula& t) -> bool {
        if (struct_equal(t, target)) return true;
        return t->kind == FKind::And && (has(t->lhs) || has(t->rhs));
    };
    if (has(whole->lhs)) return d_and_left1(select_conjunct(whole->lhs, target), whole->rhs);
    if (has(whole->rhs)) return d_and_left2(select_conjunct(whole->rhs, target), whole->lhs);
    throw std::logic_error("select_conjunct: target not found");
}

inline Formula wrap_path(const std::vector<Action>& p, std::size_t k, const Formula& tail) {
    if (k == p.size()) return tail;
    return f_may(p[k], wrap_path(p, k + 1, tail));
}

// char(m, w) ⊢ ⟨p⟩goal, where leaf builds char(m, end) ⊢ goal.
inline Derivation proj_path(const CathoristicModel& m, const StateId& w,
                            const std::vector<Action>& p, std::size_t k,
                            const std::function<Derivation(const StateId&)>& leaf) {
    if (k == p.size()) return leaf(w);
    StateId t = *m.ts.step(w, p[k]);
    return d_trans(select_conjunct(char_at(m, w), f_may(p[k], char_at(m, t))),
                   d_normal(p[k], proj_path(m, t, p, k + 1, leaf)));
}

// ⟨p⟩x ∧ ⟨p⟩y ⊢ ⟨p⟩(x ∧ y).
inline Derivation merge_under_path(const std::vector<Action>& p, std::size_t k,
                                   const Formula& x, const Formula& y) {
    if (k == p.size()) return d_id(f_and(x, y));
    Formula l = f_and(wrap_path(p, k, x), wrap_path(p, k, y));
    return d_trans(d_det(d_id(l)),
                   d_normal(p[k], merge_under_path(p, k + 1, x, y)));
}

// char(m1, w) ∧ char(m2, w') ⊢ ⟨p⟩goal for a path present in both models;
// leaf builds char(m1, end) ∧ char(m2, end') ⊢ goal.
inline Derivation pair_proj(const CathoristicModel& m1, const CathoristicModel& m2,
                            const StateId& w, const StateId& w2,
                            const std::vector<Action>& p, std::size_t k,
                            const std::function<Derivation(const StateId&, const StateId&)>& leaf) {
    if (k == p.size()) return leaf(w, w2);
    StateId t1 = *m1.ts.step(w, p[k]);
    StateId t2 = *m2.ts.step(w2, p[k]);
    Formula c1 = char_at(m1, t1);
    Formula c2 = char_at(m2, t2);
    Derivation da = d_and_left1(select_conjunct(char_at(m1, w), f_may(p[k], c1)),
                                char_at(m2, w2));
    Derivation db = d_and_left2(select_conjunct(char_at(m2, w2), f_may(p[k], c2)),
                                char_at(m1, w));
    return d_trans(d_det(d_and_right(std::move(da), std::move(db))),
                   d_normal(p[k], pair_proj(m1, m2, t1, t2, p, k + 1, leaf)));
}

// ⟨a₁…aₙ⟩!X ∧ ⟨a₁…aₙ⟩⟨b⟩⊤ ⊢ ⊥.
inline Derivation clash_along_path(const std::vector<Action>& p, std::size_t k,
                                   const ActionSet& X, const Action& b) {
    if (k == p.size()) return d_bot_right1(X, b, f_top());
    Formula l = f_and(wrap_path(p, k, f_bang(X)),
                      wrap_path(p, k, f_may(b, f_top())));
    return d_trans(d_det(d_id(l)),
                   d_trans(d_normal(p[k], clash_along_path(p, k + 1, X, b)),
                           d_bot_right2(p[k])));
}

// Walks a tree model along a path from the root; nullopt if it breaks.
inline std::optional<StateId> walk(const CathoristicModel& m,
                                   const std::vector<Action>& p) {
    StateId s = m.start;
    for (const auto& a : p) {
        auto t = m.ts.step(s, a);
        if (!t) return std::nullopt;
        s = *t;
    }
    return s;
}

// char(m1) ∧ char(m2) ⊢ F, given that the merge of two non-bottom trees is
// inconsistent: finds a path after which one side's transition violates the
// other side's tantum.
inline Derivation lemma6_clash(const CathoristicModel& m1, const CathoristicModel& m2) {
    struct Conflict {
        std::vector<Action> path;
        Action b;
        bool may_is_left;
        ActionSet X;
    };
    std::optional<Conflict> found;
    std::function<void(const StateId&, const StateId&, std::vector<Action>&)> search =
        [&](const StateId& w, const StateId& w2, std::vector<Action>& path) {
            if (found) return;
            for (const auto& b : m1.ts.out_actions(w))
                if (!m2.ts.label(w2).allows(b)) {
                    found = Conflict{path, b, true, m2.ts.label(w2).acts};
                    return;
                }
            for (const auto& b : m2.ts.out_actions(w2))
                if (!m1.ts.label(w).allows(b)) {
                    found = Conflict{path, b, false, m1.ts.label(w).acts};
                    return;
                }
            for (const auto& [a, t1] : m1.ts.out(w)) {
                auto t2 = m2.ts.step(w2, a);
                if (!t2) continue;
                path.push_back(a);
                search(t1, *t2, path);
                path.pop_back();
                if (found) return;
            }
        };
    std::vector<Action> path;
    search(m1.start, m2.start, path);
    if (!found) throw std::logic_error("lemma6_clash: no conflict in inconsistent merge");

    const CathoristicModel& may_m = found->may_is_left ? m1 : m2;
    const CathoristicModel& bang_m = found->may_is_left ? m2 : m1;
    const Action b = found->b;
    const ActionSet X = found->X;

    Derivation d_may = proj_path(may_m, may_m.start, found->path, 0,
                                 [&](const StateId& end) {
                                     StateId child = *may_m.ts.step(end, b);
                                     return d_trans(
                                         select_conjunct(char_at(may_m, end),
                                                         f_may(b, char_at(may_m, child))),
                                         d_normal(b, d_top_right(char_at(may_m, child))));
                                 });
    Derivation d_bang = proj_path(bang_m, bang_m.start, found->path, 0,
                                  [&](const StateId& end) {
                                      return select_conjunct(char_at(bang_m, end),
                                                             f_bang(X));
                                  });
    Formula c1 = char_at(m1, m1.start);
    Formula c2 = char_at(m2, m2.start);
    Derivation left = found->may_is_left ? d_and_left2(std::move(d_bang), c1)
                                         : d_and_left1(std::move(d_bang), c2);
    Derivation right = found->may_is_left ? d_and_left1(std::move(d_may), c2)
                                          : d_and_left2(std::move(d_may), c1);
    Derivation pair = d_and_right(std::move(left), std::move(right));
    return d_trans(std::move(pair), clash_along_path(found->path, 0, X, b));
}

// char(m1) ∧ char(m2) ⊢ char(m1 ⊓ m2) when the merge is consistent.
inline Derivation lemma6_consistent(const CathoristicModel& m1,
                                    const CathoristicModel& m2,
                                    const CathoristicModel& g) {
    Formula c1 = char_at(m1, m1.start);
    Formula c2 = char_at(m2, m2.start);
    Formula lhs = f_and(c1, c2);

    // LHS ⊢ ⟨path⟩conjunct-subtree of char(g, u).
    std::function<Derivation(const StateId&, std::vector<Action>&, const Formula&)>
        build = [&](const StateId& u, std::vector<Action>& path,
                    const Formula& c) -> Derivation {
        if (c->kind == FKind::And) {
            Derivation dl = build(u, path, c->lhs);
            Derivation dr = build(u, path, c->rhs);
            return d_trans(d_and_right(std::move(dl), std::move(dr)),
                           merge_under_path(path, 0, c->lhs, c->rhs));
        }
        if (c->kind == FKind::May) {
            StateId v = *g.ts.step(u, c->action);
            path.push_back(c->action);
            Derivation d = build(v, path, c->sub);
            path.pop_back();
            return d;
        }
        auto w1 = walk(m1, path);
        auto w2 = walk(m2, path);
        if (c->kind == FKind::Top) {
            if (path.empty()) return d_top_right(lhs);
            // The full path lives within a single input model.
            if (w1)
                return d_and_left1(
                    proj_path(m1, m1.start, path, 0,
                              [&](const StateId& e) { return d_top_right(char_at(m1, e)); }),
                    c2);
            return d_and_left2(
                proj_path(m2, m2.start, path, 0,
                          [&](const StateId& e) { return d_top_right(char_at(m2, e)); }),
                c1);
        }
        if (c->kind != FKind::Bang) throw std::logic_error("unexpected char conjunct");
        const ActionSet& X = c->acts;
        bool fin1 = w1 && !m1.ts.label(*w1).all;
        bool fin2 = w2 && !m2.ts.label(*w2).all;
        if (fin1 && fin2) {
            // Both sides constrain: intersect the tanta under the path.
            Derivation leaf_d = pair_proj(
                m1, m2, m1.start, m2.start, path, 0,
                [&](const StateId& e1, const StateId& e2) {
                    Formula ce1 = char_at(m1, e1);
                    Formula ce2 = char_at(m2, e2);
                    return d_bang_right2(
                        d_and_left1(select_conjunct(ce1, f_bang(m1.ts.label(e1).acts)), ce2),
                        d_and_left2(select_conjunct(ce2, f_bang(m2.ts.label(e2).acts)), ce1));
                });
            return leaf_d;
        }
        const CathoristicModel& src = fin1 ? m1 : m2;
        Derivation d = proj_path(src, src.start, path, 0, [&](const StateId& e) {
            return select_conjunct(char_at(src, e), f_bang(X));
        });
        return fin1 ? d_and_left1(std::move(d), c2) : d_and_left2(std::move(d), c1);
    };

    std::vector<Action> path;
    return build(g.start, path, char_at(g, g.start));
}

inline Derivation lemma6(const CathoristicModel& m1, const CathoristicModel& m2) {
    LatticeModel g = glb(LatticeModel::of(m1), LatticeModel::of(m2));
    if (g.is_bottom()) return lemma6_clash(m1, m2);
    return lemma6_consistent(m1, m2, *g.model);
}

// char(m, w) ⊢ φ whenever (m, w) ⊨ φ.
inline Derivation lemma4_at(const CathoristicModel& m, const StateId& w,
                            const Formula& f) {
    switch (f->kind) {
        case FKind::Top: return d_top_right(char_at(m, w));
        case FKind::And:
            return d_and_right(lemma4_at(m, w, f->lhs), lemma4_at(m, w, f->rhs));
        case FKind::May: {
            auto t = m.ts.step(w, f->action);
            if (!t) throw std::logic_error("lemma4: model does not satisfy formula");
            return d_trans(
                select_conjunct(char_at(m, w), f_may(f->action, char_at(m, *t))),
                d_normal(f->action, lemma4_at(m, *t, f->sub)));
        }
        case FKind::Bang: {
            const StateLabel& l = m.ts.label(w);
            if (l.all || !l.subset_of(f->acts))
                throw std::logic_error("lemma4: model does not satisfy formula");
            Derivation d = select_conjunct(char_at(m, w), f_bang(l.acts));
            if (l.acts == f->acts) return d;
            return d_bang_right1(std::move(d), f->acts);
        }
        default:
            throw std::logic_error("lemma4: core dialect only");
    }
}

// f ⊢ char(simpl(f)), with F standing in for char(⊥).
inline Derivation lemma5(const Formula& f) {
    switch (f->kind) {
        case FKind::Top: return d_id(f_top());
        case FKind::Bottom: return d_id(f_bot());
        case FKind::Bang: return d_id(f);
        case FKind::May: {
            Derivation d = lemma5(f->sub);
            if (d.concl.rhs->kind == FKind::Bottom)
                return d_trans(d_normal(f->action, std::move(d)),
                               d_bot_right2(f->action));
            return d_normal(f->action, std::move(d));
        }
        case FKind::And: {
            Derivation d1 = lemma5(f->lhs);
            Derivation d2 = lemma5(f->rhs);
            if (d1.concl.rhs->kind == FKind::Bottom)
                return d_and_left1(std::move(d1), f->rhs);
            if (d2.concl.rhs->kind == FKind::Bottom)
                return d_and_left2(std::move(d2), f->lhs);
            LatticeModel s1 = simpl(f->lhs);
            LatticeModel s2 = simpl(f->rhs);
            Derivation pair = d_and_right(d_and_left1(std::move(d1), f->rhs),
                                          d_and_left2(std::move(d2), f->lhs));
            return d_trans(std::move(pair), lemma6(*s1.model, *s2.model));
        }
        default:
            throw std::logic_error("lemma5: core dialect only");
    }
}

} // namespace detail

struct DeriveResult {
    std::optional<Derivation> derivation;
    // On failure, the simplification of the antecedent: a countermodel shape
    // from which a separating extension can be built.
    std::optional<LatticeModel> countermodel;
    bool entailed() const { return derivation.has_value(); }
};

// Synthesizes a derivation of f ⊢ g, or reports non-entailment.
inline DeriveResult derive(const Formula& f, const Formula& g) {
    if (!entails(f, g)) return {std::nullopt, simpl(f)};
    Derivation d5 = detail::lemma5(f);
    LatticeModel s = simpl(f);
    if (s.is_bottom()) return {d_trans(std::move(d5), d_bot_left(g)), std::nullopt};
    if (struct_equal(d5.concl.rhs, g)) return {std::move(d5), std::nullopt};
    Derivation d4 = detail::lemma4_at(*s.model, s.model->start, g);
    return {d_trans(std::move(d5), std::move(d4)), std::nullopt};
}

// ---------------------------------------------------------------------------
// S-expression serialization: (Rule "lhs |- rhs" premise*).

inline void derivation_to_sexpr(const Derivation& d, std::ostream& os) {
    os << '(' << rule_name(d.rule) << " \"" << print_formula(d.concl.lhs)
       << " |- " << print_formula(d.concl.rhs) << '"';
    for (const auto& p : d.premises) {
        os << ' ';
        derivation_to_sexpr(p, os);
    }
    os << ')';
}

inline std::string derivation_to_sexpr(const Derivation& d) {
    std::ostringstream os;
    derivation_to_sexpr(d, os);
    return os.str();
}

namespace detail {

struct SexprParser {
    const std::string& s;
    std::size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    [[noreturn]] void err(const std::string& msg) {
        throw ParseError(i, msg);
    }
    void expect(char c) {
        skip();
        if (i >= s.size() || s[i] != c) err(std::string("expected '") + c + "'");
        ++i;
    }
    Derivation node() {
        expect('(');
        skip();
        std::size_t start = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-'))
            ++i;
        auto r = rule_from_name(s.substr(start, i - start));
        if (!r) err("unknown rule name");
        skip();
        if (i >= s.size() || s[i] != '"') err("expected quoted sequent");
        ++i;
        std::size_t q = s.find('"', i);
        if (q == std::string::npos) err("unterminated sequent");
        std::string seq = s.substr(i, q - i);
        i = q + 1;
        auto sep = seq.find(" |- ");
        if (sep == std::string::npos) err("sequent must contain ' |- '");
        Derivation d;
        d.rule = *r;
        d.concl.lhs = parse_formula(seq.substr(0, sep));
        d.concl.rhs = parse_formula(seq.substr(sep + 4));
        skip();
        while (i < s.size() && s[i] == '(') {
            d.premises.push_back(node());
            skip();
        }
        expect(')');
        return d;
    }
};

} // namespace detail

inline Derivation derivation_from_sexpr(const std::string& text) {
    detail::SexprParser p{text};
    Derivation d = p.node();
    p.skip();
    if (p.i != text.size()) throw ParseError(p.i, "trailing input");
    return d;
}

} // namespace cl
