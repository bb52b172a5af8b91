#pragma once

// First-order translations: the single-sorted two-variable fragment, the
// two-sorted fragment with guard formulae, model translation/extraction,
// a finite-model evaluator, and the Hennessy-Milner translation.

#include <tuple>

#include "cl/semantics.hpp"

namespace cl {

enum class FolSort { State, Act };

// An action-position term: a variable or an action constant.
struct FolTerm {
    bool is_var = false;
    std::string name;
};

inline FolTerm fol_var(std::string n) { return {true, std::move(n)}; }
inline FolTerm fol_const(Action a) { return {false, std::move(a)}; }

enum class FolKind {
    Top,
    Bot,
    And,
    Or,
    Not,
    Implies,
    Exists,
    Forall,
    Arrow,     // Arrow_a(v1, v2), single-sorted
    Restrict,  // Restrict{A}(v1), single-sorted
    Allowed,   // Allowed(v1, t1), two-sorted
    Arrow3,    // Arrow(v1, t1, v2), two-sorted
    Eq,        // t1 = t2 (actions) or v1 = v2 (states)
};

struct FolNode;
using FolFormula = std::shared_ptr<const FolNode>;

struct FolNode {
    FolKind kind;
    FolFormula lhs, rhs;     // And/Or/Implies; Not and quantifiers use lhs
    std::string var;         // quantified variable
    FolSort sort = FolSort::State;
    Action action;           // Arrow
    ActionSet acts;          // Restrict
    std::string v1, v2;      // state variables
    FolTerm t1, t2;          // action terms; Eq over states stores vars here
};

inline FolFormula fol_top() {
    static FolFormula t = std::make_shared<FolNode>(FolNode{FolKind::Top});
    return t;
}
inline FolFormula fol_bot() {
    static FolFormula b = std::make_shared<FolNode>(FolNode{FolKind::Bot});
    return b;
}
inline FolFormula fol_and(FolFormula a, FolFormula b) {
    FolNode n{FolKind::And};
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_or(FolFormula a, FolFormula b) {
    FolNode n{FolKind::Or};
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_not(FolFormula a) {
    FolNode n{FolKind::Not};
    n.lhs = std::move(a);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_implies(FolFormula a, FolFormula b) {
    FolNode n{FolKind::Implies};
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_exists(FolSort s, std::string var, FolFormula body) {
    FolNode n{FolKind::Exists};
    n.sort = s;
    n.var = std::move(var);
    n.lhs = std::move(body);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_forall(FolSort s, std::string var, FolFormula body) {
    FolNode n{FolKind::Forall};
    n.sort = s;
    n.var = std::move(var);
    n.lhs = std::move(body);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_arrow(Action a, std::string x, std::string y) {
    FolNode n{FolKind::Arrow};
    n.action = std::move(a);
    n.v1 = std::move(x);
    n.v2 = std::move(y);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_restrict(ActionSet A, std::string x) {
    FolNode n{FolKind::Restrict};
    n.acts = std::move(A);
    n.v1 = std::move(x);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_allowed(std::string x, FolTerm a) {
    FolNode n{FolKind::Allowed};
    n.v1 = std::move(x);
    n.t1 = std::move(a);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_arrow3(std::string x, FolTerm a, std::string y) {
    FolNode n{FolKind::Arrow3};
    n.v1 = std::move(x);
    n.t1 = std::move(a);
    n.v2 = std::move(y);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_eq_act(FolTerm a, FolTerm b) {
    FolNode n{FolKind::Eq};
    n.sort = FolSort::Act;
    n.t1 = std::move(a);
    n.t2 = std::move(b);
    return std::make_shared<FolNode>(std::move(n));
}
inline FolFormula fol_eq_state(std::string x, std::string y) {
    FolNode n{FolKind::Eq};
    n.sort = FolSort::State;
    n.v1 = std::move(x);
    n.v2 = std::move(y);
    return std::make_shared<FolNode>(std::move(n));
}

// ---------------------------------------------------------------------------
// Printing. Precedence: atoms > ~ > /\ > \/ > -> > quantifiers; quantifier
// bodies extend as far right as possible.

namespace detail {

inline void print_fol_into(const FolFormula& f, std::string& out, int ctx);

inline void print_acts_braced(const ActionSet& A, std::string& out) {
    out += '{';
    bool first = true;
    for (const auto& a : A) {
        if (!first) out += ',';
        first = false;
        out += a;
    }
    out += '}';
}

inline void print_fol_into(const FolFormula& f, std::string& out, int ctx) {
    // ctx: required minimum level; 0 = quantifier scope, 1 = ->, 2 = \/,
    // 3 = /\, 4 = unary/atom.
    auto paren = [&](int level, auto&& body) {
        bool need = level < ctx;
        if (need) out += '(';
        body();
        if (need) out += ')';
    };
    switch (f->kind) {
        case FolKind::Top: out += "T"; break;
        case FolKind::Bot: out += "F"; break;
        case FolKind::And:
            paren(3, [&] {
                print_fol_into(f->lhs, out, 4);
                out += " /\\ ";
                print_fol_into(f->rhs, out, 3);
            });
            break;
        case FolKind::Or:
            paren(2, [&] {
                print_fol_into(f->lhs, out, 3);
                out += " \\/ ";
                print_fol_into(f->rhs, out, 2);
            });
            break;
        case FolKind::Implies:
            paren(1, [&] {
                print_fol_into(f->lhs, out, 2);
                out += " -> ";
                print_fol_into(f->rhs, out, 1);
            });
            break;
        case FolKind::Not:
            out += '~';
            print_fol_into(f->lhs, out, 4);
            break;
        case FolKind::Exists:
        case FolKind::Forall:
            paren(0, [&] {
                out += f->kind == FolKind::Exists ? "exists" : "forall";
                out += f->sort == FolSort::State ? "_st " : "_act ";
                out += f->var;
                out += ". ";
                print_fol_into(f->lhs, out, 0);
            });
            break;
        case FolKind::Arrow:
            out += "Arrow_" + f->action + "(" + f->v1 + "," + f->v2 + ")";
            break;
        case FolKind::Restrict:
            out += "Restrict";
            print_acts_braced(f->acts, out);
            out += "(" + f->v1 + ")";
            break;
        case FolKind::Allowed:
            out += "Allowed(" + f->v1 + "," + f->t1.name + ")";
            break;
        case FolKind::Arrow3:
            out += "Arrow(" + f->v1 + "," + f->t1.name + "," + f->v2 + ")";
            break;
        case FolKind::Eq:
            if (f->sort == FolSort::Act) out += f->t1.name + "=" + f->t2.name;
            else out += f->v1 + "=" + f->v2;
            break;
    }
}

} // namespace detail

inline std::string print_fol(const FolFormula& f) {
    std::string out;
    detail::print_fol_into(f, out, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Translations of formulae.

// Single-sorted: the two fixed variables x and y alternate at each modality.
inline FolFormula translate_fol1(const Formula& f, bool at_x = true) {
    const std::string here = at_x ? "x" : "y";
    const std::string other = at_x ? "y" : "x";
    switch (f->kind) {
        case FKind::Top: return fol_top();
        case FKind::And:
            return fol_and(translate_fol1(f->lhs, at_x), translate_fol1(f->rhs, at_x));
        case FKind::May:
            return fol_exists(FolSort::State, other,
                              fol_and(fol_arrow(f->action, here, other),
                                      translate_fol1(f->sub, !at_x)));
        case FKind::Bang: return fol_restrict(f->acts, here);
        case FKind::Bottom:
            throw std::invalid_argument(
                "BottomUnsupported: the target fragment has no falsity");
        default:
            throw std::invalid_argument("translate_fol1: core dialect only");
    }
}

// Two-sorted: state variables alternate x/y; the action variable paired
// with x is a, the one paired with y is b.
inline FolFormula translate_fol2(const Formula& f, bool at_x = true) {
    const std::string here = at_x ? "x" : "y";
    const std::string other = at_x ? "y" : "x";
    const std::string avar = at_x ? "a" : "b";
    switch (f->kind) {
        case FKind::Top: return fol_top();
        case FKind::And:
            return fol_and(translate_fol2(f->lhs, at_x), translate_fol2(f->rhs, at_x));
        case FKind::May:
            return fol_exists(FolSort::State, other,
                              fol_and(fol_arrow3(here, fol_const(f->action), other),
                                      translate_fol2(f->sub, !at_x)));
        case FKind::Bang: {
            // The membership shorthand expands to an equality disjunction;
            // the empty disjunction is falsity.
            FolFormula member = fol_bot();
            bool first = true;
            for (const auto& a : f->acts) {
                FolFormula eq = fol_eq_act(fol_var(avar), fol_const(a));
                member = first ? eq : fol_or(std::move(member), std::move(eq));
                first = false;
            }
            return fol_forall(FolSort::Act, avar,
                              fol_implies(fol_allowed(here, fol_var(avar)),
                                          std::move(member)));
        }
        case FKind::Bottom:
            throw std::invalid_argument(
                "BottomUnsupported: the target fragment has no falsity");
        default:
            throw std::invalid_argument("translate_fol2: core dialect only");
    }
}

// Guard formulae for the two-sorted signature.
inline FolFormula guard_admis() {
    return fol_forall(
        FolSort::State, "s",
        fol_forall(FolSort::Act, "a",
                   fol_forall(FolSort::State, "t",
                              fol_implies(fol_arrow3("s", fol_var("a"), "t"),
                                          fol_allowed("s", fol_var("a"))))));
}

inline FolFormula guard_det() {
    return fol_forall(
        FolSort::State, "s",
        fol_forall(
            FolSort::Act, "a",
            fol_forall(
                FolSort::State, "t",
                fol_forall(FolSort::State, "t'",
                           fol_implies(fol_and(fol_arrow3("s", fol_var("a"), "t"),
                                               fol_arrow3("s", fol_var("a"), "t'")),
                                       fol_eq_state("t", "t'"))))));
}

inline std::pair<FolFormula, FolFormula> guards() {
    return {guard_admis(), guard_det()};
}

// ---------------------------------------------------------------------------
// First-order models and evaluation.

struct FolModel {
    std::set<StateId> states;
    ActionSet actions;  // action universe (two-sorted)
    std::set<std::tuple<StateId, Action, StateId>> arrows;
    // Allowed(s, a) iff allowed.at(s).allows(a); Restrict_A(s) iff the label
    // is a finite subset of A. States absent from the map default to Sigma.
    std::map<StateId, StateLabel> allowed;

    StateLabel label_of(const StateId& s) const {
        auto it = allowed.find(s);
        return it == allowed.end() ? StateLabel::all_actions() : it->second;
    }
};

enum class FolTarget { Fol1, Fol2 };

inline FolModel translate_model(const CathoristicTS& ts, FolTarget target,
                                const Alphabet& sigma = Alphabet::make_open()) {
    if (target == FolTarget::Fol2 && sigma.open)
        throw std::invalid_argument(
            "OpenAlphabet: the two-sorted translation needs a finite action sort");
    FolModel m;
    m.states = ts.states;
    for (const auto& t : ts.transitions) {
        m.arrows.insert({t.src, t.act, t.dst});
        m.actions.insert(t.act);
    }
    for (const auto& [s, l] : ts.labels) {
        m.allowed.emplace(s, l);
        if (!l.all) m.actions.insert(l.acts.begin(), l.acts.end());
    }
    if (!sigma.open) m.actions.insert(sigma.actions.begin(), sigma.actions.end());
    return m;
}

struct FolEnv {
    std::map<std::string, StateId> states;
    std::map<std::string, Action> acts;
};

namespace detail {

inline const StateId& fol_state(const FolEnv& env, const std::string& v) {
    auto it = env.states.find(v);
    if (it == env.states.end())
        throw std::invalid_argument("SortMismatch: unbound state variable " + v);
    return it->second;
}

inline Action fol_action(const FolEnv& env, const FolTerm& t) {
    if (!t.is_var) return t.name;
    auto it = env.acts.find(t.name);
    if (it == env.acts.end())
        throw std::invalid_argument("SortMismatch: unbound action variable " + t.name);
    return it->second;
}

} // namespace detail

namespace detail {

inline bool eval_fol_rec(const FolModel& m, const FolFormula& f, FolEnv& env) {
    switch (f->kind) {
        case FolKind::Top: return true;
        case FolKind::Bot: return false;
        case FolKind::And: return eval_fol_rec(m, f->lhs, env) && eval_fol_rec(m, f->rhs, env);
        case FolKind::Or: return eval_fol_rec(m, f->lhs, env) || eval_fol_rec(m, f->rhs, env);
        case FolKind::Not: return !eval_fol_rec(m, f->lhs, env);
        case FolKind::Implies:
            return !eval_fol_rec(m, f->lhs, env) || eval_fol_rec(m, f->rhs, env);
        case FolKind::Exists:
        case FolKind::Forall: {
            bool want_any = f->kind == FolKind::Exists;
            if (f->sort == FolSort::State) {
                auto old = env.states.find(f->var) != env.states.end()
                               ? std::optional<StateId>(env.states[f->var])
                               : std::nullopt;
                for (const auto& s : m.states) {
                    env.states[f->var] = s;
                    if (eval_fol_rec(m, f->lhs, env) == want_any) {
                        if (old) env.states[f->var] = *old;
                        else env.states.erase(f->var);
                        return want_any;
                    }
                }
                if (old) env.states[f->var] = *old;
                else env.states.erase(f->var);
                return !want_any;
            }
            auto old = env.acts.find(f->var) != env.acts.end()
                           ? std::optional<Action>(env.acts[f->var])
                           : std::nullopt;
            for (const auto& a : m.actions) {
                env.acts[f->var] = a;
                if (eval_fol_rec(m, f->lhs, env) == want_any) {
                    if (old) env.acts[f->var] = *old;
                    else env.acts.erase(f->var);
                    return want_any;
                }
            }
            if (old) env.acts[f->var] = *old;
            else env.acts.erase(f->var);
            return !want_any;
        }
        case FolKind::Arrow:
            return m.arrows.count({fol_state(env, f->v1), f->action,
                                   fol_state(env, f->v2)}) > 0;
        case FolKind::Restrict:
            return m.label_of(fol_state(env, f->v1)).subset_of(f->acts);
        case FolKind::Allowed:
            return m.label_of(fol_state(env, f->v1))
                .allows(fol_action(env, f->t1));
        case FolKind::Arrow3:
            return m.arrows.count({fol_state(env, f->v1),
                                   fol_action(env, f->t1),
                                   fol_state(env, f->v2)}) > 0;
        case FolKind::Eq:
            if (f->sort == FolSort::Act)
                return fol_action(env, f->t1) == fol_action(env, f->t2);
            return fol_state(env, f->v1) == fol_state(env, f->v2);
    }
    return false;
}

} // namespace detail

inline bool eval_fol(const FolModel& m, const FolFormula& f, FolEnv env = {}) {
    return detail::eval_fol_rec(m, f, env);
}

// ---------------------------------------------------------------------------
// Extraction of a transition system from a two-sorted model satisfying the
// guards, restricted to the given alphabet.

inline CathoristicTS extract_model(const FolModel& m, const Alphabet& sigma) {
    if (sigma.open)
        throw std::invalid_argument("OpenAlphabet: extraction needs a closed alphabet");
    if (!eval_fol(m, guard_admis()) || !eval_fol(m, guard_det()))
        throw std::invalid_argument("GuardsViolated: model breaks admissibility or determinism");
    ActionSet X;  // actions interpreted by the model but outside sigma
    for (const auto& a : m.actions)
        if (!sigma.actions.count(a)) X.insert(a);
    CathoristicTS ts;
    ts.states = m.states;
    for (const auto& [from, a, to] : m.arrows)
        if (!X.count(a)) ts.transitions.insert({from, a, to});
    for (const auto& s : m.states) {
        StateLabel l = m.label_of(s);
        if (!l.all)
            for (const auto& a : X) l.acts.erase(a);
        ts.labels.emplace(s, std::move(l));
    }
    return ts;
}

// ---------------------------------------------------------------------------
// Hennessy-Milner translation. The result lives in the Neg dialect: the
// tantum becomes a finite conjunction of negated modalities over sigma.

inline Formula translate_hml(const Formula& f, const Alphabet& sigma) {
    if (sigma.open)
        throw std::invalid_argument(
            "OpenAlphabet: the tantum clause needs a finite alphabet");
    switch (f->kind) {
        case FKind::Top: return f_top();
        case FKind::And:
            return f_and(translate_hml(f->lhs, sigma), translate_hml(f->rhs, sigma));
        case FKind::May:
            return f_may(f->action, translate_hml(f->sub, sigma));
        case FKind::Bang: {
            std::vector<Formula> conj;
            for (const auto& a : sigma.actions)
                if (!f->acts.count(a)) conj.push_back(f_neg(f_may(a, f_top())));
            return f_and_all(conj);
        }
        case FKind::Bottom:
            throw std::invalid_argument(
                "BottomUnsupported: Hennessy-Milner logic lacks falsity");
        default:
            throw std::invalid_argument("translate_hml: core dialect only");
    }
}

// The determinism constraint for a subformula-closed set of cathoristic
// formulae whose actions come from A, expressed over the translations.
inline Formula hml_determinism_constraint(const std::vector<Formula>& gamma,
                                          const ActionSet& A,
                                          const Alphabet& sigma) {
    std::vector<Formula> conj;
    for (const auto& a : A)
        for (const auto& phi : gamma)
            for (const auto& psi : gamma) {
                Formula hp = translate_hml(phi, sigma);
                Formula hq = translate_hml(psi, sigma);
                conj.push_back(f_neg(f_and(
                    f_may(a, hp),
                    f_and(f_may(a, hq), f_neg(f_may(a, f_and(hp, hq)))))));
            }
    return f_and_all(conj);
}

// Classical evaluation of Hennessy-Milner formulae on pure models.
inline bool eval_hml_at(const PureModel& m, const StateId& s, const Formula& f) {
    switch (f->kind) {
        case FKind::Top: return true;
        case FKind::Bottom: return false;
        case FKind::Neg: return !eval_hml_at(m, s, f->sub);
        case FKind::And:
            return eval_hml_at(m, s, f->lhs) && eval_hml_at(m, s, f->rhs);
        case FKind::Or:
            return eval_hml_at(m, s, f->lhs) || eval_hml_at(m, s, f->rhs);
        case FKind::May:
            for (const auto& t : m.step_all(s, f->action))
                if (eval_hml_at(m, t, f->sub)) return true;
            return false;
        default:
            throw std::invalid_argument("eval_hml: no tantum in Hennessy-Milner logic");
    }
}

inline bool eval_hml(const PureModel& m, const Formula& f) {
    return eval_hml_at(m, m.start, f);
}

} // namespace cl
