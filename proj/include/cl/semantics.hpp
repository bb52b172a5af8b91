#pragma once

// Satisfaction relations: core (state-labelled), extended (negation and
// disjunction), pure (label-free, out-set tantum), and quantified.

#include <map>

#include "cl/model.hpp"
#include "cl/syntax.hpp"

namespace cl {

// Core satisfaction at a given state. Negation-free formulae are purely
// conjunctive requirements, so an explicit worklist suffices and keeps the
// evaluation stack-safe for very deep formulae.
inline bool satisfies_at(const CathoristicTS& ts, const StateId& start,
                         const Formula& f) {
    std::vector<std::pair<StateId, const FormulaNode*>> work;
    work.emplace_back(start, f.get());
    while (!work.empty()) {
        auto [s, g] = work.back();
        work.pop_back();
        switch (g->kind) {
            case FKind::Top: break;
            case FKind::Bottom: return false;
            case FKind::Bang:
                if (!ts.label(s).subset_of(g->acts)) return false;
                break;
            case FKind::And:
                work.emplace_back(s, g->lhs.get());
                work.emplace_back(s, g->rhs.get());
                break;
            case FKind::May: {
                auto t = ts.step(s, g->action);
                if (!t) return false;
                work.emplace_back(*t, g->sub.get());
                break;
            }
            default:
                throw std::invalid_argument(
                    "satisfies: formula outside the core dialect (use eval_extended)");
        }
    }
    return true;
}

inline bool satisfies(const CathoristicModel& m, const Formula& f) {
    return satisfies_at(m.ts, m.start, f);
}

// Classical clauses for Neg/Or layered over the core ones.
inline bool eval_extended_at(const CathoristicTS& ts, const StateId& s,
                             const Formula& f) {
    switch (f->kind) {
        case FKind::Top: return true;
        case FKind::Bottom: return false;
        case FKind::Bang: return ts.label(s).subset_of(f->acts);
        case FKind::And:
            return eval_extended_at(ts, s, f->lhs) && eval_extended_at(ts, s, f->rhs);
        case FKind::Or:
            return eval_extended_at(ts, s, f->lhs) || eval_extended_at(ts, s, f->rhs);
        case FKind::Neg: return !eval_extended_at(ts, s, f->sub);
        case FKind::May: {
            auto t = ts.step(s, f->action);
            return t && eval_extended_at(ts, *t, f->sub);
        }
    }
    return false;
}

inline bool eval_extended(const CathoristicModel& m, const Formula& f) {
    return eval_extended_at(m.ts, m.start, f);
}

// Pure satisfaction: the tantum clause inspects the out-set instead of a
// label; modalities are existential (pure models may be non-deterministic).
inline bool satisfies_pure_at(const PureModel& p, const StateId& s, const Formula& f) {
    switch (f->kind) {
        case FKind::Top: return true;
        case FKind::Bottom: return false;
        case FKind::Bang: {
            ActionSet outs = p.out_actions(s);
            return std::includes(f->acts.begin(), f->acts.end(), outs.begin(),
                                 outs.end());
        }
        case FKind::And:
            return satisfies_pure_at(p, s, f->lhs) && satisfies_pure_at(p, s, f->rhs);
        case FKind::May:
            for (const auto& t : p.step_all(s, f->action))
                if (satisfies_pure_at(p, t, f->sub)) return true;
            return false;
        default:
            throw std::invalid_argument("satisfies_pure: core dialect only");
    }
}

inline bool satisfies_pure(const PureModel& p, const Formula& f) {
    return satisfies_pure_at(p, p.start, f);
}

// ---------------------------------------------------------------------------
// Quantified satisfaction over a closed alphabet.

using QEnv = std::map<std::string, Action>;

inline Action denote_term(const Term& t, const QEnv& env) {
    if (!t.is_var) return t.name;
    auto it = env.find(t.name);
    if (it == env.end())
        throw std::invalid_argument("unbound variable " + t.name);
    return it->second;
}

inline bool satisfies_quantified_at(const CathoristicTS& ts, const StateId& s,
                                    const QFormula& f, QEnv& env,
                                    const Alphabet& sigma) {
    switch (f->kind) {
        case QKind::Top: return true;
        case QKind::And:
            return satisfies_quantified_at(ts, s, f->lhs, env, sigma) &&
                   satisfies_quantified_at(ts, s, f->rhs, env, sigma);
        case QKind::May: {
            auto t = ts.step(s, denote_term(f->term, env));
            return t && satisfies_quantified_at(ts, *t, f->sub, env, sigma);
        }
        case QKind::Bang: {
            ActionSet denoted;
            for (const auto& t : f->terms) denoted.insert(denote_term(t, env));
            return ts.label(s).subset_of(denoted);
        }
        case QKind::Exists:
        case QKind::Forall: {
            const bool all = f->kind == QKind::Forall;
            auto saved = env.find(f->var) != env.end()
                             ? std::optional<Action>(env[f->var])
                             : std::nullopt;
            bool result = all;
            for (const auto& a : sigma.actions) {
                env[f->var] = a;
                bool sub = satisfies_quantified_at(ts, s, f->sub, env, sigma);
                if (all ? !sub : sub) {
                    result = !all;
                    break;
                }
            }
            if (saved)
                env[f->var] = *saved;
            else
                env.erase(f->var);
            return result;
        }
    }
    return false;
}

inline bool satisfies_quantified(const CathoristicModel& m, const QFormula& f,
                                 QEnv env, const Alphabet& sigma) {
    if (sigma.open)
        throw std::invalid_argument(
            "OpenAlphabet: quantified evaluation needs a closed alphabet");
    return satisfies_quantified_at(m.ts, m.start, f, env, sigma);
}

} // namespace cl
