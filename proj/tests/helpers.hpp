#pragma once

// Shared test utilities: random generators and exhaustive small families.

#include <functional>
#include <random>

#include "cl/model.hpp"
#include "cl/syntax.hpp"

namespace clt {

using namespace cl;

inline Formula random_core(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth == 0 ? 1 : 3);
    const char* names[] = {"a", "b", "c"};
    std::uniform_int_distribution<int> act(0, 2);
    switch (pick(rng)) {
        case 0: return f_top();
        case 1: {
            ActionSet as;
            for (int i = 0; i < 3; ++i)
                if (act(rng) == 0) as.insert(names[i]);
            return f_bang(as);
        }
        case 2: return f_may(names[act(rng)], random_core(rng, depth - 1));
        default:
            return f_and(random_core(rng, depth - 1), random_core(rng, depth - 1));
    }
}

// Random tree-shaped cathoristic model over actions {a,b,c}; labels chosen
// from finite subsets and the whole alphabet, always admissible.
inline CathoristicModel random_tree_model(std::mt19937& rng, int max_depth,
                                          int max_branch = 2) {
    const std::vector<Action> acts = {"a", "b", "c"};
    CathoristicTS ts;
    int counter = 0;
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> lab(0, 4);

    // Builds the subtree rooted at a fresh state, returns its id and out-set.
    std::function<StateId(int)> build = [&](int depth) {
        StateId s = "t" + std::to_string(counter++);
        ts.states.insert(s);
        ActionSet outs;
        if (depth > 0) {
            int n = 0;
            for (const auto& a : acts) {
                if (n >= max_branch) break;
                if (coin(rng) == 0) continue;
                StateId child = build(depth - 1);
                ts.transitions.insert({s, a, child});
                outs.insert(a);
                ++n;
            }
        }
        // Label: out-set plus possibly extra actions, or the whole alphabet.
        int l = lab(rng);
        if (l == 0) {
            ts.labels.emplace(s, StateLabel::all_actions());
        } else {
            ActionSet as = outs;
            for (const auto& a : acts)
                if (coin(rng) == 0) as.insert(a);
            ts.labels.emplace(s, StateLabel::finite(std::move(as)));
        }
        return s;
    };
    StateId root = build(max_depth);
    return validate_model(ts, root);
}

// The exhaustive small formula family over Σ = {a,b}: all core formulae of
// modal depth ≤ 2 with tantum sets ⊆ {a,b}, bounded size, deduplicated by
// printed canonical form (conjunctions flattened and sorted).
inline std::string canon_key(const Formula& f);

inline void flatten_and(const Formula& f, std::vector<std::string>& out) {
    if (f->kind == FKind::And) {
        flatten_and(f->lhs, out);
        flatten_and(f->rhs, out);
    } else {
        out.push_back(canon_key(f));
    }
}

inline std::string canon_key(const Formula& f) {
    if (f->kind == FKind::And) {
        std::vector<std::string> parts;
        flatten_and(f, parts);
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        if (parts.size() == 1) return parts[0];
        std::string s = "(and";
        for (auto& p : parts) s += " " + p;
        return s + ")";
    }
    if (f->kind == FKind::May) return "<" + f->action + ">" + canon_key(f->sub);
    return print_formula(f);
}

// Exhaustive by AST size (≤ 4 nodes) and modal depth (≤ 2), deduplicated by
// canonical form. Roughly 140 formulae, so ~2·10⁴ ordered pairs.
inline std::vector<Formula> small_formula_family(int max_size = 4) {
    std::vector<std::vector<Formula>> by_size(max_size + 1);
    std::set<std::string> seen;
    auto add = [&](int n, const Formula& f) {
        if (modal_depth(f) > 2) return;
        if (seen.insert(canon_key(f)).second) by_size[n].push_back(f);
    };
    add(1, f_top());
    add(1, f_bot());
    add(1, f_bang({}));
    add(1, f_bang({"a"}));
    add(1, f_bang({"b"}));
    add(1, f_bang({"a", "b"}));
    for (int n = 2; n <= max_size; ++n) {
        for (const auto& f : by_size[n - 1])
            for (const char* a : {"a", "b"}) add(n, f_may(a, f));
        for (int i = 1; i + 1 < n + 1; ++i) {
            int j = n - 1 - i;
            if (j < 1 || j > max_size) continue;
            for (const auto& f : by_size[i])
                for (const auto& g : by_size[j]) add(n, f_and(f, g));
        }
    }
    std::vector<Formula> fam;
    for (auto& v : by_size) fam.insert(fam.end(), v.begin(), v.end());
    return fam;
}

} // namespace clt
