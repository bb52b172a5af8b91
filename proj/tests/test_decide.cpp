#include <doctest.h>

#include "cl/decide.hpp"
#include "helpers.hpp"

using namespace cl;
using namespace cl::fixtures;

namespace {

Formula P(const char* t) { return parse_formula(t); }
Formula N(const char* t) { return parse_formula(t, Dialect::Neg); }

} // namespace

TEST_CASE("entailment examples") {
    CHECK(entails(P("<a>!{b,c} /\\ <a>!{c,d}"), P("<a>!{c}")));
    CHECK(entails(P("<a>!{b} /\\ <a><c>T"), P("<d>T")));
    CHECK(entails(P("<a><b>T"), P("<a>T")));
    CHECK(entails(P("F"), P("<a>T")));
    CHECK(entails(P("T"), P("T")));
    CHECK(!entails(P("T"), P("<a>T")));
    CHECK(!entails(P("<a>T"), P("<a><b>T")));
    CHECK(!entails(P("<a>!{b,c}"), P("<a>!{b}")));
    CHECK(entails(P("<a>!{b,c}"), P("<a>!{b,c,d}")));
    CHECK(!entails(P("!{a}"), P("<a>T")));
    CHECK(entails(P("!{}"), P("!{a}")));
}

TEST_CASE("incompatibility examples") {
    CHECK(incompatible(P("<a>T"), P("!{}")));
    CHECK(incompatible(P("<a>!{b}"), P("<a><c>T")));
    CHECK(!incompatible(P("<a>!{b}"), P("<a><b>T")));
    CHECK(incompatible(P("F"), P("T")));
    // Symmetry over the small family.
    auto fam = clt::small_formula_family();
    for (std::size_t i = 0; i < fam.size(); i += 7)
        for (std::size_t j = 0; j < fam.size(); j += 11)
            CHECK(incompatible(fam[i], fam[j]) == incompatible(fam[j], fam[i]));
}

TEST_CASE("entails agrees with the simulation order") {
    // f entails g iff simpl(f) lies below simpl(g).
    auto fam = clt::small_formula_family();
    for (const auto& f : fam)
        for (const auto& g : fam)
            CHECK(entails(f, g) == preceq(simpl(f), simpl(g)));
}

TEST_CASE("entails respects satisfaction on random models") {
    std::mt19937 rng(61);
    int checked = 0;
    while (checked < 400) {
        CathoristicModel m = clt::random_tree_model(rng, 3);
        Formula f = clt::random_core(rng, 3);
        Formula g = clt::random_core(rng, 3);
        if (!entails(f, g)) continue;
        ++checked;
        if (satisfies(m, f)) CHECK(satisfies(m, g));
    }
}

TEST_CASE("brandom witness certifies every non-entailment") {
    auto fam = clt::small_formula_family();
    for (std::size_t i = 0; i < fam.size(); i += 3)
        for (std::size_t j = 0; j < fam.size(); j += 5) {
            const Formula& f = fam[i];
            const Formula& g = fam[j];
            if (entails(f, g)) continue;
            Formula x = brandom_witness(f, g);
            CAPTURE(print_formula(f));
            CAPTURE(print_formula(g));
            CAPTURE(print_formula(x));
            CHECK(incompatible(g, x));
            CHECK(!incompatible(f, x));
        }
    CHECK_THROWS(brandom_witness(P("<a>T"), P("T")));
}

TEST_CASE("negation elimination clauses") {
    ActionSet S{"a", "b"};
    CHECK(print_formula(neg_eliminate(N("~<a>T"), S)) == "!{b} \\/ <a>F");
    CHECK(print_formula(neg_eliminate(N("~!{a}"), S)) == "<b>T");
    CHECK(print_formula(neg_eliminate(N("~!{a,b}"), S)) == "F");
    CHECK(print_formula(neg_eliminate(N("~T"), S)) == "F");
    CHECK(print_formula(neg_eliminate(N("~F"), S)) == "T");
    CHECK(print_formula(neg_eliminate(N("~(<a>T /\\ !{b})"), S)) ==
          "(!{b} \\/ <a>F) \\/ <a>T");
    // Already negation-free input is untouched.
    Formula f = P("<a>(!{b} /\\ <b>T)");
    CHECK(struct_equal(neg_eliminate(f, S), f));
    // Double negation is eliminated innermost-out.
    Formula g = neg_eliminate(N("~~<a>T"), S);
    CHECK(g->kind != FKind::Neg);
}

TEST_CASE("disjunctive normal form") {
    auto d1 = to_dnf(N("<a>T \\/ <b>T"));
    CHECK(d1.size() == 2);
    auto d2 = to_dnf(N("(<a>T \\/ <b>T) /\\ (!{a} \\/ !{b})"));
    CHECK(d2.size() == 4);
    auto d3 = to_dnf(N("<c>(<a>T \\/ <b>T)"));
    CHECK(d3.size() == 2);
    CHECK(print_formula(d3[0]) == "<c><a>T");

    // DNF preserves extended evaluation.
    std::mt19937 rng(67);
    std::function<Formula(int)> rand_orf = [&](int depth) -> Formula {
        switch (rng() % (depth > 0 ? 5 : 3)) {
            case 0: return f_top();
            case 1: return f_bang({rng() % 2 ? "a" : "b"});
            case 2: return f_may(rng() % 2 ? "a" : "b", depth > 0 ? rand_orf(depth - 1) : f_top());
            case 3: return f_and(rand_orf(depth - 1), rand_orf(depth - 1));
            default: return f_or(rand_orf(depth - 1), rand_orf(depth - 1));
        }
    };
    for (int i = 0; i < 300; ++i) {
        Formula f = rand_orf(3);
        CathoristicModel m = clt::random_tree_model(rng, 3);
        bool direct = eval_extended(m, f);
        bool any = false;
        for (const auto& d : to_dnf(f)) {
            CHECK(d->kind != FKind::Or);
            if (eval_extended(m, d)) any = true;
        }
        CHECK(direct == any);
    }
}

TEST_CASE("S-extension enumeration counts") {
    CathoristicModel base = make_model({{"r", ALL}}, {}, "r");
    CHECK(s_extensions({base, {"a"}, 0}).size() == 1);
    CHECK(s_extensions({base, {"a"}, 1}).size() == 2);
    CHECK(s_extensions({base, {"a"}, 2}).size() == 3);
    CHECK(s_extensions({base, {"a", "b"}, 1}).size() == 4);

    // A closed label blocks extension through forbidden actions.
    CathoristicModel strict = make_model({{"r", fin({"a"})}}, {}, "r");
    CHECK(s_extensions({strict, {"a", "b"}, 1}).size() == 2);

    // Every extension is valid, conservative over the base, and within bound.
    for (const auto& e : s_extensions({m_fig1(), {"a", "b", "c"}, 2})) {
        CHECK(model_is_valid(e.ts, e.start));
        CHECK(is_tree(e));
        CHECK(preceq(LatticeModel::of(e), LatticeModel::of(m_fig1())));
    }
}

TEST_CASE("entails_neg coincides with entails on the core fragment") {
    auto fam = clt::small_formula_family();
    std::mt19937 rng(71);
    int done = 0;
    while (done < 250) {
        const Formula& f = fam[rng() % fam.size()];
        const Formula& g = fam[rng() % fam.size()];
        ++done;
        CAPTURE(print_formula(f));
        CAPTURE(print_formula(g));
        CHECK(entails_neg(f, g) == entails(f, g));
    }
}

TEST_CASE("entailment with negation") {
    CHECK(entails_neg(N("<a>T"), N("~!{}")));
    CHECK(entails_neg(N("!{}"), N("~<a>T")));
    CHECK(entails_neg(N("!{a}"), N("~<b>T")));
    CHECK(entails_neg(N("<b>T"), N("~!{a}")));
    CHECK(entails_neg(N("T"), N("<a>T \\/ ~<a>T")));
    CHECK(entails_neg(N("~~<a>T"), N("<a>T")));
    CHECK(entails_neg(N("<a>T"), N("~~<a>T")));
    CHECK(entails_neg(N("<a>!{b} /\\ <a><c>T"), N("<d>T")));
    CHECK(!entails_neg(N("T"), N("<a>T")));
    CHECK(!entails_neg(N("T"), N("~<a>T")));
    CHECK(!entails_neg(N("~<a>T"), N("!{}")));
    CHECK(!entails_neg(N("~!{a}"), N("<b>T")));
    CHECK(entails_neg(N("~<a>T /\\ ~!{a}"), N("~(!{a} \\/ <a>T)")));
    CHECK(!entails_neg(N("<a>T \\/ <b>T"), N("<a>T")));
    CHECK(entails_neg(N("<a>T \\/ <a><b>T"), N("<a>T")));
}

TEST_CASE("entails_neg is stable under a larger bound") {
    const char* pairs[][2] = {
        {"~<a>T", "~<a>T \\/ <b>T"}, {"<a>T", "~!{b}"},
        {"~!{a}", "<b>T \\/ ~!{a}"}, {"!{a,b}", "~<a>T \\/ <a>T"},
        {"T", "~<a>T"},             {"<b>T", "~!{a}"},
    };
    for (auto& [l, r] : pairs) {
        CAPTURE(l);
        CAPTURE(r);
        bool base = entails_neg(N(l), N(r));
        CHECK(base == entails_neg(N(l), N(r), modal_depth(N(r)) + 1));
    }
}
