#include <doctest.h>

#include <random>

#include "cl/syntax.hpp"

using namespace cl;

TEST_CASE("parse basics") {
    Formula f = parse_formula("<a><b>T");
    REQUIRE(f->kind == FKind::May);
    CHECK(f->action == "a");
    CHECK(f->sub->kind == FKind::May);
    CHECK(f->sub->sub->kind == FKind::Top);

    Formula g = parse_formula("<a>!{b,c}");
    CHECK(g->kind == FKind::May);
    CHECK(g->sub->kind == FKind::Bang);
    CHECK(g->sub->acts == ActionSet{"b", "c"});

    Formula h = parse_formula("!{green,amber,red}");
    CHECK(h->acts == ActionSet{"green", "amber", "red"});

    CHECK(parse_formula("T")->kind == FKind::Top);
    CHECK(parse_formula("F")->kind == FKind::Bottom);
    CHECK(parse_formula("!{}")->acts.empty());
}

TEST_CASE("precedence and parentheses") {
    // <a> binds tighter than /\.
    Formula f = parse_formula("<a>T /\\ !{b}");
    CHECK(f->kind == FKind::And);
    CHECK(f->lhs->kind == FKind::May);
    CHECK(f->rhs->kind == FKind::Bang);

    Formula g = parse_formula("<a>(<b>T /\\ !{b,c})");
    CHECK(g->kind == FKind::May);
    CHECK(g->sub->kind == FKind::And);

    // /\ binds tighter than \/.
    Formula h = parse_formula("<a>T /\\ !{b} \\/ T", Dialect::Neg);
    CHECK(h->kind == FKind::Or);
    CHECK(h->lhs->kind == FKind::And);

    // ~ binds tighter than /\.
    Formula n = parse_formula("~T /\\ F", Dialect::Neg);
    CHECK(n->kind == FKind::And);
    CHECK(n->lhs->kind == FKind::Neg);
}

TEST_CASE("core dialect rejects extensions") {
    CHECK_THROWS_AS(parse_formula("~T"), ParseError);
    CHECK_THROWS_AS(parse_formula("T \\/ F"), ParseError);
    CHECK_THROWS_AS(parse_formula("<a>"), ParseError);
    CHECK_THROWS_AS(parse_formula("!{A}"), ParseError);
    CHECK_THROWS_AS(parse_formula("T T"), ParseError);
    CHECK_NOTHROW(parse_formula("~<a>T \\/ T", Dialect::Neg));
}

TEST_CASE("printing") {
    CHECK(print_formula(f_top()) == "T");
    CHECK(print_formula(f_bang({})) == "!{}");
    CHECK(print_formula(f_may("a", f_and(f_may("b", f_top()), f_bang({"b", "c"})))) ==
          "<a>(<b>T /\\ !{b,c})");
    CHECK(print_formula(f_and(f_may("a", f_top()), f_bang({"a"}))) ==
          "<a>T /\\ !{a}");
}

namespace {

Formula random_formula(std::mt19937& rng, int depth, bool neg) {
    std::uniform_int_distribution<int> pick(0, neg ? 6 : 4);
    std::uniform_int_distribution<int> act(0, 2);
    const char* names[] = {"a", "b", "c"};
    int k = depth == 0 ? pick(rng) % 3 : pick(rng);
    switch (k) {
        case 0: return f_top();
        case 1: return f_bot();
        case 2: {
            ActionSet as;
            for (int i = 0; i < 3; ++i)
                if (act(rng) == 0) as.insert(names[i]);
            return f_bang(as);
        }
        case 3: return f_may(names[act(rng)], random_formula(rng, depth - 1, neg));
        case 4:
            return f_and(random_formula(rng, depth - 1, neg),
                         random_formula(rng, depth - 1, neg));
        case 5: return f_neg(random_formula(rng, depth - 1, neg));
        default:
            return f_or(random_formula(rng, depth - 1, neg),
                        random_formula(rng, depth - 1, neg));
    }
}

} // namespace

TEST_CASE("parse/print round trip on random ASTs") {
    std::mt19937 rng(42);
    for (int i = 0; i < 2000; ++i) {
        bool neg = i % 2 == 0;
        Formula f = random_formula(rng, 4, neg);
        Formula g = parse_formula(print_formula(f), neg ? Dialect::Neg : Dialect::Core);
        CHECK(struct_equal(f, g));
    }
}

TEST_CASE("actions_of") {
    CHECK(actions_of(f_may("a", f_bang({"b"}))) == ActionSet{"a", "b"});
    CHECK(actions_of(f_top()).empty());
    CHECK(actions_of(f_and(f_bang({"a", "b"}), f_may("c", f_top()))) ==
          ActionSet{"a", "b", "c"});
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        Formula f = random_formula(rng, 3, true);
        Formula g = random_formula(rng, 3, true);
        ActionSet u = actions_of(f);
        ActionSet v = actions_of(g);
        u.insert(v.begin(), v.end());
        CHECK(actions_of(f_and(f, g)) == u);
    }
}

TEST_CASE("modal_depth and sizes") {
    CHECK(modal_depth(parse_formula("T")) == 0);
    CHECK(modal_depth(parse_formula("<a><b>T")) == 2);
    CHECK(modal_depth(parse_formula("<a>T /\\ <a><b>!{c}")) == 2);
    CHECK(formula_size(parse_formula("<a><b>T")) == 3);
}

TEST_CASE("quantified dialect") {
    QFormula q = parse_qformula("exists X. (<king><france>!{X} /\\ <X><bald>T)");
    REQUIRE(q->kind == QKind::Exists);
    CHECK(q->var == "X");
    CHECK(free_vars(q).empty());
    CHECK(free_vars(q->sub) == std::set<std::string>{"X"});

    // Quantifiers are weakest.
    QFormula w = parse_qformula("forall X. <X>T /\\ T");
    REQUIRE(w->kind == QKind::Forall);
    CHECK(w->sub->kind == QKind::And);

    QFormula r = parse_qformula(print_formula(q));
    CHECK(print_formula(r) == print_formula(q));
}
