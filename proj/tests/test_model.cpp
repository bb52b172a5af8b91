#include <doctest.h>

#include "cl/order.hpp"
#include "helpers.hpp"

using namespace cl;
using namespace cl::fixtures;

TEST_CASE("fixtures validate") {
    for (auto& [name, m] : fixtures::all()) {
        CAPTURE(name);
        CHECK_NOTHROW(validate_model(m.ts, m.start));
        CHECK(is_tree(m));
    }
}

TEST_CASE("validation reports every violation") {
    CathoristicTS ts;
    ts.states = {"s0", "s1"};
    ts.labels.emplace("s0", StateLabel::finite({"b"}));
    ts.labels.emplace("s1", StateLabel::all_actions());
    ts.transitions.insert({"s0", "a", "s1"});
    try {
        validate_model(ts, "s0");
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0] == "Inadmissible(s0,a)");
    }

    CathoristicTS nd;
    nd.states = {"s0", "s1", "s2"};
    for (auto& s : nd.states) nd.labels.emplace(s, StateLabel::all_actions());
    nd.transitions.insert({"s0", "a", "s1"});
    nd.transitions.insert({"s0", "a", "s2"});
    try {
        validate_model(nd, "s0");
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        CHECK(e.violations[0] == "Nondeterministic(s0,a)");
    }

    CathoristicTS missing;
    missing.states = {"s0"};
    try {
        validate_model(missing, "sX");
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        REQUIRE(e.violations.size() == 2);
        CHECK(e.violations[0] == "MissingLabel(s0)");
        CHECK(e.violations[1] == "UnknownStart");
    }
}

TEST_CASE("tree_unfold") {
    CHECK(equivalent(tree_unfold(m_top(), 3), m_top()));

    CathoristicModel u = tree_unfold(m_fig1(), 1);
    CHECK(u.ts.states.size() == 3);
    auto a = u.ts.step(u.start, "a");
    auto c = u.ts.step(u.start, "c");
    REQUIRE(a);
    REQUIRE(c);
    CHECK(u.ts.label(*a) == StateLabel::finite({"b", "c"}));
    CHECK(u.ts.label(*c) == StateLabel::finite({}));
    CHECK(!u.ts.step(*a, "b"));

    // Self-loop unfolds to a chain.
    CathoristicTS loop;
    loop.states = {"s"};
    loop.labels.emplace("s", StateLabel::finite({"a"}));
    loop.transitions.insert({"s", "a", "s"});
    CathoristicModel lm = validate_model(loop, "s");
    CHECK(!is_tree(lm));
    CathoristicModel chain = tree_unfold(lm, 2);
    CHECK(chain.ts.states.size() == 3);
    CHECK(is_tree(chain));
    CHECK_NOTHROW(validate_model(chain.ts, chain.start));

    // Unfolding an acyclic model of height ≤ d is equivalent to it.
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        CathoristicModel m = clt::random_tree_model(rng, 3);
        CHECK(equivalent(tree_unfold(m, 5), m));
        CHECK_NOTHROW(validate_model(tree_unfold(m, 2).ts, tree_unfold(m, 2).start));
    }
}

TEST_CASE("json round trip") {
    for (auto& [name, m] : fixtures::all()) {
        CAPTURE(name);
        auto j = model_to_json(m);
        CathoristicModel back = model_from_json(j);
        CHECK(back.ts.states == m.ts.states);
        CHECK(back.ts.transitions == m.ts.transitions);
        CHECK(back.start == m.start);
        for (auto& [s, l] : m.ts.labels) CHECK(back.ts.label(s) == l);
    }
    auto j = nlohmann::json::parse(
        R"({"states":["s0","s1"],"start":"s0","transitions":[["s0","a","s1"]],
            "labels":{"s0":"*","s1":["b","c"]}})");
    CathoristicModel m = model_from_json(j);
    CHECK(m.ts.label("s1") == StateLabel::finite({"b", "c"}));
    CHECK(m.ts.label("s0").all);
}

TEST_CASE("dot export") {
    std::string dot = model_to_dot(m_fig1());
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
    CHECK(dot.find("label=\"a\"") != std::string::npos);
    CHECK(dot.find("{b,c}") != std::string::npos);
}

TEST_CASE("pure conversions") {
    PureModel p = to_pure(m_fig1());
    CHECK(p.states.size() == 4);
    CHECK(p.transitions.size() == 3);

    CHECK(equivalent(from_pure(to_pure(m_ab()), FromPureMode::Max), m_ab()));
    CHECK(equivalent(from_pure(to_pure(m_ab()), FromPureMode::Min), m_ab_strict()));

    PureModel bare{{"x"}, {}, "x"};
    CathoristicModel mn = from_pure(bare, FromPureMode::Min);
    CHECK(mn.ts.label("x") == StateLabel::finite({}));
    CathoristicModel mx = from_pure(bare, FromPureMode::Max);
    CHECK(mx.ts.label("x").all);

    PureModel nd{{"x", "y", "z"},
                 {{"x", "a", "y"}, {"x", "a", "z"}},
                 "x"};
    CHECK_THROWS(from_pure(nd, FromPureMode::Min));
}
