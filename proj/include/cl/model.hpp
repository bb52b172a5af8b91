#pragma once

// Cathoristic transition systems and models: validation of the semantic
// well-formedness conditions, tree operations, serialization, fixtures.

#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cl/syntax.hpp"

namespace cl {

using StateId = std::string;

// A state label is either the whole alphabet or a finite action set
// (well-sizedness).
struct StateLabel {
    bool all = false;
    ActionSet acts;  // meaningful only when !all

    static StateLabel all_actions() { return StateLabel{true, {}}; }
    static StateLabel finite(ActionSet as) { return StateLabel{false, std::move(as)}; }

    bool allows(const Action& a) const { return all || acts.count(a) > 0; }
    // label ⊆ A for finite A; the whole alphabet is never contained in a
    // finite set.
    bool subset_of(const ActionSet& a) const {
        if (all) return false;
        return std::includes(a.begin(), a.end(), acts.begin(), acts.end());
    }
    // λ₁ ⊇ λ₂, the simulation label condition.
    bool superset_of(const StateLabel& o) const {
        if (all) return true;
        if (o.all) return false;
        return std::includes(acts.begin(), acts.end(), o.acts.begin(), o.acts.end());
    }
    bool operator==(const StateLabel& o) const {
        return all == o.all && (all || acts == o.acts);
    }

    static StateLabel intersect(const StateLabel& a, const StateLabel& b) {
        if (a.all) return b;
        if (b.all) return a;
        ActionSet out;
        std::set_intersection(a.acts.begin(), a.acts.end(), b.acts.begin(),
                              b.acts.end(), std::inserter(out, out.begin()));
        return finite(std::move(out));
    }
    static StateLabel unite(const StateLabel& a, const StateLabel& b) {
        if (a.all || b.all) return all_actions();
        ActionSet out = a.acts;
        out.insert(b.acts.begin(), b.acts.end());
        return finite(std::move(out));
    }
};

struct Transition {
    StateId src;
    Action act;
    StateId dst;
    bool operator<(const Transition& o) const {
        return std::tie(src, act, dst) < std::tie(o.src, o.act, o.dst);
    }
    bool operator==(const Transition& o) const {
        return src == o.src && act == o.act && dst == o.dst;
    }
};

struct CathoristicTS {
    std::set<StateId> states;
    std::set<Transition> transitions;
    std::map<StateId, StateLabel> labels;

    const StateLabel& label(const StateId& s) const { return labels.at(s); }

    // Deterministic successor, if any.
    std::optional<StateId> step(const StateId& s, const Action& a) const {
        auto it = transitions.lower_bound(Transition{s, a, ""});
        if (it != transitions.end() && it->src == s && it->act == a) return it->dst;
        return std::nullopt;
    }
    std::vector<std::pair<Action, StateId>> out(const StateId& s) const {
        std::vector<std::pair<Action, StateId>> r;
        for (auto it = transitions.lower_bound(Transition{s, "", ""});
             it != transitions.end() && it->src == s; ++it)
            r.emplace_back(it->act, it->dst);
        return r;
    }
    ActionSet out_actions(const StateId& s) const {
        ActionSet r;
        for (auto& [a, t] : out(s)) r.insert(a);
        return r;
    }
};

struct CathoristicModel {
    CathoristicTS ts;
    StateId start;
};

// Pure models drop state labels and may be non-deterministic.
struct PureModel {
    std::set<StateId> states;
    std::set<Transition> transitions;
    StateId start;

    std::vector<StateId> step_all(const StateId& s, const Action& a) const {
        std::vector<StateId> r;
        for (auto it = transitions.lower_bound(Transition{s, a, ""});
             it != transitions.end() && it->src == s && it->act == a; ++it)
            r.push_back(it->dst);
        return r;
    }
    std::vector<std::pair<Action, StateId>> out(const StateId& s) const {
        std::vector<std::pair<Action, StateId>> r;
        for (auto it = transitions.lower_bound(Transition{s, "", ""});
             it != transitions.end() && it->src == s; ++it)
            r.emplace_back(it->act, it->dst);
        return r;
    }
    ActionSet out_actions(const StateId& s) const {
        ActionSet r;
        for (auto& [a, t] : out(s)) r.insert(a);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Validation.

struct ModelError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ModelError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid model:";
        for (const auto& x : v) s += " [" + x + "]";
        return s;
    }
};

// Checks determinism, admissibility, label totality and start membership;
// reports every violated condition at once.
inline CathoristicModel validate_model(const CathoristicTS& ts, const StateId& start) {
    std::vector<std::string> errs;
    std::set<std::pair<StateId, Action>> seen;
    for (const auto& t : ts.transitions) {
        if (!ts.states.count(t.src))
            errs.push_back("UnknownState(" + t.src + ")");
        if (!ts.states.count(t.dst))
            errs.push_back("UnknownState(" + t.dst + ")");
        if (!seen.insert({t.src, t.act}).second)
            errs.push_back("Nondeterministic(" + t.src + "," + t.act + ")");
        auto it = ts.labels.find(t.src);
        if (it != ts.labels.end() && !it->second.allows(t.act))
            errs.push_back("Inadmissible(" + t.src + "," + t.act + ")");
    }
    for (const auto& s : ts.states)
        if (!ts.labels.count(s)) errs.push_back("MissingLabel(" + s + ")");
    if (!ts.states.count(start)) errs.push_back("UnknownStart");
    if (!errs.empty()) throw ModelError(std::move(errs));
    return CathoristicModel{ts, start};
}

inline bool model_is_valid(const CathoristicTS& ts, const StateId& start,
                           std::string* why = nullptr) {
    try {
        validate_model(ts, start);
        return true;
    } catch (const ModelError& e) {
        if (why) *why = e.what();
        return false;
    }
}

// True iff every state is reachable from start by a unique path (tree shape).
inline bool is_tree(const CathoristicModel& m) {
    std::map<StateId, int> indeg;
    for (const auto& t : m.ts.transitions) {
        if (t.dst == m.start) return false;
        if (++indeg[t.dst] > 1) return false;
    }
    // Reachability: every state except possibly isolated non-start states.
    std::set<StateId> seen{m.start};
    std::queue<StateId> q;
    q.push(m.start);
    while (!q.empty()) {
        StateId s = q.front();
        q.pop();
        for (auto& [a, t] : m.ts.out(s))
            if (seen.insert(t).second) q.push(t);
    }
    return seen.size() == m.ts.states.size();
}

// ---------------------------------------------------------------------------
// Tree unfolding to a given depth. States named by their path from the root.

inline CathoristicModel tree_unfold(const CathoristicModel& m, std::size_t depth) {
    CathoristicTS out;
    StateId root = "u";
    out.states.insert(root);
    out.labels.emplace(root, m.ts.label(m.start));
    // BFS over (path-state, original-state, remaining depth).
    std::queue<std::tuple<StateId, StateId, std::size_t>> q;
    q.push({root, m.start, depth});
    while (!q.empty()) {
        auto [ps, os, d] = q.front();
        q.pop();
        if (d == 0) continue;
        for (auto& [a, t] : m.ts.out(os)) {
            StateId child = ps + "." + a;
            out.states.insert(child);
            out.labels.emplace(child, m.ts.label(t));
            out.transitions.insert({ps, a, child});
            q.push({child, t, d - 1});
        }
    }
    return CathoristicModel{std::move(out), root};
}

inline PureModel to_pure(const CathoristicModel& m) {
    return PureModel{m.ts.states, m.ts.transitions, m.start};
}

enum class FromPureMode { Max, Min };

inline CathoristicModel from_pure(const PureModel& p, FromPureMode mode) {
    std::set<std::pair<StateId, Action>> seen;
    for (const auto& t : p.transitions)
        if (!seen.insert({t.src, t.act}).second)
            throw std::invalid_argument("NondeterministicInput: " + t.src + "," + t.act);
    CathoristicTS ts;
    ts.states = p.states;
    ts.transitions = p.transitions;
    for (const auto& s : p.states)
        ts.labels.emplace(s, mode == FromPureMode::Max
                                 ? StateLabel::all_actions()
                                 : StateLabel::finite(p.out_actions(s)));
    return CathoristicModel{std::move(ts), p.start};
}

// ---------------------------------------------------------------------------
// JSON model format:
//   {"states":[...], "start":"s0", "transitions":[["s0","a","s1"],...],
//    "labels":{"s0":"*", "s1":["b","c"]}}
// where "*" encodes the whole-alphabet label.

inline nlohmann::json model_to_json(const CathoristicModel& m) {
    nlohmann::json j;
    j["states"] = m.ts.states;
    j["start"] = m.start;
    auto& tr = j["transitions"] = nlohmann::json::array();
    for (const auto& t : m.ts.transitions)
        tr.push_back(nlohmann::json::array({t.src, t.act, t.dst}));
    auto& lb = j["labels"] = nlohmann::json::object();
    for (const auto& [s, l] : m.ts.labels) {
        if (l.all)
            lb[s] = "*";
        else
            lb[s] = l.acts;
    }
    return j;
}

inline CathoristicModel model_from_json(const nlohmann::json& j) {
    CathoristicTS ts;
    for (const auto& s : j.at("states")) ts.states.insert(s.get<StateId>());
    for (const auto& t : j.at("transitions")) {
        if (!t.is_array() || t.size() != 3)
            throw std::invalid_argument("transition must be [src, action, dst]");
        ts.transitions.insert(
            {t[0].get<StateId>(), t[1].get<Action>(), t[2].get<StateId>()});
    }
    for (const auto& [s, l] : j.at("labels").items()) {
        if (l.is_string() && l.get<std::string>() == "*")
            ts.labels.emplace(s, StateLabel::all_actions());
        else
            ts.labels.emplace(s, StateLabel::finite(l.get<ActionSet>()));
    }
    return validate_model(ts, j.at("start").get<StateId>());
}

inline std::string label_to_string(const StateLabel& l) {
    if (l.all) return "*";
    std::string s = "{";
    bool first = true;
    for (const auto& a : l.acts) {
        if (!first) s += ',';
        first = false;
        s += a;
    }
    return s + "}";
}

inline std::string model_to_dot(const CathoristicModel& m) {
    std::ostringstream os;
    os << "digraph model {\n  rankdir=LR;\n";
    for (const auto& s : m.ts.states) {
        os << "  \"" << s << "\" [label=\"" << s << "\\n" << label_to_string(m.ts.label(s))
           << "\"";
        if (s == m.start) os << ", peripheries=2";
        os << "];\n";
    }
    for (const auto& t : m.ts.transitions)
        os << "  \"" << t.src << "\" -> \"" << t.dst << "\" [label=\"" << t.act
           << "\"];\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Convenience builder and the named fixtures.

inline CathoristicModel make_model(
    const std::vector<std::pair<StateId, StateLabel>>& states,
    const std::vector<Transition>& transitions, const StateId& start) {
    CathoristicTS ts;
    for (const auto& [s, l] : states) {
        ts.states.insert(s);
        ts.labels.emplace(s, l);
    }
    for (const auto& t : transitions) ts.transitions.insert(t);
    return validate_model(ts, start);
}

namespace fixtures {

inline const StateLabel ALL = StateLabel::all_actions();
inline StateLabel fin(ActionSet as) { return StateLabel::finite(std::move(as)); }

inline CathoristicModel m_top() {
    return make_model({{"s0", ALL}}, {}, "s0");
}
inline CathoristicModel m_fig1() {
    return make_model(
        {{"s0", ALL}, {"s1", fin({"b", "c"})}, {"s2", fin({})}, {"s3", ALL}},
        {{"s0", "a", "s1"}, {"s0", "c", "s2"}, {"s1", "b", "s3"}}, "s0");
}
inline CathoristicModel m_ab() {
    return make_model({{"s0", ALL}, {"s1", ALL}, {"s2", ALL}},
                      {{"s0", "a", "s1"}, {"s1", "b", "s2"}}, "s0");
}
inline CathoristicModel m_ab_strict() {
    return make_model({{"s0", fin({"a"})}, {"s1", fin({"b"})}, {"s2", fin({})}},
                      {{"s0", "a", "s1"}, {"s1", "b", "s2"}}, "s0");
}
inline CathoristicModel m_leftbang() {
    return make_model({{"s0", fin({"a"})}, {"s1", ALL}}, {{"s0", "a", "s1"}}, "s0");
}
inline CathoristicModel m_rightbang() {
    return make_model({{"s0", fin({"a", "b", "c"})}, {"s1", fin({"a"})}},
                      {{"s0", "c", "s1"}}, "s0");
}

inline std::optional<CathoristicModel> by_name(const std::string& n) {
    if (n == "M_TOP") return m_top();
    if (n == "M_FIG1") return m_fig1();
    if (n == "M_AB") return m_ab();
    if (n == "M_AB_STRICT") return m_ab_strict();
    if (n == "M_LEFTBANG") return m_leftbang();
    if (n == "M_RIGHTBANG") return m_rightbang();
    return std::nullopt;
}

inline std::vector<std::pair<std::string, CathoristicModel>> all() {
    return {{"M_TOP", m_top()},           {"M_FIG1", m_fig1()},
            {"M_AB", m_ab()},             {"M_AB_STRICT", m_ab_strict()},
            {"M_LEFTBANG", m_leftbang()}, {"M_RIGHTBANG", m_rightbang()}};
}

} // namespace fixtures

} // namespace cl
