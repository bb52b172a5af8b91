#pragma once

// Knowledge-base engine: a rooted tree model as fact store with
// non-monotonic assert, subtree retract, conjunctive variable queries and a
// tantum-aware literal-reordering optimizer, plus a line-oriented REPL.

#include <cctype>
#include <fstream>
#include <sstream>

#include "cl/lattice.hpp"

namespace cl {

struct ChangeReport {
    std::vector<std::string> removed_paths;
    std::vector<std::string> notes;
};

// One step of a query literal path: an action constant or a variable
// (variables start with an uppercase letter).
struct QueryStep {
    bool is_var = false;
    std::string name;
};

struct QueryLiteral {
    std::vector<QueryStep> path;
    // The "(⟨Y⟩ ∧ !{Y})" marker: the final step must also be the
    // only allowed action at its source state.
    bool tantum_last = false;
};

using Bindings = std::map<std::string, Action>;

struct QueryResult {
    std::vector<Bindings> rows;
    std::size_t nodes = 0;  // transition-candidate expansions
};

inline std::string join_path(const std::vector<Action>& p) {
    std::string out;
    for (const auto& a : p) {
        if (!out.empty()) out += '/';
        out += a;
    }
    return out;
}

inline std::vector<Action> split_path(const std::string& s) {
    std::vector<Action> out;
    std::string cur;
    for (char c : s) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline QueryLiteral parse_literal(const std::string& text) {
    QueryLiteral lit;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto ident = [&]() -> std::string {
        std::size_t s = i;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
            ++i;
        if (i == s) throw ParseError(i, "expected identifier");
        return text.substr(s, i - s);
    };
    skip();
    while (i < text.size() && text[i] == '<') {
        ++i;
        std::string name = ident();
        if (i >= text.size() || text[i] != '>') throw ParseError(i, "expected '>'");
        ++i;
        lit.path.push_back({std::isupper(static_cast<unsigned char>(name[0])) != 0, name});
        skip();
    }
    if (i < text.size() && text[i] == '(') {
        // (<V> /\ !{V})
        ++i;
        skip();
        if (i >= text.size() || text[i] != '<') throw ParseError(i, "expected '<'");
        ++i;
        std::string v = ident();
        if (i >= text.size() || text[i] != '>') throw ParseError(i, "expected '>'");
        ++i;
        skip();
        if (text.compare(i, 3, "/\\ ") != 0 && text.compare(i, 2, "/\\") != 0)
            throw ParseError(i, "expected '/\\'");
        i += 2;
        skip();
        if (text.compare(i, 2, "!{") != 0) throw ParseError(i, "expected '!{'");
        i += 2;
        std::string v2 = ident();
        if (v2 != v) throw ParseError(i, "tantum marker must repeat the step name");
        if (i >= text.size() || text[i] != '}') throw ParseError(i, "expected '}'");
        ++i;
        skip();
        if (i >= text.size() || text[i] != ')') throw ParseError(i, "expected ')'");
        ++i;
        lit.path.push_back({std::isupper(static_cast<unsigned char>(v[0])) != 0, v});
        lit.tantum_last = true;
        skip();
    }
    if (i != text.size()) throw ParseError(i, "trailing input in literal");
    if (lit.path.empty()) throw ParseError(0, "literal needs at least one step");
    return lit;
}

inline std::string print_literal(const QueryLiteral& lit) {
    std::string out;
    std::size_t n = lit.path.size();
    for (std::size_t i = 0; i + (lit.tantum_last ? 1 : 0) < n; ++i)
        out += "<" + lit.path[i].name + ">";
    if (lit.tantum_last) {
        const std::string& v = lit.path.back().name;
        out += "(<" + v + "> /\\ !{" + v + "})";
    }
    return out;
}

class KnowledgeBase {
public:
    KnowledgeBase() { reset(); }

    const CathoristicModel& model() const { return model_; }
    long revision() const { return revision_; }
    const std::vector<std::string>& log() const { return log_; }

    void reset() {
        CathoristicTS ts;
        ts.states.insert("root");
        ts.labels.emplace("root", StateLabel::all_actions());
        model_ = CathoristicModel{std::move(ts), "root"};
        revision_ = 0;
        log_.clear();
    }

    ChangeReport assert_fact(const Formula& f) {
        LatticeModel s = simpl(f);
        if (s.is_bottom())
            throw std::invalid_argument("Unsatisfiable: refusing to assert falsity");
        ChangeReport report;
        std::vector<Action> path;
        merge_state(model_.start, *s.model, s.model->start, path, report);
        ++revision_;
        log_.push_back("assert " + print_formula(f));
        return report;
    }

    ChangeReport retract_path(const std::vector<Action>& path) {
        ChangeReport report;
        StateId s = model_.start;
        for (const auto& a : path) {
            auto t = model_.ts.step(s, a);
            if (!t) {
                report.notes.push_back("PathNotFound: " + join_path(path));
                return report;
            }
            s = *t;
        }
        if (path.empty()) {
            report.notes.push_back("PathNotFound: cannot retract the root");
            return report;
        }
        StateId parent = model_.start;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            parent = *model_.ts.step(parent, path[i]);
        model_.ts.transitions.erase({parent, path.back(), s});
        delete_subtree(s);
        report.removed_paths.push_back(join_path(path));
        ++revision_;
        log_.push_back("retract " + join_path(path));
        return report;
    }

    // Resets a state's label to Sigma; escape hatch since retract never
    // relaxes labels.
    bool relabel(const std::vector<Action>& path) {
        StateId s = model_.start;
        for (const auto& a : path) {
            auto t = model_.ts.step(s, a);
            if (!t) return false;
            s = *t;
        }
        model_.ts.labels.erase(s);
        model_.ts.labels.emplace(s, StateLabel::all_actions());
        ++revision_;
        return true;
    }

    QueryResult query(const std::vector<QueryLiteral>& literals) const {
        QueryResult res;
        Bindings env;
        solve(literals, 0, env, res);
        return res;
    }

private:
    CathoristicModel model_;
    long revision_ = 0;
    std::vector<std::string> log_;

    void delete_subtree(const StateId& s) {
        std::vector<std::pair<Action, StateId>> kids = model_.ts.out(s);
        for (auto& [a, t] : kids) {
            model_.ts.transitions.erase({s, a, t});
            delete_subtree(t);
        }
        model_.ts.states.erase(s);
        model_.ts.labels.erase(s);
    }

    StateId fresh_state(const std::vector<Action>& path) {
        StateId s = "root";
        for (const auto& a : path) s += "/" + a;
        while (model_.ts.states.count(s)) s += "'";
        return s;
    }

    void graft(const StateId& at, const CathoristicModel& src, const StateId& v,
               std::vector<Action>& path) {
        for (auto& [a, w] : src.ts.out(v)) {
            path.push_back(a);
            StateId child = fresh_state(path);
            model_.ts.states.insert(child);
            model_.ts.labels.emplace(child, src.ts.label(w));
            model_.ts.transitions.insert({at, a, child});
            graft(child, src, w, path);
            path.pop_back();
        }
    }

    void merge_state(const StateId& w, const CathoristicModel& src, const StateId& v,
                     std::vector<Action>& path, ChangeReport& report) {
        const StateLabel oldl = model_.ts.label(w);
        const StateLabel newl = src.ts.label(v);
        StateLabel inter = StateLabel::intersect(oldl, newl);
        // Compatible when the intersection still admits every transition of
        // the store and of the assertion at this node.
        bool compatible = true;
        for (const auto& a : model_.ts.out_actions(w))
            if (!inter.allows(a)) compatible = false;
        for (const auto& a : src.ts.out_actions(v))
            if (!inter.allows(a)) compatible = false;
        if (compatible) {
            model_.ts.labels.erase(w);
            model_.ts.labels.emplace(w, std::move(inter));
        } else {
            // New assertion wins: replace the label, drop store transitions
            // that fall outside it.
            model_.ts.labels.erase(w);
            model_.ts.labels.emplace(w, newl);
            for (auto& [a, t] : model_.ts.out(w)) {
                if (newl.allows(a)) continue;
                path.push_back(a);
                report.removed_paths.push_back(join_path(path));
                path.pop_back();
                model_.ts.transitions.erase({w, a, t});
                delete_subtree(t);
            }
        }
        for (auto& [a, x] : src.ts.out(v)) {
            path.push_back(a);
            if (auto t = model_.ts.step(w, a)) {
                merge_state(*t, src, x, path, report);
            } else {
                StateId child = fresh_state(path);
                model_.ts.states.insert(child);
                model_.ts.labels.emplace(child, src.ts.label(x));
                model_.ts.transitions.insert({w, a, child});
                graft(child, src, x, path);
            }
            path.pop_back();
        }
    }

    void solve(const std::vector<QueryLiteral>& lits, std::size_t k, Bindings& env,
               QueryResult& res) const {
        if (k == lits.size()) {
            res.rows.push_back(env);
            return;
        }
        walk(lits, k, 0, model_.start, env, res);
    }

    void walk(const std::vector<QueryLiteral>& lits, std::size_t k, std::size_t i,
              const StateId& s, Bindings& env, QueryResult& res) const {
        const QueryLiteral& lit = lits[k];
        if (i == lit.path.size()) {
            solve(lits, k + 1, env, res);
            return;
        }
        bool last = i + 1 == lit.path.size();
        auto try_step = [&](const Action& a, const StateId& t) {
            if (last && lit.tantum_last && !model_.ts.label(s).subset_of({a})) return;
            walk(lits, k, i + 1, t, env, res);
        };
        const QueryStep& st = lit.path[i];
        if (!st.is_var) {
            ++res.nodes;
            if (auto t = model_.ts.step(s, st.name)) try_step(st.name, *t);
            return;
        }
        auto bound = env.find(st.name);
        if (bound != env.end()) {
            ++res.nodes;
            if (auto t = model_.ts.step(s, bound->second)) try_step(bound->second, *t);
            return;
        }
        for (auto& [a, t] : model_.ts.out(s)) {
            ++res.nodes;
            env[st.name] = a;
            try_step(a, t);
        }
        env.erase(st.name);
    }
};

// Greedy reordering: repeatedly pick the literal with the fewest unbound
// variables; ties prefer literals made functional by their trailing
// tantum-singleton; remaining ties keep the original order.
inline std::vector<QueryLiteral> optimize_query(const std::vector<QueryLiteral>& lits,
                                                std::set<std::string> bound = {}) {
    std::vector<bool> used(lits.size(), false);
    std::vector<QueryLiteral> out;
    auto unbound_vars = [&](const QueryLiteral& l) {
        std::set<std::string> vs;
        for (const auto& s : l.path)
            if (s.is_var && !bound.count(s.name)) vs.insert(s.name);
        return vs;
    };
    for (std::size_t round = 0; round < lits.size(); ++round) {
        std::size_t best = lits.size();
        std::size_t best_count = 0;
        bool best_fun = false;
        for (std::size_t i = 0; i < lits.size(); ++i) {
            if (used[i]) continue;
            auto vs = unbound_vars(lits[i]);
            // Functional: the tantum marker pins the only unbound variable,
            // which is the final step.
            bool fun = lits[i].tantum_last &&
                       (vs.empty() ||
                        (vs.size() == 1 && lits[i].path.back().is_var &&
                         *vs.begin() == lits[i].path.back().name));
            if (best == lits.size() || vs.size() < best_count ||
                (vs.size() == best_count && fun && !best_fun)) {
                best = i;
                best_count = vs.size();
                best_fun = fun;
            }
        }
        used[best] = true;
        for (const auto& s : lits[best].path)
            if (s.is_var) bound.insert(s.name);
        out.push_back(lits[best]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence and REPL.

inline void kb_save(const KnowledgeBase& kb, std::ostream& os) {
    for (const auto& line : kb.log()) os << line << "\n";
}

inline void kb_load(KnowledgeBase& kb, std::istream& is) {
    kb.reset();
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("assert ", 0) == 0)
            kb.assert_fact(parse_formula(line.substr(7)));
        else if (line.rfind("retract ", 0) == 0)
            kb.retract_path(split_path(line.substr(8)));
        else
            throw std::invalid_argument("kb_load: unknown log entry: " + line);
    }
}

inline std::vector<QueryLiteral> parse_literals(const std::string& text) {
    std::vector<QueryLiteral> lits;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            lits.push_back(parse_literal(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lits.push_back(parse_literal(cur));
    return lits;
}

inline std::string bindings_to_string(const Bindings& b) {
    if (b.empty()) return "true";
    std::string out;
    for (const auto& [v, a] : b) {
        if (!out.empty()) out += ", ";
        out += v + "=" + a;
    }
    return out;
}

inline void kb_repl(KnowledgeBase& kb, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cmd;
        ls >> cmd;
        std::string rest;
        std::getline(ls, rest);
        while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
        try {
            if (cmd.empty() || cmd == "#") continue;
            if (cmd == "quit" || cmd == "exit") break;
            if (cmd == "assert") {
                ChangeReport r = kb.assert_fact(parse_formula(rest));
                out << "ok";
                if (!r.removed_paths.empty()) {
                    out << "; removed:";
                    for (const auto& p : r.removed_paths) out << " " << p;
                }
                out << "\n";
            } else if (cmd == "retract") {
                ChangeReport r = kb.retract_path(split_path(rest));
                if (!r.notes.empty()) out << r.notes.front() << "\n";
                else out << "ok; removed: " << r.removed_paths.front() << "\n";
            } else if (cmd == "relabel") {
                out << (kb.relabel(split_path(rest)) ? "ok" : "PathNotFound") << "\n";
            } else if (cmd == "query") {
                QueryResult r = kb.query(optimize_query(parse_literals(rest)));
                for (const auto& b : r.rows) out << bindings_to_string(b) << "\n";
                out << r.rows.size() << " result(s)\n";
            } else if (cmd == "explain") {
                auto lits = parse_literals(rest);
                auto opt = optimize_query(lits);
                out << "order:";
                for (const auto& l : opt) out << " " << print_literal(l);
                out << "\n";
                out << "nodes unoptimized=" << kb.query(lits).nodes
                    << " optimized=" << kb.query(opt).nodes << "\n";
            } else if (cmd == "save") {
                std::ofstream f(rest);
                kb_save(kb, f);
                out << "saved " << kb.log().size() << " command(s)\n";
            } else if (cmd == "load") {
                std::ifstream f(rest);
                if (!f) throw std::invalid_argument("cannot open " + rest);
                kb_load(kb, f);
                out << "loaded; revision " << kb.revision() << "\n";
            } else if (cmd == "dump") {
                out << model_to_json(kb.model()).dump(2) << "\n";
            } else if (cmd == "dot") {
                out << model_to_dot(kb.model());
            } else {
                out << "unknown command: " << cmd << "\n";
            }
        } catch (const std::exception& e) {
            out << "error: " << e.what() << "\n";
        }
    }
}

} // namespace cl
