#pragma once

// Syntax of cathoristic formulae: AST, parser, printer, structural measures.

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cl {

using Action = std::string;
using ActionSet = std::set<Action>;

inline bool valid_action_name(const std::string& s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
               (c >= '0' && c <= '9') || c == '_';
    });
}

// ---------------------------------------------------------------------------
// Alphabet: conceptually infinite (Open) or a finite non-empty set (Closed).

struct Alphabet {
    bool open = true;
    ActionSet actions;  // meaningful only when !open

    static Alphabet make_open() { return Alphabet{}; }
    static Alphabet make_closed(ActionSet as) {
        if (as.empty()) throw std::invalid_argument("closed alphabet must be non-empty");
        return Alphabet{false, std::move(as)};
    }
};

// ---------------------------------------------------------------------------
// Formula AST. Core dialect: Top, Bottom, And, May, Bang.
// The neg dialect adds Neg and Or.

enum class FKind { Top, Bottom, And, May, Bang, Neg, Or };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
    FKind kind;
    Action action;    // May
    ActionSet acts;   // Bang
    Formula sub;      // May, Neg
    Formula lhs, rhs; // And, Or
};

inline Formula f_top() {
    static const Formula t = std::make_shared<FormulaNode>(FormulaNode{FKind::Top});
    return t;
}
inline Formula f_bot() {
    static const Formula b = std::make_shared<FormulaNode>(FormulaNode{FKind::Bottom});
    return b;
}
inline Formula f_and(Formula l, Formula r) {
    return std::make_shared<FormulaNode>(
        FormulaNode{FKind::And, {}, {}, nullptr, std::move(l), std::move(r)});
}
inline Formula f_or(Formula l, Formula r) {
    return std::make_shared<FormulaNode>(
        FormulaNode{FKind::Or, {}, {}, nullptr, std::move(l), std::move(r)});
}
inline Formula f_may(Action a, Formula f) {
    return std::make_shared<FormulaNode>(
        FormulaNode{FKind::May, std::move(a), {}, std::move(f)});
}
inline Formula f_bang(ActionSet as) {
    return std::make_shared<FormulaNode>(FormulaNode{FKind::Bang, {}, std::move(as)});
}
inline Formula f_neg(Formula f) {
    return std::make_shared<FormulaNode>(
        FormulaNode{FKind::Neg, {}, {}, std::move(f)});
}

// Right-nested conjunction of a display list; empty list is Top.
inline Formula f_and_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return f_top();
    Formula acc = fs.back();
    for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) acc = f_and(*it, acc);
    return acc;
}
inline Formula f_or_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return f_bot();
    Formula acc = fs.back();
    for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) acc = f_or(*it, acc);
    return acc;
}

inline bool struct_equal(const Formula& f, const Formula& g) {
    if (f == g) return true;
    if (f->kind != g->kind) return false;
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom: return true;
        case FKind::May: return f->action == g->action && struct_equal(f->sub, g->sub);
        case FKind::Bang: return f->acts == g->acts;
        case FKind::Neg: return struct_equal(f->sub, g->sub);
        case FKind::And:
        case FKind::Or:
            return struct_equal(f->lhs, g->lhs) && struct_equal(f->rhs, g->rhs);
    }
    return false;
}

inline bool is_core(const Formula& f) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom: return true;
        case FKind::Bang: return true;
        case FKind::May: return is_core(f->sub);
        case FKind::And: return is_core(f->lhs) && is_core(f->rhs);
        default: return false;
    }
}

inline void actions_of_into(const Formula& f, ActionSet& out) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom: break;
        case FKind::Bang: out.insert(f->acts.begin(), f->acts.end()); break;
        case FKind::May:
            out.insert(f->action);
            actions_of_into(f->sub, out);
            break;
        case FKind::Neg: actions_of_into(f->sub, out); break;
        case FKind::And:
        case FKind::Or:
            actions_of_into(f->lhs, out);
            actions_of_into(f->rhs, out);
            break;
    }
}
inline ActionSet actions_of(const Formula& f) {
    ActionSet out;
    actions_of_into(f, out);
    return out;
}

inline std::size_t modal_depth(const Formula& f) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Bang: return 0;
        case FKind::May: return 1 + modal_depth(f->sub);
        case FKind::Neg: return modal_depth(f->sub);
        case FKind::And:
        case FKind::Or:
            return std::max(modal_depth(f->lhs), modal_depth(f->rhs));
    }
    return 0;
}

inline std::size_t formula_size(const Formula& f) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Bang: return 1;
        case FKind::May:
        case FKind::Neg: return 1 + formula_size(f->sub);
        case FKind::And:
        case FKind::Or: return 1 + formula_size(f->lhs) + formula_size(f->rhs);
    }
    return 1;
}

// Bottom as the abbreviation !{} /\ <a>T, for cross-checks against the
// primitive node.
inline Formula desugar_bottom(const Action& a) {
    return f_and(f_bang({}), f_may(a, f_top()));
}

// ---------------------------------------------------------------------------
// Quantified formulae. Terms are action constants or (uppercase) variables.

struct Term {
    bool is_var = false;
    std::string name;

    bool operator<(const Term& o) const {
        return std::tie(is_var, name) < std::tie(o.is_var, o.name);
    }
    bool operator==(const Term& o) const {
        return is_var == o.is_var && name == o.name;
    }
};

enum class QKind { Top, And, May, Bang, Exists, Forall };

struct QFormulaNode;
using QFormula = std::shared_ptr<const QFormulaNode>;

struct QFormulaNode {
    QKind kind;
    Term term;               // May
    std::vector<Term> terms; // Bang
    std::string var;         // Exists, Forall
    QFormula sub;            // May, Exists, Forall
    QFormula lhs, rhs;       // And
};

inline QFormula q_top() {
    static const QFormula t = std::make_shared<QFormulaNode>(QFormulaNode{QKind::Top});
    return t;
}
inline QFormula q_and(QFormula l, QFormula r) {
    return std::make_shared<QFormulaNode>(
        QFormulaNode{QKind::And, {}, {}, {}, nullptr, std::move(l), std::move(r)});
}
inline QFormula q_may(Term t, QFormula f) {
    return std::make_shared<QFormulaNode>(
        QFormulaNode{QKind::May, std::move(t), {}, {}, std::move(f)});
}
inline QFormula q_bang(std::vector<Term> ts) {
    return std::make_shared<QFormulaNode>(QFormulaNode{QKind::Bang, {}, std::move(ts)});
}
inline QFormula q_exists(std::string v, QFormula f) {
    return std::make_shared<QFormulaNode>(
        QFormulaNode{QKind::Exists, {}, {}, std::move(v), std::move(f)});
}
inline QFormula q_forall(std::string v, QFormula f) {
    return std::make_shared<QFormulaNode>(
        QFormulaNode{QKind::Forall, {}, {}, std::move(v), std::move(f)});
}

// Free variables not bound by an enclosing quantifier.
inline void free_vars_into(const QFormula& f, std::set<std::string>& bound,
                           std::set<std::string>& out) {
    switch (f->kind) {
        case QKind::Top: break;
        case QKind::And:
            free_vars_into(f->lhs, bound, out);
            free_vars_into(f->rhs, bound, out);
            break;
        case QKind::May:
            if (f->term.is_var && !bound.count(f->term.name)) out.insert(f->term.name);
            free_vars_into(f->sub, bound, out);
            break;
        case QKind::Bang:
            for (const auto& t : f->terms)
                if (t.is_var && !bound.count(t.name)) out.insert(t.name);
            break;
        case QKind::Exists:
        case QKind::Forall: {
            bool fresh = bound.insert(f->var).second;
            free_vars_into(f->sub, bound, out);
            if (fresh) bound.erase(f->var);
            break;
        }
    }
}
inline std::set<std::string> free_vars(const QFormula& f) {
    std::set<std::string> bound, out;
    free_vars_into(f, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline void print_act_set(std::string& out, const ActionSet& as) {
    out += "!{";
    bool first = true;
    for (const auto& a : as) {
        if (!first) out += ',';
        first = false;
        out += a;
    }
    out += '}';
}

// Precedence levels: Or = 1, And = 2, prefix (May/Neg) = 3, atoms = 4.
inline int prec(const Formula& f) {
    switch (f->kind) {
        case FKind::Or: return 1;
        case FKind::And: return 2;
        case FKind::May:
        case FKind::Neg: return 3;
        default: return 4;
    }
}

inline void print_into(std::string& out, const Formula& f, int ctx) {
    const bool paren = prec(f) < ctx;
    if (paren) out += '(';
    switch (f->kind) {
        case FKind::Top: out += 'T'; break;
        case FKind::Bottom: out += 'F'; break;
        case FKind::Bang: print_act_set(out, f->acts); break;
        case FKind::May:
            out += '<';
            out += f->action;
            out += '>';
            print_into(out, f->sub, 3);
            break;
        case FKind::Neg:
            out += '~';
            print_into(out, f->sub, 3);
            break;
        case FKind::And:
            print_into(out, f->lhs, 3);
            out += " /\\ ";
            print_into(out, f->rhs, 2);
            break;
        case FKind::Or:
            print_into(out, f->lhs, 2);
            out += " \\/ ";
            print_into(out, f->rhs, 1);
            break;
    }
    if (paren) out += ')';
}

inline void print_term(std::string& out, const Term& t) { out += t.name; }

inline void qprint_into(std::string& out, const QFormula& f, int ctx) {
    // Quantifiers are weakest (level 0).
    int p;
    switch (f->kind) {
        case QKind::Exists:
        case QKind::Forall: p = 1; break;
        case QKind::And: p = 2; break;
        case QKind::May: p = 3; break;
        default: p = 4; break;
    }
    const bool paren = p < ctx;
    if (paren) out += '(';
    switch (f->kind) {
        case QKind::Top: out += 'T'; break;
        case QKind::Bang: {
            out += "!{";
            bool first = true;
            for (const auto& t : f->terms) {
                if (!first) out += ',';
                first = false;
                print_term(out, t);
            }
            out += '}';
            break;
        }
        case QKind::May:
            out += '<';
            print_term(out, f->term);
            out += '>';
            qprint_into(out, f->sub, 3);
            break;
        case QKind::And:
            qprint_into(out, f->lhs, 3);
            out += " /\\ ";
            qprint_into(out, f->rhs, 2);
            break;
        case QKind::Exists:
        case QKind::Forall:
            out += (f->kind == QKind::Exists) ? "exists " : "forall ";
            out += f->var;
            out += ". ";
            qprint_into(out, f->sub, 1);
            break;
    }
    if (paren) out += ')';
}

} // namespace detail

inline std::string print_formula(const Formula& f) {
    std::string out;
    detail::print_into(out, f, 0);
    return out;
}

inline std::string print_formula(const QFormula& f) {
    std::string out;
    detail::qprint_into(out, f, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing.

enum class Dialect { Core, Neg, Quantified };

struct ParseError : std::runtime_error {
    std::size_t pos;
    ParseError(std::size_t p, const std::string& msg)
        : std::runtime_error("parse error at offset " + std::to_string(p) + ": " + msg),
          pos(p) {}
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, Dialect d) : text_(text), dialect_(d) {}

    Formula formula() {
        Formula f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

    QFormula qformula() {
        QFormula f = parse_q();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

private:
    std::string_view text_;
    Dialect dialect_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                text_[pos_] == '\r'))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool eat2(char a, char b) {
        skip_ws();
        if (pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b) {
            pos_ += 2;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) fail(std::string("expected ") + what);
    }
    static bool ident_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
               (c >= '0' && c <= '9') || c == '_';
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }
    // Peeks a full keyword/identifier without consuming it.
    std::string peek_word() {
        skip_ws();
        std::size_t p = pos_;
        while (p < text_.size() && ident_char(text_[p])) ++p;
        return std::string(text_.substr(pos_, p - pos_));
    }

    Action action_name() {
        std::size_t at = pos_;
        std::string s = ident();
        if (!valid_action_name(s)) {
            pos_ = at;
            fail("invalid action name '" + s + "'");
        }
        return s;
    }

    Formula parse_or() {
        Formula l = parse_and();
        if (eat2('\\', '/')) {
            if (dialect_ == Dialect::Core) fail("'\\/' not allowed in core dialect");
            return f_or(std::move(l), parse_or());
        }
        return l;
    }
    Formula parse_and() {
        Formula l = parse_prefix();
        if (eat2('/', '\\')) return f_and(std::move(l), parse_and());
        return l;
    }
    Formula parse_prefix() {
        skip_ws();
        if (eat('~')) {
            if (dialect_ == Dialect::Core) fail("'~' not allowed in core dialect");
            return f_neg(parse_prefix());
        }
        if (eat('<')) {
            Action a = action_name();
            expect('>', "'>'");
            return f_may(std::move(a), parse_prefix());
        }
        return parse_atom();
    }
    Formula parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Formula f = parse_or();
            expect(')', "')'");
            return f;
        }
        if (c == '!') {
            ++pos_;
            expect('{', "'{'");
            ActionSet as;
            if (!eat('}')) {
                do {
                    as.insert(action_name());
                } while (eat(','));
                expect('}', "'}'");
            }
            return f_bang(std::move(as));
        }
        std::string w = peek_word();
        if (w == "T") {
            pos_ += 1;
            return f_top();
        }
        if (w == "F") {
            pos_ += 1;
            return f_bot();
        }
        fail("expected formula");
    }

    // Quantified dialect.
    Term term() {
        skip_ws();
        std::size_t at = pos_;
        std::string s = ident();
        if (s.empty()) fail("expected term");
        if (s[0] >= 'A' && s[0] <= 'Z') return Term{true, s};
        if (!valid_action_name(s)) {
            pos_ = at;
            fail("invalid term '" + s + "'");
        }
        return Term{false, s};
    }
    QFormula parse_q() {
        std::string w = peek_word();
        if (w == "exists" || w == "forall") {
            pos_ += w.size();
            std::string v = ident();
            if (v.empty() || v[0] < 'A' || v[0] > 'Z') fail("expected variable (uppercase)");
            expect('.', "'.'");
            QFormula body = parse_q();
            return w == "exists" ? q_exists(std::move(v), std::move(body))
                                 : q_forall(std::move(v), std::move(body));
        }
        return parse_q_and();
    }
    QFormula parse_q_and() {
        QFormula l = parse_q_prefix();
        if (eat2('/', '\\')) return q_and(std::move(l), parse_q_and());
        return l;
    }
    QFormula parse_q_prefix() {
        skip_ws();
        if (eat('<')) {
            Term t = term();
            expect('>', "'>'");
            return q_may(std::move(t), parse_q_prefix());
        }
        return parse_q_atom();
    }
    QFormula parse_q_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            QFormula f = parse_q();
            expect(')', "')'");
            return f;
        }
        if (c == '!') {
            ++pos_;
            expect('{', "'{'");
            std::vector<Term> ts;
            if (!eat('}')) {
                do {
                    ts.push_back(term());
                } while (eat(','));
                expect('}', "'}'");
            }
            return q_bang(std::move(ts));
        }
        if (peek_word() == "T") {
            pos_ += 1;
            return q_top();
        }
        fail("expected formula");
    }
};

} // namespace detail

inline Formula parse_formula(std::string_view text, Dialect d = Dialect::Core) {
    if (d == Dialect::Quantified)
        throw std::invalid_argument("use parse_qformula for the quantified dialect");
    return detail::Parser(text, d).formula();
}

inline QFormula parse_qformula(std::string_view text) {
    return detail::Parser(text, Dialect::Quantified).qformula();
}

} // namespace cl
