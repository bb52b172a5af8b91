// Command-line front end: formula checking, entailment, lattice operations,
// proofs, first-order translations, the knowledge-base REPL and benchmarks.
//
// Exit status: 0 true/success, 1 false/not-entailed, 2 usage or parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cl/bench.hpp"
#include "cl/fol.hpp"
#include "cl/kb.hpp"
#include "cl/proof.hpp"

using namespace cl;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Formulae are accepted inline or as @file.
std::string formula_text(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return slurp(arg.substr(1));
    return arg;
}

CathoristicModel load_model(const std::string& path) {
    return model_from_json(json::parse(slurp(path)));
}

Alphabet env_alphabet() {
    const char* env = std::getenv("CL_ALPHABET");
    if (!env || !*env) return Alphabet::make_open();
    ActionSet as;
    std::string cur;
    for (const char* p = env;; ++p) {
        if (*p == ',' || *p == '\0') {
            if (!cur.empty()) as.insert(cur);
            cur.clear();
            if (*p == '\0') break;
        } else if (!std::isspace(static_cast<unsigned char>(*p))) {
            cur += *p;
        }
    }
    return Alphabet::make_closed(std::move(as));
}

Alphabet require_closed() {
    Alphabet sigma = env_alphabet();
    if (sigma.open)
        throw std::invalid_argument(
            "this command needs a closed alphabet; set CL_ALPHABET=a,b,c");
    return sigma;
}

void emit_bool(bool v, bool as_json, const char* key) {
    if (as_json)
        std::cout << json{{key, v}}.dump() << "\n";
    else
        std::cout << (v ? "true" : "false") << "\n";
}

void emit_model(const LatticeModel& m, bool as_json, bool dot) {
    if (m.is_bottom()) {
        if (as_json)
            std::cout << json{{"bottom", true}}.dump() << "\n";
        else
            std::cout << "bottom\n";
        return;
    }
    if (dot)
        std::cout << model_to_dot(*m.model);
    else if (as_json)
        std::cout << model_to_json(*m.model).dump(2) << "\n";
    else
        std::cout << model_to_json(*m.model).dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cathoristic logic toolkit"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    // check
    std::string c_model, c_formula;
    bool c_pure = false, c_quant = false;
    auto* c = app.add_subcommand("check", "does a model satisfy a formula?");
    c->add_option("--model", c_model, "model JSON file")->required();
    c->add_option("formula", c_formula, "formula (inline or @file)")->required();
    c->add_flag("--pure", c_pure, "pure semantics (labels ignored)");
    c->add_flag("--quantified", c_quant, "quantified dialect (needs CL_ALPHABET)");

    // entail / entail-neg
    std::string e_f, e_g;
    bool e_witness = false;
    auto* e = app.add_subcommand("entail", "decide f |= g (core dialect)");
    e->add_option("f", e_f)->required();
    e->add_option("g", e_g)->required();
    e->add_flag("--witness", e_witness, "print a Brandom witness on failure");

    std::string en_f, en_g;
    int en_bound = -1;
    auto* en = app.add_subcommand("entail-neg", "decide f |= g with negation");
    en->add_option("f", en_f)->required();
    en->add_option("g", en_g)->required();
    en->add_option("--bound", en_bound, "override the extension depth bound");

    // simpl / char / glb / lub / sat
    std::string s_f;
    bool s_dot = false;
    auto* s = app.add_subcommand("simpl", "least model of a formula");
    s->add_option("formula", s_f)->required();
    s->add_flag("--dot", s_dot, "DOT output");

    std::string ch_model, ch_formula;
    auto* ch = app.add_subcommand("char", "characteristic formula");
    ch->add_option("--model", ch_model, "model JSON file");
    ch->add_option("formula", ch_formula, "formula: char(simpl(f))");

    std::string g_a, g_b;
    bool g_dot = false, l_dot = false;
    auto* gl = app.add_subcommand("glb", "greatest lower bound of two models");
    gl->add_option("a", g_a)->required();
    gl->add_option("b", g_b)->required();
    gl->add_flag("--dot", g_dot);
    std::string l_a, l_b;
    auto* lu = app.add_subcommand("lub", "least upper bound of two models");
    lu->add_option("a", l_a)->required();
    lu->add_option("b", l_b)->required();
    lu->add_flag("--dot", l_dot);

    std::string sat_f;
    auto* sa = app.add_subcommand("sat", "is the formula satisfiable?");
    sa->add_option("formula", sat_f)->required();

    // bisim / dist
    std::string b_a, b_b;
    auto* bi = app.add_subcommand("bisim", "bisimilarity of two pure models");
    bi->add_option("a", b_a)->required();
    bi->add_option("b", b_b)->required();

    std::string d_model, d_blocked;
    auto* di = app.add_subcommand("dist", "distinguishing formula for a model "
                                          "and a formula it fails");
    di->add_option("--model", d_model)->required();
    di->add_option("blocked", d_blocked)->required();

    // prove / check-proof
    std::string p_f, p_g;
    auto* pr = app.add_subcommand("prove", "synthesize a derivation of f |- g");
    pr->add_option("f", p_f)->required();
    pr->add_option("g", p_g)->required();

    std::string cp_in;
    auto* cp = app.add_subcommand("check-proof", "check an s-expression "
                                                 "derivation (@file, inline, or -)");
    cp->add_option("derivation", cp_in)->required();

    // fol / hml
    std::string f_formula, f_model;
    bool f_one = false, f_two = false, f_corr = false;
    auto* fo = app.add_subcommand("fol", "first-order translation");
    fo->add_option("formula", f_formula)->required();
    fo->add_flag("--one-sorted", f_one);
    fo->add_flag("--two-sorted", f_two);
    fo->add_flag("--check-correspondence", f_corr, "needs --model");
    fo->add_option("--model", f_model, "model JSON file");

    std::string h_formula;
    auto* hm = app.add_subcommand("hml", "Hennessy-Milner translation "
                                         "(needs CL_ALPHABET)");
    hm->add_option("formula", h_formula)->required();

    // kb
    std::string kb_log;
    auto* kbc = app.add_subcommand("kb", "knowledge-base REPL on stdin/stdout");
    kbc->add_option("--load", kb_log, "replay a command log before the REPL");

    // bench
    auto* be = app.add_subcommand("bench", "benchmarks");
    std::size_t be_n = 1000;
    int be_repeat = 50;
    auto* bee = be->add_subcommand("entail", "time chain entailments");
    bee->add_option("--chain", be_n, "chain length")->required();
    bee->add_option("--repeat", be_repeat, "repetitions");
    be->require_subcommand(1);

    // Let `--json` appear after the subcommand as well.
    for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) {
        sc->fallthrough();
        for (auto* nested : sc->get_subcommands([](const CLI::App*) { return true; }))
            nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c) {
            CathoristicModel m = load_model(c_model);
            bool ok;
            if (c_quant) {
                ok = satisfies_quantified(m, parse_qformula(formula_text(c_formula)),
                                          {}, require_closed());
            } else if (c_pure) {
                ok = satisfies_pure(to_pure(m), parse_formula(formula_text(c_formula)));
            } else {
                ok = eval_extended(m, parse_formula(formula_text(c_formula),
                                                    Dialect::Neg));
            }
            emit_bool(ok, as_json, "satisfies");
            return ok ? 0 : 1;
        }
        if (*e) {
            Formula f = parse_formula(formula_text(e_f));
            Formula g = parse_formula(formula_text(e_g));
            bool ok = entails(f, g);
            if (as_json) {
                json out{{"entailed", ok}};
                if (!ok && e_witness)
                    out["witness"] = print_formula(brandom_witness(f, g));
                std::cout << out.dump() << "\n";
            } else {
                std::cout << (ok ? "entailed" : "not entailed") << "\n";
                if (!ok && e_witness)
                    std::cout << "witness: " << print_formula(brandom_witness(f, g))
                              << "\n";
            }
            return ok ? 0 : 1;
        }
        if (*en) {
            Formula f = parse_formula(formula_text(en_f), Dialect::Neg);
            Formula g = parse_formula(formula_text(en_g), Dialect::Neg);
            std::optional<std::size_t> bound;
            if (en_bound >= 0) bound = static_cast<std::size_t>(en_bound);
            bool ok = entails_neg(f, g, bound);
            emit_bool(ok, as_json, "entailed");
            return ok ? 0 : 1;
        }
        if (*s) {
            emit_model(simpl(parse_formula(formula_text(s_f))), as_json, s_dot);
            return 0;
        }
        if (*ch) {
            if (ch_model.empty() == ch_formula.empty())
                throw std::invalid_argument("char: give exactly one of --model "
                                            "or a formula");
            LatticeModel m = ch_model.empty()
                                 ? simpl(parse_formula(formula_text(ch_formula)))
                                 : LatticeModel::of(load_model(ch_model));
            std::string text = print_formula(char_formula(m));
            if (as_json)
                std::cout << json{{"formula", text}}.dump() << "\n";
            else
                std::cout << text << "\n";
            return 0;
        }
        if (*gl) {
            emit_model(glb(LatticeModel::of(load_model(g_a)),
                           LatticeModel::of(load_model(g_b))),
                       as_json, g_dot);
            return 0;
        }
        if (*lu) {
            emit_model(lub(LatticeModel::of(load_model(l_a)),
                           LatticeModel::of(load_model(l_b))),
                       as_json, l_dot);
            return 0;
        }
        if (*sa) {
            bool ok = !simpl(parse_formula(formula_text(sat_f))).is_bottom();
            if (as_json)
                std::cout << json{{"satisfiable", ok}}.dump() << "\n";
            else
                std::cout << (ok ? "satisfiable" : "unsatisfiable") << "\n";
            return ok ? 0 : 1;
        }
        if (*bi) {
            bool ok = bisimilar(to_pure(load_model(b_a)), to_pure(load_model(b_b)));
            emit_bool(ok, as_json, "bisimilar");
            return ok ? 0 : 1;
        }
        if (*di) {
            Formula g = distinguishing_formula(to_pure(load_model(d_model)),
                                               parse_formula(formula_text(d_blocked)));
            if (as_json)
                std::cout << json{{"formula", print_formula(g)}}.dump() << "\n";
            else
                std::cout << print_formula(g) << "\n";
            return 0;
        }
        if (*pr) {
            DeriveResult r = derive(parse_formula(formula_text(p_f)),
                                    parse_formula(formula_text(p_g)));
            if (r.entailed()) {
                if (as_json)
                    std::cout << json{{"entailed", true},
                                      {"derivation", derivation_to_sexpr(*r.derivation)}}
                                     .dump()
                              << "\n";
                else
                    std::cout << derivation_to_sexpr(*r.derivation) << "\n";
                return 0;
            }
            if (as_json) {
                json out{{"entailed", false}};
                if (!r.countermodel->is_bottom())
                    out["countermodel"] = model_to_json(*r.countermodel->model);
                std::cout << out.dump() << "\n";
            } else {
                std::cout << "not entailed\n";
                if (!r.countermodel->is_bottom())
                    std::cout << model_to_json(*r.countermodel->model).dump(2) << "\n";
            }
            return 1;
        }
        if (*cp) {
            std::string text;
            if (cp_in == "-") {
                std::ostringstream ss;
                ss << std::cin.rdbuf();
                text = ss.str();
            } else {
                text = formula_text(cp_in);
            }
            Derivation d = derivation_from_sexpr(text);
            ProofCheck pc = check_derivation(d);
            if (as_json)
                std::cout << json{{"ok", pc.ok}, {"errors", pc.errors}}.dump() << "\n";
            else if (pc.ok)
                std::cout << "ok: " << print_formula(d.concl.lhs) << " |- "
                          << print_formula(d.concl.rhs) << "\n";
            else
                for (const auto& err : pc.errors) std::cout << err << "\n";
            return pc.ok ? 0 : 1;
        }
        if (*fo) {
            if (f_one == f_two)
                throw std::invalid_argument(
                    "fol: give exactly one of --one-sorted / --two-sorted");
            Formula f = parse_formula(formula_text(f_formula));
            FolFormula tr = f_one ? translate_fol1(f) : translate_fol2(f);
            if (f_corr) {
                if (f_model.empty())
                    throw std::invalid_argument("--check-correspondence needs --model");
                CathoristicModel m = load_model(f_model);
                FolModel fm = f_one
                                  ? translate_model(m.ts, FolTarget::Fol1)
                                  : translate_model(m.ts, FolTarget::Fol2,
                                                    require_closed());
                FolEnv env;
                env.states["x"] = m.start;
                bool modal = satisfies(m, f);
                bool fol = eval_fol(fm, tr, env);
                if (as_json)
                    std::cout << json{{"modal", modal},
                                      {"fol", fol},
                                      {"agree", modal == fol}}
                                     .dump()
                              << "\n";
                else
                    std::cout << "modal=" << modal << " fol=" << fol
                              << (modal == fol ? " agree" : " DISAGREE") << "\n";
                return modal == fol ? 0 : 1;
            }
            if (as_json)
                std::cout << json{{"formula", print_fol(tr)}}.dump() << "\n";
            else
                std::cout << print_fol(tr) << "\n";
            return 0;
        }
        if (*hm) {
            Formula tr =
                translate_hml(parse_formula(formula_text(h_formula)), require_closed());
            if (as_json)
                std::cout << json{{"formula", print_formula(tr)}}.dump() << "\n";
            else
                std::cout << print_formula(tr) << "\n";
            return 0;
        }
        if (*kbc) {
            KnowledgeBase kb;
            if (!kb_log.empty()) {
                std::ifstream in(kb_log);
                if (!in) throw std::invalid_argument("cannot open " + kb_log);
                kb_load(kb, in);
            }
            kb_repl(kb, std::cin, std::cout);
            return 0;
        }
        if (*be) {
            double ms = bench_entail_chain(be_n, be_repeat);
            if (as_json)
                std::cout << json{{"chain", be_n},
                                  {"repeat", be_repeat},
                                  {"time_ms", ms}}
                                 .dump()
                          << "\n";
            else
                std::cout << "chain=" << be_n << " repeat=" << be_repeat
                          << " time_ms=" << ms << "\n";
            return 0;
        }
    } catch (const ParseError& err) {
        std::cerr << "parse error at " << err.pos << ": " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
