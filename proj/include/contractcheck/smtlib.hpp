// smtlib.hpp - SMT-LIB2 emission and an optional external-solver driver.
//
// emit_smtlib renders an AssertionSet as a standalone SMT-LIB2 script:
// finite sorts become nullary-constructor datatypes, each hard assertion is
// named so unsat cores map back to assertions, soft assertions ride along
// as comments plus assert-soft lines (a widespread extension; solvers
// without it can drop those lines without changing the hard problem).
//
// run_external drives any solver that reads SMT-LIB2 on stdin and prints
// sat/unsat on stdout. Soft maximization never relies on assert-soft:
// the driver walks soft subsets by descending size, mirroring the built-in
// search, so verdicts agree across backends.

#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "contractcheck/logic.hpp"
#include "contractcheck/solve.hpp"

namespace contractcheck {

class SolverUnavailable : public std::runtime_error {
public:
    explicit SolverUnavailable(const std::string& command)
        : std::runtime_error("external solver unavailable: " + command) {}
};

class SolverProtocolError : public std::runtime_error {
public:
    explicit SolverProtocolError(std::string raw)
        : std::runtime_error("unrecognized solver output: " + raw), raw_(std::move(raw)) {}
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

namespace detail {

inline void render_term_smt(std::ostream& out, const TermPtr& t);

inline void render_formula_smt(std::ostream& out, const FormulaPtr& f) {
    switch (f->op) {
        case FormOp::BoolConst:
            out << (f->value ? "true" : "false");
            return;
        case FormOp::Eq:
        case FormOp::Le:
        case FormOp::Lt:
        case FormOp::Ge:
        case FormOp::Gt: {
            const char* op = f->op == FormOp::Eq   ? "="
                             : f->op == FormOp::Le ? "<="
                             : f->op == FormOp::Lt ? "<"
                             : f->op == FormOp::Ge ? ">="
                                                   : ">";
            out << '(' << op << ' ';
            render_term_smt(out, f->lhs);
            out << ' ';
            render_term_smt(out, f->rhs);
            out << ')';
            return;
        }
        case FormOp::And:
        case FormOp::Or: {
            out << (f->op == FormOp::And ? "(and" : "(or");
            for (const auto& k : f->kids) {
                out << ' ';
                render_formula_smt(out, k);
            }
            out << ')';
            return;
        }
        case FormOp::Not:
            out << "(not ";
            render_formula_smt(out, f->kids[0]);
            out << ')';
            return;
        case FormOp::Implies:
            out << "(=> ";
            render_formula_smt(out, f->kids[0]);
            out << ' ';
            render_formula_smt(out, f->kids[1]);
            out << ')';
            return;
    }
    throw InternalError("unhandled formula op");
}

inline void render_term_smt(std::ostream& out, const TermPtr& t) {
    switch (t->op) {
        case TermOp::IntConst:
            if (t->num < 0)
                out << "(- " << -t->num << ')';
            else
                out << t->num;
            return;
        case TermOp::MemberConst:
        case TermOp::Var:
            out << t->name;
            return;
        case TermOp::FunApp:
            out << '(' << t->name << ' ';
            render_term_smt(out, t->a);
            out << ')';
            return;
        case TermOp::Add:
        case TermOp::Sub:
            out << (t->op == TermOp::Add ? "(+ " : "(- ");
            render_term_smt(out, t->a);
            out << ' ';
            render_term_smt(out, t->b);
            out << ')';
            return;
        case TermOp::MulConst:
            out << "(* ";
            if (t->num < 0)
                out << "(- " << -t->num << ')';
            else
                out << t->num;
            out << ' ';
            render_term_smt(out, t->a);
            out << ')';
            return;
        case TermOp::Ite:
            out << "(ite ";
            render_formula_smt(out, t->cond);
            out << ' ';
            render_term_smt(out, t->a);
            out << ' ';
            render_term_smt(out, t->b);
            out << ')';
            return;
    }
    throw InternalError("unhandled term op");
}

// Script body shared by emission and the external driver: declarations and
// the named hard assertions, plus any extra unnamed assertions.
inline std::string script_prelude(const AssertionSet& s,
                                  const std::vector<const Assertion*>& extra_hard) {
    std::ostringstream out;
    out << "(set-option :produce-unsat-cores true)\n";
    out << "; declarations\n";
    for (const auto& [sort, members] : s.sorts) {
        out << "(declare-datatypes ((" << sort << " 0)) ((";
        for (size_t i = 0; i < members.size(); ++i) {
            if (i) out << ' ';
            out << '(' << members[i] << ')';
        }
        out << ")))\n";
    }
    for (const auto& [fn, decl] : s.functions)
        out << "(declare-fun " << fn << " (" << decl.domain_sort << ") " << decl.codomain_sort
            << ")\n";
    for (const auto& [name, dom] : s.var_domains)
        out << "(declare-const " << name << ' ' << dom.sort << ")\n";
    if (!s.hard.empty()) out << "; hard assertions\n";
    for (const auto& a : s.hard) {
        out << "(assert (! ";
        render_formula_smt(out, a.formula);
        out << " :named " << a.name << "))\n";
    }
    for (const auto* a : extra_hard) {
        out << "(assert ";
        render_formula_smt(out, a->formula);
        out << ")\n";
    }
    return out.str();
}

}  // namespace detail

// Renders s as a complete SMT-LIB2 script. (get-model)/(get-unsat-core)
// appear only when there is anything to report on.
inline std::string emit_smtlib(const AssertionSet& s) {
    std::ostringstream out;
    out << detail::script_prelude(s, {});
    if (!s.soft.empty()) {
        out << "; soft assertions: assert-soft is a common extension; solvers\n"
               "; without it can drop these lines without changing the hard problem\n";
        for (const auto& a : s.soft) {
            std::ostringstream line;
            detail::render_formula_smt(line, a.formula);
            out << "; soft " << a.name << ": " << line.str() << '\n';
            out << "(assert-soft " << line.str() << " :id softs)\n";
        }
    }
    out << "(check-sat)\n";
    if (!s.var_domains.empty() || !s.functions.empty()) out << "(get-model)\n";
    if (!s.hard.empty()) out << "(get-unsat-core)\n";
    return out.str();
}

namespace detail {

struct SExpr {
    bool is_atom = true;
    std::string text;
    std::vector<SExpr> kids;
};

// Parses every top-level form after stripping ; comments. Unbalanced input
// raises SolverProtocolError with the raw text.
inline std::vector<SExpr> parse_sexprs(const std::string& raw) {
    std::vector<SExpr> roots;
    std::vector<SExpr*> stack;
    size_t i = 0;
    auto push = [&](SExpr e) -> SExpr* {
        auto& list = stack.empty() ? roots : stack.back()->kids;
        list.push_back(std::move(e));
        return &list.back();
    };
    while (i < raw.size()) {
        char c = raw[i];
        if (c == ';') {
            while (i < raw.size() && raw[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            stack.push_back(push(SExpr{false, {}, {}}));
            ++i;
        } else if (c == ')') {
            if (stack.empty()) throw SolverProtocolError(raw);
            stack.pop_back();
            ++i;
        } else {
            size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) &&
                   raw[i] != '(' && raw[i] != ')' && raw[i] != ';')
                ++i;
            push(SExpr{true, raw.substr(start, i - start), {}});
        }
    }
    if (!stack.empty()) throw SolverProtocolError(raw);
    return roots;
}

inline bool is_error_form(const SExpr& e) {
    return !e.is_atom && !e.kids.empty() && e.kids[0].is_atom && e.kids[0].text == "error";
}

// Runs `command < script-file`, captures stdout. Exit 127 (shell could not
// find or execute the command) maps to SolverUnavailable.
inline std::string run_solver_process(const std::string& command, const std::string& script) {
    namespace fs = std::filesystem;
    static int serial = 0;
    fs::path path = fs::temp_directory_path() /
                    ("contractcheck-" + std::to_string(::getpid()) + "-" +
                     std::to_string(serial++) + ".smt2");
    {
        std::ofstream out(path);
        out << script;
    }
    std::string shell_cmd = command + " < '" + path.string() + "' 2>/dev/null";
    FILE* pipe = ::popen(shell_cmd.c_str(), "r");
    if (!pipe) {
        fs::remove(path);
        throw SolverUnavailable(command);
    }
    std::string output;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    int status = ::pclose(pipe);
    fs::remove(path);
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127) throw SolverUnavailable(command);
    return output;
}

inline std::string first_word(const std::string& text) {
    size_t b = text.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = text.find_first_of(" \t\r\n", b);
    return text.substr(b, (e == std::string::npos ? text.size() : e) - b);
}

inline long long parse_int_value(const SExpr& e) {
    if (e.is_atom) {
        try {
            return std::stoll(e.text);
        } catch (const std::exception&) {
            throw SolverProtocolError("unparseable integer value " + e.text);
        }
    }
    if (e.kids.size() == 2 && e.kids[0].text == "-") return -parse_int_value(e.kids[1]);
    throw SolverProtocolError("unparseable integer value");
}

// Evaluates a define-fun body (a member constant or an ite chain over
// (= <arg> <member>) tests) for a concrete domain member.
inline std::string eval_fun_body(const SExpr& body, const std::string& arg,
                                 const std::string& member) {
    if (body.is_atom) return body.text == arg ? member : body.text;
    if (body.kids.size() == 4 && body.kids[0].text == "ite" && !body.kids[1].is_atom &&
        body.kids[1].kids.size() == 3 && body.kids[1].kids[0].text == "=") {
        auto resolve = [&](const SExpr& side) {
            return side.is_atom && side.text == arg ? member : side.text;
        };
        bool cond = resolve(body.kids[1].kids[1]) == resolve(body.kids[1].kids[2]);
        return eval_fun_body(body.kids[cond ? 2 : 3], arg, member);
    }
    throw SolverProtocolError("unparseable function body");
}

inline void collect_define_funs(const SExpr& e, std::vector<const SExpr*>& out) {
    if (e.is_atom || is_error_form(e)) return;
    if (!e.kids.empty() && e.kids[0].is_atom && e.kids[0].text == "define-fun") {
        out.push_back(&e);
        return;
    }
    for (const auto& k : e.kids) collect_define_funs(k, out);
}

// Builds a total Assignment from solver model forms; anything the solver
// left unconstrained falls back to a deterministic default.
inline Assignment parse_model(const std::string& raw, const AssertionSet& s) {
    std::vector<SExpr> forms = parse_sexprs(raw.substr(raw.find("sat") + 3));
    std::vector<const SExpr*> defs;
    for (const auto& f : forms) collect_define_funs(f, defs);

    Assignment a;
    for (const auto& [name, dom] : s.var_domains) {
        if (dom.sort == kIntSort)
            a.ints[name] = dom.minus_one ? -1 : dom.lo;
        else
            a.members[name] = s.sorts.at(dom.sort).front();
    }
    for (const auto& [fn, decl] : s.functions)
        for (const auto& member : s.sorts.at(decl.domain_sort))
            a.fun[{fn, member}] = s.sorts.at(decl.codomain_sort).front();

    for (const SExpr* d : defs) {
        // (define-fun <name> (<args>) <sort> <body>)
        if (d->kids.size() != 5 || !d->kids[1].is_atom) continue;
        const std::string& name = d->kids[1].text;
        const SExpr& args = d->kids[2];
        const SExpr& body = d->kids[4];
        if (args.kids.empty()) {
            if (auto it = a.ints.find(name); it != a.ints.end())
                it->second = parse_int_value(body);
            else if (auto mt = a.members.find(name); mt != a.members.end())
                mt->second = body.is_atom ? body.text : mt->second;
        } else if (args.kids.size() == 1 && s.functions.count(name)) {
            const std::string& arg = args.kids[0].kids.at(0).text;
            for (const auto& member : s.sorts.at(s.functions.at(name).domain_sort))
                a.fun[{name, member}] = eval_fun_body(body, arg, member);
        }
    }
    return a;
}

inline std::vector<std::string> parse_core(const std::string& raw) {
    std::vector<SExpr> forms = parse_sexprs(raw.substr(raw.find("unsat") + 5));
    for (const auto& f : forms) {
        if (f.is_atom || is_error_form(f)) continue;
        std::vector<std::string> names;
        bool all_atoms = true;
        for (const auto& k : f.kids) {
            if (!k.is_atom) {
                all_atoms = false;
                break;
            }
            names.push_back(k.text);
        }
        if (all_atoms) return names;
    }
    return {};
}

// One round trip: prelude + subset + (check-sat) + getter. Returns the
// verdict word and leaves the raw output for the caller to mine.
struct ExternalAnswer {
    std::string verdict;
    std::string raw;
};

inline ExternalAnswer ask_external(const std::string& command, const AssertionSet& s,
                                   const std::vector<const Assertion*>& extra,
                                   const std::string& getter) {
    std::string script = script_prelude(s, extra) + "(check-sat)\n" + getter;
    std::string out = run_solver_process(command, script);
    return {first_word(out), out};
}

}  // namespace detail

// Decides s with an external SMT-LIB2 solver. Hard-UNSAT returns the
// solver's core verbatim (external cores need not be minimal). When soft
// assertions are present the driver searches soft subsets by descending
// size, exactly like the built-in maximizer, so cardinality-maximal
// soft_satisfied sets agree across backends.
inline SolveResult run_external(const std::string& solver_command, const AssertionSet& s) {
    using namespace detail;
    ExternalAnswer first = ask_external(solver_command, s, {}, "(get-model)\n");
    if (first.verdict == "unsat") {
        ExternalAnswer cored = ask_external(solver_command, s, {}, "(get-unsat-core)\n");
        SolveResult r;
        r.core = parse_core(cored.raw);
        return r;
    }
    if (first.verdict != "sat") throw SolverProtocolError(first.raw);

    auto finish = [&s](const std::string& raw) {
        SolveResult r;
        r.is_sat = true;
        r.model = parse_model(raw, s);
        for (const auto& a : s.soft)
            if (evaluate_formula(a.formula, r.model)) r.soft_satisfied.push_back(a.name);
        return r;
    };
    size_t n = s.soft.size();
    for (size_t size = n; size >= 1; --size) {
        std::vector<size_t> chosen(size);
        for (size_t i = 0; i < size; ++i) chosen[i] = i;
        while (true) {
            std::vector<const Assertion*> extra;
            for (size_t i : chosen) extra.push_back(&s.soft[i]);
            ExternalAnswer ans = ask_external(solver_command, s, extra, "(get-model)\n");
            if (ans.verdict == "sat") return finish(ans.raw);
            if (ans.verdict != "unsat") throw SolverProtocolError(ans.raw);
            size_t i = size;
            while (i > 0 && chosen[i - 1] == n - size + (i - 1)) --i;
            if (i == 0) break;
            ++chosen[i - 1];
            for (size_t j = i; j < size; ++j) chosen[j] = chosen[j - 1] + 1;
        }
    }
    return finish(first.raw);
}

}  // namespace contractcheck
