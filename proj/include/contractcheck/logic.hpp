// logic.hpp - quantifier-free assertion IR and its ground-truth evaluator.
//
// Terms range over Int and finite uninterpreted sorts (parties, assets);
// arithmetic is linear (multiplication by constants only). Formulas are
// the usual comparisons and connectives. An AssertionSet bundles named
// hard and soft assertions with variable domains and function
// declarations; an Assignment is a total model. evaluate_formula is the
// reference semantics every solver result is checked against.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contractcheck/blocks.hpp"  // InternalError

namespace contractcheck {

class UnboundSymbol : public std::runtime_error {
public:
    explicit UnboundSymbol(const std::string& symbol)
        : std::runtime_error("unbound symbol: " + symbol) {}
};

// ── sorts ────────────────────────────────────────────────────────────────────

inline constexpr const char* kIntSort = "Int";

// Finite sorts are kept as ordered member lists; member order fixes
// enumeration order everywhere (solver candidates, SMT-LIB datatypes).
using SortTable = std::map<std::string, std::vector<std::string>>;

// ── terms ────────────────────────────────────────────────────────────────────

enum class TermOp { IntConst, MemberConst, Var, FunApp, Add, Sub, MulConst, Ite };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    TermOp op = TermOp::IntConst;
    long long num = 0;     // IntConst value; MulConst coefficient
    std::string name;      // Var name / FunApp function / MemberConst member
    std::string sort;      // Var and MemberConst sort name
    TermPtr a, b;          // children (FunApp argument in a)
    FormulaPtr cond;       // Ite condition
};

inline TermPtr mk_int(long long n) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::IntConst;
    t->num = n;
    return t;
}

inline TermPtr mk_member(std::string sort, std::string member) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::MemberConst;
    t->sort = std::move(sort);
    t->name = std::move(member);
    return t;
}

inline TermPtr mk_var(std::string name, std::string sort = kIntSort) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::Var;
    t->name = std::move(name);
    t->sort = std::move(sort);
    return t;
}

inline TermPtr mk_fun(std::string fn, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::FunApp;
    t->name = std::move(fn);
    t->a = std::move(arg);
    return t;
}

inline TermPtr mk_add(TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::Add;
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
}

inline TermPtr mk_sub(TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::Sub;
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
}

inline TermPtr mk_mul(long long coeff, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::MulConst;
    t->num = coeff;
    t->a = std::move(a);
    return t;
}

inline TermPtr mk_ite(FormulaPtr cond, TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->op = TermOp::Ite;
    t->cond = std::move(cond);
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
}

// ── formulas ─────────────────────────────────────────────────────────────────

enum class FormOp { BoolConst, Eq, Le, Lt, Ge, Gt, And, Or, Not, Implies };

struct Formula {
    FormOp op = FormOp::BoolConst;
    bool value = false;            // BoolConst
    TermPtr lhs, rhs;              // comparisons
    std::vector<FormulaPtr> kids;  // And/Or all, Not kids[0], Implies kids[0] ⇒ kids[1]
};

inline FormulaPtr mk_bool(bool v) {
    auto f = std::make_shared<Formula>();
    f->op = FormOp::BoolConst;
    f->value = v;
    return f;
}

namespace detail {
inline FormulaPtr mk_cmp(FormOp op, TermPtr l, TermPtr r) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->lhs = std::move(l);
    f->rhs = std::move(r);
    return f;
}
}  // namespace detail

inline FormulaPtr mk_eq(TermPtr l, TermPtr r) { return detail::mk_cmp(FormOp::Eq, std::move(l), std::move(r)); }
inline FormulaPtr mk_le(TermPtr l, TermPtr r) { return detail::mk_cmp(FormOp::Le, std::move(l), std::move(r)); }
inline FormulaPtr mk_lt(TermPtr l, TermPtr r) { return detail::mk_cmp(FormOp::Lt, std::move(l), std::move(r)); }
inline FormulaPtr mk_ge(TermPtr l, TermPtr r) { return detail::mk_cmp(FormOp::Ge, std::move(l), std::move(r)); }
inline FormulaPtr mk_gt(TermPtr l, TermPtr r) { return detail::mk_cmp(FormOp::Gt, std::move(l), std::move(r)); }

inline FormulaPtr mk_and(std::vector<FormulaPtr> kids) {
    auto f = std::make_shared<Formula>();
    f->op = FormOp::And;
    f->kids = std::move(kids);
    return f;
}

inline FormulaPtr mk_or(std::vector<FormulaPtr> kids) {
    auto f = std::make_shared<Formula>();
    f->op = FormOp::Or;
    f->kids = std::move(kids);
    return f;
}

inline FormulaPtr mk_not(FormulaPtr g) {
    auto f = std::make_shared<Formula>();
    f->op = FormOp::Not;
    f->kids = {std::move(g)};
    return f;
}

inline FormulaPtr mk_implies(FormulaPtr p, FormulaPtr q) {
    auto f = std::make_shared<Formula>();
    f->op = FormOp::Implies;
    f->kids = {std::move(p), std::move(q)};
    return f;
}

// ── assertion sets ───────────────────────────────────────────────────────────

struct VarDomain {
    std::string sort = kIntSort;
    long long lo = 0;              // Int sorts: [lo, hi]
    long long hi = 0;
    bool minus_one = false;        // additionally include -1
    std::vector<long long> seeds;  // extra candidate values the emitter knows matter

    bool contains(long long v) const {
        return (minus_one && v == -1) || (v >= lo && v <= hi);
    }
};

struct FunDecl {
    std::string domain_sort;
    std::string codomain_sort;
};

struct Assertion {
    std::string name;
    FormulaPtr formula;
    std::string block_id;  // empty when no single source block applies
};

struct AssertionSet {
    std::vector<Assertion> hard;
    std::vector<Assertion> soft;
    std::vector<std::pair<std::string, VarDomain>> var_domains;  // declaration order
    std::map<std::string, FunDecl> functions;
    SortTable sorts;

    const VarDomain* find_domain(std::string_view var) const {
        for (const auto& [name, dom] : var_domains)
            if (name == var) return &dom;
        return nullptr;
    }

    const Assertion* find_hard(std::string_view name) const {
        for (const auto& a : hard)
            if (a.name == name) return &a;
        return nullptr;
    }
};

// ── assignments ──────────────────────────────────────────────────────────────

struct Assignment {
    std::map<std::string, long long> ints;          // Int var → value
    std::map<std::string, std::string> members;     // finite var → member
    std::map<std::pair<std::string, std::string>, std::string> fun;  // (fn, arg) → member

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

// ── evaluation ───────────────────────────────────────────────────────────────

struct Value {
    bool is_int = true;
    long long num = 0;
    std::string member;  // valid when !is_int

    friend bool operator==(const Value&, const Value&) = default;
};

inline bool evaluate_formula(const FormulaPtr& f, const Assignment& a);

inline Value evaluate_term(const TermPtr& t, const Assignment& a) {
    switch (t->op) {
        case TermOp::IntConst:
            return {true, t->num, {}};
        case TermOp::MemberConst:
            return {false, 0, t->name};
        case TermOp::Var: {
            if (auto it = a.ints.find(t->name); it != a.ints.end())
                return {true, it->second, {}};
            if (auto it = a.members.find(t->name); it != a.members.end())
                return {false, 0, it->second};
            throw UnboundSymbol(t->name);
        }
        case TermOp::FunApp: {
            Value arg = evaluate_term(t->a, a);
            if (arg.is_int) throw InternalError("function applied to non-finite argument");
            auto it = a.fun.find({t->name, arg.member});
            if (it == a.fun.end()) throw UnboundSymbol(t->name + "(" + arg.member + ")");
            return {false, 0, it->second};
        }
        case TermOp::Add:
        case TermOp::Sub: {
            Value l = evaluate_term(t->a, a);
            Value r = evaluate_term(t->b, a);
            if (!l.is_int || !r.is_int) throw InternalError("arithmetic on finite sort");
            return {true, t->op == TermOp::Add ? l.num + r.num : l.num - r.num, {}};
        }
        case TermOp::MulConst: {
            Value v = evaluate_term(t->a, a);
            if (!v.is_int) throw InternalError("arithmetic on finite sort");
            return {true, t->num * v.num, {}};
        }
        case TermOp::Ite:
            return evaluate_term(evaluate_formula(t->cond, a) ? t->a : t->b, a);
    }
    throw InternalError("unhandled term op");
}

inline bool evaluate_formula(const FormulaPtr& f, const Assignment& a) {
    switch (f->op) {
        case FormOp::BoolConst:
            return f->value;
        case FormOp::Eq: {
            Value l = evaluate_term(f->lhs, a);
            Value r = evaluate_term(f->rhs, a);
            if (l.is_int != r.is_int) throw InternalError("equality between different sorts");
            return l.is_int ? l.num == r.num : l.member == r.member;
        }
        case FormOp::Le:
        case FormOp::Lt:
        case FormOp::Ge:
        case FormOp::Gt: {
            Value l = evaluate_term(f->lhs, a);
            Value r = evaluate_term(f->rhs, a);
            if (!l.is_int || !r.is_int) throw InternalError("order comparison on finite sort");
            switch (f->op) {
                case FormOp::Le: return l.num <= r.num;
                case FormOp::Lt: return l.num < r.num;
                case FormOp::Ge: return l.num >= r.num;
                default: return l.num > r.num;
            }
        }
        case FormOp::And:
            for (const auto& k : f->kids)
                if (!evaluate_formula(k, a)) return false;
            return true;
        case FormOp::Or:
            for (const auto& k : f->kids)
                if (evaluate_formula(k, a)) return true;
            return false;
        case FormOp::Not:
            return !evaluate_formula(f->kids[0], a);
        case FormOp::Implies:
            return !evaluate_formula(f->kids[0], a) || evaluate_formula(f->kids[1], a);
    }
    throw InternalError("unhandled formula op");
}

// ── structural queries ───────────────────────────────────────────────────────

namespace detail {

inline void collect_symbols(const TermPtr& t, std::set<std::string>& vars,
                            std::set<std::string>& fns);

inline void collect_symbols(const FormulaPtr& f, std::set<std::string>& vars,
                            std::set<std::string>& fns) {
    if (f->lhs) collect_symbols(f->lhs, vars, fns);
    if (f->rhs) collect_symbols(f->rhs, vars, fns);
    for (const auto& k : f->kids) collect_symbols(k, vars, fns);
}

inline void collect_symbols(const TermPtr& t, std::set<std::string>& vars,
                            std::set<std::string>& fns) {
    if (t->op == TermOp::Var) vars.insert(t->name);
    if (t->op == TermOp::FunApp) fns.insert(t->name);
    if (t->a) collect_symbols(t->a, vars, fns);
    if (t->b) collect_symbols(t->b, vars, fns);
    if (t->cond) collect_symbols(t->cond, vars, fns);
}

}  // namespace detail

inline std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> vars, fns;
    detail::collect_symbols(f, vars, fns);
    return vars;
}

inline std::set<std::string> used_functions(const FormulaPtr& f) {
    std::set<std::string> vars, fns;
    detail::collect_symbols(f, vars, fns);
    return fns;
}

// Checks the AssertionSet invariants; returns problems (empty = well-formed).
inline std::vector<std::string> check_assertion_set(const AssertionSet& s) {
    std::vector<std::string> problems;
    std::set<std::string> names;
    auto check_assertion = [&](const Assertion& a) {
        if (!names.insert(a.name).second)
            problems.push_back("duplicate assertion name " + a.name);
        for (const auto& v : free_vars(a.formula))
            if (!s.find_domain(v))
                problems.push_back("variable " + v + " of " + a.name + " lacks a domain");
        for (const auto& fn : used_functions(a.formula))
            if (!s.functions.count(fn))
                problems.push_back("function " + fn + " of " + a.name + " is undeclared");
    };
    for (const auto& a : s.hard) check_assertion(a);
    for (const auto& a : s.soft) check_assertion(a);
    for (const auto& [name, dom] : s.var_domains)
        if (dom.sort != kIntSort && !s.sorts.count(dom.sort))
            problems.push_back("variable " + name + " has unknown sort " + dom.sort);
    for (const auto& [fn, decl] : s.functions) {
        if (!s.sorts.count(decl.domain_sort))
            problems.push_back("function " + fn + " has unknown domain sort " + decl.domain_sort);
        if (!s.sorts.count(decl.codomain_sort))
            problems.push_back("function " + fn + " has unknown codomain sort " +
                               decl.codomain_sort);
    }
    return problems;
}

// ── printing (debug and report text) ─────────────────────────────────────────

inline std::string format_term(const TermPtr& t) {
    switch (t->op) {
        case TermOp::IntConst: return std::to_string(t->num);
        case TermOp::MemberConst: return t->name;
        case TermOp::Var: return t->name;
        case TermOp::FunApp: return t->name + "(" + format_term(t->a) + ")";
        case TermOp::Add: return "(" + format_term(t->a) + " + " + format_term(t->b) + ")";
        case TermOp::Sub: return "(" + format_term(t->a) + " - " + format_term(t->b) + ")";
        case TermOp::MulConst: return std::to_string(t->num) + "*" + format_term(t->a);
        case TermOp::Ite: break;
    }
    return "ite(...)";
}

inline std::string format_formula(const FormulaPtr& f) {
    auto join = [&](const char* sep) {
        std::string out = "(";
        for (size_t i = 0; i < f->kids.size(); ++i) {
            if (i) out += sep;
            out += format_formula(f->kids[i]);
        }
        return out + ")";
    };
    switch (f->op) {
        case FormOp::BoolConst: return f->value ? "true" : "false";
        case FormOp::Eq: return format_term(f->lhs) + " = " + format_term(f->rhs);
        case FormOp::Le: return format_term(f->lhs) + " <= " + format_term(f->rhs);
        case FormOp::Lt: return format_term(f->lhs) + " < " + format_term(f->rhs);
        case FormOp::Ge: return format_term(f->lhs) + " >= " + format_term(f->rhs);
        case FormOp::Gt: return format_term(f->lhs) + " > " + format_term(f->rhs);
        case FormOp::And: return join(" and ");
        case FormOp::Or: return join(" or ");
        case FormOp::Not: return "not " + format_formula(f->kids[0]);
        case FormOp::Implies:
            return "(" + format_formula(f->kids[0]) + " implies " +
                   format_formula(f->kids[1]) + ")";
    }
    return "?";
}

}  // namespace contractcheck
