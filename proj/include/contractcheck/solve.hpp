// solve.hpp - built-in bounded decision procedure for AssertionSets.
//
// The search is exhaustive over finite candidate domains:
//
//   * Day-style variables get a candidate list built from the constants
//     occurring in the assertions (plus pairwise sums/differences and ±1
//     neighbours, clamped to the declared domain). Comparisons in the
//     emitted fragment relate variables to constants or to another
//     variable plus a constant, so between two consecutive candidates no
//     comparison changes truth; a model can always be slid onto
//     candidates. Small domains are additionally enumerated in full.
//   * Encoder-provided seeds cover values the constant pool cannot see
//     (measure thresholds, derived unit counts and amounts).
//   * Finite-sort symbols and function table entries enumerate their
//     member lists.
//
// Assertions split into connected components over shared symbols; each
// component is searched independently (depth-first, declaration order,
// values ascending with -1 first) with three-valued pruning and with
// ground equalities pre-forced. UNSAT answers come with a deletion-
// minimized core. maximize_soft walks soft subsets by descending size in
// lexicographic order, so verdicts and models are deterministic.

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contractcheck/logic.hpp"

namespace contractcheck {

inline constexpr long long kDefaultSolveLimit = 5'000'000;

class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(long long explored)
        : std::runtime_error("resource limit exceeded after " + std::to_string(explored) +
                             " explored assignments"),
          explored_(explored) {}
    long long explored() const { return explored_; }

private:
    long long explored_;
};

class NotUnsat : public std::runtime_error {
public:
    NotUnsat() : std::runtime_error("assertion subset is satisfiable; it has no core") {}
};

struct SolveResult {
    bool is_sat = false;
    Assignment model;                          // populated when SAT
    std::vector<std::string> soft_satisfied;   // soft names true under model
    std::vector<std::string> core;             // when UNSAT: 1-minimal, declaration order
};

// Per-variable candidate values the bounded search explores.
struct CandidateDomains {
    std::map<std::string, std::vector<long long>> values;  // ascending, -1 first
};

inline CandidateDomains build_candidates(const AssertionSet& s) {
    // Domains this small are simply enumerated outright.
    constexpr long long kSmallDomain = 128;
    // Beyond this many distinct constants the pairwise closure is skipped;
    // contracts stay far below it.
    constexpr size_t kPairwiseCap = 48;

    std::set<long long> pool{-1, 0};
    auto collect = [&pool](const TermPtr& t, auto&& self) -> void {
        if (t->op == TermOp::IntConst) pool.insert(t->num);
        if (t->a) self(t->a, self);
        if (t->b) self(t->b, self);
    };
    auto walk = [&collect](const FormulaPtr& f, auto&& self) -> void {
        if (f->lhs) collect(f->lhs, collect);
        if (f->rhs) collect(f->rhs, collect);
        for (const auto& k : f->kids) self(k, self);
    };
    for (const auto& a : s.hard) walk(a.formula, walk);
    for (const auto& a : s.soft) walk(a.formula, walk);

    std::set<long long> closed = pool;
    if (pool.size() <= kPairwiseCap) {
        for (long long a : pool)
            for (long long b : pool) {
                closed.insert(a + b);
                closed.insert(a - b);
            }
    }
    std::set<long long> widened;
    for (long long v : closed) {
        widened.insert(v - 1);
        widened.insert(v);
        widened.insert(v + 1);
    }

    CandidateDomains out;
    for (const auto& [name, dom] : s.var_domains) {
        if (dom.sort != kIntSort) continue;
        std::set<long long> vals;
        if (dom.minus_one) vals.insert(-1);
        if (dom.lo <= dom.hi) {
            vals.insert(dom.lo);
            vals.insert(dom.hi);
            if (dom.hi - dom.lo < kSmallDomain) {
                for (long long v = dom.lo; v <= dom.hi; ++v) vals.insert(v);
            } else {
                for (long long v : widened)
                    if (v >= dom.lo && v <= dom.hi) vals.insert(v);
            }
            for (long long v : dom.seeds)
                if (v >= dom.lo && v <= dom.hi) vals.insert(v);
        }
        out.values[name] = {vals.begin(), vals.end()};
    }
    return out;
}

namespace detail {

inline constexpr long long kUnset = std::numeric_limits<long long>::min();
inline constexpr int8_t kF = 0, kT = 1, kU = 2;

// Compiled mirror of Term/Formula with symbols resolved to state indices:
// variables occupy [0, nv), function table entries [nv, nv + ns).

struct CForm;

struct CTerm {
    TermOp op = TermOp::IntConst;
    long long num = 0;   // IntConst value; MulConst coefficient; MemberConst ordinal
    int sym = -1;        // Var: state index
    int base = -1;       // FunApp: state index of the function's first entry
    int span = 0;        // FunApp: number of entries (domain size)
    std::unique_ptr<CTerm> a, b;
    std::unique_ptr<CForm> cond;
};

struct CForm {
    FormOp op = FormOp::BoolConst;
    bool value = false;
    std::unique_ptr<CTerm> lhs, rhs;
    std::vector<CForm> kids;
};

inline int8_t eval_form(const CForm& f, const std::vector<long long>& st);

inline std::optional<long long> eval_term(const CTerm& t, const std::vector<long long>& st) {
    switch (t.op) {
        case TermOp::IntConst:
        case TermOp::MemberConst:
            return t.num;
        case TermOp::Var:
            return st[t.sym] == kUnset ? std::nullopt : std::optional(st[t.sym]);
        case TermOp::FunApp: {
            auto arg = eval_term(*t.a, st);
            if (!arg) return std::nullopt;
            long long v = st[t.base + *arg];
            return v == kUnset ? std::nullopt : std::optional(v);
        }
        case TermOp::Add:
        case TermOp::Sub: {
            auto l = eval_term(*t.a, st);
            auto r = eval_term(*t.b, st);
            if (!l || !r) return std::nullopt;
            return t.op == TermOp::Add ? *l + *r : *l - *r;
        }
        case TermOp::MulConst: {
            auto v = eval_term(*t.a, st);
            return v ? std::optional(t.num * *v) : std::nullopt;
        }
        case TermOp::Ite: {
            int8_t c = eval_form(*t.cond, st);
            if (c == kU) return std::nullopt;
            return eval_term(c == kT ? *t.a : *t.b, st);
        }
    }
    return std::nullopt;
}

inline int8_t eval_form(const CForm& f, const std::vector<long long>& st) {
    switch (f.op) {
        case FormOp::BoolConst:
            return f.value ? kT : kF;
        case FormOp::Eq:
        case FormOp::Le:
        case FormOp::Lt:
        case FormOp::Ge:
        case FormOp::Gt: {
            auto l = eval_term(*f.lhs, st);
            auto r = eval_term(*f.rhs, st);
            if (!l || !r) return kU;
            switch (f.op) {
                case FormOp::Eq: return *l == *r ? kT : kF;
                case FormOp::Le: return *l <= *r ? kT : kF;
                case FormOp::Lt: return *l < *r ? kT : kF;
                case FormOp::Ge: return *l >= *r ? kT : kF;
                default: return *l > *r ? kT : kF;
            }
        }
        case FormOp::And: {
            bool unknown = false;
            for (const auto& k : f.kids) {
                int8_t v = eval_form(k, st);
                if (v == kF) return kF;
                unknown |= (v == kU);
            }
            return unknown ? kU : kT;
        }
        case FormOp::Or: {
            bool unknown = false;
            for (const auto& k : f.kids) {
                int8_t v = eval_form(k, st);
                if (v == kT) return kT;
                unknown |= (v == kU);
            }
            return unknown ? kU : kF;
        }
        case FormOp::Not: {
            int8_t v = eval_form(f.kids[0], st);
            return v == kU ? kU : (v == kT ? kF : kT);
        }
        case FormOp::Implies: {
            int8_t p = eval_form(f.kids[0], st);
            int8_t q = eval_form(f.kids[1], st);
            if (p == kF || q == kT) return kT;
            if (p == kT && q == kF) return kF;
            return kU;
        }
    }
    return kU;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct Search {
    const AssertionSet& set;

    std::vector<std::string> var_names;
    std::vector<const VarDomain*> var_doms;
    std::vector<std::vector<long long>> cand;   // per var
    std::map<std::string, int, std::less<>> var_index;

    struct Slot {
        std::string fn;
        std::string member;
        const std::vector<std::string>* codomain;
    };
    std::vector<Slot> slots;
    std::map<std::string, int> fn_base;  // function → first slot index
    int nv = 0, ns = 0;

    struct CAssert {
        std::string name;
        CForm form;
        std::vector<int> syms;                               // sorted state indices
        std::vector<std::pair<int, long long>> forced;       // sym → value (ground equalities)
    };
    std::vector<CAssert> hard, soft;

    long long limit;
    long long explored = 0;

    Search(const AssertionSet& s, long long lim) : set(s), limit(lim) {
        for (const auto& [name, dom] : s.var_domains) {
            var_index.emplace(name, nv++);
            var_names.push_back(name);
            var_doms.push_back(&dom);
        }
        CandidateDomains cd = build_candidates(s);
        cand.resize(nv);
        for (int v = 0; v < nv; ++v) {
            if (var_doms[v]->sort == kIntSort) {
                cand[v] = cd.values.at(var_names[v]);
            } else {
                auto it = s.sorts.find(var_doms[v]->sort);
                if (it == s.sorts.end())
                    throw InternalError("unknown sort " + var_doms[v]->sort);
                for (size_t i = 0; i < it->second.size(); ++i) cand[v].push_back((long long)i);
            }
        }
        for (const auto& [fn, decl] : s.functions) {
            auto dit = s.sorts.find(decl.domain_sort);
            auto cit = s.sorts.find(decl.codomain_sort);
            if (dit == s.sorts.end() || cit == s.sorts.end())
                throw InternalError("function " + fn + " over unknown sort");
            fn_base[fn] = ns;
            for (const auto& member : dit->second) {
                slots.push_back({fn, member, &cit->second});
                ++ns;
            }
        }
        for (const auto& a : s.hard) hard.push_back(compile_assertion(a));
        for (const auto& a : s.soft) soft.push_back(compile_assertion(a));
    }

    int member_ordinal(const std::string& sort, const std::string& member) const {
        auto it = set.sorts.find(sort);
        if (it == set.sorts.end()) throw InternalError("unknown sort " + sort);
        for (size_t i = 0; i < it->second.size(); ++i)
            if (it->second[i] == member) return (int)i;
        throw InternalError("unknown member " + member + " of sort " + sort);
    }

    std::unique_ptr<CTerm> compile_term(const TermPtr& t) {
        auto c = std::make_unique<CTerm>();
        c->op = t->op;
        c->num = t->num;
        switch (t->op) {
            case TermOp::IntConst:
                break;
            case TermOp::MemberConst:
                c->num = member_ordinal(t->sort, t->name);
                break;
            case TermOp::Var: {
                auto it = var_index.find(t->name);
                if (it == var_index.end()) throw UnboundSymbol(t->name);
                c->sym = it->second;
                break;
            }
            case TermOp::FunApp: {
                auto it = fn_base.find(t->name);
                if (it == fn_base.end()) throw UnboundSymbol(t->name);
                c->base = nv + it->second;
                c->span = (int)set.sorts.at(set.functions.at(t->name).domain_sort).size();
                c->a = compile_term(t->a);
                break;
            }
            case TermOp::Add:
            case TermOp::Sub:
                c->a = compile_term(t->a);
                c->b = compile_term(t->b);
                break;
            case TermOp::MulConst:
                c->a = compile_term(t->a);
                break;
            case TermOp::Ite:
                c->cond = std::make_unique<CForm>(compile_form(t->cond));
                c->a = compile_term(t->a);
                c->b = compile_term(t->b);
                break;
        }
        return c;
    }

    CForm compile_form(const FormulaPtr& f) {
        CForm c;
        c.op = f->op;
        c.value = f->value;
        if (f->lhs) c.lhs = compile_term(f->lhs);
        if (f->rhs) c.rhs = compile_term(f->rhs);
        for (const auto& k : f->kids) c.kids.push_back(compile_form(k));
        return c;
    }

    void term_symbols(const CTerm& t, std::set<int>& out) const {
        if (t.op == TermOp::Var) out.insert(t.sym);
        if (t.op == TermOp::FunApp) {
            if (t.a->op == TermOp::MemberConst) {
                out.insert(t.base + (int)t.a->num);
            } else {
                for (int i = 0; i < t.span; ++i) out.insert(t.base + i);
                term_symbols(*t.a, out);
            }
            return;
        }
        if (t.a) term_symbols(*t.a, out);
        if (t.b) term_symbols(*t.b, out);
        if (t.cond) form_symbols(*t.cond, out);
    }

    void form_symbols(const CForm& f, std::set<int>& out) const {
        if (f.lhs) term_symbols(*f.lhs, out);
        if (f.rhs) term_symbols(*f.rhs, out);
        for (const auto& k : f.kids) form_symbols(k, out);
    }

    // Ground equalities among an assertion's top-level conjuncts pin a
    // symbol to one value before any search.
    void collect_forced(const CForm& f, std::vector<std::pair<int, long long>>& out) const {
        if (f.op == FormOp::And) {
            for (const auto& k : f.kids) collect_forced(k, out);
            return;
        }
        if (f.op != FormOp::Eq) return;
        const CTerm* l = f.lhs.get();
        const CTerm* r = f.rhs.get();
        for (int flip = 0; flip < 2; ++flip, std::swap(l, r)) {
            if (l->op == TermOp::Var && r->op == TermOp::IntConst) {
                out.emplace_back(l->sym, r->num);
                return;
            }
            if (l->op == TermOp::Var && r->op == TermOp::MemberConst) {
                out.emplace_back(l->sym, r->num);
                return;
            }
            if (l->op == TermOp::FunApp && l->a->op == TermOp::MemberConst &&
                r->op == TermOp::MemberConst) {
                out.emplace_back(l->base + (int)l->a->num, r->num);
                return;
            }
        }
    }

    CAssert compile_assertion(const Assertion& a) {
        CAssert c;
        c.name = a.name;
        c.form = compile_form(a.formula);
        std::set<int> syms;
        form_symbols(c.form, syms);
        c.syms.assign(syms.begin(), syms.end());
        collect_forced(c.form, c.forced);
        return c;
    }

    // Depth-first search of one component. Returns false when no candidate
    // combination satisfies every member assertion.
    bool search_component(const std::vector<int>& syms,
                          const std::vector<const CAssert*>& asserts,
                          const std::vector<long long>& forced, size_t pos,
                          std::vector<long long>& st) {
        if (pos == syms.size()) return true;
        int sym = syms[pos];

        std::vector<long long> single;
        const std::vector<long long>* values;
        if (forced[sym] != kUnset) {
            single.push_back(forced[sym]);
            values = &single;
        } else if (sym < nv) {
            values = &cand[sym];
        } else {
            single.resize(slots[sym - nv].codomain->size());
            for (size_t i = 0; i < single.size(); ++i) single[i] = (long long)i;
            values = &single;
        }

        for (long long v : *values) {
            if (++explored > limit) throw ResourceLimitError(explored);
            st[sym] = v;
            bool viable = true;
            for (const CAssert* a : asserts) {
                if (eval_form(a->form, st) == kF) {
                    viable = false;
                    break;
                }
            }
            if (viable && search_component(syms, asserts, forced, pos + 1, st)) return true;
            st[sym] = kUnset;
        }
        return false;
    }

    // Decides the masked subset. On SAT fills `st` with a total state.
    bool solve(const std::vector<char>& hard_mask, const std::vector<char>& soft_mask,
               std::vector<long long>& st) {
        std::vector<const CAssert*> active;
        for (size_t i = 0; i < hard.size(); ++i)
            if (hard_mask[i]) active.push_back(&hard[i]);
        for (size_t i = 0; i < soft.size(); ++i)
            if (soft_mask[i]) active.push_back(&soft[i]);

        st.assign(nv + ns, kUnset);

        // A variable with an empty declared domain admits no total model.
        for (int v = 0; v < nv; ++v)
            if (cand[v].empty()) return false;

        std::vector<long long> forced(nv + ns, kUnset);
        for (const CAssert* a : active) {
            if (a->syms.empty()) {
                if (eval_form(a->form, st) == kF) return false;  // ground and false
                continue;
            }
            for (const auto& [sym, value] : a->forced) {
                if (sym < nv) {
                    // Domains constrain models even when no dom.* assertion
                    // repeats them.
                    const VarDomain& d = *var_doms[sym];
                    bool legal = d.sort == kIntSort
                                     ? d.contains(value)
                                     : value >= 0 && value < (long long)cand[sym].size();
                    if (!legal) return false;
                }
                if (forced[sym] != kUnset && forced[sym] != value) return false;
                forced[sym] = value;
            }
        }

        UnionFind uf(nv + ns);
        for (const CAssert* a : active)
            for (size_t i = 1; i < a->syms.size(); ++i) uf.unite(a->syms[0], a->syms[i]);

        // Components in order of their smallest symbol.
        std::map<int, std::vector<int>> comp_syms;
        for (const CAssert* a : active)
            for (int sym : a->syms) comp_syms[uf.find(sym)];  // create entries
        for (int sym = 0; sym < nv + ns; ++sym) {
            auto it = comp_syms.find(uf.find(sym));
            if (it != comp_syms.end()) it->second.push_back(sym);
        }
        std::map<int, std::vector<const CAssert*>> comp_asserts;
        for (const CAssert* a : active)
            if (!a->syms.empty()) comp_asserts[uf.find(a->syms[0])].push_back(a);

        std::vector<int> roots;
        for (int sym = 0; sym < nv + ns; ++sym) {
            auto it = comp_syms.find(uf.find(sym));
            if (it != comp_syms.end() && it->second.front() == sym) roots.push_back(uf.find(sym));
        }
        for (int root : roots) {
            if (!search_component(comp_syms[root], comp_asserts[root], forced, 0, st))
                return false;
        }

        for (int v = 0; v < nv; ++v)
            if (st[v] == kUnset) st[v] = cand[v].front();
        for (int sl = 0; sl < ns; ++sl)
            if (st[nv + sl] == kUnset) st[nv + sl] = 0;
        return true;
    }

    Assignment extract(const std::vector<long long>& st) const {
        Assignment a;
        for (int v = 0; v < nv; ++v) {
            if (var_doms[v]->sort == kIntSort)
                a.ints[var_names[v]] = st[v];
            else
                a.members[var_names[v]] = set.sorts.at(var_doms[v]->sort)[(size_t)st[v]];
        }
        for (int sl = 0; sl < ns; ++sl)
            a.fun[{slots[sl].fn, slots[sl].member}] = (*slots[sl].codomain)[(size_t)st[nv + sl]];
        return a;
    }

    std::vector<std::string> satisfied_softs(const std::vector<long long>& st) const {
        std::vector<std::string> out;
        for (const auto& a : soft)
            if (eval_form(a.form, st) == kT) out.push_back(a.name);
        return out;
    }

    // Deletion pass: drop each masked-in assertion; keep it dropped iff the
    // remainder is still unsatisfiable.
    std::vector<std::string> shrink_core(std::vector<char> mask) {
        std::vector<char> no_soft(soft.size(), 0);
        std::vector<long long> st;
        for (size_t i = 0; i < hard.size(); ++i) {
            if (!mask[i]) continue;
            mask[i] = 0;
            if (solve(mask, no_soft, st)) mask[i] = 1;
        }
        std::vector<std::string> core;
        for (size_t i = 0; i < hard.size(); ++i)
            if (mask[i]) core.push_back(hard[i].name);
        return core;
    }
};

}  // namespace detail

// Decides the hard assertions. SAT ignores soft assertions (they are still
// reported as satisfied/violated under the returned model); UNSAT carries a
// 1-minimal core.
inline SolveResult solve_bounded(const AssertionSet& s, long long limit = kDefaultSolveLimit) {
    detail::Search search(s, limit);
    std::vector<char> hard_mask(s.hard.size(), 1), no_soft(s.soft.size(), 0);
    std::vector<long long> st;
    if (search.solve(hard_mask, no_soft, st)) {
        SolveResult r;
        r.is_sat = true;
        r.model = search.extract(st);
        r.soft_satisfied = search.satisfied_softs(st);
        return r;
    }
    SolveResult r;
    r.core = search.shrink_core(hard_mask);
    return r;
}

// Maximizes the number of satisfied soft assertions over models of the hard
// ones. Ties prefer the earliest soft subset in declaration order, then the
// smallest values in variable declaration order.
inline SolveResult maximize_soft(const AssertionSet& s, long long limit = kDefaultSolveLimit) {
    detail::Search search(s, limit);
    std::vector<char> hard_mask(s.hard.size(), 1), soft_mask(s.soft.size(), 0);
    std::vector<long long> base_state;
    if (!search.solve(hard_mask, soft_mask, base_state)) {
        SolveResult r;
        r.core = search.shrink_core(hard_mask);
        return r;
    }

    auto sat_with = [&](const std::vector<size_t>& chosen, std::vector<long long>& st) {
        std::fill(soft_mask.begin(), soft_mask.end(), 0);
        for (size_t i : chosen) soft_mask[i] = 1;
        return search.solve(hard_mask, soft_mask, st);
    };

    size_t n = s.soft.size();
    for (size_t size = n; size >= 1; --size) {
        std::vector<size_t> chosen(size);
        for (size_t i = 0; i < size; ++i) chosen[i] = i;
        while (true) {
            std::vector<long long> st;
            if (sat_with(chosen, st)) {
                SolveResult r;
                r.is_sat = true;
                r.model = search.extract(st);
                r.soft_satisfied = search.satisfied_softs(st);
                return r;
            }
            // next size-combination in lexicographic order
            size_t i = size;
            while (i > 0 && chosen[i - 1] == n - size + (i - 1)) --i;
            if (i == 0) break;
            ++chosen[i - 1];
            for (size_t j = i; j < size; ++j) chosen[j] = chosen[j - 1] + 1;
        }
    }

    SolveResult r;  // no soft subset is satisfiable; the hard model stands
    r.is_sat = true;
    r.model = search.extract(base_state);
    r.soft_satisfied = search.satisfied_softs(base_state);
    return r;
}

// Deletion-based minimization of a named unsatisfiable subset of s.hard.
inline std::vector<std::string> minimize_core(const AssertionSet& s,
                                              const std::vector<std::string>& initial,
                                              long long limit = kDefaultSolveLimit) {
    detail::Search search(s, limit);
    std::vector<char> mask(s.hard.size(), 0), no_soft(s.soft.size(), 0);
    for (const auto& name : initial) {
        bool known = false;
        for (size_t i = 0; i < s.hard.size(); ++i) {
            if (s.hard[i].name == name) {
                mask[i] = 1;
                known = true;
                break;
            }
        }
        if (!known) throw InternalError("minimize_core: unknown assertion " + name);
    }
    std::vector<long long> st;
    if (search.solve(mask, no_soft, st)) throw NotUnsat();
    return search.shrink_core(mask);
}

}  // namespace contractcheck
