// encode.hpp - compile a ContractModel into assertion sets.
//
// Four queries share one vocabulary:
//
//   encode_spa            whole-contract execution (hard groups + soft wishes)
//   encode_performability is claim c performable at all?
//   encode_consequence    can consequence s be performed after its primary broke?
//   encode_limitation     can the debtor delay past the limitation cut-off?
//
// Hard assertions are named so cores map back to blocks:
//   own.<asset>   ownership fact            → PropertyFact block
//   grp.<claim>   primary-or-consequence    → primary claim block
//   claim.<c>     a single claim's formula  → claim block
//   q.<c>         the "actually performed" query conjunct
//   breach.<p>    primary p was breached
//   lim.<s>       delay past the limitation cut-off
//   dom.<var>     variable domain           → ContractDates block
//
// Inside grp.* disjunctions, consequence claims appear in "performed" form
// (their d = -1 escape dropped): a group is satisfied by the primary's own
// course or by a consequence actually happening, never by a consequence
// merely lying dormant while the primary is in a state it forbids.

#pragma once

#include <string>
#include <vector>

#include "contractcheck/logic.hpp"
#include "contractcheck/model.hpp"

namespace contractcheck {

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownClaim : public std::runtime_error {
public:
    explicit UnknownClaim(const std::string& id)
        : std::runtime_error("unknown claim: " + id) {}
};

class NotAConsequence : public std::runtime_error {
public:
    explicit NotAConsequence(const std::string& id)
        : std::runtime_error("claim has no primary link: " + id) {}
};

inline std::string measure_var(const ClaimSpec& warranty) { return warranty.measure_name; }
inline std::string units_var(const ClaimSpec& comp) { return "units_" + comp.id; }
inline std::string amount_var(const ClaimSpec& comp) { return "amount_" + comp.id; }

namespace detail {

inline long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

struct Encoder {
    const ContractModel& m;
    AssertionSet s;

    explicit Encoder(const ContractModel& model) : m(model) {
        if (!m.parties.empty()) {
            auto& members = s.sorts["Person"];
            for (const auto& p : m.parties) members.push_back(p.id);
        }
        if (!m.assets.empty()) {
            auto& members = s.sorts["Object"];
            for (const auto& a : m.assets) members.push_back(a.id);
        }
        if (!m.parties.empty() && !m.assets.empty())
            s.functions["owner"] = {"Object", "Person"};
    }

    // ── variable registration ──────────────────────────────────────────

    void register_var(const std::string& name, VarDomain dom) {
        for (auto& [existing, d] : s.var_domains) {
            if (existing != name) continue;
            d.lo = std::min(d.lo, dom.lo);
            d.hi = std::max(d.hi, dom.hi);
            d.minus_one |= dom.minus_one;
            for (long long v : dom.seeds)
                if (std::find(d.seeds.begin(), d.seeds.end(), v) == d.seeds.end())
                    d.seeds.push_back(v);
            return;
        }
        s.var_domains.emplace_back(name, std::move(dom));
    }

    void register_day(const std::string& var) {
        register_var(var, VarDomain{kIntSort, 0, m.horizon, true, {}});
    }

    // Claim-specific variables, in a fixed order per claim.
    void register_claim_vars(const ClaimSpec& c) {
        register_day(c.day_var);
        if (c.kind == ClaimKind::Warranty) {
            long long t = c.threshold;
            VarDomain dom{kIntSort, 0, 2 * t, false, {}};
            auto seed = [&](long long v) {
                if (v >= dom.lo && v <= dom.hi &&
                    std::find(dom.seeds.begin(), dom.seeds.end(), v) == dom.seeds.end())
                    dom.seeds.push_back(v);
            };
            seed(0);
            for (const auto& ref : c.consequences) {
                const ClaimSpec* q = m.find_claim(ref);
                if (q && q->kind == ClaimKind::Compensation) seed(t - q->unit);
            }
            seed(t - 1);
            seed(t);
            seed(t + 1);
            seed(2 * t);
            register_var(measure_var(c), std::move(dom));
        }
        if (c.kind == ClaimKind::Compensation) {
            const ClaimSpec* w = m.find_claim(*c.primary);
            long long t = w->threshold;
            long long k_max = std::max<long long>(1, ceil_div(std::max<long long>(t, 1), c.unit));
            VarDomain kd{kIntSort, 1, k_max, false, {}};
            VarDomain ld{kIntSort, 0, c.rate * k_max, false, {}};
            auto seed_k = [&](long long sh) {
                if (sh < 1) return;
                long long k = ceil_div(sh, c.unit);
                if (k < kd.lo || k > kd.hi) return;
                if (std::find(kd.seeds.begin(), kd.seeds.end(), k) == kd.seeds.end())
                    kd.seeds.push_back(k);
                long long l = c.rate * k;
                if (std::find(ld.seeds.begin(), ld.seeds.end(), l) == ld.seeds.end())
                    ld.seeds.push_back(l);
            };
            seed_k(1);
            for (long long msd : {0LL, t - c.unit, t - 1, t, t + 1, 2 * t})
                if (msd >= 0 && msd <= 2 * t) seed_k(t - msd);
            if (std::find(ld.seeds.begin(), ld.seeds.end(), 0LL) == ld.seeds.end())
                ld.seeds.push_back(0);
            register_var(units_var(c), std::move(kd));
            register_var(amount_var(c), std::move(ld));
        }
    }

    // ── claim formulas ─────────────────────────────────────────────────

    FormulaPtr owner_equals(const std::string& asset, const std::string& party) const {
        return mk_eq(mk_fun("owner", mk_member("Object", asset)),
                     mk_member("Person", party));
    }

    // Transfer/Pay: performed no earlier than due, with the debtor owning
    // the subject; or not performed at all.
    FormulaPtr conveyance(const ClaimSpec& c) const {
        auto d = mk_var(c.day_var);
        return mk_or({mk_eq(d, mk_int(-1)),
                      mk_and({mk_ge(d, mk_int(*c.due_day)),
                              owner_equals(*c.subject, c.debtor)})});
    }

    FormulaPtr warranty_breach(const ClaimSpec& w) const {
        auto d = mk_var(w.day_var);
        return mk_and({mk_le(mk_int(m.closing_day), d),
                       mk_le(d, mk_int(m.closing_day + w.assert_window)),
                       mk_lt(mk_var(measure_var(w)), mk_int(w.threshold))});
    }

    // Warranty: never asserted with the measure holding up, or asserted
    // within the window against an actual shortfall.
    FormulaPtr warranty(const ClaimSpec& w) const {
        auto d = mk_var(w.day_var);
        return mk_or({mk_and({mk_eq(d, mk_int(-1)),
                              mk_ge(mk_var(measure_var(w)), mk_int(w.threshold))}),
                      warranty_breach(w)});
    }

    // Performance, the happened case: strictly after the assertion, within
    // the make-good window.
    FormulaPtr performance_active(const ClaimSpec& n) const {
        const ClaimSpec* w = m.find_claim(*n.primary);
        auto dg = mk_var(w->day_var);
        auto dn = mk_var(n.day_var);
        return mk_and({mk_ge(dg, mk_int(0)), mk_lt(dg, dn),
                       mk_le(dn, mk_add(dg, mk_int(n.perform_window)))});
    }

    FormulaPtr performance(const ClaimSpec& n) const {
        const ClaimSpec* w = m.find_claim(*n.primary);
        auto dn = mk_var(n.day_var);
        return mk_or({mk_eq(dn, mk_int(-1)),
                      mk_and({mk_lt(mk_var(w->day_var), dn),
                              mk_le(dn, mk_add(mk_var(w->day_var),
                                               mk_int(n.perform_window)))})});
    }

    // Payment definition for compensation: if paid, the amount covers the
    // shortfall at `rate` per started `unit`, at least `minimum`.
    FormulaPtr compensation_definition(const ClaimSpec& c) const {
        const ClaimSpec* w = m.find_claim(*c.primary);
        auto sh = mk_sub(mk_int(w->threshold), mk_var(measure_var(*w)));
        auto k = mk_var(units_var(c));
        auto l = mk_var(amount_var(c));
        return mk_implies(
            mk_ge(mk_var(c.day_var), mk_int(0)),
            mk_and({mk_lt(mk_mul(c.unit, mk_sub(k, mk_int(1))), sh),
                    mk_le(sh, mk_mul(c.unit, k)), mk_ge(k, mk_int(1)),
                    mk_eq(l, mk_mul(c.rate, k)), mk_ge(l, mk_int(c.minimum)),
                    mk_ge(sh, mk_int(1))}));
    }

    FormulaPtr compensation_active(const ClaimSpec& c) const {
        const ClaimSpec* w = m.find_claim(*c.primary);
        auto dg = mk_var(w->day_var);
        auto ds = mk_var(c.day_var);
        return mk_and({compensation_definition(c),
                       mk_ge(dg, mk_int(0)), mk_lt(dg, ds),
                       mk_le(ds, mk_add(dg, mk_int(c.perform_window + c.pay_window)))});
    }

    FormulaPtr compensation(const ClaimSpec& c) const {
        const ClaimSpec* w = m.find_claim(*c.primary);
        auto dg = mk_var(w->day_var);
        auto ds = mk_var(c.day_var);
        return mk_and(
            {compensation_definition(c),
             mk_or({mk_and({mk_eq(ds, mk_int(-1)), mk_eq(mk_var(amount_var(c)), mk_int(0))}),
                    mk_and({mk_ge(dg, mk_int(0)), mk_lt(dg, ds),
                            mk_le(ds, mk_add(dg, mk_int(c.perform_window + c.pay_window)))})})});
    }

    // Restitution, the happened case: the primary stayed unperformed and
    // the return happens strictly after the primary's due day.
    FormulaPtr restitution_active(const ClaimSpec& r) const {
        const ClaimSpec* p = m.find_claim(*r.primary);
        return mk_and({mk_eq(mk_var(p->day_var), mk_int(-1)),
                       mk_gt(mk_var(r.day_var), mk_int(*p->due_day))});
    }

    FormulaPtr restitution(const ClaimSpec& r) const {
        return mk_or({mk_eq(mk_var(r.day_var), mk_int(-1)), restitution_active(r)});
    }

    FormulaPtr claim_formula(const ClaimSpec& c) const {
        switch (c.kind) {
            case ClaimKind::Transfer:
            case ClaimKind::Pay: return conveyance(c);
            case ClaimKind::Warranty: return warranty(c);
            case ClaimKind::Performance: return performance(c);
            case ClaimKind::Compensation: return compensation(c);
            case ClaimKind::Restitution: return restitution(c);
        }
        throw EncodeError("unsupported claim kind");
    }

    FormulaPtr active_formula(const ClaimSpec& c) const {
        switch (c.kind) {
            case ClaimKind::Performance: return performance_active(c);
            case ClaimKind::Compensation: return compensation_active(c);
            case ClaimKind::Restitution: return restitution_active(c);
            default: throw EncodeError("claim " + c.id + " cannot appear as a consequence");
        }
    }

    FormulaPtr breach_formula(const ClaimSpec& primary) const {
        switch (primary.kind) {
            case ClaimKind::Transfer:
            case ClaimKind::Pay:
                return mk_eq(mk_var(primary.day_var), mk_int(-1));
            case ClaimKind::Warranty: return warranty_breach(primary);
            default: throw EncodeError("claim " + primary.id + " is not primary");
        }
    }

    // ── assembly pieces ────────────────────────────────────────────────

    static bool is_primary(const ClaimSpec& c) {
        return c.kind == ClaimKind::Transfer || c.kind == ClaimKind::Pay ||
               c.kind == ClaimKind::Warranty;
    }

    std::vector<const ClaimSpec*> consequences_of(const ClaimSpec& primary) const {
        std::vector<const ClaimSpec*> out;
        for (const auto& c : m.claims)
            if (c.primary && *c.primary == primary.id) out.push_back(&c);
        return out;
    }

    void add_ownership() {
        for (const auto& f : m.facts)
            s.hard.push_back({"own." + f.asset, owner_equals(f.asset, f.owner), f.id});
    }

    void add_groups() {
        for (const auto& c : m.claims) {
            if (!is_primary(c)) continue;
            std::vector<FormulaPtr> branches{claim_formula(c)};
            for (const ClaimSpec* q : consequences_of(c)) branches.push_back(active_formula(*q));
            s.hard.push_back(
                {"grp." + c.id,
                 branches.size() == 1 ? branches.front() : mk_or(std::move(branches)), c.id});
        }
    }

    void add_domains() {
        for (const auto& [name, dom] : s.var_domains) {
            auto v = mk_var(name);
            auto in_range = mk_and({mk_ge(v, mk_int(dom.lo)), mk_le(v, mk_int(dom.hi))});
            FormulaPtr f = dom.minus_one
                               ? mk_or({mk_eq(v, mk_int(-1)), in_range})
                               : in_range;
            s.hard.push_back({"dom." + name, f, m.dates_block});
        }
    }

    void add_softs() {
        for (const auto& c : m.claims) {
            auto d = mk_var(c.day_var);
            switch (c.kind) {
                case ClaimKind::Transfer:
                case ClaimKind::Pay:
                    s.soft.push_back({"soft." + c.id, mk_ge(d, mk_int(0)), c.id});
                    break;
                case ClaimKind::Warranty:
                case ClaimKind::Performance:
                case ClaimKind::Restitution:
                    s.soft.push_back({"soft." + c.id, mk_eq(d, mk_int(-1)), c.id});
                    break;
                case ClaimKind::Compensation:
                    break;  // the amount, not the day, is what matters; no wish
            }
        }
    }

    // Register vars for a query touching exactly `involved`, in document order.
    void register_involved(std::vector<const ClaimSpec*> involved) {
        std::sort(involved.begin(), involved.end(),
                  [&](const ClaimSpec* a, const ClaimSpec* b) {
                      return m.block_index.at(a->id) < m.block_index.at(b->id);
                  });
        for (const ClaimSpec* c : involved) register_claim_vars(*c);
    }
};

}  // namespace detail

// Whole-contract execution: ownership facts, one group per primary claim,
// domains; soft wishes prefer primaries performed and consequences dormant.
inline AssertionSet encode_spa(const ContractModel& m) {
    detail::Encoder e(m);
    for (const auto& c : m.claims) e.register_claim_vars(c);
    e.add_ownership();
    e.add_groups();
    e.add_softs();
    e.add_domains();
    return std::move(e.s);
}

// Can claim c be performed at all? Transfer/Pay additionally conjoin the
// query d ≥ 0; a warranty is performable when some consistent state exists,
// which includes the never-breached reading.
inline AssertionSet encode_performability(const ContractModel& m, const std::string& claim_id) {
    const ClaimSpec* c = m.find_claim(claim_id);
    if (!c) throw UnknownClaim(claim_id);
    if (!detail::Encoder::is_primary(*c))
        throw EncodeError("performability is asked of primary claims; " + claim_id +
                          " is a consequence");
    detail::Encoder e(m);
    e.register_claim_vars(*c);
    e.add_ownership();
    e.s.hard.push_back({"claim." + c->id, e.claim_formula(*c), c->id});
    if (c->kind != ClaimKind::Warranty)
        e.s.hard.push_back({"q." + c->id, mk_ge(mk_var(c->day_var), mk_int(0)), c->id});
    e.add_domains();
    return std::move(e.s);
}

// Can consequence s be performed, given its primary was breached?
inline AssertionSet encode_consequence(const ContractModel& m, const std::string& claim_id) {
    const ClaimSpec* c = m.find_claim(claim_id);
    if (!c) throw UnknownClaim(claim_id);
    if (!c->primary) throw NotAConsequence(claim_id);
    const ClaimSpec* p = m.find_claim(*c->primary);
    detail::Encoder e(m);
    e.register_involved({p, c});
    e.add_ownership();
    e.s.hard.push_back({"breach." + p->id, e.breach_formula(*p), p->id});
    e.s.hard.push_back({"claim." + c->id, e.claim_formula(*c), c->id});
    e.s.hard.push_back({"q." + c->id, mk_ge(mk_var(c->day_var), mk_int(0)), c->id});
    e.add_domains();
    return std::move(e.s);
}

// Is there an execution where consequence s's window still runs past the
// limitation cut-off? SAT exposes a defect: the debtor can delay beyond
// enforceability.
inline AssertionSet encode_limitation(const ContractModel& m, const std::string& claim_id) {
    const ClaimSpec* c = m.find_claim(claim_id);
    if (!c) throw UnknownClaim(claim_id);
    if (c->kind != ClaimKind::Performance && c->kind != ClaimKind::Compensation)
        throw NotAConsequence(claim_id);
    const ClaimSpec* w = m.find_claim(*c->primary);

    AssertionSet s = encode_spa(m);
    s.soft.clear();
    detail::Encoder e(m);  // shares the vocabulary; used for formula building
    long long window_end = c->perform_window +
                           (c->kind == ClaimKind::Compensation ? c->pay_window : 0);
    s.hard.push_back({"breach." + w->id, e.breach_formula(*w), w->id});
    s.hard.push_back({"lim." + c->id,
                      mk_lt(mk_int(m.closing_day + w->limitation),
                            mk_add(mk_var(w->day_var), mk_int(window_end))),
                      c->id});
    return s;
}

}  // namespace contractcheck
