// model.hpp - typed contract object model.
//
// build_model turns a validated BlockDocument into plain structs the
// encoder can walk without re-resolving references. All days are offsets
// from signing (day 0); `due: closing` resolves to the closing day here.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contractcheck/blocks.hpp"

namespace contractcheck {

enum class Role { Seller, Purchaser, Third };
enum class AssetType { Shares, Cash };
enum class ClaimKind { Transfer, Pay, Warranty, Performance, Compensation, Restitution };

inline const char* claim_kind_name(ClaimKind k) {
    switch (k) {
        case ClaimKind::Transfer: return "Transfer";
        case ClaimKind::Pay: return "Pay";
        case ClaimKind::Warranty: return "Warranty";
        case ClaimKind::Performance: return "Performance";
        case ClaimKind::Compensation: return "Compensation";
        case ClaimKind::Restitution: return "Restitution";
    }
    return "?";
}

struct Party {
    std::string id;
    Role role = Role::Third;
};

struct Asset {
    std::string id;
    AssetType type = AssetType::Shares;
    std::optional<long long> amount;  // present iff Cash
};

struct PropertyFact {
    std::string id;  // block id
    std::string asset;
    std::string owner;
};

// One struct for all claim kinds; only the fields its kind demands are
// meaningful. Performance/Compensation inherit debtor/creditor from their
// warranty, Restitution reverses its primary's direction.
struct ClaimSpec {
    std::string id;
    ClaimKind kind = ClaimKind::Transfer;
    std::string debtor;
    std::string creditor;

    std::optional<std::string> subject;  // Transfer/Pay: asset conveyed
    std::optional<long long> due_day;    // Transfer/Pay, resolved

    std::string measure_name;            // Warranty
    long long threshold = 0;             // Warranty
    long long assert_window = 0;         // Warranty
    long long limitation = 0;            // Warranty
    std::vector<std::string> consequences;

    std::optional<std::string> primary;  // Performance/Compensation/Restitution
    long long perform_window = 0;        // Performance/Compensation
    long long pay_window = 0;            // Compensation
    long long rate = 0;                  // Compensation
    long long unit = 1;                  // Compensation
    long long minimum = 0;               // Compensation

    std::string day_var;  // name of this claim's performance-day variable
};

struct ContractModel {
    std::vector<Party> parties;    // declaration order
    std::vector<Asset> assets;
    std::vector<PropertyFact> facts;
    std::vector<ClaimSpec> claims;

    long long signing_day = 0;
    long long closing_day = 0;
    long long horizon = 0;

    std::string source_name;  // for reports; file stem or "<input>"
    std::string dates_block;  // id of the ContractDates block
    std::map<std::string, SourceSpan> block_span;  // block id → source lines
    std::map<std::string, int> block_index;        // block id → position in document

    const Party* find_party(std::string_view id) const { return find_in(parties, id); }
    const Asset* find_asset(std::string_view id) const { return find_in(assets, id); }
    const ClaimSpec* find_claim(std::string_view id) const { return find_in(claims, id); }

    const PropertyFact* fact_for(std::string_view asset_id) const {
        for (const auto& f : facts)
            if (f.asset == asset_id) return &f;
        return nullptr;
    }

private:
    template <class T>
    static const T* find_in(const std::vector<T>& xs, std::string_view id) {
        for (const auto& x : xs)
            if (x.id == id) return &x;
        return nullptr;
    }
};

// Precondition: validate_blocks(doc) is empty. Violations are caller bugs.
inline ContractModel build_model(const BlockDocument& doc) {
    if (auto diags = validate_blocks(doc); !diags.empty())
        throw InternalError("build_model: invalid document (" + diags.front().message + ")");

    ContractModel m;
    int index = 0;
    for (const auto& b : doc.blocks) {
        m.block_span[b.id] = b.span;
        m.block_index[b.id] = index++;
    }

    auto day_name = [](const std::string& id) { return "day_" + id; };

    for (const auto& b : doc.blocks) {
        switch (b.kind) {
            case BlockKind::Party: {
                const std::string& r = b.find("role")->ident;
                Role role = r == "Seller" ? Role::Seller
                          : r == "Purchaser" ? Role::Purchaser
                                             : Role::Third;
                m.parties.push_back({b.id, role});
                break;
            }
            case BlockKind::Asset: {
                Asset a;
                a.id = b.id;
                a.type = b.find("type")->ident == "Cash" ? AssetType::Cash : AssetType::Shares;
                if (const AttrValue* v = b.find("amount")) a.amount = v->integer;
                m.assets.push_back(std::move(a));
                break;
            }
            case BlockKind::PropertyFact:
                m.facts.push_back({b.id, b.find("asset")->ident, b.find("owner")->ident});
                break;
            case BlockKind::ContractDates:
                m.dates_block = b.id;
                m.closing_day = b.find("closing")->integer;
                m.horizon = b.find("horizon")->integer;
                break;
            case BlockKind::TransferClaim:
            case BlockKind::PayClaim: {
                ClaimSpec c;
                c.id = b.id;
                c.kind = b.kind == BlockKind::TransferClaim ? ClaimKind::Transfer
                                                            : ClaimKind::Pay;
                c.debtor = b.find("debtor")->ident;
                c.creditor = b.find("creditor")->ident;
                c.subject = b.find("asset")->ident;
                const AttrValue* due = b.find("due");
                if (due->is_int()) c.due_day = due->integer;  // else resolved after dates
                c.day_var = day_name(c.id);
                m.claims.push_back(std::move(c));
                break;
            }
            case BlockKind::WarrantyClaim: {
                ClaimSpec c;
                c.id = b.id;
                c.kind = ClaimKind::Warranty;
                c.debtor = b.find("debtor")->ident;
                c.creditor = b.find("creditor")->ident;
                c.measure_name = b.find("measure")->ident;
                c.threshold = b.find("threshold")->integer;
                c.assert_window = b.find("assert_window")->integer;
                c.limitation = b.find("limitation")->integer;
                c.consequences = b.find("consequences")->as_list();
                c.day_var = day_name(c.id);
                m.claims.push_back(std::move(c));
                break;
            }
            case BlockKind::PerformanceClaim:
            case BlockKind::CompensationClaim: {
                ClaimSpec c;
                c.id = b.id;
                c.kind = b.kind == BlockKind::PerformanceClaim ? ClaimKind::Performance
                                                               : ClaimKind::Compensation;
                c.primary = b.find("primary")->ident;
                c.perform_window = b.find("perform_window")->integer;
                if (c.kind == ClaimKind::Compensation) {
                    c.pay_window = b.find("pay_window")->integer;
                    c.rate = b.find("rate")->integer;
                    c.unit = b.find("unit")->integer;
                    c.minimum = b.find("minimum")->integer;
                }
                c.day_var = day_name(c.id);
                m.claims.push_back(std::move(c));
                break;
            }
            case BlockKind::RestitutionClaim: {
                ClaimSpec c;
                c.id = b.id;
                c.kind = ClaimKind::Restitution;
                c.primary = b.find("primary")->ident;
                c.day_var = day_name(c.id);
                m.claims.push_back(std::move(c));
                break;
            }
        }
    }

    // Second pass: resolve `due: closing` and inherited directions.
    for (auto& c : m.claims) {
        if ((c.kind == ClaimKind::Transfer || c.kind == ClaimKind::Pay) && !c.due_day)
            c.due_day = m.closing_day;
        if (c.kind == ClaimKind::Performance || c.kind == ClaimKind::Compensation) {
            const ClaimSpec* w = m.find_claim(*c.primary);
            c.debtor = w->debtor;
            c.creditor = w->creditor;
        }
        if (c.kind == ClaimKind::Restitution) {
            const ClaimSpec* p = m.find_claim(*c.primary);
            c.debtor = p->creditor;  // what was received flows back
            c.creditor = p->debtor;
        }
    }
    return m;
}

}  // namespace contractcheck
