// blocks.hpp - the structured block language (.spa files).
//
// A contract is written as a flat sequence of blocks:
//
//   block TransferClaim Transfer
//     debtor: Eva
//     creditor: Chris
//     asset: Bakery
//     due: closing
//   end
//
// Values are identifiers, integers (whole euros / whole days after
// signing), or comma-separated identifier lists. `#` starts a comment,
// blank lines are ignored. Parsing is total: every input yields either
// a BlockDocument or a SyntaxError with a line number.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contractcheck {

// ── source locations ────────────────────────────────────────────────────────

struct SourceSpan {
    int line_start = 1;  // 1-based, inclusive
    int line_end = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

// ── document structure ──────────────────────────────────────────────────────

enum class BlockKind {
    Party,
    Asset,
    PropertyFact,
    ContractDates,
    TransferClaim,
    PayClaim,
    WarrantyClaim,
    PerformanceClaim,
    CompensationClaim,
    RestitutionClaim,
};

inline const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::Party: return "Party";
        case BlockKind::Asset: return "Asset";
        case BlockKind::PropertyFact: return "PropertyFact";
        case BlockKind::ContractDates: return "ContractDates";
        case BlockKind::TransferClaim: return "TransferClaim";
        case BlockKind::PayClaim: return "PayClaim";
        case BlockKind::WarrantyClaim: return "WarrantyClaim";
        case BlockKind::PerformanceClaim: return "PerformanceClaim";
        case BlockKind::CompensationClaim: return "CompensationClaim";
        case BlockKind::RestitutionClaim: return "RestitutionClaim";
    }
    return "?";
}

inline std::optional<BlockKind> kind_from_name(std::string_view s) {
    static const std::pair<std::string_view, BlockKind> table[] = {
        {"Party", BlockKind::Party},
        {"Asset", BlockKind::Asset},
        {"PropertyFact", BlockKind::PropertyFact},
        {"ContractDates", BlockKind::ContractDates},
        {"TransferClaim", BlockKind::TransferClaim},
        {"PayClaim", BlockKind::PayClaim},
        {"WarrantyClaim", BlockKind::WarrantyClaim},
        {"PerformanceClaim", BlockKind::PerformanceClaim},
        {"CompensationClaim", BlockKind::CompensationClaim},
        {"RestitutionClaim", BlockKind::RestitutionClaim},
    };
    for (const auto& [name, kind] : table)
        if (name == s) return kind;
    return std::nullopt;
}

struct AttrValue {
    enum class Kind { Integer, Ident, List };

    Kind kind = Kind::Ident;
    long long integer = 0;
    std::string ident;               // Kind::Ident
    std::vector<std::string> idents; // Kind::List

    static AttrValue make_int(long long v) {
        AttrValue a;
        a.kind = Kind::Integer;
        a.integer = v;
        return a;
    }
    static AttrValue make_ident(std::string v) {
        AttrValue a;
        a.kind = Kind::Ident;
        a.ident = std::move(v);
        return a;
    }
    static AttrValue make_list(std::vector<std::string> v) {
        AttrValue a;
        a.kind = Kind::List;
        a.idents = std::move(v);
        return a;
    }

    bool is_int() const { return kind == Kind::Integer; }
    bool is_ident() const { return kind == Kind::Ident; }

    // Single idents double as one-element lists (e.g. `consequences: Claim1`).
    std::vector<std::string> as_list() const {
        if (kind == Kind::List) return idents;
        if (kind == Kind::Ident) return {ident};
        return {};
    }

    friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

struct Block {
    BlockKind kind = BlockKind::Party;
    std::string id;
    std::vector<std::pair<std::string, AttrValue>> attrs;  // declaration order, keys unique
    SourceSpan span;

    bool has(std::string_view key) const { return find(key) != nullptr; }

    const AttrValue* find(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }

    friend bool operator==(const Block&, const Block&) = default;
};

struct BlockDocument {
    std::vector<Block> blocks;

    const Block* find(std::string_view id) const {
        for (const auto& b : blocks)
            if (b.id == id) return &b;
        return nullptr;
    }

    friend bool operator==(const BlockDocument&, const BlockDocument&) = default;
};

// Structural equality ignoring line numbers.
inline bool equal_modulo_spans(const Block& a, const Block& b) {
    return a.kind == b.kind && a.id == b.id && a.attrs == b.attrs;
}

inline bool equal_modulo_spans(const BlockDocument& a, const BlockDocument& b) {
    if (a.blocks.size() != b.blocks.size()) return false;
    for (size_t i = 0; i < a.blocks.size(); ++i)
        if (!equal_modulo_spans(a.blocks[i], b.blocks[i])) return false;
    return true;
}

// ── errors and diagnostics ──────────────────────────────────────────────────

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(int line, std::string message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line),
          message_(std::move(message)) {}

    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    std::string message_;
};

// Raised when an operation's precondition is violated by the caller.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Diagnostic {
    std::string block_id;  // empty for document-level findings
    SourceSpan span;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// ── lexical helpers ──────────────────────────────────────────────────────────

namespace detail {

inline std::string_view strip_comment(std::string_view line) {
    auto pos = line.find('#');
    return pos == std::string_view::npos ? line : line.substr(0, pos);
}

inline std::string_view rtrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string_view ltrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    return s;
}

inline std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

inline bool is_ident(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

inline bool is_integer(std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline AttrValue parse_value(std::string_view text, int line) {
    auto parts = split(text, ',');
    if (parts.size() == 1) {
        auto tok = trim(parts[0]);
        if (tok.empty()) throw SyntaxError(line, "empty value");
        if (is_integer(tok)) {
            try {
                return AttrValue::make_int(std::stoll(std::string(tok)));
            } catch (const std::out_of_range&) {
                throw SyntaxError(line, "integer out of range '" + std::string(tok) + "'");
            }
        }
        if (is_ident(tok)) return AttrValue::make_ident(std::string(tok));
        throw SyntaxError(line, "malformed value '" + std::string(tok) + "'");
    }
    std::vector<std::string> items;
    for (auto part : parts) {
        auto tok = trim(part);
        if (!is_ident(tok))
            throw SyntaxError(line, "malformed value '" + std::string(tok) +
                                        "' (lists hold identifiers)");
        items.emplace_back(tok);
    }
    return AttrValue::make_list(std::move(items));
}

}  // namespace detail

// ── parse ────────────────────────────────────────────────────────────────────

inline BlockDocument parse_blocks(std::string_view text) {
    using namespace detail;

    BlockDocument doc;
    std::set<std::string, std::less<>> seen_ids;
    std::optional<Block> current;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                             : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (raw.empty() && pos > text.size()) break;  // no trailing line after final newline

        std::string_view content = rtrim(strip_comment(raw));
        if (trim(content).empty()) continue;

        if (!current) {
            if (std::isspace(static_cast<unsigned char>(content.front())))
                throw SyntaxError(line_no, "unexpected indentation outside a block");
            std::istringstream words{std::string(content)};
            std::string head, kind_tok, id_tok, extra;
            words >> head >> kind_tok >> id_tok;
            if (head != "block" || kind_tok.empty() || id_tok.empty() || (words >> extra))
                throw SyntaxError(line_no, "malformed block header (expected 'block <Kind> <Id>')");
            auto kind = kind_from_name(kind_tok);
            if (!kind) throw SyntaxError(line_no, "unknown block kind '" + kind_tok + "'");
            if (!is_ident(id_tok)) throw SyntaxError(line_no, "invalid block id '" + id_tok + "'");
            if (!seen_ids.insert(id_tok).second)
                throw SyntaxError(line_no, "duplicate block id '" + id_tok + "'");
            current = Block{*kind, id_tok, {}, {line_no, line_no}};
            continue;
        }

        if (content == "end") {
            current->span.line_end = line_no;
            doc.blocks.push_back(std::move(*current));
            current.reset();
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(content.front())))
            throw SyntaxError(line_no, "expected indented attribute or 'end'");

        std::string_view attr = trim(content);
        auto colon = attr.find(':');
        if (colon == std::string_view::npos)
            throw SyntaxError(line_no, "malformed attribute (expected 'key: value')");
        std::string key{rtrim(attr.substr(0, colon))};
        if (!is_ident(key)) throw SyntaxError(line_no, "invalid key '" + key + "'");
        if (current->has(key)) throw SyntaxError(line_no, "duplicate key '" + key + "'");
        current->attrs.emplace_back(key, parse_value(ltrim(attr.substr(colon + 1)), line_no));
    }

    if (current)
        throw SyntaxError(current->span.line_start,
                          "unterminated block '" + current->id + "'");
    return doc;
}

// ── serialize ────────────────────────────────────────────────────────────────

// Canonical form: two-space indentation, one blank line between blocks.
// parse_blocks(serialize_blocks(d)) equals d up to spans.
inline std::string serialize_blocks(const BlockDocument& doc) {
    std::string out;
    bool first = true;
    for (const auto& b : doc.blocks) {
        if (!first) out += '\n';
        first = false;
        out += "block ";
        out += kind_name(b.kind);
        out += ' ';
        out += b.id;
        out += '\n';
        for (const auto& [key, value] : b.attrs) {
            out += "  ";
            out += key;
            out += ": ";
            switch (value.kind) {
                case AttrValue::Kind::Integer:
                    out += std::to_string(value.integer);
                    break;
                case AttrValue::Kind::Ident:
                    out += value.ident;
                    break;
                case AttrValue::Kind::List:
                    for (size_t i = 0; i < value.idents.size(); ++i) {
                        if (i) out += ", ";
                        out += value.idents[i];
                    }
                    break;
            }
            out += '\n';
        }
        out += "end\n";
    }
    return out;
}

// ── validate ─────────────────────────────────────────────────────────────────

namespace detail {

struct KeySpec {
    std::string_view key;
    enum class Type { Integer, Ident, IdentList, IntegerOrClosing } type;
};

inline const std::vector<KeySpec>& required_keys(BlockKind kind) {
    using T = KeySpec::Type;
    static const std::map<BlockKind, std::vector<KeySpec>> table = {
        {BlockKind::Party, {{"role", T::Ident}}},
        {BlockKind::Asset, {{"type", T::Ident}}},
        {BlockKind::PropertyFact, {{"asset", T::Ident}, {"owner", T::Ident}}},
        {BlockKind::ContractDates, {{"closing", T::Integer}, {"horizon", T::Integer}}},
        {BlockKind::TransferClaim,
         {{"debtor", T::Ident}, {"creditor", T::Ident}, {"asset", T::Ident},
          {"due", T::IntegerOrClosing}}},
        {BlockKind::PayClaim,
         {{"debtor", T::Ident}, {"creditor", T::Ident}, {"asset", T::Ident},
          {"due", T::IntegerOrClosing}}},
        {BlockKind::WarrantyClaim,
         {{"debtor", T::Ident}, {"creditor", T::Ident}, {"measure", T::Ident},
          {"threshold", T::Integer}, {"assert_window", T::Integer},
          {"limitation", T::Integer}, {"consequences", T::IdentList}}},
        {BlockKind::PerformanceClaim,
         {{"primary", T::Ident}, {"perform_window", T::Integer}}},
        {BlockKind::CompensationClaim,
         {{"primary", T::Ident}, {"perform_window", T::Integer}, {"pay_window", T::Integer},
          {"rate", T::Integer}, {"unit", T::Integer}, {"minimum", T::Integer}}},
        {BlockKind::RestitutionClaim, {{"primary", T::Ident}}},
    };
    return table.at(kind);
}

inline bool value_matches(const AttrValue& v, KeySpec::Type t) {
    switch (t) {
        case KeySpec::Type::Integer: return v.is_int();
        case KeySpec::Type::Ident: return v.is_ident();
        case KeySpec::Type::IdentList: return v.kind != AttrValue::Kind::Integer;
        case KeySpec::Type::IntegerOrClosing:
            return v.is_int() || (v.is_ident() && v.ident == "closing");
    }
    return false;
}

inline const char* type_hint(KeySpec::Type t) {
    switch (t) {
        case KeySpec::Type::Integer: return "an integer";
        case KeySpec::Type::Ident: return "an identifier";
        case KeySpec::Type::IdentList: return "an identifier list";
        case KeySpec::Type::IntegerOrClosing: return "an integer day or closing";
    }
    return "?";
}

}  // namespace detail

// Returns an empty list iff the document is well-formed: required keys with
// matching value kinds, all references resolving to blocks of the expected
// kind, and exactly one ContractDates block. Diagnostics appear in block
// order; document-level findings come last.
inline std::vector<Diagnostic> validate_blocks(const BlockDocument& doc) {
    using namespace detail;

    std::vector<Diagnostic> out;
    std::map<std::string, const Block*, std::less<>> by_id;
    for (const auto& b : doc.blocks) by_id.emplace(b.id, &b);

    auto report = [&out](const Block& b, std::string msg) {
        out.push_back({b.id, b.span, std::move(msg)});
    };
    auto resolve = [&](const Block& b, const std::string& ref,
                       std::initializer_list<BlockKind> kinds) -> const Block* {
        auto it = by_id.find(ref);
        if (it == by_id.end()) {
            report(b, "unresolved reference " + ref);
            return nullptr;
        }
        for (auto k : kinds)
            if (it->second->kind == k) return it->second;
        std::string expected;
        for (auto k : kinds) {
            if (!expected.empty()) expected += " or ";
            expected += kind_name(k);
        }
        report(b, "reference " + ref + ": expected " + expected);
        return nullptr;
    };
    auto non_negative = [&](const Block& b, std::string_view key) {
        const AttrValue* v = b.find(key);
        if (v && v->is_int() && v->integer < 0)
            report(b, std::string(key) + " must be non-negative");
    };

    const Block* dates = nullptr;
    bool has_seller = false, has_purchaser = false;
    std::map<std::string, const Block*> fact_for_asset;

    for (const auto& b : doc.blocks) {
        const auto& specs = required_keys(b.kind);
        for (const auto& spec : specs) {
            const AttrValue* v = b.find(spec.key);
            if (!v) {
                // `amount` is reported against the asset type below.
                report(b, "missing key " + std::string(spec.key));
            } else if (!value_matches(*v, spec.type)) {
                report(b, std::string(spec.key) + " must be " + type_hint(spec.type));
            }
        }
        for (const auto& [key, value] : b.attrs) {
            bool known = std::any_of(specs.begin(), specs.end(),
                                     [&](const KeySpec& s) { return s.key == key; });
            if (!known && !(b.kind == BlockKind::Asset && key == "amount"))
                report(b, "unknown key " + key);
            (void)value;
        }

        switch (b.kind) {
            case BlockKind::Party: {
                const AttrValue* role = b.find("role");
                if (role && role->is_ident()) {
                    if (role->ident == "Seller") has_seller = true;
                    else if (role->ident == "Purchaser") has_purchaser = true;
                    else if (role->ident != "Third")
                        report(b, "invalid role " + role->ident);
                }
                break;
            }
            case BlockKind::Asset: {
                const AttrValue* type = b.find("type");
                const AttrValue* amount = b.find("amount");
                if (type && type->is_ident()) {
                    if (type->ident == "Cash") {
                        if (!amount) report(b, "missing key amount");
                        else if (!amount->is_int()) report(b, "amount must be an integer");
                    } else if (type->ident == "Shares") {
                        if (amount) report(b, "amount requires asset type Cash");
                    } else {
                        report(b, "invalid asset type " + type->ident);
                    }
                }
                non_negative(b, "amount");
                break;
            }
            case BlockKind::PropertyFact: {
                const AttrValue* asset = b.find("asset");
                const AttrValue* owner = b.find("owner");
                const Block* asset_block = nullptr;
                if (asset && asset->is_ident())
                    asset_block = resolve(b, asset->ident, {BlockKind::Asset});
                if (owner && owner->is_ident()) resolve(b, owner->ident, {BlockKind::Party});
                if (asset_block) {
                    auto [it, inserted] = fact_for_asset.emplace(asset_block->id, &b);
                    if (!inserted)
                        report(b, "duplicate PropertyFact for asset " + asset_block->id);
                }
                break;
            }
            case BlockKind::ContractDates: {
                if (dates) {
                    report(b, "multiple ContractDates blocks");
                } else {
                    dates = &b;
                    non_negative(b, "closing");
                    non_negative(b, "horizon");
                    const AttrValue* c = b.find("closing");
                    const AttrValue* h = b.find("horizon");
                    if (c && h && c->is_int() && h->is_int() && c->integer > h->integer)
                        report(b, "closing must not exceed horizon");
                }
                break;
            }
            case BlockKind::TransferClaim:
            case BlockKind::PayClaim: {
                for (auto key : {"debtor", "creditor"}) {
                    const AttrValue* v = b.find(key);
                    if (v && v->is_ident()) resolve(b, v->ident, {BlockKind::Party});
                }
                if (const AttrValue* v = b.find("asset"); v && v->is_ident())
                    resolve(b, v->ident, {BlockKind::Asset});
                if (const AttrValue* due = b.find("due"); due && due->is_int() && due->integer < 0)
                    report(b, "due must be non-negative");
                break;
            }
            case BlockKind::WarrantyClaim: {
                for (auto key : {"debtor", "creditor"}) {
                    const AttrValue* v = b.find(key);
                    if (v && v->is_ident()) resolve(b, v->ident, {BlockKind::Party});
                }
                for (auto key : {"threshold", "assert_window", "limitation"})
                    non_negative(b, key);
                if (const AttrValue* cons = b.find("consequences");
                    cons && cons->kind != AttrValue::Kind::Integer) {
                    for (const auto& ref : cons->as_list()) {
                        const Block* target =
                            resolve(b, ref, {BlockKind::PerformanceClaim,
                                             BlockKind::CompensationClaim});
                        if (target) {
                            const AttrValue* prim = target->find("primary");
                            if (prim && prim->is_ident() && prim->ident != b.id)
                                report(b, "consequence " + ref +
                                              " does not name this warranty as primary");
                        }
                    }
                }
                break;
            }
            case BlockKind::PerformanceClaim:
            case BlockKind::CompensationClaim: {
                const Block* warranty = nullptr;
                if (const AttrValue* prim = b.find("primary"); prim && prim->is_ident())
                    warranty = resolve(b, prim->ident, {BlockKind::WarrantyClaim});
                for (auto key : {"perform_window", "pay_window", "rate", "minimum"})
                    non_negative(b, key);
                if (const AttrValue* unit = b.find("unit");
                    unit && unit->is_int() && unit->integer < 1)
                    report(b, "unit must be positive");
                if (warranty) {
                    const AttrValue* cons = warranty->find("consequences");
                    bool listed = false;
                    if (cons)
                        for (const auto& ref : cons->as_list()) listed |= (ref == b.id);
                    if (!listed)
                        report(b, "claim " + b.id + " is not listed in consequences of " +
                                      warranty->id);
                }
                if (b.kind == BlockKind::CompensationClaim && warranty) {
                    // The make-good window must agree with the sibling claim.
                    const AttrValue* cons = warranty->find("consequences");
                    const AttrValue* own_window = b.find("perform_window");
                    if (cons && own_window && own_window->is_int()) {
                        for (const auto& ref : cons->as_list()) {
                            auto it = by_id.find(ref);
                            if (it == by_id.end() ||
                                it->second->kind != BlockKind::PerformanceClaim)
                                continue;
                            const AttrValue* w = it->second->find("perform_window");
                            if (w && w->is_int() && w->integer != own_window->integer)
                                report(b, "perform_window differs from sibling PerformanceClaim " +
                                              it->second->id);
                        }
                    }
                }
                break;
            }
            case BlockKind::RestitutionClaim: {
                if (const AttrValue* prim = b.find("primary"); prim && prim->is_ident())
                    resolve(b, prim->ident, {BlockKind::TransferClaim, BlockKind::PayClaim});
                break;
            }
        }
    }

    if (!dates) out.push_back({"", {1, 1}, "missing ContractDates"});
    bool any_party = std::any_of(doc.blocks.begin(), doc.blocks.end(), [](const Block& b) {
        return b.kind == BlockKind::Party;
    });
    if (any_party || !doc.blocks.empty()) {
        if (!has_seller) out.push_back({"", {1, 1}, "no Seller party"});
        if (!has_purchaser) out.push_back({"", {1, 1}, "no Purchaser party"});
    }
    return out;
}

}  // namespace contractcheck
