// Structural review of emitted SMT-LIB scripts, used by the unit tests and
// the acceptance run: balanced parentheses, exactly one :named annotation
// per hard assertion, and no symbol used inside an assertion before a
// declaration introduced it.

#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "contractcheck/logic.hpp"

namespace testsmt {

inline std::vector<std::string> smt_problems(const std::string& script,
                                             const contractcheck::AssertionSet& s) {
    std::vector<std::string> problems;

    std::vector<std::string> tokens;
    int depth = 0;
    for (size_t i = 0; i < script.size();) {
        char c = script[i];
        if (c == ';') {
            while (i < script.size() && script[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            depth += c == '(' ? 1 : -1;
            if (depth < 0) problems.push_back("unbalanced ')'");
            tokens.push_back(std::string(1, c));
            ++i;
        } else {
            size_t b = i;
            while (i < script.size() && !std::isspace(static_cast<unsigned char>(script[i])) &&
                   script[i] != '(' && script[i] != ')' && script[i] != ';')
                ++i;
            tokens.push_back(script.substr(b, i - b));
        }
    }
    if (depth != 0) problems.push_back("unbalanced '('");

    static const std::set<std::string> keywords{
        "set-option", ":produce-unsat-cores", "true",          "false",
        "assert",     "!",                    ":named",        "assert-soft",
        ":id",        "softs",                "check-sat",     "get-model",
        "get-unsat-core", "declare-datatypes", "declare-fun",  "declare-const",
        "Int",        "and",                  "or",            "not",
        "=>",         "=",                    "<=",            "<",
        ">=",         ">",                    "+",             "-",
        "*",          "ite"};
    auto numeric = [](const std::string& t) {
        size_t b = !t.empty() && t[0] == '-' ? 1 : 0;
        if (b == t.size()) return false;
        for (size_t i = b; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };

    std::set<std::string> declared;
    std::map<std::string, int> named_counts;
    auto skip_form = [&tokens](size_t from) {
        int d = 0;
        size_t j = from;
        do {
            if (tokens[j] == "(") ++d;
            if (tokens[j] == ")") --d;
            ++j;
        } while (j < tokens.size() && d > 0);
        return j;
    };

    for (size_t i = 0; i < tokens.size();) {
        if (tokens[i] != "(") {
            problems.push_back("stray token " + tokens[i]);
            ++i;
            continue;
        }
        size_t end = skip_form(i);
        const std::string head = i + 1 < end ? tokens[i + 1] : "";
        if (head == "declare-datatypes" || head == "declare-fun" || head == "declare-const") {
            for (size_t j = i + 2; j < end; ++j)
                if (tokens[j] != "(" && tokens[j] != ")" && !numeric(tokens[j]))
                    declared.insert(tokens[j]);
        } else if (head == "assert" || head == "assert-soft") {
            for (size_t j = i + 2; j < end; ++j) {
                const std::string& t = tokens[j];
                if (t == ":named") {
                    if (j + 1 < end) ++named_counts[tokens[j + 1]], ++j;
                    continue;
                }
                if (t == "(" || t == ")" || keywords.count(t) || numeric(t) || declared.count(t))
                    continue;
                problems.push_back("undeclared symbol " + t);
            }
        }
        i = end;
    }

    for (const auto& a : s.hard) {
        auto it = named_counts.find(a.name);
        if (it == named_counts.end())
            problems.push_back("hard assertion " + a.name + " is never named");
        else if (it->second != 1)
            problems.push_back("hard assertion " + a.name + " named " +
                               std::to_string(it->second) + " times");
    }
    for (const auto& [name, count] : named_counts)
        if (!s.find_hard(name)) problems.push_back("unknown :named annotation " + name);

    return problems;
}

}  // namespace testsmt
