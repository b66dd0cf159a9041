#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "contractcheck/logic.hpp"

using namespace contractcheck;

TEST_CASE("constants evaluate directly") {
    Assignment empty;
    CHECK(evaluate_formula(mk_eq(mk_int(1), mk_int(1)), empty));
    CHECK_FALSE(evaluate_formula(mk_eq(mk_int(1), mk_int(2)), empty));
    CHECK(evaluate_formula(mk_bool(true), empty));
    CHECK_FALSE(evaluate_formula(mk_bool(false), empty));
}

TEST_CASE("uninterpreted functions evaluate by table lookup") {
    Assignment a;
    a.fun[{"owner", "Bakery"}] = "Bank";

    auto owner_is = [](const char* who) {
        return mk_eq(mk_fun("owner", mk_member("Object", "Bakery")),
                     mk_member("Person", who));
    };
    CHECK_FALSE(evaluate_formula(owner_is("Eva"), a));
    CHECK(evaluate_formula(owner_is("Bank"), a));
}

TEST_CASE("a transfer-shaped disjunction holds when the day is -1") {
    // (d = -1) or (d >= 28 and owner(Bakery) = Eva)
    auto f = mk_or({mk_eq(mk_var("d"), mk_int(-1)),
                    mk_and({mk_ge(mk_var("d"), mk_int(28)),
                            mk_eq(mk_fun("owner", mk_member("Object", "Bakery")),
                                  mk_member("Person", "Eva"))})});
    Assignment a;
    a.ints["d"] = -1;
    a.fun[{"owner", "Bakery"}] = "Bank";
    CHECK(evaluate_formula(f, a));

    a.ints["d"] = 30;  // performed but the premise fails
    CHECK_FALSE(evaluate_formula(f, a));

    a.fun[{"owner", "Bakery"}] = "Eva";
    CHECK(evaluate_formula(f, a));
}

TEST_CASE("arithmetic terms") {
    Assignment a;
    a.ints["x"] = 7;
    CHECK(evaluate_term(mk_add(mk_var("x"), mk_int(3)), a) == Value{true, 10, {}});
    CHECK(evaluate_term(mk_sub(mk_int(3), mk_var("x")), a) == Value{true, -4, {}});
    CHECK(evaluate_term(mk_mul(-2, mk_var("x")), a) == Value{true, -14, {}});
    CHECK(evaluate_term(mk_ite(mk_gt(mk_var("x"), mk_int(0)), mk_int(1), mk_int(0)), a) ==
          Value{true, 1, {}});
    CHECK(evaluate_term(mk_ite(mk_lt(mk_var("x"), mk_int(0)), mk_int(1), mk_int(0)), a) ==
          Value{true, 0, {}});
}

TEST_CASE("comparison operators agree with the integers") {
    Assignment a;
    a.ints["x"] = 4;
    CHECK(evaluate_formula(mk_le(mk_var("x"), mk_int(4)), a));
    CHECK_FALSE(evaluate_formula(mk_lt(mk_var("x"), mk_int(4)), a));
    CHECK(evaluate_formula(mk_ge(mk_var("x"), mk_int(4)), a));
    CHECK_FALSE(evaluate_formula(mk_gt(mk_var("x"), mk_int(4)), a));
    CHECK(evaluate_formula(mk_implies(mk_gt(mk_var("x"), mk_int(9)), mk_bool(false)), a));
}

TEST_CASE("missing symbols raise UnboundSymbol") {
    Assignment a;
    CHECK_THROWS_AS(evaluate_formula(mk_eq(mk_var("ghost"), mk_int(0)), a), UnboundSymbol);
    CHECK_THROWS_AS(
        evaluate_formula(mk_eq(mk_fun("owner", mk_member("Object", "Bakery")),
                               mk_member("Person", "Eva")),
                         a),
        UnboundSymbol);
}

TEST_CASE("free variables and functions are collected") {
    auto f = mk_and({mk_eq(mk_var("a"), mk_add(mk_var("b"), mk_int(1))),
                     mk_or({mk_eq(mk_fun("owner", mk_member("Object", "X")),
                                  mk_member("Person", "P")),
                            mk_lt(mk_var("c"), mk_var("a"))})});
    CHECK(free_vars(f) == std::set<std::string>{"a", "b", "c"});
    CHECK(used_functions(f) == std::set<std::string>{"owner"});
}

namespace {

// Random formula machinery for the compositional checks.
struct Rand {
    std::mt19937 rng{20260814};
    long long integer(long long lo, long long hi) {
        return std::uniform_int_distribution<long long>(lo, hi)(rng);
    }
};

TermPtr random_term(Rand& r, int depth) {
    switch (depth <= 0 ? 0 : r.integer(0, 4)) {
        case 0: return r.integer(0, 1) ? mk_int(r.integer(-3, 6))
                                       : mk_var(std::string(1, char('x' + r.integer(0, 2))));
        case 1: return mk_add(random_term(r, depth - 1), random_term(r, depth - 1));
        case 2: return mk_sub(random_term(r, depth - 1), random_term(r, depth - 1));
        case 3: return mk_mul(r.integer(-2, 3), random_term(r, depth - 1));
        default: return mk_int(r.integer(-3, 6));
    }
}

FormulaPtr random_formula(Rand& r, int depth) {
    if (depth <= 0 || r.integer(0, 3) == 0) {
        auto l = random_term(r, 1);
        auto rt = random_term(r, 1);
        switch (r.integer(0, 4)) {
            case 0: return mk_eq(l, rt);
            case 1: return mk_le(l, rt);
            case 2: return mk_lt(l, rt);
            case 3: return mk_ge(l, rt);
            default: return mk_gt(l, rt);
        }
    }
    switch (r.integer(0, 3)) {
        case 0: return mk_and({random_formula(r, depth - 1), random_formula(r, depth - 1)});
        case 1: return mk_or({random_formula(r, depth - 1), random_formula(r, depth - 1)});
        case 2: return mk_not(random_formula(r, depth - 1));
        default:
            return mk_implies(random_formula(r, depth - 1), random_formula(r, depth - 1));
    }
}

}  // namespace

TEST_CASE("evaluation is compositional on random formulas") {
    Rand r;
    for (int round = 0; round < 300; ++round) {
        Assignment a;
        a.ints["x"] = r.integer(-3, 6);
        a.ints["y"] = r.integer(-3, 6);
        a.ints["z"] = r.integer(-3, 6);
        auto f = random_formula(r, 3);
        auto g = random_formula(r, 3);
        bool fv = evaluate_formula(f, a);
        bool gv = evaluate_formula(g, a);
        CHECK(evaluate_formula(mk_and({f, g}), a) == (fv && gv));
        CHECK(evaluate_formula(mk_or({f, g}), a) == (fv || gv));
        CHECK(evaluate_formula(mk_not(f), a) == !fv);
        CHECK(evaluate_formula(mk_implies(f, g), a) == (!fv || gv));
        CHECK(evaluate_formula(mk_eq(mk_ite(f, mk_int(1), mk_int(0)), mk_int(1)), a) == fv);
    }
}

TEST_CASE("assertion set well-formedness check") {
    AssertionSet s;
    s.sorts["Person"] = {"Eva", "Chris"};
    s.sorts["Object"] = {"Bakery"};
    s.functions["owner"] = {"Object", "Person"};
    s.var_domains.emplace_back("d", VarDomain{kIntSort, 0, 10, true, {}});
    s.hard.push_back({"a1", mk_ge(mk_var("d"), mk_int(0)), ""});
    CHECK(check_assertion_set(s).empty());

    SECTION("unbound variable") {
        s.hard.push_back({"a2", mk_eq(mk_var("ghost"), mk_int(0)), ""});
        auto problems = check_assertion_set(s);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0] == "variable ghost of a2 lacks a domain");
    }
    SECTION("duplicate name across hard and soft") {
        s.soft.push_back({"a1", mk_bool(true), ""});
        auto problems = check_assertion_set(s);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0] == "duplicate assertion name a1");
    }
    SECTION("undeclared function") {
        s.hard.push_back({"a3",
                          mk_eq(mk_fun("holder", mk_member("Object", "Bakery")),
                                mk_member("Person", "Eva")),
                          ""});
        auto problems = check_assertion_set(s);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0] == "function holder of a3 is undeclared");
    }
    SECTION("unknown sort") {
        s.var_domains.emplace_back("p", VarDomain{"Ghost", 0, 0, false, {}});
        auto problems = check_assertion_set(s);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0] == "variable p has unknown sort Ghost");
    }
}

TEST_CASE("domain membership accounts for the -1 convention") {
    VarDomain d{kIntSort, 0, 5, true, {}};
    CHECK(d.contains(-1));
    CHECK(d.contains(0));
    CHECK(d.contains(5));
    CHECK_FALSE(d.contains(6));
    CHECK_FALSE(d.contains(-2));

    VarDomain no_minus{kIntSort, 2, 4, false, {}};
    CHECK_FALSE(no_minus.contains(-1));
    CHECK(no_minus.contains(3));
}

TEST_CASE("formulas print compactly") {
    auto f = mk_or({mk_eq(mk_var("d"), mk_int(-1)),
                    mk_and({mk_ge(mk_var("d"), mk_int(28)),
                            mk_eq(mk_fun("owner", mk_member("Object", "Bakery")),
                                  mk_member("Person", "Eva"))})});
    CHECK(format_formula(f) == "(d = -1 or (d >= 28 and owner(Bakery) = Eva))");
    CHECK(format_term(mk_mul(3, mk_sub(mk_var("x"), mk_int(1)))) == "3*(x - 1)");
}
