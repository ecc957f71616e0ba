#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "trs/dispatch.hpp"

using namespace trs;
using test::TermReader;

namespace {

const char* kPlusText =
    "sort Nat = Zero() | S(Nat) | Plus(Nat, Nat);\n"
    "var X : Nat; Y : Nat;\n"
    "eqn Plus(Zero(), X) = X;\n"
    "    Plus(S(X), Y) = S(Plus(X, Y));\n"
    "input Plus(Zero(), Zero());\n";

// tree-side template instantiation, for checking templates against
// apply_substitution
Term instantiate(const RhsTemplate& tmpl, const MatchProgram& program, const Substitution& sigma) {
    std::vector<Term> built;
    auto resolve = [&](const RhsRef& ref) {
        return ref.kind == RhsRef::Kind::Var ? *sigma.find(program.slot_vars[ref.index])
                                             : built[ref.index];
    };
    for (const RhsInstr& instr : tmpl.instructions) {
        std::vector<Term> children;
        for (const RhsRef& ref : instr.children) children.push_back(resolve(ref));
        built.push_back(TermNode::apply(instr.symbol, std::move(children)));
    }
    return resolve(tmpl.root_ref);
}

}  // namespace

TEST_CASE("compile maps each head symbol to its rules in source order") {
    RewriteSystem sys = test::system_of(test::listing1_text());
    DispatchTable table = compile(sys);
    auto count = [&](const char* name) {
        return table.rules_for(sys.signature.symbol_ids.at(name)).size();
    };
    CHECK(count("Merge") == 3);
    CHECK(count("Merge2") == 2);
    CHECK(count("Sort") == 1);
    CHECK(count("Sort2") == 2);
    CHECK(count("Cons") == 0);
    CHECK(count("Nil") == 0);
    CHECK(count("Node") == 0);

    std::size_t total = 0;
    for (const auto& rules : table.by_symbol) {
        total += rules.size();
        for (std::size_t k = 1; k < rules.size(); ++k)
            CHECK(rules[k - 1].rule_index < rules[k].rule_index);
    }
    CHECK(total == sys.rules.size());
}

TEST_CASE("a system with zero equations compiles to an all-empty table") {
    RewriteSystem sys = test::system_of("sort Nat = Zero();\nvar X : Nat;\neqn\ninput Zero();\n");
    DispatchTable table = compile(sys);
    for (const auto& rules : table.by_symbol) CHECK(rules.empty());
}

TEST_CASE("the collapse rule Plus(Zero(), X) = X compiles to check, bind, reuse") {
    RewriteSystem sys = test::system_of(kPlusText);
    DispatchTable table = compile(sys);
    const auto& rules = table.rules_for(sys.signature.symbol_ids.at("Plus"));
    REQUIRE(rules.size() == 2);

    const MatchProgram& program = rules[0].program;
    REQUIRE(program.steps.size() == 2);
    CHECK(program.steps[0].kind == MatchStep::Kind::CheckHead);
    CHECK(program.steps[0].path == std::vector<std::uint8_t>{0});
    CHECK(program.steps[0].symbol == sys.signature.symbol_ids.at("Zero"));
    CHECK(program.steps[1].kind == MatchStep::Kind::BindVar);
    CHECK(program.steps[1].path == std::vector<std::uint8_t>{1});
    CHECK(program.steps[1].var_slot == 0);

    CHECK(rules[0].rhs.collapses());
    CHECK(rules[0].rhs.instructions.empty());
    CHECK(rules[0].rhs.root_ref.index == 0);

    // Plus(S(X), Y) = S(Plus(X, Y)) allocates one fresh slot (Plus), the S
    // root writes in place
    CHECK_FALSE(rules[1].rhs.collapses());
    CHECK(rules[1].rhs.instructions.size() == 2);
    CHECK(rules[1].rhs.new_slots() == 1);
    CHECK(rules[1].rhs.instructions[0].indegree == 1);
}

TEST_CASE("try_rules picks the first matching rule and binds subject references") {
    RewriteSystem sys = test::system_of(test::listing1_text());
    DispatchTable table = compile(sys);
    TermReader t(sys.signature);
    TermAccessor acc;
    SymbolId merge = sys.signature.symbol_ids.at("Merge");

    Term one = t("Merge(Nil(), Cons(Zero(), Nil()))");
    auto m1 = try_rules(table, merge, acc, one.get());
    REQUIRE(m1.has_value());
    CHECK(m1->rule->rule_index == 0);
    REQUIRE(m1->bindings.size() == 1);
    CHECK(m1->bindings[0] == one->children()[1].get());  // M binds by reference

    Term three = t("Merge(Cons(Zero(), Nil()), Cons(S(Zero()), Nil()))");
    auto m3 = try_rules(table, merge, acc, three.get());
    REQUIRE(m3.has_value());
    CHECK(m3->rule->rule_index == 2);
    CHECK(m3->bindings.size() == 4);

    Term ctor = t("Cons(Zero(), Nil())");
    CHECK_FALSE(try_rules(table, sys.signature.symbol_ids.at("Cons"), acc, ctor.get()).has_value());
}

TEST_CASE("a duplicated right-hand-side variable becomes one shared reference") {
    RewriteSystem sys = test::system_of(
        "sort Nat = Zero() | S(Nat) | F(Nat) | G(Nat, Nat);\n"
        "var X : Nat;\n"
        "eqn F(X) = G(X, X);\n"
        "input F(Zero());\n");
    DispatchTable table = compile(sys);
    const auto& rules = table.rules_for(sys.signature.symbol_ids.at("F"));
    REQUIRE(rules.size() == 1);
    const RhsTemplate& tmpl = rules[0].rhs;
    REQUIRE(tmpl.instructions.size() == 1);  // only the root
    REQUIRE(tmpl.instructions[0].children.size() == 2);
    CHECK(tmpl.instructions[0].children[0] == tmpl.instructions[0].children[1]);
    CHECK(tmpl.instructions[0].children[0].kind == RhsRef::Kind::Var);
}

TEST_CASE("identical RHS subterms share one instruction") {
    RewriteSystem sys = test::system_of(
        "sort Nat = Zero() | S(Nat) | F(Nat) | G(Nat, Nat);\n"
        "var X : Nat;\n"
        "eqn F(X) = G(S(X), S(X));\n"
        "input F(Zero());\n");
    const auto& rules = compile(sys).rules_for(sys.signature.symbol_ids.at("F"));
    const RhsTemplate& tmpl = rules[0].rhs;
    REQUIRE(tmpl.instructions.size() == 2);  // one shared S(X) plus the G root
    CHECK(tmpl.instructions[0].indegree == 2);
    CHECK(tmpl.new_slots() == 1);
}

TEST_CASE("template instantiation agrees with apply_substitution") {
    for (const std::string& text : {test::mergesort_text(4), test::transform_text(4)}) {
        RewriteSystem sys = test::system_of(text);
        DispatchTable table = compile(sys);
        test::RandomTerms gen(sys.signature, 99);
        TermAccessor acc;
        int exercised = 0;
        for (int i = 0; i < 4000; ++i) {
            SortId sort = static_cast<SortId>(gen.rng()() % sys.signature.sorts.size());
            Term subject = gen.ground(sort, 2 + gen.rng()() % 4);
            auto m = try_rules(table, subject->symbol(), acc, subject.get());
            if (!m) continue;
            auto sigma = match_pattern(sys.rules[m->rule->rule_index].lhs, subject);
            REQUIRE(sigma.has_value());
            Term by_template = instantiate(m->rule->rhs, m->rule->program, *sigma);
            Term by_subst = apply_substitution(sys.rules[m->rule->rule_index].rhs, *sigma);
            CHECK(term_equal(by_template, by_subst));
            ++exercised;
        }
        CHECK(exercised > 100);
    }
}

TEST_CASE("compiled matcher agrees with match_pattern over random subjects") {
    for (const std::string& text : {test::mergesort_text(4), test::transform_text(4)}) {
        RewriteSystem sys = test::system_of(text);
        DispatchTable table = compile(sys);
        CHECK(test::matcher_differential(sys, table, 10'000, 20260810) == 0);
    }
}

TEST_CASE("random single-pattern programs agree with match_pattern") {
    RewriteSystem sys = test::system_of(test::listing1_text());
    test::RandomTerms gen(sys.signature, 4242);
    TermAccessor acc;
    int matched = 0;
    for (int i = 0; i < 3000; ++i) {
        SortId sort = static_cast<SortId>(gen.rng()() % sys.signature.sorts.size());
        std::vector<bool> used(sys.signature.variables.size(), false);
        Term pattern = gen.pattern(sort, 4, used);
        if (pattern->is_variable()) continue;  // not a legal rule head
        RewriteSystem synthetic;
        synthetic.signature = sys.signature;
        synthetic.rules.push_back({pattern, pattern, 0});
        synthetic.rules_by_head.assign(sys.signature.symbols.size(), {});
        synthetic.rules_by_head[pattern->symbol()].push_back(0);
        synthetic.input_term = TermNode::apply(sys.signature.symbol_ids.at("Zero"), {});
        DispatchTable table = compile(synthetic);

        Term subject = gen.ground(sort, 5);
        auto direct = match_pattern(pattern, subject);
        auto compiled = try_rules(table, subject->symbol(), acc, subject.get());
        REQUIRE(direct.has_value() == compiled.has_value());
        if (direct) ++matched;
    }
    CHECK(matched > 30);
}

TEST_CASE("dump-dispatch prints a stable textual form") {
    RewriteSystem sys = test::system_of(kPlusText);
    std::string dump = dump_dispatch(sys, compile(sys));
    CHECK(dump ==
          "symbol Plus/2: 2 rule(s)\n"
          "  rule #0: Plus(Zero(), X) = X\n"
          "    check [0] = Zero\n"
          "    bind  [1] -> X\n"
          "    root  reuse X\n"
          "  rule #1: Plus(S(X), Y) = S(Plus(X, Y))\n"
          "    check [0] = S\n"
          "    bind  [0.0] -> X\n"
          "    bind  [1] -> Y\n"
          "    new   n0 = Plus(X, Y)\n"
          "    root  n1 = S(n0)\n");
}
