#include <doctest.h>

#include "c2o/parser.hpp"
#include "gen.hpp"

#include <random>

using namespace c2o;

namespace {

Contract parse_ok(const std::string& src) {
    Contract c = parse_contract(src);
    return c;
}

DiagCode first_error(const std::string& src) {
    try {
        parse_contract(src);
    } catch (const CompileError& e) {
        REQUIRE(!e.diagnostics().empty());
        return e.diagnostics().front().code;
    }
    FAIL("expected a diagnostic");
    return DiagCode::InternalError;
}

} // namespace

TEST_CASE("a labeled range assume parses to Lt(Id, IntLit)") {
    Contract c = parse_ok(R"(
        component B {
          input Input : int;
          assume "B input range" : Input < 20;
        })");
    REQUIRE(c.assumes.size() == 1);
    CHECK(c.assumes[0].label == "B input range");
    auto* bin = c.assumes[0].expr->as<Binary>();
    REQUIRE(bin != nullptr);
    CHECK(bin->op == BinOp::Lt);
    auto* id = bin->lhs->as<VarRef>();
    REQUIRE(id != nullptr);
    CHECK(id->name == "Input");
    auto* lit = bin->rhs->as<IntLit>();
    REQUIRE(lit != nullptr);
    CHECK(lit->value == BigInt(20));
    CHECK(c.assumes[0].expr->type == SemType::boolean());
}

TEST_CASE("empty component body") {
    Contract c = parse_ok("component Empty { }");
    CHECK(c.assumes.empty());
    CHECK(c.guarantees.empty());
    CHECK(c.eqs.empty());
}

TEST_CASE("record selection in eq") {
    Contract c = parse_ok(R"(
        component S {
          record SyncRec { Active : bool; }
          input Sync : SyncRec;
          eq Active : bool = not Sync.Active;
        })");
    REQUIRE(c.eqs.size() == 1);
    auto* un = c.eqs[0].expr->as<Unary>();
    REQUIRE(un != nullptr);
    CHECK(un->op == UnOp::Not);
    auto* sel = un->operand->as<FieldSelect>();
    REQUIRE(sel != nullptr);
    CHECK(sel->field == "Active");
    CHECK(un->operand->type == SemType::boolean());
}

TEST_CASE("operator precedence matches the documented table") {
    Contract c = parse_ok(R"(
        component P {
          input a : bool;
          input x : int;
          guarantee "g1" : a -> a => a or a and not x < 1 + 2 * 3;
          guarantee "g2" : true -> false -> a;
          guarantee "g3" : not x = 1;
        })");
    // g1: a -> (a => (a or (a and (not ((x < (1 + (2*3)))))))).
    auto* arrow = c.guarantees[0].expr->as<Arrow>();
    REQUIRE(arrow != nullptr);
    auto* imp = arrow->rest->as<Binary>();
    REQUIRE(imp != nullptr);
    CHECK(imp->op == BinOp::Implies);
    auto* orx = imp->rhs->as<Binary>();
    REQUIRE(orx != nullptr);
    CHECK(orx->op == BinOp::Or);
    auto* andx = orx->rhs->as<Binary>();
    REQUIRE(andx != nullptr);
    CHECK(andx->op == BinOp::And);
    CHECK(andx->rhs->as<Unary>() != nullptr); // not (x < ...)
    // g2 right-assoc: true -> (false -> a).
    auto* a2 = c.guarantees[1].expr->as<Arrow>();
    REQUIRE(a2 != nullptr);
    CHECK(a2->init->as<BoolLit>() != nullptr);
    CHECK(a2->rest->as<Arrow>() != nullptr);
    // g3: not binds weaker than '=': not (x = 1).
    auto* n3 = c.guarantees[2].expr->as<Unary>();
    REQUIRE(n3 != nullptr);
    CHECK(n3->operand->as<Binary>()->op == BinOp::Eq);
}

TEST_CASE("pre binds tighter than unary minus and arithmetic") {
    Contract c = parse_ok(R"(
        component P {
          input x : int;
          guarantee "g" : true -> pre x + 1 > 0;
        })");
    // (pre x) + 1, not pre (x + 1)
    auto* arrow = c.guarantees[0].expr->as<Arrow>();
    auto* cmp = arrow->rest->as<Binary>();
    REQUIRE(cmp != nullptr);
    auto* add = cmp->lhs->as<Binary>();
    REQUIRE(add != nullptr);
    CHECK(add->op == BinOp::Add);
    CHECK(add->lhs->as<Pre>() != nullptr);
}

TEST_CASE("frontend diagnostics carry codes and spans") {
    CHECK(first_error("component X { input a : int") == DiagCode::ParseError);
    CHECK(first_error("component X { input a : int; assume \"r\" : b < 1; }") ==
          DiagCode::UnresolvedIdentifier);
    CHECK(first_error("component X { input a : bool; assume \"r\" : a + 1 = 2; }") ==
          DiagCode::TypeMismatch);
    CHECK(first_error("component X { input a : int; input a : bool; }") == DiagCode::DuplicateName);
    CHECK(first_error("component X { input __t0 : int; }") == DiagCode::ReservedIdentifier);
    CHECK(first_error("component X { input a : int; eq a : int = 1; }") == DiagCode::DuplicateName);
    CHECK(first_error("component X { guarantee \"g\" : 1 ; }") == DiagCode::TypeMismatch);
    CHECK(first_error("component X { input r : Missing; }") == DiagCode::UnresolvedIdentifier);
    CHECK(first_error("component X { eq y : int = 1 div 2.0; }") == DiagCode::TypeMismatch);
    CHECK(first_error("component X { eq y : real = 1 / 2; }") == DiagCode::TypeMismatch);
    try {
        parse_contract("component X {\n  input a : int;\n  assume \"r\" : b < 1;\n}");
        FAIL("expected diagnostic");
    } catch (const CompileError& e) {
        CHECK(e.diagnostics().front().span.line == 3);
        CHECK(e.diagnostics().front().span.col == 16);
    }
}

TEST_CASE("model-style eq may define a declared output, once") {
    Contract c = parse_ok(R"(
        component M {
          input a : int;
          output b : int;
          eq b : int = a + 1;
        })");
    REQUIRE(c.eqs.size() == 1);
    CHECK(c.eqs[0].defines_output);
    CHECK(first_error(R"(
        component M {
          input a : int;
          output b : int;
          eq b : int = a;
          eq b : int = a + 1;
        })") == DiagCode::DuplicateName);
    CHECK(first_error(R"(
        component M {
          output b : int;
          eq b : bool = true;
        })") == DiagCode::TypeMismatch);
}

TEST_CASE("assume reading a current-step output is a lint warning, not an error") {
    Contract c = parse_ok(R"(
        component L {
          input a : int;
          output b : int;
          assume "reads output" : b > 0;
          assume "pre output ok" : true -> pre b > 0;
        })");
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].code == DiagCode::AssumeReadsOutput);
    CHECK(c.warnings[0].message.find("reads output") != std::string::npos);
}

TEST_CASE("node declarations type-check against their scope") {
    Contract c = parse_ok(R"(
        component N {
          input x : int;
          node double(a : int) : int = a + a;
          eq y : int = double(x);
        })");
    CHECK(c.nodes.size() == 1);
    CHECK(first_error(R"(
        component N {
          input x : int;
          node bad(a : int) : int = a + x;
          eq y : int = bad(x);
        })") == DiagCode::UnresolvedIdentifier);
    CHECK(first_error(R"(
        component N {
          node f(a : int) : bool = a;
        })") == DiagCode::TypeMismatch);
    CHECK(first_error(R"(
        component N {
          input x : int;
          node f(a : int) : int = a;
          eq y : int = f(x, x);
        })") == DiagCode::TypeMismatch);
}

TEST_CASE("parse-print-parse reaches a fixpoint") {
    const char* src = R"(
        component RoundTrip {
          record Pair { a : int; b : bool; }
          input p : Pair;
          input x : int;
          input r : real;
          output y : int;
          node inc(v : int) : int = v + 1;
          eq z : int = if p.b then inc(x) else -x;
          eq w : real = r / 2.0 * (0.5 -> pre r);
          assume "range" : x < 20 and x >= -5;
          guarantee "main" : true -> (pre z -> z) = z or p.a <> x mod 3;
        })";
    Contract c1 = parse_contract(src);
    std::string printed1 = print_contract(c1);
    Contract c2 = parse_contract(printed1);
    std::string printed2 = print_contract(c2);
    CHECK(printed1 == printed2);
    REQUIRE(c1.eqs.size() == c2.eqs.size());
    for (size_t i = 0; i < c1.eqs.size(); ++i)
        CHECK(canonical_expr(c1.eqs[i].expr) == canonical_expr(c2.eqs[i].expr));
    for (size_t i = 0; i < c1.guarantees.size(); ++i)
        CHECK(canonical_expr(c1.guarantees[i].expr) == canonical_expr(c2.guarantees[i].expr));
}

TEST_CASE("mutated sources are rejected with diagnostics, never crashes") {
    const std::string seed_src = R"(
        component Fuzz {
          record Pair { a : int; b : bool; }
          input p : Pair;
          input x : int;
          input r : real;
          output y : int;
          node inc(v : int) : int = v + 1;
          eq z : int = if p.b then inc(x) else -x;
          assume "range" : x < 20;
          guarantee "main" : true -> (pre z -> z) = z or p.a <> x mod 3;
        })";
    std::mt19937_64 rng(99);
    const std::string garbage = "=<>()+-*/;:{}.\"pre->";
    int accepted = 0, rejected = 0;
    for (int i = 0; i < 500; ++i) {
        std::string s = seed_src;
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            size_t pos = rng() % s.size();
            switch (rng() % 3) {
                case 0: s[pos] = garbage[rng() % garbage.size()]; break;
                case 1: s.erase(pos, 1 + rng() % 5); break;
                default: s.insert(pos, 1, garbage[rng() % garbage.size()]); break;
            }
        }
        try {
            (void)parse_contract(s);
            ++accepted; // some mutations stay valid (comments, labels)
        } catch (const CompileError&) {
            ++rejected;
        }
    }
    CHECK(rejected > 0);
    CHECK(accepted + rejected == 500);
}

TEST_CASE("generated contracts print to re-parseable, stable source") {
    std::mt19937_64 rng(161803);
    for (int k = 0; k < 150; ++k) {
        Contract c = c2o::gen::random_contract(rng);
        std::string printed = print_contract(c);
        Contract back = parse_contract(printed);
        CHECK(print_contract(back) == printed);
        REQUIRE(back.guarantees.size() == c.guarantees.size());
        for (size_t i = 0; i < c.guarantees.size(); ++i)
            CHECK(canonical_expr(back.guarantees[i].expr) == canonical_expr(c.guarantees[i].expr));
    }
}
