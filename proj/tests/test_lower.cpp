#include <doctest.h>

#include <functional>

#include "c2o/interp.hpp"
#include "c2o/lower.hpp"
#include "c2o/parser.hpp"

using namespace c2o;

namespace {

ObserverProgram compile(const std::string& src, TypeConfig cfg = {}) {
    return compile_observer(parse_contract(src), cfg);
}

} // namespace

TEST_CASE("a range guarantee lowers to a prove intrinsic over a hoisted local") {
    ObserverProgram p = compile(R"(
        component B {
          input Input : int;
          output Output : int;
          assume "B input range" : Input < 20;
          guarantee "B output range" : Output < Input + 15;
        })");
    REQUIRE(p.params.size() == 2);
    CHECK(p.params[0].name == "Input");
    CHECK(p.params[1].name == "Output");
    CHECK(p.params[1].is_output);
    int assumes = 0, proves = 0;
    for (const auto& st : p.body) {
        if (auto* a = std::get_if<SAssume>(&st)) {
            ++assumes;
            CHECK(a->label == "B input range");
        }
        if (auto* pr = std::get_if<SProve>(&st)) {
            ++proves;
            CHECK(pr->label == "B output range");
        }
    }
    CHECK(assumes == 1);
    CHECK(proves == 1);
    // the 15 carries an int32 cast in the lowered tree
    bool found_cast15 = false;
    for (const auto& st : p.body)
        if (auto* a = std::get_if<SAssign>(&st)) {
            std::function<void(const LExprPtr&)> scan = [&](const LExprPtr& e) {
                if (auto* i = e->as<LInt>()) {
                    if (i->value == 15) {
                        found_cast15 = true;
                        CHECK(e->type == LoweredType::fixed_int(32, true));
                    }
                }
                if (auto* b = e->as<LBinary>()) { scan(b->a); scan(b->b); }
                if (auto* q = e->as<LIsEqual>()) { scan(q->a); scan(q->b); }
            };
            scan(a->expr);
        }
    CHECK(found_cast15);
}

TEST_CASE("if-then-else lowers to the eager ifFunction call") {
    ObserverProgram p = compile(R"(
        component C {
          input Error : bool;
          input Active : bool;
          eq r : bool = if Error then false else Active;
          guarantee "g" : r or not r;
        })");
    bool found = false;
    for (const auto& st : p.body)
        if (auto* a = std::get_if<SAssign>(&st))
            if (a->name == "r") {
                found = true;
                CHECK(a->expr->as<LIf>() != nullptr);
            }
    CHECK(found);
}

TEST_CASE("pre(x) used in several places yields exactly first_time plus one persistent") {
    ObserverProgram p = compile(R"(
        component D {
          input x : int;
          guarantee "g1" : true -> pre(x) < x + 1;
          guarantee "g2" : true -> pre(x) > x - 10;
          guarantee "g3" : true -> pre(x) = pre(x);
        })");
    REQUIRE(p.persistents.size() == 2);
    CHECK(p.persistents[0].name == "first_time");
    CHECK(p.persistents[1].name == "pre_x");
}

TEST_CASE("counter lowers to arrowFunction over the persistent and updates it") {
    ObserverProgram p = compile(R"(
        component K {
          eq x : int = 0 -> pre(x) + 1;
          guarantee "c" : x >= 0;
        })");
    REQUIRE(p.persistents.size() == 2);
    CHECK(p.persistents[1].name == "pre_x");
    bool assign_found = false, update_found = false;
    for (const auto& st : p.body) {
        if (auto* a = std::get_if<SAssign>(&st)) {
            if (a->name != "x") continue;
            assign_found = true;
            auto* arrow = a->expr->as<LArrow>();
            REQUIRE(arrow != nullptr);
            CHECK(arrow->a->as<LInt>() != nullptr);
        }
        if (auto* u = std::get_if<SUpdate>(&st)) {
            update_found = true;
            CHECK(u->name == "pre_x");
            auto* v = u->expr->as<LVar>();
            REQUIRE(v != nullptr);
            CHECK(v->name == "x");
        }
    }
    CHECK(assign_found);
    CHECK(update_found);
    // statement order: assigns/intrinsics, then updates, then first_time flip
    bool seen_update = false, seen_flip = false;
    for (const auto& st : p.body) {
        if (std::holds_alternative<SUpdate>(st)) {
            CHECK(!seen_flip);
            seen_update = true;
        } else if (std::holds_alternative<SFirstTimeFalse>(st)) {
            seen_flip = true;
        } else {
            CHECK(!seen_update); // no assigns or intrinsics after updates start
            CHECK(!seen_flip);
        }
    }
    CHECK(seen_flip);
}

TEST_CASE("constants out of range are compile-time errors") {
    TypeConfig int8_cfg;
    int8_cfg.int_width = 8;
    try {
        compile(R"(
            component O {
              input x : int;
              guarantee "g" : x < 300;
            })",
                int8_cfg);
        FAIL("expected ConstantOverflow");
    } catch (const CompileError& e) {
        CHECK(e.diagnostics().front().code == DiagCode::ConstantOverflow);
    }
    // -128 fits int8; 128 does not
    CHECK_NOTHROW((void)compile("component O { input x : int; guarantee \"g\" : x > -128; }", int8_cfg));
    TypeConfig u16;
    u16.int_width = 16;
    u16.int_signed = false;
    try {
        compile("component O { input x : int; guarantee \"g\" : x > -1; }", u16);
        FAIL("expected ConstantOverflow for negative constant under unsigned lowering");
    } catch (const CompileError& e) {
        CHECK(e.diagnostics().front().code == DiagCode::ConstantOverflow);
    }
}

TEST_CASE("interface_of keeps record parameters structured, inputs before outputs") {
    Contract c = parse_contract(R"(
        component I {
          record SyncRec { Active : bool; Level : int; }
          input A : int;
          input Sync : SyncRec;
          output B : int;
          guarantee "g" : B = A;
        })");
    ObserverInterface iface = interface_of(c);
    REQUIRE(iface.entries.size() == 3);
    CHECK(iface.entries[0].name == "A");
    CHECK(!iface.entries[0].is_output);
    CHECK(iface.entries[1].name == "Sync");
    CHECK(iface.entries[1].type.kind == SemType::Kind::Record);
    CHECK(iface.entries[2].name == "B");
    CHECK(iface.entries[2].is_output);

    Contract no_out = parse_contract("component I { input A : int; assume \"a\" : A < 1; }");
    CHECK(interface_of(no_out).entries.size() == 1);

    ObserverProgram p = compile_observer(c, {});
    REQUIRE(p.params.size() == 3);
    CHECK(p.params[1].type.kind == LoweredType::Kind::Struct);
    CHECK(p.params[1].type.struct_name == "SyncRec");
}

TEST_CASE("record equality lowers to deep isequal") {
    ObserverProgram p = compile(R"(
        component R {
          record Pair { a : int; b : bool; }
          input x : Pair;
          input y : Pair;
          guarantee "eq" : x = y;
          guarantee "ne" : x <> y or x = y;
        })");
    int isequal_nodes = 0;
    std::function<void(const LExprPtr&)> scan = [&](const LExprPtr& e) {
        if (e->as<LIsEqual>()) ++isequal_nodes;
        if (auto* b = e->as<LBinary>()) { scan(b->a); scan(b->b); }
        if (auto* q = e->as<LIsEqual>()) { scan(q->a); scan(q->b); }
    };
    for (const auto& st : p.body)
        if (auto* a = std::get_if<SAssign>(&st)) scan(a->expr);
    CHECK(isequal_nodes == 3);
}

TEST_CASE("persistent count is 1 + |pre table| and defaults follow the scheme") {
    Contract c = parse_contract(R"(
        component P {
          input x : int;
          input b : bool;
          input r : real;
          guarantee "g1" : true -> pre(x) = pre(x);
          guarantee "g2" : true -> pre(b) = b;
          guarantee "g3" : true -> pre(r) < r + 1.0;
          guarantee "g4" : true -> pre(x + 1) > 0;
        })");
    DataflowIR ir = normalize(c);
    ObserverProgram p = lower(ir, {});
    CHECK(p.persistents.size() == 1 + ir.pre_table.size());
    CHECK(p.persistents.size() == 5);
    ExecOptions opts;
    for (size_t i = 1; i < p.persistents.size(); ++i) {
        Value d = default_value(p.persistents[i].type, p, opts);
        switch (p.persistents[i].type.kind) {
            case LoweredType::Kind::Bool: CHECK(d.as_bool() == true); break;
            case LoweredType::Kind::FixedInt: CHECK(d.as_int() == 0); break;
            case LoweredType::Kind::Float: CHECK(d.as_float() == 0.0); break;
            default: FAIL("unexpected persistent kind");
        }
    }
}

TEST_CASE("observer mode rejects output-defining contracts; model mode requires them") {
    Contract model = parse_contract(R"(
        component M {
          input a : int;
          output b : int;
          eq b : int = a + 1;
        })");
    CHECK_THROWS_AS((void)compile_observer(model, {}), CompileError);
    ObserverProgram mp = compile_model(model, {});
    CHECK(mp.model_mode);
    REQUIRE(mp.params.size() == 1); // inputs only
    CHECK(mp.params[0].name == "a");
    bool has_output_local = false;
    for (const auto& l : mp.locals) has_output_local |= l.is_model_output && l.name == "b";
    CHECK(has_output_local);

    Contract incomplete = parse_contract(R"(
        component M {
          input a : int;
          output b : int;
        })");
    CHECK_THROWS_AS((void)compile_model(incomplete, {}), CompileError);
    Contract with_guar = parse_contract(R"(
        component M {
          input a : int;
          output b : int;
          eq b : int = a;
          guarantee "g" : b = a;
        })");
    CHECK_THROWS_AS((void)compile_model(with_guar, {}), CompileError);
}

TEST_CASE("user names colliding with persistent machinery are uniquified") {
    ObserverProgram p = compile(R"(
        component U {
          input first_time : bool;
          input pre_x : int;
          input x : int;
          guarantee "g" : true -> pre(x) < pre_x;
        })");
    CHECK(p.params[0].name == "first_time");
    CHECK(p.persistents[0].name == "first_time_1");
    CHECK(p.persistents[1].name == "pre_x_1");
}
