#include <doctest.h>

#include "c2o/lower.hpp"
#include "c2o/parser.hpp"
#include "c2o/trace_io.hpp"
#include "gen.hpp"

#include <random>

using namespace c2o;

namespace {

ObserverProgram compile(const std::string& src, TypeConfig cfg = {}) {
    return compile_observer(parse_contract(src), cfg);
}

TraceData int_trace(const std::string& name, std::vector<int64_t> values) {
    TraceData t;
    t.params.push_back(name);
    for (int64_t v : values) t.steps.push_back({Value(v)});
    return t;
}

TraceData empty_trace(size_t steps) {
    TraceData t;
    t.steps.assign(steps, {});
    return t;
}

} // namespace

TEST_CASE("counter stream: x = 0 -> pre(x)+1 yields 0,1,2,3 and the guarantee holds") {
    ObserverProgram p = compile(R"(
        component K {
          eq x : int = 0 -> pre(x) + 1;
          guarantee "c" : x >= 0;
        })");
    Interpreter interp(p);
    for (int64_t expect = 0; expect < 4; ++expect) {
        StepVerdict v = interp.step({});
        CHECK(interp.value_of("x").as_int() == expect);
        REQUIRE(v.proves.size() == 1);
        CHECK(v.proves[0].second);
    }
}

TEST_CASE("true -> false proves true at step 0 and false afterwards") {
    ObserverProgram p = compile(R"(
        component A {
          guarantee "init only" : true -> false;
        })");
    auto verdicts = run_observer(p, empty_trace(4));
    REQUIRE(verdicts.size() == 4);
    CHECK(verdicts[0].proves[0].second);
    for (size_t i = 1; i < 4; ++i) CHECK(!verdicts[i].proves[0].second);
}

TEST_CASE("violated assume marks the step and all later steps vacuous") {
    ObserverProgram p = compile(R"(
        component V {
          input Input : int;
          assume "range" : Input < 20;
          guarantee "g" : Input >= 0;
        })");
    auto verdicts = run_observer(p, int_trace("Input", {1, 2, 25, 3}));
    CHECK(!verdicts[0].vacuous);
    CHECK(!verdicts[1].vacuous);
    CHECK(verdicts[2].vacuous);
    CHECK(!verdicts[2].assumes[0].second);
    CHECK(verdicts[3].vacuous); // monotone
    CHECK(verdicts[3].assumes[0].second);
}

TEST_CASE("reset restores the initial state: run, reset, run is identical") {
    ObserverProgram p = compile(R"(
        component R {
          input Input : int;
          eq acc : int = Input -> pre(acc) + Input;
          guarantee "g" : true -> acc >= pre(acc);
        })");
    TraceData tr = int_trace("Input", {3, 1, 4, 1, 5});
    Interpreter interp(p);
    auto v1 = interp.run(tr);
    auto v2 = interp.run(tr); // run() resets
    REQUIRE(v1.size() == v2.size());
    for (size_t i = 0; i < v1.size(); ++i) {
        CHECK(v1[i].proves == v2[i].proves);
        CHECK(v1[i].assumes == v2[i].assumes);
        CHECK(v1[i].vacuous == v2[i].vacuous);
    }
}

TEST_CASE("interleaved interpreter instances do not share state") {
    ObserverProgram p = compile(R"(
        component S {
          eq x : int = 0 -> pre(x) + 1;
          guarantee "g" : x >= 0;
        })");
    Interpreter a(p), b(p);
    a.step({});
    a.step({});
    b.step({});
    CHECK(a.value_of("x").as_int() == 1);
    CHECK(b.value_of("x").as_int() == 0);
    a.step({});
    b.step({});
    CHECK(a.value_of("x").as_int() == 2);
    CHECK(b.value_of("x").as_int() == 1);
}

TEST_CASE("fixed ints wrap two's-complement, exhaustively checked at width 8") {
    TypeConfig cfg;
    cfg.int_width = 8;
    ObserverProgram p = compile(R"(
        component W {
          input a : int;
          input b : int;
          eq sum : int = a + b;
          eq dif : int = a - b;
          eq prd : int = a * b;
          eq quo : int = a div b;
          eq rem : int = a mod b;
          guarantee "g" : sum = sum;
        })",
                                cfg);
    Interpreter interp(p);
    auto wrap8 = [](BigInt v) {
        BigInt m = v.mod_divisor_sign(BigInt(256)); // 0..255
        if (m >= BigInt(128)) m = m - BigInt(256);
        return m;
    };
    for (int a = -128; a <= 127; ++a) {
        for (int b = -128; b <= 127; ++b) {
            if (b == 0) continue;
            interp.reset();
            interp.step({Value(int64_t{a}), Value(int64_t{b})});
            BigInt A(a), B(b);
            CHECK(BigInt(interp.value_of("sum").as_int()) == wrap8(A + B));
            CHECK(BigInt(interp.value_of("dif").as_int()) == wrap8(A - B));
            CHECK(BigInt(interp.value_of("prd").as_int()) == wrap8(A * B));
            CHECK(BigInt(interp.value_of("quo").as_int()) == wrap8(A.div_trunc(B)));
            CHECK(BigInt(interp.value_of("rem").as_int()) == wrap8(A.mod_divisor_sign(B)));
        }
    }
}

TEST_CASE("division by zero traps with the step index") {
    ObserverProgram p = compile(R"(
        component Z {
          input a : int;
          eq q : int = 10 div a;
          guarantee "g" : q = q;
        })");
    Interpreter interp(p);
    interp.step({Value(int64_t{5})});
    try {
        interp.step({Value(int64_t{0})});
        FAIL("expected trap");
    } catch (const TrapError& t) {
        CHECK(t.step() == 1);
        CHECK(!t.in_unselected_branch());
    }
}

TEST_CASE("a trap inside an unselected eager branch is marked as such") {
    ObserverProgram p = compile(R"(
        component E {
          input a : int;
          eq q : int = if a > 0 then 10 div a else 0;
          guarantee "g" : q >= 0;
        })");
    Interpreter interp(p);
    try {
        interp.step({Value(int64_t{0})}); // else selected, but 10 div 0 still evaluated
        FAIL("expected trap");
    } catch (const TrapError& t) {
        CHECK(t.in_unselected_branch());
    }
    ObserverProgram arrow_p = compile(R"(
        component E2 {
          input a : int;
          eq q : int = 1 -> 10 div a;
          guarantee "g" : q >= 0;
        })");
    Interpreter interp2(arrow_p);
    try {
        interp2.step({Value(int64_t{0})}); // step 0 selects the init side
        FAIL("expected trap");
    } catch (const TrapError& t) {
        CHECK(t.in_unselected_branch());
    }
}

TEST_CASE("single-precision lowering computes in float, not double") {
    TypeConfig cfg;
    cfg.float_precision = FloatPrec::Single;
    ObserverProgram p = compile(R"(
        component F {
          input a : real;
          input b : real;
          eq s : real = a + b;
          guarantee "g" : s = s;
        })",
                                cfg);
    Interpreter interp(p);
    interp.step({Value(0.1), Value(0.2)});
    float expected = static_cast<float>(0.1) + static_cast<float>(0.2);
    CHECK(interp.value_of("s").as_float() == static_cast<double>(expected));
}

TEST_CASE("trace CSV round-trips including record fields") {
    ObserverProgram p = compile(R"(
        component T {
          record SyncRec { Active : bool; Level : int; }
          input Sync : SyncRec;
          input r : real;
          output y : int;
          guarantee "g" : true -> y >= 0 or Sync.Active;
        })");
    auto fields = std::make_shared<std::vector<Value>>();
    fields->push_back(Value(true));
    fields->push_back(Value(int64_t{7}));
    TraceData tr;
    tr.params = {"Sync.Active", "Sync.Level", "r", "y"};
    tr.steps.push_back({Value(fields), Value(0.5), Value(int64_t{1})});
    auto fields2 = std::make_shared<std::vector<Value>>();
    fields2->push_back(Value(false));
    fields2->push_back(Value(int64_t{-3}));
    tr.steps.push_back({Value(fields2), Value(-0.25), Value(int64_t{2})});

    std::string csv = write_trace_csv(p, tr);
    CHECK(csv.find("Sync.Active,Sync.Level,r,y") == 0);
    TraceData back = parse_trace_csv(csv, p);
    CHECK(write_trace_csv(p, back) == csv);
    auto verdicts = run_observer(p, back);
    CHECK(verdicts.size() == 2);

    std::string js = write_trace_json(p, tr);
    TraceData back2 = parse_trace_json(js, p);
    CHECK(write_trace_csv(p, back2) == csv);

    // shortest round-trip decimals survive re-parsing exactly
    TraceData exact = parse_trace_csv(csv, p, /*exact=*/true);
    CHECK(std::get<BigRational>(exact.steps[1][1].v) == BigRational::from_decimal_string("-0.25"));
}

TEST_CASE("initial-value opacity: overridden pre defaults never change verdicts") {
    ObserverProgram p = compile(R"(
        component O {
          input Input : int;
          eq x : int = Input -> pre(x) + Input;
          eq flip : bool = true -> not pre(flip);
          guarantee "g1" : true -> x >= pre(x) or Input < 0;
          guarantee "g2" : flip or not flip;
        })");
    TraceData tr = int_trace("Input", {2, 3, 1, 0, 4});
    auto base = run_observer(p, tr);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        ExecOptions opts;
        for (size_t i = 1; i < p.persistents.size(); ++i) {
            if (p.persistents[i].type.kind == LoweredType::Kind::Bool)
                opts.default_overrides.push_back(Value(static_cast<bool>(rng() & 1)));
            else
                opts.default_overrides.push_back(Value(static_cast<int64_t>(rng() % 1000) - 500));
        }
        auto alt = run_observer(p, tr, opts);
        REQUIRE(alt.size() == base.size());
        for (size_t i = 0; i < base.size(); ++i) {
            CHECK(alt[i].proves == base[i].proves);
            CHECK(alt[i].assumes == base[i].assumes);
        }
    }
}

TEST_CASE("guarded-init: tainted defaults never reach an intrinsic") {
    ObserverProgram p = compile(R"(
        component G {
          input Input : int;
          eq x : int = Input -> pre(x) + Input;
          guarantee "g" : true -> (pre(x -> pre x) >= 0 or Input < 10);
        })");
    ExecOptions opts;
    opts.taint_defaults = true;
    auto verdicts = run_observer(p, int_trace("Input", {1, 2, 3, 4, 5, 6}), opts);
    for (const auto& v : verdicts) CHECK(!v.taint_leak);
}

TEST_CASE("assign-before-read holds for every emitted statement") {
    ObserverProgram p = compile(R"(
        component AB {
          input Input : int;
          eq b : int = Input + d;
          eq a : int = b * 2;
          eq d : int = 0 -> pre a;
          guarantee "g" : true -> a >= b or Input < 0;
        })");
    ExecOptions opts;
    opts.check_assign_before_read = true;
    CHECK_NOTHROW((void)run_observer(p, int_trace("Input", {1, 2, 3}), opts));
}

TEST_CASE("guarded-init holds across a generated corpus under taint instrumentation") {
    std::mt19937_64 rng(271828);
    for (int k = 0; k < 300; ++k) {
        ObserverProgram prog = compile_observer(c2o::gen::random_contract(rng), {});
        TraceData trace = c2o::gen::random_trace(rng, prog, 1 + rng() % 8);
        ExecOptions opts;
        opts.taint_defaults = true;
        auto verdicts = run_observer(prog, trace, opts);
        for (const auto& v : verdicts) REQUIRE(!v.taint_leak);
    }
}
