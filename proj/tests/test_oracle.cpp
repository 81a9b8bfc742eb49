#include <doctest.h>

#include "c2o/lower.hpp"
#include "c2o/normalize.hpp"
#include "c2o/oracle.hpp"
#include "c2o/parser.hpp"

#include <functional>
#include <random>

using namespace c2o;

namespace {

TraceData int_trace(std::vector<std::string> names, std::vector<std::vector<int64_t>> rows) {
    TraceData t;
    t.params = std::move(names);
    for (const auto& row : rows) {
        std::vector<Value> step;
        for (int64_t v : row) step.push_back(Value(v));
        t.steps.push_back(std::move(step));
    }
    return t;
}

TraceData empty_trace(size_t steps) {
    TraceData t;
    t.steps.assign(steps, {});
    return t;
}

} // namespace

TEST_CASE("counter stream evaluates to 0,1,2,... under exact semantics") {
    Contract c = parse_contract(R"(
        component K {
          eq x : int = 0 -> pre(x) + 1;
          guarantee "c" : x >= 0;
        })");
    OracleResult r = oracle_eval(c, empty_trace(6));
    for (int t = 0; t < 6; ++t) {
        CHECK(r.verdicts[t].proves[0].second);
        REQUIRE(r.eq_values[t].size() == 1);
        CHECK(r.eq_values[t][0].second.as_int() == BigInt(t));
    }
}

TEST_CASE("true -> false is true at step 0 and false at every later step") {
    Contract c = parse_contract(R"(component A { guarantee "g" : true -> false; })");
    OracleResult r = oracle_eval(c, empty_trace(5));
    CHECK(r.verdicts[0].proves[0].second);
    for (int t = 1; t < 5; ++t) CHECK(!r.verdicts[t].proves[0].second);
}

TEST_CASE("x = x holds on any trace") {
    Contract c = parse_contract(R"(
        component E {
          input x : int;
          guarantee "refl" : x = x;
        })");
    std::mt19937_64 rng(3);
    std::vector<std::vector<int64_t>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({static_cast<int64_t>(rng() % 2001) - 1000});
    OracleResult r = oracle_eval(c, int_trace({"x"}, rows));
    for (const auto& v : r.verdicts) CHECK(v.proves[0].second);
}

TEST_CASE("the untaken if branch is never evaluated") {
    Contract c = parse_contract(R"(
        component L {
          input x : real;
          guarantee "safe" : (if x > 0.0 then 1.0 / x else 0.0) >= 0.0;
        })");
    TraceData tr;
    tr.params = {"x"};
    tr.steps.push_back({Value(0.0)}); // would trap if the then-branch were evaluated
    EvalStats stats;
    OracleResult r = oracle_eval(c, tr, &stats);
    CHECK(r.verdicts[0].proves[0].second);
    // find the division node and confirm it was not visited
    const Ite* ite = nullptr;
    std::function<void(const ExprPtr&)> find = [&](const ExprPtr& e) {
        if (auto* i = e->as<Ite>()) ite = i;
        if (auto* b = e->as<Binary>()) { find(b->lhs); find(b->rhs); }
    };
    find(c.guarantees[0].expr);
    REQUIRE(ite != nullptr);
    CHECK(stats.count(ite->then_branch) == 0);
    CHECK(stats.count(ite->else_branch) == 1);
}

TEST_CASE("an unguarded pre evaluates to bottom and is reported at the verdict") {
    // parse_contract does not run the temporal checker; this exercises the
    // oracle's defense for exactly the ill-formed case the checker rejects.
    Contract c = parse_contract(R"(
        component B {
          input x : int;
          guarantee "g" : pre(x) > 0;
        })");
    CHECK_THROWS_AS((void)oracle_eval(c, int_trace({"x"}, {{1}, {2}})), BottomObserved);
}

TEST_CASE("oracle div/mod conventions match the lowered semantics") {
    Contract c = parse_contract(R"(
        component M {
          input a : int;
          input b : int;
          eq q : int = a div b;
          eq m : int = a mod b;
          guarantee "g" : q = q and m = m;
        })");
    ObserverProgram p = compile_observer(c, {});
    for (int64_t a : {-7, -3, 0, 3, 7, 100, -100}) {
        for (int64_t b : {-3, -2, 2, 3, 7}) {
            TraceData tr = int_trace({"a", "b"}, {{a, b}});
            OracleResult oracle = oracle_eval(c, tr);
            Interpreter interp(p);
            interp.step(tr.steps[0]);
            CHECK(oracle.eq_values[0][0].second.as_int() == BigInt(interp.value_of("q").as_int()));
            CHECK(oracle.eq_values[0][1].second.as_int() == BigInt(interp.value_of("m").as_int()));
        }
    }
}

TEST_CASE("oracle and observer traps coincide on plain division by zero") {
    Contract c = parse_contract(R"(
        component T {
          input a : int;
          eq q : int = 10 div a;
          guarantee "g" : q = q;
        })");
    ObserverProgram p = compile_observer(c, {});
    TraceData tr = int_trace({"a"}, {{2}, {0}});
    int oracle_step = -1, interp_step = -1;
    try {
        (void)oracle_eval(c, tr);
    } catch (const OracleTrap& t) {
        oracle_step = t.step();
    }
    try {
        Interpreter interp(p);
        interp.run(tr);
    } catch (const TrapError& t) {
        interp_step = t.step();
    }
    CHECK(oracle_step == 1);
    CHECK(interp_step == 1);
}

TEST_CASE("semantic preservation: the normalized IR evaluates like the source contract") {
    const char* src = R"(
        component N {
          input x : int;
          input b : bool;
          node latch(v : int, d : int) : int = d -> pre v;
          eq held : int = latch(x, 0);
          eq toggled : bool = b -> (not pre toggled);
          eq mixed : int = (0 -> pre(x -> pre x)) + held;
          assume "bound" : x < 50;
          guarantee "g1" : true -> (mixed >= held) or b;
          guarantee "g2" : toggled or not toggled;
        })";
    Contract c = parse_contract(src);
    Contract rendered = ir_to_contract(normalize(c));
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        size_t len = 1 + rng() % 10;
        TraceData tr;
        tr.params = {"x", "b"};
        for (size_t s = 0; s < len; ++s)
            tr.steps.push_back({Value(static_cast<int64_t>(rng() % 21) - 10),
                                Value(static_cast<bool>(rng() & 1))});
        OracleResult a = oracle_eval(c, tr);
        OracleResult b2 = oracle_eval(rendered, tr);
        REQUIRE(a.verdicts.size() == b2.verdicts.size());
        for (size_t t = 0; t < a.verdicts.size(); ++t) {
            CHECK(a.verdicts[t].assumes == b2.verdicts[t].assumes);
            CHECK(a.verdicts[t].proves == b2.verdicts[t].proves);
        }
    }
}

TEST_CASE("inlining a stateful node twice keeps the call sites independent") {
    const char* src = R"(
        component D {
          input p : int;
          input q : int;
          node run(a : int) : int = 0 -> pre(run2(a)) + 1;
          node run2(a : int) : int = a;
          eq u : int = run(p);
          eq v : int = run(q);
          guarantee "g" : true -> u = v;
        })";
    Contract c = parse_contract(src);
    // distinct arguments must yield distinct pre chains: compare against oracle
    Contract rendered = ir_to_contract(normalize(c));
    DataflowIR ir = normalize(c);
    CHECK(ir.pre_table.size() == 2);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        size_t len = 1 + rng() % 6;
        TraceData tr;
        tr.params = {"p", "q"};
        for (size_t s = 0; s < len; ++s)
            tr.steps.push_back({Value(static_cast<int64_t>(rng() % 9) - 4),
                                Value(static_cast<int64_t>(rng() % 9) - 4)});
        OracleResult a = oracle_eval(c, tr);
        OracleResult b = oracle_eval(rendered, tr);
        for (size_t t = 0; t < a.verdicts.size(); ++t) CHECK(a.verdicts[t].proves == b.verdicts[t].proves);
    }
}
