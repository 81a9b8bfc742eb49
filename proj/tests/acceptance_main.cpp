// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and budgets are pinned here, not configurable.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "c2o/emit.hpp"
#include "c2o/harness.hpp"
#include "c2o/normalize.hpp"
#include "c2o/oracle.hpp"
#include "c2o/parser.hpp"
#include "c2o/trace_io.hpp"
#include "c2o/wellformed.hpp"
#include "gen.hpp"

using namespace c2o;

namespace {

struct Gate {
    int failures = 0;

    void run(const std::string& name, double budget_seconds, const std::function<void()>& body) {
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = error.empty() && (budget_seconds <= 0 || secs < budget_seconds);
        if (!ok) ++failures;
        std::ostringstream line;
        line << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << std::fixed;
        line.precision(2);
        line << secs << " s";
        if (budget_seconds > 0) line << " < " << budget_seconds << " s budget";
        line << ")";
        if (!error.empty()) line << "\n       " << error;
        else if (budget_seconds > 0 && secs >= budget_seconds) line << "\n       budget exceeded";
        std::cout << line.str() << std::endl;
    }
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

std::string matlab_of(const std::string& src, TypeConfig cfg = {}) {
    return emit(compile_observer(parse_contract(src), cfg), EmitTarget::MatlabCompatible);
}

void expect_contains(const std::string& haystack, const std::string& needle, const std::string& row) {
    if (haystack.find(needle) == std::string::npos)
        fail("mapping row '" + row + "': emission lacks \"" + needle + "\"\n" + haystack);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open fixture " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------- criteria

void criterion1_mapping_goldens() {
    // Component contract -> observer; inputs and outputs -> observer inputs.
    std::string m = matlab_of(R"(
        component B {
          input Input : int;
          output Output : int;
          assume "B input range" : Input < 20;
          guarantee "B output range" : Output < Input + 15;
        })");
    expect_contains(m, "function B_observer(Input, Output)", "component contract / interface");
    expect_contains(m, "sldv.assume(Input < 20)", "assume statement");
    expect_contains(m, "sldv.prove(Output < (Input + 15))", "guarantee statement");

    // Equation statement: assignment with bus selection inside the function.
    m = matlab_of(R"(
        component S {
          record SyncRec { Active : bool; }
          input Sync : SyncRec;
          eq Active : bool = not Sync.Active;
          guarantee "g" : Active or Sync.Active;
        })");
    expect_contains(m, "Active = ~Sync.Active;", "equation statement");
    expect_contains(m, "Sync.Active", "record types as bus objects");

    // If-then-else expression -> generated local function.
    m = matlab_of(R"(
        component I {
          input Error : bool;
          input Active : bool;
          eq Chosen : bool = if Error then false else Active;
          guarantee "g" : Chosen or true;
        })");
    expect_contains(m, "ifFunction(Error, false, Active)", "if-then-else expression");
    expect_contains(m, "function r = ifFunction(c, a, b)", "generated local function");

    // Basic data types: every width/signedness and float precision spells out.
    for (auto [width, sign, spelling] : {std::tuple<int, bool, const char*>{8, true, "int8("},
                                         {16, true, "int16("},
                                         {32, true, "int32("},
                                         {8, false, "uint8("},
                                         {16, false, "uint16("},
                                         {32, false, "uint32("}}) {
        TypeConfig cfg;
        cfg.int_width = width;
        cfg.int_signed = sign;
        std::string out = matlab_of(R"(
            component T {
              eq k : int = 0 -> pre(k) + 1;
              guarantee "g" : k >= 0;
            })",
                                    cfg);
        expect_contains(out, spelling, "basic data types (int)");
    }
    for (auto [prec, spelling] :
         {std::pair<const char*, const char*>{"single", "single("}, {"double", "double("}}) {
        TypeConfig cfg;
        cfg.float_precision = std::string(prec) == "single" ? FloatPrec::Single : FloatPrec::Double;
        std::string out = matlab_of(R"(
            component T {
              eq r : real = 0.0 -> pre(r) + 0.5;
              guarantee "g" : r >= 0.0;
            })",
                                    cfg);
        expect_contains(out, spelling, "basic data types (real)");
    }

    // Operators row: -, not, <>, and, or and the arithmetic/relational set.
    m = matlab_of(R"(
        component Ops {
          input a : bool;
          input b : bool;
          input x : int;
          input y : int;
          input r : real;
          input s : real;
          eq neg : int = -x;
          eq disj : bool = a or b;
          eq conj : bool = a and not b;
          eq ne : bool = x <> y;
          eq arith : int = x + y - x * y;
          eq fdiv : real = r / s;
          eq rel : bool = x > y or x < y or x >= y or x <= y;
          guarantee "g" : disj or conj or ne or rel or neg = arith or fdiv = fdiv;
        })");
    expect_contains(m, "neg = -x;", "operator -");
    expect_contains(m, "~b", "operator not");
    expect_contains(m, "x ~= y", "operator <>");
    expect_contains(m, "&&", "operator and");
    expect_contains(m, "||", "operator or");
    expect_contains(m, "x + y", "operator +");
    expect_contains(m, "x * y", "operator *");
    expect_contains(m, "r / s", "operator /");
    expect_contains(m, "x > y", "operator >");
    expect_contains(m, "x < y", "operator <");
    expect_contains(m, "x >= y", "operator >=");
    expect_contains(m, "x <= y", "operator <=");

    // mod -> mod function; = -> isequal; div -> / over integer-typed operands.
    m = matlab_of(R"(
        component MD {
          input x : int;
          record Pair { a : int; b : bool; }
          input p : Pair;
          input q : Pair;
          eq m : int = x mod 3;
          eq d : int = x div 2;
          eq req : bool = p = q;
          guarantee "g" : m = m and d = d and req;
        })");
    expect_contains(m, "mod(x, int32(3))", "mod operator");
    expect_contains(m, "isequal(p, q)", "record equality via isequal");
    expect_contains(m, "x / int32(2)", "div with integer-typecast operands");

    // => and -> and pre: generated helpers and persistent variables.
    m = matlab_of(R"(
        component TH {
          input a : bool;
          input x : int;
          guarantee "imp" : a => a;
          guarantee "arrow" : true -> pre(x) = pre(x);
        })");
    expect_contains(m, "impliesFunction(a, a)", "implies operator");
    expect_contains(m, "function r = impliesFunction(a, b)", "implies helper body");
    expect_contains(m, "arrowFunction(first_time, ", "arrow operator");
    expect_contains(m, "function r = arrowFunction(first, a, b)", "arrow helper body");
    expect_contains(m, "persistent pre_x;", "pre operator persistent variable");
    expect_contains(m, "if isempty(first_time)", "isempty-guarded initialization");
    expect_contains(m, "pre_x = x;", "pre variable update");
    expect_contains(m, "first_time = false;", "first_time update");
}

void criterion2_temporal_semantics() {
    // counter 0..N-1 over N = 10 steps, exact equality, interpreter and oracle
    const int kSteps = 10;
    Contract counter = parse_contract(R"(
        component K {
          eq x : int = 0 -> pre(x) + 1;
          guarantee "non-negative" : x >= 0;
        })");
    ObserverProgram prog = compile_observer(counter, {});
    Interpreter interp(prog);
    TraceData empty;
    empty.steps.assign(kSteps, {});
    for (int64_t t = 0; t < kSteps; ++t) {
        StepVerdict v = interp.step({});
        expect(interp.value_of("x").as_int() == t,
               "counter expected " + std::to_string(t) + ", interpreter says " +
                   std::to_string(interp.value_of("x").as_int()));
        expect(v.proves[0].second, "counter guarantee must hold");
    }
    OracleResult oracle = oracle_eval(counter, empty);
    for (int t = 0; t < kSteps; ++t)
        expect(oracle.eq_values[t][0].second.as_int() == BigInt(t), "oracle counter diverges");

    Contract init_only = parse_contract(R"(component A { guarantee "g" : true -> false; })");
    auto verdicts = run_observer(compile_observer(init_only, {}), empty);
    expect(verdicts[0].proves[0].second, "true -> false must hold at step 0");
    for (int t = 1; t < kSteps; ++t)
        expect(!verdicts[t].proves[0].second, "true -> false must fail at steps >= 1");
    OracleResult o2 = oracle_eval(init_only, empty);
    for (int t = 0; t < kSteps; ++t)
        expect(o2.verdicts[t].proves[0].second == (t == 0), "oracle initial-step semantics");

    // the two reference expressions, judged exactly
    Contract bad = parse_contract(
        R"(component W { input x : int; guarantee "g" : (true -> pre(pre(x)) = x); })");
    expect(!check_temporal_wellformedness(bad).empty(), "true -> pre(pre(x)) must be rejected");
    Contract good = parse_contract(
        R"(component W { input x : int; guarantee "g" : (true -> pre(x -> pre(x)) = x); })");
    expect(check_temporal_wellformedness(good).empty(), "true -> pre(x -> pre(x)) must be accepted");
}

void criterion3_pre_deduplication() {
    Contract c = parse_contract(R"(
        component D {
          input x : int;
          eq luck : int = 0 -> pre(x);
          assume "bound" : true -> pre(x) < 100;
          guarantee "g1" : true -> pre(x) = pre(x);
          guarantee "g2" : true -> luck <= pre(x);
        })");
    ObserverProgram prog = compile_observer(c, {});
    expect(prog.persistents.size() == 2,
           "pre(x) in 4 distinct places must yield exactly 2 persistents, got " +
               std::to_string(prog.persistents.size()));
    expect(prog.persistents[0].name == "first_time" && prog.persistents[1].name == "pre_x",
           "persistents must be first_time and pre_x");
}

void criterion4_differential_gate() {
    const uint64_t kContracts = 1250;
    const uint64_t kTrialsEach = 8; // 10,000 (contract, trace) pairs
    const size_t kDepth = 20;
    std::mt19937_64 rng(20160521); // fixed corpus seed
    uint64_t pairs = 0;
    std::map<DivergenceClass, uint64_t> totals;

    // operator coverage tally over the corpus
    std::set<std::string> covered;
    std::function<void(const ExprPtr&)> tally = [&](const ExprPtr& e) {
        if (auto* b = e->as<Binary>()) {
            covered.insert(binop_spelling(b->op));
            tally(b->lhs);
            tally(b->rhs);
        } else if (auto* u = e->as<Unary>()) {
            covered.insert(u->op == UnOp::Not ? "not" : "neg");
            tally(u->operand);
        } else if (auto* i = e->as<Ite>()) {
            covered.insert("ite");
            tally(i->cond);
            tally(i->then_branch);
            tally(i->else_branch);
        } else if (auto* a = e->as<Arrow>()) {
            covered.insert("->");
            tally(a->init);
            tally(a->rest);
        } else if (auto* p = e->as<Pre>()) {
            covered.insert("pre");
            tally(p->operand);
        } else if (auto* f = e->as<FieldSelect>()) {
            covered.insert("select");
            tally(f->base);
        }
    };

    for (uint64_t k = 0; k < kContracts; ++k) {
        Contract c = gen::random_contract(rng);
        expect(check_temporal_wellformedness(c).empty(), "generator must produce well-formed contracts");
        for (const auto& e : c.eqs) tally(e.expr);
        for (const auto& g : c.guarantees) tally(g.expr);
        for (const auto& a : c.assumes) tally(a.expr);
        DiffReport r = diff(c, {}, kTrialsEach, kDepth, /*seed=*/k * 7919 + 13, /*jobs=*/1);
        pairs += r.trials;
        for (const auto& [cls, n] : r.counts) totals[cls] += n;
        if (r.translation_bugs() > 0) {
            std::string detail;
            for (const auto& d : r.divergences)
                if (d.cls == DivergenceClass::TranslationBug)
                    detail = "trial " + std::to_string(d.trial) + " step " + std::to_string(d.step) +
                             " " + d.subject + ": " + d.detail;
            fail("TranslationBug on generated contract " + std::to_string(k) + ": " + detail + "\n" +
                 print_contract(c));
        }
    }
    expect(pairs >= 10000, "must run at least 10,000 (contract, trace) pairs");
    for (const char* op : {"+", "-", "*", "/", "div", "mod", "<", "<=", ">", ">=", "=", "<>", "and",
                           "or", "=>", "not", "neg", "ite", "->", "pre", "select"})
        expect(covered.count(op) == 1, std::string("generator corpus never used operator ") + op);
    expect(totals[DivergenceClass::TranslationBug] == 0, "zero TranslationBug required");
}

void criterion5_bounded_micro_study(const std::string& fixtures) {
    TypeConfig cfg;
    Contract contract = parse_contract(read_file(fixtures + "/bscu_com.agc"));
    Contract good = parse_contract(read_file(fixtures + "/bscu_com_model.agc"));
    Contract defect = parse_contract(read_file(fixtures + "/bscu_com_defect.agc"));

    HarnessBinding ok = bind(compile_observer(contract, cfg), DesignModel::from_contract(good, cfg));
    CheckResult pass = check_bounded(ok, 6, default_domains(ok));
    expect(pass.passed && pass.exhausted, "correct COM fixture must pass all guarantees at depth 6");
    expect(pass.explored == 64, "Boolean input at depth 6 explores 2^6 traces, got " +
                                    std::to_string(pass.explored));

    HarnessBinding bad = bind(compile_observer(contract, cfg), DesignModel::from_contract(defect, cfg));
    CheckResult found = check_bounded(bad, 6, default_domains(bad));
    expect(!found.passed, "seeded defect fixture must fail");
    expect(found.counterexample.has_value(), "a counterexample must be produced");
    expect(found.counterexample->step == 0,
           "the initial-step discrepancy must surface at step 0, got step " +
               std::to_string(found.counterexample->step));

    ReplayResult rr = replay(bad, found.counterexample->inputs);
    expect(rr.first_violation.has_value(), "counterexample must replay to a violation");
    expect(rr.first_violation->second == found.counterexample->step &&
               rr.first_violation->first == found.counterexample->label,
           "replay must reproduce the same label and step");
}

void criterion6_semantic_gap() {
    Contract c = parse_contract(R"(
        component O {
          input X : int;
          guarantee "increment grows" : X + 1 > X;
        })");
    TypeConfig int8_cfg;
    int8_cfg.int_width = 8;
    DiffReport narrow = diff(c, int8_cfg, 500, 8, 2718, 1, /*int_magnitude=*/127);
    expect(narrow.translation_bugs() == 0, "wraparound must never classify as TranslationBug");
    expect(narrow.counts.count(DivergenceClass::OverflowDivergence) &&
               narrow.counts.at(DivergenceClass::OverflowDivergence) > 0,
           "int8 lowering must expose an OverflowDivergence at X = 127");

    TypeConfig int32_cfg;
    DiffReport wide = diff(c, int32_cfg, 500, 8, 2718, 1, /*int_magnitude=*/100);
    expect(wide.counts.empty(), "int32 with |X| <= 100 must show zero divergences");
}

void criterion7_initial_value_opacity() {
    const int kContracts = 1000;
    std::mt19937_64 rng(424242);
    for (int k = 0; k < kContracts; ++k) {
        Contract c = gen::random_contract(rng);
        ObserverProgram prog = compile_observer(c, {});
        TraceData trace = gen::random_trace(rng, prog, 1 + rng() % 8);
        auto base = run_observer(prog, trace);

        ExecOptions opts;
        ExecOptions plain;
        for (size_t i = 1; i < prog.persistents.size(); ++i) {
            const LoweredType& t = prog.persistents[i].type;
            switch (t.kind) {
                case LoweredType::Kind::Bool: opts.default_overrides.push_back(Value((rng() & 1) != 0)); break;
                case LoweredType::Kind::FixedInt:
                    opts.default_overrides.push_back(Value(static_cast<int64_t>(rng() % 2001) - 1000));
                    break;
                case LoweredType::Kind::Float:
                    opts.default_overrides.push_back(
                        Value(static_cast<double>(static_cast<int64_t>(rng() % 4001) - 2000) / 8.0));
                    break;
                case LoweredType::Kind::Struct:
                    opts.default_overrides.push_back(default_value(t, prog, plain));
                    break;
            }
        }
        auto alt = run_observer(prog, trace, opts);
        expect(alt.size() == base.size(), "verdict counts must agree");
        for (size_t t = 0; t < base.size(); ++t) {
            expect(alt[t].assumes == base[t].assumes && alt[t].proves == base[t].proves &&
                       alt[t].vacuous == base[t].vacuous,
                   "randomized pre-variable defaults changed a verdict (contract " +
                       std::to_string(k) + ", step " + std::to_string(t) + ")\n" + print_contract(c));
        }
    }
}

void criterion8_interface_mismatch(const std::string& fixtures) {
    TypeConfig cfg;
    Contract contract = parse_contract(read_file(fixtures + "/record_drift.agc"));
    Contract model = parse_contract(read_file(fixtures + "/record_drift_model.agc"));
    bool rejected = false;
    try {
        bind(compile_observer(contract, cfg), DesignModel::from_contract(model, cfg));
    } catch (const InterfaceMismatch& e) {
        rejected = true;
        bool missing = false, extra = false;
        for (const auto& issue : e.issues()) {
            expect(issue.kind == InterfaceIssue::Kind::FieldMismatch, "issues must be field-level");
            missing |= issue.detail.find("lacks field 'Active'") != std::string::npos;
            extra |= issue.detail.find("extra field") != std::string::npos;
        }
        expect(missing && extra, "diagnostics must name the missing and the extra/renamed fields");
    }
    expect(rejected, "record drift must be rejected");

    // duplicate-port mutation: a same-named input arriving as a fresh signal
    Contract obs_c = parse_contract(read_file(fixtures + "/table1.agc"));
    Contract model_c = parse_contract(read_file(fixtures + "/table1_model.agc"));
    HarnessBinding binding =
        bind(compile_observer(obs_c, cfg), DesignModel::from_contract(model_c, cfg));
    binding.validate();
    binding.observer_sources[0].signal_id = 424242; // duplicate, not replicate
    bool caught = false;
    try {
        binding.validate();
    } catch (const InterfaceMismatch& e) {
        caught = true;
        expect(!e.issues().empty() && e.issues()[0].kind == InterfaceIssue::Kind::DuplicatePort,
               "the duplicated port must be named as such");
    }
    expect(caught, "the duplicated-port binding must be rejected by the invariant checker");
}

} // namespace

int main(int argc, char** argv) {
    std::string fixtures = "tests/fixtures";
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--fixtures") fixtures = argv[i + 1];

    Gate gate;
    gate.run("criterion 1: construct-mapping golden suite", 5.0, criterion1_mapping_goldens);
    gate.run("criterion 2: temporal semantics (counter, init operator, well-formedness)", 0,
             criterion2_temporal_semantics);
    gate.run("criterion 3: pre-expression deduplication", 0, criterion3_pre_deduplication);
    gate.run("criterion 4: differential equivalence gate (10,000 pairs)", 120.0,
             criterion4_differential_gate);
    gate.run("criterion 5: bounded exhaustive micro-study (BSCU COM)", 60.0,
             [&] { criterion5_bounded_micro_study(fixtures); });
    gate.run("criterion 6: fixed-width semantic gap classification", 0, criterion6_semantic_gap);
    gate.run("criterion 7: initial-value opacity (1,000 contracts)", 0,
             criterion7_initial_value_opacity);
    gate.run("criterion 8: interface mismatch and duplicated-port rejection", 0,
             [&] { criterion8_interface_mismatch(fixtures); });

    if (gate.failures) {
        std::cout << gate.failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
}
