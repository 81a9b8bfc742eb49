#pragma once

#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "c2o/bigint.hpp"
#include "c2o/observer.hpp"

namespace c2o {

// Runtime value. BigInt/BigRational alternatives are used by the divergence
// triage semantics (unbounded ints / exact reals); normal runs use the first
// three. The taint bit marks data derived from a pre-variable default.
struct Value {
    using Struct = std::shared_ptr<std::vector<Value>>;
    std::variant<bool, int64_t, double, BigInt, BigRational, Struct> v;
    bool tainted = false;

    Value() : v(false) {}
    Value(bool b) : v(b) {}
    Value(int64_t i) : v(i) {}
    Value(double d) : v(d) {}
    Value(BigInt b) : v(std::move(b)) {}
    Value(BigRational r) : v(std::move(r)) {}
    Value(Struct s) : v(std::move(s)) {}

    bool as_bool() const { return std::get<bool>(v); }
    int64_t as_int() const { return std::get<int64_t>(v); }
    double as_float() const { return std::get<double>(v); }
    const Struct& as_struct() const { return std::get<Struct>(v); }
};

bool values_equal(const Value& a, const Value& b);

struct StepVerdict {
    std::vector<std::pair<std::string, bool>> assumes;
    std::vector<std::pair<std::string, bool>> proves;
    bool vacuous = false;    // an assume failed at this or an earlier step
    bool taint_leak = false; // a tainted value reached an intrinsic (taint mode)

    bool all_proves_hold() const {
        for (const auto& [_, ok] : proves)
            if (!ok) return false;
        return true;
    }
};

// Finite valuation sequence. params lists dotted leaf paths for file IO;
// steps hold one structured value per program parameter, in parameter order
// (component inputs first, then outputs).
struct TraceData {
    std::vector<std::string> params;
    std::vector<std::vector<Value>> steps;
    size_t size() const { return steps.size(); }
};

class TrapError : public std::runtime_error {
  public:
    enum class Kind { DivisionByZero, ModuloByZero };
    TrapError(Kind k, int step, bool unselected)
        : std::runtime_error(k == Kind::DivisionByZero ? "division by zero" : "modulo by zero"),
          kind_(k), step_(step), unselected_(unselected) {}
    Kind kind() const { return kind_; }
    int step() const { return step_; }
    // True when the trap happened in an eagerly evaluated helper argument whose
    // branch was not selected (the lazy oracle would not have evaluated it).
    bool in_unselected_branch() const { return unselected_; }
    void mark_unselected() { unselected_ = true; }

  private:
    Kind kind_;
    int step_;
    bool unselected_;
};

enum class IntSemantics { Fixed, Unbounded };
enum class RealSemantics { Float, Exact };

struct ExecOptions {
    IntSemantics ints = IntSemantics::Fixed;
    RealSemantics reals = RealSemantics::Float;
    bool taint_defaults = false;
    bool check_assign_before_read = false;
    // When non-empty: one override per pre variable (persistents[1..]),
    // replacing the declared defaults (initial-value opacity testing).
    std::vector<Value> default_overrides;
};

// Default initialization scheme: true for booleans, 0 for
// integers, 0.0 for floats; structs default fieldwise.
Value default_value(const LoweredType& t, const ObserverProgram& p, const ExecOptions& opts);

class Interpreter {
  public:
    explicit Interpreter(const ObserverProgram& p, ExecOptions opts = {});

    void reset();
    StepVerdict step(const std::vector<Value>& param_values);
    std::vector<StepVerdict> run(const TraceData& trace); // reset + all steps

    // Snapshot/restore of the cross-step state (bounded search backtracking).
    struct SavedState {
        std::vector<Value> persist;
        bool any_assume_failed;
        int step_index;
    };
    SavedState save() const { return {persist_, any_assume_failed_, step_index_}; }
    void restore(const SavedState& s) {
        persist_ = s.persist;
        any_assume_failed_ = s.any_assume_failed;
        step_index_ = s.step_index;
    }

    const ObserverProgram& program() const { return prog_; }
    const std::vector<Value>& slots() const { return slots_; }
    const Value& slot(size_t i) const { return slots_[i]; }
    const std::vector<Value>& persistents() const { return persist_; }
    int current_step() const { return step_index_; }

    // Model-mode helper: values of the computed outputs, in declared order.
    std::vector<Value> model_outputs() const;
    // Current value of a parameter or local, by name.
    const Value& value_of(const std::string& name) const;

  private:
    const ObserverProgram& prog_;
    ExecOptions opts_;
    std::vector<Value> slots_;
    std::vector<Value> persist_;
    std::vector<bool> assigned_;
    bool any_assume_failed_ = false;
    int step_index_ = 0;

    Value convert_in(const Value& v, const LoweredType& t) const;
    Value eval(const LExprPtr& e);
    int64_t wrap(int64_t raw, const LoweredType& t) const;
};

// Convenience: run a program over a trace with fresh state.
std::vector<StepVerdict> run_observer(const ObserverProgram& p, const TraceData& trace,
                                      ExecOptions opts = {});

} // namespace c2o
