#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "c2o/interp.hpp"
#include "c2o/lower.hpp"
#include "c2o/oracle.hpp"
#include "c2o/trace_io.hpp"

namespace c2o {

// A deterministic executable step function with the observed component's
// input/output interface: either a contract compiled in model mode or a
// registered builtin.
class ModelInstance {
  public:
    virtual ~ModelInstance() = default;
    virtual void reset() = 0;
    // inputs in interface order; returns outputs in interface order
    virtual std::vector<Value> step(const std::vector<Value>& inputs) = 0;
    virtual std::vector<std::pair<std::string, Value>> debug_signals() const { return {}; }
    // cross-step state snapshot for backtracking search (nullptr = stateless)
    virtual std::shared_ptr<void> save_state() const { return nullptr; }
    virtual void restore_state(const std::shared_ptr<void>&) {}
};

struct ModelInterface {
    std::vector<ObserverProgram::Param> inputs;
    std::vector<ObserverProgram::Param> outputs;
    std::vector<StructLayout> structs;
};

struct DesignModel {
    std::string origin; // "contract:<name>" or "builtin:<name>"
    ModelInterface iface;
    std::function<std::unique_ptr<ModelInstance>()> instantiate;

    static DesignModel from_contract(const Contract& c, const TypeConfig& cfg);
    static DesignModel builtin(const std::string& name, const Contract& interface_contract,
                               const TypeConfig& cfg);
    static std::vector<std::string> builtin_names();
};

struct InterfaceIssue {
    enum class Kind { MissingInput, MissingOutput, ExtraInput, ExtraOutput, TypeMismatch, FieldMismatch, DuplicatePort };
    Kind kind;
    std::string name;
    std::string detail;
    bool warning; // extra model outputs are tolerated
    std::string render() const;
};

class InterfaceMismatch : public std::runtime_error {
  public:
    explicit InterfaceMismatch(std::vector<InterfaceIssue> issues);
    const std::vector<InterfaceIssue>& issues() const { return issues_; }

  private:
    std::vector<InterfaceIssue> issues_;
};

// Wires observer parameters to signal sources. Each component signal is one
// instance: the same signal id feeds both the model and the observer; a
// duplicated port (same name, distinct ids) is the defect validate() rejects.
struct HarnessBinding {
    ObserverProgram observer;
    DesignModel model;
    struct Source {
        bool from_model_output;
        size_t index;      // into model inputs or model outputs
        uint64_t signal_id;
    };
    std::vector<Source> observer_sources;  // aligned with observer params
    std::vector<uint64_t> model_input_ids; // aligned with model interface inputs
    std::vector<InterfaceIssue> warnings;

    void validate() const; // throws InterfaceMismatch on binding corruption
};

HarnessBinding bind(ObserverProgram observer, DesignModel model);

// Finite per-signal value sets, one per input leaf column, values in given
// order (enumeration order: inputs in declaration order, values in given
// order, depth-first over steps).
struct InputDomains {
    std::vector<TraceColumn> columns; // input leaves of the observer interface
    std::vector<std::vector<Value>> values;
};
InputDomains default_domains(const HarnessBinding& b);

struct Counterexample {
    std::string label;
    size_t step; // first violation
    TraceData inputs;
    std::string rendered; // per-step table of all signals including hoisted locals
};

struct CheckResult {
    bool passed = true;
    bool exhausted = true; // false when the budget cut enumeration short
    uint64_t explored = 0; // full-depth traces examined
    uint64_t vacuous_prefixes = 0;
    std::optional<Counterexample> counterexample;
};

CheckResult check_bounded(const HarnessBinding& b, size_t depth, const InputDomains& domains,
                          uint64_t budget_steps = UINT64_MAX);

CheckResult check_random(const HarnessBinding& b, uint64_t trials, size_t depth,
                         const InputDomains& domains, uint64_t seed, int jobs = 1);

// Replays an inputs-only trace through the binding; returns the verdicts and
// recomputed outputs (counterexample fidelity).
struct ReplayResult {
    std::vector<StepVerdict> verdicts;
    std::optional<std::pair<std::string, size_t>> first_violation;
};
ReplayResult replay(const HarnessBinding& b, const TraceData& inputs);

enum class DivergenceClass { TranslationBug, OverflowDivergence, FloatSemanticGap, EagerTrapDivergence };
const char* divergence_class_name(DivergenceClass c);

struct Divergence {
    DivergenceClass cls;
    uint64_t trial;
    size_t step;
    std::string subject; // label or signal name
    std::string detail;
};

struct DiffReport {
    uint64_t trials = 0;
    size_t depth = 0;
    uint64_t seed = 0;
    std::map<DivergenceClass, uint64_t> counts;
    std::vector<Divergence> divergences; // capped sample
    uint64_t translation_bugs() const {
        auto it = counts.find(DivergenceClass::TranslationBug);
        return it == counts.end() ? 0 : it->second;
    }
};

// Compiles the contract, runs oracle and interpreter on identical random
// traces, and classifies every disagreement. Zero TranslationBug is the
// release gate. int_magnitude bounds sampled integers (clamped to the width's
// range); the default excludes int32 overflow on short traces.
DiffReport diff(const Contract& contract, const TypeConfig& cfg, uint64_t trials, size_t depth,
                uint64_t seed, int jobs = 1, int64_t int_magnitude = 3);

// Same instrument over an externally supplied program (the compiled artifact
// under test); diff() compiles and forwards here.
DiffReport diff_with_program(const Contract& contract, const ObserverProgram& prog, uint64_t trials,
                             size_t depth, uint64_t seed, int jobs = 1, int64_t int_magnitude = 3);

} // namespace c2o
