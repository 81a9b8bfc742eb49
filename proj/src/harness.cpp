#include "c2o/harness.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace c2o {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class CompiledModelInstance : public ModelInstance {
  public:
    CompiledModelInstance(const ObserverProgram& prog) : interp_(prog) {}
    void reset() override { interp_.reset(); }
    std::vector<Value> step(const std::vector<Value>& inputs) override {
        interp_.step(inputs);
        std::vector<Value> out;
        for (const auto& o : interp_.program().model_outputs) out.push_back(interp_.value_of(o.name));
        return out;
    }
    std::vector<std::pair<std::string, Value>> debug_signals() const override {
        std::vector<std::pair<std::string, Value>> out;
        const auto& prog = interp_.program();
        for (size_t i = 0; i < prog.locals.size(); ++i)
            out.emplace_back(prog.locals[i].name, interp_.slot(prog.params.size() + i));
        return out;
    }
    std::shared_ptr<void> save_state() const override {
        return std::make_shared<Interpreter::SavedState>(interp_.save());
    }
    void restore_state(const std::shared_ptr<void>& s) override {
        interp_.restore(*std::static_pointer_cast<Interpreter::SavedState>(s));
    }

  private:
    Interpreter interp_;
};

class PassthroughInstance : public ModelInstance {
  public:
    PassthroughInstance(std::vector<size_t> out_from_in) : map_(std::move(out_from_in)) {}
    void reset() override {}
    std::vector<Value> step(const std::vector<Value>& inputs) override {
        std::vector<Value> out;
        for (size_t i : map_) out.push_back(inputs[i]);
        return out;
    }

  private:
    std::vector<size_t> map_;
};

} // namespace

DesignModel DesignModel::from_contract(const Contract& c, const TypeConfig& cfg) {
    auto prog = std::make_shared<ObserverProgram>(compile_model(c, cfg));
    DesignModel m;
    m.origin = "contract:" + c.name;
    m.iface.inputs = prog->params;
    m.iface.outputs = prog->model_outputs;
    m.iface.structs = prog->structs;
    m.instantiate = [prog]() -> std::unique_ptr<ModelInstance> {
        return std::make_unique<CompiledModelInstance>(*prog);
    };
    return m;
}

std::vector<std::string> DesignModel::builtin_names() { return {"passthrough"}; }

DesignModel DesignModel::builtin(const std::string& name, const Contract& interface_contract,
                                 const TypeConfig& cfg) {
    if (name != "passthrough")
        throw std::invalid_argument("unknown builtin model '" + name + "'");
    DesignModel m;
    m.origin = "builtin:" + name;
    for (const auto& p : interface_contract.inputs)
        m.iface.inputs.push_back({p.name, lower_type(p.type, cfg), false});
    for (const auto& p : interface_contract.outputs)
        m.iface.outputs.push_back({p.name, lower_type(p.type, cfg), true});
    for (const auto& rd : interface_contract.records.decls) {
        StructLayout layout;
        layout.name = rd.name;
        for (const auto& [fn, ft] : rd.fields) layout.fields.emplace_back(fn, lower_type(ft, cfg));
        m.iface.structs.push_back(std::move(layout));
    }
    // positional: output k echoes input k (same-name ports cannot exist)
    std::vector<size_t> map;
    for (size_t k = 0; k < m.iface.outputs.size(); ++k) {
        if (k >= m.iface.inputs.size() || !(m.iface.inputs[k].type == m.iface.outputs[k].type))
            throw std::invalid_argument("passthrough requires input " + std::to_string(k) +
                                        " to match output " + std::to_string(k) + " in type");
        map.push_back(k);
    }
    m.instantiate = [map]() -> std::unique_ptr<ModelInstance> {
        return std::make_unique<PassthroughInstance>(map);
    };
    return m;
}

std::string InterfaceIssue::render() const {
    std::string k;
    switch (kind) {
        case Kind::MissingInput: k = "missing input"; break;
        case Kind::MissingOutput: k = "missing output"; break;
        case Kind::ExtraInput: k = "extra model input"; break;
        case Kind::ExtraOutput: k = "extra model output"; break;
        case Kind::TypeMismatch: k = "type mismatch"; break;
        case Kind::FieldMismatch: k = "record field mismatch"; break;
        case Kind::DuplicatePort: k = "duplicated port"; break;
    }
    std::string out = k + " '" + name + "'";
    if (!detail.empty()) out += ": " + detail;
    if (warning) out += " (warning)";
    return out;
}

InterfaceMismatch::InterfaceMismatch(std::vector<InterfaceIssue> issues)
    : std::runtime_error([&] {
          std::string msg = "interface mismatch:";
          for (const auto& i : issues) msg += "\n  " + i.render();
          return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

const StructLayout* find_layout(const std::vector<StructLayout>& structs, const std::string& name) {
    for (const auto& s : structs)
        if (s.name == name) return &s;
    return nullptr;
}

// Structural comparison with field-level reporting for records.
void compare_types(const std::string& signal, const LoweredType& a,
                   const std::vector<StructLayout>& a_structs, const LoweredType& b,
                   const std::vector<StructLayout>& b_structs, std::vector<InterfaceIssue>& issues) {
    if (a.kind != b.kind) {
        issues.push_back({InterfaceIssue::Kind::TypeMismatch, signal,
                          "contract has " + a.to_string() + ", model has " + b.to_string(), false});
        return;
    }
    if (a.kind != LoweredType::Kind::Struct) {
        if (a != b)
            issues.push_back({InterfaceIssue::Kind::TypeMismatch, signal,
                              "contract has " + a.to_string() + ", model has " + b.to_string(), false});
        return;
    }
    const StructLayout* la = find_layout(a_structs, a.struct_name);
    const StructLayout* lb = find_layout(b_structs, b.struct_name);
    for (const auto& [fn, ft] : la->fields) {
        bool found = false;
        for (const auto& [gn, gt] : lb->fields)
            if (gn == fn) {
                compare_types(signal + "." + fn, ft, a_structs, gt, b_structs, issues);
                found = true;
                break;
            }
        if (!found)
            issues.push_back({InterfaceIssue::Kind::FieldMismatch, signal,
                              "model record lacks field '" + fn + "'", false});
    }
    for (const auto& [gn, gt] : lb->fields) {
        bool found = false;
        for (const auto& [fn, ft] : la->fields) found |= fn == gn;
        if (!found)
            issues.push_back({InterfaceIssue::Kind::FieldMismatch, signal,
                              "model record has extra field '" + gn + "'", false});
    }
}

} // namespace

HarnessBinding bind(ObserverProgram observer, DesignModel model) {
    std::vector<InterfaceIssue> errors, warnings;
    HarnessBinding b;
    uint64_t next_id = 1;

    auto find_in = [&](const std::vector<ObserverProgram::Param>& list,
                       const std::string& name) -> std::optional<size_t> {
        for (size_t i = 0; i < list.size(); ++i)
            if (list[i].name == name) return i;
        return std::nullopt;
    };

    b.model_input_ids.assign(model.iface.inputs.size(), 0);
    for (const auto& prm : observer.params) {
        HarnessBinding::Source src{false, 0, 0};
        if (!prm.is_output) {
            auto idx = find_in(model.iface.inputs, prm.name);
            if (!idx) {
                errors.push_back({InterfaceIssue::Kind::MissingInput, prm.name,
                                  "observer input has no model counterpart", false});
                continue;
            }
            compare_types(prm.name, prm.type, observer.structs, model.iface.inputs[*idx].type,
                          model.iface.structs, errors);
            src = {false, *idx, next_id};
            b.model_input_ids[*idx] = next_id; // same signal instance feeds both
            ++next_id;
        } else {
            auto idx = find_in(model.iface.outputs, prm.name);
            if (!idx) {
                errors.push_back({InterfaceIssue::Kind::MissingOutput, prm.name,
                                  "observer output has no model counterpart", false});
                continue;
            }
            compare_types(prm.name, prm.type, observer.structs, model.iface.outputs[*idx].type,
                          model.iface.structs, errors);
            src = {true, *idx, next_id++};
        }
        b.observer_sources.push_back(src);
    }
    // an unbound model input would be a nondeterministic free signal
    for (size_t i = 0; i < model.iface.inputs.size(); ++i)
        if (b.model_input_ids[i] == 0)
            errors.push_back({InterfaceIssue::Kind::ExtraInput, model.iface.inputs[i].name,
                              "model input is not part of the observed interface", false});
    for (const auto& o : model.iface.outputs) {
        bool bound = false;
        for (const auto& prm : observer.params) bound |= prm.is_output && prm.name == o.name;
        if (!bound)
            warnings.push_back({InterfaceIssue::Kind::ExtraOutput, o.name, "ignored by the observer", true});
    }
    if (!errors.empty()) throw InterfaceMismatch(std::move(errors));
    b.observer = std::move(observer);
    b.model = std::move(model);
    b.warnings = std::move(warnings);
    b.validate();
    return b;
}

void HarnessBinding::validate() const {
    std::vector<InterfaceIssue> issues;
    if (observer_sources.size() != observer.params.size())
        issues.push_back({InterfaceIssue::Kind::MissingInput, observer.name, "binding is incomplete", false});
    std::set<uint64_t> seen;
    for (size_t i = 0; i < observer_sources.size() && i < observer.params.size(); ++i) {
        const auto& src = observer_sources[i];
        const auto& prm = observer.params[i];
        if (!seen.insert(src.signal_id).second)
            issues.push_back({InterfaceIssue::Kind::DuplicatePort, prm.name,
                              "signal id bound to more than one observer parameter", false});
        if (!prm.is_output) {
            // the defect class: an input consumed by model and observer must be
            // the same port, not a same-named duplicate
            if (src.index >= model_input_ids.size() || model_input_ids[src.index] != src.signal_id)
                issues.push_back({InterfaceIssue::Kind::DuplicatePort, prm.name,
                                  "input is bound as a duplicate port (distinct signal instances feed "
                                  "the model and the observer)",
                                  false});
        }
    }
    if (!issues.empty()) throw InterfaceMismatch(std::move(issues));
}

InputDomains default_domains(const HarnessBinding& b) {
    InputDomains d;
    auto cols = trace_columns(b.observer);
    for (const auto& c : cols) {
        if (b.observer.params[c.param].is_output) continue;
        d.columns.push_back(c);
        switch (c.type.kind) {
            case LoweredType::Kind::Bool:
                d.values.push_back({Value(false), Value(true)});
                break;
            case LoweredType::Kind::FixedInt:
                d.values.push_back({Value(int64_t{0}), Value(int64_t{1})});
                break;
            case LoweredType::Kind::Float:
                d.values.push_back({Value(0.0), Value(1.0)});
                break;
            case LoweredType::Kind::Struct:
                break; // leaves only
        }
    }
    return d;
}

namespace {

// Drives one bound step: composes input params from leaf choices, runs the
// model, then the observer over inputs + recomputed outputs.
struct BoundRunner {
    const HarnessBinding& b;
    std::unique_ptr<ModelInstance> model;
    Interpreter observer;
    std::vector<TraceColumn> input_columns;

    explicit BoundRunner(const HarnessBinding& binding)
        : b(binding), model(binding.model.instantiate()), observer(binding.observer) {
        for (const auto& c : trace_columns(b.observer))
            if (!b.observer.params[c.param].is_output) input_columns.push_back(c);
    }

    void reset() {
        model->reset();
        observer.reset();
    }

    static Value& descend(Value& v, const std::vector<size_t>& path) {
        Value* cur = &v;
        for (size_t i : path) cur = &(*cur->as_struct())[i];
        return *cur;
    }

    size_t input_param_count() const {
        size_t n = 0;
        for (const auto& prm : b.observer.params) n += prm.is_output ? 0 : 1;
        return n;
    }

    // leaf values aligned with input_columns -> structured per-input-param row
    std::vector<Value> compose_inputs(const std::vector<Value>& leaves) const {
        ExecOptions defaults;
        std::vector<Value> inputs(input_param_count());
        for (size_t i = 0; i < inputs.size(); ++i)
            inputs[i] = default_value(b.observer.params[i].type, b.observer, defaults);
        for (size_t i = 0; i < input_columns.size(); ++i)
            descend(inputs[input_columns[i].param], input_columns[i].field_path) = leaves[i];
        return inputs;
    }

    // one structured value per component input (observer params start with them)
    StepVerdict step(const std::vector<Value>& input_row) {
        ExecOptions defaults;
        std::vector<Value> params(b.observer.params.size());
        for (size_t i = 0; i < input_row.size(); ++i) params[i] = input_row[i];
        for (size_t i = input_row.size(); i < params.size(); ++i)
            params[i] = default_value(b.observer.params[i].type, b.observer, defaults);
        std::vector<Value> model_in(b.model.iface.inputs.size());
        for (size_t i = 0; i < b.observer.params.size(); ++i)
            if (!b.observer.params[i].is_output) model_in[b.observer_sources[i].index] = params[i];
        std::vector<Value> model_out = model->step(model_in);
        for (size_t i = 0; i < b.observer.params.size(); ++i)
            if (b.observer.params[i].is_output) params[i] = model_out[b.observer_sources[i].index];
        return observer.step(params);
    }

    static std::optional<std::string> failing_label(const StepVerdict& v) {
        if (v.vacuous) return std::nullopt;
        for (const auto& [label, ok] : v.proves)
            if (!ok) return label;
        return std::nullopt;
    }
};

std::string render_trace_table(const HarnessBinding& b, const TraceData& inputs) {
    BoundRunner runner(b);
    runner.reset();
    std::ostringstream os;
    // header
    os << "step";
    for (const auto& prm : b.observer.params) os << " | " << prm.name;
    for (const auto& l : b.observer.locals) os << " | " << l.name;
    os << " | verdicts\n";
    for (size_t s = 0; s < inputs.steps.size(); ++s) {
        StepVerdict v = runner.step(inputs.steps[s]);
        os << s;
        for (size_t i = 0; i < b.observer.params.size(); ++i)
            os << " | " << format_value(runner.observer.slot(i), b.observer.params[i].type, b.observer);
        for (size_t i = 0; i < b.observer.locals.size(); ++i)
            os << " | "
               << format_value(runner.observer.slot(b.observer.params.size() + i),
                               b.observer.locals[i].type, b.observer);
        os << " |";
        for (const auto& [label, ok] : v.assumes) os << " assume \"" << label << "\"=" << (ok ? "T" : "F");
        for (const auto& [label, ok] : v.proves) os << " prove \"" << label << "\"=" << (ok ? "T" : "F");
        if (v.vacuous) os << " (vacuous)";
        os << "\n";
    }
    return os.str();
}

Counterexample make_counterexample(const HarnessBinding& b, const std::string& label, size_t step,
                                   std::vector<std::vector<Value>> input_rows) {
    Counterexample ce;
    ce.label = label;
    ce.step = step;
    BoundRunner probe(b);
    for (const auto& c : probe.input_columns) ce.inputs.params.push_back(c.path);
    ce.inputs.steps = std::move(input_rows);
    ce.rendered = render_trace_table(b, ce.inputs);
    return ce;
}

} // namespace

CheckResult check_bounded(const HarnessBinding& b, size_t depth, const InputDomains& domains,
                          uint64_t budget_steps) {
    b.validate();
    CheckResult result;
    if (depth == 0) return result;
    BoundRunner runner(b);
    runner.reset();
    if (domains.columns.size() != runner.input_columns.size())
        throw std::invalid_argument("domains must cover every input leaf");
    for (const auto& vs : domains.values)
        if (vs.empty()) throw std::invalid_argument("empty domain");

    uint64_t steps_run = 0;
    std::vector<std::vector<Value>> prefix;

    // depth-first over steps; inputs in declaration order, values in given order
    std::function<bool(size_t)> explore = [&](size_t level) -> bool {
        std::vector<size_t> choice(domains.columns.size(), 0);
        for (;;) {
            std::vector<Value> leaves;
            leaves.reserve(choice.size());
            for (size_t i = 0; i < choice.size(); ++i) leaves.push_back(domains.values[i][choice[i]]);
            std::vector<Value> input_row = runner.compose_inputs(leaves);

            if (steps_run >= budget_steps) {
                result.exhausted = false;
                return false;
            }
            std::shared_ptr<void> model_state = runner.model->save_state();
            auto obs_state = runner.observer.save();
            StepVerdict v = runner.step(input_row);
            ++steps_run;
            prefix.push_back(input_row);

            bool assume_failed = false;
            for (const auto& [_, ok] : v.assumes) assume_failed |= !ok;
            auto fail_label = BoundRunner::failing_label(v);
            if (fail_label) {
                result.passed = false;
                result.counterexample = make_counterexample(b, *fail_label, level, prefix);
                return true;
            }
            if (assume_failed) {
                ++result.vacuous_prefixes;
            } else if (level + 1 == depth) {
                ++result.explored;
            } else {
                if (explore(level + 1)) return true;
                if (!result.exhausted) return false;
            }
            prefix.pop_back();
            runner.model->restore_state(model_state);
            runner.observer.restore(obs_state);

            // odometer over leaf choices, last column fastest
            size_t k = choice.size();
            while (k > 0) {
                --k;
                if (++choice[k] < domains.values[k].size()) break;
                choice[k] = 0;
                if (k == 0) return false;
            }
            if (choice.empty()) return false; // closed component: single assignment
        }
    };
    explore(0);
    return result;
}

namespace {

std::vector<std::vector<Value>> random_leaf_rows(const InputDomains& domains, size_t depth,
                                                 uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Value>> rows;
    for (size_t s = 0; s < depth; ++s) {
        std::vector<Value> row;
        for (const auto& vs : domains.values)
            row.push_back(vs[static_cast<size_t>(rng() % vs.size())]);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct RunFailure {
    std::string label;
    size_t step;
};

std::optional<RunFailure> run_leaf_rows(const HarnessBinding& b,
                                        const std::vector<std::vector<Value>>& leaf_rows) {
    BoundRunner runner(b);
    runner.reset();
    for (size_t s = 0; s < leaf_rows.size(); ++s) {
        StepVerdict v = runner.step(runner.compose_inputs(leaf_rows[s]));
        if (auto label = BoundRunner::failing_label(v)) return RunFailure{*label, s};
    }
    return std::nullopt;
}

} // namespace

CheckResult check_random(const HarnessBinding& b, uint64_t trials, size_t depth,
                         const InputDomains& domains, uint64_t seed, int jobs) {
    b.validate();
    CheckResult result;
    result.exhausted = true;
    if (trials == 0 || depth == 0) return result;

    std::atomic<uint64_t> best_trial{UINT64_MAX};
    std::mutex mtx;
    std::optional<std::pair<RunFailure, std::vector<std::vector<Value>>>> best;

    auto worker = [&](uint64_t from, uint64_t to) {
        for (uint64_t trial = from; trial < to; ++trial) {
            if (trial >= best_trial.load(std::memory_order_relaxed)) break;
            auto rows = random_leaf_rows(domains, depth, splitmix64(seed ^ (trial + 1)));
            auto failure = run_leaf_rows(b, rows);
            if (failure) {
                std::lock_guard<std::mutex> lock(mtx);
                if (trial < best_trial.load()) {
                    best_trial.store(trial);
                    best = {{*failure, rows}};
                }
            }
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> threads;
        uint64_t chunk = (trials + jobs - 1) / static_cast<uint64_t>(jobs);
        for (int j = 0; j < jobs; ++j) {
            uint64_t from = static_cast<uint64_t>(j) * chunk;
            if (from >= trials) break;
            threads.emplace_back(worker, from, std::min(trials, from + chunk));
        }
        for (auto& th : threads) th.join();
    }
    result.explored = trials;
    if (!best) return result;

    // greedy shrink: truncate to the violation, then pull each leaf toward the
    // domain minimum, re-validating against the same label each time
    RunFailure failure = best->first;
    std::vector<std::vector<Value>> rows(best->second.begin(),
                                         best->second.begin() + static_cast<long>(failure.step) + 1);
    auto still_fails = [&](const std::vector<std::vector<Value>>& candidate) -> std::optional<RunFailure> {
        auto f = run_leaf_rows(b, candidate);
        if (f && f->label == failure.label) return f;
        return std::nullopt;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t s = 0; s < rows.size(); ++s) {
            for (size_t i = 0; i < domains.values.size(); ++i) {
                const Value& lowest = domains.values[i][0];
                if (values_equal(rows[s][i], lowest)) continue;
                std::vector<std::vector<Value>> candidate = rows;
                candidate[s][i] = lowest;
                if (auto f = still_fails(candidate)) {
                    rows = std::move(candidate);
                    if (f->step + 1 < rows.size()) rows.resize(f->step + 1);
                    failure = *f;
                    changed = true;
                }
            }
        }
    }
    BoundRunner composer(b);
    std::vector<std::vector<Value>> input_rows;
    for (const auto& r : rows) input_rows.push_back(composer.compose_inputs(r));
    result.passed = false;
    result.counterexample = make_counterexample(b, failure.label, failure.step, input_rows);
    return result;
}

ReplayResult replay(const HarnessBinding& b, const TraceData& inputs) {
    b.validate();
    BoundRunner runner(b);
    runner.reset();
    if (inputs.params.size() != runner.input_columns.size())
        throw std::invalid_argument("replay trace must bind exactly the component inputs");
    for (size_t i = 0; i < inputs.params.size(); ++i)
        if (inputs.params[i] != runner.input_columns[i].path)
            throw std::invalid_argument("replay trace binds '" + inputs.params[i] + "' where '" +
                                        runner.input_columns[i].path + "' was expected");
    ReplayResult r;
    for (size_t s = 0; s < inputs.steps.size(); ++s) {
        StepVerdict v = runner.step(inputs.steps[s]);
        if (!r.first_violation)
            if (auto label = BoundRunner::failing_label(v)) r.first_violation = {{*label, s}};
        r.verdicts.push_back(std::move(v));
    }
    return r;
}

// ------------------------------------------------------------------- diff

const char* divergence_class_name(DivergenceClass c) {
    switch (c) {
        case DivergenceClass::TranslationBug: return "TranslationBug";
        case DivergenceClass::OverflowDivergence: return "OverflowDivergence";
        case DivergenceClass::FloatSemanticGap: return "FloatSemanticGap";
        case DivergenceClass::EagerTrapDivergence: return "EagerTrapDivergence";
    }
    return "?";
}

namespace {

struct ObserverOutcome {
    std::vector<StepVerdict> verdicts;
    std::vector<std::vector<std::pair<std::string, Value>>> signals; // non-synthetic locals
    std::optional<TrapError> trap;
};

struct OracleOutcome {
    OracleResult result;
    std::optional<int> trap_step;
};

ObserverOutcome run_observer_full(const ObserverProgram& prog, const TraceData& trace, ExecOptions opts) {
    ObserverOutcome out;
    Interpreter interp(prog, std::move(opts));
    for (const auto& step_values : trace.steps) {
        try {
            out.verdicts.push_back(interp.step(step_values));
        } catch (const TrapError& t) {
            out.trap = t;
            return out;
        }
        std::vector<std::pair<std::string, Value>> row;
        for (size_t i = 0; i < prog.locals.size(); ++i)
            if (!prog.locals[i].synthetic)
                row.emplace_back(prog.locals[i].name, interp.slot(prog.params.size() + i));
        out.signals.push_back(std::move(row));
    }
    return out;
}

OracleOutcome run_oracle_full(const Contract& c, const TraceData& trace) {
    OracleOutcome out;
    try {
        out.result = oracle_eval(c, trace);
    } catch (const OracleTrap& t) {
        out.trap_step = t.step();
        // keep partial verdicts unavailable; compare up to the trap step only
    }
    return out;
}

const BigRational& tolerance() {
    static const BigRational tol(BigInt(1), BigInt::from_string("1000000000"));
    return tol;
}

bool float_within_tolerance(const BigRational& obs, const BigRational& exact, BigRational* gap_out) {
    BigRational gap = (obs - exact).abs();
    if (gap_out) *gap_out = gap;
    BigRational bound = exact.abs();
    if (bound < BigRational(1)) bound = BigRational(1);
    return gap <= bound * tolerance();
}

// Bool/Int exact; Float within 1e-9 relative at the comparison boundary.
bool value_matches(const Value& obs, const OracleValue& exact, std::string* why, BigRational* gap) {
    if (std::holds_alternative<bool>(obs.v)) {
        if (!std::holds_alternative<bool>(exact.v) || obs.as_bool() != exact.as_bool()) {
            if (why) *why = "bool mismatch";
            return false;
        }
        return true;
    }
    if (std::holds_alternative<int64_t>(obs.v) || std::holds_alternative<BigInt>(obs.v)) {
        BigInt o = std::holds_alternative<BigInt>(obs.v) ? std::get<BigInt>(obs.v) : BigInt(obs.as_int());
        if (!std::holds_alternative<BigInt>(exact.v) || o != exact.as_int()) {
            if (why)
                *why = "int " + o.to_string() + " vs exact " +
                       (std::holds_alternative<BigInt>(exact.v) ? exact.as_int().to_string() : "?");
            return false;
        }
        return true;
    }
    if (std::holds_alternative<double>(obs.v) || std::holds_alternative<BigRational>(obs.v)) {
        BigRational o = std::holds_alternative<BigRational>(obs.v) ? std::get<BigRational>(obs.v)
                                                                   : BigRational::from_double(obs.as_float());
        if (!std::holds_alternative<BigRational>(exact.v)) {
            if (why) *why = "kind mismatch";
            return false;
        }
        if (!float_within_tolerance(o, exact.as_real(), gap)) {
            if (why) *why = "float beyond 1e-9 relative tolerance";
            return false;
        }
        return true;
    }
    // structs
    if (!std::holds_alternative<Value::Struct>(obs.v) ||
        !std::holds_alternative<OracleValue::Struct>(exact.v)) {
        if (why) *why = "kind mismatch";
        return false;
    }
    const auto& so = *obs.as_struct();
    const auto& se = *std::get<OracleValue::Struct>(exact.v);
    if (so.size() != se.size()) {
        if (why) *why = "record arity mismatch";
        return false;
    }
    for (size_t i = 0; i < so.size(); ++i)
        if (!value_matches(so[i], se[i], why, gap)) return false;
    return true;
}

struct Mismatch {
    size_t step;
    std::string subject;
    std::string detail;
    BigRational gap;
};

std::optional<Mismatch> compare_outcomes(const OracleOutcome& oracle, const ObserverOutcome& obs) {
    size_t oracle_steps = oracle.result.verdicts.size();
    size_t obs_steps = obs.verdicts.size();
    size_t common = std::min(oracle_steps, obs_steps);
    for (size_t t = 0; t < common; ++t) {
        auto by_label = [](const std::vector<std::pair<std::string, bool>>& xs) {
            std::map<std::string, bool> m;
            for (const auto& [k, v] : xs) m[k] = v;
            return m;
        };
        auto oa = by_label(oracle.result.verdicts[t].assumes);
        auto ia = by_label(obs.verdicts[t].assumes);
        if (oa != ia) return Mismatch{t, "assume verdicts", "observer disagrees with oracle", {}};
        auto op = by_label(oracle.result.verdicts[t].proves);
        auto ip = by_label(obs.verdicts[t].proves);
        if (op != ip) {
            for (const auto& [label, v] : op)
                if (ip.count(label) && ip.at(label) != v)
                    return Mismatch{t, "guarantee \"" + label + "\"",
                                    std::string("oracle=") + (v ? "true" : "false"), {}};
            return Mismatch{t, "prove verdicts", "label sets differ", {}};
        }
        // signal comparison
        std::map<std::string, const OracleValue*> exact;
        for (const auto& [name, val] : oracle.result.eq_values[t]) exact[name] = &val;
        for (const auto& [name, val] : obs.signals[t]) {
            auto it = exact.find(name);
            if (it == exact.end()) continue;
            std::string why;
            BigRational gap;
            if (!value_matches(val, *it->second, &why, &gap))
                return Mismatch{t, "signal '" + name + "'", why, gap};
        }
    }
    // trap agreement: both trap at the same step, or neither traps
    std::optional<size_t> ot = oracle.trap_step ? std::optional<size_t>(static_cast<size_t>(*oracle.trap_step))
                                                : std::nullopt;
    std::optional<size_t> it = obs.trap ? std::optional<size_t>(static_cast<size_t>(obs.trap->step()))
                                        : std::nullopt;
    if (ot != it) {
        size_t at = std::min(ot.value_or(SIZE_MAX), it.value_or(SIZE_MAX));
        std::string detail = ot ? "oracle traps, observer does not" : "observer traps, oracle does not";
        return Mismatch{at, "trap", detail, {}};
    }
    return std::nullopt;
}

} // namespace

DiffReport diff(const Contract& contract, const TypeConfig& cfg, uint64_t trials, size_t depth,
                uint64_t seed, int jobs, int64_t int_magnitude) {
    return diff_with_program(contract, compile_observer(contract, cfg), trials, depth, seed, jobs,
                             int_magnitude);
}

DiffReport diff_with_program(const Contract& contract, const ObserverProgram& prog, uint64_t trials,
                             size_t depth, uint64_t seed, int jobs, int64_t int_magnitude) {
    DiffReport report;
    report.trials = trials;
    report.depth = depth;
    report.seed = seed;

    // uniform small-domain sampler over the observer interface
    auto sample_trace = [&](uint64_t trial) {
        std::mt19937_64 rng(splitmix64(seed ^ (trial + 0x5151ull)));
        TraceData t;
        for (const auto& p : prog.params) t.params.push_back(p.name);
        std::function<Value(const LoweredType&)> gen = [&](const LoweredType& ty) -> Value {
            switch (ty.kind) {
                case LoweredType::Kind::Bool: return Value((rng() & 1) != 0);
                case LoweredType::Kind::FixedInt: {
                    int64_t hi = ty.is_signed ? (int64_t{1} << (ty.width - 1)) - 1
                                              : (int64_t{1} << ty.width) - 1;
                    int64_t m = std::min(int_magnitude, hi);
                    int64_t lo = ty.is_signed ? -m : 0;
                    int64_t v = lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(m - lo + 1));
                    return Value(v);
                }
                case LoweredType::Kind::Float:
                    return Value(static_cast<double>(static_cast<int64_t>(rng() % 65) - 32) / 4.0);
                case LoweredType::Kind::Struct: {
                    const StructLayout* layout = prog.layout(ty.struct_name);
                    auto fields = std::make_shared<std::vector<Value>>();
                    for (const auto& [fn, ft] : layout->fields) fields->push_back(gen(ft));
                    return Value(std::move(fields));
                }
            }
            return Value(false);
        };
        size_t len = 1 + rng() % depth;
        for (size_t s = 0; s < len; ++s) {
            std::vector<Value> row;
            for (const auto& p : prog.params) row.push_back(gen(p.type));
            t.steps.push_back(std::move(row));
        }
        return t;
    };

    std::mutex mtx;
    auto run_trial = [&](uint64_t trial) -> std::optional<Divergence> {
        TraceData trace = sample_trace(trial);
        OracleOutcome oracle = run_oracle_full(contract, trace);
        ObserverOutcome obs = run_observer_full(prog, trace, {});
        auto mismatch = compare_outcomes(oracle, obs);
        if (!mismatch) return std::nullopt;

        // the eagerly-evaluated unselected branch is a known, classified gap
        if (obs.trap && obs.trap->in_unselected_branch() && !oracle.trap_step)
            return Divergence{DivergenceClass::EagerTrapDivergence, trial, mismatch->step,
                              mismatch->subject, "trap in an unselected helper argument"};

        auto agrees_under = [&](IntSemantics ints, RealSemantics reals) {
            ExecOptions opts;
            opts.ints = ints;
            opts.reals = reals;
            ObserverOutcome retry = run_observer_full(prog, trace, opts);
            return !compare_outcomes(oracle, retry).has_value();
        };
        DivergenceClass cls;
        if (agrees_under(IntSemantics::Unbounded, RealSemantics::Float))
            cls = DivergenceClass::OverflowDivergence;
        else if (agrees_under(IntSemantics::Fixed, RealSemantics::Exact))
            cls = DivergenceClass::FloatSemanticGap;
        else if (agrees_under(IntSemantics::Unbounded, RealSemantics::Exact))
            cls = DivergenceClass::OverflowDivergence;
        else
            cls = DivergenceClass::TranslationBug;
        std::string detail = mismatch->detail;
        if (cls == DivergenceClass::FloatSemanticGap && !mismatch->gap.is_zero())
            detail += " (gap " + std::to_string(mismatch->gap.to_double()) + ")";
        return Divergence{cls, trial, mismatch->step, mismatch->subject, detail};
    };

    jobs = std::max(1, jobs);
    auto worker = [&](uint64_t from, uint64_t to) {
        for (uint64_t trial = from; trial < to; ++trial) {
            auto d = run_trial(trial);
            if (!d) continue;
            std::lock_guard<std::mutex> lock(mtx);
            ++report.counts[d->cls];
            if (report.divergences.size() < 50) report.divergences.push_back(*d);
        }
    };
    if (jobs == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> threads;
        uint64_t chunk = (trials + jobs - 1) / static_cast<uint64_t>(jobs);
        for (int j = 0; j < jobs; ++j) {
            uint64_t from = static_cast<uint64_t>(j) * chunk;
            if (from >= trials) break;
            threads.emplace_back(worker, from, std::min(trials, from + chunk));
        }
        for (auto& th : threads) th.join();
    }
    std::sort(report.divergences.begin(), report.divergences.end(),
              [](const Divergence& a, const Divergence& b) { return a.trial < b.trial; });
    return report;
}

} // namespace c2o
