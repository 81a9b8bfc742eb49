#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "c2o/emit.hpp"
#include "c2o/harness.hpp"
#include "c2o/normalize.hpp"
#include "c2o/parser.hpp"
#include "c2o/trace_io.hpp"
#include "c2o/wellformed.hpp"

namespace py = pybind11;
using namespace c2o;

namespace {

TypeConfig make_config(int int_width, bool int_signed, const std::string& real) {
    TypeConfig cfg;
    cfg.int_width = int_width;
    cfg.int_signed = int_signed;
    cfg.float_precision = real == "single" ? FloatPrec::Single : FloatPrec::Double;
    return cfg;
}

EmitTarget target_from(const std::string& name) {
    if (name == "osl") return EmitTarget::Osl;
    if (name == "json") return EmitTarget::Json;
    if (name == "matlab") return EmitTarget::MatlabCompatible;
    throw py::value_error("unknown emit target '" + name + "' (osl, json, matlab)");
}

Value value_from_py(const py::handle& obj, const LoweredType& t, const ObserverProgram& prog) {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return Value(obj.cast<bool>());
        case LoweredType::Kind::FixedInt: return Value(obj.cast<int64_t>());
        case LoweredType::Kind::Float: return Value(obj.cast<double>());
        case LoweredType::Kind::Struct: {
            const StructLayout* layout = prog.layout(t.struct_name);
            auto dict = obj.cast<py::dict>();
            auto fields = std::make_shared<std::vector<Value>>();
            for (const auto& [fn, ft] : layout->fields) {
                if (!dict.contains(fn.c_str()))
                    throw py::value_error("record value missing field '" + fn + "'");
                fields->push_back(value_from_py(dict[fn.c_str()], ft, prog));
            }
            return Value(std::move(fields));
        }
    }
    throw py::value_error("unsupported value");
}

py::object value_to_py(const Value& v, const LoweredType& t, const ObserverProgram& prog) {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return py::bool_(v.as_bool());
        case LoweredType::Kind::FixedInt:
            if (std::holds_alternative<BigInt>(v.v)) return py::cast(std::get<BigInt>(v.v).to_int64());
            return py::int_(v.as_int());
        case LoweredType::Kind::Float: return py::float_(v.as_float());
        case LoweredType::Kind::Struct: {
            const StructLayout* layout = prog.layout(t.struct_name);
            py::dict d;
            for (size_t i = 0; i < layout->fields.size(); ++i)
                d[layout->fields[i].first.c_str()] =
                    value_to_py((*v.as_struct())[i], layout->fields[i].second, prog);
            return d;
        }
    }
    return py::none();
}

py::dict verdict_to_py(const StepVerdict& v) {
    py::dict assumes, proves;
    for (const auto& [label, ok] : v.assumes) assumes[label.c_str()] = ok;
    for (const auto& [label, ok] : v.proves) proves[label.c_str()] = ok;
    py::dict d;
    d["assumes"] = assumes;
    d["proves"] = proves;
    d["vacuous"] = v.vacuous;
    return d;
}

// Compiled observer plus (when compiled from source) its contract, so the
// exact-semantics oracle and the differential instrument stay reachable.
struct PyObserver {
    std::optional<Contract> contract;
    ObserverProgram prog;
    TypeConfig cfg;

    std::string emit_target(const std::string& name) const { return emit(prog, target_from(name)); }

    std::vector<py::dict> run(const py::sequence& steps) const {
        TraceData trace;
        for (const auto& p : prog.params) trace.params.push_back(p.name);
        for (const auto& step : steps) {
            auto dict = step.cast<py::dict>();
            std::vector<Value> row;
            for (const auto& p : prog.params) {
                if (!dict.contains(p.name.c_str()))
                    throw py::value_error("step is missing parameter '" + p.name + "'");
                row.push_back(value_from_py(dict[p.name.c_str()], p.type, prog));
            }
            trace.steps.push_back(std::move(row));
        }
        std::vector<py::dict> out;
        for (const auto& v : run_observer(prog, trace)) out.push_back(verdict_to_py(v));
        return out;
    }

    std::vector<py::dict> run_csv(const std::string& text) const {
        TraceData trace = parse_trace_csv(text, prog);
        std::vector<py::dict> out;
        for (const auto& v : run_observer(prog, trace)) out.push_back(verdict_to_py(v));
        return out;
    }

    std::vector<std::tuple<std::string, std::string, bool>> params() const {
        std::vector<std::tuple<std::string, std::string, bool>> out;
        for (const auto& p : prog.params) out.emplace_back(p.name, p.type.to_string(), p.is_output);
        return out;
    }

    std::vector<std::string> persistents() const {
        std::vector<std::string> out;
        for (const auto& p : prog.persistents) out.push_back(p.name);
        return out;
    }
};

PyObserver compile_py(const std::string& source, int int_width, bool int_signed, const std::string& real) {
    TypeConfig cfg = make_config(int_width, int_signed, real);
    Contract c = parse_contract(source);
    ObserverProgram prog = compile_observer(c, cfg);
    return PyObserver{std::move(c), std::move(prog), cfg};
}

PyObserver parse_osl_py(const std::string& text) {
    return PyObserver{std::nullopt, parse_osl(text), TypeConfig{}};
}

std::vector<std::string> wellformedness_diagnostics(const std::string& source) {
    Contract c = parse_contract(source);
    std::vector<std::string> out;
    for (const auto& d : check_temporal_wellformedness(c)) out.push_back(d.render());
    return out;
}

std::string dump_ir_py(const std::string& source) {
    Contract c = parse_contract(source);
    require_wellformed(c);
    return ir_to_json(normalize(c));
}

py::dict diff_py(const std::string& source, uint64_t trials, size_t depth, uint64_t seed,
                 int int_width, bool int_signed, const std::string& real, int jobs,
                 int64_t int_range) {
    Contract c = parse_contract(source);
    DiffReport r = diff(c, make_config(int_width, int_signed, real), trials, depth, seed, jobs, int_range);
    py::dict counts;
    for (const auto& [cls, n] : r.counts) counts[divergence_class_name(cls)] = n;
    py::list divs;
    for (const auto& d : r.divergences) {
        py::dict item;
        item["class"] = divergence_class_name(d.cls);
        item["trial"] = d.trial;
        item["step"] = d.step;
        item["subject"] = d.subject;
        item["detail"] = d.detail;
        divs.append(item);
    }
    py::dict out;
    out["trials"] = r.trials;
    out["counts"] = counts;
    out["divergences"] = divs;
    out["translation_bugs"] = r.translation_bugs();
    return out;
}

py::dict verify_py(const std::string& contract_src, const std::string& model_src,
                   const std::string& mode, size_t depth, uint64_t trials, uint64_t seed,
                   const py::dict& domains, int int_width, bool int_signed, const std::string& real,
                   int jobs) {
    TypeConfig cfg = make_config(int_width, int_signed, real);
    Contract contract = parse_contract(contract_src);
    ObserverProgram obs = compile_observer(contract, cfg);
    DesignModel model = model_src.rfind("builtin:", 0) == 0
                            ? DesignModel::builtin(model_src.substr(8), contract, cfg)
                            : DesignModel::from_contract(parse_contract(model_src), cfg);
    HarnessBinding binding = bind(std::move(obs), std::move(model));

    InputDomains d = default_domains(binding);
    for (const auto& item : domains) {
        std::string name = item.first.cast<std::string>();
        bool found = false;
        for (size_t i = 0; i < d.columns.size(); ++i) {
            if (d.columns[i].path != name) continue;
            found = true;
            d.values[i].clear();
            for (const auto& v : item.second.cast<py::sequence>())
                d.values[i].push_back(value_from_py(v, d.columns[i].type, binding.observer));
        }
        if (!found) throw py::value_error("unknown input signal '" + name + "'");
    }

    CheckResult r = mode == "bounded" ? check_bounded(binding, depth, d)
                                      : check_random(binding, trials, depth, d, seed, jobs);
    py::dict out;
    out["passed"] = r.passed;
    out["exhausted"] = r.exhausted;
    out["explored"] = r.explored;
    out["vacuous_prefixes"] = r.vacuous_prefixes;
    if (r.counterexample) {
        py::dict ce;
        ce["label"] = r.counterexample->label;
        ce["step"] = r.counterexample->step;
        ce["trace_csv"] = write_trace_csv(binding.observer, r.counterexample->inputs);
        ce["rendered"] = r.counterexample->rendered;
        out["counterexample"] = ce;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_c2o, m) {
    m.doc() = "Assume-guarantee contracts compiled into single-step observers, "
              "with differential and bounded-exhaustive checking";
    m.attr("__version__") = "0.1.0";

    py::register_exception<CompileError>(m, "CompileError", PyExc_ValueError);
    py::register_exception<InterfaceMismatch>(m, "InterfaceMismatchError", PyExc_RuntimeError);
    py::register_exception<TrapError>(m, "TrapError", PyExc_RuntimeError);

    py::class_<PyObserver>(m, "Observer")
        .def_property_readonly("name", [](const PyObserver& o) { return o.prog.name; })
        .def_property_readonly("params", &PyObserver::params)
        .def_property_readonly("persistents", &PyObserver::persistents)
        .def("emit", &PyObserver::emit_target, py::arg("target"),
             "Serialize to 'osl', 'json' or 'matlab' text")
        .def("run", &PyObserver::run, py::arg("steps"),
             "Execute over a list of {param: value} steps; returns per-step verdicts")
        .def("run_csv", &PyObserver::run_csv, py::arg("csv_text"),
             "Execute over a CSV trace (header = parameter paths)");

    m.def("compile", &compile_py, py::arg("source"), py::arg("int_width") = 32,
          py::arg("int_signed") = true, py::arg("real") = "double",
          "Compile contract source into an executable observer");
    m.def("parse_osl", &parse_osl_py, py::arg("text"), "Parse an emitted OSL program");
    m.def("wellformedness_diagnostics", &wellformedness_diagnostics, py::arg("source"),
          "Temporal well-formedness diagnostics (empty list means well-formed)");
    m.def("dump_ir", &dump_ir_py, py::arg("source"), "Normalized dataflow IR as deterministic JSON");
    m.def("diff", &diff_py, py::arg("source"), py::arg("trials") = 1000, py::arg("depth") = 10,
          py::arg("seed") = 0, py::arg("int_width") = 32, py::arg("int_signed") = true,
          py::arg("real") = "double", py::arg("jobs") = 1, py::arg("int_range") = 3,
          "Differential oracle/observer check; classifies all divergences");
    m.def("verify", &verify_py, py::arg("contract"), py::arg("model"), py::arg("mode") = "bounded",
          py::arg("depth") = 6, py::arg("trials") = 1000, py::arg("seed") = 0,
          py::arg("domains") = py::dict(), py::arg("int_width") = 32, py::arg("int_signed") = true,
          py::arg("real") = "double", py::arg("jobs") = 1,
          "Check a design model against a contract (bounded or random)");
}
