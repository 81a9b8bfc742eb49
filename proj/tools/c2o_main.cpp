#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "c2o/emit.hpp"
#include "c2o/harness.hpp"
#include "c2o/manifest.hpp"
#include "c2o/normalize.hpp"
#include "c2o/parser.hpp"
#include "c2o/trace_io.hpp"
#include "c2o/wellformed.hpp"

namespace fs = std::filesystem;
using namespace c2o;

namespace {

enum ExitCode {
    kOk = 0,
    kUsage = 1,
    kParseType = 2,
    kWellformedness = 3,
    kInternal = 4,
    kInterfaceMismatch = 5,
    kCounterexample = 10,
};

struct CommonOpts {
    int int_width = 32;
    bool unsigned_ints = false;
    std::string real = "double";
    std::string out_dir = ".";
    int jobs = 0;

    TypeConfig config() const {
        TypeConfig cfg;
        cfg.int_width = int_width;
        cfg.int_signed = !unsigned_ints;
        cfg.float_precision = real == "single" ? FloatPrec::Single : FloatPrec::Double;
        return cfg;
    }
    int effective_jobs() const {
        if (jobs > 0) return jobs;
        unsigned n = std::thread::hardware_concurrency();
        return n == 0 ? 1 : static_cast<int>(n);
    }
};

void add_type_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--int-width", opts.int_width, "Integer width for lowering")
        ->check(CLI::IsMember({8, 16, 32}));
    cmd->add_flag("--unsigned", opts.unsigned_ints, "Lower ints as unsigned");
    cmd->add_option("--real", opts.real, "Float precision for reals")
        ->check(CLI::IsMember({"single", "double"}));
    cmd->add_option("--out", opts.out_dir, "Output directory");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::system_error(errno, std::generic_category(), "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write '" + path.string() + "'");
    out << content;
}

std::string timestamp_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

RunManifest make_manifest(const CommonOpts& opts, uint64_t seed, const std::string& cmdline,
                          const std::vector<std::pair<std::string, std::string>>& files) {
    RunManifest m;
    m.command_line = cmdline;
    m.config = opts.config();
    m.seed = seed;
    m.timestamp = timestamp_now();
    for (const auto& [path, content] : files) m.input_hashes.emplace_back(path, fnv1a64_hex(content));
    return m;
}

void print_warnings(const Contract& c, const std::string& file) {
    for (const auto& w : c.warnings) std::cerr << w.render(file) << "\n";
}

int report_compile_error(const CompileError& e, const std::string& file) {
    bool wf = false;
    for (const auto& d : e.diagnostics()) {
        std::cerr << d.render(file) << "\n";
        wf |= d.code == DiagCode::UnguardedPre || d.code == DiagCode::NestedPreWithoutArrow ||
              d.code == DiagCode::CombinationalCycle;
    }
    return wf ? kWellformedness : kParseType;
}

// Parses "NAME=v1,v2,..." domain overrides against the bound input columns.
InputDomains build_domains(const HarnessBinding& binding,
                           const std::vector<std::string>& domain_flags) {
    InputDomains d = default_domains(binding);
    for (const auto& flag : domain_flags) {
        size_t eq = flag.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--domain", "expected NAME=v1,v2,... in '" + flag + "'");
        std::string name = flag.substr(0, eq);
        std::string rest = flag.substr(eq + 1);
        bool found = false;
        for (size_t i = 0; i < d.columns.size(); ++i) {
            if (d.columns[i].path != name) continue;
            found = true;
            d.values[i].clear();
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ','))
                d.values[i].push_back(parse_scalar(item, d.columns[i].type, false));
            if (d.values[i].empty())
                throw CLI::ValidationError("--domain", "empty domain for '" + name + "'");
        }
        if (!found) throw CLI::ValidationError("--domain", "unknown input signal '" + name + "'");
    }
    return d;
}

nlohmann::ordered_json verdict_json(const CheckResult& r) {
    nlohmann::ordered_json j;
    j["passed"] = r.passed;
    j["exhausted"] = r.exhausted;
    j["explored"] = r.explored;
    j["vacuous_prefixes"] = r.vacuous_prefixes;
    if (r.counterexample) {
        j["counterexample"] = {{"label", r.counterexample->label},
                               {"step", r.counterexample->step},
                               {"trace_steps", r.counterexample->inputs.steps.size()}};
    }
    return j;
}

std::string quoted_cmdline(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += " ";
        out += argv[i];
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contract-to-observer compiler and verification workbench"};
    app.require_subcommand(1);
    std::string cmdline = quoted_cmdline(argc, argv);

    // ---- compile
    auto* compile_cmd = app.add_subcommand("compile", "Compile a contract and emit observer code");
    CommonOpts compile_opts;
    std::string compile_file;
    std::vector<std::string> emit_targets;
    bool dump_ir = false;
    compile_cmd->add_option("file", compile_file, "Contract file (.agc)")->required();
    compile_cmd->add_option("--emit", emit_targets, "Targets: osl, json, matlab")
        ->check(CLI::IsMember({"osl", "json", "matlab"}));
    compile_cmd->add_flag("--dump-ir", dump_ir, "Write the dataflow IR as deterministic JSON");
    add_type_flags(compile_cmd, compile_opts);

    // ---- verify
    auto* verify_cmd = app.add_subcommand("verify", "Check a design model against a contract");
    CommonOpts verify_opts;
    std::string verify_contract, verify_model, verify_mode = "bounded";
    size_t verify_depth = 6;
    uint64_t verify_trials = 1000, verify_seed = 0;
    std::vector<std::string> verify_domains;
    uint64_t verify_budget = 0;
    verify_cmd->add_option("contract", verify_contract, "Contract file (.agc)")->required();
    verify_cmd->add_option("model", verify_model, "Design model (.agc file or builtin:NAME)")->required();
    verify_cmd->add_option("--mode", verify_mode, "bounded | random")
        ->check(CLI::IsMember({"bounded", "random"}));
    verify_cmd->add_option("--depth", verify_depth, "Trace depth");
    verify_cmd->add_option("--trials", verify_trials, "Random trials");
    verify_cmd->add_option("--seed", verify_seed, "Random seed");
    verify_cmd->add_option("--domain", verify_domains, "Input domain NAME=v1,v2,... (repeatable)");
    verify_cmd->add_option("--budget", verify_budget, "Bounded mode: stop after this many steps (0 = unlimited)");
    verify_cmd->add_option("--jobs", verify_opts.jobs, "Worker threads");
    add_type_flags(verify_cmd, verify_opts);

    // ---- diff
    auto* diff_cmd = app.add_subcommand("diff", "Differential oracle/observer equivalence check");
    CommonOpts diff_opts;
    std::string diff_file;
    uint64_t diff_trials = 1000, diff_seed = 0;
    size_t diff_depth = 10;
    int64_t diff_range = 3;
    diff_cmd->add_option("contract", diff_file, "Contract file (.agc)")->required();
    diff_cmd->add_option("--trials", diff_trials, "Random (trace) trials");
    diff_cmd->add_option("--depth", diff_depth, "Maximum trace depth");
    diff_cmd->add_option("--seed", diff_seed, "Random seed");
    diff_cmd->add_option("--int-range", diff_range, "Magnitude bound for sampled ints");
    diff_cmd->add_option("--jobs", diff_opts.jobs, "Worker threads");
    add_type_flags(diff_cmd, diff_opts);

    // ---- run
    auto* run_cmd = app.add_subcommand("run", "Replay a trace against an observer (and model)");
    CommonOpts run_opts;
    std::string run_contract, run_trace, run_model;
    run_cmd->add_option("contract", run_contract, "Contract file (.agc)")->required();
    run_cmd->add_option("--trace", run_trace, "Trace file (.csv or .json)")->required();
    run_cmd->add_option("--model", run_model, "Optional design model; trace then binds inputs only");
    add_type_flags(run_cmd, run_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*compile_cmd) {
            std::string source;
            try {
                source = read_file(compile_file);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kUsage;
            }
            TypeConfig cfg = compile_opts.config();
            Contract contract;
            ObserverProgram prog;
            DataflowIR ir;
            try {
                contract = parse_contract(source);
                print_warnings(contract, compile_file);
                require_wellformed(contract);
                ir = normalize(contract);
                prog = lower(ir, cfg);
            } catch (const CompileError& e) {
                return report_compile_error(e, compile_file);
            }
            // render everything first; only then touch the filesystem
            std::vector<std::pair<std::string, std::string>> outputs;
            std::string stem = fs::path(compile_file).stem().string();
            for (const auto& target : emit_targets) {
                if (target == "osl") outputs.emplace_back(stem + ".osl", emit(prog, EmitTarget::Osl));
                if (target == "json") outputs.emplace_back(stem + ".osl.json", emit(prog, EmitTarget::Json));
                if (target == "matlab")
                    outputs.emplace_back(stem + ".m", emit(prog, EmitTarget::MatlabCompatible));
            }
            if (dump_ir) outputs.emplace_back(stem + ".ir.json", ir_to_json(ir));
            fs::create_directories(compile_opts.out_dir);
            for (const auto& [name, content] : outputs) {
                fs::path path = fs::path(compile_opts.out_dir) / name;
                write_file(path, content);
                std::cout << path.string() << "\n";
            }
            return kOk;
        }

        if (*verify_cmd) {
            std::string contract_src, model_src;
            try {
                contract_src = read_file(verify_contract);
                if (verify_model.rfind("builtin:", 0) != 0) model_src = read_file(verify_model);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kUsage;
            }
            TypeConfig cfg = verify_opts.config();
            HarnessBinding binding;
            try {
                Contract contract = parse_contract(contract_src);
                print_warnings(contract, verify_contract);
                ObserverProgram obs = compile_observer(contract, cfg);
                DesignModel model =
                    verify_model.rfind("builtin:", 0) == 0
                        ? DesignModel::builtin(verify_model.substr(8), contract, cfg)
                        : DesignModel::from_contract(parse_contract(model_src), cfg);
                binding = bind(std::move(obs), std::move(model));
            } catch (const InterfaceMismatch& e) {
                std::cerr << e.what() << "\n";
                return kInterfaceMismatch;
            } catch (const CompileError& e) {
                return report_compile_error(e, verify_contract);
            }
            for (const auto& w : binding.warnings) std::cerr << "warning: " << w.render() << "\n";

            InputDomains domains = build_domains(binding, verify_domains);
            CheckResult result =
                verify_mode == "bounded"
                    ? check_bounded(binding, verify_depth, domains,
                                    verify_budget == 0 ? UINT64_MAX : verify_budget)
                    : check_random(binding, verify_trials, verify_depth, domains, verify_seed,
                                   verify_opts.effective_jobs());

            fs::create_directories(verify_opts.out_dir);
            RunManifest manifest = make_manifest(
                verify_opts, verify_seed, cmdline,
                {{verify_contract, contract_src}, {verify_model, model_src}});
            nlohmann::ordered_json j;
            j["manifest"] = nlohmann::ordered_json::parse(manifest.to_json_fragment());
            j["mode"] = verify_mode;
            j["depth"] = verify_depth;
            j["result"] = verdict_json(result);
            std::string stem = fs::path(verify_contract).stem().string();
            write_file(fs::path(verify_opts.out_dir) / (stem + ".verify.json"), j.dump(2) + "\n");

            if (result.passed) {
                std::cout << (result.exhausted ? "PASS" : "PASS (partial, budget reached)")
                          << ": explored " << result.explored << " trace(s), "
                          << result.vacuous_prefixes << " vacuous prefix(es)\n";
                std::cout << "all guarantees hold on the explored traces\n";
                return kOk;
            }
            const Counterexample& ce = *result.counterexample;
            fs::path trace_path = fs::path(verify_opts.out_dir) / (stem + ".counterexample.csv");
            write_file(trace_path, write_trace_csv(binding.observer, ce.inputs));
            std::cout << "FAIL: guarantee \"" << ce.label << "\" violated at step " << ce.step << "\n";
            std::cout << "counterexample written to " << trace_path.string() << "\n";
            std::cout << ce.rendered;
            return kCounterexample;
        }

        if (*diff_cmd) {
            std::string source;
            try {
                source = read_file(diff_file);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kUsage;
            }
            TypeConfig cfg = diff_opts.config();
            DiffReport report;
            try {
                Contract contract = parse_contract(source);
                print_warnings(contract, diff_file);
                report = diff(contract, cfg, diff_trials, diff_depth, diff_seed,
                              diff_opts.effective_jobs(), diff_range);
            } catch (const CompileError& e) {
                return report_compile_error(e, diff_file);
            }
            RunManifest manifest = make_manifest(diff_opts, diff_seed, cmdline, {{diff_file, source}});
            nlohmann::ordered_json j;
            j["manifest"] = nlohmann::ordered_json::parse(manifest.to_json_fragment());
            j["trials"] = report.trials;
            j["depth"] = report.depth;
            j["int_range"] = diff_range;
            j["counts"] = nlohmann::ordered_json::object();
            for (const auto& [cls, n] : report.counts) j["counts"][divergence_class_name(cls)] = n;
            j["divergences"] = nlohmann::ordered_json::array();
            for (const auto& d : report.divergences)
                j["divergences"].push_back({{"class", divergence_class_name(d.cls)},
                                            {"trial", d.trial},
                                            {"step", d.step},
                                            {"subject", d.subject},
                                            {"detail", d.detail}});
            fs::create_directories(diff_opts.out_dir);
            std::string stem = fs::path(diff_file).stem().string();
            write_file(fs::path(diff_opts.out_dir) / (stem + ".diff.json"), j.dump(2) + "\n");

            std::cout << "trials: " << report.trials << "\n";
            if (report.counts.empty()) std::cout << "no divergences\n";
            for (const auto& [cls, n] : report.counts)
                std::cout << divergence_class_name(cls) << ": " << n << "\n";
            return report.translation_bugs() == 0 ? kOk : kCounterexample;
        }

        if (*run_cmd) {
            std::string contract_src, trace_src, model_src;
            try {
                contract_src = read_file(run_contract);
                trace_src = read_file(run_trace);
                if (!run_model.empty() && run_model.rfind("builtin:", 0) != 0)
                    model_src = read_file(run_model);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kUsage;
            }
            TypeConfig cfg = run_opts.config();
            try {
                Contract contract = parse_contract(contract_src);
                print_warnings(contract, run_contract);
                ObserverProgram obs = compile_observer(contract, cfg);
                bool json_trace = fs::path(run_trace).extension() == ".json";
                if (run_model.empty()) {
                    TraceData trace = json_trace ? parse_trace_json(trace_src, obs)
                                                 : parse_trace_csv(trace_src, obs);
                    auto verdicts = run_observer(obs, trace);
                    bool ok = true;
                    for (size_t s = 0; s < verdicts.size(); ++s) {
                        std::cout << "step " << s << ":";
                        for (const auto& [label, v] : verdicts[s].assumes)
                            std::cout << " assume \"" << label << "\"=" << (v ? "T" : "F");
                        for (const auto& [label, v] : verdicts[s].proves)
                            std::cout << " prove \"" << label << "\"=" << (v ? "T" : "F");
                        if (verdicts[s].vacuous) std::cout << " (vacuous)";
                        std::cout << "\n";
                        if (!verdicts[s].vacuous)
                            for (const auto& [_, v] : verdicts[s].proves) ok &= v;
                    }
                    return ok ? kOk : kCounterexample;
                }
                DesignModel model = run_model.rfind("builtin:", 0) == 0
                                        ? DesignModel::builtin(run_model.substr(8), contract, cfg)
                                        : DesignModel::from_contract(parse_contract(model_src), cfg);
                HarnessBinding binding = bind(std::move(obs), std::move(model));
                TraceData trace = json_trace
                                      ? parse_trace_json(trace_src, binding.observer, false,
                                                         TraceCoverage::InputsOnly)
                                      : parse_trace_csv(trace_src, binding.observer, false,
                                                        TraceCoverage::InputsOnly);
                ReplayResult rr = replay(binding, trace);
                for (size_t s = 0; s < rr.verdicts.size(); ++s) {
                    std::cout << "step " << s << ":";
                    for (const auto& [label, v] : rr.verdicts[s].proves)
                        std::cout << " prove \"" << label << "\"=" << (v ? "T" : "F");
                    if (rr.verdicts[s].vacuous) std::cout << " (vacuous)";
                    std::cout << "\n";
                }
                if (rr.first_violation) {
                    std::cout << "violation: \"" << rr.first_violation->first << "\" at step "
                              << rr.first_violation->second << "\n";
                    return kCounterexample;
                }
                std::cout << "all guarantees hold\n";
                return kOk;
            } catch (const InterfaceMismatch& e) {
                std::cerr << e.what() << "\n";
                return kInterfaceMismatch;
            } catch (const CompileError& e) {
                return report_compile_error(e, run_contract);
            }
        }
    } catch (const TrapError& e) {
        std::cerr << "runtime trap at step " << e.step() << ": " << e.what() << "\n";
        return kInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
