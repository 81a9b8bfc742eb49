#include "c2o/normalize.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace c2o {

namespace {

[[noreturn]] void fail(DiagCode code, Span sp, std::string msg) {
    throw CompileError(Diagnostic{Severity::Error, code, sp, std::move(msg)});
}

ExprPtr substitute(const ExprPtr& e, const std::unordered_map<std::string, ExprPtr>& env) {
    if (auto* v = e->as<VarRef>()) {
        auto it = env.find(v->name);
        if (it == env.end())
            fail(DiagCode::InternalError, e->span, "node body references non-parameter '" + v->name + "'");
        return it->second;
    }
    if (e->as<BoolLit>() || e->as<IntLit>() || e->as<RealLit>()) return e;
    if (auto* f = e->as<FieldSelect>())
        return make_expr(FieldSelect{substitute(f->base, env), f->field}, e->span, e->type);
    if (auto* u = e->as<Unary>())
        return make_expr(Unary{u->op, substitute(u->operand, env)}, e->span, e->type);
    if (auto* b = e->as<Binary>())
        return make_expr(Binary{b->op, substitute(b->lhs, env), substitute(b->rhs, env)}, e->span, e->type);
    if (auto* i = e->as<Ite>())
        return make_expr(Ite{substitute(i->cond, env), substitute(i->then_branch, env),
                             substitute(i->else_branch, env)},
                         e->span, e->type);
    if (auto* a = e->as<Arrow>())
        return make_expr(Arrow{substitute(a->init, env), substitute(a->rest, env)}, e->span, e->type);
    if (auto* p = e->as<Pre>()) return make_expr(Pre{substitute(p->operand, env)}, e->span, e->type);
    fail(DiagCode::InternalError, e->span, "call survived inlining");
}

struct Inliner {
    const Contract& c;
    std::unordered_map<std::string, ExprPtr> done;    // node -> fully inlined body
    std::unordered_map<std::string, int> state;       // 0 fresh, 1 visiting
    std::vector<std::string> stack;

    explicit Inliner(const Contract& contract) : c(contract) {}

    ExprPtr body_of(const std::string& name, Span at) {
        auto hit = done.find(name);
        if (hit != done.end()) return hit->second;
        const NodeDef* nd = c.find_node(name);
        if (!nd) fail(DiagCode::UnresolvedIdentifier, at, "unknown node '" + name + "'");
        if (state[name] == 1) {
            std::string cycle;
            auto it = std::find(stack.begin(), stack.end(), name);
            for (; it != stack.end(); ++it) cycle += *it + " -> ";
            cycle += name;
            fail(DiagCode::RecursiveNode, at, "recursive node cycle: " + cycle);
        }
        state[name] = 1;
        stack.push_back(name);
        ExprPtr inlined = walk(nd->body);
        stack.pop_back();
        state[name] = 0;
        done[name] = inlined;
        return inlined;
    }

    ExprPtr walk(const ExprPtr& e) {
        if (e->as<BoolLit>() || e->as<IntLit>() || e->as<RealLit>() || e->as<VarRef>()) return e;
        if (auto* f = e->as<FieldSelect>())
            return make_expr(FieldSelect{walk(f->base), f->field}, e->span, e->type);
        if (auto* u = e->as<Unary>()) return make_expr(Unary{u->op, walk(u->operand)}, e->span, e->type);
        if (auto* b = e->as<Binary>())
            return make_expr(Binary{b->op, walk(b->lhs), walk(b->rhs)}, e->span, e->type);
        if (auto* i = e->as<Ite>())
            return make_expr(Ite{walk(i->cond), walk(i->then_branch), walk(i->else_branch)}, e->span, e->type);
        if (auto* a = e->as<Arrow>()) return make_expr(Arrow{walk(a->init), walk(a->rest)}, e->span, e->type);
        if (auto* p = e->as<Pre>()) return make_expr(Pre{walk(p->operand)}, e->span, e->type);
        auto* call = e->as<Call>();
        const NodeDef* nd = c.find_node(call->callee);
        if (!nd) fail(DiagCode::UnresolvedIdentifier, e->span, "unknown node '" + call->callee + "'");
        ExprPtr body = body_of(call->callee, e->span);
        std::unordered_map<std::string, ExprPtr> env;
        for (size_t k = 0; k < nd->params.size(); ++k) env[nd->params[k].first] = walk(call->args[k]);
        return substitute(body, env);
    }
};

// Allocates "__t<n>" locals, skipping any names already present.
struct FreshNames {
    std::unordered_set<std::string> taken;
    int next = 0;
    std::string make() {
        for (;;) {
            std::string name = "__t" + std::to_string(next++);
            if (taken.insert(name).second) return name;
        }
    }
};

std::unordered_set<std::string> all_names(const Contract& c) {
    std::unordered_set<std::string> names;
    for (const auto& p : c.inputs) names.insert(p.name);
    for (const auto& p : c.outputs) names.insert(p.name);
    for (const auto& e : c.eqs) names.insert(e.name);
    return names;
}

struct Decoupler {
    FreshNames fresh;
    std::map<std::string, std::string> canon_to_local;
    std::vector<EqDef> hoisted;

    ExprPtr hoist(const ExprPtr& operand) {
        std::string key = canonical_expr(operand);
        auto it = canon_to_local.find(key);
        if (it != canon_to_local.end())
            return make_expr(VarRef{it->second}, operand->span, operand->type);
        std::string name = fresh.make();
        hoisted.push_back(EqDef{name, operand->type, operand, operand->span, false});
        canon_to_local.emplace(std::move(key), name);
        return make_expr(VarRef{name}, operand->span, operand->type);
    }

    ExprPtr maybe_hoist(const ExprPtr& operand) {
        return expr_contains_temporal(operand) ? hoist(operand) : operand;
    }

    ExprPtr walk(const ExprPtr& e) {
        if (e->as<BoolLit>() || e->as<IntLit>() || e->as<RealLit>() || e->as<VarRef>()) return e;
        if (auto* f = e->as<FieldSelect>())
            return make_expr(FieldSelect{walk(f->base), f->field}, e->span, e->type);
        if (auto* u = e->as<Unary>()) return make_expr(Unary{u->op, walk(u->operand)}, e->span, e->type);
        if (auto* b = e->as<Binary>())
            return make_expr(Binary{b->op, walk(b->lhs), walk(b->rhs)}, e->span, e->type);
        if (auto* i = e->as<Ite>())
            return make_expr(Ite{walk(i->cond), walk(i->then_branch), walk(i->else_branch)}, e->span, e->type);
        if (auto* a = e->as<Arrow>())
            return make_expr(Arrow{maybe_hoist(walk(a->init)), maybe_hoist(walk(a->rest))}, e->span, e->type);
        if (auto* p = e->as<Pre>())
            return make_expr(Pre{maybe_hoist(walk(p->operand))}, e->span, e->type);
        fail(DiagCode::InternalError, e->span, "node call reached decoupling; run inline_nodes first");
    }
};

void free_vars(const ExprPtr& e, bool skip_pre, std::set<std::string>& out) {
    if (auto* v = e->as<VarRef>()) {
        out.insert(v->name);
    } else if (auto* f = e->as<FieldSelect>()) {
        free_vars(f->base, skip_pre, out);
    } else if (auto* u = e->as<Unary>()) {
        free_vars(u->operand, skip_pre, out);
    } else if (auto* b = e->as<Binary>()) {
        free_vars(b->lhs, skip_pre, out);
        free_vars(b->rhs, skip_pre, out);
    } else if (auto* i = e->as<Ite>()) {
        free_vars(i->cond, skip_pre, out);
        free_vars(i->then_branch, skip_pre, out);
        free_vars(i->else_branch, skip_pre, out);
    } else if (auto* a = e->as<Arrow>()) {
        free_vars(a->init, skip_pre, out);
        free_vars(a->rest, skip_pre, out);
    } else if (auto* p = e->as<Pre>()) {
        if (!skip_pre) free_vars(p->operand, skip_pre, out);
    } else if (auto* c = e->as<Call>()) {
        for (const auto& arg : c->args) free_vars(arg, skip_pre, out);
    }
}

void collect_pre(const ExprPtr& e, DataflowIR& ir, std::map<std::string, size_t>& index) {
    if (auto* p = e->as<Pre>()) {
        std::string key = canonical_expr(p->operand);
        if (!index.count(key)) {
            std::string id;
            if (auto* v = p->operand->as<VarRef>()) id = "pre_" + v->name;
            else id = "pre_expr" + std::to_string(ir.pre_table.size());
            index[key] = ir.pre_table.size();
            ir.pre_table.push_back(DataflowIR::PreEntry{key, p->operand, std::move(id)});
        }
        collect_pre(p->operand, ir, index);
        return;
    }
    if (auto* f = e->as<FieldSelect>()) collect_pre(f->base, ir, index);
    else if (auto* u = e->as<Unary>()) collect_pre(u->operand, ir, index);
    else if (auto* b = e->as<Binary>()) {
        collect_pre(b->lhs, ir, index);
        collect_pre(b->rhs, ir, index);
    } else if (auto* i = e->as<Ite>()) {
        collect_pre(i->cond, ir, index);
        collect_pre(i->then_branch, ir, index);
        collect_pre(i->else_branch, ir, index);
    } else if (auto* a = e->as<Arrow>()) {
        collect_pre(a->init, ir, index);
        collect_pre(a->rest, ir, index);
    }
}

} // namespace

Contract inline_nodes(const Contract& c) {
    Contract out = c;
    Inliner inliner(c);
    for (auto& e : out.eqs) e.expr = inliner.walk(e.expr);
    for (auto& a : out.assumes) a.expr = inliner.walk(a.expr);
    for (auto& g : out.guarantees) g.expr = inliner.walk(g.expr);
    out.nodes.clear();
    return out;
}

Contract decouple_temporal(const Contract& c) {
    Contract out = c;
    Decoupler d;
    d.fresh.taken = all_names(c);
    for (auto& e : out.eqs) e.expr = d.walk(e.expr);
    for (auto& a : out.assumes) a.expr = d.walk(a.expr);
    for (auto& g : out.guarantees) g.expr = d.walk(g.expr);
    for (auto& h : d.hoisted) out.eqs.push_back(std::move(h));
    return out;
}

DataflowIR order_dataflow(const Contract& c) {
    DataflowIR ir;
    ir.component = c.name;
    ir.records = c.records;
    ir.inputs = c.inputs;
    ir.outputs = c.outputs;

    std::vector<DataflowIR::Local> locals;
    for (const auto& e : c.eqs)
        locals.push_back(DataflowIR::Local{e.name, e.type, e.expr, e.defines_output,
                                           e.name.rfind("__t", 0) == 0});

    // One Boolean local per label so codegen emits a single intrinsic per label.
    FreshNames fresh;
    fresh.taken = all_names(c);
    std::map<std::string, std::string> canon_to_synth;
    for (const auto& l : locals)
        if (l.synthetic) canon_to_synth[canonical_expr(l.expr)] = l.name;
    auto hoist_label = [&](const LabeledExpr& le) -> std::string {
        if (auto* v = le.expr->as<VarRef>()) return v->name; // already a named local
        std::string key = canonical_expr(le.expr);
        auto it = canon_to_synth.find(key);
        if (it != canon_to_synth.end()) return it->second;
        std::string name = fresh.make();
        locals.push_back(DataflowIR::Local{name, SemType::boolean(), le.expr, false, true});
        canon_to_synth.emplace(std::move(key), name);
        return name;
    };
    for (const auto& a : c.assumes) ir.assumes.push_back({a.label, hoist_label(a)});
    for (const auto& g : c.guarantees) ir.guarantees.push_back({g.label, hoist_label(g)});

    // Topological order over same-step dependencies; `pre` reads depend on the
    // previous step and do not constrain ordering.
    std::unordered_map<std::string, size_t> by_name;
    for (size_t i = 0; i < locals.size(); ++i) by_name[locals[i].name] = i;

    std::vector<std::vector<size_t>> succs(locals.size());
    std::vector<size_t> indegree(locals.size(), 0);
    std::vector<std::set<std::string>> deps(locals.size());
    for (size_t i = 0; i < locals.size(); ++i) {
        free_vars(locals[i].expr, /*skip_pre=*/true, deps[i]);
        for (const auto& d : deps[i]) {
            auto it = by_name.find(d);
            if (it == by_name.end()) continue; // input or (free) output parameter
            succs[it->second].push_back(i);
            ++indegree[i];
        }
    }
    // Kahn's algorithm, smallest original index first for determinism.
    std::set<size_t> ready;
    for (size_t i = 0; i < locals.size(); ++i)
        if (indegree[i] == 0) ready.insert(i);
    std::vector<size_t> order;
    while (!ready.empty()) {
        size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (size_t s : succs[i])
            if (--indegree[s] == 0) ready.insert(s);
    }
    if (order.size() != locals.size()) {
        // Extract one cycle among the unsorted remainder for the error message.
        std::vector<std::string> cycle;
        std::unordered_set<size_t> remaining;
        for (size_t i = 0; i < locals.size(); ++i)
            if (indegree[i] > 0) remaining.insert(i);
        size_t cur = *remaining.begin();
        std::unordered_map<size_t, size_t> visited_at;
        std::vector<size_t> path;
        while (!visited_at.count(cur)) {
            visited_at[cur] = path.size();
            path.push_back(cur);
            for (const auto& d : deps[cur]) {
                auto it = by_name.find(d);
                if (it != by_name.end() && remaining.count(it->second)) {
                    cur = it->second;
                    break;
                }
            }
        }
        std::string names;
        for (size_t k = visited_at[cur]; k < path.size(); ++k)
            names += (names.empty() ? "" : ", ") + locals[path[k]].name;
        fail(DiagCode::CombinationalCycle, locals[cur].expr->span,
             "combinational cycle among: " + names);
    }
    for (size_t i : order) ir.locals.push_back(locals[i]);

    std::map<std::string, size_t> pre_index;
    for (const auto& l : ir.locals) collect_pre(l.expr, ir, pre_index);
    return ir;
}

DataflowIR normalize(const Contract& c) { return order_dataflow(decouple_temporal(inline_nodes(c))); }

Contract ir_to_contract(const DataflowIR& ir) {
    Contract c;
    c.name = ir.component;
    c.records = ir.records;
    c.inputs = ir.inputs;
    c.outputs = ir.outputs;
    for (const auto& l : ir.locals)
        c.eqs.push_back(EqDef{l.name, l.type, l.expr, l.expr->span, l.is_output});
    auto ref = [&](const DataflowIR::LabeledRef& r) -> LabeledExpr {
        for (const auto& l : ir.locals)
            if (l.name == r.local)
                return LabeledExpr{r.label, make_expr(VarRef{r.local}, l.expr->span, l.type), l.expr->span};
        throw CompileError(Diagnostic{Severity::Error, DiagCode::InternalError, {},
                                      "label references unknown local '" + r.local + "'"});
    };
    for (const auto& a : ir.assumes) c.assumes.push_back(ref(a));
    for (const auto& g : ir.guarantees) c.guarantees.push_back(ref(g));
    return c;
}

std::string ir_to_json(const DataflowIR& ir) {
    using json = nlohmann::ordered_json;
    json j;
    j["component"] = ir.component;
    j["records"] = json::array();
    for (const auto& rd : ir.records.decls) {
        json r;
        r["name"] = rd.name;
        r["fields"] = json::array();
        for (const auto& [fn, ft] : rd.fields) r["fields"].push_back({{"name", fn}, {"type", ft.to_string()}});
        j["records"].push_back(std::move(r));
    }
    auto ports = [](const std::vector<Port>& ps) {
        json arr = json::array();
        for (const auto& p : ps) arr.push_back({{"name", p.name}, {"type", p.type.to_string()}});
        return arr;
    };
    j["inputs"] = ports(ir.inputs);
    j["outputs"] = ports(ir.outputs);
    j["locals"] = json::array();
    for (const auto& l : ir.locals)
        j["locals"].push_back({{"name", l.name},
                               {"type", l.type.to_string()},
                               {"expr", print_expr(l.expr)},
                               {"is_output", l.is_output},
                               {"synthetic", l.synthetic}});
    auto labels = [](const std::vector<DataflowIR::LabeledRef>& ls) {
        json arr = json::array();
        for (const auto& l : ls) arr.push_back({{"label", l.label}, {"ref", l.local}});
        return arr;
    };
    j["assumes"] = labels(ir.assumes);
    j["guarantees"] = labels(ir.guarantees);
    j["pre_table"] = json::array();
    for (const auto& p : ir.pre_table)
        j["pre_table"].push_back({{"operand", print_expr(p.operand)}, {"id", p.id}});
    return j.dump(2) + "\n";
}

} // namespace c2o
