#include "c2o/oracle.hpp"

namespace c2o {

bool oracle_values_equal(const OracleValue& a, const OracleValue& b) {
    if (a.v.index() != b.v.index()) return false;
    if (a.is_bottom()) return true;
    if (std::holds_alternative<bool>(a.v)) return a.as_bool() == b.as_bool();
    if (std::holds_alternative<BigInt>(a.v)) return a.as_int() == b.as_int();
    if (std::holds_alternative<BigRational>(a.v)) return a.as_real() == b.as_real();
    const auto& sa = std::get<OracleValue::Struct>(a.v);
    const auto& sb = std::get<OracleValue::Struct>(b.v);
    if (sa->size() != sb->size()) return false;
    for (size_t i = 0; i < sa->size(); ++i)
        if (!oracle_values_equal((*sa)[i], (*sb)[i])) return false;
    return true;
}

namespace {

OracleValue from_machine(const Value& v) {
    if (std::holds_alternative<bool>(v.v)) return OracleValue(v.as_bool());
    if (std::holds_alternative<int64_t>(v.v)) return OracleValue(BigInt(v.as_int()));
    if (std::holds_alternative<double>(v.v)) return OracleValue(BigRational::from_double(v.as_float()));
    if (std::holds_alternative<BigInt>(v.v)) return OracleValue(std::get<BigInt>(v.v));
    if (std::holds_alternative<BigRational>(v.v)) return OracleValue(std::get<BigRational>(v.v));
    auto out = std::make_shared<std::vector<OracleValue>>();
    for (const auto& f : *v.as_struct()) out->push_back(from_machine(f));
    return OracleValue(std::move(out));
}

struct Env {
    // node parameter -> (argument expression, caller environment)
    std::unordered_map<std::string, std::pair<ExprPtr, const Env*>> bindings;
};

struct Evaluator {
    const Contract& c;
    const TraceData& trace;
    EvalStats* stats;
    // trace rows are aligned with the component interface: inputs then outputs
    std::unordered_map<std::string, size_t> io_index;
    std::unordered_map<std::string, const EqDef*> eqs;
    std::vector<std::unordered_map<std::string, OracleValue>> eq_memo; // per step

    Evaluator(const Contract& c_, const TraceData& trace_, EvalStats* stats_)
        : c(c_), trace(trace_), stats(stats_) {
        for (const auto& p : c.inputs) io_index[p.name] = io_index.size();
        for (const auto& p : c.outputs) io_index[p.name] = io_index.size();
        for (const auto& e : c.eqs) eqs[e.name] = &e;
        eq_memo.resize(trace.size());
    }

    bool is_io(const std::string& name) const {
        for (const auto& p : c.inputs)
            if (p.name == name) return true;
        for (const auto& p : c.outputs)
            if (p.name == name) return true;
        return false;
    }

    OracleValue trace_value(const std::string& name, int t) const {
        auto it = io_index.find(name);
        if (it == io_index.end())
            throw std::invalid_argument("trace does not bind '" + name + "'");
        return from_machine(trace.steps[static_cast<size_t>(t)].at(it->second));
    }

    OracleValue eval(const ExprPtr& e, const Env* env, int t) {
        if (stats) ++stats->counts[e.get()];
        if (auto* b = e->as<BoolLit>()) return OracleValue(b->value);
        if (auto* i = e->as<IntLit>()) return OracleValue(i->value);
        if (auto* r = e->as<RealLit>()) return OracleValue(r->value);
        if (auto* v = e->as<VarRef>()) {
            if (env) {
                auto it = env->bindings.find(v->name);
                if (it != env->bindings.end()) return eval(it->second.first, it->second.second, t);
            }
            auto eq = eqs.find(v->name);
            if (eq != eqs.end()) {
                auto& memo = eq_memo[static_cast<size_t>(t)];
                auto hit = memo.find(v->name);
                if (hit != memo.end()) return hit->second;
                OracleValue val = eval(eq->second->expr, nullptr, t);
                memo.emplace(v->name, val);
                return val;
            }
            return trace_value(v->name, t);
        }
        if (auto* f = e->as<FieldSelect>()) {
            OracleValue base = eval(f->base, env, t);
            if (base.is_bottom()) return {};
            const RecordDecl* rd = c.records.find(f->base->type.record_name);
            for (size_t k = 0; k < rd->fields.size(); ++k)
                if (rd->fields[k].first == f->field) return (*std::get<OracleValue::Struct>(base.v))[k];
            throw std::logic_error("missing field under oracle");
        }
        if (auto* u = e->as<Unary>()) {
            OracleValue a = eval(u->operand, env, t);
            if (a.is_bottom()) return {};
            if (u->op == UnOp::Not) return OracleValue(!a.as_bool());
            if (std::holds_alternative<BigInt>(a.v)) return OracleValue(-a.as_int());
            return OracleValue(-a.as_real());
        }
        if (auto* b = e->as<Binary>()) return eval_binary(*b, env, t);
        if (auto* i = e->as<Ite>()) {
            OracleValue cond = eval(i->cond, env, t);
            if (cond.is_bottom()) return {};
            return eval(cond.as_bool() ? i->then_branch : i->else_branch, env, t); // lazy
        }
        if (auto* a = e->as<Arrow>()) {
            return t == 0 ? eval(a->init, env, 0) : eval(a->rest, env, t);
        }
        if (auto* p = e->as<Pre>()) {
            if (t == 0) return {}; // undefined at the initial state
            return eval(p->operand, env, t - 1);
        }
        auto* call = e->as<Call>();
        const NodeDef* nd = c.find_node(call->callee);
        if (!nd) throw std::logic_error("unknown node under oracle");
        auto child = std::make_unique<Env>();
        for (size_t k = 0; k < nd->params.size(); ++k)
            child->bindings[nd->params[k].first] = {call->args[k], env};
        return eval(nd->body, child.get(), t);
    }

    OracleValue eval_binary(const Binary& b, const Env* env, int t) {
        // and/or mirror the observer's short-circuit operators.
        if (b.op == BinOp::And || b.op == BinOp::Or) {
            OracleValue a = eval(b.lhs, env, t);
            if (a.is_bottom()) return {};
            bool decide = b.op == BinOp::And ? !a.as_bool() : a.as_bool();
            if (decide) return a;
            return eval(b.rhs, env, t);
        }
        OracleValue a = eval(b.lhs, env, t);
        OracleValue r = eval(b.rhs, env, t);
        if (a.is_bottom() || r.is_bottom()) return {};
        switch (b.op) {
            case BinOp::Add:
                if (std::holds_alternative<BigInt>(a.v)) return OracleValue(a.as_int() + r.as_int());
                return OracleValue(a.as_real() + r.as_real());
            case BinOp::Sub:
                if (std::holds_alternative<BigInt>(a.v)) return OracleValue(a.as_int() - r.as_int());
                return OracleValue(a.as_real() - r.as_real());
            case BinOp::Mul:
                if (std::holds_alternative<BigInt>(a.v)) return OracleValue(a.as_int() * r.as_int());
                return OracleValue(a.as_real() * r.as_real());
            case BinOp::RealDiv:
                if (r.as_real().is_zero()) throw OracleTrap(t, "division by zero");
                return OracleValue(a.as_real() / r.as_real());
            case BinOp::IntDiv:
                if (r.as_int().is_zero()) throw OracleTrap(t, "division by zero");
                return OracleValue(a.as_int().div_trunc(r.as_int()));
            case BinOp::Mod:
                if (r.as_int().is_zero()) throw OracleTrap(t, "modulo by zero");
                return OracleValue(a.as_int().mod_divisor_sign(r.as_int()));
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: {
                int cmp = std::holds_alternative<BigInt>(a.v) ? a.as_int().compare(r.as_int())
                                                              : a.as_real().compare(r.as_real());
                switch (b.op) {
                    case BinOp::Lt: return OracleValue(cmp < 0);
                    case BinOp::Le: return OracleValue(cmp <= 0);
                    case BinOp::Gt: return OracleValue(cmp > 0);
                    default: return OracleValue(cmp >= 0);
                }
            }
            case BinOp::Eq: return OracleValue(oracle_values_equal(a, r));
            case BinOp::Ne: return OracleValue(!oracle_values_equal(a, r));
            case BinOp::Implies: return OracleValue(!a.as_bool() || r.as_bool());
            default: throw std::logic_error("unreachable oracle binary");
        }
    }
};

} // namespace

OracleResult oracle_eval(const Contract& c, const TraceData& trace, EvalStats* stats) {
    Evaluator ev(c, trace, stats);
    OracleResult result;
    bool any_assume_failed = false;
    for (int t = 0; t < static_cast<int>(trace.size()); ++t) {
        StepVerdict verdict;
        for (const auto& a : c.assumes) {
            OracleValue v = ev.eval(a.expr, nullptr, t);
            if (v.is_bottom()) throw BottomObserved(t, a.label);
            verdict.assumes.emplace_back(a.label, v.as_bool());
            if (!v.as_bool()) any_assume_failed = true;
        }
        for (const auto& g : c.guarantees) {
            OracleValue v = ev.eval(g.expr, nullptr, t);
            if (v.is_bottom()) throw BottomObserved(t, g.label);
            verdict.proves.emplace_back(g.label, v.as_bool());
        }
        verdict.vacuous = any_assume_failed;
        result.verdicts.push_back(std::move(verdict));

        std::vector<std::pair<std::string, OracleValue>> row;
        for (const auto& eq : c.eqs) {
            if (eq.name.rfind("__t", 0) == 0) continue;
            auto& memo = ev.eq_memo[static_cast<size_t>(t)];
            auto hit = memo.find(eq.name);
            if (hit == memo.end())
                hit = memo.emplace(eq.name, ev.eval(eq.expr, nullptr, t)).first;
            row.emplace_back(eq.name, hit->second);
        }
        result.eq_values.push_back(std::move(row));
    }
    return result;
}

} // namespace c2o
