#include "c2o/interp.hpp"

#include <cmath>

namespace c2o {

bool values_equal(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) {
        // Mixed exact/fixed comparisons appear only in triage mode mixes.
        if (std::holds_alternative<int64_t>(a.v) && std::holds_alternative<BigInt>(b.v))
            return BigInt(a.as_int()) == std::get<BigInt>(b.v);
        if (std::holds_alternative<BigInt>(a.v) && std::holds_alternative<int64_t>(b.v))
            return std::get<BigInt>(a.v) == BigInt(b.as_int());
        return false;
    }
    if (std::holds_alternative<bool>(a.v)) return a.as_bool() == b.as_bool();
    if (std::holds_alternative<int64_t>(a.v)) return a.as_int() == b.as_int();
    if (std::holds_alternative<double>(a.v)) return a.as_float() == b.as_float();
    if (std::holds_alternative<BigInt>(a.v)) return std::get<BigInt>(a.v) == std::get<BigInt>(b.v);
    if (std::holds_alternative<BigRational>(a.v))
        return std::get<BigRational>(a.v) == std::get<BigRational>(b.v);
    const auto& sa = a.as_struct();
    const auto& sb = b.as_struct();
    if (sa->size() != sb->size()) return false;
    for (size_t i = 0; i < sa->size(); ++i)
        if (!values_equal((*sa)[i], (*sb)[i])) return false;
    return true;
}

Value default_value(const LoweredType& t, const ObserverProgram& p, const ExecOptions& opts) {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return Value(true);
        case LoweredType::Kind::FixedInt:
            return opts.ints == IntSemantics::Unbounded ? Value(BigInt(0)) : Value(int64_t{0});
        case LoweredType::Kind::Float:
            return opts.reals == RealSemantics::Exact ? Value(BigRational()) : Value(0.0);
        case LoweredType::Kind::Struct: {
            const StructLayout* layout = p.layout(t.struct_name);
            auto fields = std::make_shared<std::vector<Value>>();
            for (const auto& [fn, ft] : layout->fields) fields->push_back(default_value(ft, p, opts));
            return Value(std::move(fields));
        }
    }
    return Value(false);
}

Interpreter::Interpreter(const ObserverProgram& p, ExecOptions opts)
    : prog_(p), opts_(std::move(opts)) {
    slots_.resize(prog_.slot_count());
    assigned_.assign(prog_.slot_count(), false);
    reset();
}

void Interpreter::reset() {
    persist_.clear();
    persist_.push_back(Value(true)); // first_time
    for (size_t i = 1; i < prog_.persistents.size(); ++i) {
        Value init = opts_.default_overrides.empty()
                         ? default_value(prog_.persistents[i].type, prog_, opts_)
                         : opts_.default_overrides.at(i - 1);
        init.tainted = opts_.taint_defaults;
        persist_.push_back(std::move(init));
    }
    any_assume_failed_ = false;
    step_index_ = 0;
}

int64_t Interpreter::wrap(int64_t raw, const LoweredType& t) const {
    const int w = t.width;
    uint64_t mask = w == 64 ? ~uint64_t{0} : ((uint64_t{1} << w) - 1);
    uint64_t u = static_cast<uint64_t>(raw) & mask;
    if (t.is_signed && (u >> (w - 1)) & 1u) return static_cast<int64_t>(u | ~mask);
    return static_cast<int64_t>(u);
}

Value Interpreter::convert_in(const Value& v, const LoweredType& t) const {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return v;
        case LoweredType::Kind::FixedInt: {
            int64_t raw = std::holds_alternative<BigInt>(v.v) ? std::get<BigInt>(v.v).to_int64() : v.as_int();
            if (opts_.ints == IntSemantics::Unbounded) return Value(BigInt(raw));
            return Value(wrap(raw, t));
        }
        case LoweredType::Kind::Float: {
            if (opts_.reals == RealSemantics::Exact) {
                if (std::holds_alternative<BigRational>(v.v)) return v;
                return Value(BigRational::from_double(v.as_float()));
            }
            double d = std::holds_alternative<BigRational>(v.v) ? std::get<BigRational>(v.v).to_double()
                                                                : v.as_float();
            if (t.precision == FloatPrec::Single) d = static_cast<float>(d);
            return Value(d);
        }
        case LoweredType::Kind::Struct: {
            const StructLayout* layout = prog_.layout(t.struct_name);
            auto fields = std::make_shared<std::vector<Value>>();
            const auto& in = *v.as_struct();
            for (size_t i = 0; i < layout->fields.size(); ++i)
                fields->push_back(convert_in(in.at(i), layout->fields[i].second));
            return Value(std::move(fields));
        }
    }
    return v;
}

namespace {

bool numeric_lt(const Value& a, const Value& b) {
    if (std::holds_alternative<int64_t>(a.v)) return a.as_int() < b.as_int();
    if (std::holds_alternative<double>(a.v)) return a.as_float() < b.as_float();
    if (std::holds_alternative<BigInt>(a.v)) return std::get<BigInt>(a.v) < std::get<BigInt>(b.v);
    return std::get<BigRational>(a.v) < std::get<BigRational>(b.v);
}

bool numeric_le(const Value& a, const Value& b) {
    if (std::holds_alternative<int64_t>(a.v)) return a.as_int() <= b.as_int();
    if (std::holds_alternative<double>(a.v)) return a.as_float() <= b.as_float();
    if (std::holds_alternative<BigInt>(a.v)) return std::get<BigInt>(a.v) <= std::get<BigInt>(b.v);
    return std::get<BigRational>(a.v) <= std::get<BigRational>(b.v);
}

} // namespace

Value Interpreter::eval(const LExprPtr& e) {
    if (auto* b = e->as<LBool>()) return Value(b->value);
    if (auto* i = e->as<LInt>()) {
        if (opts_.ints == IntSemantics::Unbounded) return Value(BigInt(i->value));
        return Value(i->value); // range-checked at lowering
    }
    if (auto* f = e->as<LFloat>()) {
        if (opts_.reals == RealSemantics::Exact) return Value(BigRational::from_decimal_string(f->text));
        return Value(f->value);
    }
    if (auto* v = e->as<LVar>()) {
        if (opts_.check_assign_before_read && !assigned_[v->slot])
            throw std::logic_error("read of unassigned slot '" + v->name + "' at step " +
                                   std::to_string(step_index_));
        return slots_[v->slot];
    }
    if (auto* p = e->as<LPersist>()) return persist_[p->pslot];
    if (auto* s = e->as<LSelect>()) {
        Value base = eval(s->base);
        Value out = (*base.as_struct())[s->field];
        out.tainted = out.tainted || base.tainted;
        return out;
    }
    if (auto* u = e->as<LUnary>()) {
        Value a = eval(u->a);
        if (u->op == LUnKind::Not) {
            Value r(!a.as_bool());
            r.tainted = a.tainted;
            return r;
        }
        Value r;
        if (std::holds_alternative<int64_t>(a.v)) r = Value(wrap(-a.as_int(), e->type));
        else if (std::holds_alternative<double>(a.v)) r = Value(-a.as_float());
        else if (std::holds_alternative<BigInt>(a.v)) r = Value(-std::get<BigInt>(a.v));
        else r = Value(-std::get<BigRational>(a.v));
        r.tainted = a.tainted;
        return r;
    }
    if (auto* b = e->as<LBinary>()) {
        // and/or short-circuit like the target language operators.
        if (b->op == LBinKind::And || b->op == LBinKind::Or) {
            Value a = eval(b->a);
            bool decide = b->op == LBinKind::And ? !a.as_bool() : a.as_bool();
            if (decide) return a;
            Value rhs = eval(b->b);
            rhs.tainted = rhs.tainted || a.tainted;
            return rhs;
        }
        Value a = eval(b->a);
        Value bb = eval(b->b);
        bool taint = a.tainted || bb.tainted;
        Value r;
        switch (b->op) {
            case LBinKind::Add:
            case LBinKind::Sub:
            case LBinKind::Mul: {
                if (std::holds_alternative<int64_t>(a.v)) {
                    uint64_t x = static_cast<uint64_t>(a.as_int());
                    uint64_t y = static_cast<uint64_t>(bb.as_int());
                    uint64_t raw = b->op == LBinKind::Add ? x + y : b->op == LBinKind::Sub ? x - y : x * y;
                    r = Value(wrap(static_cast<int64_t>(raw), e->type));
                } else if (std::holds_alternative<double>(a.v)) {
                    double x = a.as_float(), y = bb.as_float(), d;
                    if (e->type.precision == FloatPrec::Single) {
                        float fx = static_cast<float>(x), fy = static_cast<float>(y);
                        d = b->op == LBinKind::Add ? fx + fy : b->op == LBinKind::Sub ? fx - fy : fx * fy;
                    } else {
                        d = b->op == LBinKind::Add ? x + y : b->op == LBinKind::Sub ? x - y : x * y;
                    }
                    r = Value(d);
                } else if (std::holds_alternative<BigInt>(a.v)) {
                    const auto& x = std::get<BigInt>(a.v);
                    const auto& y = std::get<BigInt>(bb.v);
                    r = Value(b->op == LBinKind::Add ? x + y : b->op == LBinKind::Sub ? x - y : x * y);
                } else {
                    const auto& x = std::get<BigRational>(a.v);
                    const auto& y = std::get<BigRational>(bb.v);
                    r = Value(b->op == LBinKind::Add ? x + y : b->op == LBinKind::Sub ? x - y : x * y);
                }
                break;
            }
            case LBinKind::FDiv: {
                if (std::holds_alternative<BigRational>(a.v)) {
                    if (std::get<BigRational>(bb.v).is_zero())
                        throw TrapError(TrapError::Kind::DivisionByZero, step_index_, false);
                    r = Value(std::get<BigRational>(a.v) / std::get<BigRational>(bb.v));
                } else {
                    if (bb.as_float() == 0.0)
                        throw TrapError(TrapError::Kind::DivisionByZero, step_index_, false);
                    double d;
                    if (e->type.precision == FloatPrec::Single)
                        d = static_cast<float>(a.as_float()) / static_cast<float>(bb.as_float());
                    else
                        d = a.as_float() / bb.as_float();
                    r = Value(d);
                }
                break;
            }
            case LBinKind::IDiv: {
                if (std::holds_alternative<BigInt>(a.v)) {
                    if (std::get<BigInt>(bb.v).is_zero())
                        throw TrapError(TrapError::Kind::DivisionByZero, step_index_, false);
                    r = Value(std::get<BigInt>(a.v).div_trunc(std::get<BigInt>(bb.v)));
                } else {
                    if (bb.as_int() == 0) throw TrapError(TrapError::Kind::DivisionByZero, step_index_, false);
                    r = Value(wrap(a.as_int() / bb.as_int(), e->type)); // truncates toward zero
                }
                break;
            }
            case LBinKind::Lt: r = Value(numeric_lt(a, bb)); break;
            case LBinKind::Le: r = Value(numeric_le(a, bb)); break;
            case LBinKind::Gt: r = Value(numeric_lt(bb, a)); break;
            case LBinKind::Ge: r = Value(numeric_le(bb, a)); break;
            default: throw std::logic_error("unreachable binary op");
        }
        r.tainted = taint;
        return r;
    }
    if (auto* m = e->as<LMod>()) {
        Value a = eval(m->a);
        Value bb = eval(m->b);
        Value r;
        if (std::holds_alternative<BigInt>(a.v)) {
            if (std::get<BigInt>(bb.v).is_zero())
                throw TrapError(TrapError::Kind::ModuloByZero, step_index_, false);
            r = Value(std::get<BigInt>(a.v).mod_divisor_sign(std::get<BigInt>(bb.v)));
        } else {
            int64_t x = a.as_int(), y = bb.as_int();
            if (y == 0) throw TrapError(TrapError::Kind::ModuloByZero, step_index_, false);
            int64_t rem = x % y; // sign of dividend
            if (rem != 0 && (rem < 0) != (y < 0)) rem += y;
            r = Value(wrap(rem, e->type));
        }
        r.tainted = a.tainted || bb.tainted;
        return r;
    }
    if (auto* q = e->as<LIsEqual>()) {
        Value a = eval(q->a);
        Value bb = eval(q->b);
        Value r(q->negated ? !values_equal(a, bb) : values_equal(a, bb));
        r.tainted = a.tainted || bb.tainted;
        return r;
    }
    if (auto* im = e->as<LImplies>()) {
        // impliesFunction: eager arguments, pure result.
        Value a = eval(im->a);
        Value bb = eval(im->b);
        Value r(!a.as_bool() || bb.as_bool());
        r.tainted = a.tainted || bb.tainted;
        return r;
    }
    if (auto* f2 = e->as<LIf>()) {
        // ifFunction: all three arguments evaluate before selection.
        Value cond = eval(f2->cond);
        Value a, bv;
        try {
            a = eval(f2->a);
        } catch (TrapError& t) {
            if (!cond.as_bool()) t.mark_unselected();
            throw;
        }
        try {
            bv = eval(f2->b);
        } catch (TrapError& t) {
            if (cond.as_bool()) t.mark_unselected();
            throw;
        }
        Value r = cond.as_bool() ? a : bv;
        r.tainted = r.tainted || cond.tainted;
        return r;
    }
    if (auto* ar = e->as<LArrow>()) {
        // arrowFunction(first_time, a, b): eager arguments, selection by flag.
        bool first = persist_[0].as_bool();
        Value a, bv;
        try {
            a = eval(ar->a);
        } catch (TrapError& t) {
            if (!first) t.mark_unselected();
            throw;
        }
        try {
            bv = eval(ar->b);
        } catch (TrapError& t) {
            if (first) t.mark_unselected();
            throw;
        }
        return first ? a : bv;
    }
    throw std::logic_error("unhandled lowered expression");
}

StepVerdict Interpreter::step(const std::vector<Value>& param_values) {
    if (param_values.size() != prog_.params.size())
        throw std::invalid_argument("step expects " + std::to_string(prog_.params.size()) + " parameter values");
    for (size_t i = 0; i < param_values.size(); ++i) {
        slots_[i] = convert_in(param_values[i], prog_.params[i].type);
        assigned_[i] = true;
    }
    for (size_t i = prog_.params.size(); i < assigned_.size(); ++i) assigned_[i] = false;

    StepVerdict verdict;
    std::vector<std::pair<size_t, Value>> pending_updates;
    for (const auto& st : prog_.body) {
        if (auto* a = std::get_if<SAssign>(&st)) {
            slots_[a->slot] = eval(a->expr);
            assigned_[a->slot] = true;
        } else if (auto* as = std::get_if<SAssume>(&st)) {
            Value v = eval(as->arg);
            if (v.tainted) verdict.taint_leak = true;
            verdict.assumes.emplace_back(as->label, v.as_bool());
            if (!v.as_bool()) any_assume_failed_ = true;
        } else if (auto* pr = std::get_if<SProve>(&st)) {
            Value v = eval(pr->arg);
            if (v.tainted) verdict.taint_leak = true;
            verdict.proves.emplace_back(pr->label, v.as_bool());
        } else if (auto* u = std::get_if<SUpdate>(&st)) {
            pending_updates.emplace_back(u->pslot, eval(u->expr));
        } else {
            // first_time := false happens after the updates are applied.
        }
    }
    for (auto& [pslot, v] : pending_updates) persist_[pslot] = std::move(v);
    persist_[0] = Value(false);
    verdict.vacuous = any_assume_failed_;
    ++step_index_;
    return verdict;
}

std::vector<StepVerdict> Interpreter::run(const TraceData& trace) {
    reset();
    std::vector<StepVerdict> out;
    out.reserve(trace.size());
    for (const auto& step_values : trace.steps) out.push_back(step(step_values));
    return out;
}

std::vector<Value> Interpreter::model_outputs() const {
    std::vector<Value> out;
    for (size_t i = 0; i < prog_.locals.size(); ++i)
        if (prog_.locals[i].is_model_output) out.push_back(slots_[prog_.params.size() + i]);
    return out;
}

const Value& Interpreter::value_of(const std::string& name) const {
    auto slot = prog_.slot_of(name);
    if (!slot) throw std::invalid_argument("no parameter or local named '" + name + "'");
    return slots_[*slot];
}

std::vector<StepVerdict> run_observer(const ObserverProgram& p, const TraceData& trace, ExecOptions opts) {
    Interpreter interp(p, std::move(opts));
    return interp.run(trace);
}

} // namespace c2o
