#include "c2o/lower.hpp"

#include "c2o/parser.hpp"
#include "c2o/wellformed.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace c2o {

LExprPtr make_lexpr(LExprNode node, LoweredType type) {
    auto e = std::make_shared<LExpr>();
    e->node = std::move(node);
    e->type = type;
    return e;
}

LoweredType lower_type(const SemType& t, const TypeConfig& cfg) {
    switch (t.kind) {
        case SemType::Kind::Bool: return LoweredType::boolean();
        case SemType::Kind::Int: return LoweredType::fixed_int(cfg.int_width, cfg.int_signed);
        case SemType::Kind::Real: return LoweredType::floating(cfg.float_precision);
        case SemType::Kind::Record: return LoweredType::structure(t.record_name);
        case SemType::Kind::Unknown: break;
    }
    throw CompileError(Diagnostic{Severity::Error, DiagCode::InternalError, {}, "untyped expression reached lowering"});
}

ObserverInterface interface_of(const Contract& c) {
    ObserverInterface iface;
    for (const auto& p : c.inputs) iface.entries.push_back({p.name, p.type, false});
    for (const auto& p : c.outputs) iface.entries.push_back({p.name, p.type, true});
    return iface;
}

namespace {

[[noreturn]] void fail(DiagCode code, Span sp, std::string msg) {
    throw CompileError(Diagnostic{Severity::Error, code, sp, std::move(msg)});
}

struct Lowerer {
    const DataflowIR& ir;
    const TypeConfig& cfg;
    ObserverProgram prog;
    std::unordered_map<std::string, size_t> pre_slot; // canonical key -> persistent slot
    std::unordered_set<std::string> names_taken;

    Lowerer(const DataflowIR& ir_, const TypeConfig& cfg_) : ir(ir_), cfg(cfg_) {}

    std::string unique_name(const std::string& wanted) {
        if (names_taken.insert(wanted).second) return wanted;
        for (int n = 1;; ++n) {
            std::string cand = wanted + "_" + std::to_string(n);
            if (names_taken.insert(cand).second) return cand;
        }
    }

    void check_int_range(const BigInt& v, Span sp) const {
        BigInt lo = cfg.int_signed ? -BigInt::pow2(static_cast<unsigned>(cfg.int_width - 1)) : BigInt(0);
        BigInt hi = (cfg.int_signed ? BigInt::pow2(static_cast<unsigned>(cfg.int_width - 1))
                                    : BigInt::pow2(static_cast<unsigned>(cfg.int_width))) - BigInt(1);
        if (v < lo || v > hi)
            fail(DiagCode::ConstantOverflow, sp,
                 "constant " + v.to_string() + " does not fit " + cfg.int_name());
    }

    LExprPtr int_literal(const BigInt& v, Span sp) {
        check_int_range(v, sp);
        return make_lexpr(LInt{v.to_int64()}, LoweredType::fixed_int(cfg.int_width, cfg.int_signed));
    }

    LExprPtr float_literal(const std::string& text, Span sp) {
        double v = 0;
        if (cfg.float_precision == FloatPrec::Single)
            v = std::strtof(text.c_str(), nullptr);
        else
            v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v))
            fail(DiagCode::ConstantOverflow, sp, "constant " + text + " does not fit " + cfg.float_name());
        return make_lexpr(LFloat{v, text}, LoweredType::floating(cfg.float_precision));
    }

    LExprPtr lower_expr(const ExprPtr& e) {
        if (auto* b = e->as<BoolLit>()) return make_lexpr(LBool{b->value}, LoweredType::boolean());
        if (auto* i = e->as<IntLit>()) return int_literal(i->value, e->span);
        if (auto* r = e->as<RealLit>()) return float_literal(r->text, e->span);
        if (auto* v = e->as<VarRef>()) {
            auto slot = prog.slot_of(v->name);
            if (!slot) fail(DiagCode::InternalError, e->span, "unresolved lowered variable '" + v->name + "'");
            return make_lexpr(LVar{*slot, v->name}, lower_type(e->type, cfg));
        }
        if (auto* f = e->as<FieldSelect>()) {
            LExprPtr base = lower_expr(f->base);
            const StructLayout* layout = prog.layout(base->type.struct_name);
            for (size_t k = 0; k < layout->fields.size(); ++k)
                if (layout->fields[k].first == f->field)
                    return make_lexpr(LSelect{base, k, f->field}, layout->fields[k].second);
            fail(DiagCode::InternalError, e->span, "unresolved field '" + f->field + "'");
        }
        if (auto* u = e->as<Unary>()) {
            if (u->op == UnOp::Neg) {
                // Negative constants are single cast literals, not negations.
                if (auto* i = u->operand->as<IntLit>()) return int_literal(-i->value, e->span);
                if (auto* r = u->operand->as<RealLit>()) return float_literal("-" + r->text, e->span);
                return make_lexpr(LUnary{LUnKind::Neg, lower_expr(u->operand)}, lower_type(e->type, cfg));
            }
            return make_lexpr(LUnary{LUnKind::Not, lower_expr(u->operand)}, LoweredType::boolean());
        }
        if (auto* b = e->as<Binary>()) {
            LExprPtr lhs = lower_expr(b->lhs);
            LExprPtr rhs = lower_expr(b->rhs);
            LoweredType t = lower_type(e->type, cfg);
            switch (b->op) {
                case BinOp::Add: return make_lexpr(LBinary{LBinKind::Add, lhs, rhs}, t);
                case BinOp::Sub: return make_lexpr(LBinary{LBinKind::Sub, lhs, rhs}, t);
                case BinOp::Mul: return make_lexpr(LBinary{LBinKind::Mul, lhs, rhs}, t);
                case BinOp::RealDiv: return make_lexpr(LBinary{LBinKind::FDiv, lhs, rhs}, t);
                case BinOp::IntDiv: return make_lexpr(LBinary{LBinKind::IDiv, lhs, rhs}, t);
                case BinOp::Mod: return make_lexpr(LMod{lhs, rhs}, t);
                case BinOp::Lt: return make_lexpr(LBinary{LBinKind::Lt, lhs, rhs}, t);
                case BinOp::Le: return make_lexpr(LBinary{LBinKind::Le, lhs, rhs}, t);
                case BinOp::Gt: return make_lexpr(LBinary{LBinKind::Gt, lhs, rhs}, t);
                case BinOp::Ge: return make_lexpr(LBinary{LBinKind::Ge, lhs, rhs}, t);
                case BinOp::Eq: return make_lexpr(LIsEqual{lhs, rhs, false}, t);
                case BinOp::Ne: return make_lexpr(LIsEqual{lhs, rhs, true}, t);
                case BinOp::And: return make_lexpr(LBinary{LBinKind::And, lhs, rhs}, t);
                case BinOp::Or: return make_lexpr(LBinary{LBinKind::Or, lhs, rhs}, t);
                case BinOp::Implies: return make_lexpr(LImplies{lhs, rhs}, t);
            }
        }
        if (auto* i = e->as<Ite>())
            return make_lexpr(LIf{lower_expr(i->cond), lower_expr(i->then_branch), lower_expr(i->else_branch)},
                              lower_type(e->type, cfg));
        if (auto* a = e->as<Arrow>())
            return make_lexpr(LArrow{lower_expr(a->init), lower_expr(a->rest)}, lower_type(e->type, cfg));
        if (auto* p = e->as<Pre>()) {
            auto it = pre_slot.find(canonical_expr(p->operand));
            if (it == pre_slot.end())
                fail(DiagCode::InternalError, e->span, "pre operand missing from the pre table");
            return make_lexpr(LPersist{it->second, prog.persistents[it->second].name},
                              lower_type(e->type, cfg));
        }
        fail(DiagCode::InternalError, e->span, "node call reached lowering");
    }

    ObserverProgram run(LowerMode mode) {
        prog.name = ir.component;
        prog.model_mode = mode == LowerMode::Model;

        for (const auto& rd : ir.records.decls) {
            StructLayout layout;
            layout.name = rd.name;
            for (const auto& [fn, ft] : rd.fields) layout.fields.emplace_back(fn, lower_type(ft, cfg));
            prog.structs.push_back(std::move(layout));
        }

        if (mode == LowerMode::Observer) {
            for (const auto& l : ir.locals)
                if (l.is_output)
                    fail(DiagCode::TypeMismatch, l.expr->span,
                         "contract defines output '" + l.name + "'; compile it as a design model");
            for (const auto& p : ir.inputs) prog.params.push_back({p.name, lower_type(p.type, cfg), false});
            for (const auto& p : ir.outputs) prog.params.push_back({p.name, lower_type(p.type, cfg), true});
        } else {
            if (!ir.assumes.empty() || !ir.guarantees.empty())
                fail(DiagCode::TypeMismatch, {}, "a design model must consist solely of eqs");
            std::unordered_set<std::string> defined;
            for (const auto& l : ir.locals)
                if (l.is_output) defined.insert(l.name);
            for (const auto& p : ir.outputs)
                if (!defined.count(p.name))
                    fail(DiagCode::TypeMismatch, p.span, "design model does not define output '" + p.name + "'");
            for (const auto& p : ir.inputs) prog.params.push_back({p.name, lower_type(p.type, cfg), false});
            for (const auto& p : ir.outputs)
                prog.model_outputs.push_back({p.name, lower_type(p.type, cfg), true});
        }
        for (const auto& p : prog.params) names_taken.insert(p.name);

        for (const auto& l : ir.locals) {
            names_taken.insert(l.name);
            prog.locals.push_back({l.name, lower_type(l.type, cfg), l.is_output, l.synthetic});
        }

        // first_time plus exactly one persistent per canonical pre expression.
        prog.persistents.push_back({unique_name("first_time"), LoweredType::boolean(), ""});
        for (const auto& entry : ir.pre_table) {
            pre_slot[entry.key] = prog.persistents.size();
            prog.persistents.push_back(
                {unique_name(entry.id), lower_type(entry.operand->type, cfg), entry.key});
        }

        std::multimap<std::string, std::pair<bool, std::string>> intrinsics; // local -> (is_assume, label)
        std::vector<std::pair<bool, std::string>> param_refs;                // labels referencing bare params
        std::unordered_set<std::string> local_names;
        for (const auto& l : ir.locals) local_names.insert(l.name);
        for (const auto& r : ir.assumes) {
            if (local_names.count(r.local)) intrinsics.emplace(r.local, std::make_pair(true, r.label));
            else param_refs.emplace_back(true, r.label);
        }
        for (const auto& r : ir.guarantees) {
            if (local_names.count(r.local)) intrinsics.emplace(r.local, std::make_pair(false, r.label));
            else param_refs.emplace_back(false, r.label);
        }

        auto emit_intrinsic = [&](bool is_assume, const std::string& label, LExprPtr arg) {
            if (is_assume)
                prog.body.push_back(SAssume{label, std::move(arg)});
            else
                prog.body.push_back(SProve{label, std::move(arg)});
        };

        // Labels referencing a bare Boolean parameter have no defining
        // assignment; they are checked up front.
        for (const auto& [is_assume, label] : param_refs) {
            const auto& refs = is_assume ? ir.assumes : ir.guarantees;
            for (const auto& r : refs)
                if (r.label == label && !local_names.count(r.local)) {
                    auto slot = prog.slot_of(r.local);
                    if (!slot) fail(DiagCode::InternalError, {}, "dangling label ref '" + r.local + "'");
                    emit_intrinsic(is_assume, label, make_lexpr(LVar{*slot, r.local}, LoweredType::boolean()));
                    break;
                }
        }

        for (const auto& l : ir.locals) {
            auto slot = prog.slot_of(l.name);
            prog.body.push_back(SAssign{*slot, l.name, lower_expr(l.expr)});
            auto [lo, hi] = intrinsics.equal_range(l.name);
            // assumes first, then proves, preserving contract order within each.
            for (int pass = 0; pass < 2; ++pass)
                for (auto it = lo; it != hi; ++it)
                    if (it->second.first == (pass == 0))
                        emit_intrinsic(it->second.first, it->second.second,
                                       make_lexpr(LVar{*slot, l.name}, LoweredType::boolean()));
        }

        for (const auto& entry : ir.pre_table) {
            size_t pslot = pre_slot.at(entry.key);
            prog.body.push_back(SUpdate{pslot, prog.persistents[pslot].name, lower_expr(entry.operand)});
        }
        prog.body.push_back(SFirstTimeFalse{});
        return std::move(prog);
    }
};

void canon_lexpr(std::ostream& os, const LExprPtr& e) {
    os << "[" << e->type.to_string() << "]";
    if (auto* b = e->as<LBool>()) os << (b->value ? "true" : "false");
    else if (auto* i = e->as<LInt>()) os << i->value;
    else if (auto* f = e->as<LFloat>()) os << "fl:" << f->text;
    else if (auto* v = e->as<LVar>()) os << "v:" << v->name;
    else if (auto* p = e->as<LPersist>()) os << "p:" << p->name;
    else if (auto* s = e->as<LSelect>()) {
        os << "(. ";
        canon_lexpr(os, s->base);
        os << " " << s->field_name << ")";
    } else if (auto* u = e->as<LUnary>()) {
        os << "(" << (u->op == LUnKind::Neg ? "neg" : "not") << " ";
        canon_lexpr(os, u->a);
        os << ")";
    } else if (auto* b2 = e->as<LBinary>()) {
        static const char* names[] = {"add", "sub", "mul", "fdiv", "idiv", "lt", "le", "gt", "ge", "and", "or"};
        os << "(" << names[static_cast<int>(b2->op)] << " ";
        canon_lexpr(os, b2->a);
        os << " ";
        canon_lexpr(os, b2->b);
        os << ")";
    } else if (auto* i2 = e->as<LIf>()) {
        os << "(if ";
        canon_lexpr(os, i2->cond);
        os << " ";
        canon_lexpr(os, i2->a);
        os << " ";
        canon_lexpr(os, i2->b);
        os << ")";
    } else if (auto* im = e->as<LImplies>()) {
        os << "(implies ";
        canon_lexpr(os, im->a);
        os << " ";
        canon_lexpr(os, im->b);
        os << ")";
    } else if (auto* a = e->as<LArrow>()) {
        os << "(arrow ";
        canon_lexpr(os, a->a);
        os << " ";
        canon_lexpr(os, a->b);
        os << ")";
    } else if (auto* m = e->as<LMod>()) {
        os << "(mod ";
        canon_lexpr(os, m->a);
        os << " ";
        canon_lexpr(os, m->b);
        os << ")";
    } else if (auto* q = e->as<LIsEqual>()) {
        os << "(" << (q->negated ? "ne" : "eq") << " ";
        canon_lexpr(os, q->a);
        os << " ";
        canon_lexpr(os, q->b);
        os << ")";
    }
}

} // namespace

std::string canonical_program(const ObserverProgram& p) {
    std::ostringstream os;
    os << "program " << p.name << (p.model_mode ? " model" : " observer") << "\n";
    for (const auto& s : p.structs) {
        os << "struct " << s.name;
        for (const auto& [fn, ft] : s.fields) os << " " << fn << ":" << ft.to_string();
        os << "\n";
    }
    for (const auto& prm : p.params)
        os << "param " << prm.name << ":" << prm.type.to_string() << (prm.is_output ? " out" : " in") << "\n";
    for (const auto& l : p.locals)
        os << "local " << l.name << ":" << l.type.to_string() << (l.is_model_output ? " out" : "") << "\n";
    for (const auto& pe : p.persistents)
        os << "persistent " << pe.name << ":" << pe.type.to_string() << "\n";
    for (const auto& st : p.body) {
        if (auto* a = std::get_if<SAssign>(&st)) {
            os << "assign " << a->name << " = ";
            canon_lexpr(os, a->expr);
        } else if (auto* as = std::get_if<SAssume>(&st)) {
            os << "assume \"" << as->label << "\" ";
            canon_lexpr(os, as->arg);
        } else if (auto* pr = std::get_if<SProve>(&st)) {
            os << "prove \"" << pr->label << "\" ";
            canon_lexpr(os, pr->arg);
        } else if (auto* u = std::get_if<SUpdate>(&st)) {
            os << "update " << u->name << " = ";
            canon_lexpr(os, u->expr);
        } else {
            os << "first_time_false";
        }
        os << "\n";
    }
    return os.str();
}

ObserverProgram lower(const DataflowIR& ir, const TypeConfig& cfg, LowerMode mode) {
    Lowerer lw(ir, cfg);
    return lw.run(mode);
}

ObserverProgram compile_observer(const Contract& c, const TypeConfig& cfg) {
    require_wellformed(c);
    return lower(normalize(c), cfg, LowerMode::Observer);
}

ObserverProgram compile_model(const Contract& c, const TypeConfig& cfg) {
    require_wellformed(c);
    return lower(normalize(c), cfg, LowerMode::Model);
}

} // namespace c2o
