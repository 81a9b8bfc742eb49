#include "c2o/parser.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace c2o {

namespace {

[[noreturn]] void fail(DiagCode code, Span sp, std::string msg) {
    throw CompileError(Diagnostic{Severity::Error, code, sp, std::move(msg)});
}

enum class SymKind { Input, Output, Eq, Node };

struct Checker {
    Contract& c;
    std::unordered_map<std::string, std::pair<SymKind, SemType>> symbols;
    std::unordered_map<std::string, const NodeDef*> node_table;

    explicit Checker(Contract& contract) : c(contract) {}

    void validate_type(const SemType& t, Span sp) const {
        if (t.kind == SemType::Kind::Record && !c.records.find(t.record_name))
            fail(DiagCode::UnresolvedIdentifier, sp, "unknown record type '" + t.record_name + "'");
    }

    void check_records() {
        std::unordered_set<std::string> seen;
        for (const auto& rd : c.records.decls) {
            if (!seen.insert(rd.name).second)
                fail(DiagCode::DuplicateName, rd.span, "duplicate record '" + rd.name + "'");
            std::unordered_set<std::string> fields;
            for (const auto& [fn, ft] : rd.fields) {
                if (!fields.insert(fn).second)
                    fail(DiagCode::DuplicateName, rd.span, "duplicate field '" + fn + "' in record '" + rd.name + "'");
                if (ft.kind == SemType::Kind::Record && !c.records.find(ft.record_name))
                    fail(DiagCode::UnresolvedIdentifier, rd.span,
                         "unknown record type '" + ft.record_name + "' in record '" + rd.name + "'");
            }
        }
        // Records must not be recursive, directly or through nesting.
        std::unordered_map<std::string, int> state; // 0 fresh, 1 visiting, 2 done
        std::function<void(const RecordDecl&)> visit = [&](const RecordDecl& rd) {
            state[rd.name] = 1;
            for (const auto& [fn, ft] : rd.fields) {
                if (ft.kind != SemType::Kind::Record) continue;
                int s = state[ft.record_name];
                if (s == 1) fail(DiagCode::TypeMismatch, rd.span, "recursive record type '" + rd.name + "'");
                if (s == 0) visit(*c.records.find(ft.record_name));
            }
            state[rd.name] = 2;
        };
        for (const auto& rd : c.records.decls)
            if (state[rd.name] == 0) visit(rd);
    }

    void collect_symbols() {
        auto declare = [&](const std::string& name, SymKind kind, const SemType& type, Span sp) {
            if (!symbols.emplace(name, std::make_pair(kind, type)).second)
                fail(DiagCode::DuplicateName, sp, "name '" + name + "' is already declared");
        };
        for (const auto& p : c.inputs) {
            validate_type(p.type, p.span);
            declare(p.name, SymKind::Input, p.type, p.span);
        }
        for (const auto& p : c.outputs) {
            validate_type(p.type, p.span);
            declare(p.name, SymKind::Output, p.type, p.span);
        }
        for (auto& e : c.eqs) {
            validate_type(e.type, e.span);
            auto it = symbols.find(e.name);
            if (it != symbols.end()) {
                // An eq naming a declared output is its definition (design-model style).
                if (it->second.first == SymKind::Output) {
                    if (it->second.second != e.type)
                        fail(DiagCode::TypeMismatch, e.span,
                             "eq '" + e.name + "' redefines output with type " + e.type.to_string() +
                                 ", declared " + it->second.second.to_string());
                    e.defines_output = true;
                    continue;
                }
                fail(DiagCode::DuplicateName, e.span, "name '" + e.name + "' is already declared");
            }
            declare(e.name, SymKind::Eq, e.type, e.span);
        }
        std::unordered_set<std::string> defined_outputs;
        for (const auto& e : c.eqs)
            if (e.defines_output && !defined_outputs.insert(e.name).second)
                fail(DiagCode::DuplicateName, e.span, "output '" + e.name + "' is defined by more than one eq");
        for (const auto& n : c.nodes) {
            if (symbols.count(n.name) || node_table.count(n.name))
                fail(DiagCode::DuplicateName, n.span, "name '" + n.name + "' is already declared");
            node_table[n.name] = &n;
        }
    }

    ExprPtr check_expr(const ExprPtr& e, const std::unordered_map<std::string, SemType>* node_scope) {
        if (auto* b = e->as<BoolLit>()) {
            return make_expr(BoolLit{b->value}, e->span, SemType::boolean());
        }
        if (auto* i = e->as<IntLit>()) {
            return make_expr(IntLit{i->value}, e->span, SemType::integer());
        }
        if (auto* r = e->as<RealLit>()) {
            return make_expr(RealLit{r->value, r->text}, e->span, SemType::real());
        }
        if (auto* v = e->as<VarRef>()) {
            if (node_scope) {
                auto it = node_scope->find(v->name);
                if (it == node_scope->end())
                    fail(DiagCode::UnresolvedIdentifier, e->span,
                         "unknown identifier '" + v->name + "' (node bodies may only reference their parameters)");
                return make_expr(VarRef{v->name}, e->span, it->second);
            }
            auto it = symbols.find(v->name);
            if (it == symbols.end())
                fail(DiagCode::UnresolvedIdentifier, e->span, "unknown identifier '" + v->name + "'");
            return make_expr(VarRef{v->name}, e->span, it->second.second);
        }
        if (auto* f = e->as<FieldSelect>()) {
            ExprPtr base = check_expr(f->base, node_scope);
            if (base->type.kind != SemType::Kind::Record)
                fail(DiagCode::TypeMismatch, e->span,
                     "field selection on non-record value of type " + base->type.to_string());
            const RecordDecl* rd = c.records.find(base->type.record_name);
            for (const auto& [fn, ft] : rd->fields)
                if (fn == f->field) return make_expr(FieldSelect{base, f->field}, e->span, ft);
            fail(DiagCode::UnresolvedIdentifier, e->span,
                 "record '" + rd->name + "' has no field '" + f->field + "'");
        }
        if (auto* u = e->as<Unary>()) {
            ExprPtr operand = check_expr(u->operand, node_scope);
            if (u->op == UnOp::Not) {
                require(operand->type == SemType::boolean(), e->span, "'not' expects bool, got " + operand->type.to_string());
                return make_expr(Unary{UnOp::Not, operand}, e->span, SemType::boolean());
            }
            require(operand->type.is_numeric(), e->span, "unary '-' expects int or real, got " + operand->type.to_string());
            return make_expr(Unary{UnOp::Neg, operand}, e->span, operand->type);
        }
        if (auto* b = e->as<Binary>()) {
            ExprPtr lhs = check_expr(b->lhs, node_scope);
            ExprPtr rhs = check_expr(b->rhs, node_scope);
            SemType t = binary_type(b->op, lhs->type, rhs->type, e->span);
            return make_expr(Binary{b->op, lhs, rhs}, e->span, t);
        }
        if (auto* i = e->as<Ite>()) {
            ExprPtr cond = check_expr(i->cond, node_scope);
            require(cond->type == SemType::boolean(), i->cond->span,
                    "'if' condition must be bool, got " + cond->type.to_string());
            ExprPtr a = check_expr(i->then_branch, node_scope);
            ExprPtr b2 = check_expr(i->else_branch, node_scope);
            require(a->type == b2->type, e->span,
                    "'if' branches disagree: " + a->type.to_string() + " vs " + b2->type.to_string());
            return make_expr(Ite{cond, a, b2}, e->span, a->type);
        }
        if (auto* a = e->as<Arrow>()) {
            ExprPtr init = check_expr(a->init, node_scope);
            ExprPtr rest = check_expr(a->rest, node_scope);
            require(init->type == rest->type, e->span,
                    "'->' operands disagree: " + init->type.to_string() + " vs " + rest->type.to_string());
            return make_expr(Arrow{init, rest}, e->span, init->type);
        }
        if (auto* p = e->as<Pre>()) {
            ExprPtr operand = check_expr(p->operand, node_scope);
            return make_expr(Pre{operand}, e->span, operand->type);
        }
        if (auto* call = e->as<Call>()) {
            auto it = node_table.find(call->callee);
            if (it == node_table.end())
                fail(DiagCode::UnresolvedIdentifier, e->span, "unknown node '" + call->callee + "'");
            const NodeDef& nd = *it->second;
            if (call->args.size() != nd.params.size())
                fail(DiagCode::TypeMismatch, e->span,
                     "node '" + nd.name + "' expects " + std::to_string(nd.params.size()) + " argument(s), got " +
                         std::to_string(call->args.size()));
            std::vector<ExprPtr> args;
            for (size_t k = 0; k < call->args.size(); ++k) {
                ExprPtr arg = check_expr(call->args[k], node_scope);
                if (arg->type != nd.params[k].second)
                    fail(DiagCode::TypeMismatch, arg->span,
                         "argument " + std::to_string(k + 1) + " of '" + nd.name + "' expects " +
                             nd.params[k].second.to_string() + ", got " + arg->type.to_string());
                args.push_back(arg);
            }
            return make_expr(Call{call->callee, std::move(args)}, e->span, nd.result);
        }
        fail(DiagCode::InternalError, e->span, "unhandled expression node");
    }

    static void require(bool ok, Span sp, std::string msg) {
        if (!ok) fail(DiagCode::TypeMismatch, sp, std::move(msg));
    }

    SemType binary_type(BinOp op, const SemType& l, const SemType& r, Span sp) const {
        auto both = [&](SemType t) { return l == t && r == t; };
        switch (op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
                require(l == r && l.is_numeric(), sp,
                        std::string("'") + binop_spelling(op) + "' expects two ints or two reals, got " +
                            l.to_string() + " and " + r.to_string());
                return l;
            case BinOp::RealDiv:
                require(both(SemType::real()), sp,
                        "'/' is defined on reals only, got " + l.to_string() + " and " + r.to_string());
                return SemType::real();
            case BinOp::IntDiv:
            case BinOp::Mod:
                require(both(SemType::integer()), sp,
                        std::string("'") + binop_spelling(op) + "' is defined on ints only, got " + l.to_string() +
                            " and " + r.to_string());
                return SemType::integer();
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge:
                require(l == r && l.is_numeric(), sp,
                        std::string("'") + binop_spelling(op) + "' expects two ints or two reals, got " +
                            l.to_string() + " and " + r.to_string());
                return SemType::boolean();
            case BinOp::Eq:
            case BinOp::Ne:
                require(l == r, sp,
                        std::string("'") + binop_spelling(op) + "' expects matching types, got " + l.to_string() +
                            " and " + r.to_string());
                return SemType::boolean();
            case BinOp::And:
            case BinOp::Or:
            case BinOp::Implies:
                require(both(SemType::boolean()), sp,
                        std::string("'") + binop_spelling(op) + "' expects bools, got " + l.to_string() + " and " +
                            r.to_string());
                return SemType::boolean();
        }
        fail(DiagCode::InternalError, sp, "unhandled binary operator");
    }

    // Lint: an assume reading a current-step output breaks the input-assumption
    // discipline; flagged as a warning per the scoping design decision.
    void lint_assume_outputs(const ExprPtr& e, const std::string& label, bool under_pre) {
        if (auto* v = e->as<VarRef>()) {
            auto it = symbols.find(v->name);
            if (!under_pre && it != symbols.end() && it->second.first == SymKind::Output)
                c.warnings.push_back(Diagnostic{Severity::Warning, DiagCode::AssumeReadsOutput, e->span,
                                                "assume \"" + label + "\" reads current-step output '" + v->name + "'"});
            return;
        }
        if (auto* f = e->as<FieldSelect>()) lint_assume_outputs(f->base, label, under_pre);
        else if (auto* u = e->as<Unary>()) lint_assume_outputs(u->operand, label, under_pre);
        else if (auto* b = e->as<Binary>()) {
            lint_assume_outputs(b->lhs, label, under_pre);
            lint_assume_outputs(b->rhs, label, under_pre);
        } else if (auto* i = e->as<Ite>()) {
            lint_assume_outputs(i->cond, label, under_pre);
            lint_assume_outputs(i->then_branch, label, under_pre);
            lint_assume_outputs(i->else_branch, label, under_pre);
        } else if (auto* a = e->as<Arrow>()) {
            lint_assume_outputs(a->init, label, under_pre);
            lint_assume_outputs(a->rest, label, under_pre);
        } else if (auto* p = e->as<Pre>()) {
            lint_assume_outputs(p->operand, label, true);
        } else if (auto* call = e->as<Call>()) {
            for (const auto& arg : call->args) lint_assume_outputs(arg, label, under_pre);
        }
    }

    void run() {
        check_records();
        collect_symbols();
        for (auto& n : c.nodes) {
            std::unordered_map<std::string, SemType> scope;
            for (const auto& [pn, pt] : n.params) {
                validate_type(pt, n.span);
                if (!scope.emplace(pn, pt).second)
                    fail(DiagCode::DuplicateName, n.span, "duplicate parameter '" + pn + "' in node '" + n.name + "'");
            }
            validate_type(n.result, n.span);
            ExprPtr body = check_expr(n.body, &scope);
            if (body->type != n.result)
                fail(DiagCode::TypeMismatch, n.span,
                     "node '" + n.name + "' declares result " + n.result.to_string() + " but body has type " +
                         body->type.to_string());
            n.body = body;
        }
        for (auto& e : c.eqs) {
            ExprPtr ex = check_expr(e.expr, nullptr);
            if (ex->type != e.type)
                fail(DiagCode::TypeMismatch, e.span,
                     "eq '" + e.name + "' declares " + e.type.to_string() + " but expression has type " +
                         ex->type.to_string());
            e.expr = ex;
        }
        std::unordered_set<std::string> labels;
        for (const auto& a : c.assumes)
            if (!labels.insert(a.label).second)
                fail(DiagCode::DuplicateName, a.span, "duplicate label \"" + a.label + "\"");
        for (const auto& g : c.guarantees)
            if (!labels.insert(g.label).second)
                fail(DiagCode::DuplicateName, g.span, "duplicate label \"" + g.label + "\"");
        for (auto& a : c.assumes) {
            ExprPtr ex = check_expr(a.expr, nullptr);
            if (ex->type != SemType::boolean())
                fail(DiagCode::TypeMismatch, a.span, "assume \"" + a.label + "\" must be bool");
            a.expr = ex;
            lint_assume_outputs(a.expr, a.label, false);
        }
        for (auto& g : c.guarantees) {
            ExprPtr ex = check_expr(g.expr, nullptr);
            if (ex->type != SemType::boolean())
                fail(DiagCode::TypeMismatch, g.span, "guarantee \"" + g.label + "\" must be bool");
            g.expr = ex;
        }
    }
};

} // namespace

Contract check(Contract c) {
    Checker checker(c);
    checker.run();
    return c;
}

} // namespace c2o
