#include "c2o/ast.hpp"

#include <sstream>

namespace c2o {

std::string SemType::to_string() const {
    switch (kind) {
        case Kind::Unknown: return "<unknown>";
        case Kind::Bool: return "bool";
        case Kind::Int: return "int";
        case Kind::Real: return "real";
        case Kind::Record: return record_name;
    }
    return "<unknown>";
}

std::string print_type(const SemType& t) { return t.to_string(); }

const char* binop_spelling(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::RealDiv: return "/";
        case BinOp::IntDiv: return "div";
        case BinOp::Mod: return "mod";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "=";
        case BinOp::Ne: return "<>";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
        case BinOp::Implies: return "=>";
    }
    return "?";
}

namespace {

int binop_prec(BinOp op) {
    switch (op) {
        case BinOp::Implies: return 2;
        case BinOp::Or: return 3;
        case BinOp::And: return 4;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
        case BinOp::Eq:
        case BinOp::Ne: return 6;
        case BinOp::Add:
        case BinOp::Sub: return 7;
        case BinOp::Mul:
        case BinOp::RealDiv:
        case BinOp::IntDiv:
        case BinOp::Mod: return 8;
    }
    return 0;
}

// Emits minimal parentheses; `need` is the weakest precedence printable bare.
void print_rec(std::ostream& os, const ExprPtr& e, int need) {
    auto paren = [&](int prec, auto&& body) {
        if (prec < need) os << "(";
        body();
        if (prec < need) os << ")";
    };
    if (auto* b = e->as<BoolLit>()) {
        os << (b->value ? "true" : "false");
    } else if (auto* i = e->as<IntLit>()) {
        if (i->value.negative())
            paren(9, [&] { os << i->value.to_string(); });
        else
            os << i->value.to_string();
    } else if (auto* r = e->as<RealLit>()) {
        os << r->text;
    } else if (auto* v = e->as<VarRef>()) {
        os << v->name;
    } else if (auto* f = e->as<FieldSelect>()) {
        paren(11, [&] {
            print_rec(os, f->base, 11);
            os << "." << f->field;
        });
    } else if (auto* u = e->as<Unary>()) {
        if (u->op == UnOp::Not) {
            paren(5, [&] {
                os << "not ";
                print_rec(os, u->operand, 5);
            });
        } else {
            // "--" would open a comment; force parens around non-atomic operands
            paren(9, [&] {
                os << "-";
                print_rec(os, u->operand, 12);
            });
        }
    } else if (auto* b2 = e->as<Binary>()) {
        int p = binop_prec(b2->op);
        bool right_assoc = b2->op == BinOp::Implies;
        paren(p, [&] {
            print_rec(os, b2->lhs, right_assoc ? p + 1 : p);
            os << " " << binop_spelling(b2->op) << " ";
            print_rec(os, b2->rhs, right_assoc ? p : p + 1);
        });
    } else if (auto* ite = e->as<Ite>()) {
        // The else branch extends maximally; parenthesize in any tighter context.
        paren(0, [&] {
            os << "if ";
            print_rec(os, ite->cond, 0);
            os << " then ";
            print_rec(os, ite->then_branch, 0);
            os << " else ";
            print_rec(os, ite->else_branch, 0);
        });
    } else if (auto* a = e->as<Arrow>()) {
        paren(1, [&] {
            print_rec(os, a->init, 2);
            os << " -> ";
            print_rec(os, a->rest, 1);
        });
    } else if (auto* p = e->as<Pre>()) {
        paren(10, [&] {
            os << "pre ";
            print_rec(os, p->operand, 10);
        });
    } else if (auto* c = e->as<Call>()) {
        os << c->callee << "(";
        bool first = true;
        for (const auto& arg : c->args) {
            if (!first) os << ", ";
            first = false;
            print_rec(os, arg, 0);
        }
        os << ")";
    }
}

void canon_rec(std::ostream& os, const ExprPtr& e) {
    if (auto* b = e->as<BoolLit>()) {
        os << (b->value ? "true" : "false");
    } else if (auto* i = e->as<IntLit>()) {
        os << "i:" << i->value.to_string();
    } else if (auto* r = e->as<RealLit>()) {
        os << "r:" << r->value.to_string();
    } else if (auto* v = e->as<VarRef>()) {
        os << "v:" << v->name;
    } else if (auto* f = e->as<FieldSelect>()) {
        os << "(. ";
        canon_rec(os, f->base);
        os << " " << f->field << ")";
    } else if (auto* u = e->as<Unary>()) {
        os << "(" << (u->op == UnOp::Not ? "not" : "neg") << " ";
        canon_rec(os, u->operand);
        os << ")";
    } else if (auto* b2 = e->as<Binary>()) {
        os << "(" << binop_spelling(b2->op) << " ";
        canon_rec(os, b2->lhs);
        os << " ";
        canon_rec(os, b2->rhs);
        os << ")";
    } else if (auto* ite = e->as<Ite>()) {
        os << "(ite ";
        canon_rec(os, ite->cond);
        os << " ";
        canon_rec(os, ite->then_branch);
        os << " ";
        canon_rec(os, ite->else_branch);
        os << ")";
    } else if (auto* a = e->as<Arrow>()) {
        os << "(-> ";
        canon_rec(os, a->init);
        os << " ";
        canon_rec(os, a->rest);
        os << ")";
    } else if (auto* p = e->as<Pre>()) {
        os << "(pre ";
        canon_rec(os, p->operand);
        os << ")";
    } else if (auto* c = e->as<Call>()) {
        os << "(call " << c->callee;
        for (const auto& arg : c->args) {
            os << " ";
            canon_rec(os, arg);
        }
        os << ")";
    }
}

} // namespace

std::string print_expr(const ExprPtr& e) {
    std::ostringstream os;
    print_rec(os, e, 0);
    return os.str();
}

std::string canonical_expr(const ExprPtr& e) {
    std::ostringstream os;
    canon_rec(os, e);
    return os.str();
}

bool expr_structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    return canonical_expr(a) == canonical_expr(b);
}

bool expr_contains_temporal(const ExprPtr& e) {
    if (e->as<Pre>() || e->as<Arrow>()) return true;
    if (auto* f = e->as<FieldSelect>()) return expr_contains_temporal(f->base);
    if (auto* u = e->as<Unary>()) return expr_contains_temporal(u->operand);
    if (auto* b = e->as<Binary>()) return expr_contains_temporal(b->lhs) || expr_contains_temporal(b->rhs);
    if (auto* i = e->as<Ite>())
        return expr_contains_temporal(i->cond) || expr_contains_temporal(i->then_branch) ||
               expr_contains_temporal(i->else_branch);
    if (auto* c = e->as<Call>()) {
        for (const auto& arg : c->args)
            if (expr_contains_temporal(arg)) return true;
    }
    return false;
}

std::string print_contract(const Contract& c) {
    std::ostringstream os;
    os << "component " << c.name << " {\n";
    for (const auto& rd : c.records.decls) {
        os << "  record " << rd.name << " {";
        for (const auto& [fn, ft] : rd.fields) os << " " << fn << " : " << ft.to_string() << ";";
        os << " }\n";
    }
    for (const auto& p : c.inputs) os << "  input " << p.name << " : " << p.type.to_string() << ";\n";
    for (const auto& p : c.outputs) os << "  output " << p.name << " : " << p.type.to_string() << ";\n";
    for (const auto& n : c.nodes) {
        os << "  node " << n.name << "(";
        bool first = true;
        for (const auto& [pn, pt] : n.params) {
            if (!first) os << ", ";
            first = false;
            os << pn << " : " << pt.to_string();
        }
        os << ") : " << n.result.to_string() << " = " << print_expr(n.body) << ";\n";
    }
    for (const auto& e : c.eqs)
        os << "  eq " << e.name << " : " << e.type.to_string() << " = " << print_expr(e.expr) << ";\n";
    for (const auto& a : c.assumes) os << "  assume \"" << a.label << "\" : " << print_expr(a.expr) << ";\n";
    for (const auto& g : c.guarantees) os << "  guarantee \"" << g.label << "\" : " << print_expr(g.expr) << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace c2o
