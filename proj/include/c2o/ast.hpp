#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "c2o/bigint.hpp"
#include "c2o/diagnostics.hpp"

namespace c2o {

// Types are unbounded/exact at this stage; fixed widths come in at lowering.
struct SemType {
    enum class Kind { Unknown, Bool, Int, Real, Record };
    Kind kind = Kind::Unknown;
    std::string record_name; // set iff kind == Record

    static SemType boolean() { return {Kind::Bool, {}}; }
    static SemType integer() { return {Kind::Int, {}}; }
    static SemType real() { return {Kind::Real, {}}; }
    static SemType record(std::string name) { return {Kind::Record, std::move(name)}; }

    bool operator==(const SemType& o) const { return kind == o.kind && record_name == o.record_name; }
    bool operator!=(const SemType& o) const { return !(*this == o); }
    bool is_numeric() const { return kind == Kind::Int || kind == Kind::Real; }
    std::string to_string() const;
};

struct RecordDecl {
    std::string name;
    std::vector<std::pair<std::string, SemType>> fields; // ordered, unique names
    Span span;
};

// Ordered record table; lookup by name.
struct RecordTable {
    std::vector<RecordDecl> decls;
    const RecordDecl* find(const std::string& name) const {
        for (const auto& d : decls)
            if (d.name == name) return &d;
        return nullptr;
    }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnOp { Neg, Not };
enum class BinOp {
    Add, Sub, Mul, RealDiv, IntDiv, Mod,
    Lt, Le, Gt, Ge, Eq, Ne,
    And, Or, Implies,
};

const char* binop_spelling(BinOp op);

struct BoolLit { bool value; };
struct IntLit { BigInt value; };
struct RealLit {
    BigRational value;
    std::string text; // original decimal spelling, kept for exact literal lowering
};
struct VarRef { std::string name; };
struct FieldSelect {
    ExprPtr base;
    std::string field;
};
struct Unary {
    UnOp op;
    ExprPtr operand;
};
struct Binary {
    BinOp op;
    ExprPtr lhs, rhs;
};
struct Ite {
    ExprPtr cond, then_branch, else_branch;
};
struct Arrow { ExprPtr init, rest; }; // init -> rest
struct Pre { ExprPtr operand; };
struct Call {
    std::string callee;
    std::vector<ExprPtr> args;
};

using ExprNode = std::variant<BoolLit, IntLit, RealLit, VarRef, FieldSelect,
                              Unary, Binary, Ite, Arrow, Pre, Call>;

struct Expr {
    ExprNode node;
    Span span;
    SemType type; // resolved by the type checker

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }
};

ExprPtr make_expr(ExprNode node, Span span, SemType type = {});

struct Port {
    std::string name;
    SemType type;
    Span span;
};

struct LabeledExpr {
    std::string label;
    ExprPtr expr;
    Span span;
};

struct EqDef {
    std::string name;
    SemType type;
    ExprPtr expr;
    Span span;
    bool defines_output = false; // model contracts: eq (re)defines a declared output
};

struct NodeDef {
    std::string name;
    std::vector<std::pair<std::string, SemType>> params;
    SemType result;
    ExprPtr body; // single pure expression over the params
    Span span;
};

struct Contract {
    std::string name;
    RecordTable records;
    std::vector<Port> inputs;
    std::vector<Port> outputs;
    std::vector<LabeledExpr> assumes;
    std::vector<LabeledExpr> guarantees;
    std::vector<EqDef> eqs;
    std::vector<NodeDef> nodes;
    std::vector<Diagnostic> warnings; // lints collected during checking

    const NodeDef* find_node(const std::string& n) const {
        for (const auto& nd : nodes)
            if (nd.name == n) return &nd;
        return nullptr;
    }
};

// Structure-only canonical rendering: identical strings <=> structurally equal
// expressions (spans and type annotations excluded).
std::string canonical_expr(const ExprPtr& e);
bool expr_structurally_equal(const ExprPtr& a, const ExprPtr& b);
bool expr_contains_temporal(const ExprPtr& e);

// Pretty-printers producing re-parseable source.
std::string print_expr(const ExprPtr& e);
std::string print_contract(const Contract& c);
std::string print_type(const SemType& t);

} // namespace c2o
