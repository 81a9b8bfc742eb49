#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "c2o/ast.hpp"

namespace c2o {

enum class FloatPrec { Single, Double };

// One integer width/signedness and one float precision per compilation.
struct TypeConfig {
    int int_width = 32; // 8 | 16 | 32
    bool int_signed = true;
    FloatPrec float_precision = FloatPrec::Double;

    std::string int_name() const {
        return (int_signed ? "int" : "uint") + std::to_string(int_width);
    }
    std::string float_name() const { return float_precision == FloatPrec::Single ? "single" : "double"; }
};

struct LoweredType {
    enum class Kind { Bool, FixedInt, Float, Struct };
    Kind kind = Kind::Bool;
    int width = 32;                         // FixedInt
    bool is_signed = true;                  // FixedInt
    FloatPrec precision = FloatPrec::Double; // Float
    std::string struct_name;                 // Struct

    static LoweredType boolean() { return LoweredType{}; }
    static LoweredType fixed_int(int w, bool s) { return LoweredType{Kind::FixedInt, w, s, FloatPrec::Double, {}}; }
    static LoweredType floating(FloatPrec p) { return LoweredType{Kind::Float, 32, true, p, {}}; }
    static LoweredType structure(std::string name) {
        return LoweredType{Kind::Struct, 32, true, FloatPrec::Double, std::move(name)};
    }

    bool operator==(const LoweredType& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
            case Kind::Bool: return true;
            case Kind::FixedInt: return width == o.width && is_signed == o.is_signed;
            case Kind::Float: return precision == o.precision;
            case Kind::Struct: return struct_name == o.struct_name;
        }
        return false;
    }
    bool operator!=(const LoweredType& o) const { return !(*this == o); }

    std::string to_string() const {
        switch (kind) {
            case Kind::Bool: return "bool";
            case Kind::FixedInt: return (is_signed ? "int" : "uint") + std::to_string(width);
            case Kind::Float: return precision == FloatPrec::Single ? "single" : "double";
            case Kind::Struct: return struct_name;
        }
        return "?";
    }
};

struct StructLayout {
    std::string name;
    std::vector<std::pair<std::string, LoweredType>> fields;
};

struct LExpr;
using LExprPtr = std::shared_ptr<const LExpr>;

enum class LBinKind {
    Add, Sub, Mul, FDiv, IDiv,
    Lt, Le, Gt, Ge,
    And, Or, // short-circuit
};
enum class LUnKind { Neg, Not };

struct LBool { bool value; };
struct LInt { int64_t value; };                 // carries an explicit cast to its type
struct LFloat { double value; std::string text; }; // text: exact decimal spelling
struct LVar { size_t slot; std::string name; };     // param or local read
struct LPersist { size_t pslot; std::string name; }; // persistent (pre var / first_time) read
struct LSelect { LExprPtr base; size_t field; std::string field_name; };
struct LUnary { LUnKind op; LExprPtr a; };
struct LBinary { LBinKind op; LExprPtr a, b; };
struct LIf { LExprPtr cond, a, b; };       // ifFunction: eager arguments
struct LImplies { LExprPtr a, b; };        // impliesFunction
struct LArrow { LExprPtr a, b; };          // arrowFunction(first_time, a, b)
struct LMod { LExprPtr a, b; };            // mod helper (divisor-sign convention)
struct LIsEqual { LExprPtr a, b; bool negated; }; // deep structural equality

using LExprNode = std::variant<LBool, LInt, LFloat, LVar, LPersist, LSelect, LUnary,
                               LBinary, LIf, LImplies, LArrow, LMod, LIsEqual>;

struct LExpr {
    LExprNode node;
    LoweredType type;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }
};

LExprPtr make_lexpr(LExprNode node, LoweredType type);

struct SAssign { size_t slot; std::string name; LExprPtr expr; };
struct SAssume { std::string label; LExprPtr arg; };
struct SProve { std::string label; LExprPtr arg; };
struct SUpdate { size_t pslot; std::string name; LExprPtr expr; };
struct SFirstTimeFalse {};

using Stmt = std::variant<SAssign, SAssume, SProve, SUpdate, SFirstTimeFalse>;

struct Persistent {
    std::string name;
    LoweredType type;
    std::string pre_key; // canonical pre-operand (empty for first_time)
};

// Imperative single-step observer. Statement order is fixed by construction:
// dataflow assignments (with assume/prove at their hoisted positions), then
// all pre-variable updates, then first_time := false.
struct ObserverProgram {
    struct Param {
        std::string name;
        LoweredType type;
        bool is_output; // of the observed component
    };
    struct LocalVar {
        std::string name;
        LoweredType type;
        bool is_model_output;
        bool synthetic;
    };

    std::string name;
    bool model_mode = false;
    std::vector<Param> params;   // slots [0, params.size())
    std::vector<Param> model_outputs; // model mode: computed outputs, declared order
    std::vector<LocalVar> locals; // slots [params.size(), ...)
    std::vector<StructLayout> structs;
    std::vector<Persistent> persistents; // [0] is first_time
    std::vector<Stmt> body;

    size_t slot_count() const { return params.size() + locals.size(); }
    const StructLayout* layout(const std::string& name_) const {
        for (const auto& s : structs)
            if (s.name == name_) return &s;
        return nullptr;
    }
    std::optional<size_t> slot_of(const std::string& n) const {
        for (size_t i = 0; i < params.size(); ++i)
            if (params[i].name == n) return i;
        for (size_t i = 0; i < locals.size(); ++i)
            if (locals[i].name == n) return params.size() + i;
        return std::nullopt;
    }
};

// Structure-only canonical form for round-trip comparisons.
std::string canonical_program(const ObserverProgram& p);

} // namespace c2o
