#include "c2o/emit.hpp"

#include "c2o/lexer.hpp"

#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace c2o {

namespace {

[[noreturn]] void fail(std::string msg, Span sp = {}) {
    throw CompileError(Diagnostic{Severity::Error, DiagCode::OslParseError, sp, std::move(msg)});
}

// ---------------------------------------------------------------- OSL text

// Operator precedence shared with the contract grammar; helpers are calls.
int losl_prec(const LExprPtr& e) {
    if (auto* b = e->as<LBinary>()) {
        switch (b->op) {
            case LBinKind::Or: return 3;
            case LBinKind::And: return 4;
            case LBinKind::Lt:
            case LBinKind::Le:
            case LBinKind::Gt:
            case LBinKind::Ge: return 6;
            case LBinKind::Add:
            case LBinKind::Sub: return 7;
            case LBinKind::Mul:
            case LBinKind::FDiv:
            case LBinKind::IDiv: return 8;
        }
    }
    if (e->as<LIsEqual>()) return 6;
    if (auto* u = e->as<LUnary>()) return u->op == LUnKind::Not ? 5 : 9;
    if (e->as<LMod>()) return 8;
    if (e->as<LSelect>()) return 11;
    return 12;
}

const char* lbin_spelling(LBinKind op) {
    switch (op) {
        case LBinKind::Add: return "+";
        case LBinKind::Sub: return "-";
        case LBinKind::Mul: return "*";
        case LBinKind::FDiv: return "/";
        case LBinKind::IDiv: return "div";
        case LBinKind::Lt: return "<";
        case LBinKind::Le: return "<=";
        case LBinKind::Gt: return ">";
        case LBinKind::Ge: return ">=";
        case LBinKind::And: return "and";
        case LBinKind::Or: return "or";
    }
    return "?";
}

void osl_expr(std::ostream& os, const LExprPtr& e, int need, const std::string& flag) {
    int prec = losl_prec(e);
    bool paren = prec < need;
    auto open = [&] { if (paren) os << "("; };
    auto close = [&] { if (paren) os << ")"; };
    if (auto* b = e->as<LBool>()) {
        os << (b->value ? "true" : "false");
    } else if (auto* i = e->as<LInt>()) {
        os << e->type.to_string() << "(" << i->value << ")";
    } else if (auto* f = e->as<LFloat>()) {
        os << e->type.to_string() << "(" << f->text << ")";
    } else if (auto* v = e->as<LVar>()) {
        os << v->name;
    } else if (auto* p = e->as<LPersist>()) {
        os << p->name;
    } else if (auto* s = e->as<LSelect>()) {
        open();
        osl_expr(os, s->base, 11, flag);
        os << "." << s->field_name;
        close();
    } else if (auto* u = e->as<LUnary>()) {
        open();
        // "--" would start a comment; parenthesize anything non-atomic
        os << (u->op == LUnKind::Not ? "not " : "-");
        osl_expr(os, u->a, u->op == LUnKind::Not ? 5 : 12, flag);
        close();
    } else if (auto* b2 = e->as<LBinary>()) {
        open();
        osl_expr(os, b2->a, prec, flag);
        os << " " << lbin_spelling(b2->op) << " ";
        osl_expr(os, b2->b, prec + 1, flag);
        close();
    } else if (auto* m = e->as<LMod>()) {
        open();
        osl_expr(os, m->a, 8, flag);
        os << " mod ";
        osl_expr(os, m->b, 9, flag);
        close();
    } else if (auto* q = e->as<LIsEqual>()) {
        open();
        osl_expr(os, q->a, 6, flag);
        os << (q->negated ? " <> " : " = ");
        osl_expr(os, q->b, 7, flag);
        close();
    } else if (auto* i2 = e->as<LIf>()) {
        os << "ifFunction(";
        osl_expr(os, i2->cond, 0, flag);
        os << ", ";
        osl_expr(os, i2->a, 0, flag);
        os << ", ";
        osl_expr(os, i2->b, 0, flag);
        os << ")";
    } else if (auto* im = e->as<LImplies>()) {
        os << "impliesFunction(";
        osl_expr(os, im->a, 0, flag);
        os << ", ";
        osl_expr(os, im->b, 0, flag);
        os << ")";
    } else if (auto* ar = e->as<LArrow>()) {
        os << "arrowFunction(" << flag << ", ";
        osl_expr(os, ar->a, 0, flag);
        os << ", ";
        osl_expr(os, ar->b, 0, flag);
        os << ")";
    }
}

std::string osl_default(const LoweredType& t) {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return "true";
        case LoweredType::Kind::FixedInt: return t.to_string() + "(0)";
        case LoweredType::Kind::Float: return t.to_string() + "(0.0)";
        case LoweredType::Kind::Struct: return "default";
    }
    return "default";
}

std::string emit_osl(const ObserverProgram& p) {
    std::ostringstream os;
    const std::string& flag = p.persistents.at(0).name;
    os << "osl 1;\n";
    os << (p.model_mode ? "model " : "observer ") << p.name << " {\n";
    for (const auto& s : p.structs) {
        os << "  record " << s.name << " {";
        for (const auto& [fn, ft] : s.fields) os << " " << fn << " : " << ft.to_string() << ";";
        os << " }\n";
    }
    for (const auto& prm : p.params)
        os << "  param " << prm.name << " : " << prm.type.to_string() << (prm.is_output ? " out" : "")
           << ";\n";
    for (const auto& pe : p.persistents)
        os << "  persistent " << pe.name << " : " << pe.type.to_string() << " = " << osl_default(pe.type)
           << ";\n";
    os << "  step {\n";
    for (const auto& st : p.body) {
        os << "    ";
        if (auto* a = std::get_if<SAssign>(&st)) {
            bool out = false;
            if (a->slot >= p.params.size()) out = p.locals[a->slot - p.params.size()].is_model_output;
            os << "let " << (out ? "out " : "") << a->name << " : "
               << (a->slot >= p.params.size() ? p.locals[a->slot - p.params.size()].type.to_string()
                                              : p.params[a->slot].type.to_string())
               << " = ";
            osl_expr(os, a->expr, 0, flag);
            os << ";";
        } else if (auto* as = std::get_if<SAssume>(&st)) {
            os << "assume \"" << as->label << "\" : ";
            osl_expr(os, as->arg, 0, flag);
            os << ";";
        } else if (auto* pr = std::get_if<SProve>(&st)) {
            os << "prove \"" << pr->label << "\" : ";
            osl_expr(os, pr->arg, 0, flag);
            os << ";";
        } else if (auto* u = std::get_if<SUpdate>(&st)) {
            os << "update " << u->name << " = ";
            osl_expr(os, u->expr, 0, flag);
            os << ";";
        } else {
            os << flag << " = false;";
        }
        os << "\n";
    }
    os << "  }\n}\n";
    return os.str();
}

// ---------------------------------------------------------------- JSON

using json = nlohmann::ordered_json;

json type_json(const LoweredType& t) { return t.to_string(); }

json expr_json(const LExprPtr& e) {
    json j;
    j["type"] = type_json(e->type);
    if (auto* b = e->as<LBool>()) {
        j["kind"] = "bool";
        j["value"] = b->value;
    } else if (auto* i = e->as<LInt>()) {
        j["kind"] = "int";
        j["value"] = i->value;
    } else if (auto* f = e->as<LFloat>()) {
        j["kind"] = "real";
        j["text"] = f->text;
    } else if (auto* v = e->as<LVar>()) {
        j["kind"] = "var";
        j["name"] = v->name;
    } else if (auto* p = e->as<LPersist>()) {
        j["kind"] = "persistent";
        j["name"] = p->name;
    } else if (auto* s = e->as<LSelect>()) {
        j["kind"] = "select";
        j["base"] = expr_json(s->base);
        j["field"] = s->field_name;
    } else if (auto* u = e->as<LUnary>()) {
        j["kind"] = u->op == LUnKind::Not ? "not" : "neg";
        j["arg"] = expr_json(u->a);
    } else if (auto* b2 = e->as<LBinary>()) {
        static const char* names[] = {"add", "sub", "mul", "fdiv", "idiv", "lt", "le", "gt", "ge", "and", "or"};
        j["kind"] = names[static_cast<int>(b2->op)];
        j["args"] = json::array({expr_json(b2->a), expr_json(b2->b)});
    } else if (auto* i2 = e->as<LIf>()) {
        j["kind"] = "ifFunction";
        j["args"] = json::array({expr_json(i2->cond), expr_json(i2->a), expr_json(i2->b)});
    } else if (auto* im = e->as<LImplies>()) {
        j["kind"] = "impliesFunction";
        j["args"] = json::array({expr_json(im->a), expr_json(im->b)});
    } else if (auto* ar = e->as<LArrow>()) {
        j["kind"] = "arrowFunction";
        j["args"] = json::array({expr_json(ar->a), expr_json(ar->b)});
    } else if (auto* m = e->as<LMod>()) {
        j["kind"] = "mod";
        j["args"] = json::array({expr_json(m->a), expr_json(m->b)});
    } else if (auto* q = e->as<LIsEqual>()) {
        j["kind"] = q->negated ? "isnotequal" : "isequal";
        j["args"] = json::array({expr_json(q->a), expr_json(q->b)});
    }
    return j;
}

std::string emit_json(const ObserverProgram& p) {
    json j;
    j["osl_version"] = 1;
    j["kind"] = p.model_mode ? "model" : "observer";
    j["name"] = p.name;
    j["records"] = json::array();
    for (const auto& s : p.structs) {
        json r;
        r["name"] = s.name;
        r["fields"] = json::array();
        for (const auto& [fn, ft] : s.fields) r["fields"].push_back({{"name", fn}, {"type", type_json(ft)}});
        j["records"].push_back(std::move(r));
    }
    j["params"] = json::array();
    for (const auto& prm : p.params)
        j["params"].push_back({{"name", prm.name}, {"type", type_json(prm.type)}, {"output", prm.is_output}});
    j["persistents"] = json::array();
    for (const auto& pe : p.persistents)
        j["persistents"].push_back({{"name", pe.name}, {"type", type_json(pe.type)}, {"pre_key", pe.pre_key}});
    j["body"] = json::array();
    for (const auto& st : p.body) {
        json s;
        if (auto* a = std::get_if<SAssign>(&st)) {
            s["stmt"] = "let";
            s["name"] = a->name;
            bool out = a->slot >= p.params.size() && p.locals[a->slot - p.params.size()].is_model_output;
            s["output"] = out;
            s["expr"] = expr_json(a->expr);
        } else if (auto* as = std::get_if<SAssume>(&st)) {
            s["stmt"] = "assume";
            s["label"] = as->label;
            s["expr"] = expr_json(as->arg);
        } else if (auto* pr = std::get_if<SProve>(&st)) {
            s["stmt"] = "prove";
            s["label"] = pr->label;
            s["expr"] = expr_json(pr->arg);
        } else if (auto* u = std::get_if<SUpdate>(&st)) {
            s["stmt"] = "update";
            s["name"] = u->name;
            s["expr"] = expr_json(u->expr);
        } else {
            s["stmt"] = "first_time_false";
        }
        j["body"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- MATLAB

const std::unordered_set<std::string>& matlab_reserved() {
    static const std::unordered_set<std::string> words = {
        "if", "else", "elseif", "end", "for", "while", "function", "return", "break",
        "continue", "switch", "case", "otherwise", "global", "persistent", "true", "false",
        "mod", "isequal", "isempty", "ifFunction", "impliesFunction", "arrowFunction", "sldv",
    };
    return words;
}

std::string matlab_sanitize_one(const std::string& name) {
    std::string out;
    for (char ch : name) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') out.push_back(ch);
        else out.push_back('_');
    }
    size_t first_letter = 0;
    while (first_letter < out.size() && !std::isalpha(static_cast<unsigned char>(out[first_letter])))
        ++first_letter;
    out = first_letter < out.size() ? out.substr(first_letter) : std::string();
    if (out.empty()) out = "v";
    if (out.size() > 63) out.resize(63);
    if (matlab_reserved().count(out)) out = "v_" + out;
    return out;
}

} // namespace

std::map<std::string, std::string> matlab_identifier_map(const ObserverProgram& p) {
    std::map<std::string, std::string> out;
    std::unordered_set<std::string> used = matlab_reserved();
    auto add = [&](const std::string& name) {
        if (out.count(name)) return;
        std::string base = matlab_sanitize_one(name);
        std::string cand = base;
        for (int n = 1; used.count(cand); ++n) cand = base + "_" + std::to_string(n);
        used.insert(cand);
        out.emplace(name, cand);
    };
    for (const auto& prm : p.params) add(prm.name);
    for (const auto& l : p.locals) add(l.name);
    for (const auto& pe : p.persistents) add(pe.name);
    return out;
}

namespace {

struct MatlabEmitter {
    const ObserverProgram& p;
    std::map<std::string, std::string> names;
    bool used_if = false, used_implies = false, used_arrow = false;

    explicit MatlabEmitter(const ObserverProgram& prog) : p(prog), names(matlab_identifier_map(prog)) {}

    static bool is_literal(const LExprPtr& e) { return e->as<LInt>() || e->as<LFloat>(); }

    // MATLAB coerces a bare double literal next to a typed operand; keep the
    // uncast spelling there and cast everywhere else.
    static bool bare_ok(LBinKind op) {
        switch (op) {
            case LBinKind::Add:
            case LBinKind::Sub:
            case LBinKind::Mul:
            case LBinKind::FDiv:
            case LBinKind::Lt:
            case LBinKind::Le:
            case LBinKind::Gt:
            case LBinKind::Ge: return true;
            default: return false;
        }
    }

    int prec(const LExprPtr& e) {
        if (auto* b = e->as<LBinary>()) {
            switch (b->op) {
                case LBinKind::Or: return 3;
                case LBinKind::And: return 4;
                case LBinKind::Lt:
                case LBinKind::Le:
                case LBinKind::Gt:
                case LBinKind::Ge: return 6;
                case LBinKind::Add:
                case LBinKind::Sub: return 7;
                case LBinKind::Mul:
                case LBinKind::FDiv:
                case LBinKind::IDiv: return 8;
            }
        }
        if (auto* q = e->as<LIsEqual>()) return q->negated ? 6 : 12; // isequal() is a call
        if (auto* u = e->as<LUnary>()) return u->op == LUnKind::Not ? 9 : 9;
        if (e->as<LSelect>()) return 11;
        return 12;
    }

    void literal(std::ostream& os, const LExprPtr& e, bool bare) {
        if (auto* i = e->as<LInt>()) {
            if (bare) os << i->value;
            else os << e->type.to_string() << "(" << i->value << ")";
            return;
        }
        auto* f = e->as<LFloat>();
        if (bare) os << f->text;
        else os << e->type.to_string() << "(" << f->text << ")";
    }

    void expr(std::ostream& os, const LExprPtr& e, int need, bool bare = false) {
        if (is_literal(e)) {
            literal(os, e, bare);
            return;
        }
        int pr = prec(e);
        bool paren = pr < need;
        if (paren) os << "(";
        if (auto* b = e->as<LBool>()) {
            os << (b->value ? "true" : "false");
        } else if (auto* v = e->as<LVar>()) {
            os << names.at(v->name);
        } else if (auto* ps = e->as<LPersist>()) {
            os << names.at(ps->name);
        } else if (auto* s = e->as<LSelect>()) {
            expr(os, s->base, 11);
            os << "." << s->field_name;
        } else if (auto* u = e->as<LUnary>()) {
            os << (u->op == LUnKind::Not ? "~" : "-");
            expr(os, u->a, 10);
        } else if (auto* b2 = e->as<LBinary>()) {
            static const char* sp[] = {"+", "-", "*", "/", "/", "<", "<=", ">", ">=", "&&", "||"};
            bool allow = bare_ok(b2->op);
            bool left_bare = allow && is_literal(b2->a) && !is_literal(b2->b);
            bool right_bare = allow && is_literal(b2->b) && !is_literal(b2->a);
            bool is_cmp = b2->op == LBinKind::Lt || b2->op == LBinKind::Le || b2->op == LBinKind::Gt ||
                          b2->op == LBinKind::Ge;
            int operand_need = is_cmp ? 9 : pr; // arithmetic under comparisons keeps its parens
            expr(os, b2->a, operand_need, left_bare);
            os << " " << sp[static_cast<int>(b2->op)] << " ";
            expr(os, b2->b, is_cmp ? 9 : pr + 1, right_bare);
        } else if (auto* q = e->as<LIsEqual>()) {
            bool scalar = q->a->type.kind != LoweredType::Kind::Struct;
            if (q->negated) {
                if (scalar) {
                    expr(os, q->a, 9);
                    os << " ~= ";
                    expr(os, q->b, 9);
                } else {
                    os << "~isequal(";
                    expr(os, q->a, 0);
                    os << ", ";
                    expr(os, q->b, 0);
                    os << ")";
                }
            } else {
                os << "isequal(";
                expr(os, q->a, 0);
                os << ", ";
                expr(os, q->b, 0);
                os << ")";
            }
        } else if (auto* i2 = e->as<LIf>()) {
            used_if = true;
            os << "ifFunction(";
            expr(os, i2->cond, 0);
            os << ", ";
            expr(os, i2->a, 0);
            os << ", ";
            expr(os, i2->b, 0);
            os << ")";
        } else if (auto* im = e->as<LImplies>()) {
            used_implies = true;
            os << "impliesFunction(";
            expr(os, im->a, 0);
            os << ", ";
            expr(os, im->b, 0);
            os << ")";
        } else if (auto* ar = e->as<LArrow>()) {
            used_arrow = true;
            os << "arrowFunction(" << names.at(p.persistents[0].name) << ", ";
            expr(os, ar->a, 0);
            os << ", ";
            expr(os, ar->b, 0);
            os << ")";
        } else if (auto* md = e->as<LMod>()) {
            os << "mod(";
            expr(os, md->a, 0);
            os << ", ";
            expr(os, md->b, 0);
            os << ")";
        }
        if (paren) os << ")";
    }

    std::string matlab_default(const LoweredType& t) {
        switch (t.kind) {
            case LoweredType::Kind::Bool: return "true";
            case LoweredType::Kind::FixedInt: return t.to_string() + "(0)";
            case LoweredType::Kind::Float: return t.to_string() + "(0)";
            case LoweredType::Kind::Struct: {
                // struct('f', default, ...) literal
                const StructLayout* layout = p.layout(t.struct_name);
                std::string out = "struct(";
                bool first = true;
                for (const auto& [fn, ft] : layout->fields) {
                    if (!first) out += ", ";
                    first = false;
                    out += "'" + fn + "', " + matlab_default(ft);
                }
                return out + ")";
            }
        }
        return "0";
    }

    // Single-use synthetic locals feeding one intrinsic are folded back into
    // the call so assumptions read as a single expression.
    std::unordered_map<size_t, LExprPtr> inlined;
    std::unordered_set<size_t> skip_assign;

    void plan_inlining() {
        std::unordered_map<size_t, int> uses;
        std::function<void(const LExprPtr&)> scan = [&](const LExprPtr& e) {
            if (auto* v = e->as<LVar>()) {
                ++uses[v->slot];
                return;
            }
            if (auto* s = e->as<LSelect>()) scan(s->base);
            else if (auto* u = e->as<LUnary>()) scan(u->a);
            else if (auto* b = e->as<LBinary>()) { scan(b->a); scan(b->b); }
            else if (auto* i = e->as<LIf>()) { scan(i->cond); scan(i->a); scan(i->b); }
            else if (auto* im = e->as<LImplies>()) { scan(im->a); scan(im->b); }
            else if (auto* ar = e->as<LArrow>()) { scan(ar->a); scan(ar->b); }
            else if (auto* m = e->as<LMod>()) { scan(m->a); scan(m->b); }
            else if (auto* q = e->as<LIsEqual>()) { scan(q->a); scan(q->b); }
        };
        for (const auto& st : p.body) {
            if (auto* a = std::get_if<SAssign>(&st)) scan(a->expr);
            else if (auto* as = std::get_if<SAssume>(&st)) scan(as->arg);
            else if (auto* pr = std::get_if<SProve>(&st)) scan(pr->arg);
            else if (auto* u = std::get_if<SUpdate>(&st)) scan(u->expr);
        }
        std::unordered_map<size_t, LExprPtr> defs;
        for (const auto& st : p.body)
            if (auto* a = std::get_if<SAssign>(&st))
                if (a->slot >= p.params.size() && p.locals[a->slot - p.params.size()].synthetic)
                    defs[a->slot] = a->expr;
        auto intrinsic_arg_slot = [&](const Stmt& st) -> std::optional<size_t> {
            const LExprPtr* arg = nullptr;
            if (auto* as = std::get_if<SAssume>(&st)) arg = &as->arg;
            if (auto* pr = std::get_if<SProve>(&st)) arg = &pr->arg;
            if (!arg) return std::nullopt;
            if (auto* v = (*arg)->as<LVar>()) return v->slot;
            return std::nullopt;
        };
        for (const auto& st : p.body) {
            auto slot = intrinsic_arg_slot(st);
            if (!slot || !defs.count(*slot) || uses[*slot] != 1) continue;
            inlined[*slot] = defs[*slot];
            skip_assign.insert(*slot);
        }
    }

    std::string run() {
        plan_inlining();
        std::ostringstream body;
        for (const auto& st : p.body) {
            if (auto* a = std::get_if<SAssign>(&st)) {
                if (skip_assign.count(a->slot)) continue;
                body << names.at(a->name) << " = ";
                expr(body, a->expr, 0);
                body << ";\n";
            } else if (auto* as = std::get_if<SAssume>(&st)) {
                body << "sldv.assume(";
                emit_intrinsic_arg(body, as->arg);
                body << ");\n";
            } else if (auto* pr = std::get_if<SProve>(&st)) {
                body << "sldv.prove(";
                emit_intrinsic_arg(body, pr->arg);
                body << ");\n";
            } else if (auto* u = std::get_if<SUpdate>(&st)) {
                body << names.at(u->name) << " = ";
                expr(body, u->expr, 0);
                body << ";\n";
            } else {
                body << names.at(p.persistents[0].name) << " = false;\n";
            }
        }

        std::ostringstream os;
        std::string fname = matlab_sanitize_one(p.name) + (p.model_mode ? "_model" : "_observer");
        os << "function " << fname << "(";
        for (size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << names.at(p.params[i].name);
        os << ")\n";
        for (const auto& pe : p.persistents) os << "persistent " << names.at(pe.name) << ";\n";
        os << "if isempty(" << names.at(p.persistents[0].name) << ")\n";
        for (const auto& pe : p.persistents)
            os << "    " << names.at(pe.name) << " = " << matlab_default(pe.type) << ";\n";
        os << "end\n";
        os << body.str();
        os << "end\n";
        if (used_if)
            os << "\nfunction r = ifFunction(c, a, b)\nif c\n    r = a;\nelse\n    r = b;\nend\nend\n";
        if (used_implies) os << "\nfunction r = impliesFunction(a, b)\nr = ~a || b;\nend\n";
        if (used_arrow)
            os << "\nfunction r = arrowFunction(first, a, b)\nif first\n    r = a;\nelse\n    r = b;\nend\nend\n";
        return os.str();
    }

    void emit_intrinsic_arg(std::ostream& os, const LExprPtr& arg) {
        if (auto* v = arg->as<LVar>()) {
            auto it = inlined.find(v->slot);
            if (it != inlined.end()) {
                expr(os, it->second, 0);
                return;
            }
        }
        expr(os, arg, 0);
    }
};

// ---------------------------------------------------------------- OSL parser

struct OslParser {
    std::vector<Token> toks;
    size_t pos = 0;
    ObserverProgram prog;
    std::unordered_map<std::string, LoweredType> var_types;     // params + lets
    std::unordered_map<std::string, size_t> persistent_index;

    explicit OslParser(const std::string& text) : toks(lex(text, /*allow_reserved=*/true)) {}

    const Token& peek() const { return toks[std::min(pos, toks.size() - 1)]; }
    bool at_word(const char* w) const {
        return (peek().kind == Tok::Identifier && peek().text == w) || keyword_is(w);
    }
    bool keyword_is(const char* w) const {
        switch (peek().kind) {
            case Tok::KwRecord: return std::string("record") == w;
            case Tok::KwAssume: return std::string("assume") == w;
            case Tok::KwBool: return std::string("bool") == w;
            case Tok::KwTrue: return std::string("true") == w;
            case Tok::KwFalse: return std::string("false") == w;
            default: return false;
        }
    }
    void expect_word(const char* w) {
        if (!at_word(w)) fail(std::string("expected '") + w + "', got " + token_name(peek().kind), peek().span);
        ++pos;
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what + ", got " + token_name(peek().kind), peek().span);
        return toks[pos++];
    }
    bool match(Tok k) {
        if (peek().kind != k) return false;
        ++pos;
        return true;
    }
    std::string ident() {
        if (peek().kind != Tok::Identifier) fail("expected identifier", peek().span);
        return toks[pos++].text;
    }

    static bool scalar_type_name(const std::string& s, LoweredType& out) {
        if (s == "int8") out = LoweredType::fixed_int(8, true);
        else if (s == "int16") out = LoweredType::fixed_int(16, true);
        else if (s == "int32") out = LoweredType::fixed_int(32, true);
        else if (s == "uint8") out = LoweredType::fixed_int(8, false);
        else if (s == "uint16") out = LoweredType::fixed_int(16, false);
        else if (s == "uint32") out = LoweredType::fixed_int(32, false);
        else if (s == "single") out = LoweredType::floating(FloatPrec::Single);
        else if (s == "double") out = LoweredType::floating(FloatPrec::Double);
        else return false;
        return true;
    }

    LoweredType type() {
        if (match(Tok::KwBool)) return LoweredType::boolean();
        std::string name = ident();
        LoweredType t;
        if (scalar_type_name(name, t)) return t;
        if (!prog.layout(name)) fail("unknown type '" + name + "'", peek().span);
        return LoweredType::structure(name);
    }

    ObserverProgram parse() {
        expect_word("osl");
        const Token& ver = expect(Tok::IntLit, "version");
        if (ver.text != "1") fail("unsupported osl version " + ver.text, ver.span);
        expect(Tok::Semi, "';'");
        if (at_word("model")) {
            ++pos;
            prog.model_mode = true;
        } else {
            expect_word("observer");
        }
        prog.name = ident();
        expect(Tok::LBrace, "'{'");
        while (at_word("record")) record();
        while (at_word("param")) param();
        while (at_word("persistent")) persistent();
        expect_word("step");
        expect(Tok::LBrace, "'{'");
        while (!match(Tok::RBrace)) stmt();
        expect(Tok::RBrace, "'}'");
        expect(Tok::EndOfFile, "end of file");
        if (prog.persistents.empty() || prog.persistents[0].type.kind != LoweredType::Kind::Bool)
            fail("osl file must declare the Boolean first-step flag as its first persistent");
        return std::move(prog);
    }

    void record() {
        ++pos;
        StructLayout s;
        s.name = ident();
        expect(Tok::LBrace, "'{'");
        while (!match(Tok::RBrace)) {
            std::string fn = ident();
            expect(Tok::Colon, "':'");
            s.fields.emplace_back(fn, type());
            expect(Tok::Semi, "';'");
        }
        prog.structs.push_back(std::move(s));
    }

    void param() {
        ++pos;
        std::string name = ident();
        expect(Tok::Colon, "':'");
        LoweredType t = type();
        bool out = false;
        if (at_word("out")) {
            ++pos;
            out = true;
        }
        expect(Tok::Semi, "';'");
        var_types[name] = t;
        prog.params.push_back({name, t, out});
    }

    void persistent() {
        ++pos;
        std::string name = ident();
        expect(Tok::Colon, "':'");
        LoweredType t = type();
        expect(Tok::EqOp, "'='");
        // default value is type-determined; parse and discard the literal
        if (at_word("default")) {
            ++pos;
        } else if (match(Tok::KwTrue) || match(Tok::KwFalse)) {
        } else {
            ident(); // cast name
            expect(Tok::LParen, "'('");
            match(Tok::Minus);
            if (!match(Tok::IntLit)) expect(Tok::RealLit, "literal");
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Semi, "';'");
        persistent_index[name] = prog.persistents.size();
        prog.persistents.push_back({name, t, ""});
    }

    void stmt() {
        if (at_word("let")) {
            ++pos;
            bool out = false;
            if (at_word("out") && pos + 1 < toks.size() && toks[pos + 1].kind == Tok::Identifier) {
                ++pos;
                out = true;
            }
            std::string name = ident();
            expect(Tok::Colon, "':'");
            LoweredType t = type();
            expect(Tok::EqOp, "'='");
            LExprPtr e = expr();
            expect(Tok::Semi, "';'");
            if (e->type != t) fail("let '" + name + "' type mismatch");
            var_types[name] = t;
            prog.locals.push_back({name, t, out, name.rfind("__t", 0) == 0});
            prog.body.push_back(SAssign{prog.slot_of(name).value(), name, e});
            return;
        }
        if (at_word("assume") || at_word("prove")) {
            bool is_assume = at_word("assume");
            ++pos;
            std::string label = expect(Tok::StringLit, "label").text;
            expect(Tok::Colon, "':'");
            LExprPtr e = expr();
            expect(Tok::Semi, "';'");
            if (e->type.kind != LoweredType::Kind::Bool) fail("intrinsic argument must be bool");
            if (is_assume) prog.body.push_back(SAssume{label, e});
            else prog.body.push_back(SProve{label, e});
            return;
        }
        if (at_word("update")) {
            ++pos;
            std::string name = ident();
            auto it = persistent_index.find(name);
            if (it == persistent_index.end()) fail("update of unknown persistent '" + name + "'");
            expect(Tok::EqOp, "'='");
            LExprPtr e = expr();
            expect(Tok::Semi, "';'");
            prog.body.push_back(SUpdate{it->second, name, e});
            return;
        }
        if (!prog.persistents.empty() && peek().kind == Tok::Identifier &&
            peek().text == prog.persistents[0].name) {
            ++pos;
            expect(Tok::EqOp, "'='");
            expect(Tok::KwFalse, "'false'");
            expect(Tok::Semi, "';'");
            prog.body.push_back(SFirstTimeFalse{});
            return;
        }
        fail(std::string("expected a statement, got ") + token_name(peek().kind), peek().span);
    }

    // expressions, same precedence ladder as the contract grammar
    LExprPtr expr() { return orx(); }

    LExprPtr orx() {
        LExprPtr lhs = andx();
        while (peek().kind == Tok::KwOr) {
            ++pos;
            LExprPtr rhs = andx();
            lhs = make_lexpr(LBinary{LBinKind::Or, lhs, rhs}, LoweredType::boolean());
        }
        return lhs;
    }
    LExprPtr andx() {
        LExprPtr lhs = notx();
        while (peek().kind == Tok::KwAnd) {
            ++pos;
            LExprPtr rhs = notx();
            lhs = make_lexpr(LBinary{LBinKind::And, lhs, rhs}, LoweredType::boolean());
        }
        return lhs;
    }
    LExprPtr notx() {
        if (peek().kind == Tok::KwNot) {
            ++pos;
            LExprPtr a = notx();
            return make_lexpr(LUnary{LUnKind::Not, a}, LoweredType::boolean());
        }
        return cmp();
    }
    LExprPtr cmp() {
        LExprPtr lhs = add();
        for (;;) {
            LBinKind op;
            bool isequal = false, negated = false;
            if (match(Tok::Lt)) op = LBinKind::Lt;
            else if (match(Tok::Le)) op = LBinKind::Le;
            else if (match(Tok::Gt)) op = LBinKind::Gt;
            else if (match(Tok::Ge)) op = LBinKind::Ge;
            else if (match(Tok::EqOp)) { isequal = true; }
            else if (match(Tok::Ne)) { isequal = true; negated = true; }
            else break;
            LExprPtr rhs = add();
            if (isequal)
                lhs = make_lexpr(LIsEqual{lhs, rhs, negated}, LoweredType::boolean());
            else
                lhs = make_lexpr(LBinary{op, lhs, rhs}, LoweredType::boolean());
        }
        return lhs;
    }
    LExprPtr add() {
        LExprPtr lhs = mul();
        for (;;) {
            LBinKind op;
            if (match(Tok::Plus)) op = LBinKind::Add;
            else if (match(Tok::Minus)) op = LBinKind::Sub;
            else break;
            LExprPtr rhs = mul();
            lhs = make_lexpr(LBinary{op, lhs, rhs}, lhs->type);
        }
        return lhs;
    }
    LExprPtr mul() {
        LExprPtr lhs = unary();
        for (;;) {
            if (match(Tok::Star)) {
                LExprPtr rhs = unary();
                lhs = make_lexpr(LBinary{LBinKind::Mul, lhs, rhs}, lhs->type);
            } else if (match(Tok::Slash)) {
                LExprPtr rhs = unary();
                lhs = make_lexpr(LBinary{LBinKind::FDiv, lhs, rhs}, lhs->type);
            } else if (peek().kind == Tok::KwDiv) {
                ++pos;
                LExprPtr rhs = unary();
                lhs = make_lexpr(LBinary{LBinKind::IDiv, lhs, rhs}, lhs->type);
            } else if (peek().kind == Tok::KwMod) {
                ++pos;
                LExprPtr rhs = unary();
                lhs = make_lexpr(LMod{lhs, rhs}, lhs->type);
            } else {
                break;
            }
        }
        return lhs;
    }
    LExprPtr unary() {
        if (match(Tok::Minus)) {
            LExprPtr a = unary();
            return make_lexpr(LUnary{LUnKind::Neg, a}, a->type);
        }
        return postfix();
    }
    LExprPtr postfix() {
        LExprPtr e = primary();
        while (match(Tok::Dot)) {
            std::string field = ident();
            const StructLayout* layout = prog.layout(e->type.struct_name);
            if (e->type.kind != LoweredType::Kind::Struct || !layout)
                fail("selection on non-record value");
            bool found = false;
            for (size_t k = 0; k < layout->fields.size(); ++k)
                if (layout->fields[k].first == field) {
                    e = make_lexpr(LSelect{e, k, field}, layout->fields[k].second);
                    found = true;
                    break;
                }
            if (!found) fail("record '" + layout->name + "' has no field '" + field + "'");
        }
        return e;
    }

    LExprPtr call_args(const std::string& callee) {
        std::vector<LExprPtr> args;
        expect(Tok::LParen, "'('");
        if (peek().kind != Tok::RParen) {
            do {
                args.push_back(expr());
            } while (match(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        if (callee == "ifFunction") {
            if (args.size() != 3) fail("ifFunction takes 3 arguments");
            return make_lexpr(LIf{args[0], args[1], args[2]}, args[1]->type);
        }
        if (callee == "impliesFunction") {
            if (args.size() != 2) fail("impliesFunction takes 2 arguments");
            return make_lexpr(LImplies{args[0], args[1]}, LoweredType::boolean());
        }
        if (callee == "arrowFunction") {
            if (args.size() != 3) fail("arrowFunction takes (flag, a, b)");
            auto* flag = args[0]->as<LPersist>();
            if (!flag || flag->pslot != 0) fail("arrowFunction's first argument must be the first-step flag");
            return make_lexpr(LArrow{args[1], args[2]}, args[1]->type);
        }
        fail("unknown function '" + callee + "'");
    }

    LExprPtr primary() {
        if (match(Tok::KwTrue)) return make_lexpr(LBool{true}, LoweredType::boolean());
        if (match(Tok::KwFalse)) return make_lexpr(LBool{false}, LoweredType::boolean());
        if (match(Tok::LParen)) {
            LExprPtr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (peek().kind == Tok::IntLit || peek().kind == Tok::RealLit)
            fail("bare literal in OSL; literals must be cast, e.g. int32(5)", peek().span);
        std::string name = ident();
        LoweredType cast_type;
        if (scalar_type_name(name, cast_type)) {
            expect(Tok::LParen, "'('");
            bool neg = match(Tok::Minus);
            std::string text;
            if (peek().kind == Tok::IntLit || peek().kind == Tok::RealLit) text = toks[pos++].text;
            else fail("cast expects a literal", peek().span);
            expect(Tok::RParen, "')'");
            if (neg) text = "-" + text;
            if (cast_type.kind == LoweredType::Kind::FixedInt) {
                int64_t v = std::strtoll(text.c_str(), nullptr, 10);
                return make_lexpr(LInt{v}, cast_type);
            }
            double d = cast_type.precision == FloatPrec::Single ? std::strtof(text.c_str(), nullptr)
                                                                : std::strtod(text.c_str(), nullptr);
            return make_lexpr(LFloat{d, text}, cast_type);
        }
        if (peek().kind == Tok::LParen) return call_args(name);
        // variable, local, or persistent read
        auto it = var_types.find(name);
        if (it != var_types.end()) {
            auto slot = prog.slot_of(name);
            return make_lexpr(LVar{*slot, name}, it->second);
        }
        auto pit = persistent_index.find(name);
        if (pit != persistent_index.end())
            return make_lexpr(LPersist{pit->second, name}, prog.persistents[pit->second].type);
        fail("unknown identifier '" + name + "'");
    }
};

LExprPtr expr_from_json(const json& j, ObserverProgram& prog,
                        const std::unordered_map<std::string, size_t>& persistent_index);

LoweredType type_from_string(const std::string& s, const ObserverProgram& prog) {
    LoweredType t;
    if (s == "bool") return LoweredType::boolean();
    if (OslParser::scalar_type_name(s, t)) return t;
    if (prog.layout(s)) return LoweredType::structure(s);
    fail("unknown type '" + s + "' in JSON");
}

LExprPtr expr_from_json(const json& j, ObserverProgram& prog,
                        const std::unordered_map<std::string, size_t>& persistent_index) {
    const std::string kind = j.at("kind").get<std::string>();
    LoweredType t = type_from_string(j.at("type").get<std::string>(), prog);
    auto arg = [&](size_t i) { return expr_from_json(j.at("args").at(i), prog, persistent_index); };
    if (kind == "bool") return make_lexpr(LBool{j.at("value").get<bool>()}, t);
    if (kind == "int") return make_lexpr(LInt{j.at("value").get<int64_t>()}, t);
    if (kind == "real") {
        std::string text = j.at("text").get<std::string>();
        double d = t.precision == FloatPrec::Single ? std::strtof(text.c_str(), nullptr)
                                                    : std::strtod(text.c_str(), nullptr);
        return make_lexpr(LFloat{d, text}, t);
    }
    if (kind == "var") {
        std::string name = j.at("name").get<std::string>();
        auto slot = prog.slot_of(name);
        if (!slot) fail("unknown var '" + name + "' in JSON");
        return make_lexpr(LVar{*slot, name}, t);
    }
    if (kind == "persistent") {
        std::string name = j.at("name").get<std::string>();
        auto it = persistent_index.find(name);
        if (it == persistent_index.end()) fail("unknown persistent '" + name + "' in JSON");
        return make_lexpr(LPersist{it->second, name}, t);
    }
    if (kind == "select") {
        LExprPtr base = expr_from_json(j.at("base"), prog, persistent_index);
        std::string field = j.at("field").get<std::string>();
        const StructLayout* layout = prog.layout(base->type.struct_name);
        for (size_t k = 0; layout && k < layout->fields.size(); ++k)
            if (layout->fields[k].first == field) return make_lexpr(LSelect{base, k, field}, t);
        fail("bad select in JSON");
    }
    if (kind == "not") return make_lexpr(LUnary{LUnKind::Not, expr_from_json(j.at("arg"), prog, persistent_index)}, t);
    if (kind == "neg") return make_lexpr(LUnary{LUnKind::Neg, expr_from_json(j.at("arg"), prog, persistent_index)}, t);
    static const std::unordered_map<std::string, LBinKind> bins = {
        {"add", LBinKind::Add}, {"sub", LBinKind::Sub}, {"mul", LBinKind::Mul},
        {"fdiv", LBinKind::FDiv}, {"idiv", LBinKind::IDiv}, {"lt", LBinKind::Lt},
        {"le", LBinKind::Le}, {"gt", LBinKind::Gt}, {"ge", LBinKind::Ge},
        {"and", LBinKind::And}, {"or", LBinKind::Or}};
    auto bit = bins.find(kind);
    if (bit != bins.end()) return make_lexpr(LBinary{bit->second, arg(0), arg(1)}, t);
    if (kind == "ifFunction") return make_lexpr(LIf{arg(0), arg(1), arg(2)}, t);
    if (kind == "impliesFunction") return make_lexpr(LImplies{arg(0), arg(1)}, t);
    if (kind == "arrowFunction") return make_lexpr(LArrow{arg(0), arg(1)}, t);
    if (kind == "mod") return make_lexpr(LMod{arg(0), arg(1)}, t);
    if (kind == "isequal") return make_lexpr(LIsEqual{arg(0), arg(1), false}, t);
    if (kind == "isnotequal") return make_lexpr(LIsEqual{arg(0), arg(1), true}, t);
    fail("unknown expr kind '" + kind + "' in JSON");
}

} // namespace

std::string emit(const ObserverProgram& p, EmitTarget target) {
    switch (target) {
        case EmitTarget::Osl: return emit_osl(p);
        case EmitTarget::Json: return emit_json(p);
        case EmitTarget::MatlabCompatible: {
            MatlabEmitter m(p);
            return m.run();
        }
    }
    return {};
}

ObserverProgram parse_osl(const std::string& text) {
    OslParser parser(text);
    return parser.parse();
}

ObserverProgram parse_osl_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("bad JSON: ") + e.what());
    }
    if (!j.contains("osl_version") || j.at("osl_version").get<int>() != 1)
        fail("unsupported or missing osl_version");
    ObserverProgram prog;
    prog.model_mode = j.at("kind").get<std::string>() == "model";
    prog.name = j.at("name").get<std::string>();
    for (const auto& r : j.at("records")) {
        StructLayout s;
        s.name = r.at("name").get<std::string>();
        for (const auto& f : r.at("fields"))
            s.fields.emplace_back(f.at("name").get<std::string>(),
                                  type_from_string(f.at("type").get<std::string>(), prog));
        prog.structs.push_back(std::move(s));
    }
    for (const auto& prm : j.at("params"))
        prog.params.push_back({prm.at("name").get<std::string>(),
                               type_from_string(prm.at("type").get<std::string>(), prog),
                               prm.at("output").get<bool>()});
    std::unordered_map<std::string, size_t> persistent_index;
    for (const auto& pe : j.at("persistents")) {
        std::string name = pe.at("name").get<std::string>();
        persistent_index[name] = prog.persistents.size();
        prog.persistents.push_back({name, type_from_string(pe.at("type").get<std::string>(), prog),
                                    pe.value("pre_key", std::string())});
    }
    for (const auto& st : j.at("body")) {
        const std::string stmt = st.at("stmt").get<std::string>();
        if (stmt == "let") {
            std::string name = st.at("name").get<std::string>();
            LExprPtr e = expr_from_json(st.at("expr"), prog, persistent_index);
            prog.locals.push_back({name, e->type, st.value("output", false), name.rfind("__t", 0) == 0});
            prog.body.push_back(SAssign{prog.slot_of(name).value(), name, e});
        } else if (stmt == "assume") {
            prog.body.push_back(SAssume{st.at("label").get<std::string>(),
                                        expr_from_json(st.at("expr"), prog, persistent_index)});
        } else if (stmt == "prove") {
            prog.body.push_back(SProve{st.at("label").get<std::string>(),
                                       expr_from_json(st.at("expr"), prog, persistent_index)});
        } else if (stmt == "update") {
            std::string name = st.at("name").get<std::string>();
            auto it = persistent_index.find(name);
            if (it == persistent_index.end()) fail("update of unknown persistent in JSON");
            prog.body.push_back(SUpdate{it->second, name, expr_from_json(st.at("expr"), prog, persistent_index)});
        } else if (stmt == "first_time_false") {
            prog.body.push_back(SFirstTimeFalse{});
        } else {
            fail("unknown statement '" + stmt + "' in JSON");
        }
    }
    if (prog.persistents.empty() || prog.persistents[0].type.kind != LoweredType::Kind::Bool)
        fail("JSON program must declare the Boolean first-step flag as its first persistent");
    return prog;
}

} // namespace c2o
