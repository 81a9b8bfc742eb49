#include "c2o/parser.hpp"

#include "c2o/lexer.hpp"

#include <utility>

namespace c2o {

ExprPtr make_expr(ExprNode node, Span span, SemType type) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->span = span;
    e->type = type;
    return e;
}

namespace {

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Contract contract() {
        Contract c;
        expect(Tok::KwComponent, "expected 'component'");
        c.name = expect(Tok::Identifier, "expected component name").text;
        expect(Tok::LBrace, "expected '{' after component name");
        while (!check(Tok::RBrace)) {
            switch (peek().kind) {
                case Tok::KwRecord: record_decl(c); break;
                case Tok::KwInput:
                case Tok::KwOutput: io_decl(c); break;
                case Tok::KwNode: node_decl(c); break;
                case Tok::KwAssume: labeled(c.assumes); break;
                case Tok::KwGuarantee: labeled(c.guarantees); break;
                case Tok::KwEq: eq_decl(c); break;
                case Tok::EndOfFile:
                    fail(peek().span, "unterminated component body; expected '}'");
                default:
                    fail(peek().span, std::string("expected a declaration, got ") + token_name(peek().kind));
            }
        }
        expect(Tok::RBrace, "expected '}'");
        expect(Tok::EndOfFile, "trailing input after component");
        return c;
    }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& prev() const { return toks_[pos_ - 1]; }
    bool check(Tok k) const { return peek().kind == k; }
    bool match(Tok k) {
        if (!check(k)) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok k, const std::string& msg) {
        if (!check(k)) fail(peek().span, msg + ", got " + token_name(peek().kind));
        return toks_[pos_++];
    }
    [[noreturn]] static void fail(Span sp, std::string msg) {
        throw CompileError(Diagnostic{Severity::Error, DiagCode::ParseError, sp, std::move(msg)});
    }

    SemType type() {
        if (match(Tok::KwBool)) return SemType::boolean();
        if (match(Tok::KwInt)) return SemType::integer();
        if (match(Tok::KwReal)) return SemType::real();
        if (check(Tok::Identifier)) return SemType::record(expect(Tok::Identifier, "").text);
        fail(peek().span, std::string("expected a type, got ") + token_name(peek().kind));
    }

    void record_decl(Contract& c) {
        Span sp = peek().span;
        expect(Tok::KwRecord, "");
        RecordDecl rd;
        rd.span = sp;
        rd.name = expect(Tok::Identifier, "expected record name").text;
        expect(Tok::LBrace, "expected '{' after record name");
        while (!match(Tok::RBrace)) {
            std::string fname = expect(Tok::Identifier, "expected field name").text;
            expect(Tok::Colon, "expected ':' after field name");
            rd.fields.emplace_back(std::move(fname), type());
            expect(Tok::Semi, "expected ';' after field declaration");
        }
        c.records.decls.push_back(std::move(rd));
    }

    void io_decl(Contract& c) {
        bool is_input = peek().kind == Tok::KwInput;
        Span sp = peek().span;
        ++pos_;
        Port p;
        p.span = sp;
        p.name = expect(Tok::Identifier, "expected port name").text;
        expect(Tok::Colon, "expected ':' after port name");
        p.type = type();
        expect(Tok::Semi, "expected ';' after port declaration");
        (is_input ? c.inputs : c.outputs).push_back(std::move(p));
    }

    void node_decl(Contract& c) {
        Span sp = peek().span;
        expect(Tok::KwNode, "");
        NodeDef nd;
        nd.span = sp;
        nd.name = expect(Tok::Identifier, "expected node name").text;
        expect(Tok::LParen, "expected '(' after node name");
        if (!check(Tok::RParen)) {
            do {
                std::string pname = expect(Tok::Identifier, "expected parameter name").text;
                expect(Tok::Colon, "expected ':' after parameter name");
                nd.params.emplace_back(std::move(pname), type());
            } while (match(Tok::Comma));
        }
        expect(Tok::RParen, "expected ')' after node parameters");
        expect(Tok::Colon, "expected ':' before node result type");
        nd.result = type();
        expect(Tok::EqOp, "expected '=' before node body");
        nd.body = expr();
        expect(Tok::Semi, "expected ';' after node body");
        c.nodes.push_back(std::move(nd));
    }

    void labeled(std::vector<LabeledExpr>& dst) {
        Span sp = peek().span;
        ++pos_; // assume / guarantee keyword
        LabeledExpr le;
        le.span = sp;
        le.label = expect(Tok::StringLit, "expected a label string").text;
        expect(Tok::Colon, "expected ':' after label");
        le.expr = expr();
        expect(Tok::Semi, "expected ';' after expression");
        dst.push_back(std::move(le));
    }

    void eq_decl(Contract& c) {
        Span sp = peek().span;
        expect(Tok::KwEq, "");
        EqDef e;
        e.span = sp;
        e.name = expect(Tok::Identifier, "expected variable name").text;
        expect(Tok::Colon, "expected ':' after variable name");
        e.type = type();
        expect(Tok::EqOp, "expected '='");
        e.expr = expr();
        expect(Tok::Semi, "expected ';' after equation");
        c.eqs.push_back(std::move(e));
    }

    // Precedence, lowest to highest: -> , =>, or, and, not, comparisons,
    // + -, * / div mod, unary -, pre, selection/call.
    ExprPtr expr() { return arrow(); }

    ExprPtr arrow() {
        ExprPtr lhs = implies();
        if (match(Tok::Arrow)) {
            ExprPtr rhs = arrow(); // right-assoc
            Span sp = lhs->span.merge(rhs->span);
            return make_expr(Arrow{lhs, rhs}, sp);
        }
        return lhs;
    }

    ExprPtr implies() {
        ExprPtr lhs = orx();
        if (match(Tok::Implies)) {
            ExprPtr rhs = implies(); // right-assoc
            Span sp = lhs->span.merge(rhs->span);
            return make_expr(Binary{BinOp::Implies, lhs, rhs}, sp);
        }
        return lhs;
    }

    ExprPtr orx() {
        ExprPtr lhs = andx();
        while (match(Tok::KwOr)) {
            ExprPtr rhs = andx();
            lhs = make_expr(Binary{BinOp::Or, lhs, rhs}, lhs->span.merge(rhs->span));
        }
        return lhs;
    }

    ExprPtr andx() {
        ExprPtr lhs = notx();
        while (match(Tok::KwAnd)) {
            ExprPtr rhs = notx();
            lhs = make_expr(Binary{BinOp::And, lhs, rhs}, lhs->span.merge(rhs->span));
        }
        return lhs;
    }

    ExprPtr notx() {
        if (check(Tok::KwNot)) {
            Span sp = peek().span;
            ++pos_;
            ExprPtr operand = notx();
            return make_expr(Unary{UnOp::Not, operand}, sp.merge(operand->span));
        }
        return cmp();
    }

    ExprPtr cmp() {
        ExprPtr lhs = add();
        for (;;) {
            BinOp op;
            if (match(Tok::Lt)) op = BinOp::Lt;
            else if (match(Tok::Le)) op = BinOp::Le;
            else if (match(Tok::Gt)) op = BinOp::Gt;
            else if (match(Tok::Ge)) op = BinOp::Ge;
            else if (match(Tok::EqOp)) op = BinOp::Eq;
            else if (match(Tok::Ne)) op = BinOp::Ne;
            else break;
            ExprPtr rhs = add();
            lhs = make_expr(Binary{op, lhs, rhs}, lhs->span.merge(rhs->span));
        }
        return lhs;
    }

    ExprPtr add() {
        ExprPtr lhs = mul();
        for (;;) {
            BinOp op;
            if (match(Tok::Plus)) op = BinOp::Add;
            else if (match(Tok::Minus)) op = BinOp::Sub;
            else break;
            ExprPtr rhs = mul();
            lhs = make_expr(Binary{op, lhs, rhs}, lhs->span.merge(rhs->span));
        }
        return lhs;
    }

    ExprPtr mul() {
        ExprPtr lhs = neg();
        for (;;) {
            BinOp op;
            if (match(Tok::Star)) op = BinOp::Mul;
            else if (match(Tok::Slash)) op = BinOp::RealDiv;
            else if (match(Tok::KwDiv)) op = BinOp::IntDiv;
            else if (match(Tok::KwMod)) op = BinOp::Mod;
            else break;
            ExprPtr rhs = neg();
            lhs = make_expr(Binary{op, lhs, rhs}, lhs->span.merge(rhs->span));
        }
        return lhs;
    }

    ExprPtr neg() {
        if (check(Tok::Minus)) {
            Span sp = peek().span;
            ++pos_;
            ExprPtr operand = neg();
            return make_expr(Unary{UnOp::Neg, operand}, sp.merge(operand->span));
        }
        return prex();
    }

    ExprPtr prex() {
        if (check(Tok::KwPre)) {
            Span sp = peek().span;
            ++pos_;
            ExprPtr operand = prex();
            return make_expr(Pre{operand}, sp.merge(operand->span));
        }
        return postfix();
    }

    ExprPtr postfix() {
        ExprPtr e = primary();
        while (match(Tok::Dot)) {
            const Token& field = expect(Tok::Identifier, "expected field name after '.'");
            e = make_expr(FieldSelect{e, field.text}, e->span.merge(field.span));
        }
        return e;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::KwTrue:
                ++pos_;
                return make_expr(BoolLit{true}, t.span);
            case Tok::KwFalse:
                ++pos_;
                return make_expr(BoolLit{false}, t.span);
            case Tok::IntLit:
                ++pos_;
                return make_expr(IntLit{BigInt::from_string(t.text)}, t.span);
            case Tok::RealLit:
                ++pos_;
                return make_expr(RealLit{BigRational::from_decimal_string(t.text), t.text}, t.span);
            case Tok::LParen: {
                ++pos_;
                ExprPtr e = expr();
                expect(Tok::RParen, "expected ')'");
                return e;
            }
            case Tok::KwIf: {
                Span sp = t.span;
                ++pos_;
                ExprPtr c = expr();
                expect(Tok::KwThen, "expected 'then'");
                ExprPtr a = expr();
                expect(Tok::KwElse, "expected 'else'");
                ExprPtr b = expr(); // else branch extends maximally
                return make_expr(Ite{c, a, b}, sp.merge(b->span));
            }
            case Tok::Identifier: {
                ++pos_;
                if (match(Tok::LParen)) {
                    Call call;
                    call.callee = t.text;
                    if (!check(Tok::RParen)) {
                        do {
                            call.args.push_back(expr());
                        } while (match(Tok::Comma));
                    }
                    Span end = expect(Tok::RParen, "expected ')' after arguments").span;
                    return make_expr(std::move(call), t.span.merge(end));
                }
                return make_expr(VarRef{t.text}, t.span);
            }
            default:
                fail(t.span, std::string("expected an expression, got ") + token_name(t.kind));
        }
    }
};

} // namespace

Contract parse_syntax(std::string_view source) {
    Parser p(lex(source));
    return p.contract();
}

Contract parse_contract(std::string_view source) {
    return check(parse_syntax(source));
}

} // namespace c2o
