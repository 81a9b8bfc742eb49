#include "c2o/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace c2o {

namespace {

const std::unordered_map<std::string_view, Tok> kKeywords = {
    {"component", Tok::KwComponent}, {"input", Tok::KwInput}, {"output", Tok::KwOutput},
    {"record", Tok::KwRecord}, {"node", Tok::KwNode}, {"assume", Tok::KwAssume},
    {"guarantee", Tok::KwGuarantee}, {"eq", Tok::KwEq},
    {"bool", Tok::KwBool}, {"int", Tok::KwInt}, {"real", Tok::KwReal},
    {"true", Tok::KwTrue}, {"false", Tok::KwFalse},
    {"if", Tok::KwIf}, {"then", Tok::KwThen}, {"else", Tok::KwElse},
    {"not", Tok::KwNot}, {"and", Tok::KwAnd}, {"or", Tok::KwOr},
    {"div", Tok::KwDiv}, {"mod", Tok::KwMod}, {"pre", Tok::KwPre},
};

[[noreturn]] void fail(Span span, std::string msg) {
    throw CompileError(Diagnostic{Severity::Error, DiagCode::LexError, span, std::move(msg)});
}

} // namespace

const char* token_name(Tok t) {
    switch (t) {
        case Tok::Identifier: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::RealLit: return "real literal";
        case Tok::StringLit: return "string literal";
        case Tok::KwComponent: return "'component'";
        case Tok::KwInput: return "'input'";
        case Tok::KwOutput: return "'output'";
        case Tok::KwRecord: return "'record'";
        case Tok::KwNode: return "'node'";
        case Tok::KwAssume: return "'assume'";
        case Tok::KwGuarantee: return "'guarantee'";
        case Tok::KwEq: return "'eq'";
        case Tok::KwBool: return "'bool'";
        case Tok::KwInt: return "'int'";
        case Tok::KwReal: return "'real'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwNot: return "'not'";
        case Tok::KwAnd: return "'and'";
        case Tok::KwOr: return "'or'";
        case Tok::KwDiv: return "'div'";
        case Tok::KwMod: return "'mod'";
        case Tok::KwPre: return "'pre'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Colon: return "':'";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::Arrow: return "'->'";
        case Tok::Implies: return "'=>'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::EqOp: return "'='";
        case Tok::Ne: return "'<>'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::EndOfFile: return "end of file";
    }
    return "?";
}

std::vector<Token> lex(std::string_view src, bool allow_reserved) {
    std::vector<Token> out;
    uint32_t line = 1, col = 1;
    size_t i = 0;

    auto peek = [&](size_t k = 0) -> char { return i + k < src.size() ? src[i + k] : '\0'; };
    auto advance = [&]() {
        if (src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    auto push = [&](Tok k, std::string text, Span sp) {
        sp.end_line = line;
        sp.end_col = col;
        out.push_back(Token{k, std::move(text), sp});
    };

    while (i < src.size()) {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
            continue;
        }
        if (c == '-' && peek(1) == '-') {
            while (i < src.size() && peek() != '\n') advance();
            continue;
        }
        Span sp = Span::point(line, col);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                word.push_back(peek());
                advance();
            }
            auto it = kKeywords.find(word);
            if (it != kKeywords.end()) {
                push(it->second, word, sp);
            } else {
                if (!allow_reserved && word.rfind("__", 0) == 0)
                    throw CompileError(Diagnostic{Severity::Error, DiagCode::ReservedIdentifier, sp,
                                                  "identifier '" + word + "' uses the reserved '__' prefix"});
                push(Tok::Identifier, word, sp);
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                num.push_back(peek());
                advance();
            }
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                num.push_back('.');
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    num.push_back(peek());
                    advance();
                }
                push(Tok::RealLit, num, sp);
            } else {
                push(Tok::IntLit, num, sp);
            }
            continue;
        }
        if (c == '"') {
            advance();
            std::string text;
            while (i < src.size() && peek() != '"') {
                if (peek() == '\n') fail(sp, "unterminated string literal");
                text.push_back(peek());
                advance();
            }
            if (i >= src.size()) fail(sp, "unterminated string literal");
            advance(); // closing quote
            push(Tok::StringLit, text, sp);
            continue;
        }
        switch (c) {
            case '{': advance(); push(Tok::LBrace, "{", sp); break;
            case '}': advance(); push(Tok::RBrace, "}", sp); break;
            case '(': advance(); push(Tok::LParen, "(", sp); break;
            case ')': advance(); push(Tok::RParen, ")", sp); break;
            case ':': advance(); push(Tok::Colon, ":", sp); break;
            case ';': advance(); push(Tok::Semi, ";", sp); break;
            case ',': advance(); push(Tok::Comma, ",", sp); break;
            case '.': advance(); push(Tok::Dot, ".", sp); break;
            case '+': advance(); push(Tok::Plus, "+", sp); break;
            case '*': advance(); push(Tok::Star, "*", sp); break;
            case '/': advance(); push(Tok::Slash, "/", sp); break;
            case '-':
                advance();
                if (peek() == '>') {
                    advance();
                    push(Tok::Arrow, "->", sp);
                } else {
                    push(Tok::Minus, "-", sp);
                }
                break;
            case '=':
                advance();
                if (peek() == '>') {
                    advance();
                    push(Tok::Implies, "=>", sp);
                } else {
                    push(Tok::EqOp, "=", sp);
                }
                break;
            case '<':
                advance();
                if (peek() == '=') {
                    advance();
                    push(Tok::Le, "<=", sp);
                } else if (peek() == '>') {
                    advance();
                    push(Tok::Ne, "<>", sp);
                } else {
                    push(Tok::Lt, "<", sp);
                }
                break;
            case '>':
                advance();
                if (peek() == '=') {
                    advance();
                    push(Tok::Ge, ">=", sp);
                } else {
                    push(Tok::Gt, ">", sp);
                }
                break;
            default:
                fail(sp, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back(Token{Tok::EndOfFile, "", Span::point(line, col)});
    return out;
}

} // namespace c2o
