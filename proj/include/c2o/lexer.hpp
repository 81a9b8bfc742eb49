#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "c2o/diagnostics.hpp"

namespace c2o {

enum class Tok {
    Identifier, IntLit, RealLit, StringLit,
    // keywords
    KwComponent, KwInput, KwOutput, KwRecord, KwNode, KwAssume, KwGuarantee, KwEq,
    KwBool, KwInt, KwReal, KwTrue, KwFalse, KwIf, KwThen, KwElse,
    KwNot, KwAnd, KwOr, KwDiv, KwMod, KwPre,
    // punctuation / operators
    LBrace, RBrace, LParen, RParen, Colon, Semi, Comma, Dot,
    Arrow, Implies, Lt, Le, Gt, Ge, EqOp, Ne, Plus, Minus, Star, Slash,
    EndOfFile,
};

struct Token {
    Tok kind;
    std::string text; // identifier/literal spelling, string contents for StringLit
    Span span;
};

// Tokenizes contract source. Line comments start with "--".
// Identifiers beginning with "__" are reserved (rejected) in user code;
// machine-written OSL may use them (allow_reserved).
std::vector<Token> lex(std::string_view source, bool allow_reserved = false);

const char* token_name(Tok t);

} // namespace c2o
