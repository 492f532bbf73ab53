#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/minilang/ast.hpp"

namespace banditlab::minilang {

enum class TokKind {
    Ident,
    IntLit,
    StrLit,
    KwClass, KwVar, KwFn, KwReturn, KwIf, KwElse, KwWhile, KwAssert,
    KwNew, KwNull, KwTrue, KwFalse,
    LParen, RParen, LBrace, RBrace,
    Semi, Comma, Dot, Colon, Arrow,
    Assign, Eq, Ne, Lt, Gt,
    Plus, Minus, Star, Slash,
    AndAnd, OrOr, Bang,
    End,
};

struct Token {
    TokKind kind;
    std::string text;   // identifier / literal spelling (unescaped for strings)
    int64_t int_value = 0;
    SourceLoc loc;
};

// Tokenizes the whole input; throws ParseError on malformed input.
std::vector<Token> lex(std::string_view source);

}  // namespace banditlab::minilang
