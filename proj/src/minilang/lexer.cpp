#include "banditlab/minilang/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace banditlab::minilang {

namespace {

const std::unordered_map<std::string_view, TokKind> kKeywords = {
    {"class", TokKind::KwClass}, {"var", TokKind::KwVar},
    {"fn", TokKind::KwFn},       {"return", TokKind::KwReturn},
    {"if", TokKind::KwIf},       {"else", TokKind::KwElse},
    {"while", TokKind::KwWhile}, {"assert", TokKind::KwAssert},
    {"new", TokKind::KwNew},     {"null", TokKind::KwNull},
    {"true", TokKind::KwTrue},   {"false", TokKind::KwFalse},
};

struct Cursor {
    std::string_view src;
    size_t pos = 0;
    uint32_t line = 1;
    uint32_t col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    SourceLoc loc() const { return {line, col}; }
};

}  // namespace

std::vector<Token> lex(std::string_view source) {
    std::vector<Token> tokens;
    Cursor cur{source};

    auto push = [&](TokKind kind, SourceLoc at, std::string text = {}) {
        tokens.push_back({kind, std::move(text), 0, at});
    };

    while (!cur.done()) {
        char c = cur.peek();
        SourceLoc at = cur.loc();

        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (!cur.done() && (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
                                   cur.peek() == '_'))
                word += cur.advance();
            auto kw = kKeywords.find(word);
            if (kw != kKeywords.end())
                push(kw->second, at);
            else
                push(TokKind::Ident, at, std::move(word));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
                digits += cur.advance();
            Token t{TokKind::IntLit, digits, 0, at};
            try {
                t.int_value = std::stoll(digits);
            } catch (const std::exception&) {
                throw ParseError("integer literal out of range: " + digits, at);
            }
            tokens.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            cur.advance();
            std::string text;
            bool closed = false;
            while (!cur.done()) {
                char d = cur.advance();
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\\') {
                    if (cur.done()) break;
                    char e = cur.advance();
                    switch (e) {
                        case 'n': text += '\n'; break;
                        case 't': text += '\t'; break;
                        case '"': text += '"'; break;
                        case '\\': text += '\\'; break;
                        default:
                            throw ParseError(std::string("unknown escape \\") + e, at);
                    }
                } else if (d == '\n') {
                    throw ParseError("unterminated string literal", at);
                } else {
                    text += d;
                }
            }
            if (!closed) throw ParseError("unterminated string literal", at);
            push(TokKind::StrLit, at, std::move(text));
            continue;
        }

        cur.advance();
        switch (c) {
            case '(': push(TokKind::LParen, at); break;
            case ')': push(TokKind::RParen, at); break;
            case '{': push(TokKind::LBrace, at); break;
            case '}': push(TokKind::RBrace, at); break;
            case ';': push(TokKind::Semi, at); break;
            case ',': push(TokKind::Comma, at); break;
            case '.': push(TokKind::Dot, at); break;
            case ':': push(TokKind::Colon, at); break;
            case '+': push(TokKind::Plus, at); break;
            case '*': push(TokKind::Star, at); break;
            case '/': push(TokKind::Slash, at); break;
            case '-':
                if (cur.peek() == '>') {
                    cur.advance();
                    push(TokKind::Arrow, at);
                } else {
                    push(TokKind::Minus, at);
                }
                break;
            case '=':
                if (cur.peek() == '=') {
                    cur.advance();
                    push(TokKind::Eq, at);
                } else {
                    push(TokKind::Assign, at);
                }
                break;
            case '!':
                if (cur.peek() == '=') {
                    cur.advance();
                    push(TokKind::Ne, at);
                } else {
                    push(TokKind::Bang, at);
                }
                break;
            case '<': push(TokKind::Lt, at); break;
            case '>': push(TokKind::Gt, at); break;
            case '&':
                if (cur.peek() == '&') {
                    cur.advance();
                    push(TokKind::AndAnd, at);
                } else {
                    throw ParseError("stray '&'", at);
                }
                break;
            case '|':
                if (cur.peek() == '|') {
                    cur.advance();
                    push(TokKind::OrOr, at);
                } else {
                    throw ParseError("stray '|'", at);
                }
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", at);
        }
    }

    tokens.push_back({TokKind::End, "", 0, cur.loc()});
    return tokens;
}

}  // namespace banditlab::minilang
