#include "banditlab/minilang/parser.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "banditlab/minilang/lexer.hpp"

namespace banditlab::minilang {

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program parse(std::string source_name) {
        Program prog;
        prog.source_name = std::move(source_name);
        while (!at(TokKind::End)) {
            if (at(TokKind::KwClass))
                prog.classes.push_back(parse_class());
            else if (at(TokKind::KwFn))
                prog.functions.push_back(parse_function(""));
            else
                fail("expected 'class' or 'fn' at top level");
        }
        return prog;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    bool at(TokKind k) const { return cur().kind == k; }
    const Token& advance() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur().loc);
    }

    const Token& expect(TokKind k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return advance();
    }

    bool eat(TokKind k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    std::string expect_ident(const char* what) {
        return expect(TokKind::Ident, what).text;
    }

    std::optional<std::string> maybe_type_annotation() {
        if (!eat(TokKind::Colon)) return std::nullopt;
        return expect_ident("type name");
    }

    ClassDecl parse_class() {
        ClassDecl decl;
        decl.loc = cur().loc;
        expect(TokKind::KwClass, "'class'");
        decl.name = expect_ident("class name");
        expect(TokKind::LBrace, "'{'");
        while (!eat(TokKind::RBrace)) {
            if (at(TokKind::KwVar))
                decl.fields.push_back(parse_field());
            else if (at(TokKind::KwFn))
                decl.methods.push_back(parse_function(decl.name));
            else
                fail("expected field or method declaration");
        }
        return decl;
    }

    FieldDecl parse_field() {
        FieldDecl f;
        f.loc = cur().loc;
        expect(TokKind::KwVar, "'var'");
        f.name = expect_ident("field name");
        f.type = maybe_type_annotation();
        if (eat(TokKind::Assign)) f.init = parse_field_literal();
        expect(TokKind::Semi, "';'");
        return f;
    }

    FieldInit parse_field_literal() {
        if (at(TokKind::IntLit)) return advance().int_value;
        if (eat(TokKind::KwTrue)) return true;
        if (eat(TokKind::KwFalse)) return false;
        if (at(TokKind::StrLit)) return advance().text;
        if (eat(TokKind::KwNull)) return std::monostate{};
        if (at(TokKind::Minus) && toks_[pos_ + 1].kind == TokKind::IntLit) {
            advance();
            return -advance().int_value;
        }
        fail("field initializer must be a literal");
    }

    FunDecl parse_function(const std::string& owner) {
        FunDecl fun;
        fun.loc = cur().loc;
        expect(TokKind::KwFn, "'fn'");
        fun.name = expect_ident("function name");
        fun.qualified_name = owner.empty() ? fun.name : owner + "." + fun.name;
        expect(TokKind::LParen, "'('");
        if (!at(TokKind::RParen)) {
            do {
                Param p;
                p.name = expect_ident("parameter name");
                p.type = maybe_type_annotation();
                fun.params.push_back(std::move(p));
            } while (eat(TokKind::Comma));
        }
        expect(TokKind::RParen, "')'");
        if (eat(TokKind::Arrow)) fun.return_type = expect_ident("return type");
        fun.body = parse_block();
        return fun;
    }

    Block parse_block() {
        Block b;
        expect(TokKind::LBrace, "'{'");
        while (!eat(TokKind::RBrace)) b.stmts.push_back(parse_statement());
        return b;
    }

    StmtPtr parse_statement() {
        SourceLoc at_loc = cur().loc;
        auto make = [&](auto node) {
            auto s = std::make_unique<Stmt>();
            s->loc = at_loc;
            s->node = std::move(node);
            return s;
        };

        if (at(TokKind::KwVar)) {
            advance();
            VarDeclStmt d;
            d.name = expect_ident("variable name");
            d.type = maybe_type_annotation();
            if (eat(TokKind::Assign)) d.init = parse_expr();
            expect(TokKind::Semi, "';'");
            return make(std::move(d));
        }
        if (at(TokKind::KwReturn)) {
            advance();
            ReturnStmt r;
            if (!at(TokKind::Semi)) r.value = parse_expr();
            expect(TokKind::Semi, "';'");
            return make(std::move(r));
        }
        if (at(TokKind::KwIf)) {
            advance();
            IfStmt s;
            expect(TokKind::LParen, "'('");
            s.cond = parse_expr();
            expect(TokKind::RParen, "')'");
            s.then_block = parse_block();
            if (eat(TokKind::KwElse)) s.else_block = parse_block();
            return make(std::move(s));
        }
        if (at(TokKind::KwWhile)) {
            advance();
            WhileStmt s;
            expect(TokKind::LParen, "'('");
            s.cond = parse_expr();
            expect(TokKind::RParen, "')'");
            s.body = parse_block();
            return make(std::move(s));
        }
        if (at(TokKind::KwAssert)) {
            advance();
            AssertStmt s;
            expect(TokKind::LParen, "'('");
            s.cond = parse_expr();
            expect(TokKind::RParen, "')'");
            expect(TokKind::Semi, "';'");
            return make(std::move(s));
        }

        // expression, assignment to a variable, or assignment through a field
        ExprPtr e = parse_expr();
        if (eat(TokKind::Assign)) {
            ExprPtr value = parse_expr();
            expect(TokKind::Semi, "';'");
            if (auto* var = std::get_if<VarRef>(&e->node)) {
                AssignVarStmt s;
                s.name = var->name;
                s.value = std::move(value);
                return make(std::move(s));
            }
            if (auto* fld = std::get_if<FieldGet>(&e->node)) {
                AssignFieldStmt s;
                s.object = std::move(fld->object);
                s.field = fld->field;
                s.value = std::move(value);
                return make(std::move(s));
            }
            throw ParseError("assignment target must be a variable or field", at_loc);
        }
        expect(TokKind::Semi, "';'");
        ExprStmt s;
        s.expr = std::move(e);
        return make(std::move(s));
    }

    ExprPtr mk(SourceLoc loc, auto node) {
        auto e = std::make_unique<Expr>();
        e->loc = loc;
        e->node = std::move(node);
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(TokKind::OrOr)) {
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{BinaryOp::Or, std::move(lhs), parse_and()});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(TokKind::AndAnd)) {
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{BinaryOp::And, std::move(lhs), parse_equality()});
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_comparison();
        while (at(TokKind::Eq) || at(TokKind::Ne)) {
            BinaryOp op = at(TokKind::Eq) ? BinaryOp::Eq : BinaryOp::Ne;
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{op, std::move(lhs), parse_comparison()});
        }
        return lhs;
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        while (at(TokKind::Lt) || at(TokKind::Gt)) {
            BinaryOp op = at(TokKind::Lt) ? BinaryOp::Lt : BinaryOp::Gt;
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{op, std::move(lhs), parse_additive()});
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(TokKind::Plus) || at(TokKind::Minus)) {
            BinaryOp op = at(TokKind::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{op, std::move(lhs), parse_multiplicative()});
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(TokKind::Star) || at(TokKind::Slash)) {
            BinaryOp op = at(TokKind::Star) ? BinaryOp::Mul : BinaryOp::Div;
            SourceLoc loc = advance().loc;
            lhs = mk(loc, Binary{op, std::move(lhs), parse_unary()});
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(TokKind::Bang)) {
            SourceLoc loc = advance().loc;
            return mk(loc, Unary{UnaryOp::Not, parse_unary()});
        }
        if (at(TokKind::Minus)) {
            SourceLoc loc = advance().loc;
            return mk(loc, Unary{UnaryOp::Neg, parse_unary()});
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (eat(TokKind::Dot)) {
            SourceLoc loc = cur().loc;
            std::string member = expect_ident("member name");
            if (eat(TokKind::LParen)) {
                MethodCall call;
                call.object = std::move(e);
                call.method = std::move(member);
                if (!at(TokKind::RParen)) {
                    do call.args.push_back(parse_expr());
                    while (eat(TokKind::Comma));
                }
                expect(TokKind::RParen, "')'");
                e = mk(loc, std::move(call));
            } else {
                e = mk(loc, FieldGet{std::move(e), std::move(member), {}});
            }
        }
        return e;
    }

    ExprPtr parse_primary() {
        SourceLoc loc = cur().loc;
        if (at(TokKind::IntLit)) return mk(loc, IntLit{advance().int_value});
        if (eat(TokKind::KwTrue)) return mk(loc, BoolLit{true});
        if (eat(TokKind::KwFalse)) return mk(loc, BoolLit{false});
        if (at(TokKind::StrLit)) return mk(loc, StrLit{advance().text});
        if (eat(TokKind::KwNull)) return mk(loc, NullLit{});
        if (eat(TokKind::KwNew)) {
            std::string cls = expect_ident("class name");
            expect(TokKind::LParen, "'('");
            expect(TokKind::RParen, "')'");
            return mk(loc, NewObject{std::move(cls)});
        }
        if (at(TokKind::Ident)) {
            std::string name = advance().text;
            if (eat(TokKind::LParen)) {
                FreeCall call;
                call.callee = std::move(name);
                if (!at(TokKind::RParen)) {
                    do call.args.push_back(parse_expr());
                    while (eat(TokKind::Comma));
                }
                expect(TokKind::RParen, "')'");
                return mk(loc, std::move(call));
            }
            return mk(loc, VarRef{std::move(name)});
        }
        if (eat(TokKind::LParen)) {
            ExprPtr e = parse_expr();
            expect(TokKind::RParen, "')'");
            return e;
        }
        fail("expected expression");
    }
};

// --- decision point numbering -----------------------------------------------

void number_expr(Expr& e, const std::string& fn, const std::vector<uint32_t>& path,
                 uint32_t& counter) {
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, FieldGet>) {
                node.point = {fn, path, counter++};
                number_expr(*node.object, fn, path, counter);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                node.point = {fn, path, counter++};
                number_expr(*node.object, fn, path, counter);
                for (auto& a : node.args) number_expr(*a, fn, path, counter);
            } else if constexpr (std::is_same_v<T, FreeCall>) {
                for (auto& a : node.args) number_expr(*a, fn, path, counter);
            } else if constexpr (std::is_same_v<T, Binary>) {
                number_expr(*node.lhs, fn, path, counter);
                number_expr(*node.rhs, fn, path, counter);
            } else if constexpr (std::is_same_v<T, Unary>) {
                number_expr(*node.operand, fn, path, counter);
            }
        },
        e.node);
}

void number_block(Block& b, const std::string& fn, std::vector<uint32_t> path);

void number_stmt(Stmt& s, const std::string& fn, const std::vector<uint32_t>& path) {
    uint32_t counter = 0;
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, VarDeclStmt>) {
                if (node.init) number_expr(*node.init, fn, path, counter);
            } else if constexpr (std::is_same_v<T, AssignVarStmt>) {
                number_expr(*node.value, fn, path, counter);
            } else if constexpr (std::is_same_v<T, AssignFieldStmt>) {
                node.point = {fn, path, counter++};  // the store site itself
                number_expr(*node.object, fn, path, counter);
                number_expr(*node.value, fn, path, counter);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                if (node.value) number_expr(*node.value, fn, path, counter);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                number_expr(*node.cond, fn, path, counter);
                auto sub = path;
                sub.push_back(0);
                number_block(node.then_block, fn, sub);
                if (node.else_block) {
                    sub.back() = 1;
                    number_block(*node.else_block, fn, sub);
                }
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                number_expr(*node.cond, fn, path, counter);
                auto sub = path;
                sub.push_back(0);
                number_block(node.body, fn, sub);
            } else if constexpr (std::is_same_v<T, AssertStmt>) {
                number_expr(*node.cond, fn, path, counter);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                number_expr(*node.expr, fn, path, counter);
            }
        },
        s.node);
}

void number_block(Block& b, const std::string& fn, std::vector<uint32_t> path) {
    for (size_t i = 0; i < b.stmts.size(); ++i) {
        auto stmt_path = path;
        stmt_path.push_back(static_cast<uint32_t>(i));
        number_stmt(*b.stmts[i], fn, stmt_path);
    }
}

// --- load-time validation ----------------------------------------------------

bool builtin_type(std::string_view t) { return t == "Int" || t == "Bool" || t == "Str"; }

class Validator {
public:
    explicit Validator(const Program& prog) : prog_(prog) {}

    void run() {
        std::set<std::string> class_names;
        for (const auto& c : prog_.classes)
            if (!class_names.insert(c.name).second)
                throw ParseError("duplicate class name: " + c.name, c.loc);

        std::set<std::string> fn_names;
        for (const auto& f : prog_.functions)
            if (!fn_names.insert(f.name).second)
                throw ParseError("duplicate function name: " + f.name, f.loc);

        for (const auto& c : prog_.classes) {
            std::set<std::string> members;
            for (const auto& f : c.fields) {
                if (!members.insert(f.name).second)
                    throw ParseError("duplicate member in " + c.name + ": " + f.name,
                                     f.loc);
                check_type(f.type, f.loc);
            }
            for (const auto& m : c.methods) {
                if (!members.insert(m.name).second)
                    throw ParseError("duplicate member in " + c.name + ": " + m.name,
                                     m.loc);
                check_function(m, true);
            }
        }
        for (const auto& f : prog_.functions) check_function(f, false);
    }

private:
    const Program& prog_;

    void check_type(const std::optional<std::string>& t, SourceLoc loc) const {
        if (!t) return;
        if (!builtin_type(*t) && prog_.find_class(*t) == nullptr)
            throw ParseError("unresolved type name: " + *t, loc);
    }

    void check_function(const FunDecl& fun, bool is_method) {
        std::set<std::string> declared;
        if (is_method) declared.insert("this");
        for (const auto& p : fun.params) {
            if (p.name == "this")
                throw ParseError("'this' cannot be declared in " + fun.qualified_name,
                                 fun.loc);
            if (!declared.insert(p.name).second)
                throw ParseError("duplicate parameter in " + fun.qualified_name + ": " +
                                     p.name,
                                 fun.loc);
            check_type(p.type, fun.loc);
        }
        check_type(fun.return_type, fun.loc);
        check_block(fun.body, fun, declared);
    }

    // `declared` carries outer bindings; inner blocks may not shadow them
    void check_block(const Block& b, const FunDecl& fun, std::set<std::string> declared) {
        for (const auto& sp : b.stmts) {
            const Stmt& s = *sp;
            std::visit(
                [&](const auto& node) {
                    using T = std::decay_t<decltype(node)>;
                    if constexpr (std::is_same_v<T, VarDeclStmt>) {
                        if (node.name == "this")
                            throw ParseError("'this' cannot be declared in " +
                                                 fun.qualified_name,
                                             s.loc);
                        if (!declared.insert(node.name).second)
                            throw ParseError("duplicate variable in " +
                                                 fun.qualified_name + ": " + node.name,
                                             s.loc);
                        if (node.type) check_type(node.type, s.loc);
                        if (node.init) check_expr(*node.init);
                    } else if constexpr (std::is_same_v<T, AssignVarStmt>) {
                        check_expr(*node.value);
                    } else if constexpr (std::is_same_v<T, AssignFieldStmt>) {
                        check_expr(*node.object);
                        check_expr(*node.value);
                    } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                        if (node.value) check_expr(*node.value);
                    } else if constexpr (std::is_same_v<T, IfStmt>) {
                        check_expr(*node.cond);
                        check_block(node.then_block, fun, declared);
                        if (node.else_block) check_block(*node.else_block, fun, declared);
                    } else if constexpr (std::is_same_v<T, WhileStmt>) {
                        check_expr(*node.cond);
                        check_block(node.body, fun, declared);
                    } else if constexpr (std::is_same_v<T, AssertStmt>) {
                        check_expr(*node.cond);
                    } else if constexpr (std::is_same_v<T, ExprStmt>) {
                        check_expr(*node.expr);
                    }
                },
                s.node);
        }
    }

    void check_expr(const Expr& e) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, FieldGet>) {
                    check_expr(*node.object);
                } else if constexpr (std::is_same_v<T, MethodCall>) {
                    check_expr(*node.object);
                    for (const auto& a : node.args) check_expr(*a);
                } else if constexpr (std::is_same_v<T, FreeCall>) {
                    if (prog_.find_function(node.callee) == nullptr)
                        throw ParseError("unresolved function name: " + node.callee,
                                         e.loc);
                    for (const auto& a : node.args) check_expr(*a);
                } else if constexpr (std::is_same_v<T, NewObject>) {
                    if (prog_.find_class(node.class_name) == nullptr)
                        throw ParseError("unresolved class name: " + node.class_name,
                                         e.loc);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    check_expr(*node.lhs);
                    check_expr(*node.rhs);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    check_expr(*node.operand);
                }
            },
            e.node);
    }
};

}  // namespace

Program parse_program(std::string_view source, std::string source_name) {
    Parser parser(lex(source));
    Program prog = parser.parse(std::move(source_name));
    for (auto& c : prog.classes)
        for (auto& m : c.methods) number_block(m.body, m.qualified_name, {});
    for (auto& f : prog.functions) number_block(f.body, f.qualified_name, {});
    Validator(prog).run();
    return prog;
}

Program load_program_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open fixture: " + path, {0, 0});
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = std::filesystem::path(path).stem().string();
    return parse_program(buf.str(), stem);
}

}  // namespace banditlab::minilang
