#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace banditlab::minilang {

struct SourceLoc {
    uint32_t line = 0;
    uint32_t col = 0;
};

// Stable identity of a dereference site: enclosing function (methods are
// qualified as Class.method), the statement path from the function body
// (statement index, then sub-block ordinal, alternating), and the pre-order
// index of the site among the dereference-eligible expressions of that
// statement. Derived purely from the parse tree, never from runtime state.
struct DecisionPointId {
    std::string function;
    std::vector<uint32_t> stmt_path;
    uint32_t expr_index = 0;

    auto operator<=>(const DecisionPointId&) const = default;

    // text form: function/1.0.2/0
    std::string to_string() const;
    static std::optional<DecisionPointId> from_string(std::string_view text);
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, SourceLoc where)
        : std::runtime_error(msg), loc(where) {}
    SourceLoc loc;
};

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Gt, And, Or };
enum class UnaryOp { Not, Neg };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit { int64_t value = 0; };
struct BoolLit { bool value = false; };
struct StrLit { std::string value; };
struct NullLit {};
struct VarRef { std::string name; };
struct FieldGet {
    ExprPtr object;
    std::string field;
    DecisionPointId point;
};
struct MethodCall {
    ExprPtr object;
    std::string method;
    std::vector<ExprPtr> args;
    DecisionPointId point;
};
struct FreeCall {
    std::string callee;
    std::vector<ExprPtr> args;
};
struct NewObject { std::string class_name; };
struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };
struct Unary { UnaryOp op; ExprPtr operand; };

struct Expr {
    SourceLoc loc;
    std::variant<IntLit, BoolLit, StrLit, NullLit, VarRef, FieldGet, MethodCall,
                 FreeCall, NewObject, Binary, Unary>
        node;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
    std::vector<StmtPtr> stmts;
};

struct VarDeclStmt {
    std::string name;
    std::optional<std::string> type;
    ExprPtr init;  // may be null (declares to Null)
};
struct AssignVarStmt {
    std::string name;
    ExprPtr value;
};
struct AssignFieldStmt {
    ExprPtr object;
    std::string field;
    ExprPtr value;
    DecisionPointId point;  // store through a null object is a dereference too
};
struct ReturnStmt {
    ExprPtr value;  // may be null (return Null)
};
struct IfStmt {
    ExprPtr cond;
    Block then_block;
    std::optional<Block> else_block;
};
struct WhileStmt {
    ExprPtr cond;
    Block body;
};
struct AssertStmt {
    ExprPtr cond;
};
struct ExprStmt {
    ExprPtr expr;
};

struct Stmt {
    SourceLoc loc;
    std::variant<VarDeclStmt, AssignVarStmt, AssignFieldStmt, ReturnStmt, IfStmt,
                 WhileStmt, AssertStmt, ExprStmt>
        node;
};

struct Param {
    std::string name;
    std::optional<std::string> type;
};

struct FunDecl {
    std::string name;            // as written
    std::string qualified_name;  // Class.name for methods, name otherwise
    std::vector<Param> params;
    std::optional<std::string> return_type;
    Block body;
    SourceLoc loc;
};

// Field initializers are restricted to literals.
using FieldInit = std::variant<std::monostate, int64_t, bool, std::string>;

struct FieldDecl {
    std::string name;
    std::optional<std::string> type;
    std::optional<FieldInit> init;
    SourceLoc loc;
};

struct ClassDecl {
    std::string name;
    std::vector<FieldDecl> fields;
    std::vector<FunDecl> methods;
    SourceLoc loc;

    const FieldDecl* find_field(std::string_view field) const;
    const FunDecl* find_method(std::string_view method) const;
    bool declares_member(std::string_view member) const;
};

struct Program {
    std::string source_name;  // fixture id used in reports/diagnostics
    std::vector<ClassDecl> classes;
    std::vector<FunDecl> functions;

    const ClassDecl* find_class(std::string_view name) const;
    const FunDecl* find_function(std::string_view name) const;

    // all statically eligible dereference sites, in declaration order
    std::vector<std::pair<DecisionPointId, std::string>> decision_sites() const;
};

}  // namespace banditlab::minilang
