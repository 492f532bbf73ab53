#include "banditlab/minilang/ast.hpp"

#include <charconv>

namespace banditlab::minilang {

std::string DecisionPointId::to_string() const {
    std::string out = function;
    out += '/';
    for (size_t i = 0; i < stmt_path.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(stmt_path[i]);
    }
    out += '/';
    out += std::to_string(expr_index);
    return out;
}

static std::optional<uint32_t> parse_u32(std::string_view s) {
    uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<DecisionPointId> DecisionPointId::from_string(std::string_view text) {
    auto last = text.rfind('/');
    if (last == std::string_view::npos || last == 0) return std::nullopt;
    auto mid = text.rfind('/', last - 1);
    if (mid == std::string_view::npos || mid == 0) return std::nullopt;

    DecisionPointId id;
    id.function = std::string(text.substr(0, mid));
    auto expr = parse_u32(text.substr(last + 1));
    if (!expr) return std::nullopt;
    id.expr_index = *expr;

    std::string_view path = text.substr(mid + 1, last - mid - 1);
    if (path.empty()) return std::nullopt;
    while (!path.empty()) {
        auto dot = path.find('.');
        std::string_view piece = path.substr(0, dot);
        auto n = parse_u32(piece);
        if (!n) return std::nullopt;
        id.stmt_path.push_back(*n);
        if (dot == std::string_view::npos) break;
        path.remove_prefix(dot + 1);
    }
    return id;
}

const FieldDecl* ClassDecl::find_field(std::string_view field) const {
    for (const auto& f : fields)
        if (f.name == field) return &f;
    return nullptr;
}

const FunDecl* ClassDecl::find_method(std::string_view method) const {
    for (const auto& m : methods)
        if (m.name == method) return &m;
    return nullptr;
}

bool ClassDecl::declares_member(std::string_view member) const {
    return find_field(member) != nullptr || find_method(member) != nullptr;
}

const ClassDecl* Program::find_class(std::string_view name) const {
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

const FunDecl* Program::find_function(std::string_view name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

namespace {

void collect_expr_sites(const Expr& e,
                        std::vector<std::pair<DecisionPointId, std::string>>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, FieldGet>) {
                out.emplace_back(node.point, node.field);
                collect_expr_sites(*node.object, out);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                out.emplace_back(node.point, node.method);
                collect_expr_sites(*node.object, out);
                for (const auto& a : node.args) collect_expr_sites(*a, out);
            } else if constexpr (std::is_same_v<T, FreeCall>) {
                for (const auto& a : node.args) collect_expr_sites(*a, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_expr_sites(*node.lhs, out);
                collect_expr_sites(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, Unary>) {
                collect_expr_sites(*node.operand, out);
            }
        },
        e.node);
}

void collect_block_sites(const Block& b,
                         std::vector<std::pair<DecisionPointId, std::string>>& out);

void collect_stmt_sites(const Stmt& s,
                        std::vector<std::pair<DecisionPointId, std::string>>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, VarDeclStmt>) {
                if (node.init) collect_expr_sites(*node.init, out);
            } else if constexpr (std::is_same_v<T, AssignVarStmt>) {
                collect_expr_sites(*node.value, out);
            } else if constexpr (std::is_same_v<T, AssignFieldStmt>) {
                out.emplace_back(node.point, node.field);
                collect_expr_sites(*node.object, out);
                collect_expr_sites(*node.value, out);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                if (node.value) collect_expr_sites(*node.value, out);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                collect_expr_sites(*node.cond, out);
                collect_block_sites(node.then_block, out);
                if (node.else_block) collect_block_sites(*node.else_block, out);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                collect_expr_sites(*node.cond, out);
                collect_block_sites(node.body, out);
            } else if constexpr (std::is_same_v<T, AssertStmt>) {
                collect_expr_sites(*node.cond, out);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                collect_expr_sites(*node.expr, out);
            }
        },
        s.node);
}

void collect_block_sites(const Block& b,
                         std::vector<std::pair<DecisionPointId, std::string>>& out) {
    for (const auto& s : b.stmts) collect_stmt_sites(*s, out);
}

}  // namespace

std::vector<std::pair<DecisionPointId, std::string>> Program::decision_sites() const {
    std::vector<std::pair<DecisionPointId, std::string>> out;
    for (const auto& c : classes)
        for (const auto& m : c.methods) collect_block_sites(m.body, out);
    for (const auto& f : functions) collect_block_sites(f.body, out);
    return out;
}

}  // namespace banditlab::minilang
