#include "banditlab/minilang/interpreter.hpp"

#include <utility>

namespace banditlab::minilang {

// --- value helpers -----------------------------------------------------------

std::string Value::type_name() const {
    if (is_null()) return "Null";
    if (is_int()) return "Int";
    if (is_bool()) return "Bool";
    if (is_str()) return "Str";
    return as_object()->class_name;
}

Value* Object::find_field(std::string_view name) {
    for (auto& [k, v] : fields)
        if (k == name) return &v;
    return nullptr;
}

const Value* Object::find_field(std::string_view name) const {
    for (const auto& [k, v] : fields)
        if (k == name) return &v;
    return nullptr;
}

bool value_equals(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) return false;
    if (a.is_null()) return true;
    if (a.is_int()) return a.as_int() == b.as_int();
    if (a.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_str()) return a.as_str() == b.as_str();
    return a.as_object().get() == b.as_object().get();
}

std::string value_to_display(const Value& val) {
    if (val.is_null()) return "null";
    if (val.is_int()) return std::to_string(val.as_int());
    if (val.is_bool()) return val.as_bool() ? "true" : "false";
    if (val.is_str()) return val.as_str();
    return "<" + val.as_object()->class_name + ">";
}

std::string_view runtime_error_kind_name(RuntimeErrorKind k) {
    switch (k) {
    case RuntimeErrorKind::DivisionByZero: return "DivisionByZero";
    case RuntimeErrorKind::MissingMember: return "MissingMember";
    case RuntimeErrorKind::TypeError: return "TypeError";
    }
    return "TypeError";
}

std::string LapsOutcome::to_string() const {
    switch (kind) {
    case Kind::Success: return "Success";
    case Kind::OracleFailed: return "OracleFailed";
    case Kind::UnrepairedNull:
        return "UnrepairedNull(" + (point ? point->to_string() : "?") + ")";
    case Kind::RuntimeError:
        return "RuntimeError(" + std::string(runtime_error_kind_name(error)) + ")";
    case Kind::StepBudgetExceeded: return "StepBudgetExceeded";
    case Kind::NeedsMoreDecisions:
        return "NeedsMoreDecisions(" + (point ? point->to_string() : "?") + ")";
    }
    return "?";
}

// --- interpreter -------------------------------------------------------------

namespace {

constexpr int kMaxCallDepth = 2000;

struct Flow {
    enum class Kind { Value, Skip, Return, Abort };
    Kind kind = Kind::Value;
    Value value;

    static Flow val(Value v) { return {Kind::Value, std::move(v)}; }
    bool ok() const { return kind == Kind::Value; }
};

struct Frame {
    const FunDecl* fun = nullptr;
    std::vector<ScopeEntry> locals;  // `this` and params first, then declarations
};

class Interp {
public:
    Interp(const Program& prog, DecisionProvider& provider, uint64_t budget)
        : prog_(prog), provider_(provider), budget_(budget) {}

    ExecResult run(const std::string& entry) {
        const FunDecl* fun = prog_.find_function(entry);
        if (fun == nullptr)
            throw FixtureError("no entry function '" + entry + "' in " +
                               prog_.source_name);
        if (!fun->params.empty())
            throw FixtureError("entry function '" + entry + "' must take no parameters");
        Flow end = call_function(*fun, {}, std::nullopt);
        ExecResult result;
        result.trace = std::move(trace_);
        result.trace.steps = steps_;
        if (end.kind == Flow::Kind::Abort)
            result.outcome = std::move(outcome_);
        // otherwise the default Success outcome stands: every executed assert held
        return result;
    }

private:
    const Program& prog_;
    DecisionProvider& provider_;
    uint64_t budget_;
    uint64_t steps_ = 0;
    int depth_ = 0;
    ExecutionTrace trace_;
    LapsOutcome outcome_;

    Flow abort_with(LapsOutcome o) {
        outcome_ = std::move(o);
        return {Flow::Kind::Abort, {}};
    }

    Flow abort_runtime(RuntimeErrorKind k, SourceLoc loc, std::string detail) {
        LapsOutcome o;
        o.kind = LapsOutcome::Kind::RuntimeError;
        o.error = k;
        o.loc = loc;
        o.detail = std::move(detail);
        return abort_with(std::move(o));
    }

    bool tick(Flow& out) {
        if (++steps_ > budget_) {
            LapsOutcome o;
            o.kind = LapsOutcome::Kind::StepBudgetExceeded;
            o.detail = "step budget exhausted";
            out = abort_with(std::move(o));
            return false;
        }
        return true;
    }

    static void rebind(Frame& frame, const std::string& name, const Value& v) {
        for (auto& e : frame.locals)
            if (e.name == name) {
                e.value = v;
                return;
            }
    }

    // Provider protocol at an activated point. Returns nullopt after a
    // receiver substitution (receiver updated, simple variables rebound);
    // otherwise the flow that ends the statement or frame.
    std::optional<Flow> activate(const DecisionPointId& point, const std::string& member,
                                 Frame& frame, const Expr* object_expr, Value& receiver) {
        patchmodel::ActivationSite site{point, member, frame.locals, frame.fun, &prog_};
        std::vector<patchmodel::Decision> enumeration =
            patchmodel::enumerate_decisions(site);
        trace_.activated.push_back(point);
        ActivationContext ctx{site, enumeration, trace_.activated.size() - 1};
        ProviderResponse response = provider_.on_activation(ctx);

        if (response.kind == ProviderResponse::Kind::Unrepaired) {
            LapsOutcome o;
            o.kind = LapsOutcome::Kind::UnrepairedNull;
            o.point = point;
            o.detail = "null dereference of '" + member + "'";
            return abort_with(std::move(o));
        }
        if (response.kind == ProviderResponse::Kind::Exhausted) {
            LapsOutcome o;
            o.kind = LapsOutcome::Kind::NeedsMoreDecisions;
            o.point = point;
            return abort_with(std::move(o));
        }

        trace_.taken.push_back({point, response.decision});
        auto cont = patchmodel::apply_decision(site, response.decision);
        if (!cont)
            throw ReplayMismatchError(
                "decision " + patchmodel::decision_to_string(response.decision) +
                " is not applicable at " + point.to_string());
        switch (cont->kind) {
        case patchmodel::Continuation::Kind::SubstituteReceiver:
            receiver = cont->value;
            if (object_expr != nullptr)
                if (const auto* var = std::get_if<VarRef>(&object_expr->node))
                    rebind(frame, var->name, cont->value);
            return std::nullopt;
        case patchmodel::Continuation::Kind::SkipStatement:
            return Flow{Flow::Kind::Skip, {}};
        case patchmodel::Continuation::Kind::ReturnFromFrame:
            return Flow{Flow::Kind::Return, cont->value};
        }
        return std::nullopt;
    }

    Flow call_function(const FunDecl& fun, std::vector<Value> args,
                       std::optional<Value> receiver) {
        if (++depth_ > kMaxCallDepth) {
            LapsOutcome o;
            o.kind = LapsOutcome::Kind::StepBudgetExceeded;
            o.detail = "call depth limit";
            --depth_;
            return abort_with(std::move(o));
        }
        Frame frame;
        frame.fun = &fun;
        if (receiver)
            frame.locals.push_back({"this", std::move(*receiver), VarOrigin::Param});
        for (size_t i = 0; i < fun.params.size(); ++i)
            frame.locals.push_back({fun.params[i].name, std::move(args[i]),
                                    VarOrigin::Param});
        Flow flow = exec_block(fun.body, frame);
        --depth_;
        if (flow.kind == Flow::Kind::Return) return Flow::val(std::move(flow.value));
        if (flow.kind == Flow::Kind::Abort) return flow;
        return Flow::val(Value::null());  // fell off the end
    }

    Flow exec_block(const Block& block, Frame& frame) {
        size_t base = frame.locals.size();
        for (const auto& stmt : block.stmts) {
            Flow flow = exec_stmt(*stmt, frame);
            if (!flow.ok()) {
                frame.locals.resize(base);
                return flow;
            }
        }
        frame.locals.resize(base);
        return Flow::val(Value::null());
    }

    Flow exec_stmt(const Stmt& stmt, Frame& frame) {
        Flow budget_flow;
        if (!tick(budget_flow)) return budget_flow;
        Flow flow = exec_stmt_inner(stmt, frame);
        // a skip ends exactly the statement whose evaluation triggered it
        if (flow.kind == Flow::Kind::Skip) return Flow::val(Value::null());
        return flow;
    }

    Flow exec_stmt_inner(const Stmt& stmt, Frame& frame) {
        return std::visit(
            [&](const auto& node) -> Flow {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, VarDeclStmt>) {
                    Value init;
                    if (node.init) {
                        Flow f = eval(*node.init, frame);
                        if (!f.ok()) return f;
                        init = std::move(f.value);
                    }
                    frame.locals.push_back({node.name, std::move(init), VarOrigin::Local});
                    return Flow::val(Value::null());
                } else if constexpr (std::is_same_v<T, AssignVarStmt>) {
                    Flow f = eval(*node.value, frame);
                    if (!f.ok()) return f;
                    for (auto& e : frame.locals)
                        if (e.name == node.name) {
                            e.value = std::move(f.value);
                            return Flow::val(Value::null());
                        }
                    return abort_runtime(RuntimeErrorKind::TypeError, stmt.loc,
                                         "undefined variable '" + node.name + "'");
                } else if constexpr (std::is_same_v<T, AssignFieldStmt>) {
                    return exec_assign_field(node, stmt.loc, frame);
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    Value v;
                    if (node.value) {
                        Flow f = eval(*node.value, frame);
                        if (!f.ok()) return f;
                        v = std::move(f.value);
                    }
                    return Flow{Flow::Kind::Return, std::move(v)};
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    Flow c = eval(*node.cond, frame);
                    if (!c.ok()) return c;
                    if (!c.value.is_bool())
                        return abort_runtime(RuntimeErrorKind::TypeError, stmt.loc,
                                             "condition is " + c.value.type_name() +
                                                 ", not Bool");
                    if (c.value.as_bool()) return exec_block(node.then_block, frame);
                    if (node.else_block) return exec_block(*node.else_block, frame);
                    return Flow::val(Value::null());
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    while (true) {
                        Flow c = eval(*node.cond, frame);
                        if (!c.ok()) return c;
                        if (!c.value.is_bool())
                            return abort_runtime(RuntimeErrorKind::TypeError, stmt.loc,
                                                 "condition is " + c.value.type_name() +
                                                     ", not Bool");
                        if (!c.value.as_bool()) return Flow::val(Value::null());
                        Flow body = exec_block(node.body, frame);
                        if (!body.ok()) return body;
                    }
                } else if constexpr (std::is_same_v<T, AssertStmt>) {
                    Flow c = eval(*node.cond, frame);
                    if (!c.ok()) return c;
                    if (!c.value.is_bool())
                        return abort_runtime(RuntimeErrorKind::TypeError, stmt.loc,
                                             "assert on " + c.value.type_name());
                    if (c.value.as_bool()) return Flow::val(Value::null());
                    LapsOutcome o;
                    o.kind = LapsOutcome::Kind::OracleFailed;
                    o.loc = stmt.loc;
                    o.detail = "assertion failed";
                    return abort_with(std::move(o));
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    Flow f = eval(*node.expr, frame);
                    if (!f.ok()) return f;
                    return Flow::val(Value::null());
                }
            },
            stmt.node);
    }

    Flow exec_assign_field(const AssignFieldStmt& node, SourceLoc loc, Frame& frame) {
        Flow obj = eval(*node.object, frame);
        if (!obj.ok()) return obj;
        Value receiver = std::move(obj.value);
        if (receiver.is_null()) {
            // the store through null is intercepted before the right side runs
            auto taken = activate(node.point, node.field, frame, node.object.get(),
                                  receiver);
            if (taken) return *taken;
        }
        if (!receiver.is_object())
            return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                 "field store on " + receiver.type_name());
        Flow rhs = eval(*node.value, frame);
        if (!rhs.ok()) return rhs;
        Value* slot = receiver.as_object()->find_field(node.field);
        if (slot == nullptr)
            return abort_runtime(RuntimeErrorKind::MissingMember, loc,
                                 receiver.as_object()->class_name + " has no field '" +
                                     node.field + "'");
        *slot = std::move(rhs.value);
        return Flow::val(Value::null());
    }

    Flow eval(const Expr& expr, Frame& frame) {
        Flow budget_flow;
        if (!tick(budget_flow)) return budget_flow;
        return std::visit(
            [&](const auto& node) -> Flow {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    return Flow::val(Value::of_int(node.value));
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    return Flow::val(Value::of_bool(node.value));
                } else if constexpr (std::is_same_v<T, StrLit>) {
                    return Flow::val(Value::of_str(node.value));
                } else if constexpr (std::is_same_v<T, NullLit>) {
                    return Flow::val(Value::null());
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    for (auto& e : frame.locals)
                        if (e.name == node.name) return Flow::val(e.value);
                    return abort_runtime(RuntimeErrorKind::TypeError, expr.loc,
                                         "undefined variable '" + node.name + "'");
                } else if constexpr (std::is_same_v<T, FieldGet>) {
                    return eval_field_get(node, expr.loc, frame);
                } else if constexpr (std::is_same_v<T, MethodCall>) {
                    return eval_method_call(node, expr.loc, frame);
                } else if constexpr (std::is_same_v<T, FreeCall>) {
                    const FunDecl* fun = prog_.find_function(node.callee);
                    std::vector<Value> args;
                    args.reserve(node.args.size());
                    for (const auto& a : node.args) {
                        Flow f = eval(*a, frame);
                        if (!f.ok()) return f;
                        args.push_back(std::move(f.value));
                    }
                    if (args.size() != fun->params.size())
                        return abort_runtime(RuntimeErrorKind::TypeError, expr.loc,
                                             node.callee + " expects " +
                                                 std::to_string(fun->params.size()) +
                                                 " arguments");
                    return call_function(*fun, std::move(args), std::nullopt);
                } else if constexpr (std::is_same_v<T, NewObject>) {
                    return Flow::val(patchmodel::default_construct(prog_, node.class_name));
                } else if constexpr (std::is_same_v<T, Binary>) {
                    return eval_binary(node, expr.loc, frame);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    Flow f = eval(*node.operand, frame);
                    if (!f.ok()) return f;
                    if (node.op == UnaryOp::Not) {
                        if (!f.value.is_bool())
                            return abort_runtime(RuntimeErrorKind::TypeError, expr.loc,
                                                 "'!' on " + f.value.type_name());
                        return Flow::val(Value::of_bool(!f.value.as_bool()));
                    }
                    if (!f.value.is_int())
                        return abort_runtime(RuntimeErrorKind::TypeError, expr.loc,
                                             "'-' on " + f.value.type_name());
                    return Flow::val(Value::of_int(-f.value.as_int()));
                }
            },
            expr.node);
    }

    Flow eval_field_get(const FieldGet& node, SourceLoc loc, Frame& frame) {
        Flow obj = eval(*node.object, frame);
        if (!obj.ok()) return obj;
        Value receiver = std::move(obj.value);
        if (receiver.is_null()) {
            auto taken = activate(node.point, node.field, frame, node.object.get(),
                                  receiver);
            if (taken) return *taken;
        }
        if (!receiver.is_object())
            return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                 "field read on " + receiver.type_name());
        const Value* slot = receiver.as_object()->find_field(node.field);
        if (slot == nullptr)
            return abort_runtime(RuntimeErrorKind::MissingMember, loc,
                                 receiver.as_object()->class_name + " has no field '" +
                                     node.field + "'");
        return Flow::val(*slot);
    }

    Flow eval_method_call(const MethodCall& node, SourceLoc loc, Frame& frame) {
        Flow obj = eval(*node.object, frame);
        if (!obj.ok()) return obj;
        Value receiver = std::move(obj.value);
        if (receiver.is_null()) {
            // the receiver is checked (and possibly repaired) before any argument runs
            auto taken = activate(node.point, node.method, frame, node.object.get(),
                                  receiver);
            if (taken) return *taken;
        }
        if (!receiver.is_object())
            return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                 "method call on " + receiver.type_name());
        const ClassDecl* cls = prog_.find_class(receiver.as_object()->class_name);
        const FunDecl* method = cls != nullptr ? cls->find_method(node.method) : nullptr;
        if (method == nullptr)
            return abort_runtime(RuntimeErrorKind::MissingMember, loc,
                                 receiver.as_object()->class_name + " has no method '" +
                                     node.method + "'");
        std::vector<Value> args;
        args.reserve(node.args.size());
        for (const auto& a : node.args) {
            Flow f = eval(*a, frame);
            if (!f.ok()) return f;
            args.push_back(std::move(f.value));
        }
        if (args.size() != method->params.size())
            return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                 node.method + " expects " +
                                     std::to_string(method->params.size()) +
                                     " arguments");
        return call_function(*method, std::move(args), receiver);
    }

    Flow eval_binary(const Binary& node, SourceLoc loc, Frame& frame) {
        if (node.op == BinaryOp::And || node.op == BinaryOp::Or) {
            Flow lhs = eval(*node.lhs, frame);
            if (!lhs.ok()) return lhs;
            if (!lhs.value.is_bool())
                return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                     "logic on " + lhs.value.type_name());
            bool l = lhs.value.as_bool();
            if (node.op == BinaryOp::And && !l) return Flow::val(Value::of_bool(false));
            if (node.op == BinaryOp::Or && l) return Flow::val(Value::of_bool(true));
            Flow rhs = eval(*node.rhs, frame);
            if (!rhs.ok()) return rhs;
            if (!rhs.value.is_bool())
                return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                     "logic on " + rhs.value.type_name());
            return Flow::val(Value::of_bool(rhs.value.as_bool()));
        }

        Flow lhs = eval(*node.lhs, frame);
        if (!lhs.ok()) return lhs;
        Flow rhs = eval(*node.rhs, frame);
        if (!rhs.ok()) return rhs;
        const Value& a = lhs.value;
        const Value& b = rhs.value;

        switch (node.op) {
        case BinaryOp::Eq: return Flow::val(Value::of_bool(value_equals(a, b)));
        case BinaryOp::Ne: return Flow::val(Value::of_bool(!value_equals(a, b)));
        case BinaryOp::Add: {
            if (a.is_int() && b.is_int())
                return Flow::val(Value::of_int(a.as_int() + b.as_int()));
            if (a.is_str() || b.is_str()) {
                auto text = [&](const Value& v) -> std::optional<std::string> {
                    if (v.is_str()) return v.as_str();
                    if (v.is_int()) return std::to_string(v.as_int());
                    if (v.is_bool()) return std::string(v.as_bool() ? "true" : "false");
                    return std::nullopt;  // Null and objects do not concatenate
                };
                auto l = text(a);
                auto r = text(b);
                if (l && r) return Flow::val(Value::of_str(*l + *r));
            }
            return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                 "'+' on " + a.type_name() + " and " + b.type_name());
        }
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div: {
            if (!a.is_int() || !b.is_int())
                return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                     "arithmetic on " + a.type_name() + " and " +
                                         b.type_name());
            if (node.op == BinaryOp::Sub)
                return Flow::val(Value::of_int(a.as_int() - b.as_int()));
            if (node.op == BinaryOp::Mul)
                return Flow::val(Value::of_int(a.as_int() * b.as_int()));
            if (b.as_int() == 0)
                return abort_runtime(RuntimeErrorKind::DivisionByZero, loc,
                                     "division by zero");
            return Flow::val(Value::of_int(a.as_int() / b.as_int()));
        }
        case BinaryOp::Lt:
        case BinaryOp::Gt: {
            if (!a.is_int() || !b.is_int())
                return abort_runtime(RuntimeErrorKind::TypeError, loc,
                                     "comparison on " + a.type_name() + " and " +
                                         b.type_name());
            bool res = node.op == BinaryOp::Lt ? a.as_int() < b.as_int()
                                               : a.as_int() > b.as_int();
            return Flow::val(Value::of_bool(res));
        }
        default: break;
        }
        return abort_runtime(RuntimeErrorKind::TypeError, loc, "bad operator");
    }
};

}  // namespace

ExecResult execute(const Program& program, const std::string& entry,
                   DecisionProvider& provider, uint64_t step_budget) {
    Interp interp(program, provider, step_budget);
    return interp.run(entry);
}

ProviderResponse ScriptProvider::on_activation(const ActivationContext& ctx) {
    if (next_ >= script_.size()) {
        pending_.assign(ctx.enumeration.begin(), ctx.enumeration.end());
        pending_point_ = ctx.site.point;
        return ProviderResponse::exhausted();
    }
    const patchmodel::SequenceStep& step = script_[next_];
    if (step.point != ctx.site.point)
        throw ReplayMismatchError("script expects " + step.point.to_string() +
                                  " but " + ctx.site.point.to_string() + " activated");
    ++next_;
    return ProviderResponse::take(step.decision);
}

}  // namespace banditlab::minilang
