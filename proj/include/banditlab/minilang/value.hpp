#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace banditlab::minilang {

struct Object;
using ObjectRef = std::shared_ptr<Object>;

// Dynamically typed runtime value: Null, Int, Bool, Str, or ObjectRef.
struct Value {
    using Repr = std::variant<std::monostate, int64_t, bool, std::string, ObjectRef>;
    Repr v;

    Value() = default;
    explicit Value(Repr repr) : v(std::move(repr)) {}

    static Value null() { return Value{}; }
    static Value of_int(int64_t i) { return Value(Repr{i}); }
    static Value of_bool(bool b) { return Value(Repr{b}); }
    static Value of_str(std::string s) { return Value(Repr{std::move(s)}); }
    static Value of_object(ObjectRef o) { return Value(Repr{std::move(o)}); }

    bool is_null() const { return std::holds_alternative<std::monostate>(v); }
    bool is_int() const { return std::holds_alternative<int64_t>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_str() const { return std::holds_alternative<std::string>(v); }
    bool is_object() const { return std::holds_alternative<ObjectRef>(v); }

    int64_t as_int() const { return std::get<int64_t>(v); }
    bool as_bool() const { return std::get<bool>(v); }
    const std::string& as_str() const { return std::get<std::string>(v); }
    const ObjectRef& as_object() const { return std::get<ObjectRef>(v); }

    std::string type_name() const;
};

struct Object {
    std::string class_name;
    // declaration order preserved; member count is tiny, linear scan is fine
    std::vector<std::pair<std::string, Value>> fields;

    Value* find_field(std::string_view name);
    const Value* find_field(std::string_view name) const;
};

// == / != semantics: same-type value equality, object identity for refs,
// Null == Null, mismatched types compare unequal.
bool value_equals(const Value& a, const Value& b);

// rendering used by string concatenation and diagnostics
std::string value_to_display(const Value& val);

enum class VarOrigin { Param, Local };

// One visible binding of the current frame, outer scopes first.
struct ScopeEntry {
    std::string name;
    Value value;
    VarOrigin origin = VarOrigin::Local;
};

}  // namespace banditlab::minilang
