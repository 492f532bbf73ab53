#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/minilang/ast.hpp"
#include "banditlab/minilang/value.hpp"
#include "banditlab/patchmodel/decision.hpp"

namespace banditlab::patchmodel {

// Everything the patch model may inspect at an activated point. Pure view;
// the interpreter owns the state.
struct ActivationSite {
    minilang::DecisionPointId point;
    std::string member;                            // dereferenced field/method name
    std::vector<minilang::ScopeEntry> scope;       // frame snapshot, outer first
    const minilang::FunDecl* enclosing = nullptr;  // for Return* strategies
    const minilang::Program* program = nullptr;
};

// Canonical decision list for an activated point:
//   1. ReplaceReuse per in-scope non-null object whose class declares the
//      member, in scope order;
//   2. ReplaceNew per declared class declaring the member, in declaration order;
//   3. SkipLine;
//   4. ReturnNull;
//   5. ReturnNew(return class) when the return type names a declared class;
//   6. ReturnVar per in-scope non-null value of the return class, in scope order.
// Never empty: SkipLine and ReturnNull always apply.
std::vector<Decision> enumerate_decisions(const ActivationSite& site);

// What the interpreter should do to enact a decision.
struct Continuation {
    enum class Kind {
        SubstituteReceiver,  // use `value` as the receiver (rebind simple vars)
        SkipStatement,
        ReturnFromFrame,  // unwind with `value`
    };
    Kind kind = Kind::SkipStatement;
    minilang::Value value;
};

// Maps a decision onto a continuation given the live site. Returns nullopt if
// the payload is no longer applicable (replay divergence).
std::optional<Continuation> apply_decision(const ActivationSite& site, const Decision& d);

// Fresh instance with declared field initializers (missing ones are Null).
// Requires the class to exist.
minilang::Value default_construct(const minilang::Program& program, std::string_view class_name);

}  // namespace banditlab::patchmodel
