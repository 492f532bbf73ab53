#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "banditlab/minilang/ast.hpp"
#include "banditlab/minilang/value.hpp"
#include "banditlab/patchmodel/decision.hpp"
#include "banditlab/patchmodel/enumerate.hpp"

namespace banditlab::minilang {

constexpr uint64_t kDefaultStepBudget = 1'000'000;

enum class RuntimeErrorKind { DivisionByZero, MissingMember, TypeError };
std::string_view runtime_error_kind_name(RuntimeErrorKind k);

// Final classification of one laps (one entry-function invocation).
struct LapsOutcome {
    enum class Kind {
        Success,            // completed, every executed assert held
        OracleFailed,       // an assert evaluated to false
        UnrepairedNull,     // provider declined; the null dereference stands
        RuntimeError,       // non-null fault; never recoverable
        StepBudgetExceeded,
        NeedsMoreDecisions,  // provider ran out of scripted decisions
    };
    Kind kind = Kind::Success;
    std::optional<DecisionPointId> point;  // UnrepairedNull / NeedsMoreDecisions
    RuntimeErrorKind error = RuntimeErrorKind::TypeError;
    SourceLoc loc;        // OracleFailed / RuntimeError
    std::string detail;   // human-readable diagnostic

    bool success() const { return kind == Kind::Success; }
    std::string to_string() const;  // kind[(payload)]
};

struct ExecutionTrace {
    std::vector<DecisionPointId> activated;  // in activation order
    patchmodel::DecisionSequence taken;      // one entry per served activation
    uint64_t steps = 0;
};

// Handed to the provider at every activation.
struct ActivationContext {
    const patchmodel::ActivationSite& site;
    std::span<const patchmodel::Decision> enumeration;  // canonical, non-empty
    size_t activation_index = 0;                        // 0-based within the laps
};

struct ProviderResponse {
    enum class Kind { Take, Unrepaired, Exhausted };
    Kind kind = Kind::Unrepaired;
    patchmodel::Decision decision;  // when kind == Take; must come from the enumeration

    static ProviderResponse take(patchmodel::Decision d) {
        return {Kind::Take, std::move(d)};
    }
    static ProviderResponse unrepaired() { return {Kind::Unrepaired, {}}; }
    static ProviderResponse exhausted() { return {Kind::Exhausted, {}}; }
};

class DecisionProvider {
public:
    virtual ~DecisionProvider() = default;
    virtual ProviderResponse on_activation(const ActivationContext& ctx) = 0;
};

struct ExecResult {
    LapsOutcome outcome;
    ExecutionTrace trace;
};

// Runs entry() to completion under the provider. The entry function must exist
// and take no parameters (FixtureError otherwise). Never lets a null
// dereference escape: each one activates its decision point first.
ExecResult execute(const Program& program, const std::string& entry,
                   DecisionProvider& provider,
                   uint64_t step_budget = kDefaultStepBudget);

struct FixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scripted replay fed a fixed (point, decision) list. Exhaustion yields
// NeedsMoreDecisions; a script step naming a different point than the one
// activated throws (non-deterministic program or bug).
struct ReplayMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ScriptProvider : public DecisionProvider {
public:
    explicit ScriptProvider(patchmodel::DecisionSequence script)
        : script_(std::move(script)) {}

    ProviderResponse on_activation(const ActivationContext& ctx) override;

    // enumeration observed when the script ran dry (explorer expansion)
    const std::vector<patchmodel::Decision>& pending_enumeration() const {
        return pending_;
    }
    const std::optional<DecisionPointId>& pending_point() const { return pending_point_; }
    size_t consumed() const { return next_; }

private:
    patchmodel::DecisionSequence script_;
    size_t next_ = 0;
    std::vector<patchmodel::Decision> pending_;
    std::optional<DecisionPointId> pending_point_;
};

// Always declines: every null dereference surfaces as UnrepairedNull.
class NoneProvider : public DecisionProvider {
public:
    ProviderResponse on_activation(const ActivationContext&) override {
        return ProviderResponse::unrepaired();
    }
};

}  // namespace banditlab::minilang
