#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/minilang/ast.hpp"

namespace banditlab::patchmodel {

// The six recovery strategies, in canonical enumeration order.
enum class Strategy : uint8_t {
    ReplaceReuse,  // substitute an in-scope object for the null receiver
    ReplaceNew,    // substitute a fresh instance of a class declaring the member
    SkipLine,      // abandon the enclosing statement
    ReturnNull,    // unwind the frame returning Null
    ReturnNew,     // unwind the frame returning a fresh instance of the return class
    ReturnVar,     // unwind the frame returning an in-scope value of the return class
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

struct Decision {
    Strategy strategy = Strategy::SkipLine;
    std::string payload;  // variable or class name; empty for SkipLine/ReturnNull
    uint32_t index = 0;   // position in the canonical enumeration at its point

    // identity is (strategy, payload); index is bookkeeping
    friend bool operator==(const Decision& a, const Decision& b) {
        return a.strategy == b.strategy && a.payload == b.payload;
    }
    friend auto operator<=>(const Decision& a, const Decision& b) {
        if (auto c = a.strategy <=> b.strategy; c != 0) return c;
        return a.payload <=> b.payload;
    }
};

// text form: Strategy:payload (colon omitted when the payload is empty)
std::string decision_to_string(const Decision& d);
std::optional<Decision> decision_from_string(std::string_view text);

// A (point, decision) pair as taken during one laps.
struct SequenceStep {
    minilang::DecisionPointId point;
    Decision decision;

    friend bool operator==(const SequenceStep&, const SequenceStep&) = default;
    friend auto operator<=>(const SequenceStep& a, const SequenceStep& b) {
        if (auto c = a.point <=> b.point; c != 0) return c;
        return a.decision <=> b.decision;
    }
};

using DecisionSequence = std::vector<SequenceStep>;

// text form: Strategy:payload@function/stmtPath/exprIdx
std::string step_to_string(const SequenceStep& step);
std::optional<SequenceStep> step_from_string(std::string_view text);

std::string sequence_to_string(const DecisionSequence& seq);  // steps joined by " ; "

}  // namespace banditlab::patchmodel
