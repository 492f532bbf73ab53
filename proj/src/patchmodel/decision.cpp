#include "banditlab/patchmodel/decision.hpp"

#include <array>

namespace banditlab::patchmodel {

namespace {
constexpr std::array<std::string_view, 6> kNames = {
    "ReplaceReuse", "ReplaceNew", "SkipLine", "ReturnNull", "ReturnNew", "ReturnVar",
};
}

std::string_view strategy_name(Strategy s) {
    return kNames[static_cast<size_t>(s)];
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
    for (size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<Strategy>(i);
    return std::nullopt;
}

std::string decision_to_string(const Decision& d) {
    std::string out{strategy_name(d.strategy)};
    if (!d.payload.empty()) {
        out += ':';
        out += d.payload;
    }
    return out;
}

std::optional<Decision> decision_from_string(std::string_view text) {
    Decision d;
    auto colon = text.find(':');
    std::string_view name = colon == std::string_view::npos ? text : text.substr(0, colon);
    auto strat = strategy_from_name(name);
    if (!strat) return std::nullopt;
    d.strategy = *strat;
    if (colon != std::string_view::npos) {
        d.payload = std::string(text.substr(colon + 1));
        if (d.payload.empty()) return std::nullopt;
    }
    return d;
}

std::string step_to_string(const SequenceStep& step) {
    return decision_to_string(step.decision) + "@" + step.point.to_string();
}

std::optional<SequenceStep> step_from_string(std::string_view text) {
    auto at = text.find('@');
    if (at == std::string_view::npos) return std::nullopt;
    auto decision = decision_from_string(text.substr(0, at));
    if (!decision) return std::nullopt;
    auto point = minilang::DecisionPointId::from_string(text.substr(at + 1));
    if (!point) return std::nullopt;
    return SequenceStep{std::move(*point), std::move(*decision)};
}

std::string sequence_to_string(const DecisionSequence& seq) {
    std::string out;
    for (size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out += " ; ";
        out += step_to_string(seq[i]);
    }
    return out;
}

}  // namespace banditlab::patchmodel
