#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "banditlab/engine/rng.hpp"
#include "banditlab/minilang/interpreter.hpp"
#include "banditlab/patchmodel/decision.hpp"

namespace banditlab::engine {

struct EngineConfig {
    double zeta = 0.5;  // exploitation probability at known points, in [0, 1]
    uint64_t step_budget = minilang::kDefaultStepBudget;
};

// A decision sequence that completed at least one laps successfully.
struct RuntimePatch {
    patchmodel::DecisionSequence sequence;
    uint64_t applications = 0;  // laps that ended with exactly this sequence
    uint64_t successes = 0;     // ... and passed the oracle (>= 1 by construction)
    uint64_t discovery_laps = 0;  // 1-based laps index of first success

    double success_rate() const {
        return applications == 0 ? 0.0
                                 : static_cast<double>(successes) /
                                       static_cast<double>(applications);
    }
};

struct PointKnowledge {
    std::set<uint32_t> used_indices;            // decisions actually taken here
    std::optional<uint32_t> enumeration_size;   // as first observed
};

// Everything the bandit remembers between laps.
struct Portfolio {
    // patches keyed by the failure point (first activation of their laps)
    std::map<minilang::DecisionPointId, std::vector<RuntimePatch>> patches;
    // activation knowledge keyed per decision point
    std::map<minilang::DecisionPointId, PointKnowledge> points;
    // every distinct non-empty sequence ever taken, valid or not
    std::set<patchmodel::DecisionSequence> explored;
    uint64_t laps_completed = 0;

    uint64_t patch_count() const;
    bool knows(const minilang::DecisionPointId& point) const {
        return points.count(point) != 0;
    }
    std::string to_json() const;  // pretty-printed export
};

// Highest success rate; ties broken by shorter sequence, then earlier
// discovery. Input must be non-empty.
const RuntimePatch& best_patch(std::span<const RuntimePatch> patches);

// Per-laps selection state. Exploiting carries the patch being replayed;
// once a replay diverges, the rest of the laps stays in exploration.
struct LapsMode {
    enum class Kind { Exploring, Exploiting };
    Kind kind = Kind::Exploring;
    const RuntimePatch* patch = nullptr;
    bool diverged = false;
};

// One selection under the epsilon-greedy policy. `failure_point` is the first
// activation of the current laps; mode may flip to Exploiting (u < zeta with a
// non-empty portfolio at the failure point) or back to Exploring (divergence).
// Draw order: unknown point takes one index draw; known point takes one u
// draw, plus one index draw in stationary mode (all decisions used).
patchmodel::Decision select_decision(const minilang::ActivationContext& ctx,
                                     LapsMode& mode, Portfolio& portfolio,
                                     const minilang::DecisionPointId& failure_point,
                                     double zeta, Rng& rng);

struct LapsResult {
    patchmodel::DecisionSequence taken;
    minilang::LapsOutcome outcome;
    uint64_t laps_index = 0;  // 1-based
    bool discovered_new_sequence = false;
};

// Runs a single laps of entry() and folds the result into the portfolio:
// activation knowledge and used decisions update as decisions are taken;
// non-empty sequences are recorded, successful ones as runtime patches.
LapsResult run_laps(const minilang::Program& program, const std::string& entry,
                    const EngineConfig& config, Portfolio& portfolio, Rng& rng);

}  // namespace banditlab::engine
