#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/minilang/interpreter.hpp"
#include "banditlab/patchmodel/decision.hpp"

namespace banditlab::explorer {

constexpr uint64_t kDefaultSequenceCap = 100'000;

// Full decision tree of a program: inner nodes are activated points, edges are
// decisions, leaves are laps outcomes. A program that never fails has a bare
// Success leaf as root and an empty sequence space.
struct DecisionTree {
    struct Node;
    struct Leaf {
        minilang::LapsOutcome outcome;
    };
    using Child = std::variant<std::unique_ptr<Node>, Leaf>;
    struct Edge {
        patchmodel::Decision decision;
        Child child;
    };
    struct Node {
        minilang::DecisionPointId point;
        std::vector<Edge> edges;  // canonical enumeration order
    };

    std::optional<Child> root;
};

struct SearchSpaceMetrics {
    std::string program;
    uint64_t encountered_points = 0;   // distinct static ids seen
    uint64_t total_sequences = 0;      // leaves
    uint64_t valid_sequences = 0;      // Success leaves
    std::optional<double> fertility;   // valid/total; empty when total == 0
    std::optional<uint32_t> size_min;  // over valid sequences
    std::optional<uint32_t> size_median;  // lower median
    std::optional<uint32_t> size_max;
    bool truncated = false;
    // how many tree nodes carry each point (re-activations along paths)
    std::map<minilang::DecisionPointId, uint64_t> activations;
};

struct ExploreResult {
    DecisionTree tree;
    SearchSpaceMetrics metrics;
    // root-to-leaf sequences in DFS order, paired with validity
    std::vector<std::pair<patchmodel::DecisionSequence, bool>> sequences;
};

// Replays a fixed script from a fresh start. Trailing script steps simply go
// unused (visible via trace.taken.size()).
minilang::ExecResult replay(const minilang::Program& program, const std::string& entry,
                            const patchmodel::DecisionSequence& script,
                            uint64_t step_budget = minilang::kDefaultStepBudget);

// Depth-first exhaustive exploration by replay-from-start. Stops once the leaf
// count would exceed `sequence_cap` and marks the result truncated; everything
// counted up to that leaf is unaffected by the cap value.
ExploreResult explore_exhaustive(const minilang::Program& program,
                                 const std::string& entry,
                                 uint64_t step_budget = minilang::kDefaultStepBudget,
                                 uint64_t sequence_cap = kDefaultSequenceCap);

std::string tree_to_json(const DecisionTree& tree);

// header + one row matching the summary-table column order; NA size fields
// when there are no valid sequences
std::string metrics_csv_header();
std::string metrics_csv_row(const SearchSpaceMetrics& m);
std::string metrics_to_json(const SearchSpaceMetrics& m);

}  // namespace banditlab::explorer
