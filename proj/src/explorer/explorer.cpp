#include "banditlab/explorer/explorer.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"

namespace banditlab::explorer {

using minilang::ExecResult;
using minilang::LapsOutcome;
using minilang::Program;
using minilang::ScriptProvider;
using patchmodel::Decision;
using patchmodel::DecisionSequence;

ExecResult replay(const Program& program, const std::string& entry,
                  const DecisionSequence& script, uint64_t step_budget) {
    ScriptProvider provider(script);
    return minilang::execute(program, entry, provider, step_budget);
}

namespace {

class Explorer {
public:
    Explorer(const Program& program, const std::string& entry, uint64_t step_budget,
             uint64_t sequence_cap)
        : program_(program), entry_(entry), budget_(step_budget), cap_(sequence_cap) {}

    ExploreResult run() {
        ExploreResult result;
        result.metrics.program = program_.source_name;
        metrics_ = &result.metrics;
        sequences_ = &result.sequences;

        DecisionSequence prefix;
        result.tree.root = expand(prefix);

        auto& m = result.metrics;
        m.encountered_points = m.activations.size();
        if (m.total_sequences > 0)
            m.fertility = static_cast<double>(m.valid_sequences) /
                          static_cast<double>(m.total_sequences);
        if (!valid_sizes_.empty()) {
            std::sort(valid_sizes_.begin(), valid_sizes_.end());
            m.size_min = valid_sizes_.front();
            m.size_max = valid_sizes_.back();
            m.size_median = valid_sizes_[(valid_sizes_.size() - 1) / 2];  // lower median
        }
        m.truncated = truncated_;
        return result;
    }

private:
    const Program& program_;
    const std::string& entry_;
    uint64_t budget_;
    uint64_t cap_;
    bool truncated_ = false;
    SearchSpaceMetrics* metrics_ = nullptr;
    std::vector<std::pair<DecisionSequence, bool>>* sequences_ = nullptr;
    std::vector<uint32_t> valid_sizes_;

    DecisionTree::Child expand(DecisionSequence& prefix) {
        ScriptProvider provider(prefix);
        ExecResult exec = minilang::execute(program_, entry_, provider, budget_);

        if (exec.outcome.kind == LapsOutcome::Kind::NeedsMoreDecisions &&
            provider.consumed() == prefix.size()) {
            auto node = std::make_unique<DecisionTree::Node>();
            node->point = *provider.pending_point();
            ++metrics_->activations[node->point];
            for (const Decision& d : provider.pending_enumeration()) {
                if (metrics_->total_sequences >= cap_) {
                    truncated_ = true;
                    break;
                }
                prefix.push_back({node->point, d});
                DecisionTree::Child child = expand(prefix);
                prefix.pop_back();
                node->edges.push_back({d, std::move(child)});
            }
            return node;
        }

        // a bare root leaf (program never activates) leaves the space empty
        if (!prefix.empty()) {
            ++metrics_->total_sequences;
            bool ok = exec.outcome.success();
            if (ok) {
                ++metrics_->valid_sequences;
                valid_sizes_.push_back(static_cast<uint32_t>(prefix.size()));
            }
            sequences_->push_back({prefix, ok});
        }
        return DecisionTree::Leaf{std::move(exec.outcome)};
    }
};

nlohmann::json child_to_json(const DecisionTree::Child& child) {
    if (const auto* leaf = std::get_if<DecisionTree::Leaf>(&child))
        return {{"outcome", leaf->outcome.to_string()}};
    const auto& node = std::get<std::unique_ptr<DecisionTree::Node>>(child);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : node->edges)
        edges.push_back({{"decision", patchmodel::decision_to_string(e.decision)},
                         {"child", child_to_json(e.child)}});
    return {{"point", node->point.to_string()}, {"edges", std::move(edges)}};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

ExploreResult explore_exhaustive(const Program& program, const std::string& entry,
                                 uint64_t step_budget, uint64_t sequence_cap) {
    return Explorer(program, entry, step_budget, sequence_cap).run();
}

std::string tree_to_json(const DecisionTree& tree) {
    nlohmann::json doc;
    doc["root"] = tree.root ? child_to_json(*tree.root) : nlohmann::json(nullptr);
    return doc.dump(2);
}

std::string metrics_csv_header() {
    return "program,points,sequences,valid,min,med,max,truncated";
}

std::string metrics_csv_row(const SearchSpaceMetrics& m) {
    auto size_field = [](const std::optional<uint32_t>& s) {
        return s ? std::to_string(*s) : std::string("NA");
    };
    std::string row = m.program;
    row += ',' + std::to_string(m.encountered_points);
    row += ',' + std::to_string(m.total_sequences);
    row += ',' + std::to_string(m.valid_sequences);
    row += ',' + size_field(m.size_min);
    row += ',' + size_field(m.size_median);
    row += ',' + size_field(m.size_max);
    row += m.truncated ? ",true" : ",false";
    return row;
}

std::string metrics_to_json(const SearchSpaceMetrics& m) {
    nlohmann::json doc;
    doc["program"] = m.program;
    doc["points"] = m.encountered_points;
    doc["sequences"] = m.total_sequences;
    doc["valid"] = m.valid_sequences;
    doc["fertility"] =
        m.fertility ? nlohmann::json(format_double(*m.fertility)) : nullptr;
    doc["size_min"] = m.size_min ? nlohmann::json(*m.size_min) : nullptr;
    doc["size_median"] = m.size_median ? nlohmann::json(*m.size_median) : nullptr;
    doc["size_max"] = m.size_max ? nlohmann::json(*m.size_max) : nullptr;
    doc["truncated"] = m.truncated;
    nlohmann::json acts = nlohmann::json::object();
    for (const auto& [point, count] : m.activations) acts[point.to_string()] = count;
    doc["activations"] = std::move(acts);
    return doc.dump(2);
}

}  // namespace banditlab::explorer
