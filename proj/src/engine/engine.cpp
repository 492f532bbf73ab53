#include "banditlab/engine/engine.hpp"

#include <algorithm>

#include "json.hpp"

namespace banditlab::engine {

using minilang::ActivationContext;
using minilang::DecisionPointId;
using patchmodel::Decision;

uint64_t Portfolio::patch_count() const {
    uint64_t n = 0;
    for (const auto& [point, list] : patches) n += list.size();
    return n;
}

std::string Portfolio::to_json() const {
    nlohmann::json doc;
    doc["laps_completed"] = laps_completed;

    nlohmann::json patch_map = nlohmann::json::object();
    for (const auto& [point, list] : patches) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : list) {
            arr.push_back({
                {"sequence", patchmodel::sequence_to_string(p.sequence)},
                {"applications", p.applications},
                {"successes", p.successes},
                {"discovery_laps", p.discovery_laps},
            });
        }
        patch_map[point.to_string()] = std::move(arr);
    }
    doc["patches"] = std::move(patch_map);

    nlohmann::json point_map = nlohmann::json::object();
    for (const auto& [point, pk] : points) {
        nlohmann::json entry;
        entry["enumeration_size"] =
            pk.enumeration_size ? nlohmann::json(*pk.enumeration_size) : nullptr;
        entry["used_indices"] = pk.used_indices;
        point_map[point.to_string()] = std::move(entry);
    }
    doc["points"] = std::move(point_map);

    nlohmann::json seqs = nlohmann::json::array();
    for (const auto& s : explored) seqs.push_back(patchmodel::sequence_to_string(s));
    doc["explored"] = std::move(seqs);

    return doc.dump(2);
}

const RuntimePatch& best_patch(std::span<const RuntimePatch> patches) {
    const RuntimePatch* best = &patches.front();
    for (const auto& p : patches.subspan(1)) {
        // success rates compared exactly: s1/a1 <=> s2/a2 as s1*a2 <=> s2*a1
        uint64_t lhs = p.successes * best->applications;
        uint64_t rhs = best->successes * p.applications;
        bool better = lhs > rhs ||
                      (lhs == rhs && (p.sequence.size() < best->sequence.size() ||
                                      (p.sequence.size() == best->sequence.size() &&
                                       p.discovery_laps < best->discovery_laps)));
        if (better) best = &p;
    }
    return *best;
}

namespace {

std::optional<Decision> exploit_step(const ActivationContext& ctx,
                                     const RuntimePatch& patch) {
    size_t k = ctx.activation_index;
    if (k >= patch.sequence.size()) return std::nullopt;        // past the patch end
    const auto& step = patch.sequence[k];
    if (step.point != ctx.site.point) return std::nullopt;      // point mismatch
    for (const Decision& d : ctx.enumeration)
        if (d == step.decision) return d;                       // canonical copy
    return std::nullopt;  // payload gone from the enumeration
}

}  // namespace

Decision select_decision(const ActivationContext& ctx, LapsMode& mode,
                         Portfolio& portfolio, const DecisionPointId& failure_point,
                         double zeta, Rng& rng) {
    const DecisionPointId& point = ctx.site.point;
    const size_t n = ctx.enumeration.size();
    const bool known = portfolio.knows(point);

    PointKnowledge& pk = portfolio.points[point];
    if (!pk.enumeration_size) pk.enumeration_size = static_cast<uint32_t>(n);

    Decision chosen;
    if (!known) {
        // a point seen for the first time carries no ranking: pick uniformly
        if (mode.kind == LapsMode::Kind::Exploiting) {
            mode.kind = LapsMode::Kind::Exploring;
            mode.patch = nullptr;
            mode.diverged = true;  // the patch never predicted this point
        }
        chosen = ctx.enumeration[rng.next_index(n)];
    } else {
        double u = rng.next_unit();
        if (mode.kind == LapsMode::Kind::Exploring && !mode.diverged && u < zeta) {
            auto it = portfolio.patches.find(failure_point);
            if (it != portfolio.patches.end() && !it->second.empty()) {
                mode.kind = LapsMode::Kind::Exploiting;
                mode.patch = &best_patch(it->second);
            }
        }
        bool selected = false;
        if (mode.kind == LapsMode::Kind::Exploiting) {
            if (auto d = exploit_step(ctx, *mode.patch)) {
                chosen = *d;
                selected = true;
            } else {
                // divergence: the rest of this laps explores
                mode.kind = LapsMode::Kind::Exploring;
                mode.patch = nullptr;
                mode.diverged = true;
            }
        }
        if (!selected) {
            auto unused = std::find_if(ctx.enumeration.begin(), ctx.enumeration.end(),
                                       [&](const Decision& d) {
                                           return pk.used_indices.count(d.index) == 0;
                                       });
            chosen = unused != ctx.enumeration.end()
                         ? *unused
                         : ctx.enumeration[rng.next_index(n)];  // stationary regime
        }
    }

    pk.used_indices.insert(chosen.index);
    return chosen;
}

namespace {

class BanditProvider : public minilang::DecisionProvider {
public:
    BanditProvider(Portfolio& portfolio, double zeta, Rng& rng)
        : portfolio_(portfolio), zeta_(zeta), rng_(rng) {}

    minilang::ProviderResponse on_activation(const ActivationContext& ctx) override {
        if (!failure_point_) failure_point_ = ctx.site.point;
        Decision d =
            select_decision(ctx, mode_, portfolio_, *failure_point_, zeta_, rng_);
        return minilang::ProviderResponse::take(std::move(d));
    }

private:
    Portfolio& portfolio_;
    double zeta_;
    Rng& rng_;
    LapsMode mode_;
    std::optional<DecisionPointId> failure_point_;
};

}  // namespace

LapsResult run_laps(const minilang::Program& program, const std::string& entry,
                    const EngineConfig& config, Portfolio& portfolio, Rng& rng) {
    BanditProvider provider(portfolio, config.zeta, rng);
    minilang::ExecResult exec =
        minilang::execute(program, entry, provider, config.step_budget);

    LapsResult result;
    result.taken = std::move(exec.trace.taken);
    result.outcome = std::move(exec.outcome);
    result.laps_index = ++portfolio.laps_completed;

    if (!result.taken.empty()) {
        result.discovered_new_sequence = portfolio.explored.insert(result.taken).second;

        const DecisionPointId& key = exec.trace.activated.front();
        auto& list = portfolio.patches[key];
        auto stored = std::find_if(list.begin(), list.end(), [&](const RuntimePatch& p) {
            return p.sequence == result.taken;
        });
        if (result.outcome.success()) {
            if (stored != list.end()) {
                ++stored->applications;
                ++stored->successes;
            } else {
                list.push_back({result.taken, 1, 1, result.laps_index});
            }
        } else if (stored != list.end()) {
            ++stored->applications;
        }
        if (list.empty()) portfolio.patches.erase(key);
    }
    return result;
}

}  // namespace banditlab::engine
