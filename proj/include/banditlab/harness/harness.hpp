#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/engine/engine.hpp"
#include "banditlab/minilang/ast.hpp"

namespace banditlab::harness {

// One experiment: a fixture swept over a zeta grid and a seed list.
std::vector<double> default_zetas();    // 0.0 .. 1.0 step 0.1
std::vector<uint64_t> default_seeds();  // 1 .. 31

struct ScenarioConfig {
    std::string program_path;
    std::string fixture;  // report id; defaults to the file stem
    std::string entry = "main";
    uint64_t laps = 200;
    std::vector<double> zetas = default_zetas();
    std::vector<uint64_t> seeds = default_seeds();
    uint64_t step_budget = minilang::kDefaultStepBudget;
    uint64_t sequence_cap = 100'000;
};

// One (fixture, zeta, seed) cell.
struct ReportRow {
    std::string fixture;
    double zeta = 0.0;
    uint64_t seed = 0;
    uint64_t points = 0;    // distinct activated decision points
    uint64_t explored = 0;  // distinct decision sequences
    uint64_t valid = 0;     // stored runtime patches
    double handled_fraction = 0.0;  // successful laps / laps
    uint64_t laps_to_max_exploration = 0;  // laps of last new sequence; 0 if none

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Per-laps cumulative view of one cell.
struct ConvergenceTrace {
    std::string fixture;
    double zeta = 0.0;
    uint64_t seed = 0;
    std::vector<uint64_t> explored;        // distinct sequences after laps i+1
    std::vector<double> handled_fraction;  // successes so far / laps so far
};

struct CellResult {
    ReportRow row;
    ConvergenceTrace trace;
    engine::Portfolio portfolio;
};

// Runs one cell deterministically: Rng seeded with the raw seed, fresh
// portfolio, `laps` laps.
CellResult run_cell(const minilang::Program& program, const ScenarioConfig& config,
                    double zeta, uint64_t seed);

struct ScenarioResult {
    std::vector<ReportRow> rows;              // sorted by (fixture, zeta, seed)
    std::vector<ConvergenceTrace> traces;     // same order
};

// Full sweep for one fixture. workers <= 1 means sequential; cell results are
// independent of scheduling.
ScenarioResult run_scenario(const ScenarioConfig& config, unsigned workers = 1);

// Multi-fixture sweep; rows sorted by (fixture, zeta, seed).
std::vector<ReportRow> run_grid(const std::vector<ScenarioConfig>& configs,
                                unsigned workers);

// BANDITLAB_WORKERS env var, else hardware concurrency, at least 1.
unsigned worker_count_from_env();

// CSV: fixture,zeta,seed,points,explored,valid,handled_fraction,laps_to_max_exploration
std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_from_json(const std::string& text);

std::string trace_csv(const ConvergenceTrace& trace);

// Exploration-cost / repair-benefit scatter point.
struct ParetoPoint {
    uint64_t laps_to_max_exploration = 0;
    double handled_fraction = 0.0;
    double zeta = 0.0;
};

std::vector<ParetoPoint> pareto_points(const std::vector<ReportRow>& rows,
                                       const std::string& fixture);
std::string pareto_csv(const std::vector<ParetoPoint>& points);

// Scenario list from JSON: either {"scenarios": [...]} or a bare array.
// Relative program paths resolve against the config file's directory.
std::vector<ScenarioConfig> load_grid_config(const std::string& path);
ScenarioConfig scenario_from_json_text(const std::string& text);

}  // namespace banditlab::harness
