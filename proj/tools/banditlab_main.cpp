// banditlab: parse .mls fixtures, explore their repair decision spaces, and run
// epsilon-greedy repair experiments over zeta/seed grids.
//
// exit codes: 0 ok, 1 usage, 2 fixture/input error, 3 exploration truncated

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "banditlab/explorer/explorer.hpp"
#include "banditlab/harness/harness.hpp"
#include "banditlab/minilang/parser.hpp"

namespace {

using namespace banditlab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFixture = 2;
constexpr int kExitTruncated = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int finish(const std::string& subcommand, const std::string& status, int code) {
    std::cout << "result: " << subcommand << ' ' << status << std::endl;
    return code;
}

int run_check(const std::string& path, const std::string& entry) {
    minilang::Program prog = minilang::load_program_file(path);
    if (!entry.empty() && prog.find_function(entry) == nullptr)
        throw minilang::FixtureError("no entry function '" + entry + "'");
    for (const auto& [point, member] : prog.decision_sites())
        std::cout << point.to_string() << ' ' << member << '\n';
    return finish("check", "ok", kExitOk);
}

struct ExhaustiveArgs {
    std::string path;
    std::string entry = "main";
    uint64_t budget = minilang::kDefaultStepBudget;
    uint64_t cap = explorer::kDefaultSequenceCap;
    std::string metrics_json;
    std::string tree_json;
};

int run_exhaustive(const ExhaustiveArgs& args) {
    minilang::Program prog = minilang::load_program_file(args.path);
    explorer::ExploreResult res =
        explorer::explore_exhaustive(prog, args.entry, args.budget, args.cap);
    std::cout << explorer::metrics_csv_header() << '\n'
              << explorer::metrics_csv_row(res.metrics) << '\n';
    if (!args.metrics_json.empty())
        write_file(args.metrics_json, explorer::metrics_to_json(res.metrics));
    if (!args.tree_json.empty()) write_file(args.tree_json, explorer::tree_to_json(res.tree));
    if (res.metrics.truncated) return finish("exhaustive", "truncated", kExitTruncated);
    return finish("exhaustive", "ok", kExitOk);
}

struct BanditArgs {
    std::string path;
    std::string entry = "main";
    double zeta = 0.0;
    uint64_t seed = 0;
    uint64_t laps = 200;
    uint64_t budget = minilang::kDefaultStepBudget;
    std::string portfolio_json;
    std::string trace_out;
};

int run_bandit(const BanditArgs& args) {
    harness::ScenarioConfig config;
    config.program_path = args.path;
    config.fixture = std::filesystem::path(args.path).stem().string();
    config.entry = args.entry;
    config.laps = args.laps;
    config.step_budget = args.budget;

    minilang::Program prog = minilang::load_program_file(args.path);
    harness::CellResult cell = harness::run_cell(prog, config, args.zeta, args.seed);
    std::cout << harness::report_csv({cell.row});
    if (!args.portfolio_json.empty())
        write_file(args.portfolio_json, cell.portfolio.to_json());
    if (!args.trace_out.empty()) write_file(args.trace_out, harness::trace_csv(cell.trace));
    return finish("bandit", "ok", kExitOk);
}

struct GridArgs {
    std::string config_path;
    std::vector<std::string> fixtures;
    std::optional<uint64_t> laps;
    std::string out_csv;
    std::string out_json;
    unsigned workers = 0;
};

int run_grid_cmd(const GridArgs& args) {
    std::vector<harness::ScenarioConfig> configs;
    if (!args.config_path.empty()) configs = harness::load_grid_config(args.config_path);
    for (const auto& f : args.fixtures) {
        harness::ScenarioConfig c;
        c.program_path = f;
        c.fixture = std::filesystem::path(f).stem().string();
        configs.push_back(std::move(c));
    }
    if (configs.empty()) {
        std::cerr << "grid: provide --config or at least one fixture\n";
        return kExitUsage;
    }
    if (args.laps)
        for (auto& c : configs) c.laps = *args.laps;

    unsigned workers = args.workers > 0 ? args.workers : harness::worker_count_from_env();
    std::vector<harness::ReportRow> rows = harness::run_grid(configs, workers);
    std::string csv = harness::report_csv(rows);
    if (!args.out_csv.empty())
        write_file(args.out_csv, csv);
    else
        std::cout << csv;
    if (!args.out_json.empty()) write_file(args.out_json, harness::report_json(rows));
    return finish("grid", "ok", kExitOk);
}

struct ParetoArgs {
    std::string report_path;
    std::string fixture;
    std::string out_csv;
};

int run_pareto(const ParetoArgs& args) {
    std::vector<harness::ReportRow> rows =
        harness::report_from_json(read_file(args.report_path));
    std::vector<harness::ParetoPoint> points = harness::pareto_points(rows, args.fixture);
    std::string csv = harness::pareto_csv(points);
    if (!args.out_csv.empty())
        write_file(args.out_csv, csv);
    else
        std::cout << csv;
    return finish("pareto", "ok", kExitOk);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"runtime null-dereference repair laboratory"};
    app.require_subcommand(1);

    std::string check_path, check_entry;
    CLI::App* check = app.add_subcommand("check", "list static decision points");
    check->add_option("fixture", check_path, ".mls program")->required();
    check->add_option("--entry", check_entry, "entry function to verify");

    ExhaustiveArgs ex;
    CLI::App* exhaustive =
        app.add_subcommand("exhaustive", "explore the whole decision tree");
    exhaustive->add_option("fixture", ex.path, ".mls program")->required();
    exhaustive->add_option("--entry", ex.entry, "entry function");
    exhaustive->add_option("--budget", ex.budget, "step budget per laps");
    exhaustive->add_option("--cap", ex.cap, "max sequences before truncation")
        ->check(CLI::PositiveNumber);
    exhaustive->add_option("--metrics", ex.metrics_json, "write metrics JSON here");
    exhaustive->add_option("--tree", ex.tree_json, "write decision tree JSON here");

    BanditArgs bd;
    CLI::App* bandit = app.add_subcommand("bandit", "run one epsilon-greedy cell");
    bandit->add_option("fixture", bd.path, ".mls program")->required();
    bandit->add_option("--zeta", bd.zeta, "exploitation probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    bandit->add_option("--seed", bd.seed, "rng seed")->required();
    bandit->add_option("--laps", bd.laps, "laps to run");
    bandit->add_option("--entry", bd.entry, "entry function");
    bandit->add_option("--budget", bd.budget, "step budget per laps");
    bandit->add_option("--portfolio", bd.portfolio_json, "write portfolio JSON here");
    bandit->add_option("--trace", bd.trace_out, "write convergence CSV here");

    GridArgs gr;
    CLI::App* grid = app.add_subcommand("grid", "sweep fixtures over zeta x seed");
    grid->add_option("fixtures", gr.fixtures, ".mls programs (defaults per fixture)");
    grid->add_option("--config", gr.config_path, "scenario list JSON");
    grid->add_option("--laps", gr.laps, "override laps for every scenario");
    grid->add_option("--out", gr.out_csv, "write report CSV here (default stdout)");
    grid->add_option("--json", gr.out_json, "write report JSON here");
    grid->add_option("--workers", gr.workers, "worker threads (default: env/hardware)");

    ParetoArgs pa;
    CLI::App* pareto =
        app.add_subcommand("pareto", "exploration-cost vs repair-benefit points");
    pareto->add_option("--report", pa.report_path, "report JSON from grid")->required();
    pareto->add_option("--fixture", pa.fixture, "fixture id to select")->required();
    pareto->add_option("--out", pa.out_csv, "write pareto CSV here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::string name = app.get_subcommands().front()->get_name();
    try {
        if (check->parsed()) return run_check(check_path, check_entry);
        if (exhaustive->parsed()) return run_exhaustive(ex);
        if (bandit->parsed()) return run_bandit(bd);
        if (grid->parsed()) return run_grid_cmd(gr);
        if (pareto->parsed()) return run_pareto(pa);
    } catch (const minilang::ParseError& e) {
        std::cerr << name << ": parse error at " << e.loc.line << ':' << e.loc.col
                  << ": " << e.what() << '\n';
        return finish(name, "error", kExitFixture);
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        return finish(name, "error", kExitFixture);
    }
    return kExitUsage;
}
