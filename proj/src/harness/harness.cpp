#include "banditlab/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "banditlab/minilang/parser.hpp"
#include "json.hpp"

namespace banditlab::harness {

using minilang::Program;

std::vector<double> default_zetas() {
    std::vector<double> zs;
    for (int i = 0; i <= 10; ++i) zs.push_back(i / 10.0);
    return zs;
}

std::vector<uint64_t> default_seeds() {
    std::vector<uint64_t> seeds;
    for (uint64_t s = 1; s <= 31; ++s) seeds.push_back(s);
    return seeds;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fixture_id(const ScenarioConfig& config) {
    if (!config.fixture.empty()) return config.fixture;
    return std::filesystem::path(config.program_path).stem().string();
}

}  // namespace

CellResult run_cell(const Program& program, const ScenarioConfig& config, double zeta,
                    uint64_t seed) {
    engine::EngineConfig ec{zeta, config.step_budget};
    engine::Rng rng(seed);

    CellResult cell;
    cell.trace.fixture = fixture_id(config);
    cell.trace.zeta = zeta;
    cell.trace.seed = seed;

    uint64_t successes = 0;
    uint64_t last_new = 0;
    for (uint64_t i = 1; i <= config.laps; ++i) {
        engine::LapsResult laps =
            engine::run_laps(program, config.entry, ec, cell.portfolio, rng);
        if (laps.outcome.success()) ++successes;
        if (laps.discovered_new_sequence) last_new = laps.laps_index;
        cell.trace.explored.push_back(cell.portfolio.explored.size());
        cell.trace.handled_fraction.push_back(static_cast<double>(successes) /
                                              static_cast<double>(i));
    }

    cell.row.fixture = cell.trace.fixture;
    cell.row.zeta = zeta;
    cell.row.seed = seed;
    cell.row.points = cell.portfolio.points.size();
    cell.row.explored = cell.portfolio.explored.size();
    cell.row.valid = cell.portfolio.patch_count();
    cell.row.handled_fraction =
        config.laps == 0 ? 0.0
                         : static_cast<double>(successes) /
                               static_cast<double>(config.laps);
    cell.row.laps_to_max_exploration = last_new;
    return cell;
}

namespace {

struct CellTask {
    const Program* program = nullptr;
    const ScenarioConfig* config = nullptr;
    double zeta = 0.0;
    uint64_t seed = 0;
};

// cells are independent; order is restored by sorting afterwards
std::vector<CellResult> run_cells(const std::vector<CellTask>& tasks, unsigned workers) {
    std::vector<CellResult> results(tasks.size());
    if (workers <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i)
            results[i] = run_cell(*tasks[i].program, *tasks[i].config, tasks[i].zeta,
                                  tasks[i].seed);
        return results;
    }
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            results[i] = run_cell(*tasks[i].program, *tasks[i].config, tasks[i].zeta,
                                  tasks[i].seed);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = std::min<size_t>(workers, tasks.size());
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

bool row_order(const ReportRow& a, const ReportRow& b) {
    if (a.fixture != b.fixture) return a.fixture < b.fixture;
    if (a.zeta != b.zeta) return a.zeta < b.zeta;
    return a.seed < b.seed;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, unsigned workers) {
    Program program = minilang::load_program_file(config.program_path);

    std::vector<CellTask> tasks;
    for (double zeta : config.zetas)
        for (uint64_t seed : config.seeds) tasks.push_back({&program, &config, zeta, seed});

    std::vector<CellResult> cells = run_cells(tasks, workers);

    std::vector<size_t> order(cells.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return row_order(cells[a].row, cells[b].row);
    });

    ScenarioResult result;
    for (size_t i : order) {
        result.rows.push_back(cells[i].row);
        result.traces.push_back(std::move(cells[i].trace));
    }
    return result;
}

std::vector<ReportRow> run_grid(const std::vector<ScenarioConfig>& configs,
                                unsigned workers) {
    std::vector<Program> programs;
    programs.reserve(configs.size());
    for (const auto& c : configs) programs.push_back(minilang::load_program_file(c.program_path));

    std::vector<CellTask> tasks;
    for (size_t i = 0; i < configs.size(); ++i)
        for (double zeta : configs[i].zetas)
            for (uint64_t seed : configs[i].seeds)
                tasks.push_back({&programs[i], &configs[i], zeta, seed});

    std::vector<CellResult> cells = run_cells(tasks, workers);

    std::vector<ReportRow> rows;
    rows.reserve(cells.size());
    for (auto& c : cells) rows.push_back(std::move(c.row));
    std::sort(rows.begin(), rows.end(), row_order);
    return rows;
}

unsigned worker_count_from_env() {
    if (const char* env = std::getenv("BANDITLAB_WORKERS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out =
        "fixture,zeta,seed,points,explored,valid,handled_fraction,"
        "laps_to_max_exploration\n";
    for (const auto& r : rows) {
        out += r.fixture;
        out += ',' + format_double(r.zeta);
        out += ',' + std::to_string(r.seed);
        out += ',' + std::to_string(r.points);
        out += ',' + std::to_string(r.explored);
        out += ',' + std::to_string(r.valid);
        out += ',' + format_double(r.handled_fraction);
        out += ',' + std::to_string(r.laps_to_max_exploration);
        out += '\n';
    }
    return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({
            {"fixture", r.fixture},
            {"zeta", r.zeta},
            {"seed", r.seed},
            {"points", r.points},
            {"explored", r.explored},
            {"valid", r.valid},
            {"handled_fraction", r.handled_fraction},
            {"laps_to_max_exploration", r.laps_to_max_exploration},
        });
    }
    nlohmann::json doc;
    doc["rows"] = std::move(arr);
    return doc.dump(2);
}

std::vector<ReportRow> report_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    const nlohmann::json& arr = doc.is_array() ? doc : doc.at("rows");
    std::vector<ReportRow> rows;
    for (const auto& j : arr) {
        ReportRow r;
        r.fixture = j.at("fixture").get<std::string>();
        r.zeta = j.at("zeta").get<double>();
        r.seed = j.at("seed").get<uint64_t>();
        r.points = j.at("points").get<uint64_t>();
        r.explored = j.at("explored").get<uint64_t>();
        r.valid = j.at("valid").get<uint64_t>();
        r.handled_fraction = j.at("handled_fraction").get<double>();
        r.laps_to_max_exploration = j.at("laps_to_max_exploration").get<uint64_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string trace_csv(const ConvergenceTrace& trace) {
    std::string out = "laps,explored,handled_fraction\n";
    for (size_t i = 0; i < trace.explored.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',' + std::to_string(trace.explored[i]);
        out += ',' + format_double(trace.handled_fraction[i]);
        out += '\n';
    }
    return out;
}

std::vector<ParetoPoint> pareto_points(const std::vector<ReportRow>& rows,
                                       const std::string& fixture) {
    std::vector<ParetoPoint> points;
    for (const auto& r : rows)
        if (r.fixture == fixture)
            points.push_back({r.laps_to_max_exploration, r.handled_fraction, r.zeta});
    return points;
}

std::string pareto_csv(const std::vector<ParetoPoint>& points) {
    std::string out = "laps_to_max_exploration,handled_fraction,zeta\n";
    for (const auto& p : points) {
        out += std::to_string(p.laps_to_max_exploration);
        out += ',' + format_double(p.handled_fraction);
        out += ',' + format_double(p.zeta);
        out += '\n';
    }
    return out;
}

namespace {

ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
    ScenarioConfig config;
    config.program_path = j.at("program").get<std::string>();
    if (!base_dir.empty() && std::filesystem::path(config.program_path).is_relative())
        config.program_path = (base_dir / config.program_path).string();
    if (j.contains("fixture")) config.fixture = j.at("fixture").get<std::string>();
    if (config.fixture.empty())
        config.fixture = std::filesystem::path(config.program_path).stem().string();
    if (j.contains("entry")) config.entry = j.at("entry").get<std::string>();
    if (j.contains("laps")) config.laps = j.at("laps").get<uint64_t>();
    if (j.contains("zetas")) config.zetas = j.at("zetas").get<std::vector<double>>();
    if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    if (j.contains("step_budget")) config.step_budget = j.at("step_budget").get<uint64_t>();
    if (j.contains("sequence_cap"))
        config.sequence_cap = j.at("sequence_cap").get<uint64_t>();
    return config;
}

}  // namespace

std::vector<ScenarioConfig> load_grid_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    const nlohmann::json& arr = doc.is_array() ? doc : doc.at("scenarios");
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<ScenarioConfig> configs;
    for (const auto& j : arr) configs.push_back(scenario_from_json(j, base));
    return configs;
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
    return scenario_from_json(nlohmann::json::parse(text), {});
}

}  // namespace banditlab::harness
