// Acceptance suite: runs every criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.

#include "hypoforge/categorization.hpp"
#include "hypoforge/chart.hpp"
#include "hypoforge/corpus.hpp"
#include "hypoforge/evaluation.hpp"
#include "hypoforge/generation.hpp"
#include "hypoforge/metrics.hpp"
#include "hypoforge/pipeline.hpp"
#include "hypoforge/table_parser.hpp"
#include "hypoforge/visualization.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace hypoforge;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

struct Checker {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

fs::path fixtures() { return fs::path(HYPOFORGE_FIXTURES_DIR); }

struct Scratch {
    fs::path path;
    Scratch() {
        path = fs::temp_directory_path() / ("hypoforge_accept_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

PipelineConfig fixture_config(const fs::path& scratch) {
    PipelineConfig config = load_config(fixtures() / "hypoforge.json");
    config.runs_root = scratch / "runs";
    config.gateway.cache_dir = scratch / "cache";
    return config;
}

// criterion 1: HMI formula, tabulated examples to 1e-9, scaling
// invariance over 1,000 random count triples, under one second
void criterion_hmi(Checker& c) {
    auto start = Clock::now();
    c.require(std::abs(compute_hmi(0, 0, 10, true) - 100.0) < 1e-9, "all-correct != 100");
    c.require(std::abs(compute_hmi(1, 2, 7, true) - 80.0) < 1e-9, "(1,2,7,core) != 80");
    c.require(std::abs(compute_hmi(1, 2, 7, false) - 60.0) < 1e-9, "(1,2,7,no core) != 60");

    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 1000; ++iter) {
        long i = rng() % 50, pc = rng() % 50, corr = rng() % 50;
        if (i + pc + corr == 0) corr = 1;
        bool core = rng() % 2;
        long k = 1 + rng() % 17;
        double base = compute_hmi(i, pc, corr, core);
        double scaled = compute_hmi(i * k, pc * k, corr * k, core);
        if (std::abs(base - scaled) >= 1e-9) {
            c.require(false, "scaling invariance failed");
            break;
        }
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    c.require(seconds < 1.0, "runtime " + std::to_string(seconds) + "s >= 1s");
}

// criterion 2: the reference precision/recall pairs round to the
// expected F1 values after round-half-up to 2 decimals
void criterion_f1(Checker& c) {
    auto f1_syn = f1_score(0.70, 0.83);
    c.require(f1_syn.has_value() && std::abs(round_half_up(*f1_syn, 2) - 0.76) < 1e-12,
              "F1(0.70,0.83) does not round to 0.76");
    auto f1_grd = f1_score(0.96, 0.82);
    c.require(f1_grd.has_value() && std::abs(round_half_up(*f1_grd, 2) - 0.88) < 1e-12,
              "F1(0.96,0.82) does not round to 0.88");
}

// criterion 3: threshold law over all scores 1..5, exhaustive
void criterion_threshold(Checker& c) {
    const SynergyLabel expected[5] = {SynergyLabel::Additive, SynergyLabel::Additive,
                                      SynergyLabel::Additive, SynergyLabel::Synergistic,
                                      SynergyLabel::Synergistic};
    for (int score = 1; score <= 5; ++score)
        c.require(classify_synergy(score) == expected[score - 1],
                  "score " + std::to_string(score) + " misclassified");
}

// criterion 4: chunking properties over 500 random (pool size, k) pairs
void criterion_chunking(Checker& c) {
    std::mt19937_64 rng(77);
    for (int iter = 0; iter < 500; ++iter) {
        size_t n = 1 + rng() % 2000;
        int k = 1 + static_cast<int>(rng() % 25);
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 1);
        auto chunks = chunk_pool(pool, k);

        size_t min_size = SIZE_MAX, max_size = 0;
        std::vector<int> rebuilt;
        for (const auto& chunk : chunks) {
            min_size = std::min(min_size, chunk.size());
            max_size = std::max(max_size, chunk.size());
            rebuilt.insert(rebuilt.end(), chunk.begin(), chunk.end());
        }
        if (max_size - min_size > 1 || rebuilt != pool) {
            c.require(false, "partition law violated at n=" + std::to_string(n) +
                                 " k=" + std::to_string(k));
            return;
        }
    }
}

// criterion 5: a scripted merge reply driving the idea count to 51 halts
// the conversation with zero further backend calls (scripted ledger)
void criterion_halt(Checker& c) {
    Gateway gateway([] {
        GatewayConfig cfg;
        cfg.backoff_base_ms = 0;
        cfg.cache_dir = fs::temp_directory_path() /
                        ("hypoforge_accept_halt_" + std::to_string(::getpid()));
        fs::remove_all(cfg.cache_dir);
        return cfg;
    }());
    ScriptedBackend backend;
    std::string reply;  // 51 idea rows, no terminator
    for (int i = 1; i <= 51; ++i)
        reply += "| " + std::to_string(i) + " | " + std::to_string(i) + " | entity" +
                 std::to_string(i) + " | concept" + std::to_string(i) + " |\n";
    backend.add_rule({"merge", {"ideas were produced by categorizing"}, reply,
                      FinishReason::Complete, 0, 0});

    std::vector<std::vector<Idea>> per_chunk(1);
    std::vector<int> pool;
    for (int i = 1; i <= 52; ++i) {
        Idea idea;
        idea.idea_id = i;
        idea.member_hypotheses = {i};
        idea.structural_entities = {"e" + std::to_string(i)};
        idea.core_concept = "c" + std::to_string(i);
        idea.source_pair_signature = {{1, 4}};
        per_chunk[0].push_back(std::move(idea));
        pool.push_back(i);
    }
    StageProfile profile =
        build_profile(Stage::Categorization, alloy_domain_profile(), ProfileConfig{});
    CategorizationState state =
        merge_ideas(per_chunk, pool, 50, profile, gateway, backend, 10);
    fs::remove_all(gateway.config().cache_dir);

    c.require(state.halted, "halted flag not set");
    c.require(state.ideas.size() == 51, "idea count " + std::to_string(state.ideas.size()));
    c.require(backend.calls() == 1,
              "backend calls after halt: " + std::to_string(backend.calls()));
}

// criterion 6: parser robustness over a 200-case structured corpus plus
// 10,000 random fuzz strings, under ten seconds, no crash
void criterion_parser(Checker& c) {
    auto start = Clock::now();
    std::mt19937_64 rng(424242);

    auto random_cells = [&](int cols) {
        std::string line = "|";
        for (int i = 0; i < cols; ++i)
            line += " cell" + std::to_string(rng() % 100) +
                    (rng() % 4 == 0 ? " (From text)" : "") + " |";
        return line;
    };

    size_t structured_cases = 0;
    for (int rep = 0; rep < 40; ++rep) {
        int cols = 1 + static_cast<int>(rng() % 5);
        // well-formed
        {
            std::string raw = random_cells(cols) + "\n" + random_cells(cols);
            auto result = parse_chart_table(raw, cols);
            if (!result.ok() || result.rows.size() != 2)
                c.require(false, "well-formed case failed");
            ++structured_cases;
        }
        // fenced with prose
        {
            std::string raw = "Certainly, here is the table:\n```\n" + random_cells(cols) +
                              "\n```\ntrailing prose";
            if (!parse_chart_table(raw, cols).ok()) c.require(false, "fenced case failed");
            ++structured_cases;
        }
        // headered
        {
            std::string header = "|";
            std::string sep = "|";
            for (int i = 0; i < cols; ++i) {
                header += " h |";
                sep += "---|";
            }
            std::string raw = header + "\n" + sep + "\n" + random_cells(cols);
            auto result = parse_chart_table(raw, cols);
            if (!result.ok() || result.rows.size() != 1) c.require(false, "header case failed");
            ++structured_cases;
        }
        // malformed arity: typed error expected
        {
            auto result = parse_chart_table(random_cells(cols + 1), cols);
            if (result.ok() || result.error->kind != TableError::Kind::RowArity)
                c.require(false, "arity case failed");
            ++structured_cases;
        }
        // empty: typed error expected
        {
            auto result = parse_chart_table(rep % 2 ? "" : "no pipes here", cols);
            if (result.ok() || result.error->kind != TableError::Kind::EmptyTable)
                c.require(false, "empty case failed");
            ++structured_cases;
        }
    }
    c.require(structured_cases == 200, "structured corpus size");

    const std::string charset = "| abc\nxyz-:()From text knowledge base`\"\t0123456789;,.";
    for (int iter = 0; iter < 10000; ++iter) {
        size_t len = rng() % 300;
        std::string raw;
        raw.reserve(len);
        for (size_t i = 0; i < len; ++i) raw.push_back(charset[rng() % charset.size()]);
        try {
            auto result = parse_chart_table(raw, 1 + static_cast<int>(rng() % 7));
            if (result.ok() && result.rows.empty())
                c.require(false, "ok result with zero rows");
        } catch (...) {
            c.require(false, "parser threw on fuzz input");
            return;
        }
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    c.require(seconds < 10.0, "runtime " + std::to_string(seconds) + "s >= 10s");
}

// criteria 7-10 share two full fixture runs
struct E2eRuns {
    Scratch scratch;
    RunPaths a, b;
    double seconds = 0.0;
    bool ok = false;

    E2eRuns() {
        auto start = Clock::now();
        PipelineConfig config = fixture_config(scratch.path);
        {
            Runner runner(config, "accept-a");
            if (runner.run(PipelineStage::All) != 0) return;
            a = runner.paths();
        }
        {
            Runner runner(config, "accept-b");
            if (runner.run(PipelineStage::All) != 0) return;
            b = runner.paths();
        }
        seconds = std::chrono::duration<double>(Clock::now() - start).count();
        ok = true;
    }
};

// criterion 7: byte-identical charts.csv, hypotheses.jsonl,
// evaluations.jsonl, ideas.json and .dot files across two offline runs
void criterion_determinism(const E2eRuns& runs, Checker& c) {
    c.require(runs.ok, "fixture run failed");
    if (!runs.ok) return;

    std::vector<std::pair<fs::path, fs::path>> files = {
        {runs.a.charts_csv(), runs.b.charts_csv()},
        {runs.a.hypotheses(), runs.b.hypotheses()},
        {runs.a.evaluations(), runs.b.evaluations()},
        {runs.a.ideas(), runs.b.ideas()}};
    for (int id = 1; id <= 6; ++id) {
        std::string name = "paper_" + std::to_string(id) + ".dot";
        files.push_back({runs.a.graphs_dir() / name, runs.b.graphs_dir() / name});
    }
    for (int id : {1, 2, 4, 5}) {
        std::string name = "hypothesis_" + std::to_string(id) + ".dot";
        files.push_back({runs.a.graphs_dir() / name, runs.b.graphs_dir() / name});
    }
    for (const auto& [fa, fb] : files) {
        if (!fs::exists(fa) || !fs::exists(fb)) {
            c.require(false, "missing artifact " + fa.filename().string());
            continue;
        }
        if (read_file(fa) != read_file(fb))
            c.require(false, "artifact differs: " + fa.filename().string());
    }
    c.require(runs.seconds < 30.0,
              "runtime " + std::to_string(runs.seconds) + "s >= 30s");
}

// criterion 8: funnel shape at fixture scale
void criterion_funnel(const E2eRuns& runs, Checker& c) {
    c.require(runs.ok, "fixture run failed");
    if (!runs.ok) return;

    auto hyps = hypotheses_from_jsonl(read_file(runs.a.hypotheses()));
    auto evals = evaluations_from_jsonl(read_file(runs.a.evaluations()));
    std::set<int> all_ids;
    for (const auto& h : hyps) all_ids.insert(h.hypothesis_id);

    PoolFilter filtered = filter_pool(hyps, evals);
    std::set<int> pool_ids;
    for (const auto& h : filtered.pool) {
        pool_ids.insert(h.hypothesis_id);
        if (!all_ids.count(h.hypothesis_id)) c.require(false, "pool id outside hypotheses");
    }

    auto ideas = ideas_from_json(read_file(runs.a.ideas()));
    std::set<int> covered;
    for (const auto& idea : ideas) {
        for (int id : idea.member_hypotheses) {
            if (!pool_ids.count(id)) c.require(false, "idea member outside the pool");
            if (!covered.insert(id).second) c.require(false, "idea membership not disjoint");
        }
    }

    ordered_json coverage = ordered_json::parse(read_file(runs.a.coverage()));
    size_t pool_size = coverage["pool_size"].get<size_t>();
    size_t covered_n = coverage["covered"].get<size_t>();
    size_t dropped_n = coverage["dropped"].get<size_t>();
    c.require(pool_size == pool_ids.size(), "coverage pool size mismatch");
    c.require(covered_n == covered.size(), "coverage covered mismatch");
    c.require(covered_n + dropped_n == pool_size, "covered + dropped != pool");
    double loss = coverage["loss_fraction"].get<double>();
    double expected_loss =
        pool_size == 0 ? 0.0 : static_cast<double>(dropped_n) / static_cast<double>(pool_size);
    c.require(std::abs(loss - expected_loss) < 1e-12, "loss fraction incorrect");
}

// criterion 9: graph invariants over every fixture chart and hypothesis
void criterion_graphs(const E2eRuns& runs, Checker& c) {
    c.require(runs.ok, "fixture run failed");
    if (!runs.ok) return;

    std::vector<SystemChart> charts;
    for (int id = 1; id <= 6; ++id)
        charts.push_back(chart_from_json(read_file(runs.a.chart(id))));

    for (const auto& chart : charts) {
        NormalizedChart normalized;
        normalized.paper_id = chart.paper_id;
        for (const auto& row : chart.rows) normalized.rows.push_back({row, "", {}});
        ChartGraph graph = build_graph(normalized);
        size_t flow = 0;
        for (const auto& e : graph.edges)
            if (e.kind == EdgeKind::Flow) ++flow;
        if (flow != 4 * chart.rows.size())
            c.require(false, "chart " + std::to_string(chart.paper_id) + ": flow edges " +
                                 std::to_string(flow) + " != 4 x " +
                                 std::to_string(chart.rows.size()));
    }

    auto hyps = hypotheses_from_jsonl(read_file(runs.a.hypotheses()));
    auto evals = evaluations_from_jsonl(read_file(runs.a.evaluations()));
    PoolFilter filtered = filter_pool(hyps, evals);
    auto find_row = [&](const RowRef& ref) -> const ChartRow* {
        for (const auto& chart : charts) {
            if (chart.paper_id != ref.paper_id) continue;
            for (const auto& row : chart.rows)
                if (row.row_index == ref.row_index) return &row;
        }
        return nullptr;
    };
    for (const auto& h : filtered.pool) {
        const ChartRow* row_a = find_row(h.pair.a);
        const ChartRow* row_b = find_row(h.pair.b);
        if (!row_a || !row_b) {
            c.require(false, "hypothesis rows missing");
            continue;
        }
        ChartGraph graph = build_graph(h, *row_a, *row_b);
        size_t inter = 0;
        for (const auto& e : graph.edges)
            if (e.kind == EdgeKind::Interdependency) ++inter;
        if (inter != 1)
            c.require(false, "hypothesis " + std::to_string(h.hypothesis_id) + ": " +
                                 std::to_string(inter) + " interdependency edges");

        std::string dot =
            read_file(runs.a.graphs_dir() /
                      ("hypothesis_" + std::to_string(h.hypothesis_id) + ".dot"));
        size_t count = 0, pos = 0;
        while ((pos = dot.find("style=dashed, color=green", pos)) != std::string::npos) {
            ++count;
            ++pos;
        }
        if (count != 1)
            c.require(false, "hypothesis " + std::to_string(h.hypothesis_id) +
                                 ": dashed green edges in DOT = " + std::to_string(count));
    }
}

// criterion 10: the token-reduction factor is reported as the body/chart
// estimate ratio (the magnitude is reported, never asserted)
void criterion_reduction(const E2eRuns& runs, Checker& c) {
    c.require(runs.ok, "fixture run failed");
    if (!runs.ok) return;

    CorpusStore store = corpus_from_json(read_file(runs.a.corpus()));
    long body = 0, chart = 0;
    for (const auto& p : store.papers) body += p.token_estimate;
    for (int id = 1; id <= 6; ++id)
        chart += chart_from_json(read_file(runs.a.chart(id))).chart_token_estimate;

    ordered_json report = ordered_json::parse(read_file(runs.a.report_json()));
    double reported = report["token_reduction_factor"].get<double>();
    double expected = static_cast<double>(body) / static_cast<double>(chart);
    c.require(std::abs(reported - expected) < 1e-12, "reported factor != body/chart ratio");
    c.require(reported > 1.0, "fixture reduction factor not > 1");
    c.detail << "factor " << reported;
}

}  // namespace

int main() {
    set_log_quiet(true);

    int failures = 0;
    auto report = [&](int n, const std::string& name, Checker& c) {
        std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name;
        if (!c.detail.str().empty()) std::cout << " (" << c.detail.str() << ")";
        std::cout << "\n";
        if (!c.ok) ++failures;
    };

    {
        Checker c;
        criterion_hmi(c);
        report(1, "HMI formula, tabulated examples, scaling invariance", c);
    }
    {
        Checker c;
        criterion_f1(c);
        report(2, "F1 consistency with reported precision/recall pairs", c);
    }
    {
        Checker c;
        criterion_threshold(c);
        report(3, "synergy threshold law over scores 1..5", c);
    }
    {
        Checker c;
        criterion_chunking(c);
        report(4, "chunking partition properties, 500 random cases", c);
    }
    {
        Checker c;
        criterion_halt(c);
        report(5, "idea-cap halt with zero further backend calls", c);
    }
    {
        Checker c;
        criterion_parser(c);
        report(6, "table parser robustness corpus and 10k-case fuzz", c);
    }

    E2eRuns runs;
    {
        Checker c;
        criterion_determinism(runs, c);
        report(7, "end-to-end determinism on the scripted fixture", c);
    }
    {
        Checker c;
        criterion_funnel(runs, c);
        report(8, "funnel-shape properties at fixture scale", c);
    }
    {
        Checker c;
        criterion_graphs(runs, c);
        report(9, "graph invariants over fixture charts and hypotheses", c);
    }
    {
        Checker c;
        criterion_reduction(runs, c);
        report(10, "token-reduction factor reporting", c);
    }

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 10 criteria passed\n";
    return 0;
}
