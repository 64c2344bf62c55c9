#include "hypoforge/pipeline.hpp"

#include "hypoforge/categorization.hpp"
#include "hypoforge/chart.hpp"
#include "hypoforge/corpus.hpp"
#include "hypoforge/evaluation.hpp"
#include "hypoforge/extraction.hpp"
#include "hypoforge/generation.hpp"
#include "hypoforge/http_backend.hpp"
#include "hypoforge/metrics.hpp"
#include "hypoforge/visualization.hpp"

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

std::optional<PipelineStage> pipeline_stage_from_string(const std::string& s) {
    if (s == "ingest") return PipelineStage::Ingest;
    if (s == "extract") return PipelineStage::Extract;
    if (s == "generate") return PipelineStage::Generate;
    if (s == "evaluate") return PipelineStage::Evaluate;
    if (s == "categorize") return PipelineStage::Categorize;
    if (s == "visualize") return PipelineStage::Visualize;
    if (s == "audit") return PipelineStage::Audit;
    if (s == "report") return PipelineStage::Report;
    if (s == "all") return PipelineStage::All;
    return std::nullopt;
}

std::string to_string(PipelineStage s) {
    switch (s) {
        case PipelineStage::Ingest: return "ingest";
        case PipelineStage::Extract: return "extract";
        case PipelineStage::Generate: return "generate";
        case PipelineStage::Evaluate: return "evaluate";
        case PipelineStage::Categorize: return "categorize";
        case PipelineStage::Visualize: return "visualize";
        case PipelineStage::Audit: return "audit";
        case PipelineStage::Report: return "report";
        case PipelineStage::All: return "all";
    }
    return "unknown";
}

std::string make_run_id(const PipelineConfig& config, const fs::path& runs_root, bool resume) {
    std::string base = config_digest(config).substr(0, 12);
    if (resume || !fs::exists(runs_root / base)) return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "-" + std::to_string(i);
        if (!fs::exists(runs_root / candidate)) return candidate;
    }
}

namespace {

/// Run fn(0..n-1) on `workers` threads; the first exception wins and is
/// rethrown after all workers join.
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    size_t n_threads = std::min<size_t>(std::max(1, workers), n);
    if (n_threads == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string getenv_or_empty(const std::string& name) {
    if (name.empty()) return "";
    const char* v = std::getenv(name.c_str());
    return v ? v : "";
}

std::shared_ptr<Backend> make_backend(const PipelineConfig& config,
                                      const BackendSettings& settings,
                                      const std::string& backend_id) {
    switch (config.backend_kind) {
        case BackendKind::Scripted:
            return ScriptedBackend::from_fixture_dir(config.fixtures_dir);
        case BackendKind::Replay:
            return std::make_shared<RecordReplayBackend>(nullptr,
                                                         TranscriptStore(config.gateway.cache_dir));
        case BackendKind::Live: {
            HttpBackend::Settings s;
            s.base_url = settings.base_url;
            s.completion_path = settings.completion_path;
            s.api_key = getenv_or_empty(settings.api_key_env);
            s.backend_id = backend_id;
            return std::make_shared<HttpBackend>(std::move(s));
        }
    }
    throw ConfigError("unhandled backend kind");
}

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

bool parse_bool(const std::string& s) {
    std::string v = to_lower(trim(s));
    return v == "1" || v == "true" || v == "yes";
}

}  // namespace

Runner::Runner(PipelineConfig config, std::string run_id, bool resume)
    : config_(std::move(config)), run_id_(std::move(run_id)) {
    validate_config(config_);
    domain_ = config_.domain_profile();
    paths_.run_dir = config_.runs_root / run_id_;
    fs::create_directories(paths_.run_dir);

    if (fs::exists(paths_.lock()))
        throw Error("run " + run_id_ + " is locked by another process (" +
                    paths_.lock().string() + ")");
    atomic_write_file(paths_.lock(), "pid " + std::to_string(::getpid()) + "\n");
    lock_held_ = true;

    gateway_ = std::make_unique<Gateway>(config_.gateway);
    primary_backend_ = make_backend(config_, config_.backend, "primary");
    if (config_.backend_kind == BackendKind::Live)
        eval_backend_ = make_backend(config_, config_.eval_backend, "evaluation");
    else
        eval_backend_ = primary_backend_;

    if (!fs::exists(paths_.manifest())) {
        ordered_json manifest;
        manifest["run_id"] = run_id_;
        manifest["backend"] = primary_backend_->id();
        manifest["created_at"] = iso8601_now();
        manifest["config"] = config_.snapshot;
        manifest["stages"] = ordered_json::object();
        atomic_write_file(paths_.manifest(), manifest.dump(2) + "\n");
    } else if (!resume) {
        log_info("reusing existing run directory " + paths_.run_dir.string());
    }
}

Runner::~Runner() {
    if (lock_held_) {
        std::error_code ec;
        fs::remove(paths_.lock(), ec);
    }
}

void Runner::require(const fs::path& p, const std::string& producing_stage) const {
    if (!fs::exists(p))
        throw Error("missing prerequisite " + p.filename().string() + "; run the \"" +
                    producing_stage + "\" stage first");
}

void Runner::record_stage(const std::string& stage, const std::vector<fs::path>& outputs) {
    ordered_json manifest = ordered_json::parse(read_file(paths_.manifest()));
    ordered_json entry;
    entry["completed_at"] = iso8601_now();
    entry["outputs"] = ordered_json::array();
    for (const auto& p : outputs)
        entry["outputs"].push_back(fs::relative(p, paths_.run_dir).string());
    manifest["stages"][stage] = entry;
    atomic_write_file(paths_.manifest(), manifest.dump(2) + "\n");
}

int Runner::run(PipelineStage stage) {
    try {
        switch (stage) {
            case PipelineStage::Ingest: stage_ingest(); break;
            case PipelineStage::Extract: stage_extract(); break;
            case PipelineStage::Generate: stage_generate(); break;
            case PipelineStage::Evaluate: stage_evaluate(); break;
            case PipelineStage::Categorize: stage_categorize(); break;
            case PipelineStage::Visualize: stage_visualize(); break;
            case PipelineStage::Audit: stage_audit(); break;
            case PipelineStage::Report: stage_report(); break;
            case PipelineStage::All:
                stage_ingest();
                stage_extract();
                stage_generate();
                stage_evaluate();
                stage_categorize();
                stage_visualize();
                if (!config_.annotations_csv.empty()) stage_audit();
                else log_info("no annotations configured; audit stage skipped");
                stage_report();
                break;
        }
    } catch (const std::exception& e) {
        log_warn(std::string("stage ") + to_string(stage) + " failed: " + e.what());
        return 1;
    }
    return 0;
}

void Runner::stage_ingest() {
    CorpusStore store = ingest_corpus(config_.corpus_manifest, config_.text_root);
    atomic_write_file(paths_.corpus(), corpus_to_json(store));
    record_stage("ingest", {paths_.corpus()});
    log_info("ingested " + std::to_string(store.papers.size()) + " papers in " +
             std::to_string(store.sets.size()) + " sets");
}

void Runner::stage_extract() {
    require(paths_.corpus(), "ingest");
    CorpusStore store = corpus_from_json(read_file(paths_.corpus()));
    StageProfile profile = build_profile(Stage::Extraction, domain_, config_.profiles);

    std::vector<std::optional<SystemChart>> charts(store.papers.size());
    parallel_for(store.papers.size(), config_.gateway.max_in_flight, [&](size_t i) {
        const PaperRecord& paper = store.papers[i];
        try {
            charts[i] = extract_chart(paper, profile, *gateway_, *primary_backend_);
        } catch (const ReplyFormatError& e) {
            log_warn("paper " + std::to_string(paper.paper_id) +
                     ": extraction failed (transcript " + e.digest() + "): " + e.what() +
                     "; paper skipped");
        }
    });

    std::vector<fs::path> outputs;
    std::vector<SystemChart> all;
    fs::create_directories(paths_.charts_dir());
    for (const auto& chart : charts) {
        if (!chart) continue;
        for (const auto& w : validate_chart(*chart))
            log_warn("paper " + std::to_string(chart->paper_id) + " chart: " + w);
        fs::path out = paths_.chart(chart->paper_id);
        atomic_write_file(out, chart_to_json(*chart));
        outputs.push_back(out);
        all.push_back(*chart);
    }
    if (all.empty()) throw Error("extraction produced no charts");
    atomic_write_file(paths_.charts_csv(), charts_to_csv(all));
    outputs.push_back(paths_.charts_csv());
    record_stage("extract", outputs);
    log_info("extracted " + std::to_string(all.size()) + " charts");
}

namespace {

std::vector<SystemChart> load_charts_for_set(const RunPaths& paths,
                                             const std::vector<int>& paper_ids) {
    std::vector<SystemChart> charts;
    for (int id : paper_ids) {
        fs::path p = paths.chart(id);
        if (!fs::exists(p)) continue;  // paper skipped during extraction
        charts.push_back(chart_from_json(read_file(p)));
    }
    return charts;
}

const ChartRow* find_row(const std::vector<SystemChart>& charts, const RowRef& ref) {
    for (const auto& c : charts) {
        if (c.paper_id != ref.paper_id) continue;
        for (const auto& r : c.rows)
            if (r.row_index == ref.row_index) return &r;
    }
    return nullptr;
}

}  // namespace

void Runner::stage_generate() {
    require(paths_.corpus(), "ingest");
    require(paths_.charts_csv(), "extract");
    CorpusStore store = corpus_from_json(read_file(paths_.corpus()));
    if (store.sets.size() < 2) throw Error("generation needs two paper sets");
    if (store.sets.size() > 2)
        log_warn("corpus has " + std::to_string(store.sets.size()) +
                 " sets; generation uses the first two");

    const auto& [label_a, ids_a] = store.sets[0];
    const auto& [label_b, ids_b] = store.sets[1];
    std::vector<SystemChart> charts_a = load_charts_for_set(paths_, ids_a);
    std::vector<SystemChart> charts_b = load_charts_for_set(paths_, ids_b);

    std::vector<RowPair> pairs =
        enumerate_pairs(charts_a, charts_b, config_.pair_cap, config_.seed);
    StageProfile profile = build_profile(Stage::Generation, domain_, config_.profiles);

    std::set<int> valid_ids;
    for (const auto& p : store.papers) valid_ids.insert(p.paper_id);

    std::vector<std::vector<Hypothesis>> batches(pairs.size());
    parallel_for(pairs.size(), config_.gateway.max_in_flight, [&](size_t i) {
        const RowPair& pair = pairs[i];
        const ChartRow* row_a = find_row(charts_a, pair.a);
        const ChartRow* row_b = find_row(charts_b, pair.b);
        if (!row_a || !row_b) throw Error("pair references a missing chart row");
        batches[i] = generate_for_pair(pair, *row_a, *row_b, label_a, label_b, domain_,
                                       config_.n_samples, profile, *gateway_,
                                       *primary_backend_);
    });

    std::vector<Hypothesis> hyps = assign_ids(batches);
    for (auto& h : hyps) {
        std::vector<int> kept;
        for (int id : h.cited_papers) {
            if (valid_ids.count(id)) kept.push_back(id);
            else
                log_warn("hypothesis " + std::to_string(h.hypothesis_id) +
                         " cites unknown paper [" + std::to_string(id) + "]; marker dropped");
        }
        h.cited_papers = std::move(kept);
    }
    atomic_write_file(paths_.hypotheses(), hypotheses_to_jsonl(hyps));
    record_stage("generate", {paths_.hypotheses()});
    log_info("generated " + std::to_string(hyps.size()) + " hypotheses from " +
             std::to_string(pairs.size()) + " pairs");
}

void Runner::stage_evaluate() {
    require(paths_.hypotheses(), "generate");
    std::vector<Hypothesis> hyps = hypotheses_from_jsonl(read_file(paths_.hypotheses()));
    StageProfile profile = build_profile(Stage::Evaluation, domain_, config_.profiles);

    std::vector<EvaluationRecord> records(hyps.size());
    parallel_for(hyps.size(), config_.gateway.max_in_flight, [&](size_t i) {
        records[i].hypothesis_id = hyps[i].hypothesis_id;
        records[i].synergy = evaluate_synergy(hyps[i], profile, *gateway_, *eval_backend_);
        records[i].grounding =
            evaluate_grounding(hyps[i], domain_, profile, *gateway_, *eval_backend_);
    });

    atomic_write_file(paths_.evaluations(), evaluations_to_jsonl(records));
    record_stage("evaluate", {paths_.evaluations()});
    size_t unevaluated = 0;
    for (const auto& r : records)
        if (!r.synergy || !r.grounding) ++unevaluated;
    log_info("evaluated " + std::to_string(records.size()) + " hypotheses (" +
             std::to_string(unevaluated) + " unevaluated)");
}

void Runner::stage_categorize() {
    require(paths_.hypotheses(), "generate");
    require(paths_.evaluations(), "evaluate");
    std::vector<Hypothesis> hyps = hypotheses_from_jsonl(read_file(paths_.hypotheses()));
    std::vector<EvaluationRecord> evals =
        evaluations_from_jsonl(read_file(paths_.evaluations()));

    PoolFilter filtered = filter_pool(hyps, evals);
    std::map<int, const EvaluationRecord*> eval_by_id;
    for (const auto& r : evals) eval_by_id[r.hypothesis_id] = &r;

    std::vector<ChunkItem> pool_items;
    for (const auto& h : filtered.pool)
        pool_items.push_back({h, *eval_by_id.at(h.hypothesis_id)->synergy});

    StageProfile profile = build_profile(Stage::Categorization, domain_, config_.profiles);
    std::vector<int> pool_ids;
    for (const auto& h : filtered.pool) pool_ids.push_back(h.hypothesis_id);

    CategorizationState state;
    if (pool_items.empty()) {
        log_warn("empty pool; categorization produces no ideas");
    } else {
        auto chunks = chunk_pool(pool_items, config_.chunk_count);
        std::vector<std::vector<Idea>> per_chunk(chunks.size());
        parallel_for(chunks.size(), config_.gateway.max_in_flight, [&](size_t i) {
            per_chunk[i] = categorize_chunk(chunks[i], profile, *gateway_, *primary_backend_);
        });
        state = merge_ideas(per_chunk, pool_ids, config_.idea_cap, profile, *gateway_,
                            *primary_backend_, config_.turn_budget);
    }

    CoverageReport coverage = coverage_report(state, pool_ids);
    atomic_write_file(paths_.ideas(), ideas_to_json(state.ideas));
    atomic_write_file(paths_.coverage(), coverage_to_json(coverage));
    record_stage("categorize", {paths_.ideas(), paths_.coverage()});
    log_info("categorized " + std::to_string(coverage.pool_size) + " pool hypotheses into " +
             std::to_string(state.ideas.size()) + " ideas (dropped " +
             std::to_string(coverage.dropped) + ")");
}

void Runner::stage_visualize() {
    require(paths_.corpus(), "ingest");
    require(paths_.charts_csv(), "extract");
    CorpusStore store = corpus_from_json(read_file(paths_.corpus()));
    StageProfile profile = build_profile(Stage::Visualization, domain_, config_.profiles);
    fs::create_directories(paths_.graphs_dir());

    std::vector<int> paper_ids;
    for (const auto& p : store.papers)
        if (fs::exists(paths_.chart(p.paper_id))) paper_ids.push_back(p.paper_id);

    std::vector<fs::path> outputs(paper_ids.size());
    parallel_for(paper_ids.size(), config_.gateway.max_in_flight, [&](size_t i) {
        SystemChart chart = chart_from_json(read_file(paths_.chart(paper_ids[i])));
        SystemChart split = split_combined_rows(chart);
        NormalizedChart tagged =
            tag_and_simplify(split, profile, *gateway_, *primary_backend_);
        NormalizedChart filled = fill_na(tagged, profile, *gateway_, *primary_backend_);
        ChartGraph graph = build_graph(filled);
        fs::path out = paths_.graphs_dir() / ("paper_" + std::to_string(paper_ids[i]) + ".dot");
        atomic_write_file(out, emit_dot(graph));
        outputs[i] = out;
    });
    std::vector<fs::path> all_outputs(outputs.begin(), outputs.end());

    // hypothesis-mode graphs: the configured pool and/or the CLI-selected id
    std::vector<int> wanted;
    if (config_.hypothesis_graphs == "pool") {
        require(paths_.hypotheses(), "generate");
        require(paths_.evaluations(), "evaluate");
        std::vector<Hypothesis> hyps = hypotheses_from_jsonl(read_file(paths_.hypotheses()));
        auto filtered = filter_pool(hyps, evaluations_from_jsonl(read_file(paths_.evaluations())));
        for (const auto& h : filtered.pool) wanted.push_back(h.hypothesis_id);
    }
    if (hypothesis_graph_id_) wanted.push_back(*hypothesis_graph_id_);

    if (!wanted.empty()) {
        require(paths_.hypotheses(), "generate");
        std::vector<Hypothesis> hyps = hypotheses_from_jsonl(read_file(paths_.hypotheses()));
        std::map<int, const Hypothesis*> by_id;
        for (const auto& h : hyps) by_id[h.hypothesis_id] = &h;

        std::vector<SystemChart> charts;
        for (int id : paper_ids) charts.push_back(chart_from_json(read_file(paths_.chart(id))));

        std::sort(wanted.begin(), wanted.end());
        wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
        for (int hid : wanted) {
            auto it = by_id.find(hid);
            if (it == by_id.end()) throw Error("unknown hypothesis id " + std::to_string(hid));
            const Hypothesis& h = *it->second;
            const ChartRow* row_a = find_row(charts, h.pair.a);
            const ChartRow* row_b = find_row(charts, h.pair.b);
            if (!row_a || !row_b)
                throw Error("hypothesis " + std::to_string(hid) +
                            " references chart rows missing from this run");
            ChartGraph graph = build_graph(h, *row_a, *row_b);
            fs::path out = paths_.graphs_dir() / ("hypothesis_" + std::to_string(hid) + ".dot");
            atomic_write_file(out, emit_dot(graph));
            all_outputs.push_back(out);
        }
    }
    record_stage("visualize", all_outputs);
    log_info("emitted " + std::to_string(all_outputs.size()) + " graphs");
}

void Runner::stage_audit() {
    if (config_.annotations_csv.empty())
        throw Error("audit needs paths.annotations in the config");
    require(paths_.evaluations(), "evaluate");
    std::vector<EvaluationRecord> evals =
        evaluations_from_jsonl(read_file(paths_.evaluations()));

    ordered_json audit;

    // model vs human confusion metrics over the annotated subset
    auto rows = parse_csv(read_file(config_.annotations_csv));
    if (rows.empty()) throw Error("annotations file is empty");
    size_t start = 0;
    if (!rows[0].empty() && !rows[0][0].empty() &&
        !std::isdigit(static_cast<unsigned char>(rows[0][0][0])))
        start = 1;  // header row

    std::vector<std::pair<int, std::string>> human_synergy, human_grounding;
    for (size_t i = start; i < rows.size(); ++i) {
        if (rows[i].size() < 3)
            throw Error("annotations row " + std::to_string(i + 1) +
                        " needs hypothesis_id,synergy,grounding");
        int id = std::stoi(rows[i][0]);
        human_synergy.emplace_back(id, trim(rows[i][1]));
        human_grounding.emplace_back(id, trim(rows[i][2]));
    }

    std::map<int, const EvaluationRecord*> by_id;
    for (const auto& r : evals) by_id[r.hypothesis_id] = &r;
    std::vector<std::pair<int, std::string>> model_synergy, model_grounding;
    for (const auto& [id, _] : human_synergy) {
        auto it = by_id.find(id);
        if (it == by_id.end() || !it->second->synergy || !it->second->grounding) continue;
        model_synergy.emplace_back(id, to_string(it->second->synergy->label));
        model_grounding.emplace_back(id, to_string(it->second->grounding->label));
    }

    auto confusion_json = [](const ConfusionMetrics& m) {
        ordered_json j;
        j["tp"] = m.tp;
        j["fp"] = m.fp;
        j["fn"] = m.fn;
        j["tn"] = m.tn;
        j["accuracy"] = m.accuracy ? ordered_json(*m.accuracy) : ordered_json(nullptr);
        j["precision"] = m.precision ? ordered_json(*m.precision) : ordered_json(nullptr);
        j["recall"] = m.recall ? ordered_json(*m.recall) : ordered_json(nullptr);
        j["f1"] = m.f1 ? ordered_json(*m.f1) : ordered_json(nullptr);
        return j;
    };
    audit["synergy_confusion"] =
        confusion_json(compare_with_human(model_synergy, human_synergy, "Synergistic"));
    audit["grounding_confusion"] =
        confusion_json(compare_with_human(model_grounding, human_grounding, "Strong"));

    if (!config_.hmi_counts_csv.empty()) {
        auto hmi_rows = parse_csv(read_file(config_.hmi_counts_csv));
        ordered_json per_chart = ordered_json::array();
        double sum = 0.0;
        size_t n = 0;
        for (size_t i = 1; i < hmi_rows.size(); ++i) {  // row 0 is the header
            const auto& r = hmi_rows[i];
            if (r.size() < 5) throw Error("hmi_counts row " + std::to_string(i + 1) + " malformed");
            HmiAudit a = make_hmi_audit(std::stol(r[1]), std::stol(r[2]), std::stol(r[3]),
                                        parse_bool(r[4]));
            per_chart.push_back({{"chart_id", r[0]},
                                 {"incorrect", a.incorrect},
                                 {"partially_correct", a.partially_correct},
                                 {"correct", a.correct},
                                 {"total_actions", a.total_actions},
                                 {"core_idea_present", a.core_idea_present},
                                 {"hmi_percent", a.hmi_percent}});
            sum += a.hmi_percent;
            ++n;
        }
        audit["hmi"] = {{"per_chart", per_chart},
                        {"mean_hmi_percent", n ? sum / static_cast<double>(n) : 0.0}};
    }

    if (!config_.mechanism_flags_csv.empty()) {
        auto flag_rows = parse_csv(read_file(config_.mechanism_flags_csv));
        std::vector<MechanismFlags> flags;
        for (size_t i = 1; i < flag_rows.size(); ++i) {
            const auto& r = flag_rows[i];
            if (r.size() < 5)
                throw Error("mechanism_flags row " + std::to_string(i + 1) + " malformed");
            flags.push_back({parse_bool(r[3]), parse_bool(r[4])});
        }
        if (!flags.empty()) {
            MechanismAudit m = compute_mechanism_scores(flags);
            audit["mechanism"] = {{"count", flags.size()},
                                  {"labeling_accuracy", m.labeling_accuracy},
                                  {"mechanistic_accuracy", m.mechanistic_accuracy},
                                  {"fidelity", m.fidelity}};
        }
    }

    atomic_write_file(paths_.audit(), audit.dump(2) + "\n");
    record_stage("audit", {paths_.audit()});
    log_info("audit written");
}

namespace {

std::string format_double(double v, int decimals) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << v;
    return out.str();
}

}  // namespace

std::string Runner::report_text() const {
    return read_file(paths_.report_txt());
}

void Runner::stage_report() {
    require(paths_.corpus(), "ingest");
    CorpusStore store = corpus_from_json(read_file(paths_.corpus()));

    ordered_json rj;
    rj["papers"] = store.papers.size();
    rj["sets"] = ordered_json::array();
    for (const auto& [label, ids] : store.sets)
        rj["sets"].push_back({{"label", label}, {"papers", ids.size()}});

    long body_tokens = 0;
    for (const auto& p : store.papers) body_tokens += p.token_estimate;

    size_t chart_count = 0, row_count = 0;
    long chart_tokens = 0;
    for (const auto& p : store.papers) {
        fs::path cp = paths_.chart(p.paper_id);
        if (!fs::exists(cp)) continue;
        SystemChart chart = chart_from_json(read_file(cp));
        ++chart_count;
        row_count += chart.rows.size();
        chart_tokens += chart.chart_token_estimate;
    }
    rj["charts"] = chart_count;
    rj["chart_rows"] = row_count;
    rj["body_token_estimate"] = body_tokens;
    rj["chart_token_estimate"] = chart_tokens;
    double reduction = chart_tokens > 0 ? static_cast<double>(body_tokens) /
                                              static_cast<double>(chart_tokens)
                                        : 0.0;
    rj["token_reduction_factor"] = reduction;

    size_t total_hyps = 0, pool_size = 0, unevaluated = 0, idea_count = 0;
    std::vector<Hypothesis> hyps;
    if (fs::exists(paths_.hypotheses())) {
        hyps = hypotheses_from_jsonl(read_file(paths_.hypotheses()));
        total_hyps = hyps.size();
    }
    if (fs::exists(paths_.evaluations()) && !hyps.empty()) {
        auto evals = evaluations_from_jsonl(read_file(paths_.evaluations()));
        PoolFilter filtered = filter_pool(hyps, evals);
        pool_size = filtered.pool.size();
        unevaluated = static_cast<size_t>(filtered.excluded_unevaluated);
    }
    std::vector<Idea> ideas;
    if (fs::exists(paths_.ideas())) {
        ideas = ideas_from_json(read_file(paths_.ideas()));
        idea_count = ideas.size();
    }
    rj["hypotheses"] = total_hyps;
    rj["unevaluated"] = unevaluated;
    rj["pool_strong_synergistic"] = pool_size;
    rj["ideas"] = idea_count;

    std::string funnel = std::to_string(total_hyps) + " -> " + std::to_string(pool_size) +
                         " -> " + std::to_string(idea_count) + " ideas";
    rj["funnel"] = funnel;

    if (fs::exists(paths_.coverage()))
        rj["coverage"] = ordered_json::parse(read_file(paths_.coverage()));
    if (fs::exists(paths_.audit()))
        rj["audit"] = ordered_json::parse(read_file(paths_.audit()));

    ordered_json idea_table = ordered_json::array();
    for (const auto& idea : ideas) {
        idea_table.push_back({{"idea", idea.idea_id},
                              {"hypotheses", idea.member_hypotheses},
                              {"structural_entities", idea.structural_entities},
                              {"core_concepts", idea.core_concept}});
    }
    rj["idea_table"] = idea_table;

    std::ostringstream txt;
    txt << "Run summary\n===========\n";
    txt << "Papers: " << store.papers.size() << " in " << store.sets.size() << " sets";
    for (const auto& [label, ids] : store.sets)
        txt << "  [\"" << label << "\": " << ids.size() << "]";
    txt << "\n";
    txt << "Charts: " << chart_count << " (" << row_count << " rows)\n";
    txt << "Token reduction factor: " << format_double(reduction, 1) << "\n";
    txt << "Funnel: " << funnel << "\n";
    txt << "Unevaluated hypotheses: " << unevaluated << "\n";
    if (fs::exists(paths_.coverage())) {
        ordered_json cov = ordered_json::parse(read_file(paths_.coverage()));
        txt << "Categorization coverage: " << cov["covered"].get<size_t>() << "/"
            << cov["pool_size"].get<size_t>() << " (loss "
            << format_double(cov["loss_fraction"].get<double>(), 2) << ")\n";
    }
    if (fs::exists(paths_.audit())) {
        ordered_json audit = ordered_json::parse(read_file(paths_.audit()));
        for (const char* key : {"synergy_confusion", "grounding_confusion"}) {
            if (!audit.contains(key)) continue;
            const auto& m = audit[key];
            txt << (std::string(key) == "synergy_confusion" ? "Synergy" : "Grounding")
                << " vs human: accuracy " << format_double(m["accuracy"].get<double>(), 2)
                << ", precision " << format_double(m["precision"].get<double>(), 2)
                << ", recall " << format_double(m["recall"].get<double>(), 2) << ", F1 "
                << format_double(m["f1"].get<double>(), 2) << "\n";
        }
        if (audit.contains("hmi"))
            txt << "Mean HMI: "
                << format_double(audit["hmi"]["mean_hmi_percent"].get<double>(), 1) << "%\n";
        if (audit.contains("mechanism"))
            txt << "Mechanism fidelity: "
                << format_double(audit["mechanism"]["fidelity"].get<double>(), 2) << "\n";
    }
    if (!ideas.empty()) {
        txt << "\nIdeas\nIdea | Hypotheses | Structural entities | Core concepts\n";
        for (const auto& idea : ideas) {
            std::vector<std::string> ids;
            for (int id : idea.member_hypotheses) ids.push_back(std::to_string(id));
            txt << idea.idea_id << " | " << join(ids, ", ") << " | "
                << join(idea.structural_entities, "; ") << " | " << idea.core_concept << "\n";
        }
    }

    atomic_write_file(paths_.report_json(), rj.dump(2) + "\n");
    atomic_write_file(paths_.report_txt(), txt.str());
    record_stage("report", {paths_.report_txt(), paths_.report_json()});
}

}  // namespace hypoforge
