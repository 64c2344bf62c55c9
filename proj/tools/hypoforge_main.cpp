#include "hypoforge/config.hpp"
#include "hypoforge/pipeline.hpp"
#include "hypoforge/util.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hypoforge;

int main(int argc, char** argv) {
    CLI::App app{"hypoforge: LLM-driven materials design hypothesis pipeline"};
    app.require_subcommand(1);

    std::string config_path = "hypoforge.json";
    std::string run_id;
    std::string backend;
    std::string fixtures;
    bool resume = false;
    bool quiet = false;
    int hypothesis_id = -1;

    app.add_option("--config", config_path, "pipeline config file (JSON)");
    app.add_option("--run-id", run_id, "explicit run id (default: config digest)");
    app.add_flag("--resume", resume, "reuse an existing run directory");
    app.add_option("--backend", backend, "backend kind: live, scripted, or replay")
        ->check(CLI::IsMember({"live", "scripted", "replay"}));
    app.add_option("--fixtures", fixtures, "fixture directory for the scripted backend");
    app.add_flag("--quiet", quiet, "suppress info/warning logging");
    app.fallthrough();

    const char* stage_names[] = {"ingest",     "extract",   "generate", "evaluate",
                                 "categorize", "visualize", "audit",    "report",
                                 "all"};
    const char* stage_help[] = {
        "ingest the paper corpus from the manifest",
        "extract per-paper system charts",
        "generate cross-set synergistic hypotheses",
        "score hypotheses for synergy and grounding",
        "collapse the Strong+Synergistic pool into ideas",
        "normalize charts and emit DOT graphs",
        "compute HMI, mechanism, and model-vs-human metrics",
        "write the run report",
        "run every stage in order"};
    for (size_t i = 0; i < std::size(stage_names); ++i) {
        CLI::App* sub = app.add_subcommand(stage_names[i], stage_help[i]);
        if (std::string(stage_names[i]) == "visualize")
            sub->add_option("--hypothesis", hypothesis_id,
                            "also emit the graph for this hypothesis id");
    }

    CLI11_PARSE(app, argc, argv);
    set_log_quiet(quiet);

    try {
        PipelineConfig config = load_config(config_path);
        if (!backend.empty()) config.backend_kind = *backend_kind_from_string(backend);
        if (!fixtures.empty()) config.fixtures_dir = fixtures;
        validate_config(config);

        std::string stage_name = app.get_subcommands().front()->get_name();
        PipelineStage stage = *pipeline_stage_from_string(stage_name);

        if (run_id.empty()) run_id = make_run_id(config, config.runs_root, resume);
        Runner runner(config, run_id, resume);
        if (hypothesis_id > 0) runner.set_hypothesis_graph_id(hypothesis_id);

        int status = runner.run(stage);
        if (status == 0 && (stage == PipelineStage::Report || stage == PipelineStage::All))
            std::cout << runner.report_text();
        if (status == 0)
            log_info("run " + runner.run_id() + " stage " + stage_name + " complete (" +
                     runner.paths().run_dir.string() + ")");
        return status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
