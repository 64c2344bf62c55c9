#pragma once

#include "hypoforge/backend.hpp"
#include "hypoforge/config.hpp"
#include "hypoforge/gateway.hpp"

#include <memory>
#include <optional>
#include <string>

namespace hypoforge {

enum class PipelineStage {
    Ingest,
    Extract,
    Generate,
    Evaluate,
    Categorize,
    Visualize,
    Audit,
    Report,
    All
};

std::optional<PipelineStage> pipeline_stage_from_string(const std::string& s);
std::string to_string(PipelineStage s);

/// Layout of one run directory (runs/<run_id>/...).
struct RunPaths {
    fs::path run_dir;

    fs::path manifest() const { return run_dir / "manifest.json"; }
    fs::path lock() const { return run_dir / ".lock"; }
    fs::path corpus() const { return run_dir / "corpus.json"; }
    fs::path charts_dir() const { return run_dir / "charts"; }
    fs::path chart(int paper_id) const {
        return charts_dir() / (std::to_string(paper_id) + ".json");
    }
    fs::path charts_csv() const { return run_dir / "charts.csv"; }
    fs::path hypotheses() const { return run_dir / "hypotheses.jsonl"; }
    fs::path evaluations() const { return run_dir / "evaluations.jsonl"; }
    fs::path ideas() const { return run_dir / "ideas.json"; }
    fs::path coverage() const { return run_dir / "coverage.json"; }
    fs::path graphs_dir() const { return run_dir / "graphs"; }
    fs::path audit() const { return run_dir / "audit.json"; }
    fs::path report_txt() const { return run_dir / "report.txt"; }
    fs::path report_json() const { return run_dir / "report.json"; }
};

/// Derive a run id from the config digest; append a numeric suffix when
/// the directory already exists (run directories are append-only).
std::string make_run_id(const PipelineConfig& config, const fs::path& runs_root, bool resume);

/// Owns one run directory (lock file held for the Runner's lifetime) and
/// executes pipeline stages into it. Stages read only their declared
/// prerequisite files, so any stage can be re-run in isolation.
class Runner {
public:
    Runner(PipelineConfig config, std::string run_id, bool resume = false);
    ~Runner();

    Runner(const Runner&) = delete;
    Runner& operator=(const Runner&) = delete;

    /// Returns 0 when the stage (or chain, for All) completed without a
    /// fatal error; warnings do not affect the status.
    int run(PipelineStage stage);

    /// Visualize this hypothesis (in addition to the per-paper charts).
    void set_hypothesis_graph_id(int hypothesis_id) { hypothesis_graph_id_ = hypothesis_id; }

    const std::string& run_id() const { return run_id_; }
    const RunPaths& paths() const { return paths_; }
    std::string report_text() const;

private:
    void require(const fs::path& p, const std::string& producing_stage) const;
    void record_stage(const std::string& stage, const std::vector<fs::path>& outputs);

    void stage_ingest();
    void stage_extract();
    void stage_generate();
    void stage_evaluate();
    void stage_categorize();
    void stage_visualize();
    void stage_audit();
    void stage_report();

    PipelineConfig config_;
    std::string run_id_;
    RunPaths paths_;
    DomainProfile domain_;
    std::unique_ptr<Gateway> gateway_;
    std::shared_ptr<Backend> primary_backend_;
    std::shared_ptr<Backend> eval_backend_;
    std::optional<int> hypothesis_graph_id_;
    bool lock_held_ = false;
};

}  // namespace hypoforge
