#pragma once

#include "hypoforge/evaluation.hpp"
#include "hypoforge/gateway.hpp"
#include "hypoforge/generation.hpp"

#include <set>

namespace hypoforge {

/// A category of hypotheses sharing source-paper pairs, structural
/// entities, and core concept (the Idea | Hypotheses | Structural
/// entities | Core concepts row shape).
struct Idea {
    int idea_id = 0;
    std::vector<int> member_hypotheses;  // sorted, non-empty
    std::vector<std::string> structural_entities;
    std::string core_concept;
    std::set<std::pair<int, int>> source_pair_signature;  // (paper_id, paper_id)
};

struct CategorizationState {
    std::vector<Idea> ideas;
    bool halted = false;  // idea count exceeded the cap after some reply
    bool turn_budget_exhausted = false;
    std::vector<int> dropped_hypotheses;  // pool members absent from all ideas
};

struct PoolFilter {
    std::vector<Hypothesis> pool;  // Strong AND Synergistic, ordered by id
    int excluded_unevaluated = 0;
    int excluded_by_label = 0;
};

/// Keep hypotheses evaluated both Strong and Synergistic; unevaluated
/// ones are excluded and counted.
PoolFilter filter_pool(const std::vector<Hypothesis>& hyps,
                       const std::vector<EvaluationRecord>& evaluations);

/// Contiguous, order-preserving partition into k chunks whose sizes
/// differ by at most one, larger chunks first. k > |pool| degrades to
/// singleton chunks with a warning.
template <typename T>
std::vector<std::vector<T>> chunk_pool(const std::vector<T>& pool, int k);

struct ChunkItem {
    Hypothesis hypothesis;
    SynergyEvaluation synergy;
};

std::string categorize_chunk_prompt(const std::vector<ChunkItem>& chunk);

/// Initial categorization of one chunk. An unparseable reply (after the
/// single reprompt) drops the whole chunk: its members end up in no idea.
std::vector<Idea> categorize_chunk(const std::vector<ChunkItem>& chunk,
                                   const StageProfile& profile, Gateway& gateway,
                                   Backend& backend);

/// Final categorization over the combined per-chunk ideas. The
/// conversation continues via continuation prompts until the reply
/// carries the end-of-table terminator; the idea count is checked
/// immediately after each reply and the process halts, with no further
/// backend calls, once it exceeds `cap`.
CategorizationState merge_ideas(const std::vector<std::vector<Idea>>& per_chunk_ideas,
                                const std::vector<int>& pool_ids, int cap,
                                const StageProfile& profile, Gateway& gateway, Backend& backend,
                                int turn_budget = 10);

struct CoverageReport {
    size_t pool_size = 0;
    size_t covered = 0;
    size_t dropped = 0;
    double loss_fraction = 0.0;
    std::vector<size_t> per_idea_sizes;
    bool halted = false;
};

CoverageReport coverage_report(const CategorizationState& state,
                               const std::vector<int>& pool_ids);

std::string ideas_to_json(const std::vector<Idea>& ideas);
std::vector<Idea> ideas_from_json(const std::string& text);
std::string coverage_to_json(const CoverageReport& report);

// ---- template definition ----

template <typename T>
std::vector<std::vector<T>> chunk_pool(const std::vector<T>& pool, int k) {
    if (pool.empty()) throw Error("chunk_pool needs a non-empty pool");
    if (k < 1) throw Error("chunk_pool needs k >= 1");
    size_t n = pool.size();
    size_t chunks = static_cast<size_t>(k);
    if (chunks > n) {
        log_warn("chunk count " + std::to_string(k) + " exceeds pool size " +
                 std::to_string(n) + "; using singleton chunks");
        chunks = n;
    }
    size_t base = n / chunks;
    size_t remainder = n % chunks;  // the first `remainder` chunks get one extra
    std::vector<std::vector<T>> out;
    out.reserve(chunks);
    size_t pos = 0;
    for (size_t i = 0; i < chunks; ++i) {
        size_t size = base + (i < remainder ? 1 : 0);
        out.emplace_back(pool.begin() + pos, pool.begin() + pos + size);
        pos += size;
    }
    return out;
}

}  // namespace hypoforge
