#pragma once

#include "hypoforge/chart.hpp"
#include "hypoforge/gateway.hpp"
#include "hypoforge/llm.hpp"

#include <cstdint>
#include <optional>

namespace hypoforge {

struct RowRef {
    int paper_id = 0;
    int row_index = 0;

    bool operator==(const RowRef&) const = default;
    auto operator<=>(const RowRef&) const = default;
};

/// One cross-set combination unit: a row from set A and a row from set B.
struct RowPair {
    int pair_id = 0;
    RowRef a;
    RowRef b;

    bool operator==(const RowPair&) const = default;
};

struct Hypothesis {
    int hypothesis_id = 0;  // global, dense from 1; assigned by assign_ids
    RowPair pair;
    std::string text;
    std::vector<int> cited_papers;  // sorted, distinct bracketed markers
    std::vector<std::string> combined_structures;
};

class HypothesisParseError : public Error {
public:
    using Error::Error;
};

/// Full cross product rows(A) x rows(B) in lexicographic (paper_id,
/// row_index) order. With a cap, a seeded uniform sample without
/// replacement, still in lexicographic order; the same seed always picks
/// the same pairs.
std::vector<RowPair> enumerate_pairs(const std::vector<SystemChart>& charts_a,
                                     const std::vector<SystemChart>& charts_b,
                                     std::optional<size_t> cap, uint64_t seed);

std::string generation_prompt(const RowPair& pair, const ChartRow& row_a, const ChartRow& row_b,
                              const std::string& set_label_a, const std::string& set_label_b,
                              const DomainProfile& domain, int sample_index);

/// Parse one completion: hypothesis text, distinct [n] markers, and the
/// trailing "Structural entities:" line. Ids are assigned later.
Hypothesis parse_hypothesis(const std::string& raw, const RowPair& pair);

/// n_samples independent completions for one pair, each a distinct
/// request via a sample-index salt. Unparseable samples are dropped; an
/// all-unparseable pair yields an empty list (skipped with a warning).
std::vector<Hypothesis> generate_for_pair(const RowPair& pair, const ChartRow& row_a,
                                          const ChartRow& row_b, const std::string& set_label_a,
                                          const std::string& set_label_b,
                                          const DomainProfile& domain, int n_samples,
                                          const StageProfile& profile, Gateway& gateway,
                                          Backend& backend);

/// Flatten per-pair batches (in enumerate_pairs order) and number the
/// hypotheses 1..N.
std::vector<Hypothesis> assign_ids(const std::vector<std::vector<Hypothesis>>& batches);

std::string hypothesis_to_jsonl_line(const Hypothesis& h);
std::string hypotheses_to_jsonl(const std::vector<Hypothesis>& hyps);
std::vector<Hypothesis> hypotheses_from_jsonl(const std::string& text);

}  // namespace hypoforge
