#pragma once

#include "hypoforge/util.hpp"

#include <map>
#include <string>
#include <vector>

namespace hypoforge {

struct PaperRecord {
    int paper_id = 0;  // stable, 1-based, assigned in manifest order
    std::string set_label;
    std::string title;
    std::string venue;
    int year = 0;
    std::string body_text;
    long token_estimate = 0;
};

struct CorpusStore {
    std::vector<PaperRecord> papers;
    // set label -> ordered paper ids; iteration order follows the manifest.
    std::vector<std::pair<std::string, std::vector<int>>> sets;

    const PaperRecord& paper(int paper_id) const;
    const PaperRecord* find_paper(int paper_id) const;
    std::vector<int> set_paper_ids(const std::string& label) const;
};

class CorpusError : public Error {
public:
    using Error::Error;
};

/// Words x 4/3, rounded down. Deterministic across backends; only feeds
/// the token-reduction report, so a fixed heuristic beats a tokenizer.
long token_estimate(std::string_view text);

/// Load a corpus manifest ({sets: [{label, papers: [{title, venue, year,
/// file}]}]}) and the referenced UTF-8 text files. Paper ids are assigned
/// 1..N in manifest order across sets.
CorpusStore ingest_corpus(const fs::path& manifest_path, const fs::path& text_root);

std::string corpus_to_json(const CorpusStore& store);
CorpusStore corpus_from_json(const std::string& text);

}  // namespace hypoforge
