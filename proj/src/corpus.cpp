#include "hypoforge/corpus.hpp"

#include <json.hpp>

#include <set>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

const PaperRecord* CorpusStore::find_paper(int paper_id) const {
    for (const auto& p : papers) {
        if (p.paper_id == paper_id) return &p;
    }
    return nullptr;
}

const PaperRecord& CorpusStore::paper(int paper_id) const {
    const PaperRecord* p = find_paper(paper_id);
    if (!p) throw CorpusError("unknown paper_id " + std::to_string(paper_id));
    return *p;
}

std::vector<int> CorpusStore::set_paper_ids(const std::string& label) const {
    for (const auto& [l, ids] : sets) {
        if (l == label) return ids;
    }
    throw CorpusError("unknown set label: " + label);
}

long token_estimate(std::string_view text) {
    return static_cast<long>(word_count(text)) * 4 / 3;
}

CorpusStore ingest_corpus(const fs::path& manifest_path, const fs::path& text_root) {
    std::string manifest_text = read_file(manifest_path);
    ordered_json manifest;
    try {
        manifest = ordered_json::parse(manifest_text);
    } catch (const std::exception& e) {
        throw CorpusError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!manifest.contains("sets") || !manifest["sets"].is_array())
        throw CorpusError("manifest missing 'sets' array");
    if (manifest["sets"].size() < 2) throw CorpusError("need >=2 sets in the corpus manifest");

    CorpusStore store;
    int next_id = 1;
    for (const auto& set : manifest["sets"]) {
        std::string label = set.value("label", "");
        if (label.empty()) throw CorpusError("set with empty label");
        if (!set.contains("papers") || !set["papers"].is_array() || set["papers"].empty())
            throw CorpusError("set \"" + label + "\" lists no papers");

        std::vector<int> ids;
        std::set<std::string> titles_seen;
        for (const auto& entry : set["papers"]) {
            PaperRecord rec;
            rec.paper_id = next_id++;
            rec.set_label = label;
            rec.title = entry.value("title", "");
            rec.venue = entry.value("venue", "");
            rec.year = entry.value("year", 0);
            std::string file = entry.value("file", "");
            if (file.empty())
                throw CorpusError("paper \"" + rec.title + "\" in set \"" + label +
                                  "\" has no text file");
            fs::path text_path = text_root / file;
            auto body = try_read_file(text_path);
            if (!body)
                throw CorpusError("missing text file for paper \"" + rec.title + "\": " +
                                  text_path.string());
            rec.body_text = std::move(*body);
            if (trim(rec.body_text).empty())
                throw CorpusError("empty body text for paper \"" + rec.title + "\"");
            rec.token_estimate = token_estimate(rec.body_text);

            std::string title_key = fold_key(rec.title);
            if (!titles_seen.insert(title_key).second)
                log_warn("duplicate title within set \"" + label + "\": " + rec.title);

            ids.push_back(rec.paper_id);
            store.papers.push_back(std::move(rec));
        }
        store.sets.emplace_back(label, std::move(ids));
    }
    return store;
}

std::string corpus_to_json(const CorpusStore& store) {
    ordered_json j;
    j["papers"] = ordered_json::array();
    for (const auto& p : store.papers) {
        j["papers"].push_back({{"paper_id", p.paper_id},
                               {"set_label", p.set_label},
                               {"title", p.title},
                               {"venue", p.venue},
                               {"year", p.year},
                               {"body_text", p.body_text},
                               {"token_estimate", p.token_estimate}});
    }
    j["sets"] = ordered_json::array();
    for (const auto& [label, ids] : store.sets) {
        j["sets"].push_back({{"label", label}, {"papers", ids}});
    }
    return j.dump(2) + "\n";
}

CorpusStore corpus_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    CorpusStore store;
    for (const auto& pj : j.at("papers")) {
        PaperRecord p;
        p.paper_id = pj.at("paper_id").get<int>();
        p.set_label = pj.at("set_label").get<std::string>();
        p.title = pj.value("title", "");
        p.venue = pj.value("venue", "");
        p.year = pj.value("year", 0);
        p.body_text = pj.value("body_text", "");
        p.token_estimate = pj.value("token_estimate", 0L);
        store.papers.push_back(std::move(p));
    }
    for (const auto& sj : j.at("sets")) {
        store.sets.emplace_back(sj.at("label").get<std::string>(),
                                sj.at("papers").get<std::vector<int>>());
    }
    return store;
}

}  // namespace hypoforge
