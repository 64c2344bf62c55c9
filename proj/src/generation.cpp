#include "hypoforge/generation.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

std::vector<RowPair> enumerate_pairs(const std::vector<SystemChart>& charts_a,
                                     const std::vector<SystemChart>& charts_b,
                                     std::optional<size_t> cap, uint64_t seed) {
    if (charts_a.empty() || charts_b.empty())
        throw Error("enumerate_pairs needs charts from both sets");

    auto collect = [](const std::vector<SystemChart>& charts) {
        std::vector<RowRef> refs;
        for (const auto& c : charts)
            for (const auto& r : c.rows) refs.push_back({c.paper_id, r.row_index});
        std::sort(refs.begin(), refs.end());
        return refs;
    };
    std::vector<RowRef> rows_a = collect(charts_a);
    std::vector<RowRef> rows_b = collect(charts_b);

    std::vector<RowPair> pairs;
    pairs.reserve(rows_a.size() * rows_b.size());
    for (const auto& a : rows_a)
        for (const auto& b : rows_b) pairs.push_back({0, a, b});

    if (cap && *cap < pairs.size()) {
        // Partial Fisher-Yates over mt19937_64: deterministic across
        // toolchains, unlike std::sample. Selected indices are re-sorted
        // so the result stays in lexicographic order.
        std::vector<size_t> idx(pairs.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::mt19937_64 rng(seed);
        for (size_t i = 0; i < *cap; ++i) {
            size_t j = i + static_cast<size_t>(rng() % (idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(*cap);
        std::sort(idx.begin(), idx.end());
        std::vector<RowPair> sampled;
        sampled.reserve(*cap);
        for (size_t i : idx) sampled.push_back(pairs[i]);
        pairs = std::move(sampled);
    } else if (cap && *cap > pairs.size()) {
        log_warn("pair cap " + std::to_string(*cap) + " exceeds total pairs " +
                 std::to_string(pairs.size()) + "; clamped");
    }

    for (size_t i = 0; i < pairs.size(); ++i) pairs[i].pair_id = static_cast<int>(i) + 1;
    return pairs;
}

namespace {

std::string row_block(const RowRef& ref, const ChartRow& row, const std::string& set_label) {
    return "Row from paper [" + std::to_string(ref.paper_id) + "] (set \"" + set_label +
           "\"):\n"
           "  Processing: " + row.processing + "\n" +
           "  Mechanism (processing→structure): " + row.mech_ps.text + " (" +
           to_string(row.mech_ps.source) + ")\n" +
           "  Structure: " + row.structure + "\n" +
           "  Mechanism (structure→property): " + row.mech_sp.text + " (" +
           to_string(row.mech_sp.source) + ")\n" +
           "  Property: " + row.property + "\n";
}

}  // namespace

std::string generation_prompt(const RowPair& pair, const ChartRow& row_a, const ChartRow& row_b,
                              const std::string& set_label_a, const std::string& set_label_b,
                              const DomainProfile& domain, int sample_index) {
    std::string prompt =
        "You are combining knowledge from two different sets of papers to propose a new "
        "materials design hypothesis.\n\n" +
        row_block(pair.a, row_a, set_label_a) + "\n" + row_block(pair.b, row_b, set_label_b) +
        "\nSelect the mechanisms from these two sources and synergistically combine them by "
        "suggesting an innovative interaction. The hypothesis must create an interdependence "
        "in which at least one mechanism positively influences another, without significant "
        "negative impact; do not propose an additive combination of independent effects.\n";
    if (domain.compound_mode)
        prompt +=
            "Propose a single compound material, not a composite of two coexisting "
            "materials.\n";
    prompt +=
        "Quote each combined mechanism verbatim once. Cite the source papers with their "
        "bracketed numbers, e.g. [" +
        std::to_string(pair.a.paper_id) +
        "].\nEnd your reply with a line of the form:\nStructural entities: <entity>; "
        "<entity>\n\nSample index: " +
        std::to_string(sample_index);
    return prompt;
}

Hypothesis parse_hypothesis(const std::string& raw, const RowPair& pair) {
    Hypothesis h;
    h.pair = pair;

    std::vector<std::string> kept_lines;
    for (const auto& line : split_lines(raw)) {
        std::string t = trim(line);
        if (to_lower(t).rfind("structural entities:", 0) == 0) {
            std::string tail = trim(t.substr(std::string("structural entities:").size()));
            for (auto& entity : split_trimmed(tail, ';')) h.combined_structures.push_back(entity);
            continue;
        }
        kept_lines.push_back(line);
    }
    h.text = trim(join(kept_lines, "\n"));
    if (h.text.empty()) throw HypothesisParseError("hypothesis reply has no text");

    std::set<int> markers;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '[') continue;
        size_t j = i + 1;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
        size_t digits = j - i - 1;
        // markers longer than 9 digits cannot be paper ids
        if (digits >= 1 && digits <= 9 && j < raw.size() && raw[j] == ']')
            markers.insert(std::stoi(std::string(raw.substr(i + 1, digits))));
    }
    h.cited_papers.assign(markers.begin(), markers.end());
    if (h.cited_papers.empty())
        log_warn("pair " + std::to_string(pair.pair_id) +
                 ": hypothesis carries no bracketed citation markers");
    return h;
}

std::vector<Hypothesis> generate_for_pair(const RowPair& pair, const ChartRow& row_a,
                                          const ChartRow& row_b, const std::string& set_label_a,
                                          const std::string& set_label_b,
                                          const DomainProfile& domain, int n_samples,
                                          const StageProfile& profile, Gateway& gateway,
                                          Backend& backend) {
    if (n_samples < 1) throw Error("generate_for_pair needs n_samples >= 1");

    std::vector<Hypothesis> out;
    for (int sample = 1; sample <= n_samples; ++sample) {
        std::string prompt = generation_prompt(pair, row_a, row_b, set_label_a, set_label_b,
                                               domain, sample);
        LlmResponse response = gateway.complete(profile.make_request(prompt), backend);
        try {
            out.push_back(parse_hypothesis(response.text, pair));
        } catch (const HypothesisParseError& e) {
            log_warn("pair " + std::to_string(pair.pair_id) + " sample " +
                     std::to_string(sample) + ": " + e.what() + "; sample dropped");
        }
    }
    if (out.empty())
        log_warn("pair " + std::to_string(pair.pair_id) +
                 ": all samples unparseable; pair skipped");
    return out;
}

std::vector<Hypothesis> assign_ids(const std::vector<std::vector<Hypothesis>>& batches) {
    std::vector<Hypothesis> flat;
    for (const auto& batch : batches)
        for (const auto& h : batch) flat.push_back(h);
    for (size_t i = 0; i < flat.size(); ++i) flat[i].hypothesis_id = static_cast<int>(i) + 1;
    return flat;
}

namespace {

ordered_json pair_to_json(const RowPair& p) {
    return {{"pair_id", p.pair_id},
            {"a", {{"paper_id", p.a.paper_id}, {"row_index", p.a.row_index}}},
            {"b", {{"paper_id", p.b.paper_id}, {"row_index", p.b.row_index}}}};
}

RowPair pair_from_json(const ordered_json& j) {
    RowPair p;
    p.pair_id = j.at("pair_id").get<int>();
    p.a = {j.at("a").at("paper_id").get<int>(), j.at("a").at("row_index").get<int>()};
    p.b = {j.at("b").at("paper_id").get<int>(), j.at("b").at("row_index").get<int>()};
    return p;
}

}  // namespace

std::string hypothesis_to_jsonl_line(const Hypothesis& h) {
    ordered_json j;
    j["hypothesis_id"] = h.hypothesis_id;
    j["pair"] = pair_to_json(h.pair);
    j["text"] = h.text;
    j["cited_papers"] = h.cited_papers;
    j["combined_structures"] = h.combined_structures;
    return j.dump();
}

std::string hypotheses_to_jsonl(const std::vector<Hypothesis>& hyps) {
    std::string out;
    for (const auto& h : hyps) out += hypothesis_to_jsonl_line(h) + "\n";
    return out;
}

std::vector<Hypothesis> hypotheses_from_jsonl(const std::string& text) {
    std::vector<Hypothesis> out;
    for (const auto& line : split_lines(text)) {
        if (trim(line).empty()) continue;
        ordered_json j = ordered_json::parse(line);
        Hypothesis h;
        h.hypothesis_id = j.at("hypothesis_id").get<int>();
        h.pair = pair_from_json(j.at("pair"));
        h.text = j.at("text").get<std::string>();
        h.cited_papers = j.at("cited_papers").get<std::vector<int>>();
        h.combined_structures = j.at("combined_structures").get<std::vector<std::string>>();
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace hypoforge
