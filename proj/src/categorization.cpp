#include "hypoforge/categorization.hpp"

#include "hypoforge/extraction.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

PoolFilter filter_pool(const std::vector<Hypothesis>& hyps,
                       const std::vector<EvaluationRecord>& evaluations) {
    std::map<int, const EvaluationRecord*> by_id;
    for (const auto& r : evaluations) by_id[r.hypothesis_id] = &r;

    PoolFilter result;
    for (const auto& h : hyps) {
        auto it = by_id.find(h.hypothesis_id);
        if (it == by_id.end() || !it->second->synergy || !it->second->grounding) {
            ++result.excluded_unevaluated;
            continue;
        }
        const EvaluationRecord& r = *it->second;
        if (r.synergy->label == SynergyLabel::Synergistic &&
            r.grounding->label == GroundingLabel::Strong) {
            result.pool.push_back(h);
        } else {
            ++result.excluded_by_label;
        }
    }
    std::sort(result.pool.begin(), result.pool.end(),
              [](const Hypothesis& a, const Hypothesis& b) {
                  return a.hypothesis_id < b.hypothesis_id;
              });
    if (result.pool.empty()) log_warn("filter_pool: empty Strong+Synergistic pool");
    if (result.excluded_unevaluated > 0)
        log_warn("filter_pool: excluded " + std::to_string(result.excluded_unevaluated) +
                 " unevaluated hypotheses");
    return result;
}

namespace {

constexpr const char* kIdeaTerminator = "END OF IDEAS";

// hypothesis id -> (paper a, paper b), the signature source
using PairById = std::map<int, std::pair<int, int>>;

std::string idea_table_format_instruction() {
    return "Reply with a pipe-delimited table, one row per idea, exactly four columns:\n"
           "| Idea | Hypotheses | Structural entities | Core concepts |\n"
           "Number ideas from 1. List member hypothesis ids comma-separated; separate "
           "structural entities with semicolons. After the last row, write a line containing "
           "only: " +
           std::string(kIdeaTerminator);
}

std::vector<int> extract_ints(const std::string& s) {
    std::vector<int> out;
    size_t i = 0;
    while (i < s.size()) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j - i <= 9) out.push_back(std::stoi(s.substr(i, j - i)));
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<std::string> split_entities(const std::string& s) {
    auto entities = split_trimmed(s, ';');
    if (entities.size() <= 1 && s.find(',') != std::string::npos)
        entities = split_trimmed(s, ',');
    return entities;
}

bool contains_terminator(const std::string& text) {
    for (const auto& line : split_lines(text)) {
        if (to_lower(trim(line)) == to_lower(kIdeaTerminator)) return true;
    }
    return false;
}

std::string without_terminator(const std::string& text) {
    std::vector<std::string> kept;
    for (const auto& line : split_lines(text)) {
        if (to_lower(trim(line)) == to_lower(kIdeaTerminator)) continue;
        kept.push_back(line);
    }
    return join(kept, "\n");
}

// Truncated replies may end mid-row; drop the dangling fragment.
std::string strip_partial_tail(const std::string& text) {
    auto lines = split_lines(text);
    if (!lines.empty()) {
        std::string last = trim(lines.back());
        if (!last.empty() && last.find('|') != std::string::npos && last.back() != '|')
            lines.pop_back();
    }
    return join(lines, "\n");
}

/// Turn parsed 4-column rows into Ideas: members restricted to known ids,
/// membership kept disjoint, idea ids renumbered densely.
std::vector<Idea> ideas_from_rows(const std::vector<TableRow>& rows, const PairById& allowed,
                                  const std::string& where) {
    std::vector<Idea> ideas;
    std::set<int> assigned;
    for (const auto& row : rows) {
        Idea idea;
        for (int id : extract_ints(row[1].text)) {
            auto it = allowed.find(id);
            if (it == allowed.end()) {
                log_warn(where + ": reply names hypothesis " + std::to_string(id) +
                         " outside the input; dropped from idea");
                continue;
            }
            if (assigned.count(id)) {
                log_warn(where + ": hypothesis " + std::to_string(id) +
                         " assigned to two ideas; keeping first assignment");
                continue;
            }
            assigned.insert(id);
            idea.member_hypotheses.push_back(id);
            idea.source_pair_signature.insert(it->second);
        }
        if (idea.member_hypotheses.empty()) {
            log_warn(where + ": idea row with no valid members skipped: " + row[1].text);
            continue;
        }
        std::sort(idea.member_hypotheses.begin(), idea.member_hypotheses.end());
        idea.structural_entities = split_entities(row[2].text);
        idea.core_concept = row[3].text;
        ideas.push_back(std::move(idea));
    }
    for (size_t i = 0; i < ideas.size(); ++i) ideas[i].idea_id = static_cast<int>(i) + 1;
    return ideas;
}

}  // namespace

std::string categorize_chunk_prompt(const std::vector<ChunkItem>& chunk) {
    std::string prompt =
        "Group the following hypotheses into distinct ideas. Merge hypotheses that share "
        "combined paper numbers, core structural entities, and synergistic mechanism "
        "sentences; keep genuinely different hypotheses apart.\n\n";
    for (const auto& item : chunk) {
        const Hypothesis& h = item.hypothesis;
        prompt += "Hypothesis " + std::to_string(h.hypothesis_id) + " (papers " +
                  std::to_string(h.pair.a.paper_id) + " and " +
                  std::to_string(h.pair.b.paper_id) + ")\n";
        prompt += "  Core structural entities: " + join(item.synergy.core_structures, "; ") + "\n";
        for (const auto& s : item.synergy.interdependence_sentences)
            prompt += "  Synergistic sentence: \"" + s + "\"\n";
    }
    prompt += "\n" + idea_table_format_instruction();
    return prompt;
}

std::vector<Idea> categorize_chunk(const std::vector<ChunkItem>& chunk,
                                   const StageProfile& profile, Gateway& gateway,
                                   Backend& backend) {
    if (chunk.empty()) throw Error("categorize_chunk needs a non-empty chunk");
    PairById allowed;
    for (const auto& item : chunk)
        allowed[item.hypothesis.hypothesis_id] = {item.hypothesis.pair.a.paper_id,
                                                  item.hypothesis.pair.b.paper_id};

    std::vector<TableRow> rows;
    try {
        rows = ask_table(gateway, backend, profile, categorize_chunk_prompt(chunk), 4);
    } catch (const ReplyFormatError& e) {
        log_warn("chunk categorization unparseable after reprompt (transcript " + e.digest() +
                 "); chunk members dropped");
        return {};
    }
    return ideas_from_rows(rows, allowed, "chunk categorization");
}

namespace {

std::string merge_prompt(const std::vector<std::vector<Idea>>& per_chunk_ideas) {
    std::string prompt =
        "The following ideas were produced by categorizing separate chunks of hypotheses. "
        "Merge ideas that share combined paper numbers, core structural entities, and "
        "concepts into single ideas; carry every member hypothesis id over verbatim.\n\n";
    for (size_t c = 0; c < per_chunk_ideas.size(); ++c) {
        for (const auto& idea : per_chunk_ideas[c]) {
            std::vector<std::string> ids;
            for (int id : idea.member_hypotheses) ids.push_back(std::to_string(id));
            std::vector<std::string> pairs;
            for (const auto& [a, b] : idea.source_pair_signature)
                pairs.push_back("(" + std::to_string(a) + "," + std::to_string(b) + ")");
            prompt += "From chunk " + std::to_string(c + 1) + ": hypotheses " + join(ids, ", ") +
                      "; paper pairs " + join(pairs, " ") + "; entities " +
                      join(idea.structural_entities, "; ") + "; concept: " + idea.core_concept +
                      "\n";
        }
    }
    prompt += "\n" + idea_table_format_instruction();
    return prompt;
}

}  // namespace

CategorizationState merge_ideas(const std::vector<std::vector<Idea>>& per_chunk_ideas,
                                const std::vector<int>& pool_ids, int cap,
                                const StageProfile& profile, Gateway& gateway, Backend& backend,
                                int turn_budget) {
    PairById allowed;
    for (const auto& ideas : per_chunk_ideas) {
        for (const auto& idea : ideas) {
            for (size_t i = 0; i < idea.member_hypotheses.size(); ++i) {
                int id = idea.member_hypotheses[i];
                if (!idea.source_pair_signature.empty())
                    allowed[id] = *idea.source_pair_signature.begin();
                else
                    allowed[id] = {0, 0};
            }
        }
    }
    if (allowed.empty()) throw Error("merge_ideas needs at least one non-empty idea list");

    CategorizationState state;
    std::string base_prompt = merge_prompt(per_chunk_ideas);
    std::string accumulated;  // table rows collected across turns
    std::string next_prompt = base_prompt;
    int turns = 0;
    bool reprompted = false;

    while (true) {
        if (turns >= turn_budget) {
            log_warn("merge_ideas: turn budget (" + std::to_string(turn_budget) +
                     ") exhausted; returning partial state");
            state.turn_budget_exhausted = true;
            break;
        }
        ++turns;
        LlmResponse response = gateway.complete(profile.make_request(next_prompt), backend);
        std::string text = response.text;
        if (response.finish_reason == FinishReason::Truncated) text = strip_partial_tail(text);
        bool done = contains_terminator(text);
        std::string body = without_terminator(text);

        std::string candidate = accumulated.empty() ? body : accumulated + "\n" + body;
        TableParseResult parsed = parse_chart_table(candidate, 4);
        if (!parsed.ok()) {
            if (reprompted) {
                log_warn("merge_ideas: reply unparseable after reprompt; stopping with " +
                         std::to_string(state.ideas.size()) + " ideas");
                break;
            }
            reprompted = true;
            next_prompt = base_prompt +
                          "\n\nYour previous reply could not be parsed: " +
                          parsed.error->message +
                          "\nReply again following the required four-column table format.";
            continue;
        }
        accumulated = candidate;
        state.ideas = ideas_from_rows(parsed.rows, allowed, "idea merge");

        // The cap check fires immediately after each reply; once it trips,
        // no further backend calls are made.
        if (static_cast<int>(state.ideas.size()) > cap) {
            log_warn("merge_ideas: idea count " + std::to_string(state.ideas.size()) +
                     " exceeds cap " + std::to_string(cap) + "; halting");
            state.halted = true;
            break;
        }
        if (done) break;

        next_prompt = base_prompt + "\n\n[Your reply so far]\n" + accumulated +
                      "\n\nContinue the table from where you stopped, without repeating rows "
                      "already given. End with the line: " +
                      std::string(kIdeaTerminator) + "\n(turn " + std::to_string(turns + 1) +
                      ")";
    }

    std::set<int> covered;
    for (const auto& idea : state.ideas)
        for (int id : idea.member_hypotheses) covered.insert(id);
    for (int id : pool_ids)
        if (!covered.count(id)) state.dropped_hypotheses.push_back(id);
    std::sort(state.dropped_hypotheses.begin(), state.dropped_hypotheses.end());
    return state;
}

CoverageReport coverage_report(const CategorizationState& state,
                               const std::vector<int>& pool_ids) {
    CoverageReport report;
    report.pool_size = pool_ids.size();
    std::set<int> covered;
    for (const auto& idea : state.ideas) {
        report.per_idea_sizes.push_back(idea.member_hypotheses.size());
        for (int id : idea.member_hypotheses) covered.insert(id);
    }
    size_t covered_in_pool = 0;
    for (int id : pool_ids)
        if (covered.count(id)) ++covered_in_pool;
    report.covered = covered_in_pool;
    report.dropped = report.pool_size - covered_in_pool;
    report.loss_fraction = report.pool_size == 0
                               ? 0.0
                               : static_cast<double>(report.dropped) /
                                     static_cast<double>(report.pool_size);
    report.halted = state.halted;
    return report;
}

std::string ideas_to_json(const std::vector<Idea>& ideas) {
    ordered_json arr = ordered_json::array();
    for (const auto& idea : ideas) {
        arr.push_back({{"idea_id", idea.idea_id},
                       {"member_hypotheses", idea.member_hypotheses},
                       {"structural_entities", idea.structural_entities},
                       {"core_concept", idea.core_concept}});
    }
    return arr.dump(2) + "\n";
}

std::vector<Idea> ideas_from_json(const std::string& text) {
    ordered_json arr = ordered_json::parse(text);
    std::vector<Idea> out;
    for (const auto& j : arr) {
        Idea idea;
        idea.idea_id = j.at("idea_id").get<int>();
        idea.member_hypotheses = j.at("member_hypotheses").get<std::vector<int>>();
        idea.structural_entities = j.at("structural_entities").get<std::vector<std::string>>();
        idea.core_concept = j.at("core_concept").get<std::string>();
        out.push_back(std::move(idea));
    }
    return out;
}

std::string coverage_to_json(const CoverageReport& report) {
    ordered_json j;
    j["pool_size"] = report.pool_size;
    j["covered"] = report.covered;
    j["dropped"] = report.dropped;
    j["loss_fraction"] = report.loss_fraction;
    j["per_idea_sizes"] = report.per_idea_sizes;
    j["halted"] = report.halted;
    return j.dump(2) + "\n";
}

}  // namespace hypoforge
