#include "hypoforge/evaluation.hpp"

#include <json.hpp>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

std::string to_string(SynergyLabel l) {
    return l == SynergyLabel::Synergistic ? "Synergistic" : "Additive";
}

std::string to_string(GroundingLabel l) { return l == GroundingLabel::Strong ? "Strong" : "Weak"; }

SynergyLabel classify_synergy(int score) {
    if (score < 1 || score > 5)
        throw Error("synergy score out of range: " + std::to_string(score));
    return score > 3 ? SynergyLabel::Synergistic : SynergyLabel::Additive;
}

std::string synergy_prompt(const Hypothesis& h) {
    return "Assess whether the following materials design hypothesis is synergistic or "
           "additive. A hypothesis is synergistic when there is a generated interdependence "
           "between the two combined mechanisms, or when their combined action influences or "
           "creates a specific structure; it is additive when the mechanisms merely act "
           "independently.\n\nHypothesis " +
           std::to_string(h.hypothesis_id) + ":\n" + h.text +
           "\n\nScore the hypothesis on a 1-5 scale (5 = clearly synergistic, 1 = purely "
           "additive). Reply exactly in this format:\nScore: <integer 1-5>\nInterdependence:\n"
           "- \"<sentence from the hypothesis illustrating the interdependence>\"\n"
           "Core structures: <structure>; <structure>\n\nOmit the Interdependence bullet "
           "lines only when the hypothesis is additive.";
}

std::string grounding_prompt(const Hypothesis& h, const DomainProfile& domain) {
    return "Assess the scientific grounding of the following materials design hypothesis "
           "against the stated design goal. Criterion: " +
           domain.grounding_criterion + ".\n\nHypothesis " + std::to_string(h.hypothesis_id) +
           ":\n" + h.text +
           "\n\nReply exactly in this format:\nLabel: Strong or Weak\nRationale: <one "
           "sentence>";
}

namespace {

std::optional<std::string> line_after_prefix(const std::string& line, const char* prefix) {
    std::string t = trim(line);
    std::string lower = to_lower(t);
    std::string p = to_lower(prefix);
    if (lower.rfind(p, 0) != 0) return std::nullopt;
    return trim(t.substr(p.size()));
}

std::string strip_quotes(const std::string& s) {
    std::string t = trim(s);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
        t = t.substr(1, t.size() - 2);
    return trim(t);
}

}  // namespace

std::optional<SynergyEvaluation> parse_synergy_reply(const std::string& raw, int hypothesis_id) {
    SynergyEvaluation eval;
    eval.hypothesis_id = hypothesis_id;

    std::optional<int> score;
    bool in_interdependence = false;
    for (const auto& line : split_lines(raw)) {
        if (auto tail = line_after_prefix(line, "score:")) {
            try {
                size_t used = 0;
                int v = std::stoi(*tail, &used);
                score = v;
            } catch (const std::exception&) {
                return std::nullopt;
            }
            continue;
        }
        if (line_after_prefix(line, "interdependence:")) {
            in_interdependence = true;
            continue;
        }
        if (auto tail = line_after_prefix(line, "core structures:")) {
            in_interdependence = false;
            for (auto& s : split_trimmed(*tail, ';')) eval.core_structures.push_back(s);
            continue;
        }
        std::string t = trim(line);
        if (in_interdependence && t.rfind("-", 0) == 0)
            eval.interdependence_sentences.push_back(strip_quotes(t.substr(1)));
    }

    if (!score || *score < 1 || *score > 5) return std::nullopt;
    eval.score = *score;
    eval.label = classify_synergy(eval.score);
    // a Synergistic evaluation without its evidence sentences violates the
    // type invariant; count it as a format failure so the reprompt fires
    if (eval.label == SynergyLabel::Synergistic && eval.interdependence_sentences.empty())
        return std::nullopt;
    return eval;
}

std::optional<GroundingEvaluation> parse_grounding_reply(const std::string& raw,
                                                         int hypothesis_id) {
    GroundingEvaluation eval;
    eval.hypothesis_id = hypothesis_id;
    std::optional<GroundingLabel> label;
    std::vector<std::string> rationale_lines;
    bool in_rationale = false;
    for (const auto& line : split_lines(raw)) {
        if (auto tail = line_after_prefix(line, "label:")) {
            std::string v = to_lower(*tail);
            if (v.rfind("strong", 0) == 0) label = GroundingLabel::Strong;
            else if (v.rfind("weak", 0) == 0) label = GroundingLabel::Weak;
            else return std::nullopt;
            continue;
        }
        if (auto tail = line_after_prefix(line, "rationale:")) {
            in_rationale = true;
            if (!tail->empty()) rationale_lines.push_back(*tail);
            continue;
        }
        if (in_rationale && !trim(line).empty()) rationale_lines.push_back(trim(line));
    }
    if (!label) return std::nullopt;
    eval.label = *label;
    eval.rationale = join(rationale_lines, " ");
    return eval;
}

namespace {

constexpr const char* kSynergyRepair =
    "\n\nYour previous reply did not follow the required format. Reply again with an exact "
    "\"Score: <integer 1-5>\" line, the Interdependence bullet list (required when the score "
    "is 4 or 5), and a \"Core structures:\" line.";

constexpr const char* kGroundingRepair =
    "\n\nYour previous reply did not follow the required format. Reply again with an exact "
    "\"Label: Strong\" or \"Label: Weak\" line followed by a \"Rationale:\" line.";

}  // namespace

std::optional<SynergyEvaluation> evaluate_synergy(const Hypothesis& h,
                                                  const StageProfile& profile, Gateway& gateway,
                                                  Backend& backend) {
    std::string prompt = synergy_prompt(h);
    LlmResponse first = gateway.complete(profile.make_request(prompt), backend);
    if (auto eval = parse_synergy_reply(first.text, h.hypothesis_id)) return eval;

    LlmResponse second = gateway.complete(profile.make_request(prompt + kSynergyRepair), backend);
    if (auto eval = parse_synergy_reply(second.text, h.hypothesis_id)) return eval;

    log_warn("hypothesis " + std::to_string(h.hypothesis_id) +
             ": synergy reply unparseable after reprompt; flagged unevaluated");
    return std::nullopt;
}

std::optional<GroundingEvaluation> evaluate_grounding(const Hypothesis& h,
                                                      const DomainProfile& domain,
                                                      const StageProfile& profile,
                                                      Gateway& gateway, Backend& backend) {
    std::string prompt = grounding_prompt(h, domain);
    LlmResponse first = gateway.complete(profile.make_request(prompt), backend);
    if (auto eval = parse_grounding_reply(first.text, h.hypothesis_id)) return eval;

    LlmResponse second =
        gateway.complete(profile.make_request(prompt + kGroundingRepair), backend);
    if (auto eval = parse_grounding_reply(second.text, h.hypothesis_id)) return eval;

    log_warn("hypothesis " + std::to_string(h.hypothesis_id) +
             ": grounding reply unparseable after reprompt; flagged unevaluated");
    return std::nullopt;
}

std::string evaluations_to_jsonl(const std::vector<EvaluationRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json j;
        j["hypothesis_id"] = r.hypothesis_id;
        if (r.synergy) {
            j["synergy"] = {{"score", r.synergy->score},
                            {"label", to_string(r.synergy->label)},
                            {"interdependence_sentences", r.synergy->interdependence_sentences},
                            {"core_structures", r.synergy->core_structures}};
        } else {
            j["synergy"] = nullptr;
        }
        if (r.grounding) {
            j["grounding"] = {{"label", to_string(r.grounding->label)},
                              {"rationale", r.grounding->rationale}};
        } else {
            j["grounding"] = nullptr;
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<EvaluationRecord> evaluations_from_jsonl(const std::string& text) {
    std::vector<EvaluationRecord> out;
    for (const auto& line : split_lines(text)) {
        if (trim(line).empty()) continue;
        ordered_json j = ordered_json::parse(line);
        EvaluationRecord r;
        r.hypothesis_id = j.at("hypothesis_id").get<int>();
        if (j.contains("synergy") && !j["synergy"].is_null()) {
            SynergyEvaluation s;
            s.hypothesis_id = r.hypothesis_id;
            s.score = j["synergy"].at("score").get<int>();
            s.label = classify_synergy(s.score);
            s.interdependence_sentences =
                j["synergy"].value("interdependence_sentences", std::vector<std::string>{});
            s.core_structures = j["synergy"].value("core_structures", std::vector<std::string>{});
            r.synergy = std::move(s);
        }
        if (j.contains("grounding") && !j["grounding"].is_null()) {
            GroundingEvaluation g;
            g.hypothesis_id = r.hypothesis_id;
            g.label = j["grounding"].at("label").get<std::string>() == "Strong"
                          ? GroundingLabel::Strong
                          : GroundingLabel::Weak;
            g.rationale = j["grounding"].value("rationale", "");
            r.grounding = std::move(g);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hypoforge
