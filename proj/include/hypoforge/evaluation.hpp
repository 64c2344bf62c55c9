#pragma once

#include "hypoforge/gateway.hpp"
#include "hypoforge/generation.hpp"
#include "hypoforge/llm.hpp"

#include <optional>

namespace hypoforge {

enum class SynergyLabel { Synergistic, Additive };
enum class GroundingLabel { Strong, Weak };

std::string to_string(SynergyLabel l);
std::string to_string(GroundingLabel l);

struct SynergyEvaluation {
    int hypothesis_id = 0;
    int score = 0;  // 1..5
    SynergyLabel label = SynergyLabel::Additive;
    std::vector<std::string> interdependence_sentences;
    std::vector<std::string> core_structures;
};

struct GroundingEvaluation {
    int hypothesis_id = 0;
    GroundingLabel label = GroundingLabel::Weak;
    std::string rationale;
};

/// Both evaluations for one hypothesis; either side may be absent when
/// the reply stayed unparseable after the reprompt (the hypothesis is
/// then excluded downstream, never defaulted).
struct EvaluationRecord {
    int hypothesis_id = 0;
    std::optional<SynergyEvaluation> synergy;
    std::optional<GroundingEvaluation> grounding;
};

/// Scores above 3 are Synergistic, 3 or below Additive.
SynergyLabel classify_synergy(int score);

std::string synergy_prompt(const Hypothesis& h);
std::string grounding_prompt(const Hypothesis& h, const DomainProfile& domain);

/// Parse helpers (strict "Score:" / "Label:" line formats); nullopt when
/// the reply does not follow the contract.
std::optional<SynergyEvaluation> parse_synergy_reply(const std::string& raw, int hypothesis_id);
std::optional<GroundingEvaluation> parse_grounding_reply(const std::string& raw,
                                                         int hypothesis_id);

/// One reprompt on parse failure; nullopt when both replies fail.
std::optional<SynergyEvaluation> evaluate_synergy(const Hypothesis& h,
                                                  const StageProfile& profile, Gateway& gateway,
                                                  Backend& backend);
std::optional<GroundingEvaluation> evaluate_grounding(const Hypothesis& h,
                                                      const DomainProfile& domain,
                                                      const StageProfile& profile,
                                                      Gateway& gateway, Backend& backend);

std::string evaluations_to_jsonl(const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> evaluations_from_jsonl(const std::string& text);

}  // namespace hypoforge
