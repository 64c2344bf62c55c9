#pragma once

#include "hypoforge/util.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypoforge {

/// Human machine-readability audit of one extracted chart.
/// hmi_percent = 100 * (0*I + 0.5*PC + 1*C) / (I+PC+C), minus 20 when the
/// chart misses the paper's core idea, floored at 0.
struct HmiAudit {
    long incorrect = 0;          // I
    long partially_correct = 0;  // PC
    long correct = 0;            // C
    long total_actions = 0;      // A_T = I + PC + C
    bool core_idea_present = true;
    double hmi_percent = 0.0;
};

double compute_hmi(long incorrect, long partially_correct, long correct,
                   bool core_idea_present);

HmiAudit make_hmi_audit(long incorrect, long partially_correct, long correct,
                        bool core_idea_present);

/// Per-mechanism audit flags and their aggregates. Fidelity counts
/// mechanisms that are both mechanistically sound and correctly labeled,
/// so fidelity <= min(labeling_accuracy, mechanistic_accuracy).
struct MechanismFlags {
    bool label_correct = false;
    bool mechanistic_correct = false;
};

struct MechanismAudit {
    std::vector<MechanismFlags> flags;
    double labeling_accuracy = 0.0;
    double mechanistic_accuracy = 0.0;
    double fidelity = 0.0;
};

MechanismAudit compute_mechanism_scores(const std::vector<MechanismFlags>& flags);

/// Standard confusion-matrix rates. Ratios with zero denominators are
/// absent, not zero.
struct ConfusionMetrics {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

ConfusionMetrics confusion_metrics(long tp, long fp, long fn, long tn);

/// Harmonic mean of precision and recall; absent when both are zero.
std::optional<double> f1_score(double precision, double recall);

/// Round half away from zero to `decimals` places (the rounding the
/// reported two-decimal metrics use).
double round_half_up(double value, int decimals);

/// Confusion counts of model labels against human labels (ground truth),
/// aligned by item id. Ids present on one side only raise an error
/// listing them.
ConfusionMetrics compare_with_human(const std::vector<std::pair<int, std::string>>& model,
                                    const std::vector<std::pair<int, std::string>>& human,
                                    const std::string& positive_label);

}  // namespace hypoforge
