#include "hypoforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hypoforge {

double compute_hmi(long incorrect, long partially_correct, long correct,
                   bool core_idea_present) {
    if (incorrect < 0 || partially_correct < 0 || correct < 0)
        throw Error("HMI counts must be non-negative");
    long total = incorrect + partially_correct + correct;
    if (total == 0) throw Error("HMI needs at least one counted action");
    double hmi = 100.0 * (0.5 * static_cast<double>(partially_correct) +
                          static_cast<double>(correct)) /
                 static_cast<double>(total);
    if (!core_idea_present) hmi -= 20.0;  // deduction applies last
    return std::max(0.0, hmi);
}

HmiAudit make_hmi_audit(long incorrect, long partially_correct, long correct,
                        bool core_idea_present) {
    HmiAudit audit;
    audit.incorrect = incorrect;
    audit.partially_correct = partially_correct;
    audit.correct = correct;
    audit.total_actions = incorrect + partially_correct + correct;
    audit.core_idea_present = core_idea_present;
    audit.hmi_percent = compute_hmi(incorrect, partially_correct, correct, core_idea_present);
    return audit;
}

MechanismAudit compute_mechanism_scores(const std::vector<MechanismFlags>& flags) {
    if (flags.empty()) throw Error("mechanism audit needs at least one flagged mechanism");
    MechanismAudit audit;
    audit.flags = flags;
    long label_ok = 0, mech_ok = 0, both_ok = 0;
    for (const auto& f : flags) {
        if (f.label_correct) ++label_ok;
        if (f.mechanistic_correct) ++mech_ok;
        if (f.label_correct && f.mechanistic_correct) ++both_ok;
    }
    double n = static_cast<double>(flags.size());
    audit.labeling_accuracy = label_ok / n;
    audit.mechanistic_accuracy = mech_ok / n;
    audit.fidelity = both_ok / n;
    return audit;
}

std::optional<double> f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return std::nullopt;
    return 2.0 * precision * recall / (precision + recall);
}

double round_half_up(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

ConfusionMetrics confusion_metrics(long tp, long fp, long fn, long tn) {
    if (tp < 0 || fp < 0 || fn < 0 || tn < 0) throw Error("confusion counts must be >= 0");
    long total = tp + fp + fn + tn;
    if (total == 0) throw Error("confusion matrix needs at least one item");

    ConfusionMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.precision && m.recall) m.f1 = f1_score(*m.precision, *m.recall);
    return m;
}

ConfusionMetrics compare_with_human(const std::vector<std::pair<int, std::string>>& model,
                                    const std::vector<std::pair<int, std::string>>& human,
                                    const std::string& positive_label) {
    std::map<int, std::string> model_by_id(model.begin(), model.end());
    std::map<int, std::string> human_by_id(human.begin(), human.end());

    std::vector<int> missing;
    for (const auto& [id, _] : human_by_id)
        if (!model_by_id.count(id)) missing.push_back(id);
    for (const auto& [id, _] : model_by_id)
        if (!human_by_id.count(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        std::vector<std::string> parts;
        for (int id : missing) parts.push_back(std::to_string(id));
        throw Error("model/human label sets misaligned; unmatched ids: " + join(parts, ", "));
    }

    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& [id, truth] : human_by_id) {
        bool truth_pos = truth == positive_label;
        bool model_pos = model_by_id.at(id) == positive_label;
        if (truth_pos && model_pos) ++tp;
        else if (!truth_pos && model_pos) ++fp;
        else if (truth_pos && !model_pos) ++fn;
        else ++tn;
    }
    return confusion_metrics(tp, fp, fn, tn);
}

}  // namespace hypoforge
