#include "hypoforge/evaluation.hpp"
#include "hypoforge/metrics.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypoforge;

namespace {

Hypothesis make_hypothesis(int id, const std::string& text) {
    Hypothesis h;
    h.hypothesis_id = id;
    h.pair.pair_id = 1;
    h.pair.a = {1, 0};
    h.pair.b = {4, 0};
    h.text = text;
    return h;
}

struct Harness {
    test::TempDir tmp;
    Gateway gateway;
    ScriptedBackend backend;
    StageProfile profile =
        build_profile(Stage::Evaluation, alloy_domain_profile(), ProfileConfig{});

    Harness() : gateway([&] {
        GatewayConfig cfg;
        cfg.backoff_base_ms = 0;
        cfg.cache_dir = tmp.path / "cache";
        return cfg;
    }()) {}
};

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("classify_synergy threshold law, exhaustive") {
    CHECK(classify_synergy(1) == SynergyLabel::Additive);
    CHECK(classify_synergy(2) == SynergyLabel::Additive);
    CHECK(classify_synergy(3) == SynergyLabel::Additive);
    CHECK(classify_synergy(4) == SynergyLabel::Synergistic);
    CHECK(classify_synergy(5) == SynergyLabel::Synergistic);
    CHECK_THROWS_AS(classify_synergy(0), Error);
    CHECK_THROWS_AS(classify_synergy(6), Error);
}

TEST_CASE("parse_synergy_reply: strict Score line") {
    auto eval = parse_synergy_reply("Score: 4\nInterdependence:\n- \"Precipitate resistance "
                                    "favors twinning as an alternative mechanism.\"\n"
                                    "Core structures: precipitates; twins\n",
                                    29);
    REQUIRE(eval.has_value());
    CHECK(eval->score == 4);
    CHECK(eval->label == SynergyLabel::Synergistic);
    REQUIRE(eval->interdependence_sentences.size() == 1);
    CHECK(eval->interdependence_sentences[0] ==
          "Precipitate resistance favors twinning as an alternative mechanism.");
    CHECK(eval->core_structures == std::vector<std::string>{"precipitates", "twins"});

    // additive: no sentences required
    auto additive = parse_synergy_reply("Score: 2\nCore structures: a\n", 189);
    REQUIRE(additive.has_value());
    CHECK(additive->label == SynergyLabel::Additive);

    CHECK(!parse_synergy_reply("Score: 6\n", 1).has_value());
    CHECK(!parse_synergy_reply("Score: maybe\n", 1).has_value());
    CHECK(!parse_synergy_reply("no score at all", 1).has_value());
    // synergistic without evidence sentences violates the invariant
    CHECK(!parse_synergy_reply("Score: 5\nCore structures: a\n", 1).has_value());
}

TEST_CASE("evaluate_synergy over the scripted backend") {
    Harness h;
    h.backend.add_rule({"syn",
                        {"synergistic or additive", "Hypothesis 29"},
                        "Score: 5\nInterdependence:\n- \"resistance to dislocation movement "
                        "due to precipitates favors twinning\"\nCore structures: precipitates\n",
                        FinishReason::Complete, 0, 0});
    auto eval = evaluate_synergy(make_hypothesis(29, "precipitates + twinning"), h.profile,
                                 h.gateway, h.backend);
    REQUIRE(eval.has_value());
    CHECK(eval->label == SynergyLabel::Synergistic);
}

TEST_CASE("unparseable synergy reply twice flags the hypothesis unevaluated") {
    Harness h;
    h.backend.add_rule({"junk", {"synergistic or additive"}, "I cannot score this.",
                        FinishReason::Complete, 0, 0});
    auto eval = evaluate_synergy(make_hypothesis(1, "text"), h.profile, h.gateway, h.backend);
    CHECK(!eval.has_value());
    CHECK(h.backend.calls() == 2);  // one reprompt, then excluded
}

TEST_CASE("parse_grounding_reply") {
    auto strong = parse_grounding_reply("Label: Strong\nRationale: cites cryogenic twinning.\n", 1);
    REQUIRE(strong.has_value());
    CHECK(strong->label == GroundingLabel::Strong);
    CHECK(strong->rationale == "cites cryogenic twinning.");

    auto weak = parse_grounding_reply("Label: Weak\nRationale: no cryogenic specificity\n", 2);
    REQUIRE(weak.has_value());
    CHECK(weak->label == GroundingLabel::Weak);

    CHECK(!parse_grounding_reply("Label: Medium\n", 1).has_value());
    CHECK(!parse_grounding_reply("no label", 1).has_value());
}

TEST_CASE("evaluate_grounding embeds the domain criterion") {
    Harness h;
    // the criterion text comes from the domain profile
    h.backend.add_rule({"grd",
                        {"cryogenic", "scientific grounding"},
                        "Label: Strong\nRationale: uses cryogenic-specific twinning activation.",
                        FinishReason::Complete, 0, 0});
    auto eval = evaluate_grounding(make_hypothesis(1, "cryo twinning"), alloy_domain_profile(),
                                   h.profile, h.gateway, h.backend);
    REQUIRE(eval.has_value());
    CHECK(eval->label == GroundingLabel::Strong);
}

TEST_CASE("compute_hmi fixed points") {
    CHECK(compute_hmi(0, 0, 10, true) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(compute_hmi(1, 2, 7, true) == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(compute_hmi(1, 2, 7, false) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(compute_hmi(10, 0, 0, false) == 0.0);  // floored at zero
    CHECK(compute_hmi(9, 2, 0, false) == 0.0);   // 10% - 20 floors at 0
    CHECK_THROWS_AS(compute_hmi(0, 0, 0, true), Error);
}

TEST_CASE("compute_hmi properties: scaling invariance, monotone in C") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 1000; ++iter) {
        long i = rng() % 20, pc = rng() % 20, c = rng() % 20;
        if (i + pc + c == 0) c = 1;
        bool core = rng() % 2;
        long k = 1 + rng() % 9;
        double base = compute_hmi(i, pc, c, core);
        double scaled = compute_hmi(i * k, pc * k, c * k, core);
        CHECK(base == doctest::Approx(scaled).epsilon(1e-9));
        // swapping an incorrect action for a correct one never lowers HMI
        if (i > 0) CHECK(compute_hmi(i - 1, pc, c + 1, core) >= base);
    }
}

TEST_CASE("mechanism scores") {
    std::vector<MechanismFlags> flags;
    for (int i = 0; i < 10; ++i)
        flags.push_back({i < 9, i < 8});  // 9 label-correct, 8 mech-correct, 8 both
    MechanismAudit audit = compute_mechanism_scores(flags);
    CHECK(audit.labeling_accuracy == doctest::Approx(0.9));
    CHECK(audit.mechanistic_accuracy == doctest::Approx(0.8));
    CHECK(audit.fidelity == doctest::Approx(0.8));

    MechanismAudit perfect = compute_mechanism_scores({{true, true}, {true, true}});
    CHECK(perfect.fidelity == 1.0);

    // disjoint flags: fidelity zero
    MechanismAudit disjoint = compute_mechanism_scores({{true, false}, {false, true}});
    CHECK(disjoint.fidelity == 0.0);

    CHECK_THROWS_AS(compute_mechanism_scores({}), Error);
}

TEST_CASE("fidelity bounded by both accuracies, random flags") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<MechanismFlags> flags;
        size_t n = 1 + rng() % 30;
        for (size_t i = 0; i < n; ++i)
            flags.push_back({(rng() % 2) == 0, (rng() % 2) == 0});
        MechanismAudit a = compute_mechanism_scores(flags);
        CHECK(a.fidelity <= std::min(a.labeling_accuracy, a.mechanistic_accuracy) + 1e-12);
    }
}

TEST_CASE("confusion metrics fixed point") {
    ConfusionMetrics m = confusion_metrics(5, 1, 2, 2);
    CHECK(*m.accuracy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*m.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(*m.recall == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
    CHECK(*m.f1 == doctest::Approx(10.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("zero denominators are absent, not zero") {
    ConfusionMetrics no_pos = confusion_metrics(0, 0, 0, 5);
    CHECK(!no_pos.precision.has_value());
    CHECK(!no_pos.recall.has_value());
    CHECK(!no_pos.f1.has_value());
    CHECK(*no_pos.accuracy == 1.0);
}

TEST_CASE("reference precision/recall pairs reproduce the two-decimal F1") {
    // synergy: precision 0.70, recall 0.83 -> F1 0.76
    auto f1_synergy = f1_score(0.70, 0.83);
    REQUIRE(f1_synergy.has_value());
    CHECK(round_half_up(*f1_synergy, 2) == doctest::Approx(0.76));
    // grounding: precision 0.96, recall 0.82 -> F1 0.88
    auto f1_grounding = f1_score(0.96, 0.82);
    REQUIRE(f1_grounding.has_value());
    CHECK(round_half_up(*f1_grounding, 2) == doctest::Approx(0.88));
}

TEST_CASE("f1 is the harmonic mean whenever defined") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 500; ++iter) {
        long tp = rng() % 50, fp = rng() % 50, fn = rng() % 50, tn = rng() % 50;
        if (tp + fp + fn + tn == 0) tn = 1;
        ConfusionMetrics m = confusion_metrics(tp, fp, fn, tn);
        if (m.precision && m.recall && (*m.precision + *m.recall) > 0) {
            REQUIRE(m.f1.has_value());
            double harmonic = 2.0 * (*m.precision) * (*m.recall) / (*m.precision + *m.recall);
            CHECK(std::abs(*m.f1 - harmonic) < 1e-12);
        }
    }
}

TEST_CASE("compare_with_human") {
    std::vector<std::pair<int, std::string>> human, model;
    for (int i = 1; i <= 10; ++i) {
        human.emplace_back(i, i <= 5 ? "Synergistic" : "Additive");
        model.emplace_back(i, "Synergistic");  // model says positive everywhere
    }
    ConfusionMetrics m = compare_with_human(model, human, "Synergistic");
    CHECK(*m.recall == doctest::Approx(1.0));
    CHECK(*m.precision == doctest::Approx(0.5));

    ConfusionMetrics agree = compare_with_human(human, human, "Synergistic");
    CHECK(*agree.accuracy == doctest::Approx(1.0));

    model.emplace_back(11, "Additive");  // id the human set lacks
    CHECK_THROWS_WITH_AS(compare_with_human(model, human, "Synergistic"),
                         doctest::Contains("11"), Error);
}

TEST_CASE("evaluations jsonl round-trip, including unevaluated") {
    EvaluationRecord evaluated;
    evaluated.hypothesis_id = 1;
    SynergyEvaluation s;
    s.hypothesis_id = 1;
    s.score = 4;
    s.label = SynergyLabel::Synergistic;
    s.interdependence_sentences = {"a sentence"};
    s.core_structures = {"GDS"};
    evaluated.synergy = s;
    GroundingEvaluation g;
    g.hypothesis_id = 1;
    g.label = GroundingLabel::Strong;
    g.rationale = "why";
    evaluated.grounding = g;

    EvaluationRecord unevaluated;
    unevaluated.hypothesis_id = 2;

    auto back = evaluations_from_jsonl(evaluations_to_jsonl({evaluated, unevaluated}));
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].synergy.has_value());
    CHECK(back[0].synergy->score == 4);
    CHECK(back[0].synergy->interdependence_sentences ==
          std::vector<std::string>{"a sentence"});
    CHECK(back[0].grounding->label == GroundingLabel::Strong);
    CHECK(!back[1].synergy.has_value());
    CHECK(!back[1].grounding.has_value());
}

}  // TEST_SUITE
