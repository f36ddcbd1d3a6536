#include "doctest.h"

#include "gradedit/eval.hpp"
#include "gradedit/pipeline.hpp"
#include "instance_gen.hpp"

using namespace gradedit;
using gradedit_test::random_small_model;

namespace {

// A model whose first generated token is always `id`.
ToyLm always_emits(std::uint64_t seed, int id) {
  ToyLm model = random_small_model(seed);
  model.unembed.setZero();
  model.unembed.row(id).setConstant(1.0);
  model.embed = model.embed.cwiseAbs();
  for (Mat& w : model.layers) w = w.cwiseAbs();
  return model;
}

}  // namespace

TEST_CASE("measure_asr counts per-spec successes") {
  const ToyLm harmful_model = always_emits(301, 2);
  AttackConfig cfg;
  cfg.steps = 2;
  cfg.step_size = 0.1;
  cfg.positions = harmful_model.context_window;
  cfg.horizon = 1;

  std::vector<AttackSpec> specs;
  // Token 2 is always emitted; token 3 never is.
  specs.push_back({{2}, cfg});
  CHECK(measure_asr(harmful_model, specs) == doctest::Approx(1.0));

  specs.push_back({{3}, cfg});
  CHECK(measure_asr(harmful_model, specs) == doctest::Approx(0.5));

  specs.push_back({{3}, cfg});
  specs.push_back({{3}, cfg});
  CHECK(measure_asr(harmful_model, specs) == doctest::Approx(0.25));

  CHECK_THROWS_AS(measure_asr(harmful_model, {}), DataError);
}

TEST_CASE("measure_refusal counts completions containing refusal tokens") {
  const ToyLm refusing = always_emits(303, 0);  // id 0 is a refusal token
  const std::vector<std::vector<int>> prompts = {{1, 2}, {3, 4}};
  CHECK(measure_refusal(refusing, prompts, 4, refusing.vocab.refusal_ids) ==
        doctest::Approx(1.0));

  const ToyLm harmful = always_emits(305, 2);  // never refuses
  CHECK(measure_refusal(harmful, prompts, 4, harmful.vocab.refusal_ids) ==
        doctest::Approx(0.0));

  const ToyLm model = random_small_model(307);
  const double a = measure_refusal(model, prompts, 6, model.vocab.refusal_ids);
  const double b = measure_refusal(model, prompts, 6, model.vocab.refusal_ids);
  CHECK(a == b);

  CHECK_THROWS_AS(measure_refusal(model, prompts, 4, {}), ParamError);
  CHECK_THROWS_AS(measure_refusal(model, {}, 4, model.vocab.refusal_ids),
                  DataError);
}

TEST_CASE("unlearning_delta on identical models is a perfect zero delta") {
  const ToyLm model = random_small_model(311);
  const std::vector<std::vector<int>> forbidden = {{0, 1, 2, 3, 4}};
  const std::vector<std::vector<int>> benign = {{5, 6, 7, 0, 1}};
  const UnlearningDelta d = unlearning_delta(model, model, forbidden, benign);
  CHECK(d.forbidden_before == d.forbidden_after);
  CHECK(d.benign_before == d.benign_after);
}

TEST_CASE("eval report serialization round-trips") {
  EvalReport report;
  report.asr = 0.25;
  report.refusal_rate = 0.75;
  report.perplexity_forbidden_before = 7.5;
  report.perplexity_forbidden_after = 12.25;
  report.perplexity_benign_before = 6.0;
  report.perplexity_benign_after = 6.125;
  report.n_prompts = 6;
  report.seed = 7;
  report.model_hash_before = "abc";
  report.model_hash_after = "def";
  report.config_echo = {{"k", 1}};
  report.validate();

  const EvalReport back = EvalReport::from_json(report.to_json());
  CHECK(back.to_json() == report.to_json());
  CHECK(back.asr == report.asr);
  CHECK(back.perplexity_forbidden_after == report.perplexity_forbidden_after);

  const std::string csv = report.to_csv("toy-lm", "pcr");
  CHECK(csv.find("toy-lm,pcr,0.25,0.75") != std::string::npos);

  EvalReport bad = report;
  bad.asr = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParamError);
}

TEST_CASE("layer_sweep emits one row per layer count") {
  const ToyLm model = random_small_model(313, 12, 4, 2, {8, 6});

  // Concepts: the pre-activations on one probe, per layer.
  std::vector<std::vector<int>> probes = {{1, 2}};
  PcrLayerInputs inputs;
  inputs.intervention_prompts = probes;
  for (int l = 0; l < model.num_layers(); ++l) {
    const ForwardTrace trace = forward(model, embed_prompt(model, probes[0]));
    ConceptSet set;
    set.layer = l;
    set.concepts = {trace.pre_activations[static_cast<std::size_t>(l)]};
    set.labels = {"probe"};
    inputs.concepts_per_layer.push_back(std::move(set));
  }

  PcrConfig cfg;
  cfg.margin = 0.5;

  SweepEvalInputs eval;
  AttackConfig acfg;
  acfg.steps = 3;
  acfg.step_size = 0.3;
  acfg.positions = model.context_window;
  acfg.horizon = 2;
  eval.attacks = {{{2}, acfg}, {{3}, acfg}};
  eval.refusal_prompts = {{1, 2}};
  eval.refusal_horizon = 2;
  eval.refusal_ids = model.vocab.refusal_ids;
  eval.forbidden_seqs = {{0, 1, 2, 3, 4}};

  const SweepReport report = layer_sweep(model, inputs, cfg, eval);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].layers_intervened == 1);
  CHECK(report.rows[1].layers_intervened == 2);
  for (const SweepRow& row : report.rows) {
    CHECK(row.asr >= 0.0);
    CHECK(row.asr <= 1.0);
    CHECK(row.refusal_rate >= 0.0);
    CHECK(row.refusal_rate <= 1.0);
    CHECK(row.perplexity_after >= 1.0);
  }

  const std::string csv = report.to_csv();
  CHECK(csv.find("layers_intervened") != std::string::npos);

  // Single-layer model: one row, equal to a direct evaluation.
  const ToyLm single = random_small_model(317, 12, 4, 2, {8});
  PcrLayerInputs single_inputs;
  single_inputs.intervention_prompts = probes;
  {
    const ForwardTrace trace =
        forward(single, embed_prompt(single, probes[0]));
    ConceptSet set;
    set.layer = 0;
    set.concepts = {trace.pre_activations[0]};
    set.labels = {"probe"};
    single_inputs.concepts_per_layer.push_back(std::move(set));
  }
  const SweepReport single_report =
      layer_sweep(single, single_inputs, cfg, eval);
  CHECK(single_report.rows.size() == 1);
}

TEST_CASE("split_forbidden_benign partitions by harmful token membership") {
  Vocab vocab;
  vocab.tokens = {"a", "b", "bomb", "c"};
  vocab.harmful_ids = {2};
  std::vector<std::vector<int>> corpus = {{0, 1, 2}, {0, 1, 3}, {2, 2, 2}};
  std::vector<std::vector<int>> forbidden;
  std::vector<std::vector<int>> benign;
  split_forbidden_benign(corpus, vocab, &forbidden, &benign);
  CHECK(forbidden.size() == 2);
  CHECK(benign.size() == 1);
  CHECK(benign[0] == std::vector<int>{0, 1, 3});
}
