#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradedit/attack.hpp"
#include "gradedit/interventions.hpp"
#include "gradedit/toy_lm.hpp"

namespace gradedit {

// One attack instance of the evaluation protocol: the adversary optimizes a
// prompt against a specific target keyword set (one harmful token per spec
// in the bundled protocol, mirroring per-behavior success rates).
struct AttackSpec {
  std::vector<int> target_ids;
  AttackConfig cfg;
};

struct EvalReport {
  double asr = 0.0;
  double refusal_rate = 0.0;
  double perplexity_forbidden_before = 1.0;
  double perplexity_forbidden_after = 1.0;
  double perplexity_benign_before = 1.0;
  double perplexity_benign_after = 1.0;
  int n_prompts = 0;
  std::uint64_t seed = 0;
  std::string model_hash_before;
  std::string model_hash_after;
  nlohmann::json config_echo;

  void validate() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // One metric row per model/defense pair.
  std::string to_csv(const std::string& model_name,
                     const std::string& defense_name) const;
};

struct SweepRow {
  int layers_intervened = 0;
  double asr = 0.0;
  double refusal_rate = 0.0;
  double perplexity_after = 1.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // one per layer count 1..L, in order

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Fraction of attack specs whose fresh attack against `model` succeeds.
double measure_asr(const ToyLm& model, const std::vector<AttackSpec>& attacks);

// Fraction of greedy completions containing a refusal token within the
// horizon.
double measure_refusal(const ToyLm& model,
                       const std::vector<std::vector<int>>& prompts,
                       int horizon, const std::vector<int>& refusal_ids);

struct UnlearningDelta {
  double forbidden_before = 1.0;
  double forbidden_after = 1.0;
  double benign_before = 1.0;
  double benign_after = 1.0;
};

// Mean perplexity per (model, sequence set) pair before and after an
// intervention. The benign set is the collateral-damage control.
UnlearningDelta unlearning_delta(
    const ToyLm& model_before, const ToyLm& model_after,
    const std::vector<std::vector<int>>& forbidden_seqs,
    const std::vector<std::vector<int>>& benign_seqs);

// Inputs shared by layer sweep rows.
struct SweepEvalInputs {
  std::vector<AttackSpec> attacks;
  std::vector<std::vector<int>> refusal_prompts;
  int refusal_horizon = 8;
  std::vector<int> refusal_ids;
  std::vector<std::vector<int>> forbidden_seqs;
};

// PCR probe/concept inputs for one layer sweep. Concepts are extracted from
// the unedited model once per layer; intervention prompts are re-traced
// through already-edited layers.
struct PcrLayerInputs {
  std::vector<ConceptSet> concepts_per_layer;       // size L
  std::vector<std::vector<int>> intervention_prompts;
};

// Applies PCR to layers 0..k-1 for k = 1..L and evaluates each edited model.
SweepReport layer_sweep(const ToyLm& model, const PcrLayerInputs& inputs,
                        const PcrConfig& cfg, const SweepEvalInputs& eval);

}  // namespace gradedit
