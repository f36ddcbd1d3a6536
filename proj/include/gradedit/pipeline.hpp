#pragma once

#include <cstdint>
#include <vector>

#include "gradedit/attack.hpp"
#include "gradedit/eval.hpp"
#include "gradedit/interventions.hpp"
#include "gradedit/toy_lm.hpp"

namespace gradedit {

// Shared experiment machinery used by the CLI commands and the integration
// suites: probe mining, the per-prompt sequential PCR defense, and the
// per-harmful-token attack protocol.

// All distinct corpus windows whose greedy next token under `model` is the
// given forbidden token, in corpus order, capped per token.
std::vector<std::vector<int>> mine_probe_contexts(
    const ToyLm& model, const std::vector<std::vector<int>>& corpus_ids,
    int forbidden_id, int max_probes);

struct PcrPipelineConfig {
  PcrConfig solver;
  int layers = 0;          // how many layers to edit (1..L); 0 means all
  int passes = 1;          // sweeps over the intervention prompts
  int max_probes_per_token = 4;
};

struct PcrDefense {
  Intervention intervention;
  ToyLm edited;
  bool converged = true;  // false if any pcr_multi call hit K_max
  int total_iterations = 0;
  std::vector<std::vector<int>> probes;  // intervention prompts used
  std::vector<int> uncovered_ids;
};

// The bundled PCR defense: concepts are extracted per layer from the unedited
// model; then, per pass and per intervention prompt, layers are edited from
// the bottom up with pcr_multi, each call using the prompt's activation
// re-traced through the already-edited lower layers.
PcrDefense run_pcr_defense(const ToyLm& model,
                           const std::vector<std::vector<int>>& corpus_ids,
                           const PcrPipelineConfig& cfg);

// One attack spec per harmful token: per-behavior success, in aggregate the
// attack success rate.
std::vector<AttackSpec> per_token_attack_specs(const Vocab& vocab,
                                               const AttackConfig& cfg);

// Discretized prompts found by fresh attacks against `model`, one per spec.
std::vector<std::vector<int>> attack_prompts(
    const ToyLm& model, const std::vector<AttackSpec>& specs);

// Sequences whose windows contain a harmful token (forbidden) vs none
// (benign), for the unlearning perplexity deltas.
void split_forbidden_benign(const std::vector<std::vector<int>>& corpus_ids,
                            const Vocab& vocab,
                            std::vector<std::vector<int>>* forbidden,
                            std::vector<std::vector<int>>* benign);

}  // namespace gradedit
