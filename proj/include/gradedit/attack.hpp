#pragma once

#include <cstdint>
#include <vector>

#include "gradedit/losses.hpp"
#include "gradedit/relaxed_prompt.hpp"
#include "gradedit/toy_lm.hpp"

namespace gradedit {

struct AttackConfig {
  int steps = 150;
  double step_size = 0.5;
  int positions = 4;  // must equal the model context window
  int horizon = 8;    // generated tokens inspected for success
  std::uint64_t seed = 0;

  void validate() const;
};

struct AttackResult {
  std::vector<int> prompt_ids;     // discretized final prompt
  RelaxedPrompt relaxed;           // final relaxed prompt
  double final_loss = 0.0;
  std::vector<double> loss_curve;  // steps + 1 entries
  bool success = false;
};

// Projected gradient descent over a relaxed prompt minimizing the harmful
// loss, with per-row simplex projection and a halving backtracking line
// search, so the recorded loss curve is non-increasing. Shared by the
// stand-alone attack and the inner loop of the ARR intervention.
struct PgdPromptResult {
  RelaxedPrompt prompt;
  std::vector<double> loss_curve;
};
PgdPromptResult pgd_prompt_minimize(const ToyLm& model,
                                    const std::vector<int>& keyword_ids,
                                    const RelaxedPrompt& init, int steps,
                                    double step_size);

// Simplex-relaxation jailbreak: starts from the uniform relaxed prompt and
// descends the harmful loss restricted to the given keyword set, then
// discretizes and checks greedy-decoding success.
AttackResult attack(const ToyLm& model, const std::vector<int>& k_harmful,
                    const AttackConfig& cfg);

// Per-position argmax, ties to the lowest index.
std::vector<int> discretize(const RelaxedPrompt& relaxed);

// True iff the greedy completion of the prompt contains any token of
// k_harmful within the horizon.
bool attack_success(const ToyLm& model, const std::vector<int>& prompt_ids,
                    const std::vector<int>& k_harmful, int horizon);

}  // namespace gradedit
