#pragma once

#include <vector>

#include "gradedit/toy_lm.hpp"

namespace gradedit {

// Keyword-mass losses: -log of the total probability assigned to a token
// subset, floored at tol::kProbFloor. The safety variant targets refusal
// keywords, the harmful variant targets harmful-continuation keywords; the
// math is identical, so both share one implementation.

struct LossValueGrad {
  double value = 0.0;
  Vec grad_logits;  // analytic gradient through the softmax
};

double keyword_mass(const Vec& probs, const std::vector<int>& keyword_ids);

LossValueGrad safety_loss(const Vec& probs,
                          const std::vector<int>& k_safety);
LossValueGrad harmful_loss(const Vec& probs,
                           const std::vector<int>& k_harmful);

enum class LossKind { kSafety, kHarmful };

// Loss of the model on a discrete prompt window.
double keyword_loss_on_prompt(const ToyLm& model,
                              const std::vector<int>& prompt_ids,
                              const std::vector<int>& keyword_ids,
                              LossKind kind);

// Loss on a raw positions x V prompt distribution (no stochasticity check,
// so finite-difference probes can step off the simplex).
double keyword_loss_on_dist(const ToyLm& model, const Mat& dist,
                            const std::vector<int>& keyword_ids,
                            LossKind kind);

// Gradient of the keyword loss with respect to every layer matrix for a
// discrete prompt.
LayerGradients keyword_loss_layer_grads(const ToyLm& model,
                                        const std::vector<int>& prompt_ids,
                                        const std::vector<int>& keyword_ids,
                                        LossKind kind);

// Gradient of the keyword loss with respect to the prompt distribution
// (positions x V), holding the model fixed.
Mat keyword_loss_dist_grad(const ToyLm& model, const Mat& dist,
                           const std::vector<int>& keyword_ids,
                           LossKind kind);

}  // namespace gradedit
