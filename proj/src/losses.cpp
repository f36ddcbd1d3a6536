#include "gradedit/losses.hpp"

#include <cmath>

namespace gradedit {

namespace {

void check_keywords(const Vec& probs, const std::vector<int>& keyword_ids) {
  if (keyword_ids.empty()) {
    throw ParamError("keyword loss: empty keyword set");
  }
  for (int k : keyword_ids) {
    if (k < 0 || k >= probs.size()) {
      throw VocabError("keyword loss: keyword id out of range");
    }
  }
}

// -log(max(mass, floor)) and its gradient through the softmax. With
// z the logits, p = softmax(z) and m = sum_{k in K} p_k:
//   d/dz_j (-log m) = p_j - p_j 1[j in K] / m.
// The floor only clamps the denominator, so the gradient stays informative
// when the keyword mass underflows.
LossValueGrad keyword_loss(const Vec& probs,
                           const std::vector<int>& keyword_ids) {
  check_keywords(probs, keyword_ids);
  double mass = 0.0;
  for (int k : keyword_ids) mass += probs(k);

  LossValueGrad out;
  const double clamped = std::max(mass, tol::kProbFloor);
  out.value = -std::log(clamped);
  out.grad_logits = probs;
  for (int k : keyword_ids) {
    out.grad_logits(k) -= probs(k) / clamped;
  }
  return out;
}

}  // namespace

double keyword_mass(const Vec& probs, const std::vector<int>& keyword_ids) {
  check_keywords(probs, keyword_ids);
  double mass = 0.0;
  for (int k : keyword_ids) mass += probs(k);
  return mass;
}

LossValueGrad safety_loss(const Vec& probs, const std::vector<int>& k_safety) {
  return keyword_loss(probs, k_safety);
}

LossValueGrad harmful_loss(const Vec& probs,
                           const std::vector<int>& k_harmful) {
  return keyword_loss(probs, k_harmful);
}

double keyword_loss_on_prompt(const ToyLm& model,
                              const std::vector<int>& prompt_ids,
                              const std::vector<int>& keyword_ids,
                              LossKind kind) {
  const ForwardTrace trace = forward(model, embed_prompt(model, prompt_ids));
  return kind == LossKind::kSafety
             ? safety_loss(trace.probs, keyword_ids).value
             : harmful_loss(trace.probs, keyword_ids).value;
}

double keyword_loss_on_dist(const ToyLm& model, const Mat& dist,
                            const std::vector<int>& keyword_ids,
                            LossKind kind) {
  const ForwardTrace trace =
      forward(model, embed_distribution_rows(model, dist));
  return kind == LossKind::kSafety
             ? safety_loss(trace.probs, keyword_ids).value
             : harmful_loss(trace.probs, keyword_ids).value;
}

LayerGradients keyword_loss_layer_grads(const ToyLm& model,
                                        const std::vector<int>& prompt_ids,
                                        const std::vector<int>& keyword_ids,
                                        LossKind kind) {
  const Vec x = embed_prompt(model, prompt_ids);
  const ForwardTrace trace = forward(model, x);
  const LossValueGrad loss = kind == LossKind::kSafety
                                 ? safety_loss(trace.probs, keyword_ids)
                                 : harmful_loss(trace.probs, keyword_ids);
  return backprop(model, x, trace, loss.grad_logits);
}

Mat keyword_loss_dist_grad(const ToyLm& model, const Mat& dist,
                           const std::vector<int>& keyword_ids,
                           LossKind kind) {
  const Vec x = embed_distribution_rows(model, dist);
  const ForwardTrace trace = forward(model, x);
  const LossValueGrad loss = kind == LossKind::kSafety
                                 ? safety_loss(trace.probs, keyword_ids)
                                 : harmful_loss(trace.probs, keyword_ids);
  const LayerGradients g = backprop(model, x, trace, loss.grad_logits);

  // d loss / d dist[p, v] = embed.row(v) . d loss / d x_p
  const int d = model.embed_dim();
  Mat grad(dist.rows(), dist.cols());
  for (Eigen::Index p = 0; p < dist.rows(); ++p) {
    grad.row(p) =
        (model.embed * g.input.segment(static_cast<int>(p) * d, d)).transpose();
  }
  return grad;
}

}  // namespace gradedit
