#include "gradedit/attack.hpp"

#include <algorithm>

namespace gradedit {

void AttackConfig::validate() const {
  if (steps < 1) throw ParamError("attack: steps must be at least 1");
  if (!(step_size >= 0.0)) throw ParamError("attack: step size must be >= 0");
  if (positions < 1) throw ParamError("attack: positions must be at least 1");
  if (horizon < 1) throw ParamError("attack: horizon must be at least 1");
}

PgdPromptResult pgd_prompt_minimize(const ToyLm& model,
                                    const std::vector<int>& keyword_ids,
                                    const RelaxedPrompt& init, int steps,
                                    double step_size) {
  init.validate();
  PgdPromptResult out;
  out.prompt = init;

  auto loss_of = [&](const Mat& dist) {
    return keyword_loss_on_dist(model, dist, keyword_ids, LossKind::kHarmful);
  };

  double current = loss_of(out.prompt.dist);
  out.loss_curve.push_back(current);

  for (int step = 0; step < steps; ++step) {
    const Mat grad = keyword_loss_dist_grad(model, out.prompt.dist,
                                            keyword_ids, LossKind::kHarmful);
    // Halving backtracking keeps the curve non-increasing without tuning.
    double eta = step_size;
    Mat candidate = out.prompt.dist;
    double cand_loss = current;
    for (int halving = 0; halving < 24; ++halving) {
      Mat trial = out.prompt.dist - eta * grad;
      for (Eigen::Index p = 0; p < trial.rows(); ++p) {
        trial.row(p) = simplex_project(trial.row(p).transpose()).transpose();
      }
      const double trial_loss = loss_of(trial);
      if (trial_loss <= current) {
        candidate = std::move(trial);
        cand_loss = trial_loss;
        break;
      }
      eta *= 0.5;
    }
    out.prompt.dist = std::move(candidate);
    current = cand_loss;
    out.loss_curve.push_back(current);
#ifndef NDEBUG
    out.prompt.validate();  // every iterate stays row-stochastic
#endif
  }
  return out;
}

AttackResult attack(const ToyLm& model, const std::vector<int>& k_harmful,
                    const AttackConfig& cfg) {
  cfg.validate();
  if (cfg.positions != model.context_window) {
    throw ShapeError("attack: positions must equal the context window");
  }

  const RelaxedPrompt init =
      RelaxedPrompt::uniform(cfg.positions, model.vocab_size());
  PgdPromptResult pgd = pgd_prompt_minimize(model, k_harmful, init, cfg.steps,
                                            cfg.step_size);

  AttackResult result;
  result.relaxed = std::move(pgd.prompt);
  result.loss_curve = std::move(pgd.loss_curve);
  result.final_loss = result.loss_curve.back();
  result.prompt_ids = discretize(result.relaxed);
  result.success =
      attack_success(model, result.prompt_ids, k_harmful, cfg.horizon);
  return result;
}

std::vector<int> discretize(const RelaxedPrompt& relaxed) {
  relaxed.validate();
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(relaxed.positions()));
  for (Eigen::Index p = 0; p < relaxed.dist.rows(); ++p) {
    int best = 0;
    for (Eigen::Index v = 1; v < relaxed.dist.cols(); ++v) {
      if (relaxed.dist(p, v) > relaxed.dist(p, best)) {
        best = static_cast<int>(v);
      }
    }
    ids.push_back(best);
  }
  return ids;
}

bool attack_success(const ToyLm& model, const std::vector<int>& prompt_ids,
                    const std::vector<int>& k_harmful, int horizon) {
  if (horizon < 1) throw ParamError("attack_success: horizon must be >= 1");
  if (k_harmful.empty()) return false;
  const std::vector<int> completion = greedy_decode(model, prompt_ids, horizon);
  for (int id : completion) {
    if (std::binary_search(k_harmful.begin(), k_harmful.end(), id)) {
      return true;
    }
  }
  return false;
}

}  // namespace gradedit
