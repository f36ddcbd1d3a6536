#include "gradedit/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "gradedit/attack.hpp"
#include "gradedit/rng.hpp"

namespace gradedit {

void ConceptSet::validate(int expected_dim) const {
  if (concepts.empty()) {
    throw DataError("concept set: empty");
  }
  if (labels.size() != concepts.size()) {
    throw ShapeError("concept set: one label per concept required");
  }
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() != labels.size()) {
    throw ShapeError("concept set: labels must be unique");
  }
  for (const Vec& c : concepts) {
    if (c.size() != expected_dim) {
      throw ShapeError("concept set: concept dimension mismatch");
    }
  }
}

void PcrConfig::validate() const {
  if (!(margin > 0.0)) throw ParamError("pcr: margin must be positive");
  if (!(damping > 0.0) || damping > 1.0) {
    throw ParamError("pcr: damping must be in (0, 1]");
  }
  if (max_iters < 1) throw ParamError("pcr: max_iters must be at least 1");
  if (slack_tol < 0.0) throw ParamError("pcr: slack_tol must be nonnegative");
}

void TsrConfig::validate() const {
  if (!(budget > 0.0)) throw ParamError("tsr: budget must be positive");
  if (!(step_size >= 0.0)) throw ParamError("tsr: step size must be >= 0");
  if (steps < 1) throw ParamError("tsr: steps must be at least 1");
}

void ArrConfig::validate() const {
  if (!(budget > 0.0)) throw ParamError("arr: budget must be positive");
  if (outer_steps < 1 || inner_steps < 1) {
    throw ParamError("arr: step counts must be at least 1");
  }
  if (!(outer_step_size > 0.0) || !(inner_step_size > 0.0)) {
    throw ParamError("arr: step sizes must be positive");
  }
  if (prompt_positions < 1) {
    throw ParamError("arr: prompt positions must be at least 1");
  }
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kTsr: return "tsr";
    case Strategy::kArr: return "arr";
    case Strategy::kPcr: return "pcr";
  }
  throw ParamError("unknown strategy tag");
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "tsr") return Strategy::kTsr;
  if (name == "arr") return Strategy::kArr;
  if (name == "pcr") return Strategy::kPcr;
  throw ParamError("unknown strategy: " + name);
}

double Intervention::total_norm() const {
  double sq = 0.0;
  for (const auto& [layer, delta] : deltas) {
    sq += delta.squaredNorm();
  }
  return std::sqrt(sq);
}

ToyLm apply_intervention(const ToyLm& model, const Intervention& iv) {
  ToyLm edited = model;
  for (const auto& [layer, delta] : iv.deltas) {
    if (layer < 0 || layer >= model.num_layers()) {
      throw IndexError("apply_intervention: layer index out of range");
    }
    Mat& w = edited.layers[static_cast<std::size_t>(layer)];
    if (delta.rows() != w.rows() || delta.cols() != w.cols()) {
      throw ShapeError("apply_intervention: delta shape mismatch");
    }
    w += delta;
  }
  return edited;
}

// --- TSR ---------------------------------------------------------------------

namespace {

std::vector<int> resolve_target_layers(const ToyLm& model,
                                       const std::vector<int>& requested) {
  std::vector<int> layers = requested;
  if (layers.empty()) {
    for (int l = 0; l < model.num_layers(); ++l) layers.push_back(l);
  }
  for (int l : layers) {
    if (l < 0 || l >= model.num_layers()) {
      throw IndexError("target layer index out of range");
    }
  }
  return layers;
}

// Scales the stacked per-layer deltas so their total Frobenius norm fits the
// budget.
void project_stacked(std::map<int, Mat>& deltas, double budget) {
  double sq = 0.0;
  for (const auto& [l, d] : deltas) sq += d.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > budget) {
    const double scale = budget / norm;
    for (auto& [l, d] : deltas) d *= scale;
  }
}

ToyLm with_deltas(const ToyLm& model, const std::map<int, Mat>& deltas) {
  ToyLm edited = model;
  for (const auto& [l, d] : deltas) {
    edited.layers[static_cast<std::size_t>(l)] += d;
  }
  return edited;
}

}  // namespace

Intervention tsr_intervene(const ToyLm& model,
                           const std::vector<std::vector<int>>& prompts,
                           const TsrConfig& cfg) {
  cfg.validate();
  if (prompts.empty()) {
    throw DataError("tsr_intervene: no prompts given");
  }
  if (model.vocab.refusal_ids.empty()) {
    throw ParamError("tsr_intervene: model has no safety keywords");
  }
  const std::vector<int> targets = resolve_target_layers(model, cfg.target_layers);

  std::map<int, Mat> deltas;
  for (int l : targets) {
    deltas[l] = Mat::Zero(model.layers[static_cast<std::size_t>(l)].rows(),
                          model.layers[static_cast<std::size_t>(l)].cols());
  }

  auto mean_loss = [&](const std::map<int, Mat>& ds) {
    const ToyLm edited = with_deltas(model, ds);
    double total = 0.0;
    for (const auto& p : prompts) {
      total += keyword_loss_on_prompt(edited, p, model.vocab.refusal_ids,
                                      LossKind::kSafety);
    }
    return total / static_cast<double>(prompts.size());
  };

  const double initial_loss = mean_loss(deltas);
  double best_loss = initial_loss;
  std::map<int, Mat> best = deltas;

  for (int step = 0; step < cfg.steps; ++step) {
    const ToyLm edited = with_deltas(model, deltas);
    std::map<int, Mat> grad;
    for (int l : targets) {
      grad[l] = Mat::Zero(deltas[l].rows(), deltas[l].cols());
    }
    for (const auto& p : prompts) {
      const LayerGradients g = keyword_loss_layer_grads(
          edited, p, model.vocab.refusal_ids, LossKind::kSafety);
      for (int l : targets) {
        grad[l] += g.layers[static_cast<std::size_t>(l)];
      }
    }
    for (int l : targets) {
      deltas[l] -= (cfg.step_size / static_cast<double>(prompts.size())) *
                   grad[l];
    }
    project_stacked(deltas, cfg.budget);

    const double loss = mean_loss(deltas);
    if (loss < best_loss) {
      best_loss = loss;
      best = deltas;
    }
  }

  Intervention iv;
  iv.strategy = Strategy::kTsr;
  iv.deltas = std::move(best);
  iv.config = {{"budget", cfg.budget},
               {"step_size", cfg.step_size},
               {"steps", cfg.steps},
               {"target_layers", targets},
               {"initial_loss", initial_loss},
               {"final_loss", best_loss}};
  return iv;
}

// --- ARR ---------------------------------------------------------------------

double arr_inner_worst_case(const ToyLm& model, const ArrConfig& cfg,
                            const std::vector<int>& k_harmful) {
  const RelaxedPrompt init =
      RelaxedPrompt::uniform(cfg.prompt_positions, model.vocab_size());
  const PgdPromptResult inner = pgd_prompt_minimize(
      model, k_harmful, init, cfg.inner_steps, cfg.inner_step_size);
  return inner.loss_curve.back();
}

Intervention arr_intervene(const ToyLm& model, const ArrConfig& cfg,
                           const std::vector<int>& k_harmful) {
  cfg.validate();
  if (cfg.prompt_positions != model.context_window) {
    throw ShapeError("arr_intervene: prompt positions must match the window");
  }
  if (k_harmful.empty()) {
    throw ParamError("arr_intervene: empty harmful keyword set");
  }

  std::map<int, Mat> deltas;
  for (int l = 0; l < model.num_layers(); ++l) {
    deltas[l] = Mat::Zero(model.layers[static_cast<std::size_t>(l)].rows(),
                          model.layers[static_cast<std::size_t>(l)].cols());
  }

  const RelaxedPrompt init =
      RelaxedPrompt::uniform(cfg.prompt_positions, model.vocab_size());

  // Worst-case loss of the current delta; also hands back the adversarial
  // prompt the outer ascent step differentiates at.
  auto inner_solve = [&](const std::map<int, Mat>& ds) {
    const ToyLm edited = with_deltas(model, ds);
    return pgd_prompt_minimize(edited, k_harmful, init, cfg.inner_steps,
                               cfg.inner_step_size);
  };

  PgdPromptResult inner = inner_solve(deltas);
  const double initial_worst_case = inner.loss_curve.back();
  double best_value = initial_worst_case;
  std::map<int, Mat> best = deltas;

  for (int step = 0; step < cfg.outer_steps; ++step) {
    // Ascent direction at the inner minimizer (Danskin-style subgradient).
    const ToyLm edited = with_deltas(model, deltas);
    const Vec x = embed_distribution_rows(edited, inner.prompt.dist);
    const ForwardTrace trace = forward(edited, x);
    const LossValueGrad loss = harmful_loss(trace.probs, k_harmful);
    const LayerGradients g = backprop(edited, x, trace, loss.grad_logits);

    for (auto& [l, d] : deltas) {
      d += cfg.outer_step_size * g.layers[static_cast<std::size_t>(l)];
    }
    project_stacked(deltas, cfg.budget);

    inner = inner_solve(deltas);
    const double value = inner.loss_curve.back();
    if (value > best_value) {
      best_value = value;
      best = deltas;
    }
  }

  Intervention iv;
  iv.strategy = Strategy::kArr;
  iv.deltas = std::move(best);
  iv.config = {{"budget", cfg.budget},
               {"outer_steps", cfg.outer_steps},
               {"inner_steps", cfg.inner_steps},
               {"outer_step_size", cfg.outer_step_size},
               {"inner_step_size", cfg.inner_step_size},
               {"prompt_positions", cfg.prompt_positions},
               {"initial_worst_case_loss", initial_worst_case},
               {"final_inner_loss", best_value}};
  return iv;
}

// --- Concept extraction --------------------------------------------------------

ConceptExtraction extract_concepts(
    const ToyLm& model, int layer, const std::vector<int>& forbidden_ids,
    const std::vector<std::vector<int>>& probe_contexts) {
  if (layer < 0 || layer >= model.num_layers()) {
    throw IndexError("extract_concepts: layer index out of range");
  }

  ConceptExtraction out;
  out.set.layer = layer;
  if (forbidden_ids.empty()) {
    return out;  // empty set; nothing to cover
  }

  std::map<int, Vec> sums;
  std::map<int, int> counts;
  for (const auto& probe : probe_contexts) {
    const ForwardTrace trace = forward(model, embed_prompt(model, probe));
    int best = 0;
    for (int k = 1; k < model.vocab_size(); ++k) {
      if (trace.logits(k) > trace.logits(best)) best = k;
    }
    if (!std::binary_search(forbidden_ids.begin(), forbidden_ids.end(), best)) {
      continue;
    }
    const Vec& o = trace.pre_activations[static_cast<std::size_t>(layer)];
    auto it = sums.find(best);
    if (it == sums.end()) {
      sums.emplace(best, o);
      counts.emplace(best, 1);
    } else {
      it->second += o;
      ++counts[best];
    }
  }

  for (int id : forbidden_ids) {
    const auto it = sums.find(id);
    if (it == sums.end()) {
      out.uncovered_ids.push_back(id);
      continue;
    }
    out.set.concepts.push_back(it->second / static_cast<double>(counts[id]));
    out.set.labels.push_back(model.vocab.tokens[static_cast<std::size_t>(id)]);
  }
  return out;
}

// --- PCR building blocks --------------------------------------------------------

PcrSingleResult pcr_single(const Mat& w, const Vec& h, const Vec& c,
                           double margin) {
  if (!(margin > 0.0)) {
    throw ParamError("pcr_single: margin must be positive");
  }
  if (w.cols() != h.size() || w.rows() != c.size()) {
    throw ShapeError("pcr_single: inconsistent shapes");
  }
  const double h_sq = h.squaredNorm();
  if (h_sq == 0.0) {
    throw DegenerateInputError("pcr_single: zero intermediate activation");
  }

  PcrSingleResult out;
  const Vec r = w * h - c;
  const double r_norm = r.norm();
  if (r_norm >= margin) {
    out.delta = Mat::Zero(w.rows(), w.cols());
    return out;
  }

  Vec direction;
  if (r_norm > 0.0) {
    direction = r / r_norm;
  } else {
    // Residual exactly zero: the closed-form direction r/||r|| is undefined,
    // so push along the first standard basis vector of the output space.
    direction = Vec::Zero(w.rows());
    direction(0) = 1.0;
    out.degenerate_direction = true;
  }
  out.delta = ((margin - r_norm) / h_sq) * direction * h.transpose();
  return out;
}

std::vector<double> violations(const Mat& w, const Vec& h,
                               const ConceptSet& concepts, double margin) {
  concepts.validate(static_cast<int>(w.rows()));
  std::vector<double> out;
  out.reserve(concepts.concepts.size());
  const Vec o = w * h;
  for (const Vec& c : concepts.concepts) {
    out.push_back(std::max(0.0, margin - (o - c).norm()));
  }
  return out;
}

std::optional<std::size_t> most_violated(
    const std::vector<double>& violation_amounts,
    const std::vector<double>& residual_norms) {
  if (violation_amounts.size() != residual_norms.size()) {
    throw ShapeError("most_violated: list length mismatch");
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < violation_amounts.size(); ++i) {
    if (violation_amounts[i] <= 0.0) continue;
    if (!best || residual_norms[i] < residual_norms[*best]) {
      best = i;
    }
  }
  return best;
}

PcrMultiResult pcr_multi(const Mat& w, const Vec& h, const ConceptSet& concepts,
                         const PcrConfig& cfg) {
  cfg.validate();
  concepts.validate(static_cast<int>(w.rows()));
  if (h.squaredNorm() == 0.0) {
    throw DegenerateInputError("pcr_multi: zero intermediate activation");
  }

  PcrMultiResult out;
  out.delta = Mat::Zero(w.rows(), w.cols());
  const std::size_t n = concepts.concepts.size();

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vec o = (w + out.delta) * h;
    std::vector<double> norms(n);
    std::vector<double> viols(n);
    double max_viol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      norms[i] = (o - concepts.concepts[i]).norm();
      viols[i] = std::max(0.0, cfg.margin - norms[i]);
      max_viol = std::max(max_viol, viols[i]);
    }

    // Violations inside the slack tolerance count as satisfied.
    std::vector<double> actionable = viols;
    for (double& v : actionable) {
      if (v <= cfg.slack_tol) v = 0.0;
    }
    const auto target = most_violated(actionable, norms);
    if (!target) {
      out.converged = true;
      out.final_violations = viols;
      return out;
    }

    out.max_violation_log.push_back(max_viol);
    const PcrSingleResult step = pcr_single(
        w + out.delta, h, concepts.concepts[*target], cfg.margin);
    out.used_degenerate_direction |= step.degenerate_direction;
    out.delta += cfg.damping * step.delta;
    ++out.iterations;
  }

  // Out of iterations: report the remaining violations with the partial delta.
  const Vec o = (w + out.delta) * h;
  out.final_violations.resize(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    out.final_violations[i] =
        std::max(0.0, cfg.margin - (o - concepts.concepts[i]).norm());
    any |= out.final_violations[i] > cfg.slack_tol;
  }
  out.converged = !any;
  return out;
}

ToyLm pcr_edit_layers(const ToyLm& model,
                      const std::vector<ConceptSet>& concepts_per_layer,
                      const std::vector<std::vector<int>>& prompts,
                      const PcrConfig& cfg, int k_layers, int passes,
                      PcrEditStats* stats) {
  if (k_layers < 1 || k_layers > model.num_layers() ||
      static_cast<int>(concepts_per_layer.size()) < k_layers) {
    throw IndexError("pcr_edit_layers: bad layer count");
  }
  if (prompts.empty()) {
    throw DataError("pcr_edit_layers: no intervention prompts");
  }
  if (passes < 1) {
    throw ParamError("pcr_edit_layers: passes must be at least 1");
  }

  ToyLm edited = model;
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& prompt : prompts) {
      for (int l = 0; l < k_layers; ++l) {
        const Vec x = embed_prompt(edited, prompt);
        const ForwardTrace trace = forward(edited, x);
        const Vec& h_prev =
            l == 0 ? x : trace.hidden[static_cast<std::size_t>(l - 1)];
        const PcrMultiResult r =
            pcr_multi(edited.layers[static_cast<std::size_t>(l)], h_prev,
                      concepts_per_layer[static_cast<std::size_t>(l)], cfg);
        edited.layers[static_cast<std::size_t>(l)] += r.delta;
        if (stats != nullptr) {
          stats->total_iterations += r.iterations;
          stats->converged &= r.converged;
          stats->used_degenerate_direction |= r.used_degenerate_direction;
        }
      }
    }
  }
  return edited;
}

// --- KKT verification -----------------------------------------------------------

KktReport verify_kkt(const Mat& w, const Vec& h, const ConceptSet& concepts,
                     const Mat& delta, double margin) {
  concepts.validate(static_cast<int>(w.rows()));
  if (delta.rows() != w.rows() || delta.cols() != w.cols()) {
    throw ShapeError("verify_kkt: delta shape mismatch");
  }

  KktReport report;
  const std::size_t n = concepts.concepts.size();
  const Vec o = (w + delta) * h;
  const double h_sq = h.squaredNorm();

  std::vector<Vec> unit_residuals(n);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec r = o - concepts.concepts[i];
    norms[i] = r.norm();
    report.primal_slacks.push_back(norms[i] - margin);
    if (std::abs(norms[i] - margin) <= tol::kKktActiveWindow && norms[i] > 0.0) {
      report.active.push_back(i);
      unit_residuals[i] = r / norms[i];
    }
  }

  // Least-squares multipliers on the stationarity equation restricted to the
  // active set: 2 delta = sum_i lambda_i (r_i/||r_i||) h^T. The Gram matrix
  // of the rank-one terms collapses to (u_i . u_j) ||h||^2.
  const std::size_t a = report.active.size();
  Vec lambda_active = Vec::Zero(static_cast<Eigen::Index>(a));
  if (a > 0) {
    Mat gram(a, a);
    Vec rhs(a);
    const Vec delta_h = delta * h;
    for (std::size_t i = 0; i < a; ++i) {
      const Vec& ui = unit_residuals[report.active[i]];
      for (std::size_t j = 0; j < a; ++j) {
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            ui.dot(unit_residuals[report.active[j]]) * h_sq;
      }
      rhs(static_cast<Eigen::Index>(i)) = 2.0 * ui.dot(delta_h);
    }
    lambda_active = gram.completeOrthogonalDecomposition().solve(rhs);
  }

  report.multipliers.assign(n, 0.0);
  Mat stationarity = 2.0 * delta;
  double comp_slack = 0.0;
  for (std::size_t i = 0; i < a; ++i) {
    const double raw = lambda_active(static_cast<Eigen::Index>(i));
    const std::size_t idx = report.active[i];
    report.dual_infeasibility =
        std::max(report.dual_infeasibility, std::max(-raw, 0.0));
    report.multipliers[idx] = std::max(raw, 0.0);
    stationarity -= raw * unit_residuals[idx] * h.transpose();
    comp_slack = std::max(
        comp_slack, std::abs(report.multipliers[idx] * (margin - norms[idx])));
  }
  report.stationarity_residual = stationarity.norm();
  report.comp_slackness_residual = comp_slack;
  return report;
}

// --- Brute-force oracle ----------------------------------------------------------

namespace {

Vec random_unit(Rng& rng, Eigen::Index dim) {
  Vec v(dim);
  double sq = 0.0;
  while (sq == 0.0) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      v(i) = rng_uniform(rng, -1.0, 1.0);
    }
    sq = v.squaredNorm();
  }
  return v / std::sqrt(sq);
}

// Restores feasibility by repeated single-constraint corrections on the most
// violated concept; written independently of pcr_multi so the oracle does not
// share its code path.
bool restore_feasibility(const Mat& w, const Vec& h, const ConceptSet& concepts,
                         double margin, Rng& rng, Mat& delta) {
  const double h_sq = h.squaredNorm();
  const double target = margin * (1.0 + 1e-12);
  for (int pass = 0; pass < 64; ++pass) {
    const Vec o = (w + delta) * h;
    int worst = -1;
    double worst_norm = 0.0;
    for (std::size_t i = 0; i < concepts.concepts.size(); ++i) {
      const double norm = (o - concepts.concepts[i]).norm();
      if (norm < margin && (worst < 0 || norm < worst_norm)) {
        worst = static_cast<int>(i);
        worst_norm = norm;
      }
    }
    if (worst < 0) return true;
    const Vec r = o - concepts.concepts[static_cast<std::size_t>(worst)];
    const Vec dir = worst_norm > 0.0 ? Vec(r / worst_norm)
                                     : random_unit(rng, w.rows());
    delta += ((target - worst_norm) / h_sq) * dir * h.transpose();
  }
  const Vec o = (w + delta) * h;
  for (const Vec& c : concepts.concepts) {
    if ((o - c).norm() < margin - tol::kPcrResidual) return false;
  }
  return true;
}

}  // namespace

OracleResult oracle_min_norm(const Mat& w, const Vec& h,
                             const ConceptSet& concepts, double margin,
                             std::uint64_t seed, int starts) {
  concepts.validate(static_cast<int>(w.rows()));
  if (h.squaredNorm() == 0.0) {
    throw DegenerateInputError("oracle_min_norm: zero intermediate activation");
  }
  if (starts < 1) {
    throw ParamError("oracle_min_norm: need at least one start");
  }

  OracleResult best;
  auto consider = [&best](const Mat& delta) {
    const double norm = delta.norm();
    if (!best.feasible_found || norm < best.norm) {
      best.feasible_found = true;
      best.delta = delta;
      best.norm = norm;
    }
  };

  const double init_scale = margin / std::sqrt(h.squaredNorm());
  for (int start = 0; start < starts; ++start) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(start));
    Mat delta = Mat::Zero(w.rows(), w.cols());
    if (start > 0) {
      for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        for (Eigen::Index j = 0; j < delta.cols(); ++j) {
          delta(i, j) = rng_uniform(rng, -init_scale, init_scale);
        }
      }
    }
    if (restore_feasibility(w, h, concepts, margin, rng, delta)) {
      consider(delta);
    }
    // Shrink toward zero (gradient flow of ||delta||^2), re-projecting onto
    // the feasible set after every step.
    for (int it = 0; it < 80; ++it) {
      delta *= 0.97;
      if (restore_feasibility(w, h, concepts, margin, rng, delta)) {
        consider(delta);
      }
    }
  }
  return best;
}

// --- Intervention file I/O --------------------------------------------------------

void save_intervention(const Intervention& iv, const std::string& base_hash,
                       const std::filesystem::path& path) {
  nlohmann::json j;
  j["strategy"] = strategy_name(iv.strategy);
  j["base_model_hash"] = base_hash;
  j["config"] = iv.config;
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& [layer, delta] : iv.deltas) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < delta.cols(); ++c) {
        row.push_back(delta(r, c));
      }
      rows.push_back(std::move(row));
    }
    deltas[std::to_string(layer)] = std::move(rows);
  }
  j["deltas"] = std::move(deltas);

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError("save_intervention: cannot open " + path.string());
  }
  out << j.dump(2) << '\n';
}

std::pair<Intervention, std::string> load_intervention(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("load_intervention: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("load_intervention: ") + e.what(), 0);
  }

  Intervention iv;
  try {
    iv.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    iv.config = j.at("config");
    const auto& deltas = j.at("deltas");
    for (auto it = deltas.begin(); it != deltas.end(); ++it) {
      const int layer = std::stoi(it.key());
      const auto& rows = it.value();
      const auto n_rows = static_cast<Eigen::Index>(rows.size());
      if (n_rows == 0) {
        throw FormatError("load_intervention: empty delta matrix", 0);
      }
      const auto n_cols = static_cast<Eigen::Index>(rows.at(0).size());
      Mat delta(n_rows, n_cols);
      for (Eigen::Index r = 0; r < n_rows; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != n_cols) {
          throw FormatError("load_intervention: ragged delta matrix", 0);
        }
        for (Eigen::Index c = 0; c < n_cols; ++c) {
          delta(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
      }
      iv.deltas[layer] = std::move(delta);
    }
    return {std::move(iv), j.at("base_model_hash").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("load_intervention: ") + e.what(), 0);
  }
}

}  // namespace gradedit
