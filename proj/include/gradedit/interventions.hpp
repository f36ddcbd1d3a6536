#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradedit/losses.hpp"
#include "gradedit/toy_lm.hpp"

namespace gradedit {

// Forbidden concept embeddings in the pre-activation space of one layer.
struct ConceptSet {
  int layer = 0;                   // 0-based layer index
  std::vector<Vec> concepts;       // each of dimension d_layer
  std::vector<std::string> labels; // unique, one per concept

  int size() const { return static_cast<int>(concepts.size()); }
  void validate(int expected_dim) const;
};

struct PcrConfig {
  double margin = 0.5;      // distance floor in pre-activation space
  double damping = 0.9;     // alpha in (0, 1]
  int max_iters = 200;      // K_max
  double slack_tol = 1e-6;  // allowed terminal violation

  void validate() const;
};

struct TsrConfig {
  double budget = 0.5;  // total Frobenius budget across target layers
  double step_size = 0.1;
  int steps = 50;
  std::vector<int> target_layers;  // 0-based; empty means all layers

  void validate() const;
};

struct ArrConfig {
  double budget = 0.5;
  int outer_steps = 10;
  int inner_steps = 40;
  double outer_step_size = 0.1;
  double inner_step_size = 0.5;
  int prompt_positions = 4;

  void validate() const;
};

enum class Strategy { kTsr, kArr, kPcr };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// A per-layer weight perturbation plus the configuration that produced it.
struct Intervention {
  Strategy strategy = Strategy::kPcr;
  std::map<int, Mat> deltas;  // layer index -> delta, shape of W_layer

  // Config snapshot and solver metadata (iteration counts, losses, flags).
  nlohmann::json config;

  double total_norm() const;  // Frobenius norm of the stacked deltas
};

ToyLm apply_intervention(const ToyLm& model, const Intervention& iv);

// --- TSR -------------------------------------------------------------------

// Projected gradient descent on the mean safety loss over the given jailbreak
// prompts, with the stacked delta ball-projected to the budget after every
// step. The best iterate (including delta = 0) is returned, so the final
// safety loss never exceeds the unperturbed one.
Intervention tsr_intervene(const ToyLm& model,
                           const std::vector<std::vector<int>>& prompts,
                           const TsrConfig& cfg);

// --- ARR -------------------------------------------------------------------

// Alternating max-min scheme: the inner loop runs projected gradient descent
// over a relaxed prompt (re-initialized to uniform each round) minimizing the
// harmful loss; the outer loop takes an ascent step on delta at the inner
// minimizer and ball-projects to the budget. Returns the delta whose inner
// minimum is largest, which is never below the value at delta = 0.
Intervention arr_intervene(const ToyLm& model, const ArrConfig& cfg,
                           const std::vector<int>& k_harmful);

// Worst-case harmful loss of a model: inner PGD from the uniform prompt.
double arr_inner_worst_case(const ToyLm& model, const ArrConfig& cfg,
                            const std::vector<int>& k_harmful);

// --- Concept extraction ------------------------------------------------------

struct ConceptExtraction {
  ConceptSet set;
  std::vector<int> uncovered_ids;  // forbidden tokens no probe elicited
};

// Records the layer pre-activation of every probe context whose greedy next
// token is a forbidden token; several probes eliciting the same token are
// averaged. Tokens never elicited are reported, not dropped.
ConceptExtraction extract_concepts(
    const ToyLm& model, int layer, const std::vector<int>& forbidden_ids,
    const std::vector<std::vector<int>>& probe_contexts);

// --- PCR building blocks -----------------------------------------------------

struct PcrSingleResult {
  Mat delta;
  bool degenerate_direction = false;  // residual was exactly zero
};

// Closed-form least-norm rank-one update pushing w*h at least `margin` away
// from the concept c. Zero when the constraint already holds. A zero residual
// with a violation falls back to the first standard basis direction of the
// output space and is flagged.
PcrSingleResult pcr_single(const Mat& w, const Vec& h, const Vec& c,
                           double margin);

// Violation amounts [margin - ||r_i||]_+ for every concept.
std::vector<double> violations(const Mat& w, const Vec& h,
                               const ConceptSet& concepts, double margin);

// Index of the smallest residual norm among violated constraints, ties to the
// lowest index; empty when nothing is violated.
std::optional<std::size_t> most_violated(
    const std::vector<double>& violation_amounts,
    const std::vector<double>& residual_norms);

struct PcrMultiResult {
  Mat delta;
  bool converged = false;
  int iterations = 0;
  std::vector<double> max_violation_log;  // one entry per iteration
  std::vector<double> final_violations;
  bool used_degenerate_direction = false;
};

// Iterative most-violated-constraint solve: residuals are recomputed from
// w + delta every round, the single-constraint closed form for the most
// violated concept is added with damping `alpha`, and the loop stops when all
// residual norms are >= margin - slack_tol or K_max is reached. Running out
// of iterations yields converged = false with the partial delta, never an
// exception.
PcrMultiResult pcr_multi(const Mat& w, const Vec& h, const ConceptSet& concepts,
                         const PcrConfig& cfg);

struct PcrEditStats {
  int total_iterations = 0;
  bool converged = true;  // false if any pcr_multi call hit K_max
  bool used_degenerate_direction = false;
};

// Sequential bottom-up PCR editing: for each pass and each intervention
// prompt, layers 0..k_layers-1 are edited in order, each pcr_multi call using
// the prompt's intermediate activation re-traced through the already-edited
// lower layers. Concepts stay fixed at their unedited-model recordings.
ToyLm pcr_edit_layers(const ToyLm& model,
                      const std::vector<ConceptSet>& concepts_per_layer,
                      const std::vector<std::vector<int>>& prompts,
                      const PcrConfig& cfg, int k_layers, int passes,
                      PcrEditStats* stats = nullptr);

// --- KKT verification --------------------------------------------------------

struct KktReport {
  std::vector<double> primal_slacks;  // ||r_i|| - margin
  std::vector<double> multipliers;    // nonnegative estimates, 0 if inactive
  double stationarity_residual = 0.0;
  double comp_slackness_residual = 0.0;
  double dual_infeasibility = 0.0;  // magnitude of negative raw estimates
  std::vector<std::size_t> active;  // indices within the activity window
};

// Estimates multipliers by least squares on the stationarity equation
// restricted to constraints active within tol::kKktActiveWindow, using the
// linear-layer identity that each stationarity term is (r_i/||r_i||) h^T.
// Always produces a report; a poor delta simply shows large residuals.
KktReport verify_kkt(const Mat& w, const Vec& h, const ConceptSet& concepts,
                     const Mat& delta, double margin);

// --- Brute-force oracle ------------------------------------------------------

struct OracleResult {
  bool feasible_found = false;
  Mat delta;
  double norm = 0.0;
};

// Multi-start projected-gradient minimization of ||delta||^2 with feasibility
// restored by repeated single-constraint corrections. An upper-bound oracle
// for the minimal feasible norm; intended for small dimensions only.
OracleResult oracle_min_norm(const Mat& w, const Vec& h,
                             const ConceptSet& concepts, double margin,
                             std::uint64_t seed, int starts = 8);

// --- Intervention file I/O ---------------------------------------------------

// JSON container: strategy tag, config echo, base-model checksum, per-layer
// deltas as nested arrays. Loading verifies shape; apply_intervention_file
// additionally rejects checksum mismatches.
void save_intervention(const Intervention& iv, const std::string& base_hash,
                       const std::filesystem::path& path);
std::pair<Intervention, std::string> load_intervention(
    const std::filesystem::path& path);

}  // namespace gradedit
