#include "gradedit/pipeline.hpp"

#include <algorithm>
#include <set>

namespace gradedit {

std::vector<std::vector<int>> mine_probe_contexts(
    const ToyLm& model, const std::vector<std::vector<int>>& corpus_ids,
    int forbidden_id, int max_probes) {
  std::vector<std::vector<int>> probes;
  std::set<std::vector<int>> seen;
  for (const auto& seq : corpus_ids) {
    const int n = static_cast<int>(seq.size());
    for (int i = model.context_window; i < n; ++i) {
      if (static_cast<int>(probes.size()) >= max_probes) return probes;
      std::vector<int> window(seq.begin() + (i - model.context_window),
                              seq.begin() + i);
      if (seen.count(window)) continue;
      seen.insert(window);
      const std::vector<int> next = greedy_decode(model, window, 1);
      if (next.front() == forbidden_id) {
        probes.push_back(std::move(window));
      }
    }
  }
  return probes;
}

PcrDefense run_pcr_defense(const ToyLm& model,
                           const std::vector<std::vector<int>>& corpus_ids,
                           const PcrPipelineConfig& cfg) {
  cfg.solver.validate();
  const int L = model.num_layers();
  const int k_layers = cfg.layers == 0 ? L : cfg.layers;
  if (k_layers < 1 || k_layers > L) {
    throw IndexError("run_pcr_defense: bad layer count");
  }

  // Intervention prompts: every mined probe, grouped per forbidden token.
  PcrDefense defense;
  std::vector<std::vector<int>> probes;
  std::set<int> covered;
  for (int id : model.vocab.harmful_ids) {
    const auto mined =
        mine_probe_contexts(model, corpus_ids, id, cfg.max_probes_per_token);
    if (mined.empty()) {
      defense.uncovered_ids.push_back(id);
      continue;
    }
    covered.insert(id);
    probes.insert(probes.end(), mined.begin(), mined.end());
  }
  if (probes.empty()) {
    throw DataError("run_pcr_defense: no probe context elicits any forbidden token");
  }
  defense.probes = probes;

  // Concepts per layer, recorded once from the unedited model.
  std::vector<ConceptSet> concepts_per_layer;
  for (int l = 0; l < L; ++l) {
    const ConceptExtraction extraction =
        extract_concepts(model, l, model.vocab.harmful_ids, probes);
    concepts_per_layer.push_back(extraction.set);
  }

  PcrEditStats stats;
  defense.edited = pcr_edit_layers(model, concepts_per_layer, probes,
                                   cfg.solver, k_layers, cfg.passes, &stats);
  defense.converged = stats.converged;
  defense.total_iterations = stats.total_iterations;

  defense.intervention.strategy = Strategy::kPcr;
  for (int l = 0; l < k_layers; ++l) {
    defense.intervention.deltas[l] =
        defense.edited.layers[static_cast<std::size_t>(l)] -
        model.layers[static_cast<std::size_t>(l)];
  }
  defense.intervention.config = {
      {"margin", cfg.solver.margin},
      {"damping", cfg.solver.damping},
      {"max_iters", cfg.solver.max_iters},
      {"slack_tol", cfg.solver.slack_tol},
      {"layers", k_layers},
      {"passes", cfg.passes},
      {"max_probes_per_token", cfg.max_probes_per_token},
      {"probes", probes},
      {"total_iterations", stats.total_iterations},
      {"converged", stats.converged},
      {"used_degenerate_direction", stats.used_degenerate_direction},
      {"uncovered_ids", defense.uncovered_ids}};
  return defense;
}

std::vector<AttackSpec> per_token_attack_specs(const Vocab& vocab,
                                               const AttackConfig& cfg) {
  std::vector<AttackSpec> specs;
  for (int id : vocab.harmful_ids) {
    AttackSpec spec;
    spec.target_ids = {id};
    spec.cfg = cfg;
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<std::vector<int>> attack_prompts(
    const ToyLm& model, const std::vector<AttackSpec>& specs) {
  std::vector<std::vector<int>> prompts;
  prompts.reserve(specs.size());
  for (const AttackSpec& spec : specs) {
    prompts.push_back(attack(model, spec.target_ids, spec.cfg).prompt_ids);
  }
  return prompts;
}

void split_forbidden_benign(const std::vector<std::vector<int>>& corpus_ids,
                            const Vocab& vocab,
                            std::vector<std::vector<int>>* forbidden,
                            std::vector<std::vector<int>>* benign) {
  for (const auto& seq : corpus_ids) {
    const bool has_harm = std::any_of(
        seq.begin(), seq.end(), [&vocab](int id) {
          return std::binary_search(vocab.harmful_ids.begin(),
                                    vocab.harmful_ids.end(), id);
        });
    if (has_harm) {
      forbidden->push_back(seq);
    } else {
      benign->push_back(seq);
    }
  }
}

}  // namespace gradedit
