#include "gradedit/eval.hpp"

#include <algorithm>
#include <sstream>

namespace gradedit {

void EvalReport::validate() const {
  auto fraction = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!fraction(asr) || !fraction(refusal_rate)) {
    throw ParamError("eval report: rates must lie in [0, 1]");
  }
  for (double p : {perplexity_forbidden_before, perplexity_forbidden_after,
                   perplexity_benign_before, perplexity_benign_after}) {
    if (!(p >= 1.0)) {
      throw ParamError("eval report: perplexities must be >= 1");
    }
  }
}

nlohmann::json EvalReport::to_json() const {
  // nlohmann::json orders keys lexicographically, which is the canonical
  // order the reports promise.
  nlohmann::json j;
  j["asr"] = asr;
  j["refusal_rate"] = refusal_rate;
  j["perplexity_forbidden_before"] = perplexity_forbidden_before;
  j["perplexity_forbidden_after"] = perplexity_forbidden_after;
  j["perplexity_benign_before"] = perplexity_benign_before;
  j["perplexity_benign_after"] = perplexity_benign_after;
  j["n_prompts"] = n_prompts;
  j["seed"] = seed;
  j["model_hash_before"] = model_hash_before;
  j["model_hash_after"] = model_hash_after;
  j["config"] = config_echo;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.asr = j.at("asr").get<double>();
  r.refusal_rate = j.at("refusal_rate").get<double>();
  r.perplexity_forbidden_before = j.at("perplexity_forbidden_before").get<double>();
  r.perplexity_forbidden_after = j.at("perplexity_forbidden_after").get<double>();
  r.perplexity_benign_before = j.at("perplexity_benign_before").get<double>();
  r.perplexity_benign_after = j.at("perplexity_benign_after").get<double>();
  r.n_prompts = j.at("n_prompts").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.model_hash_before = j.at("model_hash_before").get<std::string>();
  r.model_hash_after = j.at("model_hash_after").get<std::string>();
  r.config_echo = j.at("config");
  return r;
}

std::string EvalReport::to_csv(const std::string& model_name,
                               const std::string& defense_name) const {
  std::ostringstream out;
  out.precision(17);
  out << "model,defense,asr,refusal_rate,perplexity_forbidden_before,"
         "perplexity_forbidden_after,perplexity_benign_before,"
         "perplexity_benign_after,n_prompts\n";
  out << model_name << ',' << defense_name << ',' << asr << ','
      << refusal_rate << ',' << perplexity_forbidden_before << ','
      << perplexity_forbidden_after << ',' << perplexity_benign_before << ','
      << perplexity_benign_after << ',' << n_prompts << '\n';
  return out.str();
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const SweepRow& row : rows) {
    rows_json.push_back({{"layers_intervened", row.layers_intervened},
                         {"asr", row.asr},
                         {"refusal_rate", row.refusal_rate},
                         {"perplexity_after", row.perplexity_after}});
  }
  return {{"rows", rows_json}};
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "layers_intervened,asr,refusal_rate,perplexity_after\n";
  for (const SweepRow& row : rows) {
    out << row.layers_intervened << ',' << row.asr << ',' << row.refusal_rate
        << ',' << row.perplexity_after << '\n';
  }
  return out.str();
}

double measure_asr(const ToyLm& model, const std::vector<AttackSpec>& attacks) {
  if (attacks.empty()) {
    throw DataError("measure_asr: no attacks given");
  }
  int successes = 0;
  for (const AttackSpec& spec : attacks) {
    const AttackResult result = attack(model, spec.target_ids, spec.cfg);
    if (result.success) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(attacks.size());
}

double measure_refusal(const ToyLm& model,
                       const std::vector<std::vector<int>>& prompts,
                       int horizon, const std::vector<int>& refusal_ids) {
  if (refusal_ids.empty()) {
    throw ParamError("measure_refusal: empty refusal set");
  }
  if (prompts.empty()) {
    throw DataError("measure_refusal: no prompts given");
  }
  int refused = 0;
  for (const auto& prompt : prompts) {
    const std::vector<int> completion = greedy_decode(model, prompt, horizon);
    const bool hit = std::any_of(
        completion.begin(), completion.end(), [&refusal_ids](int id) {
          return std::binary_search(refusal_ids.begin(), refusal_ids.end(), id);
        });
    if (hit) ++refused;
  }
  return static_cast<double>(refused) / static_cast<double>(prompts.size());
}

namespace {

double mean_perplexity(const ToyLm& model,
                       const std::vector<std::vector<int>>& seqs) {
  if (seqs.empty()) {
    throw DataError("mean_perplexity: no sequences");
  }
  double total = 0.0;
  for (const auto& seq : seqs) total += perplexity(model, seq);
  return total / static_cast<double>(seqs.size());
}

}  // namespace

UnlearningDelta unlearning_delta(
    const ToyLm& model_before, const ToyLm& model_after,
    const std::vector<std::vector<int>>& forbidden_seqs,
    const std::vector<std::vector<int>>& benign_seqs) {
  UnlearningDelta d;
  d.forbidden_before = mean_perplexity(model_before, forbidden_seqs);
  d.forbidden_after = mean_perplexity(model_after, forbidden_seqs);
  d.benign_before = mean_perplexity(model_before, benign_seqs);
  d.benign_after = mean_perplexity(model_after, benign_seqs);
  return d;
}

SweepReport layer_sweep(const ToyLm& model, const PcrLayerInputs& inputs,
                        const PcrConfig& cfg, const SweepEvalInputs& eval) {
  const int L = model.num_layers();
  if (static_cast<int>(inputs.concepts_per_layer.size()) != L) {
    throw ShapeError("layer_sweep: need one concept set per layer");
  }
  if (inputs.intervention_prompts.empty()) {
    throw DataError("layer_sweep: no intervention prompts");
  }

  SweepReport report;
  for (int k = 1; k <= L; ++k) {
    const ToyLm edited = pcr_edit_layers(
        model, inputs.concepts_per_layer, inputs.intervention_prompts, cfg, k,
        /*passes=*/1);

    SweepRow row;
    row.layers_intervened = k;
    row.asr = measure_asr(edited, eval.attacks);
    row.refusal_rate = measure_refusal(edited, eval.refusal_prompts,
                                       eval.refusal_horizon, eval.refusal_ids);
    row.perplexity_after = mean_perplexity(edited, eval.forbidden_seqs);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace gradedit
