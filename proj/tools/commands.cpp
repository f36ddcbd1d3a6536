#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gradedit/corpus.hpp"
#include "gradedit/eval.hpp"
#include "gradedit/hash.hpp"

namespace gradedit::cli {

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParamError("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

void require_exists(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw DataError(std::string("config: ") + what + " path does not exist: " +
                    path.string());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError("cannot open output file " + path.string());
  }
  out << text;
}

std::string words_of(const Vocab& vocab, const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += vocab.tokens[static_cast<std::size_t>(ids[i])];
  }
  return out;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::optional<std::uint64_t>& seed_override,
                             const std::optional<std::string>& out_override) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("config: cannot open " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParamError(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.raw = j;
  try {
    expect_keys(j, {"version", "corpus", "wordlist", "out", "seed", "model",
                    "strategy", "attack", "eval"},
                "top level");
    if (j.at("version").get<int>() != 1) {
      throw ParamError("config: unsupported config version");
    }
    cfg.corpus = j.at("corpus").get<std::string>();
    cfg.wordlist = j.at("wordlist").get<std::string>();
    cfg.out_dir = j.at("out").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();

    const json& model = j.at("model");
    expect_keys(model,
                {"d_embed", "context_window", "hidden_dims", "activation",
                 "refusal_words", "learning_rate", "epochs"},
                "model");
    cfg.d_embed = model.at("d_embed").get<int>();
    cfg.context_window = model.at("context_window").get<int>();
    cfg.hidden_dims = model.at("hidden_dims").get<std::vector<int>>();
    if (model.at("activation").get<std::string>() != "relu") {
      throw ParamError("config: only relu activation is supported");
    }
    cfg.refusal_words =
        model.at("refusal_words").get<std::vector<std::string>>();
    cfg.learning_rate = model.at("learning_rate").get<double>();
    cfg.epochs = model.at("epochs").get<int>();

    const json& strategy = j.at("strategy");
    cfg.strategy = strategy.at("name").get<std::string>();
    if (cfg.strategy == "tsr") {
      expect_keys(strategy,
                  {"name", "budget", "step_size", "steps", "target_layers"},
                  "strategy");
      cfg.tsr.budget = strategy.at("budget").get<double>();
      cfg.tsr.step_size = strategy.at("step_size").get<double>();
      cfg.tsr.steps = strategy.at("steps").get<int>();
      cfg.tsr.target_layers =
          strategy.at("target_layers").get<std::vector<int>>();
    } else if (cfg.strategy == "arr") {
      expect_keys(strategy,
                  {"name", "budget", "outer_steps", "inner_steps",
                   "outer_step_size", "inner_step_size"},
                  "strategy");
      cfg.arr.budget = strategy.at("budget").get<double>();
      cfg.arr.outer_steps = strategy.at("outer_steps").get<int>();
      cfg.arr.inner_steps = strategy.at("inner_steps").get<int>();
      cfg.arr.outer_step_size = strategy.at("outer_step_size").get<double>();
      cfg.arr.inner_step_size = strategy.at("inner_step_size").get<double>();
      cfg.arr.prompt_positions = cfg.context_window;
    } else if (cfg.strategy == "pcr") {
      expect_keys(strategy,
                  {"name", "margin", "damping", "max_iters", "slack_tol",
                   "layers", "passes", "max_probes_per_token"},
                  "strategy");
      cfg.pcr.solver.margin = strategy.at("margin").get<double>();
      cfg.pcr.solver.damping = strategy.at("damping").get<double>();
      cfg.pcr.solver.max_iters = strategy.at("max_iters").get<int>();
      cfg.pcr.solver.slack_tol = strategy.at("slack_tol").get<double>();
      cfg.pcr.layers = strategy.at("layers").get<int>();
      cfg.pcr.passes = strategy.at("passes").get<int>();
      cfg.pcr.max_probes_per_token =
          strategy.at("max_probes_per_token").get<int>();
    } else {
      throw ParamError("config: unknown strategy: " + cfg.strategy);
    }

    const json& attack = j.at("attack");
    expect_keys(attack, {"steps", "step_size", "horizon"}, "attack");
    cfg.attack.steps = attack.at("steps").get<int>();
    cfg.attack.step_size = attack.at("step_size").get<double>();
    cfg.attack.horizon = attack.at("horizon").get<int>();
    cfg.attack.positions = cfg.context_window;
    cfg.attack.seed = cfg.seed;

    const json& eval = j.at("eval");
    expect_keys(eval, {"horizon"}, "eval");
    cfg.eval_horizon = eval.at("horizon").get<int>();
  } catch (const json::exception& e) {
    throw ParamError(std::string("config: ") + e.what());
  }

  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.attack.seed = *seed_override;
    cfg.raw["seed"] = *seed_override;
  }
  if (out_override) {
    cfg.out_dir = *out_override;
    cfg.raw["out"] = *out_override;
  }

  require_exists(cfg.corpus, "corpus");
  require_exists(cfg.wordlist, "wordlist");
  return cfg;
}

namespace {

struct LoadedExperiment {
  ToyLm model;
  std::vector<std::vector<int>> corpus_ids;
};

LoadedExperiment load_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& weights) {
  LoadedExperiment exp;
  exp.model = load_weights(weights);
  const auto sentences = read_corpus(cfg.corpus);
  exp.corpus_ids = corpus_to_ids(sentences, exp.model.vocab);
  return exp;
}

}  // namespace

int cmd_train(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto sentences = read_corpus(cfg.corpus);
  const auto harmful_words = read_wordlist(cfg.wordlist);
  const Vocab vocab =
      vocab_from_corpus(sentences, cfg.refusal_words, harmful_words);
  const auto corpus_ids = corpus_to_ids(sentences, vocab);

  ToyLm model = make_random_model(vocab, cfg.d_embed, cfg.context_window,
                                  cfg.hidden_dims, cfg.seed);
  const double initial = corpus_cross_entropy(model, corpus_ids);
  model = train_sgd(model, corpus_ids,
                    {cfg.learning_rate, cfg.epochs, cfg.seed});
  const double final_loss = corpus_cross_entropy(model, corpus_ids);

  std::filesystem::create_directories(cfg.out_dir);
  save_weights(model, cfg.out_dir / "weights.bin");

  // Sidecar log is the only place timestamps may appear.
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  std::ostringstream log;
  log << "unix_time=" << std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count()
      << "\nseconds=" << elapsed << "\nvocab_size=" << vocab.size()
      << "\ninitial_cross_entropy=" << initial
      << "\nfinal_cross_entropy=" << final_loss
      << "\nweights_hash=" << weights_hash(model) << '\n';
  write_text(cfg.out_dir / "train.log", log.str());

  std::cout << "trained model: vocab " << vocab.size() << ", cross-entropy "
            << initial << " -> " << final_loss << ", hash "
            << weights_hash(model) << '\n';
  return kExitOk;
}

int cmd_attack(const ExperimentConfig& cfg,
               const std::filesystem::path& weights) {
  const ToyLm model = load_weights(weights);
  const auto specs = per_token_attack_specs(model.vocab, cfg.attack);
  if (specs.empty()) {
    throw DataError("attack: model has no harmful token set");
  }

  json per_token = json::array();
  int successes = 0;
  for (const AttackSpec& spec : specs) {
    const AttackResult result = attack(model, spec.target_ids, spec.cfg);
    successes += result.success ? 1 : 0;
    per_token.push_back(
        {{"target",
          model.vocab.tokens[static_cast<std::size_t>(spec.target_ids[0])]},
         {"success", result.success},
         {"final_loss", result.final_loss},
         {"initial_loss", result.loss_curve.front()},
         {"prompt", words_of(model.vocab, result.prompt_ids)}});
  }
  const double asr =
      static_cast<double>(successes) / static_cast<double>(specs.size());

  json report = {{"asr", asr},
                 {"n_attacks", specs.size()},
                 {"per_token", per_token},
                 {"model_hash", weights_hash(model)},
                 {"seed", cfg.seed},
                 {"config", cfg.raw}};
  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "attack_report.json", report.dump(2) + "\n");
  std::cout << "attack success rate: " << asr << " over " << specs.size()
            << " targets\n";
  return kExitOk;
}

int cmd_intervene(const ExperimentConfig& cfg,
                  const std::filesystem::path& weights) {
  const LoadedExperiment exp = load_experiment(cfg, weights);
  const std::string base_hash = weights_hash(exp.model);

  Intervention iv;
  ToyLm edited = exp.model;
  int iterations = 0;
  bool converged = true;

  if (cfg.strategy == "tsr") {
    // Jailbreak prompts: the corpus contexts that elicit forbidden tokens.
    std::vector<std::vector<int>> prompts;
    for (int id : exp.model.vocab.harmful_ids) {
      const auto mined = mine_probe_contexts(exp.model, exp.corpus_ids, id,
                                             cfg.pcr.max_probes_per_token);
      prompts.insert(prompts.end(), mined.begin(), mined.end());
    }
    if (prompts.empty()) {
      throw DataError("tsr: no corpus context elicits a forbidden token");
    }
    iv = tsr_intervene(exp.model, prompts, cfg.tsr);
    iterations = cfg.tsr.steps;
    edited = apply_intervention(exp.model, iv);
  } else if (cfg.strategy == "arr") {
    iv = arr_intervene(exp.model, cfg.arr, exp.model.vocab.harmful_ids);
    iterations = cfg.arr.outer_steps;
    edited = apply_intervention(exp.model, iv);
  } else if (cfg.strategy == "pcr") {
    const PcrDefense defense =
        run_pcr_defense(exp.model, exp.corpus_ids, cfg.pcr);
    iv = defense.intervention;
    edited = defense.edited;
    iterations = defense.total_iterations;
    converged = defense.converged;
  } else {
    throw ParamError("intervene: unknown strategy: " + cfg.strategy);
  }

  std::filesystem::create_directories(cfg.out_dir);
  save_intervention(iv, base_hash, cfg.out_dir / "intervention.json");
  save_weights(edited, cfg.out_dir / "weights_edited.bin");

  std::cout << "strategy " << cfg.strategy << ": ||delta||_F = "
            << iv.total_norm() << ", iterations = " << iterations << '\n';
  if (!converged) {
    std::cerr << "pcr did not converge within max_iters; partial intervention "
                 "written\n";
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& weights,
             const std::optional<std::filesystem::path>& intervention) {
  const LoadedExperiment exp = load_experiment(cfg, weights);
  const std::string base_hash = weights_hash(exp.model);

  ToyLm after = exp.model;
  std::string defense = "none";
  if (intervention) {
    const auto [iv, expected_hash] = load_intervention(*intervention);
    if (expected_hash != base_hash) {
      throw DataError("eval: intervention was computed for a different model "
                      "(checksum mismatch)");
    }
    after = apply_intervention(exp.model, iv);
    defense = strategy_name(iv.strategy);
  }

  const auto specs = per_token_attack_specs(exp.model.vocab, cfg.attack);
  if (specs.empty()) {
    throw DataError("eval: model has no harmful token set");
  }

  EvalReport report;
  report.asr = measure_asr(after, specs);
  // Refusal is measured on the completions of the adversarial prompts found
  // against the unprotected model.
  const auto prompts = attack_prompts(exp.model, specs);
  report.refusal_rate = measure_refusal(after, prompts, cfg.eval_horizon,
                                        exp.model.vocab.refusal_ids);

  std::vector<std::vector<int>> forbidden;
  std::vector<std::vector<int>> benign;
  split_forbidden_benign(exp.corpus_ids, exp.model.vocab, &forbidden, &benign);
  if (forbidden.empty() || benign.empty()) {
    throw DataError("eval: corpus must contain forbidden and benign sequences");
  }
  const UnlearningDelta delta =
      unlearning_delta(exp.model, after, forbidden, benign);
  report.perplexity_forbidden_before = delta.forbidden_before;
  report.perplexity_forbidden_after = delta.forbidden_after;
  report.perplexity_benign_before = delta.benign_before;
  report.perplexity_benign_after = delta.benign_after;
  report.n_prompts = static_cast<int>(specs.size());
  report.seed = cfg.seed;
  report.model_hash_before = base_hash;
  report.model_hash_after = weights_hash(after);
  report.config_echo = cfg.raw;
  report.validate();

  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(cfg.out_dir / "report.csv", report.to_csv("toy-lm", defense));
  std::cout << "asr=" << report.asr << " refusal=" << report.refusal_rate
            << " ppl_forbidden " << report.perplexity_forbidden_before
            << " -> " << report.perplexity_forbidden_after << '\n';
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg,
              const std::filesystem::path& weights) {
  const LoadedExperiment exp = load_experiment(cfg, weights);
  if (cfg.strategy != "pcr") {
    throw ParamError("sweep: only the pcr strategy supports layer sweeps");
  }

  // Probes and concepts from the unedited model, one concept set per layer.
  std::vector<std::vector<int>> probes;
  for (int id : exp.model.vocab.harmful_ids) {
    const auto mined = mine_probe_contexts(exp.model, exp.corpus_ids, id,
                                           cfg.pcr.max_probes_per_token);
    probes.insert(probes.end(), mined.begin(), mined.end());
  }
  if (probes.empty()) {
    throw DataError("sweep: no corpus context elicits a forbidden token");
  }

  PcrLayerInputs inputs;
  inputs.intervention_prompts = probes;
  for (int l = 0; l < exp.model.num_layers(); ++l) {
    inputs.concepts_per_layer.push_back(
        extract_concepts(exp.model, l, exp.model.vocab.harmful_ids, probes)
            .set);
  }

  SweepEvalInputs eval;
  eval.attacks = per_token_attack_specs(exp.model.vocab, cfg.attack);
  eval.refusal_prompts = attack_prompts(exp.model, eval.attacks);
  eval.refusal_horizon = cfg.eval_horizon;
  eval.refusal_ids = exp.model.vocab.refusal_ids;
  std::vector<std::vector<int>> benign;
  split_forbidden_benign(exp.corpus_ids, exp.model.vocab, &eval.forbidden_seqs,
                         &benign);

  const SweepReport report =
      layer_sweep(exp.model, inputs, cfg.pcr.solver, eval);

  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "sweep.csv", report.to_csv());
  write_text(cfg.out_dir / "sweep.json", report.to_json().dump(2) + "\n");
  std::cout << "sweep rows: " << report.rows.size() << '\n';
  return kExitOk;
}

int cmd_ingest(const ExperimentConfig& cfg,
               const std::filesystem::path& weights) {
  const ToyLm model = load_weights(weights);
  const WordlistIngest ingest = ingest_wordlist(cfg.wordlist, model.vocab);
  if (ingest.ids.empty() && ingest.uncovered.empty()) {
    std::cerr << "warning: wordlist is empty\n";
  }

  json report = {{"ids", ingest.ids},
                 {"covered", ingest.covered},
                 {"uncovered", ingest.uncovered}};
  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "ingest.json", report.dump(2) + "\n");
  std::cout << "covered " << ingest.ids.size() << " words, "
            << ingest.uncovered.size() << " uncovered\n";
  return kExitOk;
}

}  // namespace gradedit::cli
