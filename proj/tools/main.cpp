#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gradedit: constrained weight interventions on a toy MLP "
               "language model"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override the config seed");
  std::optional<std::string> out_dir;
  app.add_option("--out", out_dir, "override the output directory");

  auto* train = app.add_subcommand("train", "train the toy model");
  auto* attack = app.add_subcommand("attack", "run the per-token attacks");
  auto* intervene =
      app.add_subcommand("intervene", "compute and apply the intervention");
  auto* eval = app.add_subcommand("eval", "evaluate a model, optionally "
                                          "with an intervention applied");
  auto* sweep = app.add_subcommand("sweep", "layer-count sweep (pcr)");
  auto* ingest = app.add_subcommand("ingest", "map the wordlist to token ids");

  std::string weights = "";
  for (auto* sub : {attack, intervene, eval, sweep, ingest}) {
    sub->add_option("--weights", weights, "weight file (default <out>/weights.bin)");
  }
  std::string intervention = "";
  eval->add_option("--intervention", intervention,
                   "intervention file to apply before evaluating");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::cerr << e.what() << '\n';
    return gradedit::cli::kExitUsage;
  }

  try {
    const auto cfg = gradedit::cli::load_config(config_path, seed, out_dir);
    const std::filesystem::path weights_path =
        weights.empty() ? cfg.out_dir / "weights.bin"
                        : std::filesystem::path(weights);
    if (train->parsed()) {
      return gradedit::cli::cmd_train(cfg);
    }
    if (attack->parsed()) {
      return gradedit::cli::cmd_attack(cfg, weights_path);
    }
    if (intervene->parsed()) {
      return gradedit::cli::cmd_intervene(cfg, weights_path);
    }
    if (eval->parsed()) {
      std::optional<std::filesystem::path> iv;
      if (!intervention.empty()) iv = intervention;
      return gradedit::cli::cmd_eval(cfg, weights_path, iv);
    }
    if (sweep->parsed()) {
      return gradedit::cli::cmd_sweep(cfg, weights_path);
    }
    if (ingest->parsed()) {
      return gradedit::cli::cmd_ingest(cfg, weights_path);
    }
    std::cerr << "no subcommand given\n";
    return gradedit::cli::kExitUsage;
  } catch (const gradedit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gradedit::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return gradedit::cli::kExitUsage;
  }
}
