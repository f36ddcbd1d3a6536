#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "gradedit/attack.hpp"
#include "gradedit/interventions.hpp"
#include "gradedit/pipeline.hpp"

namespace gradedit::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // usage / data errors
inline constexpr int kExitNoConverge = 3; // solver ran out of iterations

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path wordlist;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;

  // model
  int d_embed = 16;
  int context_window = 4;
  std::vector<int> hidden_dims = {64, 64, 64};
  std::vector<std::string> refusal_words;
  double learning_rate = 0.05;
  int epochs = 40;

  // strategy
  std::string strategy = "pcr";
  TsrConfig tsr;
  ArrConfig arr;
  PcrPipelineConfig pcr;

  AttackConfig attack;
  int eval_horizon = 8;

  nlohmann::json raw;  // verbatim config file, echoed into reports
};

// Parses and validates the JSON config. Unknown keys anywhere are rejected;
// referenced paths must exist. Optional overrides replace seed / output dir.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::optional<std::uint64_t>& seed_override,
                             const std::optional<std::string>& out_override);

int cmd_train(const ExperimentConfig& cfg);
int cmd_attack(const ExperimentConfig& cfg,
               const std::filesystem::path& weights);
int cmd_intervene(const ExperimentConfig& cfg,
                  const std::filesystem::path& weights);
int cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& weights,
             const std::optional<std::filesystem::path>& intervention);
int cmd_sweep(const ExperimentConfig& cfg,
              const std::filesystem::path& weights);
int cmd_ingest(const ExperimentConfig& cfg,
               const std::filesystem::path& weights);

}  // namespace gradedit::cli
