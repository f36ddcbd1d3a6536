// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.
//
// Usage: acceptance_tests <path-to-cli-binary> <path-to-data-dir>
// (cwd must be the repository root so the bundled config paths resolve).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "commands.hpp"
#include "gradedit/corpus.hpp"
#include "gradedit/eval.hpp"
#include "gradedit/pipeline.hpp"

#include "../instance_gen.hpp"

using namespace gradedit;
namespace fs = std::filesystem;

namespace {

struct Runner {
  int failures = 0;

  void check(const std::string& label, const std::string& name,
             const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << label << ": " << name;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
  }

  void criterion(int number, const std::string& name,
                 const std::function<bool(std::string&)>& body) {
    check("criterion " + std::to_string(number), name, body);
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ConceptSet single_concept(const Vec& c) {
  ConceptSet set;
  set.concepts = {c};
  set.labels = {"concept_0"};
  return set;
}

std::string g_cli;
fs::path g_data;

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// The bundled experiment, trained once and shared by criteria 7-11.
struct Bundled {
  cli::ExperimentConfig cfg;
  ToyLm model;
  std::vector<std::vector<int>> corpus_ids;
  double train_seconds = 0.0;
};

Bundled train_bundled() {
  Bundled b;
  b.cfg = cli::load_config(g_data / "toy_experiment.json", std::nullopt,
                           std::nullopt);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sentences = read_corpus(b.cfg.corpus);
  const auto harmful_words = read_wordlist(b.cfg.wordlist);
  const Vocab vocab =
      vocab_from_corpus(sentences, b.cfg.refusal_words, harmful_words);
  b.corpus_ids = corpus_to_ids(sentences, vocab);
  ToyLm init = make_random_model(vocab, b.cfg.d_embed, b.cfg.context_window,
                                 b.cfg.hidden_dims, b.cfg.seed);
  b.model = train_sgd(init, b.corpus_ids,
                      {b.cfg.learning_rate, b.cfg.epochs, b.cfg.seed});
  b.train_seconds = seconds_since(t0);
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance_tests <cli-binary> <data-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];

  Runner runner;

  // ---------------------------------------------------------------- 1
  runner.criterion(1, "closed-form exactness on 200 single-constraint instances",
                   [](std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(515);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
      const auto inst = gradedit_test::random_single_instance(rng);
      const Vec r_pre = inst.w * inst.h - inst.c;
      const PcrSingleResult result =
          pcr_single(inst.w, inst.h, inst.c, inst.margin);
      const Vec r_post = (inst.w + result.delta) * inst.h - inst.c;

      const double expected_norm = std::max(r_pre.norm(), inst.margin);
      const double expected_delta =
          std::max(0.0, inst.margin - r_pre.norm()) / inst.h.norm();
      ok &= std::abs(r_post.norm() - expected_norm) <= tol::kPcrResidual;
      ok &= std::abs(result.delta.norm() - expected_delta) <= tol::kPcrResidual;
    }
    const double secs = seconds_since(t0);
    std::ostringstream msg;
    msg << "200 instances in " << secs << " s";
    detail = msg.str();
    return ok && secs < 1.0;
  });

  // ---------------------------------------------------------------- 2
  runner.criterion(2, "closed form is optimal against the multi-start oracle",
                   [](std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(626);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
      const auto inst = gradedit_test::random_single_instance(rng);
      const PcrSingleResult closed =
          pcr_single(inst.w, inst.h, inst.c, inst.margin);
      const OracleResult oracle =
          oracle_min_norm(inst.w, inst.h, single_concept(inst.c), inst.margin,
                          9000 + static_cast<std::uint64_t>(trial));
      if (!oracle.feasible_found) {
        ok = false;
        continue;
      }
      const double cf = closed.delta.norm();
      ok &= oracle.norm >= cf - 1e-4 * std::max(cf, 1.0);
    }
    const double secs = seconds_since(t0);
    std::ostringstream msg;
    msg << "50 instances in " << secs << " s";
    detail = msg.str();
    return ok && secs < 30.0;
  });

  // ---------------------------------------------------------------- 3
  runner.criterion(3, "KKT verification on every active closed-form edit",
                   [](std::string& detail) {
    Rng rng(515);  // same stream as criterion 1
    bool ok = true;
    int active_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto inst = gradedit_test::random_single_instance(rng);
      const Vec r_pre = inst.w * inst.h - inst.c;
      if (r_pre.norm() >= inst.margin) continue;  // inactive at the optimum
      ++active_count;
      const PcrSingleResult result =
          pcr_single(inst.w, inst.h, inst.c, inst.margin);
      const KktReport report = verify_kkt(
          inst.w, inst.h, single_concept(inst.c), result.delta, inst.margin);
      ok &= report.active.size() == 1;
      ok &= report.stationarity_residual <= tol::kKktStationarity;
      ok &= report.comp_slackness_residual <= tol::kKktCompSlack;
      ok &= !report.multipliers.empty() && report.multipliers[0] >= 0.0;
      ok &= report.dual_infeasibility <= 1e-12;
    }
    detail = std::to_string(active_count) + " active instances";
    return ok && active_count > 0;
  });

  // ---------------------------------------------------------------- 4
  runner.criterion(4, "multi-constraint feasibility within K_max",
                   [](std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(737);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      const auto inst = gradedit_test::random_multi_instance(rng);
      const PcrMultiResult r =
          pcr_multi(inst.w, inst.h, inst.concepts, inst.cfg);
      ok &= r.converged;
      ok &= r.iterations < inst.cfg.max_iters;
      for (double v : r.final_violations) ok &= v <= 1e-6;

      if (inst.concepts.size() == 1) {
        PcrConfig undamped = inst.cfg;
        undamped.damping = 1.0;
        const PcrMultiResult one =
            pcr_multi(inst.w, inst.h, inst.concepts, undamped);
        const PcrSingleResult single = pcr_single(
            inst.w, inst.h, inst.concepts.concepts[0], inst.cfg.margin);
        ok &= (one.delta - single.delta).norm() <= 1e-12;
      }
    }
    const double secs = seconds_since(t0);
    std::ostringstream msg;
    msg << "100 instances in " << secs << " s";
    detail = msg.str();
    return ok && secs < 10.0;
  });

  // ---------------------------------------------------------------- 5
  runner.criterion(5, "analytic gradients match finite differences",
                   [](std::string&) {
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const ToyLm model = gradedit_test::random_small_model(seed);
      const std::vector<int> prompt = {static_cast<int>(seed % 12),
                                       static_cast<int>((3 * seed) % 12)};
      Rng rng(seed * 13);

      for (const LossKind kind : {LossKind::kSafety, LossKind::kHarmful}) {
        const std::vector<int>& keywords = kind == LossKind::kSafety
                                               ? model.vocab.refusal_ids
                                               : model.vocab.harmful_ids;
        // Layer weights.
        const LayerGradients analytic =
            keyword_loss_layer_grads(model, prompt, keywords, kind);
        const int layer = static_cast<int>(seed % 2);
        const Mat& w = model.layers[static_cast<std::size_t>(layer)];
        Vec flat(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) flat(i) = w(i);
        auto loss_at = [&](const Vec& weights) {
          ToyLm probe = model;
          Mat& pw = probe.layers[static_cast<std::size_t>(layer)];
          for (Eigen::Index i = 0; i < pw.size(); ++i) pw(i) = weights(i);
          return keyword_loss_on_prompt(probe, prompt, keywords, kind);
        };
        const Vec fd = finite_diff_grad(loss_at, flat, 1e-6);
        const Mat& a = analytic.layers[static_cast<std::size_t>(layer)];
        Vec a_flat(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) a_flat(i) = a(i);
        ok &= (a_flat - fd).norm() / std::max(fd.norm(), 1e-12) <=
              tol::kGradRelError;

        // Relaxed prompt rows (interior point).
        Mat dist(model.context_window, model.vocab_size());
        for (Eigen::Index p = 0; p < dist.rows(); ++p) {
          for (Eigen::Index v = 0; v < dist.cols(); ++v) {
            dist(p, v) = 0.5 + rng_uniform(rng);
          }
          dist.row(p) /= dist.row(p).sum();
        }
        const Mat dist_grad =
            keyword_loss_dist_grad(model, dist, keywords, kind);
        Vec dist_flat(dist.size());
        for (Eigen::Index i = 0; i < dist.size(); ++i) dist_flat(i) = dist(i);
        auto dist_loss_at = [&](const Vec& entries) {
          Mat probe = dist;
          for (Eigen::Index i = 0; i < probe.size(); ++i) {
            probe(i) = entries(i);
          }
          return keyword_loss_on_dist(model, probe, keywords, kind);
        };
        const Vec dist_fd = finite_diff_grad(dist_loss_at, dist_flat, 1e-6);
        Vec dist_a(dist_grad.size());
        for (Eigen::Index i = 0; i < dist_grad.size(); ++i) {
          dist_a(i) = dist_grad(i);
        }
        ok &= (dist_a - dist_fd).norm() / std::max(dist_fd.norm(), 1e-12) <=
              tol::kGradRelError;
      }
    }
    return ok;
  });

  // ---------------------------------------------------------------- 6
  runner.criterion(6, "projection suite", [](std::string&) {
    Rng rng(848);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto dim = static_cast<Eigen::Index>(1 + rng_index(rng, 64));
      const Vec v = gradedit_test::random_vec(rng, dim, 3.0);
      const Vec w = simplex_project(v);

      // Independent sort-based oracle.
      std::vector<double> u(v.data(), v.data() + v.size());
      std::sort(u.begin(), u.end(), std::greater<double>());
      double cumsum = 0.0;
      double tau = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double level = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] > level) tau = level;
      }
      bool match = true;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        match &= std::abs(w(i) - std::max(v(i) - tau, 0.0)) <=
                 tol::kSimplexOracle;
      }
      ok &= match;
      ok &= w.minCoeff() >= 0.0;
      ok &= std::abs(w.sum() - 1.0) <= tol::kSimplexSum;
      ok &= (simplex_project(w) - w).norm() <= tol::kIdempotence;

      const double radius = rng_uniform(rng, 0.1, 2.0);
      const Vec b = ball_project(v, radius);
      ok &= b.norm() <= radius + tol::kBallNorm;
      ok &= (ball_project(b, radius) - b).norm() <= tol::kIdempotence;
      if (v.norm() > 1e-12 && b.norm() > 1e-12) {
        ok &= std::abs(v.dot(b) / (v.norm() * b.norm()) - 1.0) <= 1e-12;
      }
    }
    return ok;
  });

  // ------------------------------------------------ bundled pipeline
  const auto pipeline_t0 = std::chrono::steady_clock::now();
  Bundled bundled;
  try {
    bundled = train_bundled();
  } catch (const std::exception& e) {
    std::cout << "FAIL  bundled setup: " << e.what() << std::endl;
    return 1;
  }
  std::cout << "      (bundled training took " << bundled.train_seconds
            << " s)" << std::endl;

  // ---------------------------------------------------------------- 7
  runner.criterion(7, "tsr keeps the budget and does not raise the safety loss",
                   [&](std::string& detail) {
    const auto cfg = cli::load_config(g_data / "toy_experiment_tsr.json",
                                      std::nullopt, std::nullopt);
    std::vector<std::vector<int>> prompts;
    for (int id : bundled.model.vocab.harmful_ids) {
      const auto mined = mine_probe_contexts(bundled.model, bundled.corpus_ids,
                                             id, cfg.pcr.max_probes_per_token);
      prompts.insert(prompts.end(), mined.begin(), mined.end());
    }
    if (prompts.empty()) {
      detail = "no jailbreak prompts mined";
      return false;
    }
    bool ok = true;
    for (std::uint64_t run = 0; run < 3; ++run) {
      const Intervention iv = tsr_intervene(bundled.model, prompts, cfg.tsr);
      ok &= iv.total_norm() <= cfg.tsr.budget + tol::kBudgetSlack;
      ok &= iv.config.at("final_loss").get<double>() <=
            iv.config.at("initial_loss").get<double>();
    }
    return ok;
  });

  // ---------------------------------------------------------------- 8
  runner.criterion(8, "arr inner descent is monotone and the defense helps",
                   [&](std::string& detail) {
    const auto cfg = cli::load_config(g_data / "toy_experiment_arr.json",
                                      std::nullopt, std::nullopt);
    const RelaxedPrompt init = RelaxedPrompt::uniform(
        cfg.arr.prompt_positions, bundled.model.vocab_size());
    const PgdPromptResult inner = pgd_prompt_minimize(
        bundled.model, bundled.model.vocab.harmful_ids, init,
        cfg.arr.inner_steps, cfg.arr.inner_step_size);
    bool ok = inner.loss_curve.back() <= inner.loss_curve.front();

    const Intervention iv =
        arr_intervene(bundled.model, cfg.arr, bundled.model.vocab.harmful_ids);
    ok &= iv.total_norm() <= cfg.arr.budget + tol::kBudgetSlack;
    const double base = arr_inner_worst_case(bundled.model, cfg.arr,
                                             bundled.model.vocab.harmful_ids);
    const double defended =
        arr_inner_worst_case(apply_intervention(bundled.model, iv), cfg.arr,
                             bundled.model.vocab.harmful_ids);
    std::ostringstream msg;
    msg << "worst-case " << base << " -> " << defended;
    detail = msg.str();
    ok &= defended >= base;
    return ok;
  });

  // ------------------------------------------- criteria 9-10 pipeline
  double asr_before = -1.0;
  double asr_after = -1.0;
  double refusal_before = -1.0;
  double refusal_after = -1.0;
  double worst_loss_ratio = 0.0;
  UnlearningDelta unlearning;
  bool pipeline_ok = false;
  double pipeline_seconds = 0.0;
  std::string pipeline_error;
  try {
    const auto specs =
        per_token_attack_specs(bundled.model.vocab, bundled.cfg.attack);
    std::vector<std::vector<int>> prompts;
    int successes = 0;
    for (const AttackSpec& spec : specs) {
      const AttackResult result =
          attack(bundled.model, spec.target_ids, spec.cfg);
      successes += result.success ? 1 : 0;
      prompts.push_back(result.prompt_ids);
      worst_loss_ratio =
          std::max(worst_loss_ratio,
                   result.final_loss /
                       std::max(result.loss_curve.front(), 1e-12));
    }
    asr_before =
        static_cast<double>(successes) / static_cast<double>(specs.size());
    refusal_before =
        measure_refusal(bundled.model, prompts, bundled.cfg.eval_horizon,
                        bundled.model.vocab.refusal_ids);

    const PcrDefense defense =
        run_pcr_defense(bundled.model, bundled.corpus_ids, bundled.cfg.pcr);
    asr_after = measure_asr(defense.edited, specs);
    refusal_after =
        measure_refusal(defense.edited, prompts, bundled.cfg.eval_horizon,
                        bundled.model.vocab.refusal_ids);

    std::vector<std::vector<int>> forbidden;
    std::vector<std::vector<int>> benign;
    split_forbidden_benign(bundled.corpus_ids, bundled.model.vocab, &forbidden,
                           &benign);
    unlearning =
        unlearning_delta(bundled.model, defense.edited, forbidden, benign);
    pipeline_ok = true;
  } catch (const std::exception& e) {
    pipeline_error = e.what();
  }
  pipeline_seconds = seconds_since(pipeline_t0);

  // ---------------------------------------------------------------- 9
  runner.criterion(9, "pcr halves the attack success rate", [&](std::string& detail) {
    if (!pipeline_ok) {
      detail = pipeline_error;
      return false;
    }
    std::ostringstream msg;
    msg << "asr " << asr_before << " -> " << asr_after << ", refusal "
        << refusal_before << " -> " << refusal_after << ", "
        << pipeline_seconds << " s";
    detail = msg.str();
    bool ok = asr_before >= 0.5;
    ok &= asr_after <= 0.5 * asr_before;
    ok &= refusal_after >= refusal_before;
    ok &= pipeline_seconds < 300.0;
    return ok;
  });

  // Invariant rider: against the undefended model every per-token attack has
  // to cut its harmful loss to well under half the uniform-prompt value.
  runner.check("invariant", "attack more than halves the harmful loss",
               [&](std::string& detail) {
    if (!pipeline_ok) {
      detail = pipeline_error;
      return false;
    }
    std::ostringstream msg;
    msg << "worst final/initial ratio " << worst_loss_ratio;
    detail = msg.str();
    return worst_loss_ratio < 0.5;
  });

  // Invariant rider to the pipeline: attack runs that converge to
  // near-one-hot rows must reproduce their relaxed loss after discretization.
  runner.check("invariant", "discretization reproduces the relaxed loss on near-one-hot runs",
               [&](std::string& detail) {
    if (!pipeline_ok) {
      detail = pipeline_error;
      return false;
    }
    int qualifying = 0;
    bool ok = true;
    for (int id : bundled.model.vocab.harmful_ids) {
      const auto probes =
          mine_probe_contexts(bundled.model, bundled.corpus_ids, id, 1);
      if (probes.empty()) continue;
      const RelaxedPrompt init =
          RelaxedPrompt::one_hot(probes[0], bundled.model.vocab_size());
      const PgdPromptResult polished = pgd_prompt_minimize(
          bundled.model, {id}, init, 10, bundled.cfg.attack.step_size);
      double min_row_max = 1.0;
      for (Eigen::Index p = 0; p < polished.prompt.dist.rows(); ++p) {
        min_row_max =
            std::min(min_row_max, polished.prompt.dist.row(p).maxCoeff());
      }
      if (min_row_max < 0.99) continue;  // outside the invariant's condition
      ++qualifying;
      const double discrete = keyword_loss_on_prompt(
          bundled.model, discretize(polished.prompt), {id},
          LossKind::kHarmful);
      const double rel = std::abs(discrete - polished.loss_curve.back()) /
                         std::max(polished.loss_curve.back(), 1e-12);
      ok &= rel <= 0.10;
    }
    detail = std::to_string(qualifying) + " qualifying runs";
    return ok && qualifying > 0;
  });

  // ---------------------------------------------------------------- 10
  runner.criterion(10, "pcr raises forbidden perplexity more than benign",
                   [&](std::string& detail) {
    if (!pipeline_ok) {
      detail = pipeline_error;
      return false;
    }
    const double forbidden_ratio =
        unlearning.forbidden_after / unlearning.forbidden_before;
    const double benign_ratio =
        unlearning.benign_after / unlearning.benign_before;
    std::ostringstream msg;
    msg << "forbidden " << unlearning.forbidden_before << " -> "
        << unlearning.forbidden_after << " (x" << forbidden_ratio
        << "), benign x" << benign_ratio;
    detail = msg.str();
    return unlearning.forbidden_after > unlearning.forbidden_before &&
           forbidden_ratio > benign_ratio;
  });

  // ---------------------------------------------------------------- 11
  runner.criterion(11, "layer sweep has L rows and full-depth is no worse",
                   [&](std::string& detail) {
    const int L = bundled.model.num_layers();
    std::vector<std::vector<int>> probes;
    for (int id : bundled.model.vocab.harmful_ids) {
      const auto mined =
          mine_probe_contexts(bundled.model, bundled.corpus_ids, id,
                              bundled.cfg.pcr.max_probes_per_token);
      probes.insert(probes.end(), mined.begin(), mined.end());
    }
    PcrLayerInputs inputs;
    inputs.intervention_prompts = probes;
    for (int l = 0; l < L; ++l) {
      inputs.concepts_per_layer.push_back(
          extract_concepts(bundled.model, l, bundled.model.vocab.harmful_ids,
                           probes)
              .set);
    }
    SweepEvalInputs eval;
    eval.attacks =
        per_token_attack_specs(bundled.model.vocab, bundled.cfg.attack);
    eval.refusal_prompts = attack_prompts(bundled.model, eval.attacks);
    eval.refusal_horizon = bundled.cfg.eval_horizon;
    eval.refusal_ids = bundled.model.vocab.refusal_ids;
    std::vector<std::vector<int>> benign;
    split_forbidden_benign(bundled.corpus_ids, bundled.model.vocab,
                           &eval.forbidden_seqs, &benign);

    const SweepReport report =
        layer_sweep(bundled.model, inputs, bundled.cfg.pcr.solver, eval);
    std::ostringstream msg;
    msg << "asr by depth:";
    for (const auto& row : report.rows) msg << ' ' << row.asr;
    detail = msg.str();

    bool ok = static_cast<int>(report.rows.size()) == L;
    for (int k = 0; k < static_cast<int>(report.rows.size()); ++k) {
      ok &= report.rows[static_cast<std::size_t>(k)].layers_intervened ==
            k + 1;
    }
    ok &= report.rows.back().asr <= report.rows.front().asr;
    return ok;
  });

  // ---------------------------------------------------------------- 12
  runner.criterion(12, "identical config and seed give byte-identical artifacts",
                   [&](std::string& detail) {
    const auto base = fs::temp_directory_path() /
                      ("gradedit_accept_" + std::to_string(::getpid()));
    const fs::path out = base / "out";
    const char* names[] = {"weights.bin", "weights_edited.bin",
                           "intervention.json", "report.json", "report.csv"};

    // Two runs of the identical command sequence into the identical output
    // directory (wiped in between); artifacts must agree byte for byte.
    const std::string cfg_flag =
        "--config \"" + (g_data / "toy_experiment.json").string() + "\"" +
        " --out \"" + out.string() + "\"";
    std::vector<std::vector<std::uint8_t>> first_run;
    bool ok = true;
    for (int run = 0; run < 2 && ok; ++run) {
      fs::remove_all(out);
      fs::create_directories(out);
      ok &= run_cli("train " + cfg_flag) == 0;
      const int rc = run_cli("intervene " + cfg_flag);
      ok &= rc == 0 || rc == 3;
      ok &= run_cli("eval " + cfg_flag + " --intervention \"" +
                    (out / "intervention.json").string() + "\"") == 0;
      if (!ok) {
        detail = "a cli invocation failed";
        break;
      }
      for (std::size_t i = 0; i < 5; ++i) {
        const auto bytes = read_bytes(out / names[i]);
        if (bytes.empty()) {
          detail = std::string(names[i]) + " is missing";
          ok = false;
        } else if (run == 0) {
          first_run.push_back(bytes);
        } else if (bytes != first_run[i]) {
          detail = std::string(names[i]) + " differs between runs";
          ok = false;
        }
      }
    }
    fs::remove_all(base);
    return ok;
  });

  std::cout << (runner.failures == 0 ? "ALL CRITERIA PASSED"
                                     : "CRITERIA FAILED: " +
                                           std::to_string(runner.failures))
            << std::endl;
  return runner.failures == 0 ? 0 : 1;
}
