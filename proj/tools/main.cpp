#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowcritic/analysis/checks.hpp"
#include "flowcritic/common/errors.hpp"
#include "flowcritic/experiments/run.hpp"
#include "flowcritic/experiments/toy.hpp"
#include "flowcritic/rl/config.hpp"

namespace {

namespace fs = std::filesystem;
using flowcritic::NumericError;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCheckFailure = 3;

std::string default_run_dir(const std::string& fallback) {
  if (const char* env = std::getenv("FLOWCRITIC_RUN_DIR")) return env;
  return fallback;
}

// Shared training flags; remembers which were set so file values are only
// overridden by flags the user actually passed.
struct TrainFlags {
  std::string env, critic, run_dir, config_path;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  double alpha = 0, delta = 0, lr = 0, gamma = 0, lambda = 0, clip = 0;
  int n_samples = 0, m_trunc = 0, num_envs = 0, rollout_len = 0, epochs = 0,
      minibatches = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--env", env, "environment name");
    cmd->add_option("--critic", critic,
                    "flow | point | avg_ensemble | min_ensemble | quantile");
    cmd->add_option("--seed", seed, "global seed");
    cmd->add_option("--steps", steps, "environment-step budget");
    cmd->add_option("--alpha", alpha, "CoV temperature");
    cmd->add_option("--delta", delta, "velocity clipping threshold");
    cmd->add_option("--n-samples", n_samples, "generated value estimates");
    cmd->add_option("--m-trunc", m_trunc, "truncated sample size");
    cmd->add_option("--num-envs", num_envs, "parallel environments");
    cmd->add_option("--rollout-len", rollout_len, "rollout length");
    cmd->add_option("--epochs", epochs, "epochs per iteration");
    cmd->add_option("--minibatches", minibatches, "minibatches per epoch");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--gamma", gamma, "discount factor");
    cmd->add_option("--lambda", lambda, "GAE parameter");
    cmd->add_option("--clip", clip, "PPO clip ratio");
    cmd->add_option("--run-dir", run_dir, "output directory");
    cmd->add_option("--config", config_path, "JSON config file");
  }

  // defaults <- config file <- explicitly passed flags
  flowcritic::rl::TrainConfig resolve(const CLI::App* cmd) const {
    flowcritic::rl::TrainConfig cfg;
    if (!config_path.empty())
      cfg = flowcritic::rl::TrainConfig::from_json_file(config_path);
    auto set = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (set("--env")) cfg.env_name = env;
    if (set("--critic"))
      cfg.critic_kind = flowcritic::rl::critic_kind_from_string(critic);
    if (set("--seed")) cfg.seed = seed;
    if (set("--steps")) cfg.total_steps = steps;
    if (set("--alpha")) cfg.cov_temperature = alpha;
    if (set("--delta")) cfg.velocity_clip = delta;
    if (set("--n-samples")) cfg.n_value_samples = n_samples;
    if (set("--m-trunc")) cfg.truncation = m_trunc;
    if (set("--num-envs")) cfg.num_envs = num_envs;
    if (set("--rollout-len")) cfg.rollout_len = rollout_len;
    if (set("--epochs")) cfg.epochs = epochs;
    if (set("--minibatches")) cfg.minibatches = minibatches;
    if (set("--lr")) cfg.learning_rate = lr;
    if (set("--gamma")) cfg.gamma = gamma;
    if (set("--lambda")) cfg.lambda = lambda;
    if (set("--clip")) cfg.ppo_clip = clip;
    if (set("--run-dir")) cfg.run_dir = run_dir;
    cfg.validate();
    return cfg;
  }
};

int cmd_train(const flowcritic::rl::TrainConfig& cfg) {
  std::string run_dir = cfg.run_dir;
  if (run_dir.empty())
    run_dir = default_run_dir("runs/train-" + cfg.env_name + "-" +
                              flowcritic::rl::to_string(cfg.critic_kind) +
                              "-seed" + std::to_string(cfg.seed));
  const auto summary = flowcritic::experiments::run_training(cfg, run_dir);
  std::cout << "run dir: " << run_dir << "\n"
            << "iterations: " << summary.history.size() << "\n"
            << "final-10% mean episode return: " << summary.final_return
            << "\n";
  if (summary.numeric_failure) {
    std::cerr << "numeric failure: iteration aborted, partial artifacts kept\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_toy(const flowcritic::experiments::ToyConfig& cfg,
            std::string run_dir) {
  if (run_dir.empty())
    run_dir = default_run_dir("runs/toy-seed" + std::to_string(cfg.seed));

  // Echo the effective settings before any computation.
  fs::create_directories(run_dir);
  {
    std::ofstream echo(fs::path(run_dir) / "config.json");
    echo << "{\n"
         << "  \"seed\": " << cfg.seed << ",\n"
         << "  \"train_samples\": " << cfg.train_samples << ",\n"
         << "  \"iter_samples\": " << cfg.iteration_samples << ",\n"
         << "  \"epochs\": " << cfg.epochs << ",\n"
         << "  \"batch_size\": " << cfg.batch_size << ",\n"
         << "  \"lr\": " << cfg.learning_rate << ",\n"
         << "  \"delta\": " << cfg.velocity_clip << ",\n"
         << "  \"eval_samples\": " << cfg.eval_samples << ",\n"
         << "  \"eval_truncation\": " << cfg.eval_truncation << ",\n"
         << "  \"grid_n\": " << cfg.grid_n << "\n"
         << "}\n";
  }

  const auto result = flowcritic::experiments::run_toy_experiment(cfg);
  flowcritic::experiments::write_toy_outputs(result, cfg, run_dir);

  struct Line {
    const char* name;
    bool pass;
  } lines[] = {
      {"point_max_error_disk > 0.15", result.point_max_disk_error_exceeds(0.15)},
      {"flow_mae_disk < point_mae_disk", result.flow_mae_below_point_in_disk()},
      {"cov_disk_mean > cov_train_ring_mean", result.cov_disk_above_train_ring()},
      {"cov_outside_mean > cov_train_mean", result.cov_outside_above_train()},
  };
  std::cout << "run dir: " << run_dir << "\n";
  std::printf("point  disk mae %.4f max %.4f | flow disk mae %.4f max %.4f\n",
              result.point_stats[0].mean, result.point_stats[0].max,
              result.flow_stats[0].mean, result.flow_stats[0].max);
  std::printf("cov    disk %.4f | train ring %.4f | outside %.4f\n",
              result.cov_stats[0].mean, result.cov_stats[1].mean,
              result.cov_stats[2].mean);
  bool all = true;
  for (const Line& line : lines) {
    std::printf("%-38s %s\n", line.name, line.pass ? "PASS" : "FAIL");
    all = all && line.pass;
  }
  return all ? kExitOk : kExitCheckFailure;
}

int cmd_checks(const flowcritic::analysis::CheckConfig& cfg) {
  std::printf("convergence bound eps_max/(1-gamma) = %.6g\n",
              cfg.eps_max / (1.0 - cfg.gamma));
  const auto results = flowcritic::analysis::run_theory_checks(cfg);
  bool any_failed = false;
  for (const auto& r : results) {
    const char* status =
        r.pass ? "PASS" : (r.inconclusive ? "INCONCLUSIVE" : "FAIL");
    std::printf("%-32s %-12s %s\n", r.name.c_str(), status, r.detail.c_str());
    any_failed = any_failed || r.failed();
  }
  return any_failed ? kExitCheckFailure : kExitOk;
}

int cmd_bench(const flowcritic::rl::TrainConfig& base, int num_seeds,
              std::string run_dir) {
  if (run_dir.empty())
    run_dir = default_run_dir("runs/bench-" + base.env_name);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < num_seeds; ++i) seeds.push_back(base.seed + i);

  const auto rows = flowcritic::experiments::run_bench(base, seeds, run_dir);
  const std::string table = flowcritic::experiments::bench_table(rows);
  fs::create_directories(run_dir);
  std::ofstream(fs::path(run_dir) / "summary.txt") << table;
  std::cout << table;
  std::cout << "run dir: " << run_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FlowCritic: generative value estimation for policy-gradient RL"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train a policy with one critic");
  TrainFlags train_flags;
  train_flags.add_to(train);

  auto* toy = app.add_subcommand(
      "toy", "single-step value-estimation study with CSV maps");
  flowcritic::experiments::ToyConfig toy_cfg;
  std::string toy_run_dir;
  toy->add_option("--seed", toy_cfg.seed, "global seed");
  toy->add_option("--samples", toy_cfg.train_samples, "total training samples");
  toy->add_option("--iter-samples", toy_cfg.iteration_samples,
                  "fresh samples per iteration");
  toy->add_option("--epochs", toy_cfg.epochs, "epochs per iteration");
  toy->add_option("--batch", toy_cfg.batch_size, "minibatch size");
  toy->add_option("--lr", toy_cfg.learning_rate, "learning rate");
  toy->add_option("--eval-n", toy_cfg.eval_samples, "evaluation sample count");
  toy->add_option("--eval-m", toy_cfg.eval_truncation, "evaluation truncation");
  toy->add_option("--delta", toy_cfg.velocity_clip, "velocity clip threshold");
  toy->add_option("--run-dir", toy_run_dir, "output directory");

  auto* checks = app.add_subcommand("checks", "numerical theory-check suite");
  flowcritic::analysis::CheckConfig check_cfg;
  checks->add_option("--seed", check_cfg.seed, "global seed");
  checks->add_option("--gamma", check_cfg.gamma, "discount for convergence runs");
  checks->add_option("--eps-max", check_cfg.eps_max, "injected perturbation bound");
  checks->add_option("--trials", check_cfg.variance_trials,
                     "Monte-Carlo trials for the variance check");
  checks->add_option("--cases", check_cfg.contraction_cases,
                     "random MDP cases for the contraction sweep");

  auto* bench = app.add_subcommand(
      "bench", "compare all five critics over several seeds");
  TrainFlags bench_flags;
  bench_flags.add_to(bench);
  int bench_seeds = 3;
  bench->add_option("--seeds", bench_seeds, "number of seeds per critic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_flags.resolve(train));
    if (toy->parsed()) return cmd_toy(toy_cfg, toy_run_dir);
    if (checks->parsed()) return cmd_checks(check_cfg);
    if (bench->parsed())
      return cmd_bench(bench_flags.resolve(bench), bench_seeds,
                       bench_flags.run_dir);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
