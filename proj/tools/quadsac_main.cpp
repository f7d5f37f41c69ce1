#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "quadsac/checkpoint.hpp"
#include "quadsac/config.hpp"
#include "quadsac/episode_log.hpp"
#include "quadsac/format.hpp"
#include "quadsac/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace quadsac;

ExperimentConfig load_config_or_default(const std::string& path) {
  return path.empty() ? default_experiment_config() : parse_config_file(path);
}

int run_train(const std::string& config_path, std::int64_t seed_override,
              const std::string& out_override) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (seed_override >= 0) cfg.train.seed = static_cast<std::uint64_t>(seed_override);
  if (!out_override.empty()) cfg.train.out_dir = out_override;
  const TrainResult result = train(cfg);
  std::cout << "trained " << result.env_steps << " env steps\n"
            << "checkpoint: " << result.final_checkpoint_path << "\n"
            << "learning curve: " << result.curve_path << "\n";
  return 0;
}

int run_eval(const std::string& kind_str, const std::string& checkpoint_path,
             const std::string& config_path, double speed, int episodes,
             std::uint64_t seed, const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_or_default(config_path);
  const SacAgent agent = load_checkpoint(checkpoint_path).agent;
  fs::create_directories(out_dir);
  if (kind_str == "fixed") {
    const EvalSummary summary =
        evaluate_fixed(agent, cfg, episodes, seed, cfg.env.max_steps_eval);
    for (std::size_t e = 0; e < summary.episodes.size(); ++e) {
      std::string name = "eval_fixed_ep" + std::to_string(e) + ".csv";
      write_episode_csv((fs::path(out_dir) / name).string(), summary.episodes[e]);
    }
    std::cout << "episodes: " << summary.episodes.size() << "\n"
              << "mean total reward: " << format_double(summary.mean_reward) << "\n"
              << "completed (no radius exit): " << summary.completed << "/"
              << summary.episodes.size() << "\n";
    return 0;
  }
  const PathKind kind = path_kind_from_string(kind_str);
  const EpisodeRecord rec = evaluate_path(agent, cfg, kind, speed);
  const std::string name = "eval_" + kind_str + "_v" + format_double(speed) + ".csv";
  const std::string path = (fs::path(out_dir) / name).string();
  write_episode_csv(path, rec);
  double tail_err = 0.0;
  const int tail = std::min<int>(100, static_cast<int>(rec.rows.size()));
  for (int i = 0; i < tail; ++i) {
    const EpisodeStepRow& row = rec.rows[rec.rows.size() - 1 - i];
    tail_err += (row.target - row.position).norm();
  }
  if (tail > 0) tail_err /= tail;
  std::cout << "steps: " << rec.steps << "\n"
            << "total reward: " << format_double(rec.total_reward) << "\n"
            << "terminated early: " << (rec.terminated ? "yes" : "no") << "\n"
            << "mean tracking error, final " << tail << " steps: " << format_double(tail_err)
            << " m\n"
            << "trajectory: " << path << "\n";
  return 0;
}

int run_robustness(const std::string& checkpoint_path, const std::string& config_path,
                   const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_or_default(config_path);
  const SacAgent agent = load_checkpoint(checkpoint_path).agent;
  fs::create_directories(out_dir);
  std::vector<RobustnessRow> rows;
  const RobustnessReport report =
      robustness_sweep(agent, cfg, default_robustness_grid(), &rows);
  const std::string path = (fs::path(out_dir) / "robustness.csv").string();
  write_robustness_csv(path, rows);
  std::cout << "episodes: " << report.episode_count << "\n"
            << "successes: " << report.success_count << "\n"
            << "success rate: " << format_double(report.success_rate) << "\n"
            << "median total reward: " << format_double(report.median_total_reward) << "\n"
            << "mean total reward: " << format_double(report.mean_total_reward) << "\n"
            << "per-episode table: " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-level quadrotor control learned with soft actor-critic"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "Train a policy from a TOML config");
  std::string train_config;
  std::int64_t train_seed = -1;
  std::string train_out;
  train_cmd->add_option("--config", train_config, "experiment config (TOML)")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_seed, "override [train] seed");
  train_cmd->add_option("--out", train_out, "override [train] out_dir");

  auto* eval_cmd = app.add_subcommand("eval", "Fly the deterministic policy");
  std::string eval_kind, eval_checkpoint, eval_config, eval_out = "eval_out";
  double eval_speed = 0.2;
  int eval_episodes = 5;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("kind", eval_kind, "fixed, line, square, or sinusoid")
      ->required()
      ->check(CLI::IsMember({"fixed", "line", "square", "sinusoid"}));
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "agent checkpoint (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--config", eval_config, "experiment config (TOML); defaults used if omitted")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--speed", eval_speed, "target speed for moving paths (m/s)");
  eval_cmd->add_option("--episodes", eval_episodes, "episode count (fixed target only)");
  eval_cmd->add_option("--seed", eval_seed, "start-pose sampling seed (fixed target only)");
  eval_cmd->add_option("--out", eval_out, "directory for trajectory CSVs");

  auto* rob_cmd = app.add_subcommand("robustness", "Sweep the extreme-initialization grid");
  std::string rob_checkpoint, rob_config, rob_out = "eval_out";
  rob_cmd->add_option("--checkpoint", rob_checkpoint, "agent checkpoint (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  rob_cmd->add_option("--config", rob_config, "experiment config (TOML); defaults used if omitted")
      ->check(CLI::ExistingFile);
  rob_cmd->add_option("--out", rob_out, "directory for the per-episode CSV");

  auto* params_cmd = app.add_subcommand("params", "Configuration utilities");
  params_cmd->require_subcommand(1);
  auto* show_cmd = params_cmd->add_subcommand("show", "Print the full default config as TOML");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train_config, train_seed, train_out);
    if (*eval_cmd) {
      return run_eval(eval_kind, eval_checkpoint, eval_config, eval_speed, eval_episodes,
                      eval_seed, eval_out);
    }
    if (*rob_cmd) return run_robustness(rob_checkpoint, rob_config, rob_out);
    if (*show_cmd) {
      std::cout << config_to_toml(default_experiment_config());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
