// pcvx command line: train the multi-agent allocator, evaluate allocators
// over payload sweeps, run baselines and the invariant selftest.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pcvx/config.hpp"
#include "pcvx/harness.hpp"
#include "pcvx/selftest.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> m;
  std::optional<long long> payload_bytes;
  std::optional<std::string> allocator;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_allocator) {
  cmd->add_option("--config", opts.config_path, "configuration file (defaults when omitted)");
  cmd->add_option("--seed", opts.seed, "master random seed");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--m", opts.m, "number of V2N links / sub-bands");
  cmd->add_option("--payload-bytes", opts.payload_bytes, "payload size in bytes");
  if (with_allocator)
    cmd->add_option("--allocator", opts.allocator, "allocator: rl|exhaustive|random");
}

pcvx::ExperimentConfig make_config(const CommonOpts& opts) {
  pcvx::ExperimentConfig cfg = opts.config_path.empty()
                                   ? pcvx::ExperimentConfig{}
                                   : pcvx::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.m) cfg.env.num_v2n = *opts.m;
  if (opts.allocator) cfg.allocators = {pcvx::parse_allocator(*opts.allocator)};
  cfg.env.validate();
  return cfg;
}

std::vector<double> payload_list(const pcvx::ExperimentConfig& cfg, const CommonOpts& opts) {
  if (opts.payload_bytes) return {static_cast<double>(*opts.payload_bytes)};
  return cfg.payload_sweep_bytes;
}

int cmd_train(const CommonOpts& opts) {
  pcvx::ExperimentConfig cfg = make_config(opts);
  if (opts.payload_bytes) cfg.env.payload_bits = 8.0 * *opts.payload_bytes;
  std::cerr << "training " << cfg.env.num_platoons << " agents for " << cfg.train.episodes
            << " episodes (M=" << cfg.env.num_v2n << ", seed=" << cfg.seed << ") -> "
            << cfg.output_dir << "\n";
  pcvx::run_training(cfg, &std::cerr);
  std::cerr << "checkpoints written to " << cfg.output_dir << "\n";
  return 0;
}

int run_allocators(const pcvx::ExperimentConfig& cfg, const std::vector<double>& payloads,
                   const std::string& csv_name, bool train_rl_first) {
  std::vector<pcvx::MetricsRecord> records;
  for (pcvx::Allocator allocator : cfg.allocators) {
    std::vector<pcvx::Agent> agents;
    const std::vector<pcvx::Agent>* agents_ptr = nullptr;
    if (allocator == pcvx::Allocator::kRl) {
      if (train_rl_first) {
        std::cerr << "training rl agents (" << cfg.train.episodes << " episodes)\n";
        pcvx::run_training(cfg, &std::cerr);
      }
      agents = pcvx::load_agents(cfg.output_dir, cfg);
      agents_ptr = &agents;
    }
    std::cerr << "evaluating " << pcvx::allocator_name(allocator) << " over " << payloads.size()
              << " payload point(s), " << cfg.eval_episodes << " episodes each\n";
    for (pcvx::MetricsRecord& r :
         pcvx::run_evaluation(cfg, allocator, agents_ptr, payloads, &std::cerr))
      records.push_back(std::move(r));
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::string csv_path = (std::filesystem::path(cfg.output_dir) / csv_name).string();
  pcvx::write_metrics_csv(csv_path, records);
  std::cerr << "wrote " << records.size() << " record(s) to " << csv_path << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& opts) {
  pcvx::ExperimentConfig cfg = make_config(opts);
  if (!opts.allocator) cfg.allocators = {pcvx::Allocator::kRl};
  return run_allocators(cfg, payload_list(cfg, opts), "eval.csv", /*train_rl_first=*/false);
}

int cmd_sweep(const CommonOpts& opts) {
  const pcvx::ExperimentConfig cfg = make_config(opts);
  return run_allocators(cfg, payload_list(cfg, opts), "sweep.csv", /*train_rl_first=*/true);
}

int cmd_baseline(const CommonOpts& opts) {
  pcvx::ExperimentConfig cfg = make_config(opts);
  if (!opts.allocator) cfg.allocators = {pcvx::Allocator::kExhaustive, pcvx::Allocator::kRandom};
  for (pcvx::Allocator a : cfg.allocators)
    if (a == pcvx::Allocator::kRl)
      throw std::runtime_error("baseline: use the eval subcommand for the rl allocator");
  return run_allocators(cfg, payload_list(cfg, opts), "baseline.csv", /*train_rl_first=*/false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"platoon C-V2X spectrum-sharing simulator"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, sweep_opts, baseline_opts;
  CLI::App* train = app.add_subcommand("train", "train the multi-agent allocator");
  add_common(train, train_opts, /*with_allocator=*/false);
  CLI::App* eval = app.add_subcommand("eval", "evaluate an allocator over the payload sweep");
  add_common(eval, eval_opts, /*with_allocator=*/true);
  CLI::App* sweep =
      app.add_subcommand("sweep", "train, then evaluate every configured allocator");
  add_common(sweep, sweep_opts, /*with_allocator=*/true);
  CLI::App* baseline = app.add_subcommand("baseline", "run the centralized baselines only");
  add_common(baseline, baseline_opts, /*with_allocator=*/true);
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
  CLI::App* dump = app.add_subcommand("config", "print the default configuration file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (eval->parsed()) return cmd_eval(eval_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (baseline->parsed()) return cmd_baseline(baseline_opts);
    if (selftest->parsed()) return pcvx::run_selftest(std::cout) ? 0 : 1;
    if (dump->parsed()) {
      std::cout << pcvx::default_config_text();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
