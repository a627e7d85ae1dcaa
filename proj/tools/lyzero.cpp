#include <iostream>

#include <CLI11.hpp>

#include "lyzero/cli.hpp"
#include "lyzero/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lee-Yang zeros of Ising baths and their probe-spin signatures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  std::uint64_t seed = lyzero::RunOptions{}.seed;
  std::string weights_path;
  bool dump_config = false;

  app.add_option("--config", config_path, "JSON experiment config (defaults to the figure setup)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_flag("--dump-config", dump_config, "print the resolved config and exit");

  auto* weights = app.add_subcommand("weights", "sector weights per temperature");
  auto* zeros = app.add_subcommand("zeros", "Lee-Yang zeros per temperature");
  auto* dynamics = app.add_subcommand("dynamics", "probe correlators and concurrence over time");
  auto* verify = app.add_subcommand("verify", "check invariants and the brute-force oracle");
  verify->add_option("--weights", weights_path, "also check this weights.json");
  auto* figures = app.add_subcommand("figures", "signal traces and detected zeros for the ring");

  CLI11_PARSE(app, argc, argv);

  try {
    const lyzero::ExperimentConfig config = config_path.empty()
                                                ? lyzero::ExperimentConfig::figure_defaults()
                                                : lyzero::load_config(config_path);
    if (dump_config) {
      std::cout << lyzero::serialize_config(config).dump(2) << '\n';
      return 0;
    }
    lyzero::RunOptions options;
    options.out_dir = out_dir.empty() ? config.output_dir : out_dir;
    options.threads = threads;
    options.seed = seed;
    if (!weights_path.empty()) options.weights_file = weights_path;

    if (weights->parsed()) return lyzero::cmd_weights(config, options, std::cout);
    if (zeros->parsed()) return lyzero::cmd_zeros(config, options, std::cout);
    if (dynamics->parsed()) return lyzero::cmd_dynamics(config, options, std::cout);
    if (verify->parsed()) return lyzero::cmd_verify(config, options, std::cout);
    if (figures->parsed()) return lyzero::cmd_figures(config, options, std::cout);
  } catch (const lyzero::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
