// gdpnet <train|eval|analyze|gradcheck|synth> --config PATH [--checkpoint PATH] [--seed N]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gdpnet/commands.hpp"
#include "gdpnet/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Latent multi-view graph relation classifier"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string checkpoint;
  std::uint64_t seed = 0;

  const char* commands[][2] = {
      {"train", "Train a model and write a checkpoint plus metrics log"},
      {"eval", "Micro-F1 on the test split"},
      {"analyze", "Token selection rates of the final pooled graph"},
      {"gradcheck", "Finite-difference check of the full loss on a tiny configuration"},
      {"synth", "Write a synthetic planted-trigger task as embedding files"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Flat key = value config file")->required();
    sub->add_option("--checkpoint", checkpoint, "Checkpoint path, overrides the config");
    sub->add_option("--seed", seed, "Seed, overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gdpnet::cli::kExitBadInput;
  }

  gdpnet::cli::CommandOptions opts;
  opts.config = config;
  if (!checkpoint.empty()) opts.checkpoint = checkpoint;
  for (const auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opts.seed = seed;
  }
  std::cerr << "kernels: " << gdpnet::kernels::backend_name(gdpnet::kernels::active_backend())
            << '\n';
  return gdpnet::cli::run_command(app.get_subcommands().front()->get_name(), opts, std::cout,
                                  std::cerr);
}
