#pragma once

// Flat `key = value` run configuration. Lines starting with '#' (after
// optional whitespace) and blank lines are ignored; trailing `# ...` after a
// value is a comment too. Unknown keys, duplicate keys and malformed values
// raise ConfigError naming the key and line.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "gdpnet/model.hpp"
#include "gdpnet/synthetic.hpp"

namespace gdpnet::cli {

struct RunConfig {
  std::string profile = "dialogre";
  model::ModelConfig model;  // input_width and classes are filled from the data

  // Exactly one data source per run.
  std::optional<std::filesystem::path> train_file;
  std::optional<std::filesystem::path> dev_file;
  std::optional<std::filesystem::path> test_file;
  std::optional<data::SyntheticTask> synthetic;

  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> metrics_log;
  std::optional<std::filesystem::path> out_train;
  std::optional<std::filesystem::path> out_dev;
  std::optional<std::filesystem::path> out_test;

  std::optional<double> target_dev_accuracy;
  std::size_t eval_threads = 1;
  std::string analyze_split = "test";
  double gradcheck_step = 1e-3;
  double gradcheck_tolerance = 1e-4;
  bool gradcheck_freeze_branches = true;
  bool gradcheck_five_point = true;
  bool gradcheck_adaptive_step = true;
  std::size_t gradcheck_examples = 1;

  bool uses_files() const noexcept { return train_file || dev_file || test_file; }
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace gdpnet::cli
