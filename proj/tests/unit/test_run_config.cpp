#include <gtest/gtest.h>

#include "gdpnet/errors.hpp"
#include "gdpnet/run_config.hpp"

using namespace gdpnet;
using namespace gdpnet::cli;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RunConfig, DefaultsFollowFirstProfile) {
  const auto rc = parse_run_config("");
  EXPECT_EQ(rc.profile, "dialogre");
  EXPECT_EQ(rc.model.node_width, 300u);
  EXPECT_FALSE(rc.synthetic.has_value());
  EXPECT_FALSE(rc.uses_files());
  EXPECT_EQ(rc.analyze_split, "test");
}

TEST(RunConfig, ParsesEveryKind) {
  const auto rc = parse_run_config(
      "# comment line\n"
      "  profile = tacred\n"
      "node_width=32   # trailing comment\n"
      "ratio = 0.5\n"
      "adjacency_norm = row_sum\n"
      "regenerate_edges = true\n"
      "seed = 18446744073709551615\n"
      "\n"
      "train_file = /data/train.gdeb\n"
      "checkpoint = out/model.ckpt\n"
      "target_dev_accuracy = 0.9\n"
      "eval_threads = 4\n"
      "analyze_split = dev\n");
  EXPECT_EQ(rc.profile, "tacred");
  EXPECT_EQ(rc.model.node_width, 32u);
  EXPECT_DOUBLE_EQ(rc.model.ratio, 0.5);
  EXPECT_DOUBLE_EQ(rc.model.dtw_weight, 2e-4);  // from the profile
  EXPECT_EQ(rc.model.adjacency_norm, graph::AdjacencyNorm::RowSum);
  EXPECT_TRUE(rc.model.regenerate_edges);
  EXPECT_EQ(rc.model.seed, UINT64_MAX);
  EXPECT_EQ(*rc.train_file, "/data/train.gdeb");
  EXPECT_EQ(*rc.checkpoint, "out/model.ckpt");
  EXPECT_DOUBLE_EQ(*rc.target_dev_accuracy, 0.9);
  EXPECT_EQ(rc.eval_threads, 4u);
  EXPECT_EQ(rc.analyze_split, "dev");
  EXPECT_TRUE(rc.uses_files());
}

TEST(RunConfig, ProfileAppliesBeforeOverridesWhateverTheOrder) {
  const auto rc = parse_run_config("ratio = 0.3\nprofile = tacred\n");
  EXPECT_DOUBLE_EQ(rc.model.ratio, 0.3);
  EXPECT_EQ(rc.model.batch_size, 32u);
}

TEST(RunConfig, SyntheticKeys) {
  const auto rc = parse_run_config("synth_vocab = 50\nsynth_seed = 9\nsynth_train_size = 10\n");
  ASSERT_TRUE(rc.synthetic.has_value());
  EXPECT_EQ(rc.synthetic->vocab, 50u);
  EXPECT_EQ(rc.synthetic->seed, 9u);
  EXPECT_EQ(rc.synthetic->train_size, 10u);
  EXPECT_EQ(rc.synthetic->relations, 4u);
}

TEST(RunConfig, ErrorsNameKeyAndLine) {
  EXPECT_NE(error_of("ratio = 0.5\nbogus = 1\n").find("line 2: unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(error_of("seed = 1\nseed = 2\n").find("duplicate key 'seed'"), std::string::npos);
  EXPECT_NE(error_of("views = three\n").find("key 'views'"), std::string::npos);
  EXPECT_NE(error_of("views = -1\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("just text\n").find("expected 'key = value'"), std::string::npos);
  EXPECT_NE(error_of("= 3\n").find("empty key"), std::string::npos);
  EXPECT_NE(error_of("ratio =\n").find("has no value"), std::string::npos);
  EXPECT_NE(error_of("profile = other\n").find("unknown profile"), std::string::npos);
  EXPECT_NE(error_of("adjacency_norm = l2\n").find("adjacency_norm"), std::string::npos);
  EXPECT_NE(error_of("regenerate_edges = maybe\n").find("not a boolean"), std::string::npos);
  EXPECT_NE(error_of("target_dev_accuracy = 1.5\n").find("(0, 1]"), std::string::npos);
  EXPECT_NE(error_of("analyze_split = all\n").find("train, dev or test"), std::string::npos);
  EXPECT_NE(error_of("ratio = 0.5x\n").find("not a number"), std::string::npos);
}

TEST(RunConfig, CrossKeyErrors) {
  EXPECT_NE(error_of("train_file = a\nsynth_vocab = 50\n").find("pick one"), std::string::npos);
  EXPECT_NE(error_of("synth_vocab = 5\n").find("vocabulary"), std::string::npos);
  EXPECT_FALSE(error_of("gradcheck_step = 0\n").empty());
  EXPECT_FALSE(error_of("eval_threads = 0\n").empty());
  EXPECT_FALSE(error_of("gradcheck_examples = 0\n").empty());
}

TEST(RunConfig, MissingFile) {
  EXPECT_THROW(load_run_config("/nonexistent/run.cfg"), ConfigError);
}

TEST(RunConfig, GradcheckKeys) {
  const auto defaults = parse_run_config("");
  EXPECT_DOUBLE_EQ(defaults.gradcheck_step, 1e-3);
  EXPECT_TRUE(defaults.gradcheck_freeze_branches);
  EXPECT_TRUE(defaults.gradcheck_five_point);
  EXPECT_TRUE(defaults.gradcheck_adaptive_step);
  const auto rc = parse_run_config(
      "gradcheck_step = 1e-5\ngradcheck_freeze_branches = no\ngradcheck_five_point = 0\n"
      "gradcheck_adaptive_step = false\ngradcheck_tolerance = 1e-3\n");
  EXPECT_DOUBLE_EQ(rc.gradcheck_step, 1e-5);
  EXPECT_FALSE(rc.gradcheck_freeze_branches);
  EXPECT_FALSE(rc.gradcheck_five_point);
  EXPECT_FALSE(rc.gradcheck_adaptive_step);
  EXPECT_DOUBLE_EQ(rc.gradcheck_tolerance, 1e-3);
}
