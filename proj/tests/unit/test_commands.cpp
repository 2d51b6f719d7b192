#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gdpnet/commands.hpp"
#include "gdpnet/data.hpp"
#include "gdpnet/param_store.hpp"

using namespace gdpnet;
using namespace gdpnet::cli;
namespace fs = std::filesystem;

namespace {

// Replaces (or appends) `key = value` lines in a flat config text.
std::string with(std::string text, std::initializer_list<std::pair<std::string, std::string>> kv) {
  for (const auto& [key, value] : kv) {
    const auto at = text.find(key + " = ");
    if (at != std::string::npos) text.erase(at, text.find('\n', at) - at + 1);
    text += key + " = " + value + "\n";
  }
  return text;
}

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gdpnet_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& command, const fs::path& cfg, std::optional<std::uint64_t> seed = {}) {
    out_.str("");
    err_.str("");
    CommandOptions o;
    o.config = cfg;
    o.seed = seed;
    return run_command(command, o, out_, err_);
  }

  std::string tiny_model() const {
    return "node_width = 8\ngaussian_width = 4\nviews = 2\nstages = 2\nratio = 0.5\n"
           "epochs = 2\nbatch_size = 4\nlearning_rate = 0.01\ndropout = 0.2\n";
  }
  std::string tiny_synth() const {
    return "synth_vocab = 30\nsynth_relations = 2\nsynth_triggers = 2\nsynth_min_length = 3\n"
           "synth_max_length = 6\nsynth_train_size = 12\nsynth_dev_size = 6\nsynth_test_size = 6\n"
           "synth_embedding_width = 5\n";
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Commands, SynthTrainEvalAnalyzeOnFiles) {
  const auto synth = write_config("synth.cfg", tiny_synth() + "out_train = " + (dir_ / "train.gdeb").string() +
                                                   "\nout_dev = " + (dir_ / "dev.gdeb").string() +
                                                   "\nout_test = " + (dir_ / "test.gdeb").string() + "\n");
  ASSERT_EQ(run("synth", synth), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("train n=12 no_relation="), std::string::npos);
  EXPECT_EQ(data::load_embedding_file(dir_ / "dev.gdeb").examples.size(), 6u);

  const auto files = "train_file = " + (dir_ / "train.gdeb").string() + "\ndev_file = " +
                     (dir_ / "dev.gdeb").string() + "\ntest_file = " + (dir_ / "test.gdeb").string() + "\n";
  const auto cfg = write_config("run.cfg", tiny_model() + files + "checkpoint = " + (dir_ / "m.ckpt").string() +
                                               "\nmetrics_log = " + (dir_ / "log.csv").string() + "\n");
  ASSERT_EQ(run("train", cfg), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "m.ckpt"));
  std::ifstream log(dir_ / "log.csv");
  std::string header, line;
  std::getline(log, header);
  EXPECT_EQ(header, "epoch,split,loss,cse,dtw,f1,mean_r_real");
  std::size_t lines = 0;
  while (std::getline(log, line)) ++lines;
  EXPECT_EQ(lines, 4u);  // train + dev per epoch

  ASSERT_EQ(run("eval", cfg), kExitOk) << err_.str();
  EXPECT_EQ(out_.str().rfind("pr=", 0), 0u);
  EXPECT_NE(out_.str().find(" f1="), std::string::npos);

  ASSERT_EQ(run("analyze", cfg), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("trigger"), std::string::npos);
  EXPECT_NE(out_.str().find("repetitive"), std::string::npos);
}

TEST_F(Commands, TrainIsDeterministicAndSeedOverrides) {
  const auto cfg = write_config("run.cfg", tiny_model() + tiny_synth() + "checkpoint = " +
                                               (dir_ / "a.ckpt").string() + "\n");
  ASSERT_EQ(run("train", cfg), kExitOk) << err_.str();
  const auto first = out_.str();
  const auto a = load_checkpoint(dir_ / "a.ckpt");
  ASSERT_EQ(run("train", cfg), kExitOk);
  EXPECT_EQ(out_.str(), first);
  const auto b = load_checkpoint(dir_ / "a.ckpt");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.entries()[i].value, b.entries()[i].value);
  ASSERT_EQ(run("train", cfg, 7), kExitOk);
  EXPECT_NE(out_.str(), first);
}

TEST_F(Commands, GradcheckPasses) {
  const auto cfg = write_config("g.cfg", tiny_model() + tiny_synth() + "dtw_weight = 0.001\ngradcheck_examples = 2\n");
  ASSERT_EQ(run("gradcheck", cfg), kExitOk) << out_.str() << err_.str();
  EXPECT_NE(out_.str().find("gradcheck passed"), std::string::npos);
}

TEST_F(Commands, GradcheckRejectsLongSequences) {
  const auto cfg = write_config("g.cfg", with(tiny_model() + tiny_synth(), {{"synth_max_length", "11"}, {"synth_min_length", "11"}}));
  EXPECT_EQ(run("gradcheck", cfg), kExitBadInput);
  EXPECT_NE(err_.str().find("at most 10 tokens"), std::string::npos);
}

TEST_F(Commands, InputErrorsExitTwo) {
  EXPECT_EQ(run("train", dir_ / "missing.cfg"), kExitBadInput);
  EXPECT_EQ(run("train", write_config("u.cfg", "no_such_key = 1\n")), kExitBadInput);
  EXPECT_NE(err_.str().find("unknown key"), std::string::npos);
  EXPECT_EQ(run("train", write_config("nodata.cfg", tiny_model() + "checkpoint = " + (dir_ / "c").string() + "\n")),
            kExitBadInput);
  EXPECT_EQ(run("train", write_config("nockpt.cfg", tiny_model() + tiny_synth())), kExitBadInput);
  EXPECT_EQ(run("train", write_config("baddir.cfg", tiny_model() + tiny_synth() + "checkpoint = " +
                                                        (dir_ / "nope" / "c").string() + "\n")),
            kExitBadInput);
  EXPECT_EQ(run("eval", write_config("f.cfg", "test_file = " + (dir_ / "none.gdeb").string() + "\ncheckpoint = x\n")),
            kExitBadInput);
  EXPECT_NE(err_.str().find("file not found"), std::string::npos);
  EXPECT_EQ(run("eval", write_config("e.cfg", with(tiny_model() + tiny_synth(), {{"synth_test_size", "0"}, {"checkpoint", "x"}}))),
            kExitBadInput);
  EXPECT_NE(err_.str().find("test split is empty"), std::string::npos);
  EXPECT_EQ(run("train", write_config("bad.cfg", with(tiny_model() + tiny_synth(),
                                                {{"node_width", "7"}, {"checkpoint", (dir_ / "c").string()}}))),
            kExitBadInput);
  EXPECT_FALSE(fs::exists(dir_ / "c"));
  EXPECT_EQ(run("synth", write_config("s.cfg", tiny_synth())), kExitBadInput);
  EXPECT_EQ(run("fly", write_config("x.cfg", "")), kExitBadInput);
}

TEST_F(Commands, CorruptDataFileExitsTwo) {
  std::ofstream(dir_ / "junk.gdeb") << "GDEBnot really";
  const auto cfg = write_config("j.cfg", tiny_model() + "train_file = " + (dir_ / "junk.gdeb").string() +
                                             "\ncheckpoint = " + (dir_ / "c").string() + "\n");
  EXPECT_EQ(run("train", cfg), kExitBadInput);
  EXPECT_NE(err_.str().find("byte offset"), std::string::npos);
}

TEST_F(Commands, IncompatibleCheckpointExitsTwo) {
  const auto a = write_config("a.cfg", with(tiny_model() + tiny_synth(), {{"epochs", "1"}, {"checkpoint", (dir_ / "m.ckpt").string()}}));
  ASSERT_EQ(run("train", a), kExitOk);
  const auto b = write_config("b.cfg", with(tiny_model() + tiny_synth(), {{"node_width", "12"}, {"checkpoint", (dir_ / "m.ckpt").string()}}));
  EXPECT_EQ(run("eval", b), kExitBadInput);
}
