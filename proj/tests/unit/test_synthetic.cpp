#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gdpnet/errors.hpp"
#include "gdpnet/synthetic.hpp"

using namespace gdpnet;
using namespace gdpnet::data;

namespace {

SyntheticTask small_task() {
  SyntheticTask t;
  t.train_size = 300;
  t.dev_size = 50;
  t.test_size = 50;
  t.embedding_width = 8;
  return t;
}

}  // namespace

TEST(Synthetic, SplitsAreValidAndSized) {
  const auto c = generate_synthetic(small_task());
  EXPECT_EQ(c.train.examples.size(), 300u);
  EXPECT_EQ(c.dev.examples.size(), 50u);
  EXPECT_EQ(c.test.split, "test");
  EXPECT_EQ(c.train.relations, (std::vector<std::string>{"no_relation", "rel1", "rel2", "rel3", "rel4"}));
  for (const auto* ds : {&c.train, &c.dev, &c.test}) EXPECT_NO_THROW(validate(*ds));
  EXPECT_EQ(c.embedding_table.shape(), (DenseArray::Shape{202, 8}));
}

TEST(Synthetic, EachPositiveHasOneTriggerOfItsRelation) {
  const auto task = small_task();
  const auto c = generate_synthetic(task);
  for (const auto& ex : c.train.examples) {
    const auto& mask = *ex.trigger_mask;
    const auto& toks = *ex.token_strings;
    const auto n = std::count(mask.begin(), mask.end(), true);
    ASSERT_EQ(n, ex.label == 0 ? 0 : 1) << ex.id;
    EXPECT_GE(ex.length(), task.min_length);
    EXPECT_LE(ex.length(), task.max_length);
    EXPECT_EQ(std::count(toks.begin(), toks.end(), "SUBJ"), 1);
    EXPECT_EQ(std::count(toks.begin(), toks.end(), "OBJ"), 1);
    EXPECT_EQ(toks[ex.subject_span->start - 1], "SUBJ");
    EXPECT_EQ(toks[ex.object_span->start - 1], "OBJ");
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const bool looks_like_trigger = toks[i].rfind("trigger", 0) == 0;
      EXPECT_EQ(looks_like_trigger, static_cast<bool>(mask[i]));
      if (mask[i]) EXPECT_EQ(toks[i].substr(0, 9), "trigger" + std::to_string(ex.label) + "_");
    }
  }
}

TEST(Synthetic, EmbeddingsComeFromTheTable) {
  const auto c = generate_synthetic(small_task());
  const auto& ex = c.train.examples.front();
  for (std::size_t col = 0; col < 8; ++col) {
    EXPECT_EQ(ex.embeddings.at(0, col), c.embedding_table.at(200, col));
    EXPECT_EQ(ex.embeddings.at(ex.length() + 1, col), c.embedding_table.at(201, col));
  }
  for (double v : c.embedding_table.values()) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
}

TEST(Synthetic, LabelsAreUniformOverRelations) {
  auto task = small_task();
  task.no_relation_fraction = 0.0;
  task.train_size = 10000;
  const auto c = generate_synthetic(task);
  std::vector<std::size_t> counts(5, 0);
  for (const auto& ex : c.train.examples) ++counts[ex.label];
  EXPECT_EQ(counts[0], 0u);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_NEAR(counts[k] / 10000.0, 0.25, 0.03);
}

TEST(Synthetic, NoRelationFraction) {
  auto task = small_task();
  task.train_size = 5000;
  const auto c = generate_synthetic(task);
  const auto neg = std::count_if(c.train.examples.begin(), c.train.examples.end(),
                                 [](const auto& ex) { return ex.label == 0; });
  EXPECT_NEAR(neg / 5000.0, 0.2, 0.03);
  task.no_relation_fraction = 1.0;
  for (const auto& ex : generate_synthetic(task).dev.examples) EXPECT_EQ(ex.label, 0u);
}

TEST(Synthetic, SeedDeterminesCorpus) {
  auto task = small_task();
  const auto a = generate_synthetic(task);
  const auto b = generate_synthetic(task);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  task.seed = 2;
  EXPECT_NE(generate_synthetic(task).train, a.train);
}

TEST(Synthetic, SplitIdsAreDisjoint) {
  const auto c = generate_synthetic(small_task());
  std::set<std::string> ids;
  for (const auto* ds : {&c.train, &c.dev, &c.test})
    for (const auto& ex : ds->examples) EXPECT_TRUE(ids.insert(ex.id).second);
}

TEST(Synthetic, InfeasibleTasksAreRejected) {
  const auto bad = [](auto mutate) {
    auto t = small_task();
    mutate(t);
    return t;
  };
  EXPECT_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.vocab = 14; })), ArgumentError);
  EXPECT_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.min_length = 2; })), ArgumentError);
  EXPECT_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.max_length = 5; })), ArgumentError);
  EXPECT_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.relations = 0; })), ArgumentError);
  EXPECT_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.no_relation_fraction = 1.5; })), ArgumentError);
  EXPECT_NO_THROW(generate_synthetic(bad([](SyntheticTask& t) { t.vocab = 15; })));
}
