#include "gdpnet/synthetic.hpp"

#include <cstdio>

#include "gdpnet/errors.hpp"
#include "gdpnet/random.hpp"

namespace gdpnet::data {
namespace {

std::string token_name(std::size_t id, const SyntheticTask& task) {
  const std::size_t n_trig = task.relations * task.triggers_per_relation;
  if (id < n_trig) {
    return "trigger" + std::to_string(id / task.triggers_per_relation + 1) + "_" +
           std::to_string(id % task.triggers_per_relation);
  }
  if (id == n_trig) return "SUBJ";
  if (id == n_trig + 1) return "OBJ";
  return "w" + std::to_string(id);
}

Dataset make_split(const std::string& split, std::size_t count, const SyntheticTask& task,
                   const DenseArray& table, Rng& rng) {
  Dataset ds;
  ds.split = split;
  ds.input_width = task.embedding_width;
  ds.relations.emplace_back(kNoRelation);
  for (std::size_t k = 0; k < task.relations; ++k) ds.relations.push_back("rel" + std::to_string(k + 1));

  const std::size_t n_trig = task.relations * task.triggers_per_relation;
  const std::size_t subject_id = n_trig;
  const std::size_t object_id = n_trig + 1;
  const std::size_t noise_base = n_trig + 2;
  const std::size_t noise_count = task.vocab - noise_base;
  const std::size_t width = task.embedding_width;

  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t t =
        task.min_length + static_cast<std::size_t>(rng.below(task.max_length - task.min_length + 1));
    const bool negative = rng.uniform() < task.no_relation_fraction;
    const std::size_t relation = negative ? 0 : static_cast<std::size_t>(rng.below(task.relations));

    std::vector<std::size_t> ids(t);
    for (auto& id : ids) id = noise_base + static_cast<std::size_t>(rng.below(noise_count));

    // Distinct positions (0-based) for subject, object and, if positive, trigger.
    std::vector<std::size_t> slots(t);
    for (std::size_t i = 0; i < t; ++i) slots[i] = i;
    rng.shuffle(slots);
    ids[slots[0]] = subject_id;
    ids[slots[1]] = object_id;
    std::vector<bool> mask(t, false);
    if (!negative) {
      ids[slots[2]] = relation * task.triggers_per_relation +
                      static_cast<std::size_t>(rng.below(task.triggers_per_relation));
      mask[slots[2]] = true;
    }

    TokenSequence ex;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "%s-%06zu", split.c_str(), e);
    ex.id = idbuf;
    ex.label = negative ? 0u : static_cast<std::uint32_t>(relation + 1);
    ex.embeddings = DenseArray({t + 2, width});
    const auto copy_row = [&](std::size_t dst, std::size_t src) {
      for (std::size_t c = 0; c < width; ++c) ex.embeddings.at(dst, c) = table.at(src, c);
    };
    copy_row(0, task.vocab);
    for (std::size_t i = 0; i < t; ++i) copy_row(i + 1, ids[i]);
    copy_row(t + 1, task.vocab + 1);

    std::vector<std::string> strings;
    strings.reserve(t);
    for (auto id : ids) strings.push_back(token_name(id, task));
    ex.token_strings = std::move(strings);
    ex.subject_span = Span{static_cast<std::uint32_t>(slots[0] + 1), static_cast<std::uint32_t>(slots[0] + 2)};
    ex.object_span = Span{static_cast<std::uint32_t>(slots[1] + 1), static_cast<std::uint32_t>(slots[1] + 2)};
    ex.trigger_mask = std::move(mask);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace

void SyntheticTask::validate() const {
  if (relations == 0 || triggers_per_relation == 0) {
    throw ArgumentError("synthetic task needs at least one relation and trigger");
  }
  if (vocab <= relations * triggers_per_relation + 2) {
    throw ArgumentError("synthetic vocabulary must exceed K*c + 2 to leave noise tokens");
  }
  if (min_length < 3) throw ArgumentError("synthetic min_length must be at least 3");
  if (max_length < min_length) throw ArgumentError("synthetic max_length below min_length");
  if (!(no_relation_fraction >= 0.0 && no_relation_fraction <= 1.0)) {
    throw ArgumentError("no-relation fraction must lie in [0, 1]");
  }
  if (embedding_width == 0) throw ArgumentError("synthetic embedding width must be positive");
}

SyntheticCorpus generate_synthetic(const SyntheticTask& task) {
  task.validate();
  Rng rng(task.seed);
  SyntheticCorpus corpus;
  corpus.embedding_table = DenseArray({task.vocab + 2, task.embedding_width});
  for (auto& v : corpus.embedding_table.values()) {
    v = static_cast<double>(static_cast<float>(rng.normal()));
  }
  corpus.train = make_split("train", task.train_size, task, corpus.embedding_table, rng);
  corpus.dev = make_split("dev", task.dev_size, task, corpus.embedding_table, rng);
  corpus.test = make_split("test", task.test_size, task, corpus.embedding_table, rng);
  return corpus;
}

}  // namespace gdpnet::data
