#pragma once

// Planted-trigger relation task. Every positive example hides exactly one
// trigger token of its relation among noise tokens, next to one subject and
// one object token; the label is recoverable from the trigger alone.
// No-relation examples carry no trigger.
//
// Vocabulary layout: ids [0, K*c) are triggers (relation k owns
// [k*c, (k+1)*c)), K*c is the subject token, K*c+1 the object token, the rest
// are noise. Rows Vz and Vz+1 of the embedding table are CLS and SEP.
// Class 0 is no_relation; relation k has class k+1.

#include <cstddef>
#include <cstdint>

#include "gdpnet/data.hpp"

namespace gdpnet::data {

struct SyntheticTask {
  std::size_t vocab = 200;                // Vz
  std::size_t relations = 4;              // K
  std::size_t triggers_per_relation = 3;  // c
  std::size_t min_length = 10;
  std::size_t max_length = 24;
  double no_relation_fraction = 0.2;  // p0
  std::size_t train_size = 2000;
  std::size_t dev_size = 400;
  std::size_t test_size = 400;
  std::size_t embedding_width = 64;
  std::uint64_t seed = 1;

  // ArgumentError on an infeasible configuration.
  void validate() const;
};

struct SyntheticCorpus {
  Dataset train;
  Dataset dev;
  Dataset test;
  DenseArray embedding_table;  // (Vz + 2) x width, float-representable
};

SyntheticCorpus generate_synthetic(const SyntheticTask& task);

}  // namespace gdpnet::data
