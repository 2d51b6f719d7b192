#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gdpnet/dense_array.hpp"

namespace gdpnet {

struct ParamEntry {
  std::string name;
  DenseArray value;
  DenseArray grad;
  DenseArray m;  // Adam first moment
  DenseArray v;  // Adam second moment
  std::uint64_t step = 0;
};

/// Named trainable arrays, kept in insertion order. Gradients and Adam
/// moments always match the value shape.
class ParamStore {
 public:
  ParamEntry& add(std::string name, DenseArray value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  ParamEntry& at(const std::string& name);
  const ParamEntry& at(const std::string& name) const;

  std::span<ParamEntry> entries() noexcept { return entries_; }
  std::span<const ParamEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t scalar_count() const noexcept;

  void zero_grads() noexcept;

 private:
  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over every entry, then zeroes the gradients.
void adam_step(ParamStore& store, const AdamOptions& opts);

// Checkpoint I/O ("GDPN" container). Only names and values are persisted;
// optimizer state starts fresh after a load.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(std::ostream& out, const ParamStore& store);
ParamStore read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store);
ParamStore load_checkpoint(const std::filesystem::path& path);

// Copies checkpoint values into a freshly built store. Every name must exist
// in both with identical shapes, otherwise ConfigError.
void restore_values(ParamStore& into, const ParamStore& loaded);

}  // namespace gdpnet
