#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gdpnet/dense_array.hpp"

namespace gdpnet::data {

/// Half-open token range [start, end) over token positions 1..T.
struct Span {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  bool operator==(const Span&) const = default;
};

/// One relation instance. Embedding rows are CLS, tokens 1..T, SEP.
struct TokenSequence {
  std::string id;
  std::uint32_t label = 0;
  DenseArray embeddings;  // (T + 2) x d_in
  std::optional<std::vector<std::string>> token_strings;
  std::optional<Span> subject_span;
  std::optional<Span> object_span;
  std::optional<std::vector<bool>> trigger_mask;

  std::size_t length() const noexcept {
    return embeddings.rows() >= 2 ? embeddings.rows() - 2 : 0;
  }
  std::size_t width() const noexcept { return embeddings.cols(); }

  bool operator==(const TokenSequence&) const = default;
};

inline constexpr std::string_view kNoRelation = "no_relation";

struct Dataset {
  std::string split;
  std::vector<std::string> relations;
  std::size_t input_width = 0;
  std::vector<TokenSequence> examples;

  std::size_t class_count() const noexcept { return relations.size(); }
  // Index of "no_relation" in the vocabulary, if present.
  std::optional<std::uint32_t> no_relation() const;

  bool operator==(const Dataset&) const = default;
};

/// Checks every invariant (widths, spans, masks, labels, unique ids).
/// Throws InputError naming the offending example.
void validate(const Dataset& ds);

// ---- GDEB binary format ---------------------------------------------------

inline constexpr std::uint32_t kGdebVersion = 1;

namespace gdeb_flags {
inline constexpr std::uint8_t kStrings = 0x01;
inline constexpr std::uint8_t kSpans = 0x02;
inline constexpr std::uint8_t kTriggerMask = 0x04;
}  // namespace gdeb_flags

/// Embeddings are narrowed to float32 on write; they must already be
/// float-representable for a bit-exact round trip.
void write_gdeb(std::ostream& out, const Dataset& ds);
Dataset read_gdeb(std::istream& in, std::string split = {});
void save_embedding_file(const std::filesystem::path& path, const Dataset& ds);
Dataset load_embedding_file(const std::filesystem::path& path);

}  // namespace gdpnet::data
