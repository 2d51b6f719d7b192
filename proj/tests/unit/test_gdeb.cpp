#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "gdpnet/data.hpp"
#include "gdpnet/errors.hpp"
#include "gdpnet/random.hpp"

using namespace gdpnet;
using namespace gdpnet::data;

namespace {

// Hand-rolled little-endian encoder, independent of the library writer.
struct Bytes {
  std::string s;
  void u8(unsigned v) { s.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8((v >> (8 * i)) & 0xff);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8((v >> (8 * i)) & 0xff);
  }
  void f32(float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    u32(v);
  }
  void str(const std::string& x) {
    u32(static_cast<std::uint32_t>(x.size()));
    s += x;
  }
};

Dataset random_dataset(Rng& rng, std::size_t examples, std::size_t width, unsigned flags) {
  Dataset ds;
  ds.split = "";
  ds.input_width = width;
  ds.relations = {"no_relation", "per:friend", "org:\xc3\xa9t\xc3\xa9"};
  for (std::size_t e = 0; e < examples; ++e) {
    TokenSequence ex;
    ex.id = "d" + std::to_string(e);
    ex.label = static_cast<std::uint32_t>(rng.below(3));
    const std::size_t t = 1 + rng.below(9);
    ex.embeddings = DenseArray({t + 2, width});
    for (auto& v : ex.embeddings.values()) v = static_cast<float>(rng.normal());
    if (flags & gdeb_flags::kStrings) {
      std::vector<std::string> toks;
      for (std::size_t i = 0; i < t; ++i) toks.push_back(i % 3 ? "tok" + std::to_string(rng.below(5)) : "");
      ex.token_strings = toks;
    }
    if (flags & gdeb_flags::kSpans) {
      const auto a = static_cast<std::uint32_t>(1 + rng.below(t));
      const auto b = static_cast<std::uint32_t>(1 + rng.below(t));
      ex.subject_span = Span{a, a + 1};
      ex.object_span = Span{b, static_cast<std::uint32_t>(t + 1)};
    }
    if (flags & gdeb_flags::kTriggerMask) {
      std::vector<bool> m(t);
      for (std::size_t i = 0; i < t; ++i) m[i] = rng.below(4) == 0;
      ex.trigger_mask = m;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::string to_bytes(const Dataset& ds) {
  std::ostringstream out;
  write_gdeb(out, ds);
  return out.str();
}

Dataset from_bytes(const std::string& b) {
  std::istringstream in(b);
  return read_gdeb(in);
}

}  // namespace

TEST(Gdeb, ByteLayoutMatchesHandEncoding) {
  Dataset ds;
  ds.input_width = 2;
  ds.relations = {"no_relation", "r1"};
  TokenSequence ex;
  ex.id = "a";
  ex.label = 1;
  ex.embeddings = DenseArray::matrix(3, 2, {0.5, -1.0, 2.0, 0.25, 1.5, -0.125});
  ex.token_strings = std::vector<std::string>{"hi"};
  ex.subject_span = Span{1, 2};
  ex.object_span = Span{1, 2};
  ex.trigger_mask = std::vector<bool>{true};
  ds.examples.push_back(ex);

  Bytes b;
  b.s = "GDEB";
  b.u32(1);
  b.u32(2);
  b.u32(2);
  b.str("no_relation");
  b.str("r1");
  b.u64(1);
  b.str("a");
  b.u32(1);
  b.u32(1);
  b.u8(0x07);
  b.str("hi");
  for (std::uint32_t v : {1u, 2u, 1u, 2u}) b.u32(v);
  b.u8(1);
  for (double v : ex.embeddings.values()) b.f32(static_cast<float>(v));
  EXPECT_EQ(to_bytes(ds), b.s);
  EXPECT_EQ(from_bytes(b.s), ds);
}

TEST(Gdeb, RoundTripEveryFlagCombination) {
  Rng rng(90);
  for (unsigned flags = 0; flags < 8; ++flags) {
    for (std::size_t width : {1u, 7u}) {
      const auto ds = random_dataset(rng, 5, width, flags);
      const auto bytes = to_bytes(ds);
      EXPECT_EQ(from_bytes(bytes), ds) << "flags " << flags;
      EXPECT_EQ(to_bytes(from_bytes(bytes)), bytes);
    }
  }
}

TEST(Gdeb, EmptyDatasetRoundTrips) {
  Dataset ds;
  ds.input_width = 4;
  ds.relations = {"no_relation", "x"};
  EXPECT_EQ(from_bytes(to_bytes(ds)), ds);
  EXPECT_EQ(ds.no_relation(), 0u);
}

TEST(Gdeb, EveryTruncationIsParseError) {
  Rng rng(91);
  const auto bytes = to_bytes(random_dataset(rng, 2, 3, 7));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    EXPECT_THROW(from_bytes(bytes.substr(0, n)), ParseError) << n;
  }
}

TEST(Gdeb, CorruptHeadersAreParseErrors) {
  Rng rng(92);
  const auto good = to_bytes(random_dataset(rng, 1, 2, 0));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(from_bytes(bad_magic), ParseError);
  auto bad_version = good;
  bad_version[4] = 2;
  try {
    from_bytes(bad_version);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(from_bytes(good + "x"), ParseError);
}

TEST(Gdeb, RecordErrorsAreParseErrors) {
  const auto base = [] {
    Bytes b;
    b.s = "GDEB";
    b.u32(1);
    b.u32(1);
    b.u32(2);
    b.str("no_relation");
    b.str("r");
    return b;
  };
  const auto record = [](Bytes& b, const std::string& id, std::uint32_t label, std::uint32_t t, unsigned flags) {
    b.str(id);
    b.u32(label);
    b.u32(t);
    b.u8(flags);
  };
  {
    Bytes b = base();
    b.u64(1);
    record(b, "a", 2, 1, 0);
    for (int i = 0; i < 3; ++i) b.f32(0);
    EXPECT_THROW(from_bytes(b.s), ParseError);  // label
  }
  {
    Bytes b = base();
    b.u64(1);
    record(b, "a", 0, 0, 0);
    EXPECT_THROW(from_bytes(b.s), ParseError);  // no tokens
  }
  {
    Bytes b = base();
    b.u64(1);
    record(b, "a", 0, 1, 0x08);
    EXPECT_THROW(from_bytes(b.s), ParseError);  // flags
  }
  {
    Bytes b = base();
    b.u64(1);
    record(b, "a", 0, 1, gdeb_flags::kTriggerMask);
    b.u8(2);
    for (int i = 0; i < 3; ++i) b.f32(0);
    EXPECT_THROW(from_bytes(b.s), ParseError);  // mask byte
  }
  {
    Bytes b = base();
    b.u64(1);
    record(b, "a", 0, 2, gdeb_flags::kSpans);
    for (std::uint32_t v : {1u, 4u, 1u, 2u}) b.u32(v);
    for (int i = 0; i < 4; ++i) b.f32(0);
    EXPECT_THROW(from_bytes(b.s), ParseError);  // span past SEP
  }
  {
    Bytes b = base();
    b.u64(2);
    for (int k = 0; k < 2; ++k) {
      record(b, "same", 0, 1, 0);
      for (int i = 0; i < 3; ++i) b.f32(0);
    }
    EXPECT_THROW(from_bytes(b.s), ParseError);  // duplicate id
  }
}

TEST(Gdeb, WriterValidates) {
  Rng rng(93);
  auto ds = random_dataset(rng, 2, 2, 7);
  ds.examples[1].label = 9;
  std::ostringstream out;
  EXPECT_THROW(write_gdeb(out, ds), InputError);
  ds = random_dataset(rng, 2, 2, 7);
  ds.examples[0].trigger_mask->push_back(true);
  EXPECT_THROW(write_gdeb(out, ds), InputError);
  ds = random_dataset(rng, 2, 2, 0);
  ds.examples[1].embeddings.at(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(write_gdeb(out, ds), InputError);
}

TEST(Gdeb, FileHelpers) {
  Rng rng(94);
  auto ds = random_dataset(rng, 3, 4, 7);
  const auto path = std::filesystem::temp_directory_path() / "gdpnet_test_dev.gdeb";
  save_embedding_file(path, ds);
  const auto back = load_embedding_file(path);
  EXPECT_EQ(back.split, "gdpnet_test_dev");
  ds.split = back.split;
  EXPECT_EQ(back, ds);
  std::filesystem::remove(path);
  EXPECT_THROW(load_embedding_file(path), InputError);
}
