#include <fstream>
#include <unordered_set>

#include "gdpnet/binary_io.hpp"
#include "gdpnet/data.hpp"
#include "gdpnet/errors.hpp"

namespace gdpnet::data {
namespace {

constexpr std::string_view kMagic = "GDEB";

bool span_ok(const Span& s, std::size_t t) {
  return s.start >= 1 && s.start < s.end && s.end <= t + 1;
}

}  // namespace

std::optional<std::uint32_t> Dataset::no_relation() const {
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (relations[i] == kNoRelation) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

void validate(const Dataset& ds) {
  std::unordered_set<std::string> ids;
  for (const auto& ex : ds.examples) {
    const auto where = [&](const std::string& what) {
      return InputError("example '" + ex.id + "': " + what);
    };
    if (!ids.insert(ex.id).second) throw where("duplicate id");
    if (ex.embeddings.rank() != 2 || ex.embeddings.rows() < 3) {
      throw where("needs at least one token besides CLS and SEP");
    }
    if (ex.embeddings.cols() != ds.input_width) throw where("embedding width mismatch");
    if (!ex.embeddings.all_finite()) throw where("non-finite embedding value");
    if (ex.label >= ds.class_count()) throw where("label out of range");
    const std::size_t t = ex.length();
    if (ex.token_strings && ex.token_strings->size() != t) throw where("token string count != T");
    if (ex.trigger_mask && ex.trigger_mask->size() != t) throw where("trigger mask length != T");
    if (ex.subject_span.has_value() != ex.object_span.has_value()) {
      throw where("subject and object spans must be given together");
    }
    if (ex.subject_span && (!span_ok(*ex.subject_span, t) || !span_ok(*ex.object_span, t))) {
      throw where("entity span out of range");
    }
  }
}

void write_gdeb(std::ostream& out, const Dataset& ds) {
  validate(ds);
  binary::Writer w(out);
  w.bytes(kMagic);
  w.u32(kGdebVersion);
  w.u32(static_cast<std::uint32_t>(ds.input_width));
  w.u32(static_cast<std::uint32_t>(ds.relations.size()));
  for (const auto& r : ds.relations) w.str(r);
  w.u64(ds.examples.size());
  for (const auto& ex : ds.examples) {
    w.str(ex.id);
    w.u32(ex.label);
    w.u32(static_cast<std::uint32_t>(ex.length()));
    std::uint8_t flags = 0;
    if (ex.token_strings) flags |= gdeb_flags::kStrings;
    if (ex.subject_span) flags |= gdeb_flags::kSpans;
    if (ex.trigger_mask) flags |= gdeb_flags::kTriggerMask;
    w.u8(flags);
    if (ex.token_strings) {
      for (const auto& s : *ex.token_strings) w.str(s);
    }
    if (ex.subject_span) {
      w.u32(ex.subject_span->start);
      w.u32(ex.subject_span->end);
      w.u32(ex.object_span->start);
      w.u32(ex.object_span->end);
    }
    if (ex.trigger_mask) {
      for (bool b : *ex.trigger_mask) w.u8(b ? 1 : 0);
    }
    for (double v : ex.embeddings.values()) w.f32(static_cast<float>(v));
  }
}

Dataset read_gdeb(std::istream& in, std::string split) {
  binary::Reader r(in);
  if (r.bytes(4, "magic") != kMagic) throw ParseError("bad magic, not a GDEB file", 0);
  {
    const auto at = r.offset();
    if (const auto v = r.u32("version"); v != kGdebVersion) {
      throw ParseError("unsupported GDEB version " + std::to_string(v), at);
    }
  }
  Dataset ds;
  ds.split = std::move(split);
  ds.input_width = r.u32("d_in");
  const auto n_rel = r.u32("relation count");
  for (std::uint32_t i = 0; i < n_rel; ++i) ds.relations.push_back(r.str("relation name"));
  const auto count = r.u64("example count");
  std::unordered_set<std::string> ids;
  for (std::uint64_t e = 0; e < count; ++e) {
    TokenSequence ex;
    const auto id_at = r.offset();
    ex.id = r.str("example id");
    if (!ids.insert(ex.id).second) throw ParseError("duplicate example id '" + ex.id + "'", id_at);
    const auto label_at = r.offset();
    ex.label = r.u32("label");
    if (ex.label >= n_rel) throw ParseError("label out of range", label_at);
    const auto t_at = r.offset();
    const auto t = r.u32("token count");
    if (t == 0) throw ParseError("example has no tokens", t_at);
    if (t > (1u << 24)) throw ParseError("implausible token count", t_at);
    const auto flags_at = r.offset();
    const auto flags = r.u8("flags");
    if (flags & ~(gdeb_flags::kStrings | gdeb_flags::kSpans | gdeb_flags::kTriggerMask)) {
      throw ParseError("unknown flag bits", flags_at);
    }
    if (flags & gdeb_flags::kStrings) {
      std::vector<std::string> toks;
      toks.reserve(t);
      for (std::uint32_t i = 0; i < t; ++i) toks.push_back(r.str("token string"));
      ex.token_strings = std::move(toks);
    }
    if (flags & gdeb_flags::kSpans) {
      const auto span_at = r.offset();
      Span s{r.u32("subject start"), r.u32("subject end")};
      Span o{r.u32("object start"), r.u32("object end")};
      if (!span_ok(s, t) || !span_ok(o, t)) throw ParseError("entity span out of range", span_at);
      ex.subject_span = s;
      ex.object_span = o;
    }
    if (flags & gdeb_flags::kTriggerMask) {
      std::vector<bool> mask(t);
      for (std::uint32_t i = 0; i < t; ++i) {
        const auto at = r.offset();
        const auto b = r.u8("trigger mask");
        if (b > 1) throw ParseError("trigger mask byte must be 0 or 1", at);
        mask[i] = b == 1;
      }
      ex.trigger_mask = std::move(mask);
    }
    ex.embeddings = DenseArray({std::size_t{t} + 2, ds.input_width});
    for (auto& v : ex.embeddings.values()) v = static_cast<double>(r.f32("embedding"));
    ds.examples.push_back(std::move(ex));
  }
  if (!r.at_eof()) throw ParseError("trailing bytes after last example", r.offset());
  return ds;
}

void save_embedding_file(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  write_gdeb(out, ds);
  if (!out) throw InputError("failed writing: " + path.string());
}

Dataset load_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding file: " + path.string());
  return read_gdeb(in, path.stem().string());
}

}  // namespace gdpnet::data
