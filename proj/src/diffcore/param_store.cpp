#include "gdpnet/param_store.hpp"

#include <cmath>
#include <fstream>

#include "gdpnet/binary_io.hpp"
#include "gdpnet/errors.hpp"

namespace gdpnet {

ParamEntry& ParamStore::add(std::string name, DenseArray value) {
  if (contains(name)) throw ArgumentError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  ParamEntry e;
  e.grad = DenseArray(value.shape());
  e.m = DenseArray(value.shape());
  e.v = DenseArray(value.shape());
  e.name = std::move(name);
  e.value = std::move(value);
  entries_.push_back(std::move(e));
  return entries_.back();
}

ParamEntry& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

const ParamEntry& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

std::size_t ParamStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParamStore::zero_grads() noexcept {
  for (auto& e : entries_) e.grad.fill(0.0);
}

void adam_step(ParamStore& store, const AdamOptions& opts) {
  for (auto& e : store.entries()) {
    ++e.step;
    const double t = static_cast<double>(e.step);
    const double c1 = 1.0 - std::pow(opts.beta1, t);
    const double c2 = 1.0 - std::pow(opts.beta2, t);
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double g = e.grad[i];
      e.m[i] = opts.beta1 * e.m[i] + (1.0 - opts.beta1) * g;
      e.v[i] = opts.beta2 * e.v[i] + (1.0 - opts.beta2) * g * g;
      const double mhat = e.m[i] / c1;
      const double vhat = e.v[i] / c2;
      e.value[i] -= opts.lr * mhat / (std::sqrt(vhat) + opts.eps);
    }
    e.grad.fill(0.0);
  }
}

namespace {
constexpr std::string_view kMagic = "GDPN";
}

void write_checkpoint(std::ostream& out, const ParamStore& store) {
  binary::Writer w(out);
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& e : store.entries()) {
    w.str(e.name);
    w.u32(static_cast<std::uint32_t>(e.value.rank()));
    for (auto d : e.value.shape()) w.u64(d);
    for (double x : e.value.values()) w.f64(x);
  }
}

ParamStore read_checkpoint(std::istream& in) {
  binary::Reader r(in);
  if (r.bytes(4, "magic") != kMagic) throw ParseError("bad checkpoint magic", 0);
  const auto version_at = r.offset();
  if (const auto v = r.u32("version"); v != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(v), version_at);
  }
  const auto count = r.u32("entry count");
  ParamStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name = r.str("parameter name");
    const auto rank_at = r.offset();
    const auto rank = r.u32("rank");
    if (rank > 8) throw ParseError("implausible rank " + std::to_string(rank), rank_at);
    DenseArray::Shape shape(rank);
    for (auto& d : shape) d = r.u64("dimension");
    DenseArray value(shape);
    for (auto& x : value.values()) x = r.f64("value");
    store.add(std::move(name), std::move(value));
  }
  return store;
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(out, store);
  if (!out) throw InputError("failed writing checkpoint: " + path.string());
}

ParamStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint: " + path.string());
  return read_checkpoint(in);
}

void restore_values(ParamStore& into, const ParamStore& loaded) {
  if (into.size() != loaded.size()) {
    throw ConfigError("checkpoint holds " + std::to_string(loaded.size()) +
                      " parameters, model expects " + std::to_string(into.size()));
  }
  for (const auto& src : loaded.entries()) {
    if (!into.contains(src.name)) {
      throw ConfigError("checkpoint parameter '" + src.name + "' is not part of this model");
    }
    auto& dst = into.at(src.name);
    if (!dst.value.same_shape(src.value)) {
      throw ConfigError("width mismatch for '" + src.name + "': checkpoint " +
                        shape_string(src.value.shape()) + " vs model " +
                        shape_string(dst.value.shape()));
    }
    dst.value = src.value;
  }
}

}  // namespace gdpnet
