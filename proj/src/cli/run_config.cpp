#include "gdpnet/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gdpnet/errors.hpp"

namespace gdpnet::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  template <class F>
  void take(const std::string& key, F&& apply) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    try {
      apply(it->second.value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(it->second.line) + ": key '" + key +
                        "': " + e.what());
    }
    used_.insert(key);
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) {
        throw ConfigError("config line " + std::to_string(entry.line) + ": unknown key '" + key +
                          "'");
      }
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("not a number: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("not a non-negative integer: '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

std::map<std::string, Entry> tokenize(const std::string& text) {
  std::map<std::string, Entry> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line) + ": empty key");
    if (value.empty()) {
      throw ConfigError("config line " + std::to_string(line) + ": key '" + key + "' has no value");
    }
    if (out.count(key)) {
      throw ConfigError("config line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    out.emplace(std::move(key), Entry{std::move(value), line});
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Reader r(tokenize(text));
  RunConfig rc;

  rc.model = model::dialogre_profile();
  r.take("profile", [&](const std::string& v) {
    if (v == "dialogre") {
      rc.model = model::dialogre_profile();
    } else if (v == "tacred") {
      rc.model = model::tacred_profile();
    } else {
      throw ConfigError("unknown profile '" + v + "' (expected dialogre or tacred)");
    }
    rc.profile = v;
  });

  auto& m = rc.model;
  const auto size_key = [&](const char* key, std::size_t& field) {
    r.take(key, [&](const std::string& v) { field = static_cast<std::size_t>(to_uint(v)); });
  };
  const auto real_key = [&](const char* key, double& field) {
    r.take(key, [&](const std::string& v) { field = to_double(v); });
  };
  const auto bool_key = [&](const char* key, bool& field) {
    r.take(key, [&](const std::string& v) { field = to_bool(v); });
  };
  const auto path_key = [&](const char* key, std::optional<std::filesystem::path>& field) {
    r.take(key, [&](const std::string& v) { field = std::filesystem::path(v); });
  };

  size_key("node_width", m.node_width);
  size_key("gaussian_width", m.gaussian_width);
  size_key("views", m.views);
  size_key("sublayers", m.sublayers);
  size_key("stages", m.stages);
  real_key("ratio", m.ratio);
  real_key("gamma", m.gamma);
  real_key("dtw_weight", m.dtw_weight);
  real_key("dropout", m.dropout);
  real_key("learning_rate", m.learning_rate);
  size_key("batch_size", m.batch_size);
  size_key("epochs", m.epochs);
  r.take("seed", [&](const std::string& v) { m.seed = to_uint(v); });
  r.take("adjacency_norm", [&](const std::string& v) {
    try {
      m.adjacency_norm = graph::parse_adjacency_norm(v);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  });
  bool_key("regenerate_edges", m.regenerate_edges);
  bool_key("attention_edges", m.attention_edges);
  bool_key("per_stage_pool", m.per_stage_pool);

  path_key("train_file", rc.train_file);
  path_key("dev_file", rc.dev_file);
  path_key("test_file", rc.test_file);
  path_key("checkpoint", rc.checkpoint);
  path_key("metrics_log", rc.metrics_log);
  path_key("out_train", rc.out_train);
  path_key("out_dev", rc.out_dev);
  path_key("out_test", rc.out_test);

  r.take("target_dev_accuracy", [&](const std::string& v) {
    const double x = to_double(v);
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError("must lie in (0, 1]");
    rc.target_dev_accuracy = x;
  });
  size_key("eval_threads", rc.eval_threads);
  r.take("analyze_split", [&](const std::string& v) {
    if (v != "train" && v != "dev" && v != "test") throw ConfigError("expected train, dev or test");
    rc.analyze_split = v;
  });
  real_key("gradcheck_step", rc.gradcheck_step);
  real_key("gradcheck_tolerance", rc.gradcheck_tolerance);
  size_key("gradcheck_examples", rc.gradcheck_examples);
  bool_key("gradcheck_freeze_branches", rc.gradcheck_freeze_branches);
  bool_key("gradcheck_five_point", rc.gradcheck_five_point);
  bool_key("gradcheck_adaptive_step", rc.gradcheck_adaptive_step);

  static const char* kSynthKeys[] = {"synth_vocab",          "synth_relations",
                                     "synth_triggers",       "synth_min_length",
                                     "synth_max_length",     "synth_no_relation_fraction",
                                     "synth_train_size",     "synth_dev_size",
                                     "synth_test_size",      "synth_embedding_width",
                                     "synth_seed"};
  bool any_synth = false;
  for (const char* k : kSynthKeys) any_synth = any_synth || r.has(k);
  if (any_synth) {
    data::SyntheticTask t;
    size_key("synth_vocab", t.vocab);
    size_key("synth_relations", t.relations);
    size_key("synth_triggers", t.triggers_per_relation);
    size_key("synth_min_length", t.min_length);
    size_key("synth_max_length", t.max_length);
    real_key("synth_no_relation_fraction", t.no_relation_fraction);
    size_key("synth_train_size", t.train_size);
    size_key("synth_dev_size", t.dev_size);
    size_key("synth_test_size", t.test_size);
    size_key("synth_embedding_width", t.embedding_width);
    r.take("synth_seed", [&](const std::string& v) { t.seed = to_uint(v); });
    rc.synthetic = t;
  }

  r.reject_unknown();

  if (rc.synthetic && rc.uses_files()) {
    throw ConfigError("config names both embedding files and a synthetic task; pick one");
  }
  if (rc.synthetic) {
    try {
      rc.synthetic->validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  if (!(rc.gradcheck_step > 0.0)) throw ConfigError("gradcheck_step must be positive");
  if (rc.gradcheck_examples == 0) throw ConfigError("gradcheck_examples must be positive");
  if (rc.eval_threads == 0) throw ConfigError("eval_threads must be positive");
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace gdpnet::cli
