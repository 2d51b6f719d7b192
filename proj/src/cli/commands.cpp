#include "gdpnet/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "gdpnet/errors.hpp"
#include "gdpnet/grad_check.hpp"
#include "gdpnet/metrics.hpp"
#include "gdpnet/ops.hpp"
#include "gdpnet/synthetic.hpp"
#include "gdpnet/train.hpp"

namespace gdpnet::cli {
namespace {

constexpr std::size_t kGradcheckMaxTokens = 10;

struct Splits {
  std::optional<data::Dataset> train;
  std::optional<data::Dataset> dev;
  std::optional<data::Dataset> test;
};

enum Need : unsigned { kTrain = 1, kDev = 2, kTest = 4 };

data::Dataset load_split(const std::optional<std::filesystem::path>& path, const char* key) {
  if (!path) throw ConfigError(std::string("config needs '") + key + "'");
  if (!std::filesystem::exists(*path)) throw InputError("file not found: " + path->string());
  auto ds = data::load_embedding_file(*path);
  data::validate(ds);
  return ds;
}

Splits load_data(const RunConfig& rc, unsigned required, unsigned optional = 0) {
  Splits s;
  if (rc.synthetic) {
    auto corpus = data::generate_synthetic(*rc.synthetic);
    s.train = std::move(corpus.train);
    s.dev = std::move(corpus.dev);
    s.test = std::move(corpus.test);
    return s;
  }
  if (!rc.uses_files()) {
    throw ConfigError("config names no data: give train_file/dev_file/test_file or synth_* keys");
  }
  const auto want = [&](unsigned bit, const std::optional<std::filesystem::path>& p) {
    return (required & bit) || ((optional & bit) && p);
  };
  if (want(kTrain, rc.train_file)) s.train = load_split(rc.train_file, "train_file");
  if (want(kDev, rc.dev_file)) s.dev = load_split(rc.dev_file, "dev_file");
  if (want(kTest, rc.test_file)) s.test = load_split(rc.test_file, "test_file");
  return s;
}

// Fills the data-dependent model fields and checks every split agrees.
model::ModelConfig complete_model_config(const RunConfig& rc, const Splits& s) {
  const data::Dataset* first = nullptr;
  for (const auto* ds : {s.train ? &*s.train : nullptr, s.dev ? &*s.dev : nullptr,
                         s.test ? &*s.test : nullptr}) {
    if (!ds) continue;
    if (!first) {
      first = ds;
    } else if (ds->relations != first->relations || ds->input_width != first->input_width) {
      throw InputError("splits '" + first->split + "' and '" + ds->split +
                       "' disagree on relations or embedding width");
    }
  }
  if (!first) throw ConfigError("no data split loaded");
  model::ModelConfig m = rc.model;
  m.input_width = first->input_width;
  m.classes = first->class_count();
  m.trainable_cls = rc.synthetic.has_value();
  m.validate();
  return m;
}

void require_parent_dir(const std::filesystem::path& p, const char* key) {
  const auto parent = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
  if (!std::filesystem::is_directory(parent)) {
    throw ConfigError(std::string("directory for '") + key + "' does not exist: " + parent.string());
  }
}

model::Model load_trained(const RunConfig& rc, const Splits& s) {
  if (!rc.checkpoint) throw ConfigError("a checkpoint is required (--checkpoint or 'checkpoint')");
  if (!std::filesystem::exists(*rc.checkpoint)) {
    throw InputError("checkpoint not found: " + rc.checkpoint->string());
  }
  model::Model m(complete_model_config(rc, s));
  restore_values(m.params(), load_checkpoint(*rc.checkpoint));
  return m;
}

const data::Dataset& non_empty(const std::optional<data::Dataset>& ds, const char* what) {
  if (!ds || ds->examples.empty()) throw InputError(std::string(what) + " split is empty");
  return *ds;
}

}  // namespace

void cmd_train(const RunConfig& rc, std::ostream& out) {
  if (!rc.checkpoint) throw ConfigError("train needs 'checkpoint' (or --checkpoint)");
  require_parent_dir(*rc.checkpoint, "checkpoint");
  if (rc.metrics_log) require_parent_dir(*rc.metrics_log, "metrics_log");
  auto splits = load_data(rc, kTrain, kDev);
  model::Model model(complete_model_config(rc, splits));
  const auto& train_set = non_empty(splits.train, "train");
  const data::Dataset* dev = splits.dev && !splits.dev->examples.empty() ? &*splits.dev : nullptr;

  std::ofstream log;
  if (rc.metrics_log) {
    log.open(*rc.metrics_log, std::ios::trunc);
    if (!log) throw InputError("cannot write metrics log: " + rc.metrics_log->string());
    log << model::kMetricsHeader << '\n';
  }
  out << model::kMetricsHeader << '\n';

  model::TrainOptions opts;
  opts.target_dev_accuracy = rc.target_dev_accuracy;
  opts.eval_threads = rc.eval_threads;
  opts.on_epoch = [&](const model::EpochMetrics& m) {
    const auto line = model::format_metrics(m);
    out << line << '\n' << std::flush;
    if (log.is_open()) log << line << '\n' << std::flush;
  };
  model::train(model, train_set, dev, opts);
  save_checkpoint(*rc.checkpoint, model.params());
}

void cmd_eval(const RunConfig& rc, std::ostream& out) {
  auto splits = load_data(rc, kTest);
  const auto& test = non_empty(splits.test, "test");
  const auto model = load_trained(rc, splits);
  const auto pred = model::predict(model, test, rc.eval_threads);
  std::vector<std::uint32_t> golds;
  for (const auto& ex : test.examples) golds.push_back(ex.label);
  const auto prf = metrics::micro_f1(pred.labels, golds, test.no_relation());
  char buf[160];
  std::snprintf(buf, sizeof buf, "pr=%.6f re=%.6f f1=%.6f acc=%.6f", prf.precision, prf.recall,
                prf.f1, metrics::accuracy(pred.labels, golds));
  out << buf << '\n';
}

void cmd_analyze(const RunConfig& rc, std::ostream& out) {
  const unsigned need = rc.analyze_split == "train" ? kTrain : rc.analyze_split == "dev" ? kDev : kTest;
  auto splits = load_data(rc, need);
  const auto& ds = non_empty(need == kTrain ? splits.train : need == kDev ? splits.dev : splits.test,
                             rc.analyze_split.c_str());
  const auto model = load_trained(rc, splits);
  const auto pred = model::predict(model, ds, rc.eval_threads);
  out << metrics::selection_stats(pred.final_positions, ds).to_text();
}

bool cmd_gradcheck(const RunConfig& rc, std::ostream& out) {
  auto splits = load_data(rc, kTrain);
  const auto& train_set = non_empty(splits.train, "train");
  if (rc.gradcheck_examples > train_set.examples.size()) {
    throw ConfigError("gradcheck_examples exceeds the training set size");
  }
  std::vector<const data::TokenSequence*> batch;
  for (std::size_t i = 0; i < rc.gradcheck_examples; ++i) {
    const auto& ex = train_set.examples[i];
    if (ex.length() > kGradcheckMaxTokens) {
      throw ConfigError("gradcheck needs sequences of at most " + std::to_string(kGradcheckMaxTokens) +
                        " tokens; example '" + ex.id + "' has " + std::to_string(ex.length()));
    }
    batch.push_back(&ex);
  }
  model::Model model(complete_model_config(rc, splits));
  const auto loss = [&](Tape& tape, const ParamStore&) {
    Var total;
    for (const auto* ex : batch) {
      const auto rec = model.forward(tape, *ex, false);
      const Var l = model.loss(rec, ex->label).total;
      total = total.valid() ? ops::add(total, l) : l;
    }
    return ops::scale(total, 1.0 / static_cast<double>(batch.size()));
  };
  const auto report = grad_check(
      loss, model.params(),
      GradCheckOptions{rc.gradcheck_step, rc.gradcheck_freeze_branches, rc.gradcheck_five_point,
                       rc.gradcheck_adaptive_step});
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "max_rel_error=%.3e checked=%zu worst=%s[%zu] analytic=%.6e numeric=%.6e", report.max_rel_error,
                report.checked, report.worst_param.c_str(), report.worst_index, report.worst_analytic,
                report.worst_numeric);
  out << buf << '\n';
  const bool ok = report.max_rel_error <= rc.gradcheck_tolerance;
  out << (ok ? "gradcheck passed" : "gradcheck FAILED") << '\n';
  return ok;
}

void cmd_synth(const RunConfig& rc, std::ostream& out) {
  if (!rc.synthetic) throw ConfigError("synth needs synth_* keys describing the task");
  if (!rc.out_train || !rc.out_dev || !rc.out_test) {
    throw ConfigError("synth needs out_train, out_dev and out_test");
  }
  require_parent_dir(*rc.out_train, "out_train");
  require_parent_dir(*rc.out_dev, "out_dev");
  require_parent_dir(*rc.out_test, "out_test");
  const auto corpus = data::generate_synthetic(*rc.synthetic);
  const std::pair<const data::Dataset*, const std::filesystem::path*> jobs[] = {
      {&corpus.train, &*rc.out_train}, {&corpus.dev, &*rc.out_dev}, {&corpus.test, &*rc.out_test}};
  for (const auto& [ds, path] : jobs) {
    data::save_embedding_file(*path, *ds);
    std::vector<std::size_t> counts(ds->class_count(), 0);
    for (const auto& ex : ds->examples) ++counts[ex.label];
    out << ds->split << " n=" << ds->examples.size();
    for (std::size_t k = 0; k < counts.size(); ++k) out << ' ' << ds->relations[k] << '=' << counts[k];
    out << '\n';
  }
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    RunConfig rc = load_run_config(options.config);
    if (options.checkpoint) rc.checkpoint = options.checkpoint;
    if (options.seed) {
      rc.model.seed = *options.seed;
      if (command == "synth" && rc.synthetic) rc.synthetic->seed = *options.seed;
    }
    if (command == "train") {
      cmd_train(rc, out);
    } else if (command == "eval") {
      cmd_eval(rc, out);
    } else if (command == "analyze") {
      cmd_analyze(rc, out);
    } else if (command == "gradcheck") {
      return cmd_gradcheck(rc, out) ? kExitOk : kExitFailure;
    } else if (command == "synth") {
      cmd_synth(rc, out);
    } else {
      err << "error: unknown command '" << command << "'\n";
      return kExitBadInput;
    }
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gdpnet::cli
