#include "gdpnet/train.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "gdpnet/errors.hpp"
#include "gdpnet/metrics.hpp"

namespace gdpnet::model {
namespace {

// Decorrelates the data-order/dropout stream from the initialization stream.
constexpr std::uint64_t kTrainStreamSalt = 0x9e3779b97f4a7c15ULL;

void check_compatible(const Model& model, const data::Dataset& ds) {
  if (ds.class_count() != model.config().classes) {
    throw ConfigError("dataset '" + ds.split + "' has " + std::to_string(ds.class_count()) +
                      " relations, model has " + std::to_string(model.config().classes));
  }
  if (ds.input_width != model.config().input_width) {
    throw ConfigError("dataset '" + ds.split + "' has embedding width " +
                      std::to_string(ds.input_width) + ", model expects " +
                      std::to_string(model.config().input_width));
  }
}

struct ExampleResult {
  std::uint32_t label = 0;
  std::vector<std::size_t> positions;
  double loss = 0.0;
  double cse = 0.0;
  double dtw = 0.0;
  double r_real = 0.0;
};

ExampleResult evaluate_one(const Model& model, const data::TokenSequence& ex) {
  Tape tape;
  const auto rec = model.forward(tape, ex, false);
  const auto terms = model.loss(rec, ex.label);
  ExampleResult out;
  out.label = static_cast<std::uint32_t>(argmax(rec.logits.value().values()));
  out.positions = rec.final_positions();
  out.loss = terms.total.value().item();
  out.cse = terms.cse;
  out.dtw = terms.dtw;
  out.r_real = rec.mean_realized_ratio();
  return out;
}

}  // namespace

std::string format_metrics(const EpochMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%.17g,%.17g,%.17g", m.epoch, m.split.c_str(),
                m.loss, m.cse, m.dtw, m.f1, m.mean_r_real);
  return buf;
}

EpochMetrics summarize(std::size_t epoch, const data::Dataset& ds, const Predictions& p) {
  std::vector<std::uint32_t> golds;
  golds.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) golds.push_back(ex.label);
  EpochMetrics m;
  m.epoch = epoch;
  m.split = ds.split;
  m.loss = p.loss;
  m.cse = p.cse;
  m.dtw = p.dtw;
  m.f1 = metrics::micro_f1(p.labels, golds, ds.no_relation()).f1;
  m.accuracy = metrics::accuracy(p.labels, golds);
  m.mean_r_real = p.mean_r_real;
  return m;
}

Predictions predict(const Model& model, const data::Dataset& ds, std::size_t threads) {
  check_compatible(model, ds);
  const std::size_t n = ds.examples.size();
  std::vector<ExampleResult> results(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));

  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = evaluate_one(model, ds.examples[i]);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) {
            results[i] = evaluate_one(model, ds.examples[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Predictions p;
  for (auto& r : results) {
    p.labels.push_back(r.label);
    p.final_positions.push_back(std::move(r.positions));
    p.loss += r.loss;
    p.cse += r.cse;
    p.dtw += r.dtw;
    p.mean_r_real += r.r_real;
  }
  if (n > 0) {
    const double inv = 1.0 / static_cast<double>(n);
    p.loss *= inv;
    p.cse *= inv;
    p.dtw *= inv;
    p.mean_r_real *= inv;
  }
  return p;
}

TrainResult train(Model& model, const data::Dataset& train_set, const data::Dataset* dev_set,
                  const TrainOptions& options) {
  if (train_set.examples.empty()) throw InputError("training set is empty");
  check_compatible(model, train_set);
  if (dev_set) check_compatible(model, *dev_set);

  const auto& cfg = model.config();
  ParamStore& store = model.params();
  Rng rng(cfg.seed ^ kTrainStreamSalt);
  AdamOptions adam;
  adam.lr = cfg.learning_rate;

  std::vector<std::size_t> order(train_set.examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    Predictions seen;
    std::vector<std::uint32_t> seen_labels(order.size());

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& ex = train_set.examples[order[k]];
        const auto diverged = [&](const std::string& what) {
          store.zero_grads();
          return DivergenceError(what + " at epoch " + std::to_string(epoch) + " on example '" +
                                 ex.id + "'");
        };
        Tape tape;
        ForwardRecord rec;
        LossTerms terms;
        try {
          rec = model.forward(tape, ex, true, &rng);
          terms = model.loss(rec, ex.label);
        } catch (const DomainError& e) {
          // Inputs are finite, so a degenerate Gaussian means the weights blew up.
          throw diverged(e.what());
        }
        const double value = terms.total.value().item();
        if (!std::isfinite(value)) throw diverged("non-finite loss");
        tape.backward(terms.total);
        tape.accumulate_into(store, weight);

        seen_labels[order[k]] = static_cast<std::uint32_t>(argmax(rec.logits.value().values()));
        seen.loss += value;
        seen.cse += terms.cse;
        seen.dtw += terms.dtw;
        seen.mean_r_real += rec.mean_realized_ratio();
      }
      adam_step(store, adam);
    }

    const double inv = 1.0 / static_cast<double>(order.size());
    seen.loss *= inv;
    seen.cse *= inv;
    seen.dtw *= inv;
    seen.mean_r_real *= inv;
    seen.labels = std::move(seen_labels);
    auto train_metrics = summarize(epoch, train_set, seen);
    result.log.push_back(train_metrics);
    if (options.on_epoch) options.on_epoch(train_metrics);

    bool stop = false;
    if (dev_set && !dev_set->examples.empty()) {
      const auto dev_metrics = summarize(epoch, *dev_set, predict(model, *dev_set, options.eval_threads));
      result.log.push_back(dev_metrics);
      if (options.on_epoch) options.on_epoch(dev_metrics);
      stop = options.target_dev_accuracy && dev_metrics.accuracy >= *options.target_dev_accuracy;
    }
    result.epochs_run = epoch;
    if (stop) break;
  }
  return result;
}

}  // namespace gdpnet::model
