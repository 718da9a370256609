#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

#include "faceshape/bench.hpp"
#include "faceshape/errors.hpp"
#include "faceshape/features.hpp"
#include "faceshape/random.hpp"

namespace faceshape {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Confusion confusion_on(const TrainedModel& model, const FeatureTable& table, std::span<const std::size_t> rows) {
  Confusion c{};
  for (std::size_t i : rows) {
    const auto truth = static_cast<std::size_t>(to_index(*table.labels[i]));
    const auto guess = static_cast<std::size_t>(to_index(predict(model, table.rows[i]).label));
    ++c[truth][guess];
  }
  return c;
}

} // namespace

std::string_view to_string(SubsetStrategy s) { return s == SubsetStrategy::Prefix ? "prefix" : "stratified"; }

std::string_view to_string(EvalMode m) {
  return m == EvalMode::OverallOnAll ? "overall-on-all" : "holdout-remainder";
}

long total(const Confusion& c) {
  long n = 0;
  for (const auto& row : c) {
    for (long v : row) n += v;
  }
  return n;
}

double accuracy(const Confusion& c) {
  const long n = total(c);
  if (n == 0) return 0.0;
  long hit = 0;
  for (std::size_t i = 0; i < kNumShapes; ++i) hit += c[i][i];
  return static_cast<double>(hit) / static_cast<double>(n);
}

const BenchCell& BenchReport::cell(std::string_view classifier, int size) const {
  for (const auto& c : cells) {
    if (c.classifier == classifier && c.size == size) return c;
  }
  throw InvalidInput("no benchmark cell for " + std::string(classifier) + " at size " + std::to_string(size));
}

std::vector<std::size_t> training_subset(const Dataset& ds, int size, SubsetStrategy strategy, std::uint64_t seed) {
  if (size < 1 || static_cast<std::size_t>(size) > ds.size()) {
    throw InvalidInput("training size " + std::to_string(size) + " outside [1, " + std::to_string(ds.size()) + "]");
  }
  std::vector<std::size_t> picked;
  if (strategy == SubsetStrategy::Prefix) {
    picked.resize(static_cast<std::size_t>(size));
    for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
    return picked;
  }

  std::array<std::vector<std::size_t>, kNumShapes> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!ds.samples[i].label) throw InvalidInput("sample '" + ds.samples[i].id + "' has no label");
    by_class[static_cast<std::size_t>(to_index(*ds.samples[i].label))].push_back(i);
  }
  // One permutation per class, independent of size, so larger draws contain smaller ones.
  Rng rng(seed);
  for (auto& members : by_class) rng.shuffle(members);

  // Equal quotas; classes that run short hand their remainder round-robin to the rest.
  std::array<std::size_t, kNumShapes> quota{};
  std::size_t remaining = static_cast<std::size_t>(size);
  while (remaining > 0) {
    std::size_t open = 0;
    for (std::size_t c = 0; c < kNumShapes; ++c) open += quota[c] < by_class[c].size() ? 1 : 0;
    const std::size_t share = std::max<std::size_t>(1, remaining / open);
    for (std::size_t c = 0; c < kNumShapes && remaining > 0; ++c) {
      const std::size_t room = by_class[c].size() - quota[c];
      const std::size_t take = std::min({share, room, remaining});
      quota[c] += take;
      remaining -= take;
    }
  }
  for (std::size_t c = 0; c < kNumShapes; ++c) {
    picked.insert(picked.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

BenchReport run_benchmark(const Dataset& ds, const BenchConfig& cfg) {
  if (cfg.classifiers.empty()) throw InvalidInput("no classifiers configured");
  if (cfg.sizes.empty()) throw InvalidInput("no training sizes configured");
  if (!ds.labeled()) throw InvalidInput("benchmark dataset contains unlabeled samples");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] < 1) throw InvalidInput("training sizes must be positive");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1]) throw InvalidInput("training sizes must be strictly ascending");
    if (static_cast<std::size_t>(cfg.sizes[i]) > ds.size()) {
      throw InvalidInput("training size " + std::to_string(cfg.sizes[i]) + " exceeds dataset size " +
                         std::to_string(ds.size()));
    }
  }
  if (cfg.eval_mode == EvalMode::HoldoutRemainder && static_cast<std::size_t>(cfg.sizes.back()) == ds.size()) {
    throw InvalidInput("holdout remainder is empty at training size " + std::to_string(cfg.sizes.back()));
  }

  BenchReport rep;
  rep.started_at = utc_now();
  rep.sizes = cfg.sizes;
  rep.seed = cfg.seed;
  rep.subset_strategy = cfg.subset_strategy;
  rep.eval_mode = cfg.eval_mode;
  rep.dataset_size = ds.size();
  for (const auto& c : cfg.classifiers) rep.classifiers.emplace_back(display_name(c.kind));

  const FeatureTable table = extract_table(ds);
  std::vector<std::vector<std::size_t>> subsets;
  for (int size : cfg.sizes) subsets.push_back(training_subset(ds, size, cfg.subset_strategy, cfg.seed));

  const std::size_t ncells = cfg.classifiers.size() * cfg.sizes.size();
  rep.cells.resize(ncells);

  const auto run_cell = [&](std::size_t k) {
    const auto& ccfg = cfg.classifiers[k / cfg.sizes.size()];
    const std::size_t s = k % cfg.sizes.size();
    const auto& train_rows = subsets[s];

    std::vector<FeatureVector> X;
    std::vector<FaceShape> y;
    for (std::size_t i : train_rows) {
      X.push_back(table.rows[i]);
      y.push_back(*table.labels[i]);
    }
    std::vector<std::size_t> eval_rows;
    if (cfg.eval_mode == EvalMode::OverallOnAll) {
      eval_rows.resize(table.size());
      for (std::size_t i = 0; i < eval_rows.size(); ++i) eval_rows[i] = i;
    } else {
      std::vector<bool> used(table.size(), false);
      for (std::size_t i : train_rows) used[i] = true;
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (!used[i]) eval_rows.push_back(i);
      }
    }

    const TrainedModel model = train(ccfg, X, y);
    BenchCell& cell = rep.cells[k];
    cell.kind = ccfg.kind;
    cell.classifier = std::string(display_name(ccfg.kind));
    cell.size = cfg.sizes[s];
    cell.converged = model.converged;
    cell.training_confusion = confusion_on(model, table, train_rows);
    cell.confusion = confusion_on(model, table, eval_rows);
    cell.training_accuracy = accuracy(cell.training_confusion);
    cell.overall_accuracy = accuracy(cell.confusion);
    for (std::size_t i : train_rows) cell.training_ids.push_back(table.ids[i]);
    for (std::size_t i : eval_rows) cell.evaluation_ids.push_back(table.ids[i]);
  };

  // Cells are independent; each worker writes only its own slot.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(ncells, cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t k = next++; k < ncells; k = next++) {
      try {
        run_cell(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  rep.finished_at = utc_now();
  return rep;
}

} // namespace faceshape
