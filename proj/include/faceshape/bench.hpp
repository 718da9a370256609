#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "faceshape/classifiers.hpp"
#include "faceshape/landmarks.hpp"

namespace faceshape {

// --- synthetic landmark data ---------------------------------------------

struct SynthConfig {
  int per_class = 100;
  double noise_sigma = 2.0;  // pixels, i.i.d. on every coordinate
  std::uint64_t seed = 0;
};

/// Geometry of one class template. Face width is fixed at 200 px.
struct ShapeTemplate {
  FaceShape shape;
  double height_ratio;  // d(9,18) / d(1,17)
  double jaw_ratio;     // d(5,13) / d(1,17)
  double jaw_drop;      // vertical drop from points 1/17 to the chin, in face widths
  double chin_power;    // taper exponent between the jaw points and the chin
  double mouth_height;  // chin-to-mouth distance, in face widths
};

const std::array<ShapeTemplate, kNumShapes>& shape_templates();

/// Noise-free landmarks for one class.
LandmarkSet template_landmarks(FaceShape shape);

/// Samples are interleaved by class (heart, oblong, oval, round, square, heart, ...).
/// Jittered sets are redrawn until they pass validation and keep every
/// contour point above the chin; throws GenerationFailed after 100 redraws.
Dataset synth_dataset(const SynthConfig& cfg);

// --- benchmark protocol -----------------------------------------------------

enum class SubsetStrategy { Prefix, Stratified };
enum class EvalMode { OverallOnAll, HoldoutRemainder };

std::string_view to_string(SubsetStrategy s);
std::string_view to_string(EvalMode m);

using Confusion = std::array<std::array<long, kNumShapes>, kNumShapes>;  // [true][predicted]

double accuracy(const Confusion& c);
long total(const Confusion& c);

struct BenchConfig {
  std::vector<int> sizes = {100, 200, 300, 400, 500};
  std::vector<ClassifierConfig> classifiers = {
      ClassifierConfig::for_kind(ClassifierKind::Lda), ClassifierConfig::for_kind(ClassifierKind::SvmLinear),
      ClassifierConfig::for_kind(ClassifierKind::SvmRbf), ClassifierConfig::for_kind(ClassifierKind::Mlp),
      ClassifierConfig::for_kind(ClassifierKind::Knn)};
  std::uint64_t seed = 0;
  SubsetStrategy subset_strategy = SubsetStrategy::Stratified;
  EvalMode eval_mode = EvalMode::OverallOnAll;
  int threads = 0;  // 0 = hardware concurrency
};

struct BenchCell {
  ClassifierKind kind;
  std::string classifier;  // display name
  int size = 0;
  double training_accuracy = 0.0;
  double overall_accuracy = 0.0;
  Confusion training_confusion{};
  Confusion confusion{};  // on the evaluation set
  std::vector<std::string> training_ids;
  std::vector<std::string> evaluation_ids;
  bool converged = true;
};

struct BenchReport {
  std::vector<int> sizes;
  std::vector<std::string> classifiers;  // row order
  std::vector<BenchCell> cells;          // classifier-major, then size
  std::uint64_t seed = 0;
  SubsetStrategy subset_strategy = SubsetStrategy::Stratified;
  EvalMode eval_mode = EvalMode::OverallOnAll;
  std::size_t dataset_size = 0;
  std::string started_at;   // UTC, ISO-8601
  std::string finished_at;

  const BenchCell& cell(std::string_view classifier, int size) const;
};

/// Indices of the training subset of `size` drawn from the labeled samples.
/// Stratified draws are nested across sizes for a fixed seed.
std::vector<std::size_t> training_subset(const Dataset& ds, int size, SubsetStrategy strategy, std::uint64_t seed);

BenchReport run_benchmark(const Dataset& ds, const BenchConfig& cfg);

// --- reports ------------------------------------------------------------------

enum class ReportFormat { Markdown, Csv };

struct ReportOptions {
  bool timestamps = false;  // timestamps make otherwise identical runs differ
};

std::string format_percent(double fraction);
std::string render_report(const BenchReport& rep, ReportFormat format, const ReportOptions& opts = {});
void emit_report(const BenchReport& rep, ReportFormat format, const std::filesystem::path& path,
                 const ReportOptions& opts = {});

struct CsvRow {
  std::string classifier;
  int size = 0;
  double training_accuracy = 0.0;
  double overall_accuracy = 0.0;
  long training_count = 0;
  long evaluation_count = 0;
};

std::vector<CsvRow> parse_report_csv(std::string_view text);

} // namespace faceshape
