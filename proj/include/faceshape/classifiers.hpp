#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "faceshape/features.hpp"
#include "faceshape/landmarks.hpp"
#include "faceshape/optim.hpp"

namespace faceshape {

enum class ClassifierKind { Lda, SvmLinear, SvmRbf, Mlp, Knn };

inline constexpr std::array<ClassifierKind, 5> kAllKinds = {ClassifierKind::Lda, ClassifierKind::SvmLinear,
                                                            ClassifierKind::SvmRbf, ClassifierKind::Mlp,
                                                            ClassifierKind::Knn};

/// File/flag tag: "lda", "svm-lin", "svm-rbf", "mlp", "knn".
std::string_view to_string(ClassifierKind k);
/// Report label: "LDA", "SVM-LIN", "SVM-RBF", "MLP", "KNN".
std::string_view display_name(ClassifierKind k);
std::optional<ClassifierKind> parse_kind(std::string_view text);

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::Lda;
  double svm_c = 0.01;
  double rbf_gamma = 1.0 / 19.0;
  int knn_k = 5;
  int lda_components = 2;
  std::vector<int> mlp_hidden = {5, 2};
  double mlp_l2 = 1e-4;
  // Independent initializations tried; the lowest final objective wins.
  int mlp_restarts = 5;
  std::uint64_t seed = 0;

  // Solver controls.
  double svm_tol = 1e-3;
  long svm_max_iter = 100000;
  optim::LbfgsConfig lbfgs{};

  static ClassifierConfig for_kind(ClassifierKind kind) {
    ClassifierConfig c;
    c.kind = kind;
    return c;
  }
};

/// Rows are samples.
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LdaModel {
  Matrix projection;  // kNumFeatures x components
  Matrix centroids;   // kNumShapes x components, rows of absent classes are zero
  std::array<bool, kNumShapes> present{};
};

struct SvmMachine {
  int positive = 0;  // class index voted for when the decision value is > 0
  int negative = 0;
  double bias = 0.0;
  std::vector<double> alpha;  // support vectors only (alpha > 0)
  std::vector<int> sign;      // +1 for the positive class, -1 otherwise
  RowMatrix support;          // one support vector per row
};

struct SvmModel {
  std::vector<SvmMachine> machines;  // one per pair of classes present at training time
};

struct MlpModel {
  std::vector<int> layers;     // input, hidden..., output
  std::vector<double> params;  // per layer: weights (out x in, row-major) then biases
  optim::Status status = optim::Status::MaxIters;
};

struct KnnModel {
  RowMatrix points;  // normalized training rows
  std::vector<int> labels;
};

struct TrainedModel {
  ClassifierConfig config;
  NormalizationStats norm;
  std::variant<LdaModel, SvmModel, MlpModel, KnnModel> params;
  bool converged = true;  // false when an SMO machine hit the iteration cap
};

struct Prediction {
  FaceShape label = FaceShape::Heart;
  std::array<double, kNumShapes> scores{};
};

/// Highest score; ties go to the lowest class index.
FaceShape argmax_label(const std::array<double, kNumShapes>& scores);

/// Fits the normalizer on X, then the configured classifier on the z-scores.
/// Throws InvalidInput on shape mismatch, fewer than two samples, a single
/// class, non-finite features, or knn_k larger than the training set.
TrainedModel train(const ClassifierConfig& cfg, std::span<const FeatureVector> X, std::span<const FaceShape> y);

Prediction predict(const TrainedModel& model, const FeatureVector& x);

// --- LDA -------------------------------------------------------------------

/// Fisher discriminant directions on already-normalized rows.
LdaModel fit_lda(const Matrix& Z, std::span<const int> labels, int components);

/// Within-class scatter of the rows projected through `projection`.
Matrix projected_within_scatter(const Matrix& Z, std::span<const int> labels, const Matrix& projection);

// --- SVM -------------------------------------------------------------------

enum class KernelKind { Linear, Rbf };

struct Kernel {
  KernelKind kind = KernelKind::Linear;
  double gamma = 1.0 / 19.0;

  double operator()(const double* a, const double* b, Eigen::Index dim) const;
};

Matrix gram_matrix(const Kernel& k, const Matrix& X);

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Soft-margin dual by SMO with maximal-violating-pair selection. Stops when
/// the largest KKT violation gap drops to `tol` or after `max_iter` updates.
/// Decision function: sum_i alpha_i y_i K(x_i, x) + bias.
SmoResult solve_smo(const Matrix& gram, std::span<const int> y, double C, double tol, long max_iter);

double svm_decision(const SvmMachine& m, const Kernel& k, const double* x);

Kernel kernel_for(const ClassifierConfig& cfg);

// --- MLP -------------------------------------------------------------------

std::vector<int> mlp_layers(const ClassifierConfig& cfg);
std::size_t mlp_param_count(std::span<const int> layers);

/// Mean softmax cross-entropy plus (l2/2)·||W||^2 over weights only, with its
/// exact backpropagated gradient. Hidden layers use ReLU.
optim::ObjectiveEvaluation mlp_loss_grad(std::span<const double> params, const Matrix& Z, std::span<const int> labels,
                                         double l2, std::span<const int> layers);

std::vector<double> mlp_initial_params(std::span<const int> layers, std::uint64_t seed);

/// Softmax class probabilities for one normalized input.
std::array<double, kNumShapes> mlp_forward(const MlpModel& m, const double* z);

// --- KNN -------------------------------------------------------------------

/// Votes among the k nearest stored rows to a normalized input; equal
/// distances keep the earlier training row.
std::array<double, kNumShapes> knn_votes(const KnnModel& m, int k, const double* z);

// --- persistence -----------------------------------------------------------

std::string to_model_text(const TrainedModel& model);
TrainedModel parse_model_text(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace faceshape
