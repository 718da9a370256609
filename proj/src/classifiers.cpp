#include "faceshape/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "faceshape/errors.hpp"

namespace faceshape {

namespace {

struct KindNames {
  ClassifierKind kind;
  std::string_view tag;
  std::string_view display;
};

constexpr std::array<KindNames, 5> kKindNames = {{
    {ClassifierKind::Lda, "lda", "LDA"},
    {ClassifierKind::SvmLinear, "svm-lin", "SVM-LIN"},
    {ClassifierKind::SvmRbf, "svm-rbf", "SVM-RBF"},
    {ClassifierKind::Mlp, "mlp", "MLP"},
    {ClassifierKind::Knn, "knn", "KNN"},
}};

Matrix normalized_matrix(const NormalizationStats& stats, std::span<const FeatureVector> X) {
  Matrix Z(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(kNumFeatures));
  for (std::size_t i = 0; i < X.size(); ++i) {
    const FeatureVector z = apply_normalizer(stats, X[i]);
    for (std::size_t j = 0; j < kNumFeatures; ++j) Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[j];
  }
  return Z;
}

// Restart 0 uses the configured seed itself.
std::uint64_t mlp_restart_seed(std::uint64_t seed, int restart) {
  return seed + static_cast<std::uint64_t>(restart) * 0x9e3779b97f4a7c15ULL;
}

SvmModel train_svm(const ClassifierConfig& cfg, const Matrix& Z, std::span<const int> labels, bool& converged) {
  const Kernel kernel = kernel_for(cfg);
  std::array<bool, kNumShapes> present{};
  for (int c : labels) present[static_cast<std::size_t>(c)] = true;

  SvmModel model;
  for (int a = 0; a < static_cast<int>(kNumShapes); ++a) {
    for (int b = a + 1; b < static_cast<int>(kNumShapes); ++b) {
      if (!present[static_cast<std::size_t>(a)] || !present[static_cast<std::size_t>(b)]) continue;
      std::vector<Eigen::Index> rows;
      std::vector<int> y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == a || labels[i] == b) {
          rows.push_back(static_cast<Eigen::Index>(i));
          y.push_back(labels[i] == a ? 1 : -1);
        }
      }
      Matrix sub(static_cast<Eigen::Index>(rows.size()), Z.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = Z.row(rows[r]);

      const SmoResult sol = solve_smo(gram_matrix(kernel, sub), y, cfg.svm_c, cfg.svm_tol, cfg.svm_max_iter);
      converged = converged && sol.converged;

      SvmMachine m;
      m.positive = a;
      m.negative = b;
      m.bias = sol.bias;
      std::vector<Eigen::Index> sv;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (sol.alpha[r] > 0.0) {
          sv.push_back(static_cast<Eigen::Index>(r));
          m.alpha.push_back(sol.alpha[r]);
          m.sign.push_back(y[r]);
        }
      }
      m.support.resize(static_cast<Eigen::Index>(sv.size()), Z.cols());
      for (std::size_t r = 0; r < sv.size(); ++r) m.support.row(static_cast<Eigen::Index>(r)) = sub.row(sv[r]);
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

Prediction predict_svm(const SvmModel& model, const Kernel& kernel, const double* z) {
  Prediction p;
  std::array<double, kNumShapes> margin{};
  for (const auto& m : model.machines) {
    const double d = svm_decision(m, kernel, z);
    const int winner = d > 0.0 ? m.positive : m.negative;
    p.scores[static_cast<std::size_t>(winner)] += 1.0;
    margin[static_cast<std::size_t>(m.positive)] += d;
    margin[static_cast<std::size_t>(m.negative)] -= d;
  }
  // Vote ties: larger summed signed decision value, then lower class index.
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumShapes; ++c) {
    if (p.scores[c] > p.scores[best] || (p.scores[c] == p.scores[best] && margin[c] > margin[best])) best = c;
  }
  p.label = static_cast<FaceShape>(best);
  return p;
}

} // namespace

std::string_view to_string(ClassifierKind k) {
  for (const auto& n : kKindNames) {
    if (n.kind == k) return n.tag;
  }
  return "unknown";
}

std::string_view display_name(ClassifierKind k) {
  for (const auto& n : kKindNames) {
    if (n.kind == k) return n.display;
  }
  return "unknown";
}

std::optional<ClassifierKind> parse_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& n : kKindNames) {
    if (lower == n.tag) return n.kind;
  }
  return std::nullopt;
}

FaceShape argmax_label(const std::array<double, kNumShapes>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumShapes; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<FaceShape>(best);
}

TrainedModel train(const ClassifierConfig& cfg, std::span<const FeatureVector> X, std::span<const FaceShape> y) {
  if (X.size() != y.size()) throw InvalidInput("feature and label counts differ");
  if (X.size() < 2) throw InvalidInput("need at least two training samples");
  for (const auto& row : X) {
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite feature value");
    }
  }
  std::vector<int> labels(y.size());
  std::transform(y.begin(), y.end(), labels.begin(), [](FaceShape s) { return to_index(s); });
  if (std::all_of(labels.begin(), labels.end(), [&](int c) { return c == labels.front(); })) {
    throw InvalidInput("single class");
  }

  TrainedModel model;
  model.config = cfg;
  model.norm = fit_normalizer(X);
  const Matrix Z = normalized_matrix(model.norm, X);

  switch (cfg.kind) {
    case ClassifierKind::Lda:
      model.params = fit_lda(Z, labels, cfg.lda_components);
      break;
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf: {
      if (!(cfg.svm_c > 0.0)) throw InvalidInput("svm_c must be > 0");
      if (cfg.kind == ClassifierKind::SvmRbf && !(cfg.rbf_gamma > 0.0)) throw InvalidInput("rbf_gamma must be > 0");
      bool converged = true;
      model.params = train_svm(cfg, Z, labels, converged);
      model.converged = converged;
      break;
    }
    case ClassifierKind::Mlp: {
      if (!(cfg.mlp_l2 >= 0.0)) throw InvalidInput("mlp_l2 must be >= 0");
      if (cfg.mlp_restarts < 1) throw InvalidInput("mlp_restarts must be >= 1");
      MlpModel m;
      m.layers = mlp_layers(cfg);
      const auto objective = [&](std::span<const double> p) {
        return mlp_loss_grad(p, Z, labels, cfg.mlp_l2, m.layers);
      };
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < cfg.mlp_restarts; ++r) {
        auto result = optim::minimize(objective, mlp_initial_params(m.layers, mlp_restart_seed(cfg.seed, r)), cfg.lbfgs);
        if (result.value < best) {
          best = result.value;
          m.params = std::move(result.x);
          m.status = result.status;
        }
      }
      model.params = std::move(m);
      break;
    }
    case ClassifierKind::Knn: {
      if (cfg.knn_k < 1) throw InvalidInput("knn_k must be >= 1");
      if (static_cast<std::size_t>(cfg.knn_k) > X.size()) {
        throw InvalidInput("knn_k (" + std::to_string(cfg.knn_k) + ") exceeds training set size (" +
                           std::to_string(X.size()) + ")");
      }
      KnnModel m;
      m.points = Z;
      m.labels = std::move(labels);
      model.params = std::move(m);
      break;
    }
  }
  return model;
}

Prediction predict(const TrainedModel& model, const FeatureVector& x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite feature value");
  }
  const FeatureVector z = apply_normalizer(model.norm, x);

  Prediction p;
  if (const auto* lda = std::get_if<LdaModel>(&model.params)) {
    const Eigen::Map<const Eigen::RowVectorXd> row(z.data(), static_cast<Eigen::Index>(kNumFeatures));
    const Eigen::RowVectorXd proj = row * lda->projection;
    for (std::size_t c = 0; c < kNumShapes; ++c) {
      p.scores[c] = lda->present[c] ? -(proj - lda->centroids.row(static_cast<Eigen::Index>(c))).norm()
                                    : -std::numeric_limits<double>::infinity();
    }
    p.label = argmax_label(p.scores);
  } else if (const auto* svm = std::get_if<SvmModel>(&model.params)) {
    p = predict_svm(*svm, kernel_for(model.config), z.data());
  } else if (const auto* mlp = std::get_if<MlpModel>(&model.params)) {
    p.scores = mlp_forward(*mlp, z.data());
    p.label = argmax_label(p.scores);
  } else {
    p.scores = knn_votes(std::get<KnnModel>(model.params), model.config.knn_k, z.data());
    p.label = argmax_label(p.scores);
  }
  return p;
}

} // namespace faceshape
