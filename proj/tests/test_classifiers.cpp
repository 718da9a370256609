#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "faceshape/bench.hpp"
#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"
#include "test_support.hpp"

using namespace faceshape;
using faceshape::testing::TempDir;

namespace {

constexpr std::array<ClassifierKind, 5> kKinds = {ClassifierKind::Lda, ClassifierKind::SvmLinear,
                                                  ClassifierKind::SvmRbf, ClassifierKind::Mlp, ClassifierKind::Knn};

struct Labeled {
  std::vector<FeatureVector> X;
  std::vector<FaceShape> y;
};

// Gaussian blobs: class c centred at `spacing` along axis c.
Labeled blobs(Rng& rng, int per_class, double spacing, double spread, int classes = 5) {
  Labeled d;
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < classes; ++c) {
      FeatureVector x{};
      for (auto& v : x) v = spread * rng.normal();
      x[static_cast<std::size_t>(c)] += spacing;
      d.X.push_back(x);
      d.y.push_back(shape_from_index(c));
    }
  }
  return d;
}

double training_accuracy(const TrainedModel& m, const Labeled& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.X.size(); ++i) ok += predict(m, d.X[i]).label == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(d.X.size());
}

Labeled synth_features(int per_class, std::uint64_t seed) {
  const auto table = extract_table(synth_dataset({per_class, 2.0, seed}));
  return {table.rows, table.label_list()};
}

std::vector<int> indices(const std::vector<FaceShape>& y) {
  std::vector<int> out;
  for (auto s : y) out.push_back(to_index(s));
  return out;
}

Matrix normalized(const TrainedModel& m, const std::vector<FeatureVector>& X) {
  Matrix Z(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(kNumFeatures));
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto z = apply_normalizer(m.norm, X[i]);
    for (std::size_t j = 0; j < kNumFeatures; ++j) Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[j];
  }
  return Z;
}

// Largest KKT violation of a dual solution, measured on y_i f(x_i) with the margin at 1.
double kkt_violation(const Matrix& K, const std::vector<int>& y, const std::vector<double>& alpha, double bias,
                     double C) {
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(y.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = bias;
    for (Eigen::Index j = 0; j < n; ++j) f += alpha[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)] * K(i, j);
    const double m = y[static_cast<std::size_t>(i)] * f;
    const double a = alpha[static_cast<std::size_t>(i)];
    const double eps = 1e-12 * C;
    if (a <= eps) {
      worst = std::max(worst, 1.0 - m);
    } else if (a >= C - eps) {
      worst = std::max(worst, m - 1.0);
    } else {
      worst = std::max(worst, std::abs(m - 1.0));
    }
  }
  return worst;
}

} // namespace

TEST(Kinds, NamesRoundTrip) {
  for (auto k : kKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(parse_kind("SVM-RBF"), ClassifierKind::SvmRbf);
  EXPECT_FALSE(parse_kind("tree").has_value());
  EXPECT_EQ(display_name(ClassifierKind::SvmLinear), "SVM-LIN");
}

TEST(Config, DefaultsAreTheDocumentedOnes) {
  const ClassifierConfig c;
  EXPECT_EQ(c.svm_c, 0.01);
  EXPECT_EQ(c.rbf_gamma, 1.0 / 19.0);
  EXPECT_EQ(c.knn_k, 5);
  EXPECT_EQ(c.lda_components, 2);
  EXPECT_EQ(c.mlp_hidden, (std::vector<int>{5, 2}));
  EXPECT_EQ(c.mlp_l2, 1e-4);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(mlp_param_count(mlp_layers(c)), 127u);
}

TEST(Argmax, UniqueMaxAndLowestIndexTies) {
  EXPECT_EQ(argmax_label({0, 0, 3, 1, 2}), FaceShape::Oval);
  EXPECT_EQ(argmax_label({1, 4, 0, 4, 4}), FaceShape::Oblong);
  EXPECT_EQ(argmax_label({2, 2, 2, 2, 2}), FaceShape::Heart);
  EXPECT_EQ(argmax_label({-5, -1, -3, -1, -2}), FaceShape::Oblong);
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::array<double, kNumShapes> s{};
    for (auto& v : s) v = static_cast<double>(rng.below(4));
    const auto got = static_cast<std::size_t>(to_index(argmax_label(s)));
    const double top = *std::max_element(s.begin(), s.end());
    EXPECT_EQ(s[got], top);
    for (std::size_t c = 0; c < got; ++c) EXPECT_LT(s[c], top);
  }
}

TEST(Train, RejectsBadInputs) {
  Rng rng(2);
  const auto d = blobs(rng, 4, 5.0, 1.0);
  const auto cfg = ClassifierConfig::for_kind(ClassifierKind::Knn);
  const std::vector<FaceShape> one(d.X.size(), FaceShape::Round);
  try {
    train(cfg, d.X, one);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "single class");
  }
  EXPECT_THROW(train(cfg, std::span(d.X).first(1), std::span(d.y).first(1)), InvalidInput);
  EXPECT_THROW(train(cfg, d.X, std::span(d.y).first(3)), InvalidInput);
  auto big_k = cfg;
  big_k.knn_k = static_cast<int>(d.X.size()) + 1;
  EXPECT_THROW(train(big_k, d.X, d.y), InvalidInput);
  auto nan_x = d.X;
  nan_x[2][3] = std::nan("");
  EXPECT_THROW(train(cfg, nan_x, d.y), InvalidInput);
  const auto model = train(cfg, d.X, d.y);
  FeatureVector bad{};
  bad[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(predict(model, bad), InvalidInput);
}

TEST(Knn, KEqualsOneRecallsTrainingLabels) {
  Rng rng(3);
  const auto d = blobs(rng, 30, 1.0, 1.0);  // heavily overlapping classes
  auto cfg = ClassifierConfig::for_kind(ClassifierKind::Knn);
  cfg.knn_k = 1;
  EXPECT_EQ(training_accuracy(train(cfg, d.X, d.y), d), 1.0);
}

TEST(Knn, FiveCopiesVoteFive) {
  Rng rng(4);
  auto d = blobs(rng, 10, 30.0, 1.0);
  FeatureVector p{};
  p.fill(-40.0);
  for (int c = 0; c < 5; ++c) {
    d.X.push_back(p);
    d.y.push_back(FaceShape::Round);
  }
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Knn), d.X, d.y);
  const auto pred = predict(model, p);
  EXPECT_EQ(pred.label, FaceShape::Round);
  EXPECT_EQ(pred.scores[static_cast<std::size_t>(to_index(FaceShape::Round))], 5.0);
}

TEST(Knn, MatchesBruteForceOracle) {
  for (bool lattice : {false, true}) {
    Rng rng(lattice ? 6 : 5);
    Labeled d;
    for (int i = 0; i < 500; ++i) {
      FeatureVector x{};
      // The lattice variant forces many exactly equal distances.
      for (auto& v : x) v = lattice ? static_cast<double>(rng.below(3)) : rng.normal();
      d.X.push_back(x);
      d.y.push_back(shape_from_index(static_cast<int>(rng.below(5))));
    }
    const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Knn), d.X, d.y);
    std::vector<FeatureVector> Z;
    for (const auto& x : d.X) Z.push_back(apply_normalizer(model.norm, x));
    for (int q = 0; q < 200; ++q) {
      FeatureVector x{};
      for (auto& v : x) v = lattice ? static_cast<double>(rng.below(3)) : 1.5 * rng.normal();
      const auto z = apply_normalizer(model.norm, x);
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < Z.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < kNumFeatures; ++j) s += (Z[i][j] - z[j]) * (Z[i][j] - z[j]);
        all.emplace_back(s, i);
      }
      std::sort(all.begin(), all.end());  // distance, then training order
      std::array<double, kNumShapes> votes{};
      for (int r = 0; r < 5; ++r) votes[static_cast<std::size_t>(to_index(d.y[all[static_cast<std::size_t>(r)].second]))] += 1;
      std::size_t best = 0;
      for (std::size_t c = 1; c < kNumShapes; ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      const auto pred = predict(model, x);
      EXPECT_EQ(pred.scores, votes) << "query " << q;
      EXPECT_EQ(to_index(pred.label), static_cast<int>(best)) << "query " << q;
    }
  }
}

TEST(Smo, RandomProblemsSatisfyKkt) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(37));
    const int dim = 1 + static_cast<int>(rng.below(5));
    Matrix X(n, dim);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
      for (int j = 0; j < dim; ++j) X(i, j) = rng.normal() + 0.7 * y[static_cast<std::size_t>(i)];
    }
    const Kernel k{trial % 2 ? KernelKind::Rbf : KernelKind::Linear, rng.uniform(0.1, 2.0)};
    const double C = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
    const Matrix K = gram_matrix(k, X);
    const auto res = solve_smo(K, y, C, 1e-3, 100000);
    ASSERT_TRUE(res.converged) << "trial " << trial;
    double balance = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = res.alpha[static_cast<std::size_t>(i)];
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, C);
      balance += a * y[static_cast<std::size_t>(i)];
    }
    EXPECT_LE(std::abs(balance), 1e-9);
    EXPECT_LE(kkt_violation(K, y, res.alpha, res.bias, C), 1e-3) << "trial " << trial << " C " << C;
  }
}

TEST(Svm, SeparableBlobsLinearHighC) {
  Rng rng(8);
  const auto d = blobs(rng, 20, 12.0, 1.0, 2);
  auto cfg = ClassifierConfig::for_kind(ClassifierKind::SvmLinear);
  cfg.svm_c = 10.0;
  const auto model = train(cfg, d.X, d.y);
  EXPECT_TRUE(model.converged);
  EXPECT_EQ(training_accuracy(model, d), 1.0);

  const auto& svm = std::get<SvmModel>(model.params);
  ASSERT_EQ(svm.machines.size(), 1u);
  const auto& m = svm.machines[0];
  // Rebuild the full dual from the stored support vectors and check KKT on every point.
  const Matrix Z = normalized(model, d.X);
  std::vector<int> y;
  for (auto s : d.y) y.push_back(to_index(s) == m.positive ? 1 : -1);
  std::vector<double> alpha(d.X.size(), 0.0);
  for (std::size_t s = 0; s < m.alpha.size(); ++s) {
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      if ((Z.row(i) - m.support.row(static_cast<Eigen::Index>(s))).norm() == 0.0) {
        alpha[static_cast<std::size_t>(i)] = m.alpha[s];
        EXPECT_EQ(y[static_cast<std::size_t>(i)], m.sign[s]);
      }
    }
  }
  const Matrix K = Z * Z.transpose();
  EXPECT_LE(kkt_violation(K, y, alpha, m.bias, cfg.svm_c), 1e-3);
  double balance = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) balance += alpha[i] * y[i];
  EXPECT_LE(std::abs(balance), 1e-9);
}

TEST(Svm, OneVsOneCastsTenVotes) {
  Rng rng(9);
  const auto d = blobs(rng, 12, 4.0, 1.0);
  for (auto kind : {ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    const auto model = train(ClassifierConfig::for_kind(kind), d.X, d.y);
    const auto& svm = std::get<SvmModel>(model.params);
    EXPECT_EQ(svm.machines.size(), 10u);
    for (const auto& m : svm.machines) {
      for (double a : m.alpha) {
        EXPECT_GT(a, 0.0);
        EXPECT_LE(a, model.config.svm_c);
      }
    }
    for (int q = 0; q < 20; ++q) {
      const auto p = predict(model, d.X[static_cast<std::size_t>(q)]);
      EXPECT_EQ(std::accumulate(p.scores.begin(), p.scores.end(), 0.0), 10.0);
    }
  }
}

TEST(Svm, MissingClassesSkipTheirMachines) {
  Rng rng(10);
  const auto d = blobs(rng, 10, 6.0, 1.0, 3);
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::SvmRbf), d.X, d.y);
  EXPECT_EQ(std::get<SvmModel>(model.params).machines.size(), 3u);
  for (const auto& x : d.X) EXPECT_LT(to_index(predict(model, x).label), 3);
}

TEST(Lda, WellSeparatedBlobsIn19D) {
  Rng rng(11);
  const double spacing = 20.0 / std::sqrt(2.0);  // pairwise centre distance 20
  const auto d = blobs(rng, 20, spacing, 1.0);
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Lda), d.X, d.y);
  EXPECT_GE(training_accuracy(model, d), 0.99);

  // Oracle: nearest centroid in the original space.
  std::array<FeatureVector, kNumShapes> centre{};
  for (std::size_t i = 0; i < d.X.size(); ++i) {
    for (std::size_t j = 0; j < kNumFeatures; ++j) centre[static_cast<std::size_t>(to_index(d.y[i]))][j] += d.X[i][j] / 20.0;
  }
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.X.size(); ++i) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t c = 0; c < kNumShapes; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < kNumFeatures; ++j) s += (d.X[i][j] - centre[c][j]) * (d.X[i][j] - centre[c][j]);
      if (s < best_d) {
        best_d = s;
        best = c;
      }
    }
    ok += static_cast<int>(best) == to_index(d.y[i]);
  }
  EXPECT_EQ(ok, d.X.size());
}

TEST(Lda, ThreeComponentsSeparateBlobsIn19D) {
  Rng rng(11);
  const auto d = blobs(rng, 20, 20.0 / std::sqrt(2.0), 1.0);
  auto cfg = ClassifierConfig::for_kind(ClassifierKind::Lda);
  cfg.lda_components = 3;
  EXPECT_GE(training_accuracy(train(cfg, d.X, d.y), d), 0.99);
}

TEST(Lda, ProjectionBeatsRandomProjections) {
  const auto d = synth_features(40, 3);
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Lda), d.X, d.y);
  const auto& lda = std::get<LdaModel>(model.params);
  ASSERT_EQ(lda.projection.rows(), static_cast<Eigen::Index>(kNumFeatures));
  ASSERT_EQ(lda.projection.cols(), 2);
  EXPECT_EQ(Eigen::FullPivLU<Matrix>(lda.projection).rank(), 2);

  const Matrix Z = normalized(model, d.X);
  const auto labels = indices(d.y);
  const Matrix centred = Z.rowwise() - Z.colwise().mean();
  const Matrix St = centred.transpose() * centred;
  // Rescale so that P^T St P = I; within-class traces are then comparable.
  const auto whitened_trace = [&](const Matrix& P) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(P.transpose() * St * P);
    const Matrix W = P * es.operatorInverseSqrt();
    return projected_within_scatter(Z, labels, W).trace();
  };
  const double lda_trace = whitened_trace(lda.projection);
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    Matrix R(static_cast<Eigen::Index>(kNumFeatures), 2);
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) R(i, j) = rng.normal();
    }
    EXPECT_LE(lda_trace, whitened_trace(R) + 1e-9) << "projection " << t;
  }
}

TEST(Lda, ComponentCountIsConfigurable) {
  const auto d = synth_features(10, 4);
  auto cfg = ClassifierConfig::for_kind(ClassifierKind::Lda);
  cfg.lda_components = 3;
  EXPECT_EQ(std::get<LdaModel>(train(cfg, d.X, d.y).params).projection.cols(), 3);
  cfg.lda_components = 0;
  EXPECT_THROW(train(cfg, d.X, d.y), InvalidInput);
}

TEST(Mlp, ZeroParametersGiveLogFive) {
  Rng rng(13);
  const std::vector<int> layers = {19, 5, 2, 5};
  Matrix Z(10, 19);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index j = 0; j < Z.cols(); ++j) Z(i, j) = rng.normal();
  }
  const std::vector<int> labels = {0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
  const std::vector<double> zero(127, 0.0);
  const auto e = mlp_loss_grad(zero, Z, labels, 1e-4, layers);
  EXPECT_NEAR(e.value, std::log(5.0), 1e-15);
}

TEST(Mlp, GradientMatchesCentralDifferences) {
  Rng rng(14);
  const std::vector<int> layers = {19, 5, 2, 5};
  for (int point = 0; point < 10; ++point) {
    Matrix Z(25, 19);
    std::vector<int> labels;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      labels.push_back(static_cast<int>(rng.below(5)));
      for (Eigen::Index j = 0; j < Z.cols(); ++j) Z(i, j) = rng.normal();
    }
    std::vector<double> p(127);
    for (auto& v : p) v = rng.uniform(-1.0, 1.0);
    const double l2 = point % 2 ? 1e-4 : 0.3;
    const auto e = mlp_loss_grad(p, Z, labels, l2, layers);
    ASSERT_EQ(e.gradient.size(), 127u);
    const double h = 1e-6;
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto plus = p, minus = p;
      plus[k] += h;
      minus[k] -= h;
      const double fd =
          (mlp_loss_grad(plus, Z, labels, l2, layers).value - mlp_loss_grad(minus, Z, labels, l2, layers).value) / (2 * h);
      // Relative error, floored at 1e-3 so vanishing gradients are judged on absolute error.
      const double scale = std::max({std::abs(fd), std::abs(e.gradient[k]), 1e-3});
      EXPECT_LT(std::abs(fd - e.gradient[k]) / scale, 1e-5) << "point " << point << " coordinate " << k;
    }
  }
}

TEST(Mlp, SaturatedCorrectLogitsDriveLossToZero) {
  const std::vector<int> layers = {19, 5, 2, 5};
  const Matrix Z = Matrix::Ones(1, 19);
  const std::vector<int> label = {3};
  double previous = std::log(5.0);
  for (double margin : {2.0, 5.0, 10.0, 20.0}) {
    std::vector<double> p(127, 0.0);
    p[127 - 5 + 3] = margin;  // output bias of class 3
    const double v = mlp_loss_grad(p, Z, label, 0.0, layers).value;
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_LT(previous, 1e-8);
}

TEST(Mlp, ShapeMismatchIsInvalidInput) {
  const std::vector<int> layers = {19, 5, 2, 5};
  const Matrix Z = Matrix::Zero(2, 19);
  const std::vector<int> labels = {0, 1};
  EXPECT_THROW(mlp_loss_grad(std::vector<double>(126, 0.0), Z, labels, 0.0, layers), InvalidInput);
  EXPECT_THROW(mlp_loss_grad(std::vector<double>(127, 0.0), Matrix::Zero(2, 18), labels, 0.0, layers), InvalidInput);
  EXPECT_THROW(mlp_loss_grad(std::vector<double>(127, 0.0), Z, std::vector<int>{0, 7}, 0.0, layers), InvalidInput);
}

TEST(Mlp, ScoresAreAProbabilityVector) {
  const auto d = synth_features(20, 5);
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Mlp), d.X, d.y);
  const auto& mlp = std::get<MlpModel>(model.params);
  EXPECT_EQ(mlp.layers, (std::vector<int>{19, 5, 2, 5}));
  EXPECT_EQ(mlp.params.size(), 127u);
  Rng rng(15);
  for (int q = 0; q < 100; ++q) {
    FeatureVector x{};
    for (auto& v : x) v = rng.uniform(-5.0, 5.0);
    const auto p = predict(model, x);
    double sum = 0.0;
    for (double s : p.scores) {
      EXPECT_GE(s, 0.0);
      sum += s;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Mlp, InitializationIsSeededAndSmall) {
  const std::vector<int> layers = {19, 5, 2, 5};
  const auto a = mlp_initial_params(layers, 42);
  EXPECT_EQ(a, mlp_initial_params(layers, 42));
  EXPECT_NE(a, mlp_initial_params(layers, 43));
  std::size_t at = 0;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    const double bound = 0.5 * std::sqrt(6.0 / (layers[l - 1] + layers[l]));
    const std::size_t count = static_cast<std::size_t>(layers[l] * (layers[l - 1] + 1));
    for (std::size_t i = 0; i < count; ++i, ++at) EXPECT_LE(std::abs(a[at]), bound) << "layer " << l;
  }
  EXPECT_EQ(at, a.size());
}

TEST(Mlp, LearnsSyntheticShapes) {
  const auto d = synth_features(60, 6);
  const auto model = train(ClassifierConfig::for_kind(ClassifierKind::Mlp), d.X, d.y);
  EXPECT_GE(training_accuracy(model, d), 0.95);
}

TEST(Train, DeterministicForEveryKind) {
  const auto d = synth_features(15, 7);
  for (auto kind : kKinds) {
    auto cfg = ClassifierConfig::for_kind(kind);
    cfg.seed = 99;
    EXPECT_EQ(to_model_text(train(cfg, d.X, d.y)), to_model_text(train(cfg, d.X, d.y))) << to_string(kind);
  }
}

TEST(Persistence, RoundTripGivesIdenticalPredictions) {
  TempDir dir("model");
  const auto d = synth_features(20, 8);
  Rng rng(16);
  for (auto kind : kKinds) {
    const auto model = train(ClassifierConfig::for_kind(kind), d.X, d.y);
    const auto path = dir / (std::string(to_string(kind)) + ".model");
    save_model(model, path);
    const auto back = load_model(path);
    EXPECT_EQ(to_model_text(back), to_model_text(model));
    for (int q = 0; q < 100; ++q) {
      FeatureVector x = d.X[rng.below(d.X.size())];
      for (auto& v : x) v += 0.05 * rng.normal();
      const auto a = predict(model, x);
      const auto b = predict(back, x);
      EXPECT_EQ(a.label, b.label);
      EXPECT_EQ(a.scores, b.scores);
    }
  }
}

TEST(Persistence, UnknownVersionIsRejected) {
  const auto d = synth_features(5, 9);
  std::string text = to_model_text(train(ClassifierConfig::for_kind(ClassifierKind::Knn), d.X, d.y));
  const auto eol = text.find('\n');
  text.replace(0, eol, "faceshape-model 2");
  EXPECT_THROW(parse_model_text(text), ModelFormatError);
}

TEST(Persistence, EveryTruncationIsRejected) {
  const auto d = synth_features(5, 10);
  const std::string text = to_model_text(train(ClassifierConfig::for_kind(ClassifierKind::Lda), d.X, d.y));
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto cut = static_cast<std::size_t>(rng.below(text.size()));
    EXPECT_THROW(parse_model_text(text.substr(0, cut)), ModelFormatError) << "cut at " << cut;
  }
}

TEST(Persistence, CorruptionIsRejected) {
  const auto d = synth_features(5, 11);
  for (auto kind : kKinds) {
    const std::string text = to_model_text(train(ClassifierConfig::for_kind(kind), d.X, d.y));
    Rng rng(18);
    for (int t = 0; t < 100; ++t) {
      std::string bad = text;
      const auto at = static_cast<std::size_t>(rng.below(bad.size()));
      char c = static_cast<char>(33 + rng.below(94));
      if (c == bad[at]) c = c == '0' ? '1' : '0';
      bad[at] = c;
      EXPECT_THROW(parse_model_text(bad), ModelFormatError) << to_string(kind) << " byte " << at;
    }
  }
  EXPECT_THROW(load_model("/nonexistent/faceshape.model"), IoError);
}
