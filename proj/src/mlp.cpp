#include <cmath>

#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"
#include "faceshape/random.hpp"

namespace faceshape {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

// Row-wise numerically stable softmax, in place.
void softmax_rows(Matrix& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - top).exp().matrix();
    logits.row(i) /= logits.row(i).sum();
  }
}

} // namespace

std::vector<int> mlp_layers(const ClassifierConfig& cfg) {
  std::vector<int> layers;
  layers.push_back(static_cast<int>(kNumFeatures));
  for (int h : cfg.mlp_hidden) {
    if (h < 1) throw InvalidInput("hidden layer sizes must be >= 1");
    layers.push_back(h);
  }
  layers.push_back(static_cast<int>(kNumShapes));
  return layers;
}

std::size_t mlp_param_count(std::span<const int> layers) {
  std::size_t n = 0;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    n += static_cast<std::size_t>(layers[l]) * static_cast<std::size_t>(layers[l - 1] + 1);
  }
  return n;
}

optim::ObjectiveEvaluation mlp_loss_grad(std::span<const double> params, const Matrix& Z, std::span<const int> labels,
                                         double l2, std::span<const int> layers) {
  if (layers.size() < 2) throw InvalidInput("an MLP needs at least input and output layers");
  if (params.size() != mlp_param_count(layers)) {
    throw InvalidInput("parameter vector has " + std::to_string(params.size()) + " entries, architecture needs " +
                       std::to_string(mlp_param_count(layers)));
  }
  if (Z.cols() != layers.front()) throw InvalidInput("input width does not match the first layer");
  if (static_cast<std::size_t>(Z.rows()) != labels.size() || Z.rows() == 0) {
    throw InvalidInput("input rows and labels disagree or are empty");
  }
  const int outputs = layers.back();
  for (int c : labels) {
    if (c < 0 || c >= outputs) throw InvalidInput("label outside the output layer");
  }

  const std::size_t depth = layers.size() - 1;
  std::vector<std::size_t> offsets(depth);
  for (std::size_t l = 0, off = 0; l < depth; ++l) {
    offsets[l] = off;
    off += static_cast<std::size_t>(layers[l + 1]) * static_cast<std::size_t>(layers[l] + 1);
  }
  const auto weights = [&](std::size_t l) {
    return ConstRowMap(params.data() + offsets[l], layers[l + 1], layers[l]);
  };
  const auto biases = [&](std::size_t l) {
    return ConstVecMap(params.data() + offsets[l] + static_cast<std::size_t>(layers[l + 1] * layers[l]),
                       layers[l + 1]);
  };

  // Forward pass; activations[l] is the input to layer l.
  std::vector<Matrix> activations(depth + 1);
  activations[0] = Z;
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix pre = activations[l] * weights(l).transpose();
    pre.rowwise() += biases(l).transpose();
    if (l + 1 < depth) pre = pre.cwiseMax(0.0);
    activations[l + 1] = std::move(pre);
  }
  Matrix probs = activations[depth];
  softmax_rows(probs);

  const double n = static_cast<double>(Z.rows());
  optim::ObjectiveEvaluation out;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const auto c = labels[static_cast<std::size_t>(i)];
    // log p_c computed from the logits to stay finite when p_c underflows.
    const auto logits = activations[depth].row(i);
    const double top = logits.maxCoeff();
    const double lse = top + std::log((logits.array() - top).exp().sum());
    loss -= logits(c) - lse;
  }
  loss /= n;
  double penalty = 0.0;
  for (std::size_t l = 0; l < depth; ++l) penalty += weights(l).squaredNorm();
  out.value = loss + 0.5 * l2 * penalty;

  out.gradient.assign(params.size(), 0.0);
  Matrix delta = probs;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  delta /= n;

  for (std::size_t l = depth; l-- > 0;) {
    RowMap gw(out.gradient.data() + offsets[l], layers[l + 1], layers[l]);
    VecMap gb(out.gradient.data() + offsets[l] + static_cast<std::size_t>(layers[l + 1] * layers[l]), layers[l + 1]);
    gw = delta.transpose() * activations[l] + l2 * weights(l);
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix back = delta * weights(l);
      // ReLU derivative: pass where the layer's output was positive.
      delta = back.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return out;
}

std::vector<double> mlp_initial_params(std::span<const int> layers, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> params;
  params.reserve(mlp_param_count(layers));
  for (std::size_t l = 1; l < layers.size(); ++l) {
    const double scale = std::sqrt(6.0 / static_cast<double>(layers[l - 1] + layers[l]));
    // Biases share the weight distribution; zero biases leave more dead units.
    const auto count = static_cast<std::size_t>(layers[l]) * static_cast<std::size_t>(layers[l - 1] + 1);
    for (std::size_t k = 0; k < count; ++k) params.push_back(rng.uniform(-0.5, 0.5) * scale);
  }
  return params;
}

std::array<double, kNumShapes> mlp_forward(const MlpModel& m, const double* z) {
  Eigen::VectorXd a = ConstVecMap(z, m.layers.front());
  std::size_t off = 0;
  const std::size_t depth = m.layers.size() - 1;
  for (std::size_t l = 0; l < depth; ++l) {
    const int in = m.layers[l];
    const int out = m.layers[l + 1];
    ConstRowMap w(m.params.data() + off, out, in);
    ConstVecMap b(m.params.data() + off + static_cast<std::size_t>(out * in), out);
    Eigen::VectorXd next = w * a + b;
    if (l + 1 < depth) next = next.cwiseMax(0.0);
    a = std::move(next);
    off += static_cast<std::size_t>(out) * static_cast<std::size_t>(in + 1);
  }
  a.array() -= a.maxCoeff();
  a = a.array().exp().matrix();
  a /= a.sum();
  std::array<double, kNumShapes> p{};
  for (std::size_t c = 0; c < kNumShapes; ++c) p[c] = a(static_cast<Eigen::Index>(c));
  return p;
}

} // namespace faceshape
