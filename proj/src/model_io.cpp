#include <cinttypes>
#include <cstdio>

#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"
#include "text_io.hpp"

// Model files are line records `key value...`, numbers at 17 significant
// digits, closed by `checksum <fnv1a-64 hex>` over every preceding byte.

namespace faceshape {

namespace {

constexpr std::string_view kMagic = "faceshape-model";
constexpr int kVersion = 1;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

class Writer {
public:
  Writer& key(std::string_view k) {
    if (!line_.empty()) flush();
    line_ = k;
    return *this;
  }
  Writer& val(double v) { return raw(text::format_double17(v)); }
  Writer& val(long long v) { return raw(std::to_string(v)); }
  Writer& val(int v) { return raw(std::to_string(v)); }
  Writer& raw(std::string_view s) {
    line_ += ' ';
    line_ += s;
    return *this;
  }

  template <typename Range>
  Writer& values(const Range& r) {
    val(static_cast<long long>(std::size(r)));
    for (const auto& v : r) val(v);
    return *this;
  }

  Writer& matrix(const Eigen::Ref<const RowMatrix>& m) {
    val(static_cast<long long>(m.rows())).val(static_cast<long long>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) val(m(i, j));
    }
    return *this;
  }

  std::string finish() {
    if (!line_.empty()) flush();
    out_ += "checksum " + hex64(fnv1a(out_)) + "\n";
    return std::move(out_);
  }

private:
  void flush() {
    out_ += line_;
    out_ += '\n';
    line_.clear();
  }

  std::string out_;
  std::string line_;
};

class Reader {
public:
  explicit Reader(std::string_view body) : rows_(text::lines(body)) {}

  // Tokens after `k` on the next line; the key must match exactly.
  Reader& expect(std::string_view k) {
    if (next_ >= rows_.size()) throw ModelFormatError("file ends before '" + std::string(k) + "'");
    tokens_ = text::split(rows_[next_++], ' ');
    if (tokens_.empty() || tokens_.front() != k) {
      throw ModelFormatError("expected '" + std::string(k) + "' on line " + std::to_string(next_));
    }
    pos_ = 1;
    return *this;
  }

  std::string_view word() {
    if (pos_ >= tokens_.size()) throw ModelFormatError("missing value on line " + std::to_string(next_));
    return tokens_[pos_++];
  }

  double real() {
    const auto v = text::parse_double(word());
    if (!v) throw ModelFormatError("bad number on line " + std::to_string(next_));
    return *v;
  }

  long long integer() {
    const auto v = text::parse_int(word());
    if (!v) throw ModelFormatError("bad integer on line " + std::to_string(next_));
    return *v;
  }

  std::size_t count(std::size_t limit = 100'000'000) {
    const auto n = integer();
    if (n < 0 || static_cast<std::size_t>(n) > limit) throw ModelFormatError("bad count on line " + std::to_string(next_));
    return static_cast<std::size_t>(n);
  }

  std::vector<double> reals() {
    std::vector<double> v(count());
    for (double& x : v) x = real();
    return v;
  }

  std::vector<long long> integers() {
    std::vector<long long> v(count());
    for (auto& x : v) x = integer();
    return v;
  }

  RowMatrix matrix() {
    const auto r = count(1'000'000);
    const auto c = count(1'000'000);
    RowMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = real();
    }
    return m;
  }

  void end_line() {
    if (pos_ != tokens_.size()) throw ModelFormatError("trailing values on line " + std::to_string(next_));
  }

  bool done() const { return next_ >= rows_.size(); }

private:
  std::vector<std::string_view> rows_;
  std::vector<std::string_view> tokens_;
  std::size_t next_ = 0;
  std::size_t pos_ = 0;
};

int class_index(long long v) {
  if (v < 0 || v >= static_cast<long long>(kNumShapes)) throw ModelFormatError("class index out of range");
  return static_cast<int>(v);
}

optim::Status parse_status(std::string_view s) {
  for (auto st : {optim::Status::Converged, optim::Status::MaxIters, optim::Status::LineSearchFailed}) {
    if (s == optim::to_string(st)) return st;
  }
  throw ModelFormatError("unknown optimizer status '" + std::string(s) + "'");
}

void write_config(Writer& w, const ClassifierConfig& c) {
  w.key("kind").raw(to_string(c.kind));
  w.key("svm_c").val(c.svm_c);
  w.key("rbf_gamma").val(c.rbf_gamma);
  w.key("knn_k").val(c.knn_k);
  w.key("lda_components").val(c.lda_components);
  w.key("mlp_hidden").values(c.mlp_hidden);
  w.key("mlp_l2").val(c.mlp_l2);
  w.key("mlp_restarts").val(c.mlp_restarts);
  w.key("seed").raw(std::to_string(c.seed));
  w.key("svm_tol").val(c.svm_tol);
  w.key("svm_max_iter").val(static_cast<long long>(c.svm_max_iter));
  const auto& o = c.lbfgs;
  w.key("lbfgs").val(o.memory).val(o.max_iters).val(o.grad_tol).val(o.wolfe_c1).val(o.wolfe_c2).val(
      o.max_line_search_steps);
}

ClassifierConfig read_config(Reader& r) {
  ClassifierConfig c;
  const auto kind = parse_kind(r.expect("kind").word());
  if (!kind) throw ModelFormatError("unknown classifier kind");
  r.end_line();
  c.kind = *kind;
  c.svm_c = r.expect("svm_c").real();
  c.rbf_gamma = r.expect("rbf_gamma").real();
  c.knn_k = static_cast<int>(r.expect("knn_k").integer());
  c.lda_components = static_cast<int>(r.expect("lda_components").integer());
  c.mlp_hidden.clear();
  for (auto h : r.expect("mlp_hidden").integers()) c.mlp_hidden.push_back(static_cast<int>(h));
  c.mlp_l2 = r.expect("mlp_l2").real();
  c.mlp_restarts = static_cast<int>(r.expect("mlp_restarts").integer());
  const auto seed = r.expect("seed").word();
  if (std::sscanf(std::string(seed).c_str(), "%" SCNu64, &c.seed) != 1) throw ModelFormatError("bad seed");
  c.svm_tol = r.expect("svm_tol").real();
  c.svm_max_iter = static_cast<long>(r.expect("svm_max_iter").integer());
  r.expect("lbfgs");
  c.lbfgs.memory = static_cast<int>(r.integer());
  c.lbfgs.max_iters = static_cast<int>(r.integer());
  c.lbfgs.grad_tol = r.real();
  c.lbfgs.wolfe_c1 = r.real();
  c.lbfgs.wolfe_c2 = r.real();
  c.lbfgs.max_line_search_steps = static_cast<int>(r.integer());
  r.end_line();
  return c;
}

} // namespace

std::string to_model_text(const TrainedModel& model) {
  Writer w;
  w.key(kMagic).val(kVersion);
  write_config(w, model.config);
  w.key("converged").val(model.converged ? 1 : 0);
  w.key("norm.mean").values(model.norm.mean);
  w.key("norm.std").values(model.norm.stddev);

  if (const auto* lda = std::get_if<LdaModel>(&model.params)) {
    w.key("lda.projection").matrix(lda->projection);
    w.key("lda.centroids").matrix(lda->centroids);
    std::vector<int> present(lda->present.begin(), lda->present.end());
    w.key("lda.present").values(present);
  } else if (const auto* svm = std::get_if<SvmModel>(&model.params)) {
    w.key("svm.machines").val(static_cast<long long>(svm->machines.size()));
    for (const auto& m : svm->machines) {
      w.key("machine").val(m.positive).val(m.negative).val(m.bias);
      w.key("alpha").values(m.alpha);
      w.key("sign").values(m.sign);
      w.key("support").matrix(m.support);
    }
  } else if (const auto* mlp = std::get_if<MlpModel>(&model.params)) {
    w.key("mlp.layers").values(mlp->layers);
    w.key("mlp.params").values(mlp->params);
    w.key("mlp.status").raw(optim::to_string(mlp->status));
  } else {
    const auto& knn = std::get<KnnModel>(model.params);
    w.key("knn.points").matrix(knn.points);
    w.key("knn.labels").values(knn.labels);
  }
  w.key("end");
  return w.finish();
}

TrainedModel parse_model_text(std::string_view contents) {
  // The checksum line is the last complete line.
  if (contents.empty() || contents.back() != '\n') throw ModelFormatError("file is truncated");
  const auto body_end = contents.rfind('\n', contents.size() - 2);
  const std::size_t split_at = body_end == std::string_view::npos ? 0 : body_end + 1;
  const auto body = contents.substr(0, split_at);
  const auto tail = text::trim(contents.substr(split_at, contents.size() - 1 - split_at));
  if (tail.substr(0, 9) != "checksum ") throw ModelFormatError("missing checksum; file is truncated");
  if (tail.substr(9) != hex64(fnv1a(body))) throw ModelFormatError("checksum mismatch; file is corrupted");

  Reader r(body);
  r.expect(kMagic);
  const auto version = r.integer();
  if (version != kVersion) throw ModelFormatError("unsupported model version " + std::to_string(version));
  r.end_line();

  TrainedModel model;
  model.config = read_config(r);
  model.converged = r.expect("converged").integer() != 0;

  const auto mean = r.expect("norm.mean").reals();
  const auto sd = r.expect("norm.std").reals();
  if (mean.size() != kNumFeatures || sd.size() != kNumFeatures) throw ModelFormatError("bad normalizer size");
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    model.norm.mean[j] = mean[j];
    model.norm.stddev[j] = sd[j];
    if (sd[j] < 0.0) throw ModelFormatError("negative standard deviation");
    if (sd[j] == 0.0) model.norm.degenerate.push_back(j);
  }

  switch (model.config.kind) {
    case ClassifierKind::Lda: {
      LdaModel m;
      m.projection = r.expect("lda.projection").matrix();
      m.centroids = r.expect("lda.centroids").matrix();
      const auto present = r.expect("lda.present").integers();
      if (m.projection.rows() != static_cast<Eigen::Index>(kNumFeatures) || m.centroids.rows() != 5 ||
          m.centroids.cols() != m.projection.cols() || present.size() != kNumShapes) {
        throw ModelFormatError("LDA payload has inconsistent shapes");
      }
      for (std::size_t c = 0; c < kNumShapes; ++c) m.present[c] = present[c] != 0;
      model.params = std::move(m);
      break;
    }
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf: {
      SvmModel svm;
      const auto n = r.expect("svm.machines").count(kNumShapes * kNumShapes);
      for (std::size_t k = 0; k < n; ++k) {
        SvmMachine m;
        r.expect("machine");
        m.positive = class_index(r.integer());
        m.negative = class_index(r.integer());
        m.bias = r.real();
        r.end_line();
        m.alpha = r.expect("alpha").reals();
        for (auto s : r.expect("sign").integers()) {
          if (s != 1 && s != -1) throw ModelFormatError("support vector sign must be +-1");
          m.sign.push_back(static_cast<int>(s));
        }
        m.support = r.expect("support").matrix();
        if (m.sign.size() != m.alpha.size() || static_cast<std::size_t>(m.support.rows()) != m.alpha.size() ||
            (m.support.rows() > 0 && m.support.cols() != static_cast<Eigen::Index>(kNumFeatures))) {
          throw ModelFormatError("SVM machine has inconsistent shapes");
        }
        svm.machines.push_back(std::move(m));
      }
      model.params = std::move(svm);
      break;
    }
    case ClassifierKind::Mlp: {
      MlpModel m;
      for (auto l : r.expect("mlp.layers").integers()) m.layers.push_back(static_cast<int>(l));
      m.params = r.expect("mlp.params").reals();
      m.status = parse_status(r.expect("mlp.status").word());
      r.end_line();
      if (m.layers.size() < 2 || m.layers.front() != static_cast<int>(kNumFeatures) ||
          m.layers.back() != static_cast<int>(kNumShapes) || m.params.size() != mlp_param_count(m.layers)) {
        throw ModelFormatError("MLP payload has inconsistent shapes");
      }
      model.params = std::move(m);
      break;
    }
    case ClassifierKind::Knn: {
      KnnModel m;
      m.points = r.expect("knn.points").matrix();
      for (auto l : r.expect("knn.labels").integers()) m.labels.push_back(class_index(l));
      if (m.points.cols() != static_cast<Eigen::Index>(kNumFeatures) ||
          static_cast<std::size_t>(m.points.rows()) != m.labels.size() || m.labels.empty()) {
        throw ModelFormatError("KNN payload has inconsistent shapes");
      }
      model.params = std::move(m);
      break;
    }
  }
  r.expect("end").end_line();
  if (!r.done()) throw ModelFormatError("unexpected content after 'end'");
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  text::write_file(path, to_model_text(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  return parse_model_text(text::read_file(path));
}

} // namespace faceshape
