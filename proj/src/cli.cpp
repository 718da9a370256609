#include "faceshape/cli.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <set>

#include "faceshape/bench.hpp"
#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"
#include "faceshape/features.hpp"
#include "faceshape/hairline.hpp"
#include "faceshape/landmarks.hpp"
#include "text_io.hpp"

namespace faceshape {

namespace {

const std::set<std::string> kUserErrors = {"usage", "parse", "validation", "invalid-input", "degenerate-landmarks"};

int exit_code_for(const std::string& category) { return kUserErrors.count(category) ? 1 : 2; }

const std::map<std::string, LandmarkFormat> kLandmarkFormats = {{"native19", LandmarkFormat::Native19},
                                                                {"detector68", LandmarkFormat::Detector68}};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (auto field : text::split(text, ',')) {
    const auto v = text::parse_int(field);
    if (!v) throw InvalidInput(std::string("bad ") + what + " list '" + text + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

struct ExtractArgs {
  std::string landmarks, out, format = "native19";
};

struct HairlineArgs {
  std::string image;
  double nose_x = 0.0, nose_y = 0.0;
  HairlineConfig cfg;
};

struct TrainArgs {
  std::string features, kind, out, mlp_hidden = "5,2";
  ClassifierConfig cfg;
};

struct PredictArgs {
  std::string model, features;
};

struct BenchArgs {
  std::string dataset, report, sizes = "100,200,300,400,500", format = "markdown", strategy = "stratified",
                                eval = "overall-on-all", landmark_format = "native19";
  std::uint64_t seed = 0;
  int threads = 0;
  bool timestamps = false;
};

struct SynthArgs {
  SynthConfig cfg;
  std::string out;
};

void do_extract(const ExtractArgs& a) {
  const Dataset ds = parse_landmark_file(a.landmarks, kLandmarkFormats.at(a.format));
  write_feature_file(extract_table(ds), a.out);
}

void do_hairline(const HairlineArgs& a, std::ostream& out) {
  const RasterImage img = read_ppm(a.image);
  const Point2D p = detect_hairline(img, {a.nose_x, a.nose_y}, a.cfg);
  out << text::format_double(p.x) << ',' << text::format_double(p.y) << '\n';
}

void do_train(TrainArgs a, std::ostream& err) {
  const auto kind = parse_kind(a.kind);
  if (!kind) throw InvalidInput("unknown classifier kind '" + a.kind + "'");
  a.cfg.kind = *kind;
  a.cfg.mlp_hidden = parse_int_list(a.mlp_hidden, "hidden layer");
  const FeatureTable table = read_feature_file(a.features);
  const auto labels = table.label_list();
  const TrainedModel model = train(a.cfg, table.rows, labels);
  if (!model.converged) err << "warning: SMO reached its iteration cap; model saved anyway\n";
  save_model(model, a.out);
}

void do_predict(const PredictArgs& a, std::ostream& out) {
  const TrainedModel model = load_model(a.model);
  const FeatureTable table = read_feature_file(a.features);
  std::string buf;
  for (std::size_t i = 0; i < table.size(); ++i) {
    buf += table.ids[i] + "," + std::string(to_string(predict(model, table.rows[i]).label)) + "\n";
  }
  out << buf;
}

void do_bench(const BenchArgs& a) {
  const Dataset ds = parse_landmark_file(a.dataset, kLandmarkFormats.at(a.landmark_format));
  BenchConfig cfg;
  cfg.sizes = parse_int_list(a.sizes, "size");
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.subset_strategy = a.strategy == "prefix" ? SubsetStrategy::Prefix : SubsetStrategy::Stratified;
  cfg.eval_mode = a.eval == "holdout-remainder" ? EvalMode::HoldoutRemainder : EvalMode::OverallOnAll;
  for (auto& c : cfg.classifiers) c.seed = a.seed;
  const BenchReport rep = run_benchmark(ds, cfg);
  emit_report(rep, a.format == "csv" ? ReportFormat::Csv : ReportFormat::Markdown, a.report,
              ReportOptions{a.timestamps});
}

void do_synth(const SynthArgs& a) { write_native19(synth_dataset(a.cfg), a.out); }

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric face-shape classification: features, classifiers and benchmarks", "faceshape"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Compute the 19 features for every sample of a landmark file");
  extract->add_option("--landmarks", ex.landmarks, "Landmark file")->required();
  extract->add_option("--out", ex.out, "Feature file to write")->required();
  extract->add_option("--landmark-format", ex.format, "native19 or detector68")
      ->check(CLI::IsMember({"native19", "detector68"}))
      ->capture_default_str();

  HairlineArgs hl;
  auto* hairline = app.add_subcommand("detect-hairline", "Find the hairline above the nose in a P6 image");
  hairline->add_option("--image", hl.image, "Binary PPM (P6) image")->required();
  hairline->add_option("--nose-x", hl.nose_x, "Nose x in pixels")->required();
  hairline->add_option("--nose-y", hl.nose_y, "Nose y in pixels")->required();
  hairline->add_option("--threshold", hl.cfg.threshold, "RGB distance that ends the scan")->capture_default_str();
  hairline->add_option("--window", hl.cfg.window, "Odd averaging width")->capture_default_str();
  hairline->add_option("--start-offset", hl.cfg.start_offset, "Rows above the nose for the reference colour")
      ->capture_default_str();

  TrainArgs tr;
  auto* trainc = app.add_subcommand("train", "Train one classifier on a labeled feature file");
  trainc->add_option("--features", tr.features, "Labeled feature file")->required();
  trainc->add_option("--kind", tr.kind, "lda, svm-lin, svm-rbf, mlp or knn")->required();
  trainc->add_option("--out", tr.out, "Model file to write")->required();
  trainc->add_option("--seed", tr.cfg.seed, "Seed for MLP initialization")->capture_default_str();
  trainc->add_option("--svm-c", tr.cfg.svm_c, "SVM soft-margin penalty")->capture_default_str();
  trainc->add_option("--rbf-gamma", tr.cfg.rbf_gamma, "RBF kernel width")->capture_default_str();
  trainc->add_option("--knn-k", tr.cfg.knn_k, "Neighbours for KNN")->capture_default_str();
  trainc->add_option("--lda-components", tr.cfg.lda_components, "LDA output dimension")->capture_default_str();
  trainc->add_option("--mlp-hidden", tr.mlp_hidden, "Comma-separated hidden layer sizes")->capture_default_str();
  trainc->add_option("--mlp-l2", tr.cfg.mlp_l2, "MLP weight penalty")->capture_default_str();
  trainc->add_option("--mlp-restarts", tr.cfg.mlp_restarts, "MLP initializations to try")->capture_default_str();

  PredictArgs pr;
  auto* predictc = app.add_subcommand("predict", "Print id,label for every row of a feature file");
  predictc->add_option("--model", pr.model, "Model file")->required();
  predictc->add_option("--features", pr.features, "Feature file")->required();

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "Run the training-size benchmark on a labeled landmark file");
  bench->add_option("--dataset", be.dataset, "Labeled landmark file")->required();
  bench->add_option("--report", be.report, "Report file to write")->required();
  bench->add_option("--sizes", be.sizes, "Comma-separated training sizes")->capture_default_str();
  bench->add_option("--seed", be.seed, "Seed for subsets and MLP initialization")->capture_default_str();
  bench->add_option("--format", be.format, "markdown or csv")
      ->check(CLI::IsMember({"markdown", "csv"}))
      ->capture_default_str();
  bench->add_option("--strategy", be.strategy, "stratified or prefix")
      ->check(CLI::IsMember({"stratified", "prefix"}))
      ->capture_default_str();
  bench->add_option("--eval", be.eval, "overall-on-all or holdout-remainder")
      ->check(CLI::IsMember({"overall-on-all", "holdout-remainder"}))
      ->capture_default_str();
  bench->add_option("--landmark-format", be.landmark_format, "native19 or detector68")
      ->check(CLI::IsMember({"native19", "detector68"}))
      ->capture_default_str();
  bench->add_option("--threads", be.threads, "Worker threads, 0 = all cores")->capture_default_str();
  bench->add_flag("--timestamps", be.timestamps, "Include run timestamps in the report");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled landmark dataset");
  synth->add_option("--per-class", sy.cfg.per_class, "Samples per face shape")->required();
  synth->add_option("--noise", sy.cfg.noise_sigma, "Gaussian jitter in pixels")->required();
  synth->add_option("--seed", sy.cfg.seed, "Random seed")->required();
  synth->add_option("--out", sy.out, "Landmark file to write")->required();

  std::vector<const char*> argv{"faceshape"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  try {
    if (extract->parsed()) do_extract(ex);
    if (hairline->parsed()) do_hairline(hl, out);
    if (trainc->parsed()) do_train(tr, err);
    if (predictc->parsed()) do_predict(pr, out);
    if (bench->parsed()) do_bench(be);
    if (synth->parsed()) do_synth(sy);
  } catch (const Error& e) {
    err << "error: " << e.category() << ": " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

} // namespace faceshape
