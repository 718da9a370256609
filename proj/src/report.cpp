#include <cstdio>

#include "faceshape/bench.hpp"
#include "faceshape/errors.hpp"
#include "text_io.hpp"

namespace faceshape {

namespace {

constexpr std::string_view kCsvHeader =
    "classifier,size,training_accuracy,overall_accuracy,training_count,evaluation_count";

void accuracy_table(std::string& out, const BenchReport& rep, bool training) {
  out += "| Training Size |";
  for (int s : rep.sizes) out += " " + std::to_string(s) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < rep.sizes.size(); ++i) out += "---:|";
  out += '\n';
  for (const auto& name : rep.classifiers) {
    out += "| " + name + " |";
    for (int s : rep.sizes) {
      const auto& c = rep.cell(name, s);
      out += " " + format_percent(training ? c.training_accuracy : c.overall_accuracy) + " |";
    }
    out += '\n';
  }
}

void confusion_table(std::string& out, const Confusion& m) {
  out += "| true \\ predicted |";
  for (auto s : kAllShapes) out += " " + std::string(to_string(s)) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < kNumShapes; ++i) out += "---:|";
  out += '\n';
  for (std::size_t t = 0; t < kNumShapes; ++t) {
    out += "| " + std::string(to_string(kAllShapes[t])) + " |";
    for (std::size_t p = 0; p < kNumShapes; ++p) out += " " + std::to_string(m[t][p]) + " |";
    out += '\n';
  }
}

std::string render_markdown(const BenchReport& rep, const ReportOptions& opts) {
  std::string out = "# Face shape classification benchmark\n\n";
  out += "- Dataset samples: " + std::to_string(rep.dataset_size) + "\n";
  out += "- Seed: " + std::to_string(rep.seed) + "\n";
  out += "- Subset strategy: " + std::string(to_string(rep.subset_strategy)) + "\n";
  out += "- Evaluation: " + std::string(to_string(rep.eval_mode)) + "\n";
  if (opts.timestamps) {
    out += "- Started: " + rep.started_at + "\n";
    out += "- Finished: " + rep.finished_at + "\n";
  }

  out += "\n## Training accuracy vs. training size\n\n";
  accuracy_table(out, rep, true);
  out += "\n## Overall accuracy vs. training size\n\n";
  accuracy_table(out, rep, false);

  out += "\n## Appendix: confusion matrices\n\n";
  out += "Rows are true labels and columns are predicted labels, counted on the evaluation set.\n";
  for (const auto& c : rep.cells) {
    out += "\n### " + c.classifier + ", training size " + std::to_string(c.size);
    if (!c.converged) out += " (solver hit its iteration cap)";
    out += "\n\n";
    confusion_table(out, c.confusion);
  }
  return out;
}

std::string render_csv(const BenchReport& rep) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& c : rep.cells) {
    out += c.classifier + "," + std::to_string(c.size) + "," + text::format_double(c.training_accuracy) + "," +
           text::format_double(c.overall_accuracy) + "," + std::to_string(total(c.training_confusion)) + "," +
           std::to_string(total(c.confusion)) + "\n";
  }
  return out;
}

} // namespace

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
  return buf;
}

std::string render_report(const BenchReport& rep, ReportFormat format, const ReportOptions& opts) {
  if (rep.cells.empty() || rep.classifiers.empty() || rep.sizes.empty()) {
    throw InvalidInput("benchmark report is empty");
  }
  return format == ReportFormat::Markdown ? render_markdown(rep, opts) : render_csv(rep);
}

void emit_report(const BenchReport& rep, ReportFormat format, const std::filesystem::path& path,
                 const ReportOptions& opts) {
  text::write_file(path, render_report(rep, format, opts));
}

std::vector<CsvRow> parse_report_csv(std::string_view contents) {
  const auto rows = text::lines(contents);
  if (rows.empty() || text::trim(rows.front()) != kCsvHeader) throw ParseError("line 1: not a benchmark csv header");
  std::vector<CsvRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (text::trim(rows[r]).empty()) continue;
    const auto f = text::split(rows[r], ',');
    const auto where = "line " + std::to_string(r + 1) + ": ";
    if (f.size() != 6) throw ParseError(where + "expected 6 fields");
    CsvRow row;
    row.classifier = std::string(text::trim(f[0]));
    const auto size = text::parse_int(f[1]);
    const auto tr = text::parse_double(f[2]);
    const auto ov = text::parse_double(f[3]);
    const auto tc = text::parse_int(f[4]);
    const auto ec = text::parse_int(f[5]);
    if (!size || !tr || !ov || !tc || !ec) throw ParseError(where + "bad numeric field");
    row.size = static_cast<int>(*size);
    row.training_accuracy = *tr;
    row.overall_accuracy = *ov;
    row.training_count = static_cast<long>(*tc);
    row.evaluation_count = static_cast<long>(*ec);
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace faceshape
