#include "faceshape/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "faceshape/errors.hpp"
#include "text_io.hpp"

namespace faceshape {

namespace {

constexpr double kVerticalEps = 1e-9;

} // namespace

double vertical_angle(const Point2D& p, const Point2D& chin) {
  const double dx = p.x - chin.x;
  const double dy = p.y - chin.y;
  if (std::abs(dy) < kVerticalEps) return dx < 0.0 ? -std::numbers::pi / 2 : std::numbers::pi / 2;
  return std::atan(dx / dy);
}

FeatureVector extract_features(const LandmarkSet& lm) {
  if (const auto bad = lm.violations(); !bad.empty()) throw InvalidInput(bad.front());
  const Point2D& chin = lm[LandmarkSet::kChin];
  for (int p = 1; p <= 17; ++p) {
    if (p != LandmarkSet::kChin && distance(lm[p], chin) < kVerticalEps) {
      throw DegenerateLandmarks("jaw point " + std::to_string(p) + " coincides with the chin");
    }
  }

  const double face_width = distance(lm[1], lm[17]);
  const double jaw_width = distance(lm[5], lm[13]);

  FeatureVector f{};
  f[0] = distance(chin, lm[LandmarkSet::kHairline]) / face_width;
  f[1] = jaw_width / face_width;
  f[2] = distance(chin, lm[LandmarkSet::kMouth]) / jaw_width;
  // f4..f11 from contour points 1..8, f12..f19 from points 10..17.
  for (int p = 1; p <= 8; ++p) f[static_cast<std::size_t>(p + 2)] = vertical_angle(lm[p], chin);
  for (int p = 10; p <= 17; ++p) f[static_cast<std::size_t>(p + 1)] = vertical_angle(lm[p], chin);
  return f;
}

bool NormalizationStats::is_degenerate(std::size_t j) const {
  return std::binary_search(degenerate.begin(), degenerate.end(), j);
}

NormalizationStats fit_normalizer(std::span<const FeatureVector> rows) {
  if (rows.empty()) throw InvalidInput("cannot fit a normalizer on zero rows");
  const double n = static_cast<double>(rows.size());
  NormalizationStats stats;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[j];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
    stats.mean[j] = mean;
    stats.stddev[j] = std::sqrt(ss / n);
    if (stats.stddev[j] == 0.0) stats.degenerate.push_back(j);
  }
  return stats;
}

FeatureVector apply_normalizer(const NormalizationStats& stats, const FeatureVector& x) {
  FeatureVector z{};
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    z[j] = stats.stddev[j] == 0.0 ? 0.0 : (x[j] - stats.mean[j]) / stats.stddev[j];
  }
  return z;
}

bool FeatureTable::labeled() const {
  return std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
}

std::vector<FaceShape> FeatureTable::label_list() const {
  std::vector<FaceShape> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) throw InvalidInput("sample '" + ids[i] + "' has no label");
    out.push_back(*labels[i]);
  }
  return out;
}

FeatureTable extract_table(const Dataset& ds) {
  FeatureTable table;
  for (const auto& s : ds.samples) {
    try {
      table.rows.push_back(extract_features(s.landmarks));
    } catch (const DegenerateLandmarks& e) {
      throw DegenerateLandmarks("sample '" + s.id + "': " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput("sample '" + s.id + "': " + e.what());
    }
    table.ids.push_back(s.id);
    table.labels.push_back(s.label);
  }
  return table;
}

std::string to_feature_text(const FeatureTable& table) {
  std::string out = "id";
  for (std::size_t j = 1; j <= kNumFeatures; ++j) out += ",f" + std::to_string(j);
  out += ",label\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.ids[i];
    for (double v : table.rows[i]) {
      out += ',';
      out += text::format_double(v);
    }
    out += ',';
    if (table.labels[i]) out += to_string(*table.labels[i]);
    out += '\n';
  }
  return out;
}

FeatureTable parse_feature_text(std::string_view contents) {
  const auto rows = text::lines(contents);
  if (rows.empty()) throw ParseError("line 1: missing header");
  FeatureTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = r + 1;
    if (text::trim(rows[r]).empty()) continue;
    const auto fields = text::split(rows[r], ',');
    if (fields.size() != kNumFeatures + 1 && fields.size() != kNumFeatures + 2) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 20 or 21 fields, got " +
                       std::to_string(fields.size()));
    }
    const auto id = text::trim(fields[0]);
    if (id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty id");
    FeatureVector f{};
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      const auto v = text::parse_double(fields[j + 1]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("line " + std::to_string(line_no) + ": bad value for f" + std::to_string(j + 1));
      }
      f[j] = *v;
    }
    std::optional<FaceShape> label;
    if (fields.size() == kNumFeatures + 2 && !text::trim(fields.back()).empty()) {
      label = parse_shape(fields.back());
      if (!label) {
        throw ParseError("line " + std::to_string(line_no) + ": unknown label '" +
                         std::string(text::trim(fields.back())) + "'");
      }
    }
    table.ids.emplace_back(id);
    table.rows.push_back(f);
    table.labels.push_back(label);
  }
  return table;
}

void write_feature_file(const FeatureTable& table, const std::filesystem::path& path) {
  text::write_file(path, to_feature_text(table));
}

FeatureTable read_feature_file(const std::filesystem::path& path) {
  return parse_feature_text(text::read_file(path));
}

} // namespace faceshape
