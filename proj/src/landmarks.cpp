#include "faceshape/landmarks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "faceshape/errors.hpp"
#include "text_io.hpp"

namespace faceshape {

namespace {

constexpr std::array<std::string_view, kNumShapes> kShapeNames = {"heart", "oblong", "oval", "round",
                                                                  "square"};

constexpr std::size_t kNative19Fields = 2 + 2 * LandmarkSet::kSize;
constexpr std::size_t kDetector68Fields = 2 + 2 + 2 * 68;

bool finite(const Point2D& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

Point2D read_point(const std::vector<std::string_view>& fields, std::size_t at, std::size_t line_no) {
  const auto x = text::parse_double(fields[at]);
  const auto y = text::parse_double(fields[at + 1]);
  if (!x || !y) {
    throw ParseError(line_error(line_no, "bad coordinate in column " + std::to_string(at + 1)));
  }
  return {*x, *y};
}

} // namespace

double distance(const Point2D& a, const Point2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

FaceShape shape_from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kNumShapes)) {
    throw InvalidInput("face shape index out of range: " + std::to_string(index));
  }
  return static_cast<FaceShape>(index);
}

std::string_view to_string(FaceShape s) { return kShapeNames[static_cast<std::size_t>(to_index(s))]; }

std::optional<FaceShape> parse_shape(std::string_view text) {
  text = text::trim(text);
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kNumShapes; ++i) {
    if (lower == kShapeNames[i]) return static_cast<FaceShape>(i);
  }
  return std::nullopt;
}

std::vector<std::string> LandmarkSet::violations() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kSize; ++i) {
    if (!finite(points_[i])) out.push_back("point " + std::to_string(i + 1) + " is not finite");
  }
  if (!out.empty()) return out;
  const auto& self = *this;
  if (!(self[kHairline].y < self[kChin].y)) out.emplace_back("hairline (18) is not above chin (9)");
  if (!(distance(self[1], self[17]) > 0.0)) out.emplace_back("face width d(1,17) is zero");
  if (!(distance(self[5], self[13]) > 0.0)) out.emplace_back("jaw width d(5,13) is zero");
  return out;
}

bool Dataset::labeled() const {
  return std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.label.has_value(); });
}

const std::array<int, LandmarkSet::kSize>& detector68_mapping() {
  // Jaw 0..16 -> 1..17 (chin 8 -> 9), hairline supplied, lower-lip bottom 57 -> 19.
  static constexpr std::array<int, LandmarkSet::kSize> mapping = {0, 1,  2,  3,  4,  5,  6,  7,  8, 9,
                                                                   10, 11, 12, 13, 14, 15, 16, -1, 57};
  return mapping;
}

LandmarkSet from_detector68(const std::array<Point2D, 68>& detector, const Point2D& hairline) {
  const auto& mapping = detector68_mapping();
  LandmarkSet lm;
  for (int p = 1; p <= static_cast<int>(LandmarkSet::kSize); ++p) {
    const int src = mapping[static_cast<std::size_t>(p - 1)];
    lm[p] = src < 0 ? hairline : detector[static_cast<std::size_t>(src)];
  }
  return lm;
}

Dataset parse_landmark_text(std::string_view text, LandmarkFormat format, std::string provenance) {
  Dataset ds;
  ds.provenance = std::move(provenance);
  const auto rows = text::lines(text);
  if (rows.empty()) throw ParseError(line_error(1, "missing header"));

  const std::size_t expected = format == LandmarkFormat::Native19 ? kNative19Fields : kDetector68Fields;
  std::unordered_set<std::string> seen;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = r + 1;
    if (text::trim(rows[r]).empty()) continue;
    const auto fields = text::split(rows[r], ',');
    if (fields.size() != expected) {
      throw ParseError(line_error(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                              std::to_string(fields.size())));
    }

    Sample sample;
    sample.id = std::string(text::trim(fields[0]));
    if (sample.id.empty()) throw ParseError(line_error(line_no, "empty id"));

    const auto label_text = text::trim(fields[1]);
    if (!label_text.empty()) {
      sample.label = parse_shape(label_text);
      if (!sample.label) throw ParseError(line_error(line_no, "unknown label '" + std::string(label_text) + "'"));
    }

    if (format == LandmarkFormat::Native19) {
      std::array<Point2D, LandmarkSet::kSize> pts{};
      for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = read_point(fields, 2 + 2 * i, line_no);
      sample.landmarks = LandmarkSet(pts);
    } else {
      const Point2D hairline = read_point(fields, 2, line_no);
      std::array<Point2D, 68> detector{};
      for (std::size_t i = 0; i < detector.size(); ++i) detector[i] = read_point(fields, 4 + 2 * i, line_no);
      sample.landmarks = from_detector68(detector, hairline);
    }

    if (const auto bad = sample.landmarks.violations(); !bad.empty()) {
      throw ValidationError("sample '" + sample.id + "': " + bad.front());
    }
    if (!seen.insert(sample.id).second) throw ValidationError("duplicate sample id '" + sample.id + "'");
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

Dataset parse_landmark_file(const std::filesystem::path& path, LandmarkFormat format) {
  return parse_landmark_text(text::read_file(path), format, path.string());
}

std::string to_native19_text(const Dataset& ds) {
  std::string out = "id,label";
  for (std::size_t i = 1; i <= LandmarkSet::kSize; ++i) {
    out += ",x" + std::to_string(i) + ",y" + std::to_string(i);
  }
  out += '\n';
  for (const auto& s : ds.samples) {
    out += s.id;
    out += ',';
    if (s.label) out += to_string(*s.label);
    for (const auto& p : s.landmarks.points()) {
      out += ',';
      out += text::format_double(p.x);
      out += ',';
      out += text::format_double(p.y);
    }
    out += '\n';
  }
  return out;
}

void write_native19(const Dataset& ds, const std::filesystem::path& path) {
  text::write_file(path, to_native19_text(ds));
}

double roll_degrees(const LandmarkSet& lm) {
  const double dx = std::abs(lm[17].x - lm[1].x);
  const double dy = std::abs(lm[17].y - lm[1].y);
  return std::atan2(dy, dx) * 180.0 / std::numbers::pi;
}

std::vector<Violation> validate_dataset(const Dataset& ds, const ValidationOptions& opts) {
  std::vector<Violation> report;
  std::unordered_set<std::string> seen;
  for (const auto& s : ds.samples) {
    if (s.id.empty()) report.push_back({s.id, "empty id"});
    if (!seen.insert(s.id).second) report.push_back({s.id, "duplicate id"});
    const auto bad = s.landmarks.violations();
    for (const auto& msg : bad) report.push_back({s.id, msg});
    if (bad.empty()) {
      const double roll = roll_degrees(s.landmarks);
      if (!(roll < opts.max_roll_degrees)) {
        report.push_back({s.id, "roll " + text::format_double(roll) + " deg exceeds limit " +
                                    text::format_double(opts.max_roll_degrees)});
      }
    }
  }
  return report;
}

} // namespace faceshape
