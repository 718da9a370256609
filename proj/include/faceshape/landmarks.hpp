#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace faceshape {

/// Image-space point in pixels; y grows downward.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

double distance(const Point2D& a, const Point2D& b);

enum class FaceShape : int { Heart = 0, Oblong = 1, Oval = 2, Round = 3, Square = 4 };

inline constexpr std::size_t kNumShapes = 5;
inline constexpr std::array<FaceShape, kNumShapes> kAllShapes = {
    FaceShape::Heart, FaceShape::Oblong, FaceShape::Oval, FaceShape::Round, FaceShape::Square};

inline constexpr int to_index(FaceShape s) { return static_cast<int>(s); }
FaceShape shape_from_index(int index);

/// Lower-case canonical name ("heart", "oblong", ...).
std::string_view to_string(FaceShape s);

/// Case-insensitive; nullopt for anything that is not one of the five names.
std::optional<FaceShape> parse_shape(std::string_view text);

/// The 19 named points used for feature extraction, addressed 1..19:
/// 1-17 jaw contour left to right (9 is the chin), 18 hairline top,
/// 19 mouth reference on the chin-mouth axis.
class LandmarkSet {
public:
  static constexpr std::size_t kSize = 19;
  static constexpr int kChin = 9;
  static constexpr int kHairline = 18;
  static constexpr int kMouth = 19;

  LandmarkSet() = default;
  explicit LandmarkSet(const std::array<Point2D, kSize>& points) : points_(points) {}

  const Point2D& operator[](int one_based) const { return points_[static_cast<std::size_t>(one_based - 1)]; }
  Point2D& operator[](int one_based) { return points_[static_cast<std::size_t>(one_based - 1)]; }

  const std::array<Point2D, kSize>& points() const { return points_; }

  /// Human-readable description of each violated structural invariant
  /// (finite coordinates, hairline above chin, nonzero face/jaw widths).
  std::vector<std::string> violations() const;
  bool valid() const { return violations().empty(); }

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

private:
  std::array<Point2D, kSize> points_{};
};

struct Sample {
  std::string id;
  LandmarkSet landmarks;
  std::optional<FaceShape> label;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool labeled() const;
};

enum class LandmarkFormat { Native19, Detector68 };

/// Detector-68 index realizing each model point 1..19; point 18 (hairline)
/// is supplied separately and maps to -1 here.
const std::array<int, LandmarkSet::kSize>& detector68_mapping();

/// Build the 19-point set from a 68-point detector layout plus a hairline point.
LandmarkSet from_detector68(const std::array<Point2D, 68>& detector, const Point2D& hairline);

Dataset parse_landmark_text(std::string_view text, LandmarkFormat format, std::string provenance = {});
Dataset parse_landmark_file(const std::filesystem::path& path, LandmarkFormat format);

/// Native-19 text: header line, then `id,label,x1,y1,...,x19,y19` rows.
std::string to_native19_text(const Dataset& ds);
void write_native19(const Dataset& ds, const std::filesystem::path& path);

struct ValidationOptions {
  double max_roll_degrees = 15.0;
};

struct Violation {
  std::string sample_id;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Angle in degrees of the segment from point 1 to point 17 against the horizontal,
/// folded into [0, 90].
double roll_degrees(const LandmarkSet& lm);

std::vector<Violation> validate_dataset(const Dataset& ds, const ValidationOptions& opts = {});

} // namespace faceshape
