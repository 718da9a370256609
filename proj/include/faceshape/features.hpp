#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faceshape/landmarks.hpp"

namespace faceshape {

inline constexpr std::size_t kNumFeatures = 19;

/// f[0..2] are the height/width, jaw/width and chin-mouth/jaw ratios;
/// f[3..18] are chin-to-contour angles from the vertical, in radians.
using FeatureVector = std::array<double, kNumFeatures>;

/// Angle from the vertical of the line from `chin` to `p`, as atan(dx/dy).
/// A vertical run below 1e-9 folds to +-pi/2 by the sign of dx.
double vertical_angle(const Point2D& p, const Point2D& chin);

/// Throws DegenerateLandmarks if a jaw point coincides with the chin and
/// InvalidInput if the set violates its structural invariants.
FeatureVector extract_features(const LandmarkSet& lm);

struct NormalizationStats {
  FeatureVector mean{};
  FeatureVector stddev{};
  std::vector<std::size_t> degenerate;  // indices with zero spread, ascending

  bool is_degenerate(std::size_t j) const;
};

/// Column means and population standard deviations. Throws InvalidInput on empty input.
NormalizationStats fit_normalizer(std::span<const FeatureVector> rows);

/// z = (x - mean) / std; degenerate columns map to 0.
FeatureVector apply_normalizer(const NormalizationStats& stats, const FeatureVector& x);

/// Feature file contents: `id,f1..f19[,label]`.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<FeatureVector> rows;
  std::vector<std::optional<FaceShape>> labels;

  std::size_t size() const { return rows.size(); }
  bool labeled() const;
  std::vector<FaceShape> label_list() const;
};

/// Extracts features for every sample; the sample id is named in any error.
FeatureTable extract_table(const Dataset& ds);

std::string to_feature_text(const FeatureTable& table);
FeatureTable parse_feature_text(std::string_view text);
void write_feature_file(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_feature_file(const std::filesystem::path& path);

} // namespace faceshape
