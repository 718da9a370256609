#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "faceshape/landmarks.hpp"

namespace faceshape {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster.
class RasterImage {
public:
  RasterImage(int width, int height, Rgb fill = {});
  RasterImage(int width, int height, std::vector<Rgb> pixels);

  int width() const { return width_; }
  int height() const { return height_; }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  bool contains(double x, double y) const;

  const std::vector<Rgb>& pixels() const { return pixels_; }

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Binary PPM (P6, maxval 255).
RasterImage parse_ppm(std::string_view bytes);
RasterImage read_ppm(const std::filesystem::path& path);
std::string to_ppm(const RasterImage& img);
void write_ppm(const RasterImage& img, const std::filesystem::path& path);

struct HairlineConfig {
  double threshold = 60.0;  // Euclidean RGB distance that ends the scan
  int window = 3;           // odd width of the horizontal averaging strip
  int start_offset = 5;     // rows above the nose where the reference colour is sampled
};

/// Scans the nose column upward from `start_offset` rows above the nose and
/// returns the first row whose averaged colour differs from the reference by
/// more than the threshold. The returned point keeps the nose x coordinate.
///
/// Throws InvalidInput for a bad config or a nose outside the image, and
/// NoHairlineFound when the scan reaches row 0 without a crossing.
Point2D detect_hairline(const RasterImage& img, const Point2D& nose, const HairlineConfig& cfg = {});

} // namespace faceshape
