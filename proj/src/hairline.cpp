#include "faceshape/hairline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "faceshape/errors.hpp"
#include "text_io.hpp"

namespace faceshape {

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidInput("image dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw InvalidInput("image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidInput("pixel count does not match width x height");
  }
}

bool RasterImage::contains(double x, double y) const {
  return std::isfinite(x) && std::isfinite(y) && x >= 0.0 && y >= 0.0 && x < width_ && y < height_;
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

struct Mean {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

Mean strip_mean(const RasterImage& img, int col, int row, int half) {
  const int lo = std::max(0, col - half);
  const int hi = std::min(img.width() - 1, col + half);
  Mean m;
  for (int x = lo; x <= hi; ++x) {
    const Rgb& p = img.at(x, row);
    m.r += p.r;
    m.g += p.g;
    m.b += p.b;
  }
  const double n = hi - lo + 1;
  m.r /= n;
  m.g /= n;
  m.b /= n;
  return m;
}

double colour_distance(const Mean& a, const Mean& b) {
  const double dr = a.r - b.r;
  const double dg = a.g - b.g;
  const double db = a.b - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

} // namespace

RasterImage parse_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P6") throw ParseError("not a binary PPM (P6)");
  const auto w = text::parse_int(next_token(bytes, pos));
  const auto h = text::parse_int(next_token(bytes, pos));
  const auto maxval = text::parse_int(next_token(bytes, pos));
  if (!w || !h || !maxval || *w < 1 || *h < 1) throw ParseError("bad PPM header");
  if (*maxval != 255) throw ParseError("only 8-bit PPM (maxval 255) is supported");
  if (pos >= bytes.size()) throw ParseError("PPM has no pixel data");
  ++pos;  // single whitespace byte after maxval

  const std::size_t count = static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h);
  if (bytes.size() - pos < 3 * count) throw ParseError("PPM pixel data is truncated");
  std::vector<Rgb> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    pixels[i] = {static_cast<std::uint8_t>(bytes[pos + 3 * i]), static_cast<std::uint8_t>(bytes[pos + 3 * i + 1]),
                 static_cast<std::uint8_t>(bytes[pos + 3 * i + 2])};
  }
  return RasterImage(static_cast<int>(*w), static_cast<int>(*h), std::move(pixels));
}

RasterImage read_ppm(const std::filesystem::path& path) { return parse_ppm(text::read_file(path)); }

std::string to_ppm(const RasterImage& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.reserve(out.size() + 3 * img.pixels().size());
  for (const auto& p : img.pixels()) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

void write_ppm(const RasterImage& img, const std::filesystem::path& path) { text::write_file(path, to_ppm(img)); }

Point2D detect_hairline(const RasterImage& img, const Point2D& nose, const HairlineConfig& cfg) {
  if (!std::isfinite(cfg.threshold) || cfg.threshold < 0.0) throw InvalidInput("threshold must be finite and >= 0");
  if (cfg.window < 1 || cfg.window % 2 == 0) throw InvalidInput("window must be an odd integer >= 1");
  if (cfg.start_offset < 0) throw InvalidInput("start offset must be >= 0");
  if (!img.contains(nose.x, nose.y)) throw InvalidInput("nose point lies outside the image");

  const int col = static_cast<int>(std::floor(nose.x));
  const int ref_row = static_cast<int>(std::floor(nose.y)) - cfg.start_offset;
  if (ref_row < 0) throw InvalidInput("reference row above the nose falls outside the image");

  const int half = cfg.window / 2;
  const Mean reference = strip_mean(img, col, ref_row, half);
  for (int row = ref_row - 1; row >= 0; --row) {
    if (colour_distance(strip_mean(img, col, row, half), reference) > cfg.threshold) {
      return {nose.x, static_cast<double>(row)};
    }
  }
  throw NoHairlineFound("no colour change above the nose exceeds threshold " + text::format_double(cfg.threshold));
}

} // namespace faceshape
