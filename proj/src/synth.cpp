#include <cmath>
#include <cstdio>

#include "faceshape/bench.hpp"
#include "faceshape/errors.hpp"
#include "faceshape/random.hpp"

namespace faceshape {

namespace {

constexpr double kFaceWidth = 200.0;
constexpr double kCenterX = 320.0;
constexpr double kChinY = 560.0;
constexpr int kMaxDraws = 100;

// Frozen class geometry; the first two ratios follow the usual descriptions
// (round about as long as wide, oval/oblong about 3:2).
constexpr std::array<ShapeTemplate, kNumShapes> kTemplates = {{
    {FaceShape::Heart, 1.2, 0.60, 0.55, 0.8, 0.22},
    {FaceShape::Oblong, 1.5, 0.80, 0.75, 1.5, 0.25},
    {FaceShape::Oval, 1.5, 0.80, 0.60, 1.2, 0.22},
    {FaceShape::Round, 1.0, 0.80, 0.50, 2.0, 0.20},
    {FaceShape::Square, 1.2, 0.95, 0.50, 3.5, 0.20},
}};

// Half-width of the contour at parameter t in [0, 1] (0 = points 1/17, 1 = chin).
double contour_half_width(const ShapeTemplate& t, double s) {
  const double half = kFaceWidth / 2.0;
  if (s <= 0.5) return half * (1.0 - (1.0 - t.jaw_ratio) * (s / 0.5));
  const double v = (s - 0.5) / 0.5;
  return half * t.jaw_ratio * (1.0 - std::pow(v, t.chin_power));
}

bool acceptable(const LandmarkSet& lm) {
  if (!lm.valid() || !(roll_degrees(lm) < ValidationOptions{}.max_roll_degrees)) return false;
  const double chin_y = lm[LandmarkSet::kChin].y;
  for (int p = 1; p <= 17; ++p) {
    if (p != LandmarkSet::kChin && !(lm[p].y < chin_y)) return false;
  }
  return true;
}

} // namespace

const std::array<ShapeTemplate, kNumShapes>& shape_templates() { return kTemplates; }

LandmarkSet template_landmarks(FaceShape shape) {
  const ShapeTemplate& t = kTemplates[static_cast<std::size_t>(to_index(shape))];
  const double top = kChinY - t.jaw_drop * kFaceWidth;
  LandmarkSet lm;
  for (int p = 1; p <= 9; ++p) {
    const double s = (p - 1) / 8.0;
    const double hw = contour_half_width(t, s);
    const double y = top + t.jaw_drop * kFaceWidth * s;
    lm[p] = {kCenterX - hw, y};
    lm[18 - p] = {kCenterX + hw, y};
  }
  lm[LandmarkSet::kChin] = {kCenterX, kChinY};
  lm[LandmarkSet::kHairline] = {kCenterX, kChinY - t.height_ratio * kFaceWidth};
  lm[LandmarkSet::kMouth] = {kCenterX, kChinY - t.mouth_height * kFaceWidth};
  return lm;
}

Dataset synth_dataset(const SynthConfig& cfg) {
  if (cfg.per_class < 1) throw InvalidInput("per_class must be >= 1");
  if (!std::isfinite(cfg.noise_sigma) || cfg.noise_sigma < 0.0) throw InvalidInput("noise_sigma must be finite and >= 0");

  std::array<LandmarkSet, kNumShapes> base{};
  for (std::size_t c = 0; c < kNumShapes; ++c) base[c] = template_landmarks(kAllShapes[c]);

  Rng rng(cfg.seed);
  Dataset ds;
  char provenance[128];
  std::snprintf(provenance, sizeof provenance, "synthetic: per_class=%d noise_sigma=%.17g seed=%llu", cfg.per_class,
                cfg.noise_sigma, static_cast<unsigned long long>(cfg.seed));
  ds.provenance = provenance;
  ds.samples.reserve(static_cast<std::size_t>(cfg.per_class) * kNumShapes);

  for (int i = 0; i < cfg.per_class; ++i) {
    for (std::size_t c = 0; c < kNumShapes; ++c) {
      Sample s;
      char id[64];
      std::snprintf(id, sizeof id, "synth%llu-%05zu", static_cast<unsigned long long>(cfg.seed), ds.samples.size());
      s.id = id;
      s.label = kAllShapes[c];

      bool ok = false;
      for (int draw = 0; draw < kMaxDraws && !ok; ++draw) {
        s.landmarks = base[c];
        if (cfg.noise_sigma > 0.0) {
          for (int p = 1; p <= static_cast<int>(LandmarkSet::kSize); ++p) {
            s.landmarks[p].x += cfg.noise_sigma * rng.normal();
            s.landmarks[p].y += cfg.noise_sigma * rng.normal();
          }
        }
        ok = acceptable(s.landmarks);
      }
      if (!ok) {
        throw GenerationFailed("sample '" + s.id + "' still invalid after " + std::to_string(kMaxDraws) +
                               " draws at noise_sigma " + std::to_string(cfg.noise_sigma));
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

} // namespace faceshape
