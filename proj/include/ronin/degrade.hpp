#ifndef RONIN_DEGRADE_HPP
#define RONIN_DEGRADE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "ronin/common.hpp"
#include "ronin/image.hpp"
#include "ronin/image_io.hpp"

namespace ronin {

// Enum order is the canonical application order within a segment:
// noise -> blur -> snow -> compression.
enum class DegradationKind {
  GaussianNoise,
  SpeckleNoise,
  PoissonNoise,
  GaussianBlur,
  ResizeBlur,
  Snow,
  JpegCompression,
  VideoCompression,
};

inline const char* to_string(DegradationKind k) {
  switch (k) {
    case DegradationKind::GaussianNoise: return "gaussian_noise";
    case DegradationKind::SpeckleNoise: return "speckle_noise";
    case DegradationKind::PoissonNoise: return "poisson_noise";
    case DegradationKind::GaussianBlur: return "gaussian_blur";
    case DegradationKind::ResizeBlur: return "resize_blur";
    case DegradationKind::Snow: return "snow";
    case DegradationKind::JpegCompression: return "jpeg_compression";
    case DegradationKind::VideoCompression: return "video_compression";
  }
  return "?";
}

inline DegradationKind degradation_kind_from_string(const std::string& s) {
  if (s == "gaussian_noise") return DegradationKind::GaussianNoise;
  if (s == "speckle_noise") return DegradationKind::SpeckleNoise;
  if (s == "poisson_noise") return DegradationKind::PoissonNoise;
  if (s == "gaussian_blur") return DegradationKind::GaussianBlur;
  if (s == "resize_blur") return DegradationKind::ResizeBlur;
  if (s == "snow") return DegradationKind::Snow;
  if (s == "jpeg_compression") return DegradationKind::JpegCompression;
  if (s == "video_compression") return DegradationKind::VideoCompression;
  throw ParameterError("unknown degradation kind: " + s);
}

enum class SnowIntensity { Moderate, Severe };

inline const char* to_string(SnowIntensity s) {
  return s == SnowIntensity::Severe ? "severe" : "moderate";
}

// One degradation with its kind-specific parameters. Only the fields of the
// active kind are meaningful; `seed` makes the realized noise reproducible
// from the metadata alone.
struct DegradationSpec {
  DegradationKind kind = DegradationKind::GaussianNoise;
  double sigma = 0.0;        // gaussian/speckle noise, 255-scale
  double alpha = 0.0;        // poisson noise exponent
  double blur_sigma = 0.0;   // gaussian blur kernel sigma (pixels)
  int resize_factor = 0;     // resize blur downscale factor
  int jpeg_quality = 0;      // jpeg compression quality factor
  std::string codec;         // video compression codec name
  SnowIntensity intensity = SnowIntensity::Moderate;
  std::uint64_t seed = 0;

  static DegradationSpec gaussian_noise(double sigma, std::uint64_t seed = 0) {
    DegradationSpec s;
    s.kind = DegradationKind::GaussianNoise;
    s.sigma = sigma;
    s.seed = seed;
    return s;
  }
  static DegradationSpec speckle_noise(double sigma, std::uint64_t seed = 0) {
    DegradationSpec s;
    s.kind = DegradationKind::SpeckleNoise;
    s.sigma = sigma;
    s.seed = seed;
    return s;
  }
  static DegradationSpec poisson_noise(double alpha, std::uint64_t seed = 0) {
    DegradationSpec s;
    s.kind = DegradationKind::PoissonNoise;
    s.alpha = alpha;
    s.seed = seed;
    return s;
  }
  static DegradationSpec gaussian_blur(double blur_sigma) {
    DegradationSpec s;
    s.kind = DegradationKind::GaussianBlur;
    s.blur_sigma = blur_sigma;
    return s;
  }
  static DegradationSpec resize_blur(int factor) {
    DegradationSpec s;
    s.kind = DegradationKind::ResizeBlur;
    s.resize_factor = factor;
    return s;
  }
  static DegradationSpec snow(SnowIntensity intensity, std::uint64_t seed = 0) {
    DegradationSpec s;
    s.kind = DegradationKind::Snow;
    s.intensity = intensity;
    s.seed = seed;
    return s;
  }
  static DegradationSpec jpeg(int quality) {
    DegradationSpec s;
    s.kind = DegradationKind::JpegCompression;
    s.jpeg_quality = quality;
    return s;
  }
  static DegradationSpec video(const std::string& codec) {
    DegradationSpec s;
    s.kind = DegradationKind::VideoCompression;
    s.codec = codec;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Pixel-level degradations. Sigma and noise levels are interpreted on the
// 255 scale as in the source literature; images stay in [0,1].
// ---------------------------------------------------------------------------

inline Image add_gaussian_noise(const Image& in, double sigma, Rng& rng) {
  check_arg(sigma >= 0.0, "gaussian noise sigma must be >= 0");
  Image out = in;
  if (sigma == 0.0) return out;
  const double s = sigma / 255.0;
  for (float& x : out.v)
    x = static_cast<float>(
        std::min(1.0, std::max(0.0, static_cast<double>(x) + rng.normal() * s)));
  return out;
}

inline Image add_speckle_noise(const Image& in, double sigma, Rng& rng) {
  check_arg(sigma >= 0.0, "speckle noise sigma must be >= 0");
  Image out = in;
  if (sigma == 0.0) return out;
  const double s = sigma / 255.0;
  for (float& x : out.v) {
    const double v = static_cast<double>(x);
    x = static_cast<float>(std::min(1.0, std::max(0.0, v + v * rng.normal() * s)));
  }
  return out;
}

// Poisson shot noise: out = clamp(x + (P(10^a * x) / 10^a - x)).
inline Image add_poisson_noise(const Image& in, double alpha, Rng& rng) {
  check_arg(alpha > 0.0, "poisson noise alpha must be > 0");
  Image out = in;
  const double scale = std::pow(10.0, alpha);
  for (float& x : out.v) {
    const double v = static_cast<double>(x);
    const double noisy = static_cast<double>(rng.poisson(scale * v)) / scale;
    x = static_cast<float>(std::min(1.0, std::max(0.0, v + (noisy - v))));
  }
  return out;
}

namespace detail {

// Normalized 1D gaussian taps, radius ceil(3*sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

inline int reflect_index(int i, int n) {
  // abcdef -> reflect as fedcba|abcdef|fedcba
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace detail

// Separable gaussian blur with reflect padding.
inline Image gaussian_blur(const Image& in, double sigma) {
  check_arg(sigma > 0.0, "gaussian blur sigma must be > 0");
  const std::vector<double> k = detail::gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  Image tmp(in.h, in.w, in.c), out(in.h, in.w, in.c);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x)
      for (int ch = 0; ch < in.c; ++ch) {
        double acc = 0.0;
        for (int d = -radius; d <= radius; ++d)
          acc += k[static_cast<std::size_t>(d + radius)] *
                 in.at(y, detail::reflect_index(x + d, in.w), ch);
        tmp.at(y, x, ch) = static_cast<float>(acc);
      }
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x)
      for (int ch = 0; ch < in.c; ++ch) {
        double acc = 0.0;
        for (int d = -radius; d <= radius; ++d)
          acc += k[static_cast<std::size_t>(d + radius)] *
                 tmp.at(detail::reflect_index(y + d, in.h), x, ch);
        out.at(y, x, ch) =
            static_cast<float>(std::min(1.0, std::max(0.0, acc)));
      }
  return out;
}

// Bilinear down-up by an integer factor.
inline Image resize_blur(const Image& in, int factor) {
  check_arg(factor > 1, "resize blur factor must be > 1");
  const int dh = std::max(1, in.h / factor);
  const int dw = std::max(1, in.w / factor);
  Image small = resize_bilinear(in, dh, dw);
  Image out = resize_bilinear(small, in.h, in.w);
  out.clamp01();
  return out;
}

inline Image apply_blur(const Image& in, DegradationKind kind,
                        double strength) {
  if (kind == DegradationKind::GaussianBlur) return gaussian_blur(in, strength);
  if (kind == DegradationKind::ResizeBlur) {
    check_arg(strength > 1.0, "resize blur factor must be > 1");
    return resize_blur(in, static_cast<int>(strength));
  }
  throw ParameterError("apply_blur: kind is not a blur");
}

// ---------------------------------------------------------------------------
// Procedural snow. Seeded particle field alpha-composited as white streaked
// gaussian blobs. Densities are design values (flakes per pixel).
// ---------------------------------------------------------------------------

struct SnowParams {
  double density_moderate = 1.5e-3;
  double density_severe = 6.0e-3;
  double radius_min = 0.7, radius_max = 2.2;  // blob sigma, pixels
  double opacity_min = 0.35, opacity_max = 0.9;
  double streak_max = 6.0;  // motion streak length, pixels
};

inline Image overlay_snow(const Image& in, SnowIntensity intensity, Rng& rng,
                          const SnowParams& params = {}) {
  const double density = intensity == SnowIntensity::Severe
                             ? params.density_severe
                             : params.density_moderate;
  const long flakes = std::lround(density * in.h * in.w);
  std::vector<float> alpha(static_cast<std::size_t>(in.h) * in.w, 0.0f);
  for (long f = 0; f < flakes; ++f) {
    const double cx = rng.uniform(0.0, static_cast<double>(in.w));
    const double cy = rng.uniform(0.0, static_cast<double>(in.h));
    const double r = rng.uniform(params.radius_min, params.radius_max);
    const double op = rng.uniform(params.opacity_min, params.opacity_max);
    const double len = rng.uniform(0.0, params.streak_max);
    // Streaks fall mostly downward.
    const double angle = rng.uniform(-0.5, 0.5) + 1.5707963267948966;
    const double dx = std::cos(angle), dy = std::sin(angle);
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int s = 0; s < steps; ++s) {
      const double t = steps == 1 ? 0.0 : static_cast<double>(s) / (steps - 1);
      const double px = cx + dx * len * t;
      const double py = cy + dy * len * t;
      const int lo_y = std::max(0, static_cast<int>(std::floor(py - 3 * r)));
      const int hi_y =
          std::min(in.h - 1, static_cast<int>(std::ceil(py + 3 * r)));
      const int lo_x = std::max(0, static_cast<int>(std::floor(px - 3 * r)));
      const int hi_x =
          std::min(in.w - 1, static_cast<int>(std::ceil(px + 3 * r)));
      const double w_step = op / steps;
      for (int y = lo_y; y <= hi_y; ++y)
        for (int x = lo_x; x <= hi_x; ++x) {
          const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
          const double a = w_step * std::exp(-0.5 * d2 / (r * r));
          auto& cell = alpha[static_cast<std::size_t>(y) * in.w + x];
          cell = static_cast<float>(std::min(1.0, cell + a));
        }
    }
  }
  Image out = in;
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      const float a = alpha[static_cast<std::size_t>(y) * in.w + x];
      for (int ch = 0; ch < in.c; ++ch)
        out.at(y, x, ch) =
            std::min(1.0f, in.at(y, x, ch) * (1.0f - a) + a);
    }
  return out;
}

// Count of pixels whose snow alpha would exceed a threshold; evaluation aid.
inline long snow_coverage(const Image& before, const Image& after,
                          double threshold = 0.1) {
  long n = 0;
  for (int y = 0; y < before.h; ++y)
    for (int x = 0; x < before.w; ++x) {
      // Recover effective alpha from the first channel: out = in(1-a) + a.
      const double in_v = before.at(y, x, 0);
      const double out_v = after.at(y, x, 0);
      const double a = in_v >= 1.0 ? 0.0 : (out_v - in_v) / (1.0 - in_v);
      if (a > threshold) ++n;
    }
  return n;
}

// ---------------------------------------------------------------------------
// Compression. JPEG round-trips through the codec; video compression goes
// through an external encoder when present, otherwise a deterministic
// per-frame JPEG proxy at quality 30. The mode used is recorded in metadata.
// ---------------------------------------------------------------------------

enum class VideoCompressMode { Auto, External, Fallback };

inline const char* to_string(VideoCompressMode m) {
  switch (m) {
    case VideoCompressMode::Auto: return "auto";
    case VideoCompressMode::External: return "external";
    case VideoCompressMode::Fallback: return "fallback";
  }
  return "?";
}

inline Image compress_jpeg(const Image& in, int quality) {
  check_arg(quality == 20 || quality == 30 || quality == 40 ||
                (quality >= 1 && quality <= 100),
            "jpeg quality out of range");
  return jpeg_roundtrip(in, quality);
}

inline bool external_video_encoder_available() {
  static const bool available = [] {
    return std::system("ffmpeg -version > /dev/null 2>&1") == 0;
  }();
  return available;
}

constexpr int kVideoFallbackJpegQuality = 30;

namespace detail {

inline std::vector<Image> compress_video_external(
    const std::vector<Image>& frames, const std::string& codec) {
  namespace fs = std::filesystem;
  const fs::path tmp =
      fs::temp_directory_path() /
      ("ronin_vc_" + std::to_string(hash_str(codec) ^
                                    static_cast<std::uint64_t>(::getpid())));
  fs::create_directories(tmp / "in");
  fs::create_directories(tmp / "out");
  for (std::size_t i = 0; i < frames.size(); ++i)
    save_png(frames[i], tmp / "in" / (std::to_string(i) + ".png"));
  // "h264" selects the default H.264 encoder.
  const std::string enc = codec == "h264" ? "libx264" : codec;
  const std::string video = (tmp / "seg.mp4").string();
  std::string cmd = "ffmpeg -y -loglevel error -framerate 24 -i " +
                    (tmp / "in").string() + "/%d.png -c:v " + enc + " " +
                    video + " && ffmpeg -y -loglevel error -i " + video +
                    " " + (tmp / "out").string() + "/%d.png";
  if (std::system(cmd.c_str()) != 0) {
    fs::remove_all(tmp);
    throw EnvironmentError("external video encoder failed");
  }
  std::vector<Image> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    // ffmpeg image2 output is 1-based.
    out.push_back(load_image(tmp / "out" / (std::to_string(i + 1) + ".png")));
  }
  fs::remove_all(tmp);
  return out;
}

}  // namespace detail

// Returns the compressed frames and the mode actually used.
inline std::pair<std::vector<Image>, VideoCompressMode> compress_video(
    const std::vector<Image>& frames, const std::string& codec,
    VideoCompressMode mode = VideoCompressMode::Auto) {
  check_arg(codec == "libx264" || codec == "h264" || codec == "mpeg4",
            "unsupported video codec: " + codec);
  if (mode == VideoCompressMode::Auto) {
    mode = external_video_encoder_available() ? VideoCompressMode::External
                                              : VideoCompressMode::Fallback;
  }
  if (mode == VideoCompressMode::External) {
    if (!external_video_encoder_available())
      throw EnvironmentError("external video encoder (ffmpeg) not found");
    return {detail::compress_video_external(frames, codec),
            VideoCompressMode::External};
  }
  std::vector<Image> out;
  out.reserve(frames.size());
  for (const Image& f : frames)
    out.push_back(compress_jpeg(f, kVideoFallbackJpegQuality));
  return {std::move(out), VideoCompressMode::Fallback};
}

// Single-frame dispatch for the per-frame kinds (video compression is
// segment-level and handled by apply_schedule).
inline Image apply_degradation(const Image& in, const DegradationSpec& spec,
                               int frame_index) {
  Rng rng = Rng(spec.seed).child(static_cast<std::uint64_t>(frame_index));
  switch (spec.kind) {
    case DegradationKind::GaussianNoise:
      return add_gaussian_noise(in, spec.sigma, rng);
    case DegradationKind::SpeckleNoise:
      return add_speckle_noise(in, spec.sigma, rng);
    case DegradationKind::PoissonNoise:
      return add_poisson_noise(in, spec.alpha, rng);
    case DegradationKind::GaussianBlur:
      return gaussian_blur(in, spec.blur_sigma);
    case DegradationKind::ResizeBlur:
      return resize_blur(in, spec.resize_factor);
    case DegradationKind::Snow:
      return overlay_snow(in, spec.intensity, rng);
    case DegradationKind::JpegCompression:
      return compress_jpeg(in, spec.jpeg_quality);
    case DegradationKind::VideoCompression:
      throw ParameterError(
          "video compression is segment-level; use apply_schedule");
  }
  throw ParameterError("unknown degradation kind");
}

}  // namespace ronin

#endif  // RONIN_DEGRADE_HPP
