#ifndef RONIN_SYNTHESIZE_HPP
#define RONIN_SYNTHESIZE_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ronin/dataset_io.hpp"
#include "ronin/schedule.hpp"

namespace ronin {

enum class Protocol { ThreeDDenoise, TUD, SnowyScenes };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::ThreeDDenoise: return "threeD_denoise";
    case Protocol::TUD: return "tud";
    case Protocol::SnowyScenes: return "snowyscenes";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "threeD_denoise" || s == "3d_denoise") return Protocol::ThreeDDenoise;
  if (s == "tud" || s == "TUD") return Protocol::TUD;
  if (s == "snowyscenes") return Protocol::SnowyScenes;
  throw ParameterError("unknown protocol: " + s);
}

inline std::vector<DegradationKind> protocol_candidates(Protocol p) {
  switch (p) {
    case Protocol::ThreeDDenoise:
      return {DegradationKind::GaussianNoise};
    case Protocol::TUD:
      return {DegradationKind::GaussianNoise, DegradationKind::SpeckleNoise,
              DegradationKind::PoissonNoise, DegradationKind::GaussianBlur,
              DegradationKind::ResizeBlur, DegradationKind::JpegCompression,
              DegradationKind::VideoCompression};
    case Protocol::SnowyScenes:
      // Sources are blurry videos already; no gaussian or resize blur.
      return {DegradationKind::GaussianNoise, DegradationKind::SpeckleNoise,
              DegradationKind::PoissonNoise, DegradationKind::Snow,
              DegradationKind::JpegCompression,
              DegradationKind::VideoCompression};
  }
  throw ParameterError("unknown protocol");
}

constexpr double kDegradationInclusionProbability = 0.55;

struct SynthesizeOptions {
  Protocol protocol = Protocol::TUD;
  std::uint64_t seed = 0;
  int interval_t = 6;
  int jobs = 1;
  VideoCompressMode video_mode = VideoCompressMode::Auto;
  ProtocolRanges ranges;
};

// Reads clean (or blurry-source) clips from src_root/<video_id>/ and writes
// paired LQ/GT trees plus per-frame metadata under out_root. Deterministic
// for a fixed seed regardless of `jobs`.
inline void synthesize_dataset(const std::filesystem::path& src_root,
                               const std::filesystem::path& out_root,
                               const SynthesizeOptions& opt) {
  namespace fs = std::filesystem;
  const std::vector<std::string> ids = list_videos(src_root);
  if (ids.empty()) throw IoError("no source videos in " + src_root.string());
  fs::create_directories(out_root);
  const Rng root(opt.seed);

  parallel_for(ids.size(), opt.jobs, [&](std::size_t i) {
    const std::string& id = ids[i];
    const fs::path clip_dir = fs::is_directory(src_root / id / "gt")
                                  ? src_root / id / "gt"
                                  : src_root / id;
    VideoClip gt = load_clip(clip_dir, ClipRole::GT);
    Rng clip_rng = root.child(id);

    DegradationSchedule sched;
    if (opt.protocol == Protocol::ThreeDDenoise) {
      // Single-degradation protocol: one per-clip sigma over the whole clip.
      const double sigma = clip_rng.uniform(20.0, 50.0);
      sched.interval_t = gt.t();
      sched.seed = clip_rng.next_u64();
      sched.segments = {{DegradationSpec::gaussian_noise(sigma,
                                                         clip_rng.next_u64())}};
    } else {
      const int segs = (gt.t() + opt.interval_t - 1) / opt.interval_t;
      sched = sample_schedule(clip_rng, opt.interval_t, segs,
                              protocol_candidates(opt.protocol),
                              kDegradationInclusionProbability, opt.ranges);
    }

    auto [lq, meta] = apply_schedule(gt, sched, opt.video_mode);
    write_video_pair(out_root, id, gt, lq, meta);
  });
}

// ---------------------------------------------------------------------------
// Procedural clean source clips for offline runs and tests: smooth animated
// gradients plus moving soft shapes, deterministic from the seed.
// ---------------------------------------------------------------------------

inline Image toy_frame(int h, int w, int c, int t, Rng& style) {
  // style is consumed identically per frame; copy so frames share the look.
  Rng s = style;
  const double phase = 0.25 * t;
  const double fx = s.uniform(0.5, 1.5), fy = s.uniform(0.5, 1.5);
  double base[3] = {s.uniform(0.2, 0.8), s.uniform(0.2, 0.8),
                    s.uniform(0.2, 0.8)};
  struct Blob {
    double x, y, r, vx, vy;
    double color[3];
  };
  std::vector<Blob> blobs;
  const int nb = 2 + static_cast<int>(s.uniform_index(2));
  for (int b = 0; b < nb; ++b) {
    Blob bl;
    bl.x = s.uniform(0.1, 0.9) * w;
    bl.y = s.uniform(0.1, 0.9) * h;
    bl.r = s.uniform(0.12, 0.3) * std::min(h, w);
    bl.vx = s.uniform(-1.5, 1.5);
    bl.vy = s.uniform(-1.5, 1.5);
    for (double& col : bl.color) col = s.uniform(0.05, 0.95);
    blobs.push_back(bl);
  }
  Image img(h, w, c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = std::sin(6.2831853 * fx * x / w + phase);
      const double gy = std::cos(6.2831853 * fy * y / h + 0.7 * phase);
      for (int ch = 0; ch < c; ++ch) {
        double v = base[ch % 3] + 0.18 * gx + 0.14 * gy;
        for (const Blob& bl : blobs) {
          const double bx = bl.x + bl.vx * t;
          const double by = bl.y + bl.vy * t;
          const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
          const double m = std::exp(-0.5 * d2 / (bl.r * bl.r));
          v = v * (1.0 - m) + bl.color[ch % 3] * m;
        }
        img.at(y, x, ch) = static_cast<float>(std::min(1.0, std::max(0.0, v)));
      }
    }
  return img;
}

inline void make_toy_source(const std::filesystem::path& out_root,
                            int num_clips, int frames, int h, int w,
                            std::uint64_t seed) {
  check_arg(num_clips >= 1 && frames >= 1, "need at least one clip and frame");
  const Rng root(seed);
  for (int cix = 0; cix < num_clips; ++cix) {
    const std::string id = "clip" + std::to_string(cix);
    Rng style = root.child(id);
    VideoClip clip;
    clip.role = ClipRole::GT;
    for (int t = 0; t < frames; ++t) clip.push(toy_frame(h, w, 3, t, style));
    save_clip(clip, out_root / id);
  }
}

}  // namespace ronin

#endif  // RONIN_SYNTHESIZE_HPP
