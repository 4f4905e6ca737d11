#ifndef RONIN_SCHEDULE_HPP
#define RONIN_SCHEDULE_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ronin/degrade.hpp"
#include "ronin/video.hpp"

namespace ronin {

// Parameter ranges for schedule sampling. Defaults follow the time-varying
// benchmark recipe: noise levels U[10,15], poisson alpha U[2,4], JPEG
// quality {20,30,40}, codecs {libx264, h264, mpeg4}, inclusion p=0.55.
// Blur ranges are declared configuration.
struct ProtocolRanges {
  double noise_sigma_min = 10.0, noise_sigma_max = 15.0;
  double poisson_alpha_min = 2.0, poisson_alpha_max = 4.0;
  double blur_sigma_min = 1.0, blur_sigma_max = 2.0;
  std::vector<int> resize_factors = {2, 3};
  std::vector<int> jpeg_qualities = {20, 30, 40};
  std::vector<std::string> codecs = {"libx264", "h264", "mpeg4"};
};

// Seeded per-segment degradation plan; segment s governs frames
// [s*interval_t, (s+1)*interval_t).
struct DegradationSchedule {
  int interval_t = 6;
  std::vector<std::vector<DegradationSpec>> segments;
  std::uint64_t seed = 0;

  int num_segments() const { return static_cast<int>(segments.size()); }
  int segment_of(int frame_index) const { return frame_index / interval_t; }
};

inline DegradationSpec sample_spec(DegradationKind kind, Rng& rng,
                                   const ProtocolRanges& ranges) {
  switch (kind) {
    case DegradationKind::GaussianNoise:
      return DegradationSpec::gaussian_noise(
          rng.uniform(ranges.noise_sigma_min, ranges.noise_sigma_max),
          rng.next_u64());
    case DegradationKind::SpeckleNoise:
      return DegradationSpec::speckle_noise(
          rng.uniform(ranges.noise_sigma_min, ranges.noise_sigma_max),
          rng.next_u64());
    case DegradationKind::PoissonNoise:
      return DegradationSpec::poisson_noise(
          rng.uniform(ranges.poisson_alpha_min, ranges.poisson_alpha_max),
          rng.next_u64());
    case DegradationKind::GaussianBlur:
      return DegradationSpec::gaussian_blur(
          rng.uniform(ranges.blur_sigma_min, ranges.blur_sigma_max));
    case DegradationKind::ResizeBlur:
      return DegradationSpec::resize_blur(
          ranges.resize_factors[rng.uniform_index(ranges.resize_factors.size())]);
    case DegradationKind::Snow:
      return DegradationSpec::snow(rng.bernoulli(0.5) ? SnowIntensity::Severe
                                                      : SnowIntensity::Moderate,
                                   rng.next_u64());
    case DegradationKind::JpegCompression:
      return DegradationSpec::jpeg(
          ranges.jpeg_qualities[rng.uniform_index(ranges.jpeg_qualities.size())]);
    case DegradationKind::VideoCompression:
      return DegradationSpec::video(
          ranges.codecs[rng.uniform_index(ranges.codecs.size())]);
  }
  throw ParameterError("unknown degradation kind");
}

// Per segment, each candidate is included independently with probability p.
// Included specs are stored in canonical application order.
inline DegradationSchedule sample_schedule(
    Rng& rng, int interval_t, int num_segments,
    const std::vector<DegradationKind>& candidates, double p,
    const ProtocolRanges& ranges = {}) {
  check_arg(p > 0.0 && p <= 1.0, "inclusion probability must be in (0,1]");
  check_arg(interval_t >= 1, "interval_t must be >= 1");
  check_arg(num_segments >= 0, "num_segments must be >= 0");
  check_arg(!candidates.empty(), "candidate list must not be empty");
  DegradationSchedule sched;
  sched.interval_t = interval_t;
  sched.seed = rng.next_u64();
  sched.segments.resize(static_cast<std::size_t>(num_segments));
  for (auto& segment : sched.segments) {
    for (DegradationKind kind : candidates) {
      if (rng.bernoulli(p)) segment.push_back(sample_spec(kind, rng, ranges));
    }
    std::stable_sort(segment.begin(), segment.end(),
                     [](const DegradationSpec& a, const DegradationSpec& b) {
                       return static_cast<int>(a.kind) <
                              static_cast<int>(b.kind);
                     });
  }
  return sched;
}

// Per-frame record of what was applied; consumed by the mock grounder and
// written to meta.jsonl.
struct FrameMeta {
  int frame_index = 0;
  int segment = 0;
  std::vector<DegradationSpec> specs;
  std::string video_compress_mode;  // set when video compression was applied
};

// Applies the schedule to a clip. Frames in one segment receive exactly that
// segment's specs; segment-level video compression runs last.
inline std::pair<VideoClip, std::vector<FrameMeta>> apply_schedule(
    const VideoClip& clip, const DegradationSchedule& schedule,
    VideoCompressMode video_mode = VideoCompressMode::Auto) {
  const int t = clip.t();
  check_arg(t >= 1, "clip must have at least one frame");
  const int needed =
      (t + schedule.interval_t - 1) / schedule.interval_t;
  if (schedule.num_segments() < needed)
    throw ParameterError("schedule covers fewer segments than the clip needs");

  VideoClip lq;
  lq.role = ClipRole::LQ;
  lq.fps = clip.fps;
  std::vector<FrameMeta> meta(static_cast<std::size_t>(t));

  for (int s = 0; s * schedule.interval_t < t; ++s) {
    const int lo = s * schedule.interval_t;
    const int hi = std::min(t, (s + 1) * schedule.interval_t);
    const auto& specs = schedule.segments[static_cast<std::size_t>(s)];

    std::vector<Image> seg_frames;
    seg_frames.reserve(static_cast<std::size_t>(hi - lo));
    const DegradationSpec* video_spec = nullptr;
    for (int i = lo; i < hi; ++i) {
      Image frame = clip.frames[static_cast<std::size_t>(i)];
      for (const DegradationSpec& spec : specs) {
        if (spec.kind == DegradationKind::VideoCompression) {
          video_spec = &spec;
          continue;
        }
        frame = apply_degradation(frame, spec, i);
      }
      seg_frames.push_back(std::move(frame));
    }

    std::string mode_used;
    if (video_spec != nullptr) {
      auto [compressed, mode] =
          compress_video(seg_frames, video_spec->codec, video_mode);
      seg_frames = std::move(compressed);
      mode_used = to_string(mode);
    }

    for (int i = lo; i < hi; ++i) {
      lq.push(std::move(seg_frames[static_cast<std::size_t>(i - lo)]));
      auto& m = meta[static_cast<std::size_t>(i)];
      m.frame_index = i;
      m.segment = s;
      m.specs = specs;
      m.video_compress_mode = mode_used;
    }
  }
  return {std::move(lq), std::move(meta)};
}

}  // namespace ronin

#endif  // RONIN_SCHEDULE_HPP
