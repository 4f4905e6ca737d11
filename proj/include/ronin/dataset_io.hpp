#ifndef RONIN_DATASET_IO_HPP
#define RONIN_DATASET_IO_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ronin/image_io.hpp"
#include "ronin/schedule.hpp"
#include "ronin/video.hpp"

// On-disk dataset layout:
//   <root>/<video_id>/gt/frame_%06d.png
//   <root>/<video_id>/lq/frame_%06d.png
//   <root>/<video_id>/meta.jsonl     (one line per frame)

namespace ronin {

using json = nlohmann::json;

inline json spec_to_json(const DegradationSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case DegradationKind::GaussianNoise:
    case DegradationKind::SpeckleNoise:
      j["sigma"] = s.sigma;
      j["seed"] = s.seed;
      break;
    case DegradationKind::PoissonNoise:
      j["alpha"] = s.alpha;
      j["seed"] = s.seed;
      break;
    case DegradationKind::GaussianBlur:
      j["blur_sigma"] = s.blur_sigma;
      break;
    case DegradationKind::ResizeBlur:
      j["resize_factor"] = s.resize_factor;
      break;
    case DegradationKind::Snow:
      j["intensity"] = to_string(s.intensity);
      j["seed"] = s.seed;
      break;
    case DegradationKind::JpegCompression:
      j["quality"] = s.jpeg_quality;
      break;
    case DegradationKind::VideoCompression:
      j["codec"] = s.codec;
      break;
  }
  return j;
}

inline DegradationSpec spec_from_json(const json& j) {
  DegradationSpec s;
  s.kind = degradation_kind_from_string(j.at("kind").get<std::string>());
  s.sigma = j.value("sigma", 0.0);
  s.alpha = j.value("alpha", 0.0);
  s.blur_sigma = j.value("blur_sigma", 0.0);
  s.resize_factor = j.value("resize_factor", 0);
  s.jpeg_quality = j.value("quality", 0);
  s.codec = j.value("codec", "");
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("intensity"))
    s.intensity = j.at("intensity").get<std::string>() == "severe"
                      ? SnowIntensity::Severe
                      : SnowIntensity::Moderate;
  return s;
}

inline json frame_meta_to_json(const FrameMeta& m) {
  json j;
  j["frame_index"] = m.frame_index;
  j["segment"] = m.segment;
  j["specs"] = json::array();
  for (const auto& s : m.specs) j["specs"].push_back(spec_to_json(s));
  if (!m.video_compress_mode.empty())
    j["video_compress_mode"] = m.video_compress_mode;
  return j;
}

inline FrameMeta frame_meta_from_json(const json& j) {
  FrameMeta m;
  m.frame_index = j.at("frame_index").get<int>();
  m.segment = j.value("segment", 0);
  for (const auto& sj : j.at("specs")) m.specs.push_back(spec_from_json(sj));
  m.video_compress_mode = j.value("video_compress_mode", "");
  return m;
}

inline void save_meta(const std::vector<FrameMeta>& meta,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& m : meta) out << frame_meta_to_json(m).dump() << "\n";
}

inline std::vector<FrameMeta> load_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<FrameMeta> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    meta.push_back(frame_meta_from_json(json::parse(line)));
  }
  return meta;
}

inline void save_clip(const VideoClip& clip, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < clip.t(); ++i)
    save_png(clip.frames[static_cast<std::size_t>(i)],
             dir / frame_filename(i));
}

// Loads every frame_*.png under `dir` in index order.
inline VideoClip load_clip(const std::filesystem::path& dir, ClipRole role) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no frames in " + dir.string());
  VideoClip clip;
  clip.role = role;
  for (const auto& f : files) clip.push(load_image(f));
  return clip;
}

// Writes one LQ/GT pair plus metadata atomically (staged dir + rename).
inline void write_video_pair(const std::filesystem::path& root,
                             const std::string& video_id, const VideoClip& gt,
                             const VideoClip& lq,
                             const std::vector<FrameMeta>& meta) {
  namespace fs = std::filesystem;
  check_arg(gt.t() == lq.t(), "LQ/GT frame counts must match");
  const fs::path final_dir = root / video_id;
  const fs::path staging = root / (".tmp." + video_id);
  fs::remove_all(staging);
  fs::create_directories(staging);
  save_clip(gt, staging / "gt");
  save_clip(lq, staging / "lq");
  save_meta(meta, staging / "meta.jsonl");
  fs::remove_all(final_dir);
  fs::rename(staging, final_dir);
}

// Video ids under a dataset root, sorted.
inline std::vector<std::string> list_videos(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw IoError("not a directory: " + root.string());
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    const std::string name = e.path().filename().string();
    if (name.rfind(".tmp.", 0) == 0) continue;
    ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// FrameRefs for every LQ frame of every video under a dataset root.
inline std::vector<FrameRef> dataset_frame_refs(
    const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<FrameRef> refs;
  for (const std::string& id : list_videos(root)) {
    const fs::path lq = root / id / "lq";
    if (!fs::is_directory(lq)) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(lq)) {
      if (e.is_regular_file() && e.path().extension() == ".png")
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (std::size_t i = 0; i < files.size(); ++i)
      refs.push_back(FrameRef{id, static_cast<int>(i), files[i]});
  }
  return refs;
}

}  // namespace ronin

#endif  // RONIN_DATASET_IO_HPP
