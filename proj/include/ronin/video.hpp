#ifndef RONIN_VIDEO_HPP
#define RONIN_VIDEO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ronin/image.hpp"

namespace ronin {

enum class ClipRole { LQ, GT, Restored };

inline const char* to_string(ClipRole r) {
  switch (r) {
    case ClipRole::LQ: return "lq";
    case ClipRole::GT: return "gt";
    case ClipRole::Restored: return "restored";
  }
  return "?";
}

// Ordered frame sequence. All frames share H, W, C; values live in [0,1].
struct VideoClip {
  std::vector<Image> frames;
  ClipRole role = ClipRole::GT;
  double fps = 24.0;  // metadata only

  int t() const { return static_cast<int>(frames.size()); }
  int h() const { return frames.empty() ? 0 : frames.front().h; }
  int w() const { return frames.empty() ? 0 : frames.front().w; }
  int c() const { return frames.empty() ? 0 : frames.front().c; }

  void push(Image img) {
    if (!frames.empty())
      check_arg(img.h == h() && img.w == w() && img.c == c(),
                "all frames in a clip must share H, W, C");
    frames.push_back(std::move(img));
  }
};

// Stable address of one stored frame.
struct FrameRef {
  std::string video_id;
  int frame_index = 0;
  std::filesystem::path path;

  bool operator==(const FrameRef& o) const {
    return video_id == o.video_id && frame_index == o.frame_index;
  }
  bool operator<(const FrameRef& o) const {
    if (video_id != o.video_id) return video_id < o.video_id;
    return frame_index < o.frame_index;
  }
  std::string key() const {
    return video_id + "/" + std::to_string(frame_index);
  }
};

inline std::string frame_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.png", index);
  return buf;
}

}  // namespace ronin

#endif  // RONIN_VIDEO_HPP
