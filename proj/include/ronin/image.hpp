#ifndef RONIN_IMAGE_HPP
#define RONIN_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ronin/common.hpp"
#include "ronin/tensor.hpp"

namespace ronin {

// Interleaved HWC image, float values in [0,1]. Every degradation clamps its
// output back into this range.
struct Image {
  int h = 0, w = 0, c = 0;
  std::vector<float> v;

  Image() = default;
  Image(int h_, int w_, int c_) : h(h_), w(w_), c(c_) {
    check_arg(h_ > 0 && w_ > 0 && c_ > 0, "image dims must be positive");
    v.assign(static_cast<std::size_t>(h_) * w_ * c_, 0.0f);
  }

  std::size_t size() const { return v.size(); }
  float& at(int y, int x, int ch) {
    return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }
  float at(int y, int x, int ch) const {
    return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }
  bool same_shape(const Image& o) const {
    return h == o.h && w == o.w && c == o.c;
  }

  void clamp01() {
    for (float& x : v) x = std::min(1.0f, std::max(0.0f, x));
  }

  double mean() const {
    double s = 0.0;
    for (float x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  }
};

inline bool operator==(const Image& a, const Image& b) {
  return a.h == b.h && a.w == b.w && a.c == b.c && a.v == b.v;
}

// BT.601 luma; grayscale images pass through.
inline std::vector<double> luminance(const Image& img) {
  std::vector<double> y(static_cast<std::size_t>(img.h) * img.w);
  for (int i = 0; i < img.h; ++i) {
    for (int j = 0; j < img.w; ++j) {
      if (img.c >= 3) {
        y[static_cast<std::size_t>(i) * img.w + j] =
            0.299 * img.at(i, j, 0) + 0.587 * img.at(i, j, 1) +
            0.114 * img.at(i, j, 2);
      } else {
        y[static_cast<std::size_t>(i) * img.w + j] = img.at(i, j, 0);
      }
    }
  }
  return y;
}

// HWC image -> (1, c, h, w) tensor and back; the network is channel-planar.
template <class T>
Tensor<T> to_tensor(const Image& img) {
  Tensor<T> t(1, img.c, img.h, img.w);
  for (int ch = 0; ch < img.c; ++ch)
    for (int y = 0; y < img.h; ++y)
      for (int x = 0; x < img.w; ++x)
        t.at(0, ch, y, x) = static_cast<T>(img.at(y, x, ch));
  return t;
}

template <class T>
Image from_tensor(const Tensor<T>& t, int batch_index = 0) {
  Image img(t.h(), t.w(), t.c());
  for (int ch = 0; ch < t.c(); ++ch)
    for (int y = 0; y < t.h(); ++y)
      for (int x = 0; x < t.w(); ++x)
        img.at(y, x, ch) = static_cast<float>(t.at(batch_index, ch, y, x));
  return img;
}

}  // namespace ronin

#endif  // RONIN_IMAGE_HPP
