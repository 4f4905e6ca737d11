#ifndef RONIN_IMAGE_IO_HPP
#define RONIN_IMAGE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "ronin/image.hpp"

// All OpenCV usage lives behind this header: 8-bit codecs and resizing.
// Pixels are quantized to 8 bits on disk, per the dataset format.

namespace ronin {

namespace detail {

inline cv::Mat to_mat8(const Image& img) {
  check_arg(img.c == 1 || img.c == 3, "only 1- or 3-channel images supported");
  cv::Mat m(img.h, img.w, img.c == 3 ? CV_8UC3 : CV_8UC1);
  for (int y = 0; y < img.h; ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.w; ++x) {
      for (int ch = 0; ch < img.c; ++ch) {
        const float v = std::min(1.0f, std::max(0.0f, img.at(y, x, ch)));
        // RGB -> BGR for OpenCV.
        const int dst = img.c == 3 ? 2 - ch : ch;
        row[x * img.c + dst] =
            static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  return m;
}

inline Image from_mat8(const cv::Mat& m) {
  check_arg(m.type() == CV_8UC3 || m.type() == CV_8UC1,
            "unsupported mat type");
  const int c = m.channels();
  Image img(m.rows, m.cols, c);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        const int src = c == 3 ? 2 - ch : ch;
        img.at(y, x, ch) = static_cast<float>(row[x * c + src]) / 255.0f;
      }
    }
  }
  return img;
}

}  // namespace detail

inline Image load_image(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot decode image: " + path.string());
  if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
  if (m.depth() != CV_8U) m.convertTo(m, CV_8U);
  return detail::from_mat8(m);
}

inline void save_png(const Image& img, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), detail::to_mat8(img)))
    throw IoError("cannot write image: " + path.string());
}

// JPEG encode/decode round trip at a given quality factor.
inline Image jpeg_roundtrip(const Image& img, int quality) {
  check_arg(quality >= 1 && quality <= 100, "jpeg quality out of range");
  std::vector<unsigned char> buf;
  const std::vector<int> params = {cv::IMWRITE_JPEG_QUALITY, quality};
  if (!cv::imencode(".jpg", detail::to_mat8(img), buf, params))
    throw IoError("jpeg encode failed");
  cv::Mat dec = cv::imdecode(buf, img.c == 3 ? cv::IMREAD_COLOR
                                             : cv::IMREAD_GRAYSCALE);
  if (dec.empty()) throw IoError("jpeg decode failed");
  return detail::from_mat8(dec);
}

// Bilinear resize in float; used by the resize-blur degradation.
inline Image resize_bilinear(const Image& img, int out_h, int out_w) {
  check_arg(out_h >= 1 && out_w >= 1, "resize target must be positive");
  cv::Mat m(img.h, img.w, CV_32FC(img.c));
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x)
      for (int ch = 0; ch < img.c; ++ch)
        m.ptr<float>(y)[x * img.c + ch] = img.at(y, x, ch);
  cv::Mat out;
  cv::resize(m, out, cv::Size(out_w, out_h), 0, 0, cv::INTER_LINEAR);
  Image res(out_h, out_w, img.c);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x)
      for (int ch = 0; ch < img.c; ++ch)
        res.at(y, x, ch) = out.ptr<float>(y)[x * img.c + ch];
  return res;
}

}  // namespace ronin

#endif  // RONIN_IMAGE_IO_HPP
