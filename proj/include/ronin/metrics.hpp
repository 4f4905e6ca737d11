#ifndef RONIN_METRICS_HPP
#define RONIN_METRICS_HPP

#include <cmath>
#include <vector>

#include "ronin/image.hpp"

namespace ronin {

// PSNR with peak 1.0; zero-MSE pairs are capped at 100 dB so aggregates
// stay finite.
inline double psnr_from_mse(double mse) {
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

template <class T>
double psnr(const std::vector<T>& a, const std::vector<T>& b) {
  check_arg(a.size() == b.size() && !a.empty(), "psnr: shape mismatch");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    mse += d * d;
  }
  return psnr_from_mse(mse / static_cast<double>(a.size()));
}

// RGB MSE over all channels.
inline double psnr(const Image& a, const Image& b) {
  check_arg(a.same_shape(b), "psnr: shape mismatch");
  return psnr(a.v, b.v);
}

// ---------------------------------------------------------------------------
// SSIM with the standard constants: K1=0.01, K2=0.03, 11x11 gaussian window
// sigma=1.5, computed on the luminance channel, averaged over the valid
// region (window fully inside the frame).
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<double>& ssim_window_taps() {
  static const std::vector<double> taps = [] {
    std::vector<double> k(11);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double x = i - 5;
      k[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x / (1.5 * 1.5));
      sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return taps;
}

// Separable 11-tap filter, valid rows/cols only. Input h x w, output
// (h-10) x (w-10).
inline std::vector<double> filter_valid(const std::vector<double>& img, int h,
                                        int w) {
  const auto& k = ssim_window_taps();
  const int oh = h - 10, ow = w - 10;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i)
        acc += k[static_cast<std::size_t>(i)] *
               img[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i)
        acc += k[static_cast<std::size_t>(i)] *
               tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace detail

// Mean local SSIM over one plane with values in [0,1].
inline double ssim_plane(const std::vector<double>& a,
                         const std::vector<double>& b, int h, int w) {
  check_arg(static_cast<std::size_t>(h) * w == a.size() && a.size() == b.size(),
            "ssim: shape mismatch");
  check_arg(h >= 11 && w >= 11, "ssim: frame smaller than the 11x11 window");
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;

  const std::size_t n = a.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = detail::filter_valid(a, h, w);
  const auto mu_b = detail::filter_valid(b, h, w);
  const auto m_aa = detail::filter_valid(aa, h, w);
  const auto m_bb = detail::filter_valid(bb, h, w);
  const auto m_ab = detail::filter_valid(ab, h, w);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    total += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) *
              (var_a + var_b + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

inline double ssim(const Image& a, const Image& b) {
  check_arg(a.same_shape(b), "ssim: shape mismatch");
  return ssim_plane(luminance(a), luminance(b), a.h, a.w);
}

}  // namespace ronin

#endif  // RONIN_METRICS_HPP
