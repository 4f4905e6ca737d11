#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ronin/degrade.hpp"
#include "ronin/synthesize.hpp"

using namespace ronin;

namespace {

Image constant_frame(int h, int w, int c, float value) {
  Image img(h, w, c);
  std::fill(img.v.begin(), img.v.end(), value);
  return img;
}

Image textured_frame(int h, int w, std::uint64_t seed) {
  Rng style(seed);
  return toy_frame(h, w, 3, 0, style);
}

double sample_std(const Image& a, const Image& b) {
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double d = static_cast<double>(b.v[i]) - a.v[i];
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(a.v.size());
  const double mean = sum / n;
  return std::sqrt(sq / n - mean * mean);
}

double laplacian_energy(const Image& img) {
  double e = 0.0;
  for (int y = 1; y + 1 < img.h; ++y)
    for (int x = 1; x + 1 < img.w; ++x)
      for (int ch = 0; ch < img.c; ++ch) {
        const double v = 4.0 * img.at(y, x, ch) - img.at(y - 1, x, ch) -
                         img.at(y + 1, x, ch) - img.at(y, x - 1, ch) -
                         img.at(y, x + 1, ch);
        e += v * v;
      }
  return e;
}

}  // namespace

TEST_CASE("gaussian noise: identity at sigma 0, calibrated scale, seeded") {
  const Image gray = constant_frame(256, 256, 1, 0.5f);
  Rng rng(11);
  SECTION("sigma zero is the identity") {
    REQUIRE(add_gaussian_noise(gray, 0.0, rng) == gray);
  }
  SECTION("sigma 50 empirical std within 5% (clamping trims tails slightly)") {
    const Image noisy = add_gaussian_noise(gray, 50.0, rng);
    REQUIRE(sample_std(gray, noisy) ==
            Catch::Approx(50.0 / 255.0).epsilon(0.05));
  }
  SECTION("fixed seed reproduces bit-exactly") {
    Rng r1(99), r2(99);
    REQUIRE(add_gaussian_noise(gray, 30.0, r1) ==
            add_gaussian_noise(gray, 30.0, r2));
  }
  SECTION("negative sigma rejected") {
    REQUIRE_THROWS_AS(add_gaussian_noise(gray, -1.0, rng), ParameterError);
  }
  SECTION("output stays in range") {
    const Image noisy = add_gaussian_noise(gray, 200.0, rng);
    for (float v : noisy.v) {
      REQUIRE(v >= 0.0f);
      REQUIRE(v <= 1.0f);
    }
  }
}

TEST_CASE("speckle noise: multiplicative") {
  Rng rng(5);
  SECTION("all-zero frame unchanged") {
    const Image zero = constant_frame(32, 32, 3, 0.0f);
    REQUIRE(add_speckle_noise(zero, 15.0, rng) == zero);
  }
  SECTION("sigma zero is the identity") {
    const Image img = textured_frame(32, 32, 1);
    REQUIRE(add_speckle_noise(img, 0.0, rng) == img);
  }
  SECTION("deterministic for a fixed seed") {
    const Image img = textured_frame(32, 32, 2);
    Rng r1(7), r2(7);
    REQUIRE(add_speckle_noise(img, 12.0, r1) ==
            add_speckle_noise(img, 12.0, r2));
  }
}

TEST_CASE("poisson noise follows the shot-noise model") {
  Rng rng(21);
  SECTION("all-zero frame is a fixed point") {
    const Image zero = constant_frame(64, 64, 1, 0.0f);
    REQUIRE(add_poisson_noise(zero, 3.0, rng) == zero);
  }
  SECTION("alpha 4 on x=0.5: std within 5% of sqrt(0.5)/100") {
    const Image gray = constant_frame(256, 256, 1, 0.5f);
    const Image noisy = add_poisson_noise(gray, 4.0, rng);
    REQUIRE(sample_std(gray, noisy) ==
            Catch::Approx(std::sqrt(0.5) / 100.0).epsilon(0.05));
  }
  SECTION("large alpha converges to the input in mean square") {
    const Image img = textured_frame(64, 64, 3);
    const Image out = add_poisson_noise(img, 6.0, rng);
    double mse = 0.0;
    for (std::size_t i = 0; i < img.v.size(); ++i) {
      const double d = static_cast<double>(out.v[i]) - img.v[i];
      mse += d * d;
    }
    mse /= static_cast<double>(img.v.size());
    REQUIRE(mse < 1e-5);
  }
  SECTION("non-positive alpha rejected") {
    const Image img = constant_frame(8, 8, 1, 0.5f);
    REQUIRE_THROWS_AS(add_poisson_noise(img, 0.0, rng), ParameterError);
  }
}

TEST_CASE("blur kinds") {
  SECTION("tiny sigma approximates the identity") {
    const Image img = textured_frame(32, 32, 4);
    const Image out = apply_blur(img, DegradationKind::GaussianBlur, 1e-4);
    for (std::size_t i = 0; i < img.v.size(); ++i)
      REQUIRE(out.v[i] == Catch::Approx(img.v[i]).margin(1e-5));
  }
  SECTION("constant frames are unchanged under both kinds") {
    const Image flat = constant_frame(33, 47, 3, 0.42f);
    const Image g = apply_blur(flat, DegradationKind::GaussianBlur, 1.7);
    const Image r = apply_blur(flat, DegradationKind::ResizeBlur, 2.0);
    for (std::size_t i = 0; i < flat.v.size(); ++i) {
      REQUIRE(g.v[i] == Catch::Approx(0.42f).margin(2e-6));
      REQUIRE(r.v[i] == Catch::Approx(0.42f).margin(2e-6));
    }
  }
  SECTION("resize blur strictly reduces high-frequency energy") {
    Image checker(32, 32, 1);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        checker.at(y, x, 0) = ((x + y) % 2 == 0) ? 1.0f : 0.0f;
    const Image out = resize_blur(checker, 2);
    REQUIRE(laplacian_energy(out) < laplacian_energy(checker));
  }
  SECTION("bad strengths rejected") {
    const Image img = constant_frame(16, 16, 1, 0.5f);
    REQUIRE_THROWS_AS(apply_blur(img, DegradationKind::GaussianBlur, 0.0),
                      ParameterError);
    REQUIRE_THROWS_AS(apply_blur(img, DegradationKind::ResizeBlur, 1.0),
                      ParameterError);
  }
}

TEST_CASE("jpeg compression artifacts") {
  const Image img = textured_frame(64, 64, 6);
  SECTION("requantization settles: second pass changes less than first") {
    const Image once = compress_jpeg(img, 40);
    const Image twice = compress_jpeg(once, 40);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < img.v.size(); ++i) {
      const double d1 = static_cast<double>(once.v[i]) - img.v[i];
      const double d2 = static_cast<double>(twice.v[i]) - once.v[i];
      e1 += d1 * d1;
      e2 += d2 * d2;
    }
    REQUIRE(e2 < e1);
  }
  SECTION("lower quality hurts more") {
    const Image q20 = compress_jpeg(img, 20);
    const Image q40 = compress_jpeg(img, 40);
    double mse20 = 0.0, mse40 = 0.0;
    for (std::size_t i = 0; i < img.v.size(); ++i) {
      const double d20 = static_cast<double>(q20.v[i]) - img.v[i];
      const double d40 = static_cast<double>(q40.v[i]) - img.v[i];
      mse20 += d20 * d20;
      mse40 += d40 * d40;
    }
    REQUIRE(mse20 > mse40);
    REQUIRE(mse40 > 0.0);
  }
}

TEST_CASE("video compression fallback is deterministic per frame") {
  std::vector<Image> frames = {textured_frame(48, 48, 7),
                               textured_frame(48, 48, 8)};
  const auto [out1, mode1] =
      compress_video(frames, "libx264", VideoCompressMode::Fallback);
  const auto [out2, mode2] =
      compress_video(frames, "libx264", VideoCompressMode::Fallback);
  REQUIRE(mode1 == VideoCompressMode::Fallback);
  REQUIRE(out1.size() == frames.size());
  for (std::size_t i = 0; i < out1.size(); ++i) REQUIRE(out1[i] == out2[i]);
  REQUIRE_FALSE(out1[0] == frames[0]);

  REQUIRE_THROWS_AS(compress_video(frames, "vp9", VideoCompressMode::Fallback),
                    ParameterError);
}

TEST_CASE("procedural snow") {
  const Image img = textured_frame(96, 96, 9);
  SECTION("compositing raises mean luminance") {
    Rng rng(31);
    const Image out = overlay_snow(img, SnowIntensity::Moderate, rng);
    REQUIRE(out.mean() > img.mean());
  }
  SECTION("severe covers more pixels than moderate at the same seed") {
    Rng r1(55), r2(55);
    const Image mod = overlay_snow(img, SnowIntensity::Moderate, r1);
    const Image sev = overlay_snow(img, SnowIntensity::Severe, r2);
    REQUIRE(snow_coverage(img, sev) > snow_coverage(img, mod));
  }
  SECTION("deterministic for a fixed seed") {
    Rng r1(77), r2(77);
    REQUIRE(overlay_snow(img, SnowIntensity::Severe, r1) ==
            overlay_snow(img, SnowIntensity::Severe, r2));
  }
}
