#ifndef RONIN_GROUND_MOCK_HPP
#define RONIN_GROUND_MOCK_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ronin/dataset_io.hpp"
#include "ronin/ground_client.hpp"
#include "ronin/image_io.hpp"

namespace ronin {

// ---------------------------------------------------------------------------
// Mock MLLM. Answers the prompt-algorithm queries from the synthesis
// metadata sitting next to each frame (<video>/meta.jsonl), so the whole
// pipeline runs offline and deterministically. A frame without metadata
// (e.g. a GT frame) is treated as clean.
// ---------------------------------------------------------------------------

// Candidate-degradation families the synthesizer can produce.
inline std::string degradation_family(DegradationKind k) {
  switch (k) {
    case DegradationKind::GaussianNoise:
    case DegradationKind::SpeckleNoise:
    case DegradationKind::PoissonNoise:
      return "noise";
    case DegradationKind::GaussianBlur:
    case DegradationKind::ResizeBlur:
      return "blur";
    case DegradationKind::Snow:
      return "snow";
    case DegradationKind::JpegCompression:
    case DegradationKind::VideoCompression:
      return "compression";
  }
  return "?";
}

inline const std::vector<std::string>& default_candidates() {
  static const std::vector<std::string> c = {"noise", "rain", "snow", "blur",
                                             "compression"};
  return c;
}

// Fixed intensity thresholds mapping synthesis parameters to the
// {moderate, severe} vocabulary.
struct MockThresholds {
  double noise_sigma_severe = 25.0;    // gaussian/speckle sigma >= -> severe
  double poisson_alpha_severe = 3.0;   // alpha <= -> severe (lower = noisier)
  double blur_sigma_severe = 1.5;      // kernel sigma >= -> severe
  int resize_factor_severe = 3;        // factor >= -> severe
  int jpeg_quality_severe = 15;        // quality <= -> severe
};

class MockMLLMClient : public MLLMClient {
 public:
  explicit MockMLLMClient(MockThresholds thresholds = {})
      : thresholds_(thresholds) {}

  std::string query(const std::filesystem::path& image_path,
                    const std::string& prompt) override {
    const auto detected = detect(image_path);
    if (prompt == kQualityPrompt) return quality_description(image_path, detected);

    // "Is there <d> degradation present in the image? Answer Yes or No."
    static const std::string presence_prefix = "Is there ";
    static const std::string presence_suffix =
        " degradation present in the image? Answer Yes or No.";
    if (prompt.rfind(presence_prefix, 0) == 0 &&
        prompt.size() > presence_prefix.size() + presence_suffix.size() &&
        prompt.compare(prompt.size() - presence_suffix.size(),
                       presence_suffix.size(), presence_suffix) == 0) {
      const std::string name = prompt.substr(
          presence_prefix.size(),
          prompt.size() - presence_prefix.size() - presence_suffix.size());
      return detected.count(name) ? "Yes" : "No";
    }

    // "Rate the intensity of degradation <d>? Choose either severe or moderate."
    static const std::string intensity_prefix =
        "Rate the intensity of degradation ";
    static const std::string intensity_suffix =
        "? Choose either severe or moderate.";
    if (prompt.rfind(intensity_prefix, 0) == 0 &&
        prompt.size() > intensity_prefix.size() + intensity_suffix.size() &&
        prompt.compare(prompt.size() - intensity_suffix.size(),
                       intensity_suffix.size(), intensity_suffix) == 0) {
      const std::string name = prompt.substr(
          intensity_prefix.size(),
          prompt.size() - intensity_prefix.size() - intensity_suffix.size());
      const auto it = detected.find(name);
      return it != detected.end() ? it->second : "moderate";
    }

    return "The image shows a scene of ordinary quality.";
  }

  static constexpr const char* kQualityPrompt =
      "Rate the quality of the image. Think step by step.";

 private:
  // family -> intensity for the frame's applied degradations.
  std::map<std::string, std::string> detect(
      const std::filesystem::path& image_path) {
    std::map<std::string, std::string> out;
    const auto meta = frame_meta_for(image_path);
    if (!meta) return out;
    for (const DegradationSpec& s : meta->specs) {
      const std::string family = degradation_family(s.kind);
      const bool severe = is_severe(s);
      auto it = out.find(family);
      if (it == out.end()) {
        out[family] = severe ? "severe" : "moderate";
      } else if (severe) {
        it->second = "severe";
      }
    }
    return out;
  }

  bool is_severe(const DegradationSpec& s) const {
    switch (s.kind) {
      case DegradationKind::GaussianNoise:
      case DegradationKind::SpeckleNoise:
        return s.sigma >= thresholds_.noise_sigma_severe;
      case DegradationKind::PoissonNoise:
        return s.alpha <= thresholds_.poisson_alpha_severe;
      case DegradationKind::GaussianBlur:
        return s.blur_sigma >= thresholds_.blur_sigma_severe;
      case DegradationKind::ResizeBlur:
        return s.resize_factor >= thresholds_.resize_factor_severe;
      case DegradationKind::JpegCompression:
        return s.jpeg_quality <= thresholds_.jpeg_quality_severe;
      case DegradationKind::VideoCompression:
        return false;
      case DegradationKind::Snow:
        return s.intensity == SnowIntensity::Severe;
    }
    return false;
  }

  std::string quality_description(
      const std::filesystem::path& image_path,
      const std::map<std::string, std::string>& detected) {
    std::string brightness = "dim";
    try {
      const double mean = load_image(image_path).mean();
      brightness = mean >= 0.55 ? "bright" : (mean >= 0.3 ? "dim" : "dark");
    } catch (const IoError&) {
      // Leave the default if the frame cannot be decoded here; presence
      // answers still work from metadata.
    }
    std::string d1 = "The photo shows a " + brightness + " scene.";
    if (detected.empty()) {
      d1 += " The image is clean and sharp, and the overall quality is good.";
      return d1;
    }
    d1 += " The overall quality of the image is poor, showing";
    bool first = true;
    for (const auto& [family, intensity] : detected) {
      d1 += first ? " " : " and ";
      d1 += intensity + " " + family;
      first = false;
    }
    d1 += ".";
    return d1;
  }

  // meta.jsonl lives next to the frame's lq/ directory; cached per video.
  std::optional<FrameMeta> frame_meta_for(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    const fs::path dir = path.parent_path();
    if (dir.filename() != "lq") return std::nullopt;
    const fs::path meta_path = dir.parent_path() / "meta.jsonl";
    if (!fs::exists(meta_path)) return std::nullopt;

    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(meta_path.string());
    if (it == cache_.end())
      it = cache_.emplace(meta_path.string(), load_meta(meta_path)).first;

    // frame_%06d.png -> index
    const std::string stem = path.stem().string();
    const auto us = stem.rfind('_');
    if (us == std::string::npos) return std::nullopt;
    const int index = std::stoi(stem.substr(us + 1));
    for (const FrameMeta& m : it->second)
      if (m.frame_index == index) return m;
    return std::nullopt;
  }

  MockThresholds thresholds_;
  std::mutex mu_;
  std::map<std::string, std::vector<FrameMeta>> cache_;
};

// ---------------------------------------------------------------------------
// Mock text encoder: deterministic hash embedding of the token multiset,
// unit-normalized. Degradation-family words carry extra weight so that texts
// sharing degradations land measurably closer than unrelated texts.
// ---------------------------------------------------------------------------

class MockTextEncoder : public TextEncoderClient {
 public:
  explicit MockTextEncoder(int d = 384, std::uint64_t seed = 0)
      : d_(d), seed_(seed) {
    check_arg(d >= 1, "embedding dimension must be >= 1");
  }

  std::vector<float> embed(const std::string& text) override {
    check_arg(!text.empty(), "cannot embed empty text");
    std::vector<double> acc(static_cast<std::size_t>(d_), 0.0);
    for (const auto& [token, count] : tokenize(text)) {
      Rng rng(splitmix64(hash_str(token) ^ seed_));
      const double w = token_weight(token) * count;
      for (int i = 0; i < d_; ++i) acc[static_cast<std::size_t>(i)] += w * rng.normal();
    }
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<float> out(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i)
      out[static_cast<std::size_t>(i)] = static_cast<float>(
          norm > 0.0 ? acc[static_cast<std::size_t>(i)] / norm : 0.0);
    return out;
  }

  int dimension() const override { return d_; }

  std::string encoder_id() const override {
    return "mock-hash-v1:d=" + std::to_string(d_) +
           ":seed=" + std::to_string(seed_);
  }

 private:
  static double token_weight(const std::string& token) {
    static const std::vector<std::string> families = {
        "noise", "rain", "snow", "blur", "compression", "haze"};
    if (std::find(families.begin(), families.end(), token) != families.end())
      return 6.0;
    if (token == "severe" || token == "moderate") return 2.0;
    return 1.0;
  }

  static std::map<std::string, int> tokenize(const std::string& text) {
    std::map<std::string, int> counts;
    std::string cur;
    for (char ch : text) {
      if (std::isalnum(static_cast<unsigned char>(ch))) {
        cur.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(ch))));
      } else if (!cur.empty()) {
        ++counts[cur];
        cur.clear();
      }
    }
    if (!cur.empty()) ++counts[cur];
    return counts;
  }

  int d_;
  std::uint64_t seed_;
};

}  // namespace ronin

#endif  // RONIN_GROUND_MOCK_HPP
