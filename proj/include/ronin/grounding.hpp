#ifndef RONIN_GROUNDING_HPP
#define RONIN_GROUNDING_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "ronin/ground_client.hpp"
#include "ronin/video.hpp"

namespace ronin {

// Per-frame grounded description plus its text embedding.
struct GroundedFrameRecord {
  FrameRef frame;
  std::string description;
  // (degradation name, intensity in {moderate, severe})
  std::vector<std::pair<std::string, std::string>> detected;
  std::vector<float> embedding;
  std::string encoder_id;
  std::uint64_t content_hash = 0;
};

namespace detail {

// Accepts a single clean token, tolerating surrounding whitespace and a
// trailing period; anything else fails to match and counts as a parse error.
inline std::string normalize_answer(const std::string& raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && (std::isspace(static_cast<unsigned char>(raw[e - 1])) ||
                   raw[e - 1] == '.' || raw[e - 1] == '!'))
    --e;
  std::string s;
  for (std::size_t i = b; i < e; ++i) {
    const auto ch = static_cast<unsigned char>(raw[i]);
    if (!std::isalpha(ch)) return {};
    s.push_back(static_cast<char>(std::tolower(ch)));
  }
  return s;
}

}  // namespace detail

// Base quality query: free-form description of the frame's quality.
inline std::string query_quality(const FrameRef& frame, MLLMClient& client) {
  const std::string text =
      client.query(frame.path, "Rate the quality of the image. Think step by step.");
  if (text.empty())
    throw GroundingError("empty quality description for " + frame.key());
  return text;
}

// Fine-grained degradation querying. Produces the base description followed
// by one sentence per confirmed candidate, in candidate-list order:
//   "There is <d> in the image, and the intensity of <d> is <s>."
// Unparseable client answers are counted and the candidate is skipped.
inline GroundedFrameRecord ground_frame(
    const FrameRef& frame, MLLMClient& client,
    const std::vector<std::string>& candidates, int* parse_warnings = nullptr) {
  check_arg(!candidates.empty(), "candidate list must not be empty");
  GroundedFrameRecord rec;
  rec.frame = frame;
  rec.description = query_quality(frame, client);

  for (const std::string& name : candidates) {
    const std::string presence = client.query(
        frame.path,
        "Is there " + name + " degradation present in the image? Answer Yes or No.");
    const std::string yn = detail::normalize_answer(presence);
    if (yn != "yes" && yn != "no") {
      if (parse_warnings != nullptr) ++*parse_warnings;
      continue;
    }
    if (yn == "no") continue;

    const std::string intensity_raw = client.query(
        frame.path, "Rate the intensity of degradation " + name +
                        "? Choose either severe or moderate.");
    const std::string intensity = detail::normalize_answer(intensity_raw);
    if (intensity != "severe" && intensity != "moderate") {
      if (parse_warnings != nullptr) ++*parse_warnings;
      continue;
    }

    rec.detected.emplace_back(name, intensity);
    rec.description += " There is " + name +
                       " in the image, and the intensity of " + name + " is " +
                       intensity + ".";
  }
  return rec;
}

// Embeds a description; deterministic for identical text and encoder.
inline std::vector<float> embed_description(const std::string& text,
                                            TextEncoderClient& encoder) {
  check_arg(!text.empty(), "cannot embed empty description");
  std::vector<float> v = encoder.embed(text);
  if (static_cast<int>(v.size()) != encoder.dimension())
    throw GroundingError("encoder returned wrong dimension");
  return v;
}

}  // namespace ronin

#endif  // RONIN_GROUNDING_HPP
