#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "ronin/embedding_store.hpp"
#include "ronin/ground_mock.hpp"
#include "ronin/grounding.hpp"
#include "ronin/synthesize.hpp"
#include "test_util.hpp"

using namespace ronin;
using ronin_tests::TempDir;

namespace {

// Answers fixed strings per prompt; unknown prompts echo a default.
class ScriptedClient : public MLLMClient {
 public:
  std::map<std::string, std::string> answers;
  std::string fallback = "No";
  int calls = 0;

  std::string query(const std::filesystem::path&,
                    const std::string& prompt) override {
    ++calls;
    const auto it = answers.find(prompt);
    return it == answers.end() ? fallback : it->second;
  }
};

FrameRef dummy_frame() {
  return FrameRef{"vid", 0, "/nonexistent/frame_000000.png"};
}

}  // namespace

TEST_CASE("ground_frame follows the prompt algorithm exactly") {
  ScriptedClient client;
  client.answers["Rate the quality of the image. Think step by step."] =
      "The image looks grainy overall.";
  client.answers["Is there noise degradation present in the image? Answer Yes or No."] = "Yes";
  client.answers["Rate the intensity of degradation noise? Choose either severe or moderate."] = "severe";
  client.answers["Is there rain degradation present in the image? Answer Yes or No."] = "No";
  client.answers["Is there snow degradation present in the image? Answer Yes or No."] = "Yes";
  client.answers["Rate the intensity of degradation snow? Choose either severe or moderate."] = "moderate";

  const auto rec =
      ground_frame(dummy_frame(), client, {"noise", "rain", "snow"});

  // String-level golden check of the concatenation rule.
  REQUIRE(rec.description ==
          "The image looks grainy overall."
          " There is noise in the image, and the intensity of noise is severe."
          " There is snow in the image, and the intensity of snow is moderate.");
  REQUIRE(rec.detected ==
          std::vector<std::pair<std::string, std::string>>{
              {"noise", "severe"}, {"snow", "moderate"}});
}

TEST_CASE("ground_frame tolerates answer punctuation but rejects junk") {
  SECTION("Yes./ YES with whitespace accepted") {
    ScriptedClient client;
    client.answers["Rate the quality of the image. Think step by step."] = "ok quality";
    client.answers["Is there blur degradation present in the image? Answer Yes or No."] = " YES. ";
    client.answers["Rate the intensity of degradation blur? Choose either severe or moderate."] = "Moderate.";
    int warnings = 0;
    const auto rec = ground_frame(dummy_frame(), client, {"blur"}, &warnings);
    REQUIRE(warnings == 0);
    REQUIRE(rec.detected.size() == 1);
    REQUIRE(rec.detected[0] == std::make_pair(std::string("blur"),
                                              std::string("moderate")));
  }
  SECTION("out-of-vocabulary answers are counted and skipped") {
    ScriptedClient client;
    client.answers["Rate the quality of the image. Think step by step."] = "ok quality";
    client.answers["Is there blur degradation present in the image? Answer Yes or No."] = "Probably yes";
    client.answers["Is there noise degradation present in the image? Answer Yes or No."] = "Yes";
    client.answers["Rate the intensity of degradation noise? Choose either severe or moderate."] = "extreme";
    int warnings = 0;
    const auto rec =
        ground_frame(dummy_frame(), client, {"blur", "noise"}, &warnings);
    REQUIRE(warnings == 2);
    REQUIRE(rec.detected.empty());
    REQUIRE(rec.description == "ok quality");
  }
}

TEST_CASE("query_quality rejects empty responses") {
  ScriptedClient client;
  client.answers["Rate the quality of the image. Think step by step."] = "";
  REQUIRE_THROWS_AS(query_quality(dummy_frame(), client), GroundingError);
}

TEST_CASE("mock client answers from synthesis metadata") {
  TempDir dir("mock_meta");
  // Hand-build one degraded video: frame 0 with sigma=12 noise + q=20 jpeg,
  // frame 1 clean (empty specs), frame 2 severe snow.
  Rng style(10);
  VideoClip lq;
  lq.role = ClipRole::LQ;
  for (int i = 0; i < 3; ++i) lq.push(toy_frame(24, 24, 3, i, style));
  save_clip(lq, dir.path / "vid0" / "lq");
  std::vector<FrameMeta> meta(3);
  for (int i = 0; i < 3; ++i) meta[static_cast<std::size_t>(i)].frame_index = i;
  meta[0].specs = {DegradationSpec::gaussian_noise(12.0, 1),
                   DegradationSpec::jpeg(20)};
  meta[2].specs = {DegradationSpec::snow(SnowIntensity::Severe, 2)};
  save_meta(meta, dir.path / "vid0" / "meta.jsonl");

  MockMLLMClient mock;
  const std::vector<std::string> candidates = {"noise", "rain", "snow", "blur",
                                               "compression"};

  SECTION("moderate noise + compression detected at fixed thresholds") {
    const FrameRef f{"vid0", 0, dir.path / "vid0" / "lq" / "frame_000000.png"};
    const auto rec = ground_frame(f, mock, candidates);
    REQUIRE(rec.detected ==
            std::vector<std::pair<std::string, std::string>>{
                {"noise", "moderate"}, {"compression", "moderate"}});
  }
  SECTION("clean frame detects nothing and describes cleanliness") {
    const FrameRef f{"vid0", 1, dir.path / "vid0" / "lq" / "frame_000001.png"};
    const auto rec = ground_frame(f, mock, candidates);
    REQUIRE(rec.detected.empty());
    for (const auto& name : candidates)
      REQUIRE(rec.description.find(name) == std::string::npos);
  }
  SECTION("severe snow is named in the base quality description") {
    const FrameRef f{"vid0", 2, dir.path / "vid0" / "lq" / "frame_000002.png"};
    const std::string text = query_quality(f, mock);
    REQUIRE(text.find("severe snow") != std::string::npos);
    const auto rec = ground_frame(f, mock, {"snow"});
    REQUIRE(rec.detected ==
            std::vector<std::pair<std::string, std::string>>{
                {"snow", "severe"}});
  }
  SECTION("frames outside an lq tree are treated as clean") {
    save_clip(lq, dir.path / "vid0" / "gt");
    const FrameRef f{"vid0", 0, dir.path / "vid0" / "gt" / "frame_000000.png"};
    const auto rec = ground_frame(f, mock, candidates);
    REQUIRE(rec.detected.empty());
  }
}

TEST_CASE("mock text encoder embeddings") {
  MockTextEncoder enc(64, 7);
  SECTION("deterministic and unit-norm") {
    const auto a = enc.embed("severe noise in a dim scene");
    const auto b = enc.embed("severe noise in a dim scene");
    REQUIRE(a == b);
    double norm = 0.0;
    for (float v : a) norm += static_cast<double>(v) * v;
    REQUIRE(norm == Catch::Approx(1.0).margin(1e-5));
  }
  SECTION("one changed degradation word moves the embedding") {
    const auto a = enc.embed("there is severe noise in the image");
    const auto b = enc.embed("there is severe snow in the image");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      dot += static_cast<double>(a[i]) * b[i];
    REQUIRE(dot < 0.999);
  }
  SECTION("texts sharing degradation words land closer than unrelated texts") {
    const auto noise1 = enc.embed("the photo shows severe noise everywhere");
    const auto noise2 = enc.embed("a frame afflicted by moderate noise");
    const auto snow = enc.embed("heavy severe snow covers the scene");
    const auto cos = [](const std::vector<float>& x,
                        const std::vector<float>& y) {
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        d += static_cast<double>(x[i]) * y[i];
      return d;
    };
    REQUIRE(cos(noise1, noise2) > cos(noise1, snow));
  }
  SECTION("empty text is rejected") {
    REQUIRE_THROWS_AS(enc.embed(""), ParameterError);
  }
  SECTION("default dimension is 384") {
    MockTextEncoder def;
    REQUIRE(def.dimension() == 384);
  }
}
