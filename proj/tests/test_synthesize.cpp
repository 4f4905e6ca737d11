#include <catch2/catch_amalgamated.hpp>

#include "ronin/dataset_io.hpp"
#include "ronin/synthesize.hpp"
#include "test_util.hpp"

using namespace ronin;
using ronin_tests::TempDir;

TEST_CASE("toy source generation is deterministic") {
  TempDir a("src_a"), b("src_b");
  make_toy_source(a.path, 2, 6, 24, 24, 77);
  make_toy_source(b.path, 2, 6, 24, 24, 77);
  REQUIRE(ronin_tests::hash_tree(a.path) == ronin_tests::hash_tree(b.path));
  REQUIRE(list_videos(a.path) == std::vector<std::string>{"clip0", "clip1"});
}

TEST_CASE("synthesize_dataset: 3D denoise protocol") {
  TempDir src("synth_src"), out("synth_out");
  make_toy_source(src.path, 2, 8, 24, 24, 5);

  SynthesizeOptions opt;
  opt.protocol = Protocol::ThreeDDenoise;
  opt.seed = 99;
  opt.video_mode = VideoCompressMode::Fallback;
  synthesize_dataset(src.path, out.path, opt);

  const auto ids = list_videos(out.path);
  REQUIRE(ids.size() == 2);
  for (const auto& id : ids) {
    const VideoClip gt = load_clip(out.path / id / "gt", ClipRole::GT);
    const VideoClip lq = load_clip(out.path / id / "lq", ClipRole::LQ);
    REQUIRE(gt.t() == 8);
    REQUIRE(lq.t() == 8);

    const auto meta = load_meta(out.path / id / "meta.jsonl");
    REQUIRE(meta.size() == 8);
    for (const auto& m : meta) {
      REQUIRE(m.specs.size() == 1);
      REQUIRE(m.specs[0].kind == DegradationKind::GaussianNoise);
      REQUIRE(m.specs[0].sigma >= 20.0);
      REQUIRE(m.specs[0].sigma <= 50.0);
    }
    // Per-clip sigma: constant within the clip.
    for (const auto& m : meta)
      REQUIRE(m.specs[0].sigma == meta.front().specs[0].sigma);
  }
}

TEST_CASE("synthesize_dataset: snowyscenes excludes kernel blur") {
  TempDir src("snowy_src"), out("snowy_out");
  make_toy_source(src.path, 1, 12, 24, 24, 6);

  SynthesizeOptions opt;
  opt.protocol = Protocol::SnowyScenes;
  opt.seed = 2024;
  opt.interval_t = 6;
  opt.video_mode = VideoCompressMode::Fallback;
  synthesize_dataset(src.path, out.path, opt);

  const auto meta = load_meta(out.path / "clip0" / "meta.jsonl");
  for (const auto& m : meta)
    for (const auto& spec : m.specs) {
      REQUIRE(spec.kind != DegradationKind::GaussianBlur);
      REQUIRE(spec.kind != DegradationKind::ResizeBlur);
    }
}

TEST_CASE("synthesize_dataset: deterministic for a fixed seed") {
  TempDir src("det_src"), out1("det_out1"), out2("det_out2");
  make_toy_source(src.path, 2, 12, 24, 24, 8);

  SynthesizeOptions opt;
  opt.protocol = Protocol::TUD;
  opt.seed = 321;
  opt.interval_t = 6;
  opt.video_mode = VideoCompressMode::Fallback;
  synthesize_dataset(src.path, out1.path, opt);
  synthesize_dataset(src.path, out2.path, opt);
  REQUIRE(ronin_tests::hash_tree(out1.path) ==
          ronin_tests::hash_tree(out2.path));

  SECTION("jobs do not change the output") {
    TempDir out3("det_out3");
    SynthesizeOptions par = opt;
    par.jobs = 3;
    synthesize_dataset(src.path, out3.path, par);
    REQUIRE(ronin_tests::hash_tree(out1.path) ==
            ronin_tests::hash_tree(out3.path));
  }
}

TEST_CASE("dataset_frame_refs lists every LQ frame in order") {
  TempDir src("refs_src"), out("refs_out");
  make_toy_source(src.path, 2, 5, 24, 24, 9);
  SynthesizeOptions opt;
  opt.protocol = Protocol::ThreeDDenoise;
  opt.seed = 1;
  opt.video_mode = VideoCompressMode::Fallback;
  synthesize_dataset(src.path, out.path, opt);

  const auto refs = dataset_frame_refs(out.path);
  REQUIRE(refs.size() == 10);
  REQUIRE(refs.front().video_id == "clip0");
  REQUIRE(refs.front().frame_index == 0);
  REQUIRE(refs.back().video_id == "clip1");
  REQUIRE(refs.back().frame_index == 4);
  for (const auto& r : refs) REQUIRE(std::filesystem::exists(r.path));
}
