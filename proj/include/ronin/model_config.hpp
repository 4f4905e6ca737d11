#ifndef RONIN_MODEL_CONFIG_HPP
#define RONIN_MODEL_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ronin/common.hpp"

namespace ronin {

enum class HistoryMode { None, GatedPrevFrame };

inline const char* to_string(HistoryMode m) {
  return m == HistoryMode::None ? "none" : "gated_prev_frame";
}

inline HistoryMode history_mode_from_string(const std::string& s) {
  if (s == "none") return HistoryMode::None;
  if (s == "gated_prev_frame") return HistoryMode::GatedPrevFrame;
  throw ParameterError("unknown history mode: " + s);
}

// Structural description of the restoration network. stage_channels are the
// encoder widths (strictly increasing); the decoder mirrors them. The number
// of decoder stages is stage_channels.size() - 1.
struct ModelConfig {
  std::vector<int> stage_channels = {8, 16, 32};
  int blocks_per_stage = 1;
  int d = 32;  // prompt / text-embedding dimension
  HistoryMode history_mode = HistoryMode::GatedPrevFrame;
  std::vector<int> injection_sites;  // empty -> default (last two decoders)
  bool cross_attention = true;
  int attention_heads = 1;
  int kv_pool = 8;  // attention key/value grid (kv_pool x kv_pool)
  int in_channels = 3;
  std::uint64_t init_seed = 0x5eed;

  int num_stages() const { return static_cast<int>(stage_channels.size()); }
  int num_decoders() const { return num_stages() - 1; }
  int latent_channels() const { return stage_channels.back(); }
  int downscale_factor() const { return 1 << num_decoders(); }

  // Last two decoders when there are at least two, else the single one.
  static std::vector<int> default_injection_sites(int num_decoders) {
    if (num_decoders >= 2) return {num_decoders - 2, num_decoders - 1};
    return {0};
  }

  std::vector<int> resolved_injection_sites() const {
    return injection_sites.empty() ? default_injection_sites(num_decoders())
                                   : injection_sites;
  }

  // Channel width at decoder stage j's output.
  int decoder_channels(int j) const {
    return stage_channels[static_cast<std::size_t>(num_decoders() - 1 - j)];
  }

  void validate() const {
    check_arg(num_stages() >= 2, "need at least two stages");
    for (int i = 1; i < num_stages(); ++i)
      check_arg(stage_channels[static_cast<std::size_t>(i - 1)] <
                    stage_channels[static_cast<std::size_t>(i)],
                "stage_channels must be strictly increasing");
    check_arg(blocks_per_stage >= 1, "blocks_per_stage must be >= 1");
    check_arg(d >= 1, "prompt dimension must be >= 1");
    check_arg(attention_heads >= 1 &&
                  latent_channels() % attention_heads == 0,
              "attention_heads must divide the latent channel count");
    check_arg(kv_pool >= 1, "kv_pool must be >= 1");
    for (int site : resolved_injection_sites())
      check_arg(site >= 0 && site < num_decoders(),
                "injection site out of decoder range");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["stage_channels"] = stage_channels;
    j["blocks_per_stage"] = blocks_per_stage;
    j["d"] = d;
    j["history_mode"] = to_string(history_mode);
    j["injection_sites"] = resolved_injection_sites();
    j["cross_attention"] = cross_attention;
    j["attention_heads"] = attention_heads;
    j["kv_pool"] = kv_pool;
    j["in_channels"] = in_channels;
    j["init_seed"] = init_seed;
    return j;
  }

  static ModelConfig from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.stage_channels = j.at("stage_channels").get<std::vector<int>>();
    cfg.blocks_per_stage = j.at("blocks_per_stage").get<int>();
    cfg.d = j.at("d").get<int>();
    cfg.history_mode =
        history_mode_from_string(j.at("history_mode").get<std::string>());
    cfg.injection_sites = j.at("injection_sites").get<std::vector<int>>();
    cfg.cross_attention = j.at("cross_attention").get<bool>();
    cfg.attention_heads = j.at("attention_heads").get<int>();
    cfg.kv_pool = j.at("kv_pool").get<int>();
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.init_seed = j.value("init_seed", std::uint64_t{0x5eed});
    cfg.validate();
    return cfg;
  }
};

}  // namespace ronin

#endif  // RONIN_MODEL_CONFIG_HPP
