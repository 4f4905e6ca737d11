#ifndef RONIN_EMBEDDING_STORE_HPP
#define RONIN_EMBEDDING_STORE_HPP

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ronin/common.hpp"
#include "ronin/grounding.hpp"

namespace ronin {

// Lookup miss on the training set; training aborts rather than improvising.
struct StoreMissError : Error {
  using Error::Error;
};

inline std::uint64_t file_content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char buf[1 << 14];
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (in) {
    in.read(buf, sizeof(buf));
    h = hash_bytes(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

// Offline per-frame mapping from frames to grounded descriptions and their
// embeddings. Persisted as a directory:
//   index.jsonl     one record header per line (embedding offset + length)
//   embeddings.bin  little-endian f32, contiguous, in index order
class EmbeddingStore {
 public:
  explicit EmbeddingStore(int d = 0) : d_(d) {}

  int dimension() const { return d_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  void insert(GroundedFrameRecord rec) {
    check_arg(!rec.description.empty(), "record description must be non-empty");
    if (d_ == 0) d_ = static_cast<int>(rec.embedding.size());
    check_arg(static_cast<int>(rec.embedding.size()) == d_,
              "embedding length does not match store dimension");
    records_[rec.frame.key()] = std::move(rec);
  }

  bool contains(const FrameRef& frame) const {
    return records_.count(frame.key()) != 0;
  }

  const GroundedFrameRecord& lookup(const FrameRef& frame) const {
    const auto it = records_.find(frame.key());
    if (it == records_.end())
      throw StoreMissError("no grounded record for frame " + frame.key());
    return it->second;
  }

  const std::map<std::string, GroundedFrameRecord>& records() const {
    return records_;
  }

  void save(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path index_tmp = dir / ".index.jsonl.tmp";
    const fs::path bin_tmp = dir / ".embeddings.bin.tmp";
    {
      std::ofstream index(index_tmp);
      std::ofstream bin(bin_tmp, std::ios::binary);
      if (!index || !bin) throw IoError("cannot write store to " + dir.string());
      std::size_t offset = 0;
      for (const auto& [key, rec] : records_) {
        nlohmann::json j;
        j["video_id"] = rec.frame.video_id;
        j["frame_index"] = rec.frame.frame_index;
        j["path"] = rec.frame.path.string();
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(rec.content_hash));
        j["content_hash"] = hex;
        j["description"] = rec.description;
        j["detected"] = rec.detected;
        j["encoder_id"] = rec.encoder_id;
        j["embedding_offset"] = offset;
        j["embedding_length"] = rec.embedding.size();
        index << j.dump() << "\n";
        static_assert(sizeof(float) == 4);
        bin.write(reinterpret_cast<const char*>(rec.embedding.data()),
                  static_cast<std::streamsize>(rec.embedding.size() * 4));
        offset += rec.embedding.size();
      }
    }
    fs::rename(index_tmp, dir / "index.jsonl");
    fs::rename(bin_tmp, dir / "embeddings.bin");
  }

  static EmbeddingStore load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::ifstream index(dir / "index.jsonl");
    if (!index) throw IoError("cannot open store index in " + dir.string());
    std::ifstream bin(dir / "embeddings.bin", std::ios::binary);
    if (!bin) throw IoError("cannot open store embeddings in " + dir.string());

    EmbeddingStore store;
    std::string line;
    while (std::getline(index, line)) {
      if (line.empty()) continue;
      const nlohmann::json j = nlohmann::json::parse(line);
      GroundedFrameRecord rec;
      rec.frame.video_id = j.at("video_id").get<std::string>();
      rec.frame.frame_index = j.at("frame_index").get<int>();
      rec.frame.path = j.at("path").get<std::string>();
      rec.content_hash = std::stoull(j.at("content_hash").get<std::string>(),
                                     nullptr, 16);
      rec.description = j.at("description").get<std::string>();
      rec.detected =
          j.at("detected")
              .get<std::vector<std::pair<std::string, std::string>>>();
      rec.encoder_id = j.at("encoder_id").get<std::string>();
      const auto offset = j.at("embedding_offset").get<std::size_t>();
      const auto length = j.at("embedding_length").get<std::size_t>();
      rec.embedding.resize(length);
      bin.seekg(static_cast<std::streamoff>(offset * 4));
      bin.read(reinterpret_cast<char*>(rec.embedding.data()),
               static_cast<std::streamsize>(length * 4));
      if (!bin) throw IoError("truncated embeddings.bin in " + dir.string());
      store.insert(std::move(rec));
    }
    return store;
  }

 private:
  int d_;
  std::map<std::string, GroundedFrameRecord> records_;  // key -> record
};

// Grounds and embeds every frame, skipping frames already present with an
// unchanged content hash and the same encoder, so reruns make zero client
// calls. The result is persisted to store_dir.
inline EmbeddingStore build_embedding_store(
    const std::vector<FrameRef>& frames, MLLMClient& client,
    TextEncoderClient& encoder, const std::vector<std::string>& candidates,
    const std::filesystem::path& store_dir, int* parse_warnings = nullptr) {
  check_arg(!frames.empty(), "no frames to ground");
  EmbeddingStore store;
  if (std::filesystem::exists(store_dir / "index.jsonl"))
    store = EmbeddingStore::load(store_dir);

  EmbeddingStore out(encoder.dimension());
  for (const FrameRef& frame : frames) {
    const std::uint64_t hash = file_content_hash(frame.path);
    if (store.contains(frame)) {
      const GroundedFrameRecord& existing = store.lookup(frame);
      if (existing.content_hash == hash &&
          existing.encoder_id == encoder.encoder_id()) {
        out.insert(existing);
        continue;
      }
    }
    GroundedFrameRecord rec =
        ground_frame(frame, client, candidates, parse_warnings);
    rec.content_hash = hash;
    rec.embedding = embed_description(rec.description, encoder);
    rec.encoder_id = encoder.encoder_id();
    out.insert(std::move(rec));
  }
  out.save(store_dir);
  return out;
}

// Case-insensitive whole-word counts of records mentioning each term.
inline std::map<std::string, long> degradation_term_counts(
    const EmbeddingStore& store, const std::vector<std::string>& terms) {
  check_arg(!terms.empty(), "term list must not be empty");
  const auto contains_word = [](const std::string& text,
                                const std::string& term) {
    std::string low;
    low.reserve(text.size());
    for (char ch : text)
      low.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    std::string t;
    for (char ch : term)
      t.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    std::size_t pos = 0;
    while ((pos = low.find(t, pos)) != std::string::npos) {
      const bool left_ok =
          pos == 0 || !std::isalnum(static_cast<unsigned char>(low[pos - 1]));
      const std::size_t end = pos + t.size();
      const bool right_ok =
          end >= low.size() ||
          !std::isalnum(static_cast<unsigned char>(low[end]));
      if (left_ok && right_ok) return true;
      ++pos;
    }
    return false;
  };

  std::map<std::string, long> counts;
  for (const std::string& term : terms) counts[term] = 0;
  for (const auto& [key, rec] : store.records()) {
    for (const std::string& term : terms)
      if (contains_word(rec.description, term)) ++counts[term];
  }
  return counts;
}

}  // namespace ronin

#endif  // RONIN_EMBEDDING_STORE_HPP
