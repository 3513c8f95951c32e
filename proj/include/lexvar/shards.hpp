#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexvar/wsi.hpp"

namespace lexvar {

inline constexpr std::uint32_t kShardVersion = 1;
inline constexpr std::uint32_t kModelVersion = 1;

// EMBS / REPS shard files. See docs/formats.md for the byte layout.
void write_embedding_shard(std::ostream& out, const EmbeddingShard& shard);
EmbeddingShard read_embedding_shard(std::istream& in);
void write_representative_shard(std::ostream& out, const RepresentativeShard& shard);
RepresentativeShard read_representative_shard(std::istream& in);

void write_embedding_shard(const std::filesystem::path& path, const EmbeddingShard& shard);
void write_representative_shard(const std::filesystem::path& path, const RepresentativeShard& shard);

/// Reads and concatenates shard files in the given order. All files must
/// agree on dimensions; a repeated occurrence key is an error.
EmbeddingShard read_embedding_shards(const std::vector<std::filesystem::path>& paths);
RepresentativeShard read_representative_shards(const std::vector<std::filesystem::path>& paths);

/// Files in `dir` with the given extension, sorted by name.
std::vector<std::filesystem::path> list_shard_files(const std::filesystem::path& dir, const std::string& extension);

// SNSM model files: every model induced in one wsi-train run.
struct SenseModelFile {
  std::string provenance;  // free text, e.g. the config hash line
  std::vector<SenseModel> models;
};

void write_sense_models(std::ostream& out, const SenseModelFile& file);
SenseModelFile read_sense_models(std::istream& in);

}  // namespace lexvar
