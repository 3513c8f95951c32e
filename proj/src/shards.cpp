#include "lexvar/shards.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "binary_io.hpp"

namespace lexvar {
namespace {

using namespace binary;

constexpr std::uint64_t kEmbsHeaderBytes = 4 + 4 + 4 + 8 + 8;
constexpr std::uint64_t kRepsHeaderBytes = 4 + 4 + 4 + 4 + 8 + 8;
constexpr std::uint64_t kKeyBytes = 4 + 4 + 8 + 4 + 4;

class StringTable {
 public:
  std::uint32_t intern(const std::string& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<std::uint32_t>(strings_.size()));
    if (inserted) strings_.push_back(s);
    return it->second;
  }
  const std::vector<std::string>& strings() const { return strings_; }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> strings_;
};

struct KeyIds {
  std::uint32_t token = 0;
  std::uint32_t community = 0;
  std::uint64_t comment = 0;
  std::uint32_t position = 0;
  std::uint32_t user = 0;
};

struct Tables {
  StringTable tokens, communities, comments, users;

  KeyIds intern(const Occurrence& o) {
    return {tokens.intern(o.token), communities.intern(o.community), comments.intern(o.comment_id), o.position,
            users.intern(o.user)};
  }
};

void put_key(std::ostream& out, const KeyIds& k) {
  put_u32(out, k.token);
  put_u32(out, k.community);
  put_u64(out, k.comment);
  put_u32(out, k.position);
  put_u32(out, k.user);
}

KeyIds get_key(std::istream& in) {
  KeyIds k;
  k.token = get_u32(in);
  k.community = get_u32(in);
  k.comment = get_u64(in);
  k.position = get_u32(in);
  k.user = get_u32(in);
  return k;
}

void put_table(std::ostream& out, const StringTable& table) {
  put_u64(out, table.strings().size());
  for (const auto& s : table.strings()) put_string(out, s);
}

std::vector<std::string> get_table(std::istream& in) {
  const auto n = get_u64(in);
  if (n > (1ull << 32)) throw Error("corrupt string table size");
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(get_string(in));
  return out;
}

void write_footer(std::ostream& out, const Tables& t) {
  put_table(out, t.tokens);
  put_table(out, t.communities);
  put_table(out, t.comments);
  put_table(out, t.users);
}

struct Footer {
  std::vector<std::string> tokens, communities, comments, users;

  Occurrence resolve(const KeyIds& k) const {
    if (k.token >= tokens.size() || k.community >= communities.size() || k.comment >= comments.size() ||
        k.user >= users.size()) {
      throw Error("shard record references a missing string table entry");
    }
    return {tokens[k.token], communities[k.community], comments[static_cast<std::size_t>(k.comment)], k.position,
            users[k.user]};
  }
};

Footer read_footer(std::istream& in) {
  Footer f;
  f.tokens = get_table(in);
  f.communities = get_table(in);
  f.comments = get_table(in);
  f.users = get_table(in);
  return f;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

void write_embedding_shard(std::ostream& out, const EmbeddingShard& shard) {
  if (shard.values.size() != shard.size() * shard.dim) throw Error("embedding shard values do not match its size");
  Tables tables;
  std::vector<KeyIds> keys;
  keys.reserve(shard.size());
  for (const auto& o : shard.occurrences) keys.push_back(tables.intern(o));

  const std::uint64_t record_bytes = kKeyBytes + 4ull * shard.dim;
  out.write("EMBS", 4);
  put_u32(out, kShardVersion);
  put_u32(out, shard.dim);
  put_u64(out, shard.size());
  put_u64(out, kEmbsHeaderBytes + record_bytes * shard.size());
  for (std::size_t i = 0; i < shard.size(); ++i) {
    put_key(out, keys[i]);
    for (float v : shard.vector(i)) put_f32(out, v);
  }
  write_footer(out, tables);
}

EmbeddingShard read_embedding_shard(std::istream& in) {
  expect_magic(in, "EMBS", "embedding shard");
  const auto version = get_u32(in);
  if (version != kShardVersion) throw Error("unsupported embedding shard version " + std::to_string(version));
  EmbeddingShard shard;
  shard.dim = get_u32(in);
  const auto count = get_u64(in);
  const auto offset = get_u64(in);
  if (offset != kEmbsHeaderBytes + (kKeyBytes + 4ull * shard.dim) * count) {
    throw Error("embedding shard string-table offset is inconsistent with its header");
  }
  std::vector<KeyIds> keys;
  keys.reserve(static_cast<std::size_t>(count));
  shard.values.reserve(static_cast<std::size_t>(count * shard.dim));
  for (std::uint64_t i = 0; i < count; ++i) {
    keys.push_back(get_key(in));
    for (std::uint32_t d = 0; d < shard.dim; ++d) {
      const float v = get_f32(in);
      if (!std::isfinite(v)) throw Error("non-finite value in embedding shard record " + std::to_string(i));
      shard.values.push_back(v);
    }
  }
  const Footer footer = read_footer(in);
  shard.occurrences.reserve(keys.size());
  for (const auto& k : keys) shard.occurrences.push_back(footer.resolve(k));
  return shard;
}

void write_representative_shard(std::ostream& out, const RepresentativeShard& shard) {
  if (shard.substitutes.size() != shard.size() * shard.stride()) {
    throw Error("representative shard substitutes do not match its size");
  }
  // Substitutes share the token table with the target tokens.
  Tables tables;
  std::vector<KeyIds> keys;
  keys.reserve(shard.size());
  for (const auto& o : shard.occurrences) keys.push_back(tables.intern(o));
  std::vector<std::uint32_t> remap(shard.vocabulary.size());
  for (std::size_t i = 0; i < shard.vocabulary.size(); ++i) remap[i] = tables.tokens.intern(shard.vocabulary[i]);

  const std::uint64_t record_bytes = kKeyBytes + 4ull * shard.stride();
  out.write("REPS", 4);
  put_u32(out, kShardVersion);
  put_u32(out, shard.reps_per_occurrence);
  put_u32(out, shard.substitutes_per_rep);
  put_u64(out, shard.size());
  put_u64(out, kRepsHeaderBytes + record_bytes * shard.size());
  for (std::size_t i = 0; i < shard.size(); ++i) {
    put_key(out, keys[i]);
    for (std::size_t j = 0; j < shard.stride(); ++j) put_u32(out, remap.at(shard.substitutes[i * shard.stride() + j]));
  }
  write_footer(out, tables);
}

RepresentativeShard read_representative_shard(std::istream& in) {
  expect_magic(in, "REPS", "representative shard");
  const auto version = get_u32(in);
  if (version != kShardVersion) throw Error("unsupported representative shard version " + std::to_string(version));
  RepresentativeShard shard;
  shard.reps_per_occurrence = get_u32(in);
  shard.substitutes_per_rep = get_u32(in);
  const auto count = get_u64(in);
  const auto offset = get_u64(in);
  if (offset != kRepsHeaderBytes + (kKeyBytes + 4ull * shard.stride()) * count) {
    throw Error("representative shard string-table offset is inconsistent with its header");
  }
  std::vector<KeyIds> keys;
  keys.reserve(static_cast<std::size_t>(count));
  shard.substitutes.reserve(static_cast<std::size_t>(count * shard.stride()));
  for (std::uint64_t i = 0; i < count; ++i) {
    keys.push_back(get_key(in));
    for (std::size_t j = 0; j < shard.stride(); ++j) shard.substitutes.push_back(get_u32(in));
  }
  Footer footer = read_footer(in);
  for (auto id : shard.substitutes) {
    if (id >= footer.tokens.size()) throw Error("substitute id outside the token table");
  }
  shard.occurrences.reserve(keys.size());
  for (const auto& k : keys) shard.occurrences.push_back(footer.resolve(k));
  shard.vocabulary = std::move(footer.tokens);
  return shard;
}

void write_embedding_shard(const std::filesystem::path& path, const EmbeddingShard& shard) {
  write_file(path, [&](std::ostream& out) { write_embedding_shard(out, shard); });
}

void write_representative_shard(const std::filesystem::path& path, const RepresentativeShard& shard) {
  write_file(path, [&](std::ostream& out) { write_representative_shard(out, shard); });
}

EmbeddingShard read_embedding_shards(const std::vector<std::filesystem::path>& paths) {
  EmbeddingShard merged;
  std::set<std::string> seen;
  bool first = true;
  for (const auto& path : paths) {
    auto in = open_binary(path);
    EmbeddingShard part = read_embedding_shard(in);
    if (first) {
      merged.dim = part.dim;
      first = false;
    } else if (part.dim != merged.dim) {
      throw Error("embedding shard " + path.string() + " has dim " + std::to_string(part.dim) + ", expected " +
                  std::to_string(merged.dim));
    }
    for (const auto& o : part.occurrences) {
      if (!seen.insert(occurrence_key_string(o)).second) {
        throw Error("duplicate occurrence key in " + path.string() + ": " + occurrence_key_string(o));
      }
    }
    merged.occurrences.insert(merged.occurrences.end(), std::make_move_iterator(part.occurrences.begin()),
                              std::make_move_iterator(part.occurrences.end()));
    merged.values.insert(merged.values.end(), part.values.begin(), part.values.end());
  }
  return merged;
}

RepresentativeShard read_representative_shards(const std::vector<std::filesystem::path>& paths) {
  RepresentativeShard merged;
  std::set<std::string> seen;
  bool first = true;
  for (const auto& path : paths) {
    auto in = open_binary(path);
    RepresentativeShard part = read_representative_shard(in);
    if (first) {
      merged.reps_per_occurrence = part.reps_per_occurrence;
      merged.substitutes_per_rep = part.substitutes_per_rep;
      first = false;
    } else if (part.reps_per_occurrence != merged.reps_per_occurrence ||
               part.substitutes_per_rep != merged.substitutes_per_rep) {
      throw Error("representative shard " + path.string() + " has a different representative shape");
    }
    std::vector<std::uint32_t> remap(part.vocabulary.size());
    for (std::size_t i = 0; i < part.vocabulary.size(); ++i) remap[i] = merged.intern(part.vocabulary[i]);
    for (const auto& o : part.occurrences) {
      if (!seen.insert(occurrence_key_string(o)).second) {
        throw Error("duplicate occurrence key in " + path.string() + ": " + occurrence_key_string(o));
      }
    }
    for (auto id : part.substitutes) merged.substitutes.push_back(remap[id]);
    merged.occurrences.insert(merged.occurrences.end(), std::make_move_iterator(part.occurrences.begin()),
                              std::make_move_iterator(part.occurrences.end()));
  }
  return merged;
}

std::vector<std::filesystem::path> list_shard_files(const std::filesystem::path& dir, const std::string& extension) {
  if (!std::filesystem::is_directory(dir)) throw Error("shard directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace lexvar
