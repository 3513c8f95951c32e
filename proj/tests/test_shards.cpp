#include <filesystem>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "doctest.h"
#include "lexvar/shards.hpp"
#include "lexvar/util.hpp"

using namespace lexvar;
namespace fs = std::filesystem;

namespace {

EmbeddingShard make_embeddings(std::size_t n, std::uint32_t dim, std::size_t offset = 0) {
  EmbeddingShard shard;
  shard.dim = dim;
  Rng rng(offset + 1);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.normal());
    const auto id = offset + i;
    shard.add({"w" + std::to_string(id % 7), "s" + std::to_string(id % 3), "c" + std::to_string(id),
               static_cast<std::uint32_t>(id % 5), "u" + std::to_string(id % 11)},
              v);
  }
  return shard;
}

RepresentativeShard make_reps(std::size_t n, std::size_t offset, const std::string& prefix) {
  RepresentativeShard shard;
  shard.reps_per_occurrence = 2;
  shard.substitutes_per_rep = 3;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = offset + i;
    shard.add({"w", "s", "c" + std::to_string(id), 0, "u"},
              {{prefix + "a", prefix + std::to_string(id % 4), "x"}, {"y", "y", prefix + "b"}});
  }
  return shard;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("lexvar_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> expand(const RepresentativeShard& s, std::size_t occ) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < s.reps_per_occurrence; ++r) {
    for (auto id : s.representative(occ, r)) out.push_back(s.vocabulary[id]);
  }
  return out;
}

}  // namespace

TEST_CASE("single-entry embedding shard round-trips") {
  const auto shard = make_embeddings(1, 3);
  std::stringstream ss;
  write_embedding_shard(ss, shard);
  const auto back = read_embedding_shard(ss);
  CHECK(back.dim == 3);
  REQUIRE(back.size() == 1);
  CHECK(back.occurrences[0] == shard.occurrences[0]);
  CHECK(back.occurrences[0].user == shard.occurrences[0].user);
  CHECK(back.values == shard.values);
}

TEST_CASE("empty shards round-trip") {
  EmbeddingShard e;
  e.dim = 8;
  std::stringstream ss;
  write_embedding_shard(ss, e);
  const auto back = read_embedding_shard(ss);
  CHECK(back.size() == 0);
  CHECK(back.dim == 8);
  RepresentativeShard r;
  std::stringstream rs;
  write_representative_shard(rs, r);
  CHECK(read_representative_shard(rs).size() == 0);
}

TEST_CASE("header layout") {
  const auto shard = make_embeddings(2, 4);
  std::stringstream ss;
  write_embedding_shard(ss, shard);
  const auto bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "EMBS");
  CHECK(static_cast<unsigned char>(bytes[4]) == kShardVersion);
  CHECK(static_cast<unsigned char>(bytes[8]) == 4);  // dim, little-endian
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // count
  // The string table starts right after 2 records of 24 + 16 bytes.
  CHECK(static_cast<unsigned char>(bytes[20]) == 28 + 2 * 40);
}

TEST_CASE("10k entries split across files merge back") {
  const auto dir = temp_dir("split");
  const auto all = make_embeddings(10000, 4);
  std::vector<fs::path> paths;
  for (std::size_t part = 0; part < 3; ++part) {
    EmbeddingShard piece;
    piece.dim = 4;
    for (std::size_t i = part; i < all.size(); i += 3) piece.add(all.occurrences[i], all.vector(i));
    paths.push_back(dir / ("p" + std::to_string(part) + ".embs"));
    write_embedding_shard(paths.back(), piece);
  }
  CHECK(list_shard_files(dir, ".embs") == paths);
  const auto merged = read_embedding_shards(paths);
  REQUIRE(merged.size() == 10000);
  std::map<std::string, std::vector<float>> by_key;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto v = merged.vector(i);
    by_key[occurrence_key_string(merged.occurrences[i])] = {v.begin(), v.end()};
  }
  for (std::size_t i = 0; i < all.size(); i += 997) {
    const auto v = all.vector(i);
    CHECK(by_key.at(occurrence_key_string(all.occurrences[i])) == std::vector<float>(v.begin(), v.end()));
  }
  fs::remove_all(dir);
}

TEST_CASE("duplicate keys across files are rejected") {
  const auto dir = temp_dir("dup");
  const auto shard = make_embeddings(3, 2);
  write_embedding_shard(dir / "a.embs", shard);
  write_embedding_shard(dir / "b.embs", shard);
  CHECK_THROWS_AS(read_embedding_shards({dir / "a.embs", dir / "b.embs"}), Error);
  EmbeddingShard other = make_embeddings(1, 5, 100);
  write_embedding_shard(dir / "c.embs", other);
  CHECK_THROWS_AS(read_embedding_shards({dir / "a.embs", dir / "c.embs"}), Error);
  fs::remove_all(dir);
}

TEST_CASE("corrupt shards are rejected") {
  const auto shard = make_embeddings(3, 2);
  std::stringstream ss;
  write_embedding_shard(ss, shard);
  const auto bytes = ss.str();
  {
    std::stringstream bad("XXXX" + bytes.substr(4));
    CHECK_THROWS_AS(read_embedding_shard(bad), Error);
  }
  {
    std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_embedding_shard(truncated), Error);
  }
  {
    auto poisoned = bytes;
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(&poisoned[28 + 24], &nan, 4);
    std::stringstream in(poisoned);
    CHECK_THROWS_AS(read_embedding_shard(in), Error);
  }
  {
    auto version = bytes;
    version[4] = 9;
    std::stringstream in(version);
    CHECK_THROWS_AS(read_embedding_shard(in), Error);
  }
}

TEST_CASE("representative shards merge with remapped vocabularies") {
  const auto dir = temp_dir("reps");
  const auto a = make_reps(5, 0, "p");
  const auto b = make_reps(4, 5, "q");
  write_representative_shard(dir / "a.reps", a);
  write_representative_shard(dir / "b.reps", b);
  {
    std::ifstream in(dir / "a.reps", std::ios::binary);
    std::string magic(4, '\0');
    in.read(magic.data(), 4);
    CHECK(magic == "REPS");
  }
  const auto merged = read_representative_shards({dir / "a.reps", dir / "b.reps"});
  REQUIRE(merged.size() == 9);
  CHECK(merged.reps_per_occurrence == 2);
  for (std::size_t i = 0; i < 5; ++i) CHECK(expand(merged, i) == expand(a, i));
  for (std::size_t i = 0; i < 4; ++i) CHECK(expand(merged, 5 + i) == expand(b, i));
  fs::remove_all(dir);
}

TEST_CASE("sense models round-trip and match identically") {
  Rng rng(1);
  Eigen::MatrixXd pts(60, 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) pts(i, j) = rng.normal() + (i < 30 ? 0.0 : 6.0);
  }
  SenseModelFile file;
  file.provenance = "lexvar wsi-train config=0123456789abcdef";
  file.models.push_back(train_kmeans_senses("k", pts, {1.0, 5, 3}, 1));
  file.models.push_back(train_spectral_senses("s", pts, {}, 1));
  std::vector<RepresentativeSet> reps;
  for (int i = 0; i < 20; ++i) {
    const std::string p = i < 10 ? "a" : "b";
    reps.push_back({{p + "1", p + "2"}, {p + "3", p + std::to_string(i % 3)}});
  }
  SubstitutionSenseParams sp;
  sp.reps_per_occurrence = 2;
  sp.max_clusters = 2;
  file.models.push_back(train_substitution_senses("b", reps, sp, 1));

  std::stringstream ss;
  write_sense_models(ss, file);
  CHECK(ss.str().substr(0, 4) == "SNSM");
  const auto back = read_sense_models(ss);
  CHECK(back.provenance == file.provenance);
  REQUIRE(back.models.size() == 3);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(back.models[m].token == file.models[m].token);
    CHECK(back.models[m].method == file.models[m].method);
    CHECK(back.models[m].n_senses == file.models[m].n_senses);
    CHECK(back.models[m].training_labels == file.models[m].training_labels);
  }
  for (Eigen::Index i = 0; i < pts.rows(); i += 7) {
    Eigen::VectorXd row = pts.row(i).transpose();
    const std::span<const double> probe(row.data(), 3);
    CHECK(match_embedding(back.models[0], probe) == match_embedding(file.models[0], probe));
    CHECK(match_spectral(back.models[1], probe) == match_spectral(file.models[1], probe));
  }
  for (const auto& r : reps) CHECK(match_substitution(back.models[2], r) == match_substitution(file.models[2], r));

  std::stringstream bad("SNSX" + ss.str().substr(4));
  CHECK_THROWS_AS(read_sense_models(bad), Error);
}
