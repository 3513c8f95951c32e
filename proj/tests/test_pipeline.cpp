#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lexvar/pipeline.hpp"
#include "lexvar/synthetic.hpp"
#include "lexvar/util.hpp"

using namespace lexvar;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("lexvar_pipe_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
};

pipeline::Context small_context(const Workspace& ws, const std::string& seed = "0") {
  synthetic::CorpusSpec spec;
  spec.comments_per_community = 150;
  spec.users_per_community = 30;
  const auto corpus = synthetic::generate_corpus(spec, 1);
  std::ofstream raw(ws.dir / "raw.jsonl");
  for (const auto& line : corpus.raw_lines) raw << line << '\n';
  raw.close();
  Config c;
  c.set("input", (ws.dir / "raw.jsonl").string());
  c.set("out", (ws.dir / "out").string());
  c.set("seed", seed);
  c.set("sample_size", "100");
  return pipeline::make_context(c);
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("stage names round-trip") {
  for (auto s : pipeline::all_stages()) CHECK(pipeline::parse_stage(pipeline::stage_name(s)) == s);
  CHECK_THROWS_AS(pipeline::parse_stage("train"), Error);
}

TEST_CASE("ingest and type-metrics write provenance-stamped artifacts") {
  Workspace ws("basic");
  const auto ctx = small_context(ws);
  pipeline::run_ingest(ctx);
  const auto ingest_dir = pipeline::stage_dir(ctx, pipeline::Stage::ingest);
  CHECK(first_line(ingest_dir / "corpus.jsonl") == "# lexvar ingest config=" + ctx.hash);
  CHECK(fs::exists(ingest_dir / "config.resolved"));
  CHECK(pipeline::load_sampled_corpus(ctx).size() == 300);

  pipeline::run_type_metrics(ctx);
  const auto tm = pipeline::stage_dir(ctx, pipeline::Stage::type_metrics);
  for (const char* f : {"pmi.tsv", "npmi.tsv", "tfidf.tsv", "jsd.tsv", "textrank.tsv", "vocab.tsv", "sense_vocab.txt"}) {
    CHECK(first_line(tm / f) == "# lexvar type-metrics config=" + ctx.hash);
  }
  CHECK_FALSE(fs::exists(tm / "npmi.tsv.partial"));
}

TEST_CASE("a missing upstream artifact names the stage to run") {
  Workspace ws("missing");
  const auto ctx = small_context(ws);
  try {
    pipeline::run_type_metrics(ctx);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("lexvar ingest") != std::string::npos);
  }
}

TEST_CASE("a config change invalidates downstream stages") {
  Workspace ws("hash");
  const auto ctx = small_context(ws);
  pipeline::run_ingest(ctx);
  const auto other = small_context(ws, "5");
  try {
    pipeline::run_type_metrics(other);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find(ctx.hash) != std::string::npos);
    CHECK(what.find("lexvar ingest") != std::string::npos);
  }
}

TEST_CASE("jobs and out do not change results") {
  Workspace ws("jobs");
  auto ctx = small_context(ws);
  pipeline::run_ingest(ctx);
  pipeline::run_type_metrics(ctx);
  std::ifstream a(pipeline::stage_dir(ctx, pipeline::Stage::type_metrics) / "npmi.tsv");
  const std::string first((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  auto cfg = ctx.config;
  cfg.set("jobs", "3");
  const auto par = pipeline::make_context(cfg);
  CHECK(par.hash == ctx.hash);
  pipeline::run_type_metrics(par);
  std::ifstream b(pipeline::stage_dir(par, pipeline::Stage::type_metrics) / "npmi.tsv");
  const std::string second((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(first == second);
}

TEST_CASE("bot-filtered occurrences") {
  std::vector<Comment> comments(12);
  for (std::size_t i = 0; i < comments.size(); ++i) {
    comments[i].id = "c" + std::to_string(i);
    comments[i].community = "s";
    comments[i].author = "u";
    comments[i].tokens = {"same", "bank", "text"};
  }
  comments[0].tokens = {"river", "bank"};
  const auto occ = pipeline::collect_occurrences(comments, {"bank"}, {5, 10});
  REQUIRE(occ.at("bank").size() == 1);
  CHECK(occ.at("bank")[0].comment_id == "c0");
  CHECK(occ.at("bank")[0].position == 1);
}
