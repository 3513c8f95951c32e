// Command-line front end: one subcommand per pipeline stage plus helpers
// that generate a synthetic corpus and its representation shards.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexvar/config.hpp"
#include "lexvar/pipeline.hpp"
#include "lexvar/shards.hpp"
#include "lexvar/synthetic.hpp"
#include "lexvar/util.hpp"

namespace fs = std::filesystem;
using namespace lexvar;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<long long> seed;
  std::optional<long long> jobs;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config,-c", o.config_path, "config file (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "override a config key: key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--jobs,-j", o.jobs, "worker threads");
  cmd->add_option("--out,-o", o.out, "output directory");
}

Config resolve(const CommonOptions& o) {
  Config config;
  if (!o.config_path.empty()) config.load_file(o.config_path);
  config.apply_environment();
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    config.set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
  }
  if (o.seed) config.set("seed", std::to_string(*o.seed));
  if (o.jobs) config.set("jobs", std::to_string(*o.jobs));
  if (o.out) config.set("out", *o.out);
  return config;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  body(out);
  if (!out) throw Error("write failed: " + path.string());
}

struct SynthOptions {
  std::string dir = "toy";
  std::uint64_t seed = 0;
  synthetic::CorpusSpec spec;
};

void run_synth(const SynthOptions& o) {
  const fs::path dir = fs::absolute(o.dir);
  fs::create_directories(dir);
  const auto corpus = synthetic::generate_corpus(o.spec, o.seed);
  write_file(dir / "raw.jsonl", [&](std::ostream& out) {
    for (const auto& line : corpus.raw_lines) out << line << '\n';
  });
  write_file(dir / "meta.json", [&](std::ostream& out) { synthetic::write_corpus_meta(out, corpus); });
  write_file(dir / "glossary.tsv", [&](std::ostream& out) { synthetic::write_glossary(out, corpus); });
  write_file(dir / "glossary_shuffled.tsv", [&](std::ostream& out) { synthetic::write_shuffled_glossary(out, corpus); });
  write_file(dir / "topics.tsv", [&](std::ostream& out) { synthetic::write_topics(out, corpus); });
  write_file(dir / "lexvar.conf", [&](std::ostream& out) {
    out << "# synthetic corpus with " << o.spec.communities << " communities\n"
        << "input = " << (dir / "raw.jsonl").string() << '\n'
        << "out = " << (dir / "out").string() << '\n'
        << "sense_min_breadth = " << o.spec.communities << '\n'
        << "embedding_shards = " << (dir / "shards").string() << '\n'
        << "representative_shards = " << (dir / "shards").string() << '\n'
        << "glossary = " << (dir / "glossary.tsv").string() << '\n'
        << "glossary_suggestions = 5\n"
        << "topics = " << (dir / "topics.tsv").string() << '\n'
        << "high_f_topics = topic0\n";
    if (o.spec.communities < 8) out << "regress_features = density\n";
  });
  std::cout << "wrote " << corpus.raw_lines.size() << " records to " << dir.string() << '\n';
}

struct EmbedOptions {
  std::string meta;
  std::string dest;
  std::uint32_t dim = 32;
  std::size_t parts = 2;
};

void run_synth_embed(const pipeline::Context& ctx, const EmbedOptions& o) {
  std::ifstream min(o.meta);
  if (!min) throw Error("cannot open " + o.meta);
  const auto corpus = synthetic::read_corpus_meta(min);
  const auto comments = pipeline::load_sampled_corpus(ctx);
  const auto vocab = pipeline::load_sense_vocab(ctx);
  if (o.parts == 0) throw Error("--parts must be positive");
  fs::create_directories(o.dest);

  synthetic::EmbeddingSpec spec;
  spec.dim = o.dim;
  // Comments are split round-robin so every part is a valid shard on its own.
  for (std::size_t part = 0; part < o.parts; ++part) {
    std::vector<Comment> subset;
    for (std::size_t i = part; i < comments.size(); i += o.parts) subset.push_back(comments[i]);
    char name[32];
    std::snprintf(name, sizeof(name), "part-%03zu", part);
    write_embedding_shard(fs::path(o.dest) / (std::string(name) + ".embs"),
                          synthetic::embed_occurrences(corpus, subset, vocab, spec, ctx.seed));
    write_representative_shard(fs::path(o.dest) / (std::string(name) + ".reps"),
                               synthetic::represent_occurrences(corpus, subset, vocab, ctx.seed));
  }
  std::cout << "wrote " << o.parts << " EMBS and REPS shards for " << vocab.size() << " words to " << o.dest << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexvar: community-specific language analysis"};
  app.require_subcommand(1);

  std::vector<std::pair<pipeline::Stage, CLI::App*>> stage_cmds;
  CommonOptions common;
  for (auto stage : pipeline::all_stages()) {
    auto* cmd = app.add_subcommand(pipeline::stage_name(stage), std::string("run the ") + pipeline::stage_name(stage) +
                                                                     " stage");
    add_common(cmd, common);
    stage_cmds.emplace_back(stage, cmd);
  }

  auto* run_cmd = app.add_subcommand("run", "run several stages in order");
  add_common(run_cmd, common);
  std::vector<std::string> run_stages;
  run_cmd->add_option("--stages", run_stages, "stages to run (default: every stage whose inputs are configured)")
      ->delimiter(',');

  auto* config_cmd = app.add_subcommand("config", "print the resolved configuration");
  add_common(config_cmd, common);
  bool describe = false;
  config_cmd->add_flag("--describe", describe, "list every key with its default and meaning");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted jargon and senses");
  synth_cmd->add_option("--dir", synth.dir, "destination directory")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "seed")->capture_default_str();
  synth_cmd->add_option("--communities", synth.spec.communities)->capture_default_str();
  synth_cmd->add_option("--comments", synth.spec.comments_per_community, "comments per community")
      ->capture_default_str();
  synth_cmd->add_option("--users", synth.spec.users_per_community, "users per community")->capture_default_str();
  synth_cmd->add_option("--jargon", synth.spec.jargon_per_community, "jargon words per community")
      ->capture_default_str();

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("synth-embed", "write EMBS/REPS shards for a synthetic corpus");
  add_common(embed_cmd, common);
  embed_cmd->add_option("--meta", embed.meta, "meta.json written by synth")->required();
  embed_cmd->add_option("--dest", embed.dest, "shard directory")->required();
  embed_cmd->add_option("--dim", embed.dim, "vector dimension")->capture_default_str();
  embed_cmd->add_option("--parts", embed.parts, "number of shard files")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      run_synth(synth);
      return 0;
    }
    auto config = resolve(common);
    if (config_cmd->parsed()) {
      if (describe) {
        for (const auto& [key, entry] : Config::schema()) {
          std::cout << key << " = " << entry.first << "    # " << entry.second << '\n';
        }
      } else {
        config.write_resolved(std::cout);
      }
      return 0;
    }
    const auto ctx = pipeline::make_context(std::move(config), &std::clog);
    if (embed_cmd->parsed()) {
      run_synth_embed(ctx, embed);
      return 0;
    }
    for (const auto& [stage, cmd] : stage_cmds) {
      if (cmd->parsed()) {
        pipeline::run_stage(ctx, stage);
        return 0;
      }
    }
    if (run_cmd->parsed()) {
      std::vector<pipeline::Stage> stages;
      if (run_stages.empty()) {
        for (auto s : pipeline::all_stages()) {
          if (s == pipeline::Stage::glossary_eval && ctx.config.get("glossary").empty()) continue;
          if (s == pipeline::Stage::semeval && ctx.config.get("semeval_test").empty()) continue;
          stages.push_back(s);
        }
      } else {
        for (const auto& name : run_stages) stages.push_back(pipeline::parse_stage(name));
      }
      for (auto s : stages) pipeline::run_stage(ctx, s);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "lexvar: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
