#include "lexvar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lexvar/benchmark.hpp"
#include "lexvar/community.hpp"
#include "lexvar/glossary.hpp"
#include "lexvar/lexical.hpp"
#include "lexvar/semantic.hpp"
#include "lexvar/shards.hpp"
#include "lexvar/stats.hpp"
#include "lexvar/util.hpp"

namespace lexvar::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTypeMetrics[] = {"pmi", "npmi", "tfidf", "jsd", "textrank"};

void log(const Context& ctx, Stage stage, const std::string& message) {
  if (ctx.log) *ctx.log << '[' << stage_name(stage) << "] " << message << '\n';
}

// Writes to <name>.partial and renames on commit, so an interrupted stage
// never leaves a complete-looking artifact behind.
class ArtifactWriter {
 public:
  ArtifactWriter(const Context& ctx, Stage stage, const std::string& name, bool binary = false)
      : path_(stage_dir(ctx, stage) / name), partial_(path_.string() + ".partial") {
    fs::create_directories(path_.parent_path());
    out_.open(partial_, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!out_) throw Error("cannot write " + partial_.string());
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw Error("write failed: " + partial_.string());
    fs::rename(partial_, path_);
  }

 private:
  fs::path path_;
  fs::path partial_;
  std::ofstream out_;
};

void begin_stage(const Context& ctx, Stage stage) {
  ArtifactWriter w(ctx, stage, "config.resolved");
  ctx.config.write_resolved(w.stream());
  w.commit();
}

std::string header_line(const Context& ctx, Stage stage) { return "# " + provenance(ctx, stage); }

void check_provenance(const Context& ctx, Stage stage, const fs::path& path, const std::string& found) {
  if (found == provenance(ctx, stage)) return;
  std::string theirs = "no provenance line";
  if (auto at = found.find("config="); at != std::string::npos) theirs = found.substr(at);
  throw Error(path.string() + " was produced under " + theirs + " but the current config hash is " + ctx.hash +
              "; rerun `lexvar " + stage_name(stage) + "`");
}

fs::path upstream_path(const Context& ctx, Stage stage, const std::string& name) {
  auto path = stage_dir(ctx, stage) / name;
  if (!fs::exists(path)) {
    throw Error("missing artifact " + path.string() + "; run `lexvar " + stage_name(stage) + "` first");
  }
  return path;
}

std::ifstream open_upstream(const Context& ctx, Stage stage, const std::string& name) {
  const auto path = upstream_path(ctx, stage, name);
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  check_provenance(ctx, stage, path, first.rfind("# ", 0) == 0 ? first.substr(2) : first);
  in.clear();
  in.seekg(0);
  return in;
}

bool upstream_exists(const Context& ctx, Stage stage, const std::string& name) {
  return fs::exists(stage_dir(ctx, stage) / name);
}

std::ifstream open_input(const std::string& key, const Context& ctx) {
  const auto& value = ctx.config.get(key);
  if (value.empty()) throw Error("config key '" + key + "' is not set");
  std::ifstream in(value);
  if (!in) throw Error("cannot open " + value + " (config key '" + key + "')");
  return in;
}

std::vector<fs::path> shard_paths(const Context& ctx, const std::string& key, const std::string& extension) {
  const auto parts = ctx.config.get_list(key);
  if (parts.empty()) {
    throw Error("config key '" + key + "' is not set; point it at the " + extension +
                " shards produced by the embedder");
  }
  std::vector<fs::path> paths;
  for (const auto& part : parts) {
    if (fs::is_directory(part)) {
      for (auto& p : list_shard_files(part, extension)) paths.push_back(std::move(p));
    } else {
      paths.emplace_back(part);
    }
  }
  if (paths.empty()) throw Error("no " + extension + " files found for config key '" + key + "'");
  return paths;
}

EmbeddingShard load_embeddings(const Context& ctx) {
  return read_embedding_shards(shard_paths(ctx, "embedding_shards", ".embs"));
}

RepresentativeShard load_representatives(const Context& ctx) {
  return read_representative_shards(shard_paths(ctx, "representative_shards", ".reps"));
}

template <typename Shard>
std::unordered_map<std::string, std::size_t> index_shard(const Shard& shard) {
  std::unordered_map<std::string, std::size_t> rows;
  rows.reserve(shard.occurrences.size());
  for (std::size_t i = 0; i < shard.occurrences.size(); ++i) rows.emplace(occurrence_key_string(shard.occurrences[i]), i);
  return rows;
}

std::size_t lookup_row(const std::unordered_map<std::string, std::size_t>& rows, const Occurrence& o) {
  const auto key = occurrence_key_string(o);
  auto it = rows.find(key);
  if (it == rows.end()) throw Error("no representation for occurrence " + key + " in the configured shards");
  return it->second;
}

BotFilterParams bot_params(const Context& ctx) {
  return {static_cast<std::size_t>(ctx.config.get_int("bot_window")),
          static_cast<std::size_t>(ctx.config.get_int("bot_min_repeats"))};
}

KMeansSenseParams kmeans_params(const Config& c) {
  return {c.get_double("kmeans_gamma"), static_cast<std::size_t>(c.get_int("kmeans_k_max")),
          static_cast<std::size_t>(c.get_int("kmeans_n_init"))};
}

SpectralSenseParams spectral_params(const Config& c) {
  SpectralSenseParams p;
  p.neighbors = static_cast<std::size_t>(c.get_int("spectral_neighbors"));
  p.max_k = static_cast<std::size_t>(c.get_int("spectral_max_k"));
  return p;
}

SubstitutionSenseParams substitution_params(const Config& c) {
  SubstitutionSenseParams p;
  p.max_clusters = static_cast<std::size_t>(c.get_int("substitution_max_clusters"));
  p.min_cluster_fraction = c.get_double("substitution_min_fraction");
  return p;
}

std::vector<Comment> load_full_corpus(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::ingest, "full.jsonl");
  return read_canonical_corpus(in);
}

std::vector<ScoreRow> load_scores(const Context& ctx, const std::string& metric) {
  auto in = open_upstream(ctx, Stage::type_metrics, metric + ".tsv");
  return read_score_file(in);
}

std::vector<SenseScore> load_sense_scores(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::sense_metrics, "sense_scores.tsv");
  return read_sense_scores(in);
}

// community -> sorted scored vocabulary, and (community, token) -> users.
struct TypeVocab {
  std::map<std::string, std::vector<std::string>> words;
  std::map<std::pair<std::string, std::string>, std::uint64_t> users;
};

TypeVocab load_type_vocab(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::type_metrics, "vocab.tsv");
  TypeVocab vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw Error("vocab.tsv: expected 3 columns");
    vocab.words[f[0]].push_back(f[1]);
    vocab.users[{f[0], f[1]}] = std::stoull(f[2]);
  }
  for (auto& [community, words] : vocab.words) std::sort(words.begin(), words.end());
  return vocab;
}

std::map<std::string, double> cutoffs_of(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::community, "cutoffs.tsv");
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() >= 2 && f[0] != "mode") out[f[0]] = std::stod(f[1]);
  }
  return out;
}

void copy_stream(std::istream& in, std::ostream& out, bool skip_header) {
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && skip_header && line.rfind("# lexvar ", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    out << line << '\n';
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::type_metrics: return "type-metrics";
    case Stage::wsi_train: return "wsi-train";
    case Stage::wsi_match: return "wsi-match";
    case Stage::sense_metrics: return "sense-metrics";
    case Stage::community: return "community";
    case Stage::glossary_eval: return "glossary-eval";
    case Stage::semeval: return "semeval";
    case Stage::regress: return "regress";
    case Stage::report: return "report";
  }
  return "?";
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> kStages = {Stage::ingest,        Stage::type_metrics, Stage::wsi_train,
                                             Stage::wsi_match,     Stage::sense_metrics, Stage::community,
                                             Stage::glossary_eval, Stage::semeval,      Stage::regress,
                                             Stage::report};
  return kStages;
}

Stage parse_stage(const std::string& name) {
  for (auto s : all_stages()) {
    if (name == stage_name(s)) return s;
  }
  throw Error("unknown stage '" + name + "'");
}

Context make_context(Config config, std::ostream* log) {
  config.validate();
  Context ctx;
  ctx.out = config.get("out");
  ctx.jobs = static_cast<unsigned>(config.get_int("jobs"));
  ctx.seed = static_cast<std::uint64_t>(config.get_int("seed"));
  ctx.hash = config.hash();
  ctx.config = std::move(config);
  ctx.log = log;
  return ctx;
}

fs::path stage_dir(const Context& ctx, Stage stage) { return ctx.out / stage_name(stage); }

std::string provenance(const Context& ctx, Stage stage) {
  return std::string("lexvar ") + stage_name(stage) + " config=" + ctx.hash;
}

void run_stage(const Context& ctx, Stage stage) {
  switch (stage) {
    case Stage::ingest: return run_ingest(ctx);
    case Stage::type_metrics: return run_type_metrics(ctx);
    case Stage::wsi_train: return run_wsi_train(ctx);
    case Stage::wsi_match: return run_wsi_match(ctx);
    case Stage::sense_metrics: return run_sense_metrics(ctx);
    case Stage::community: return run_community(ctx);
    case Stage::glossary_eval: return run_glossary_eval(ctx);
    case Stage::semeval: return run_semeval(ctx);
    case Stage::regress: return run_regress(ctx);
    case Stage::report: return run_report(ctx);
  }
}

std::vector<Comment> load_sampled_corpus(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::ingest, "corpus.jsonl");
  return read_canonical_corpus(in);
}

std::set<std::string> load_sense_vocab(const Context& ctx) {
  auto in = open_upstream(ctx, Stage::type_metrics, "sense_vocab.txt");
  std::set<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    vocab.insert(line);
  }
  return vocab;
}

std::map<std::string, std::vector<Occurrence>> collect_occurrences(const std::vector<Comment>& comments,
                                                                   const std::set<std::string>& vocab,
                                                                   BotFilterParams params) {
  std::map<std::string, std::vector<TokenOccurrence>> raw;
  for (const auto& c : comments) {
    for (std::size_t i = 0; i < c.tokens.size(); ++i) {
      if (vocab.count(c.tokens[i])) raw[c.tokens[i]].push_back({&c, i});
    }
  }
  std::map<std::string, std::vector<Occurrence>> out;
  for (const auto& [token, list] : raw) {
    auto& dst = out[token];
    for (const auto& occ : filter_bot_contexts(list, params)) {
      dst.push_back({token, occ.comment->community, occ.comment->id, static_cast<std::uint32_t>(occ.position),
                     occ.comment->author});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ingest

void run_ingest(const Context& ctx) {
  const auto stage = Stage::ingest;
  const auto inputs = ctx.config.get_list("input");
  if (inputs.empty()) throw Error("config key 'input' is empty; nothing to ingest");
  begin_stage(ctx, stage);

  ParseOptions options;
  options.strict = ctx.config.get_bool("strict");
  std::vector<Comment> comments;
  std::size_t lines = 0, skipped = 0, malformed = 0, duplicates = 0;
  std::unordered_set<std::string> seen;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input " + path);
    CommentStreamParser parser(in, options);
    while (auto c = parser.next()) {
      if (!seen.insert(c->id).second) {
        ++duplicates;
        continue;
      }
      comments.push_back(std::move(*c));
    }
    lines += parser.lines_read();
    skipped += parser.skipped_deleted();
    malformed += parser.errors();
  }
  log(ctx, stage, std::to_string(comments.size()) + " comments from " + std::to_string(lines) + " lines");

  auto slices = group_by_community(std::move(comments));
  const auto n = static_cast<std::size_t>(ctx.config.get_int("sample_size"));

  ArtifactWriter full(ctx, stage, "full.jsonl");
  ArtifactWriter sampled(ctx, stage, "corpus.jsonl");
  full.stream() << header_line(ctx, stage) << '\n';
  sampled.stream() << header_line(ctx, stage) << '\n';
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  for (auto& slice : slices) {
    std::sort(slice.comments.begin(), slice.comments.end(),
              [](const Comment& a, const Comment& b) { return a.id < b.id; });
    for (const auto& c : slice.comments) {
      Comment meta = c;
      meta.tokens.clear();
      write_comment(full.stream(), meta);
    }
    const auto total = slice.comments.size();
    auto sample = sample_community(slice.community, std::move(slice.comments), n,
                                   derive_seed(ctx.seed, "sample/" + slice.community));
    for (const auto& c : sample.comments) write_comment(sampled.stream(), c);
    sizes.emplace_back(total, sample.comments.size());
  }
  full.commit();
  sampled.commit();

  ArtifactWriter stats(ctx, stage, "ingest_stats.tsv");
  auto& s = stats.stream();
  s << header_line(ctx, stage) << '\n';
  s << "lines\t" << lines << "\nskipped_deleted\t" << skipped << "\nmalformed\t" << malformed << "\nduplicates\t"
    << duplicates << "\ncommunities\t" << slices.size() << '\n';
  for (std::size_t i = 0; i < slices.size(); ++i) {
    s << "comments." << slices[i].community << '\t' << sizes[i].first << '\n';
    s << "sampled." << slices[i].community << '\t' << sizes[i].second << '\n';
  }
  stats.commit();
}

// ---------------------------------------------------------------------------
// type-metrics

void run_type_metrics(const Context& ctx) {
  const auto stage = Stage::type_metrics;
  auto slices = group_by_community(load_sampled_corpus(ctx));
  begin_stage(ctx, stage);
  const auto table = build_frequency_table(slices);

  PosSidecar pos;
  const bool have_pos = !ctx.config.get("pos_sidecar").empty();
  if (have_pos) {
    auto in = open_input("pos_sidecar", ctx);
    pos = read_pos_sidecar(in);
  }

  const TypeVocabParams vp{ctx.config.get_double("type_top_fraction"),
                           static_cast<std::uint64_t>(ctx.config.get_int("type_min_count"))};
  struct Result {
    std::vector<std::string> vocab;
    std::vector<ScoreRow> rows[5];
  };
  std::vector<Result> results(slices.size());
  parallel_for(slices.size(), ctx.jobs, [&](std::size_t i) {
    const auto& community = slices[i].community;
    auto& r = results[i];
    r.vocab = select_type_vocab(table, community, vp);
    for (const auto& t : r.vocab) {
      const auto pmi = score_pmi_npmi(table, community, t);
      r.rows[0].push_back({community, t, pmi.pmi});
      r.rows[1].push_back({community, t, pmi.npmi});
      r.rows[2].push_back({community, t, score_tfidf(table, community, t)});
      try {
        r.rows[3].push_back({community, t, score_jsd(table, community, t)});
      } catch (const UndefinedScore&) {
      }
    }
    const auto textrank = score_textrank(slices[i], have_pos ? &pos : nullptr);
    for (const auto& t : r.vocab) {
      if (auto it = textrank.find(t); it != textrank.end()) r.rows[4].push_back({community, t, it->second});
    }
  });

  for (std::size_t m = 0; m < 5; ++m) {
    std::vector<ScoreRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.rows[m].begin(), r.rows[m].end());
    ArtifactWriter w(ctx, stage, std::string(kTypeMetrics[m]) + ".tsv");
    write_score_file(w.stream(), kTypeMetrics[m], std::move(rows), provenance(ctx, stage));
    w.commit();
  }

  ArtifactWriter vocab(ctx, stage, "vocab.tsv");
  vocab.stream() << header_line(ctx, stage) << '\n';
  std::size_t scored = 0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    for (const auto& t : results[i].vocab) {
      vocab.stream() << slices[i].community << '\t' << t << '\t' << table.count(slices[i].community, t) << '\n';
      ++scored;
    }
  }
  vocab.commit();

  const SenseVocabParams sp{ctx.config.get_double("sense_top_fraction"),
                            static_cast<std::uint64_t>(ctx.config.get_int("sense_min_total")),
                            static_cast<std::uint64_t>(ctx.config.get_int("sense_min_breadth"))};
  const auto sense_vocab = select_sense_vocab(table, count_token_occurrences(slices), sp);
  ArtifactWriter sv(ctx, stage, "sense_vocab.txt");
  sv.stream() << header_line(ctx, stage) << '\n';
  for (const auto& t : sense_vocab) sv.stream() << t << '\n';
  sv.commit();
  log(ctx, stage, std::to_string(scored) + " scored (community, word) pairs, " + std::to_string(sense_vocab.size()) +
                      " words in the sense vocabulary");
}

// ---------------------------------------------------------------------------
// wsi-train / wsi-match

void run_wsi_train(const Context& ctx) {
  const auto stage = Stage::wsi_train;
  const auto method = parse_wsi_method(ctx.config.get("wsi_method"));
  const auto vocab = load_sense_vocab(ctx);
  const auto comments = load_sampled_corpus(ctx);
  if (vocab.empty()) throw Error("the sense vocabulary is empty; relax the sense_* thresholds and rerun type-metrics");
  begin_stage(ctx, stage);

  const auto occurrences = collect_occurrences(comments, vocab, bot_params(ctx));
  const bool embedding = method != WsiMethod::substitution;
  EmbeddingShard emb;
  RepresentativeShard reps;
  if (embedding) {
    emb = load_embeddings(ctx);
  } else {
    reps = load_representatives(ctx);
  }
  const auto rows = embedding ? index_shard(emb) : index_shard(reps);
  log(ctx, stage, "loaded " + std::to_string(rows.size()) + " representations");

  const std::vector<std::string> tokens(vocab.begin(), vocab.end());
  const auto train_size = static_cast<std::size_t>(ctx.config.get_int("wsi_train_size"));
  const auto kp = kmeans_params(ctx.config);
  const auto spp = spectral_params(ctx.config);
  const auto sbp = substitution_params(ctx.config);

  std::vector<std::optional<SenseModel>> models(tokens.size());
  std::vector<std::vector<SenseAssignment>> training(tokens.size());
  std::vector<std::string> skipped(tokens.size());
  parallel_for(tokens.size(), ctx.jobs, [&](std::size_t i) {
    const auto& token = tokens[i];
    auto it = occurrences.find(token);
    if (it == occurrences.end() || it->second.empty()) {
      skipped[i] = "no occurrences left after bot filtering";
      return;
    }
    const auto seed = derive_seed(ctx.seed, "wsi/" + token);
    const auto sample = sample_training_occurrences(token, it->second, train_size, seed);
    if (method == WsiMethod::spectral && sample.size() <= spp.neighbors) {
      skipped[i] = "fewer occurrences than spectral_neighbors + 1";
      return;
    }
    std::vector<std::size_t> sample_rows;
    sample_rows.reserve(sample.size());
    for (const auto& o : sample) sample_rows.push_back(lookup_row(rows, o));
    switch (method) {
      case WsiMethod::kmeans:
        models[i] = train_kmeans_senses(token, gather_points(emb, sample_rows), kp, seed);
        break;
      case WsiMethod::spectral:
        models[i] = train_spectral_senses(token, gather_points(emb, sample_rows), spp, seed);
        break;
      case WsiMethod::substitution:
        models[i] = train_substitution_senses(token, reps, sample_rows, sbp, seed);
        break;
    }
    for (std::size_t j = 0; j < sample.size(); ++j) training[i].push_back({sample[j], models[i]->training_labels[j]});
  });

  SenseModelFile file;
  file.provenance = provenance(ctx, stage);
  ArtifactWriter stats(ctx, stage, "wsi_stats.tsv");
  stats.stream() << header_line(ctx, stage) << '\n' << "token\toccurrences\ttrained_on\tsenses\n";
  std::vector<SenseAssignment> assignments;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = occurrences.find(tokens[i]);
    const std::size_t n_occ = it == occurrences.end() ? 0 : it->second.size();
    if (!models[i]) {
      log(ctx, stage, "skipping '" + tokens[i] + "': " + skipped[i]);
      stats.stream() << tokens[i] << '\t' << n_occ << "\t0\t0\n";
      continue;
    }
    stats.stream() << tokens[i] << '\t' << n_occ << '\t' << training[i].size() << '\t' << models[i]->n_senses << '\n';
    file.models.push_back(std::move(*models[i]));
    assignments.insert(assignments.end(), training[i].begin(), training[i].end());
  }
  stats.commit();

  ArtifactWriter models_out(ctx, stage, "models.bin", true);
  write_sense_models(models_out.stream(), file);
  models_out.commit();
  ArtifactWriter train_out(ctx, stage, "training.tsv");
  write_assignments(train_out.stream(), assignments, provenance(ctx, stage));
  train_out.commit();
  log(ctx, stage, std::to_string(file.models.size()) + " sense models (" + to_string(method) + ")");
}

void run_wsi_match(const Context& ctx) {
  const auto stage = Stage::wsi_match;
  const auto models_path = upstream_path(ctx, Stage::wsi_train, "models.bin");
  std::ifstream min(models_path, std::ios::binary);
  if (!min) throw Error("cannot open " + models_path.string());
  const auto file = read_sense_models(min);
  check_provenance(ctx, Stage::wsi_train, models_path, file.provenance);
  const auto comments = load_sampled_corpus(ctx);
  begin_stage(ctx, stage);

  std::set<std::string> vocab;
  for (const auto& m : file.models) vocab.insert(m.token);
  const auto occurrences = collect_occurrences(comments, vocab, bot_params(ctx));
  const auto method = parse_wsi_method(ctx.config.get("wsi_method"));
  const bool embedding = method != WsiMethod::substitution;
  EmbeddingShard emb;
  RepresentativeShard reps;
  if (embedding) {
    emb = load_embeddings(ctx);
  } else {
    reps = load_representatives(ctx);
  }
  const auto rows = embedding ? index_shard(emb) : index_shard(reps);

  std::vector<std::vector<SenseAssignment>> matched(file.models.size());
  parallel_for(file.models.size(), ctx.jobs, [&](std::size_t i) {
    const auto& model = file.models[i];
    if (model.method != method) throw Error("model for '" + model.token + "' was trained with another method");
    auto it = occurrences.find(model.token);
    if (it == occurrences.end()) return;
    for (const auto& o : it->second) {
      const auto row = lookup_row(rows, o);
      SenseId sense = 0;
      switch (method) {
        case WsiMethod::kmeans: sense = match_embedding(model, emb.vector(row)); break;
        case WsiMethod::spectral: sense = match_spectral(model, emb.vector(row)); break;
        case WsiMethod::substitution: sense = match_substitution(model, reps, row); break;
      }
      matched[i].push_back({o, sense});
    }
  });

  std::vector<SenseAssignment> all;
  for (auto& list : matched) all.insert(all.end(), list.begin(), list.end());
  std::sort(all.begin(), all.end(), [](const SenseAssignment& a, const SenseAssignment& b) {
    return occurrence_key_less(a.occurrence, b.occurrence);
  });
  ArtifactWriter w(ctx, stage, "assignments.tsv");
  write_assignments(w.stream(), all, provenance(ctx, stage));
  w.commit();
  log(ctx, stage, std::to_string(all.size()) + " occurrences assigned");
}

// ---------------------------------------------------------------------------
// sense-metrics

void run_sense_metrics(const Context& ctx) {
  const auto stage = Stage::sense_metrics;
  auto in = open_upstream(ctx, Stage::wsi_match, "assignments.tsv");
  const auto assignments = read_assignments(in);
  begin_stage(ctx, stage);
  const auto table = count_sense_users(assignments);
  const auto scores = score_all_words(table, ctx.config.get("wsi_method"));
  ArtifactWriter w(ctx, stage, "sense_scores.tsv");
  write_sense_scores(w.stream(), scores, provenance(ctx, stage));
  w.commit();
  log(ctx, stage, std::to_string(scores.size()) + " (community, word) sense scores");
}

// ---------------------------------------------------------------------------
// community

void run_community(const Context& ctx) {
  const auto stage = Stage::community;
  const auto full = load_full_corpus(ctx);
  auto sampled = group_by_community(load_sampled_corpus(ctx));
  const auto npmi = to_score_map(load_scores(ctx, "npmi"));
  const auto vocab = load_type_vocab(ctx);
  const auto sense_rows = load_sense_scores(ctx);
  std::map<std::string, std::string> topics;
  if (!ctx.config.get("topics").empty()) {
    auto in = open_input("topics", ctx);
    topics = read_topic_map(in);
  }
  const auto high_f = ctx.config.get_list("high_f_topics");
  begin_stage(ctx, stage);

  ScoreMap sense;
  std::vector<double> type_values, sense_values;
  for (const auto& r : sense_rows) {
    sense[r.community][r.token] = r.value;
    sense_values.push_back(r.value);
  }
  for (const auto& [c, m] : npmi) {
    for (const auto& [t, v] : m) type_values.push_back(v);
  }
  double type_cutoff = ctx.config.get_double("type_cutoff");
  double sense_cutoff = ctx.config.get_double("sense_cutoff");
  const auto mode = ctx.config.get("cutoff_mode");
  if (mode == "percentile") {
    const double p = ctx.config.get_double("percentile");
    if (type_values.empty()) throw Error("no type NPMI scores to derive a cutoff from");
    if (sense_values.empty()) throw Error("no sense scores to derive a cutoff from");
    type_cutoff = percentile_cutoff(type_values, p);
    sense_cutoff = percentile_cutoff(sense_values, p);
  }

  const LoyaltyParams lp{static_cast<std::uint64_t>(ctx.config.get_int("loyalty_min_top_level")),
                         ctx.config.get_double("loyalty_share")};
  const auto loyalty = compute_loyalty(full, lp);
  auto full_slices = group_by_community(full);
  std::map<std::string, const CorpusSlice*> sampled_by;
  for (const auto& s : sampled) sampled_by[s.community] = &s;

  const double reply_top = ctx.config.get_double("reply_top_fraction");
  const ClosenessParams cp{ctx.config.get_double("closeness_epsilon"),
                           static_cast<std::size_t>(ctx.config.get_int("closeness_pivots"))};
  struct Result {
    CommunityProfile profile;
    ReplyGraph graph;
    std::vector<double> closeness;
    std::vector<UserUsage> usage;
  };
  std::vector<Result> results(full_slices.size());
  static const std::map<std::string, double> kEmpty;
  parallel_for(full_slices.size(), ctx.jobs, [&](std::size_t i) {
    const auto& slice = full_slices[i];
    const auto& name = slice.community;
    auto& r = results[i];
    const auto us = compute_user_stats(slice.comments);
    r.graph = build_reply_network(slice.comments, reply_top);
    r.closeness = approx_closeness(r.graph, cp, derive_seed(ctx.seed, "closeness/" + name));

    const auto tv = npmi.find(name);
    const auto sv = sense.find(name);
    const auto& type_map = tv == npmi.end() ? kEmpty : tv->second;
    const auto& sense_map = sv == sense.end() ? kEmpty : sv->second;
    const auto wv = vocab.words.find(name);
    const std::vector<std::string> words = wv == vocab.words.end() ? std::vector<std::string>{} : wv->second;
    const auto d = distinctiveness_F(words, type_map, sense_map, type_cutoff, sense_cutoff);

    auto& p = r.profile;
    p.community = name;
    p.size = us.size;
    p.activity = us.activity;
    if (auto it = loyalty.fraction.find(name); it != loyalty.fraction.end()) p.loyalty = it->second;
    p.density = network_density(r.graph);
    p.F = d.F;
    p.F_type = d.type_only;
    p.F_sense = d.sense_only;
    if (auto it = topics.find(name); it != topics.end()) p.topic = it->second;
    p.topic_flag = !p.topic.empty() && std::find(high_f.begin(), high_f.end(), p.topic) != high_f.end();

    std::set<std::string> specific;
    for (const auto& [t, v] : type_map) {
      if (v > type_cutoff) specific.insert(t);
    }
    for (const auto& [t, v] : sense_map) {
      if (v > sense_cutoff) specific.insert(t);
    }
    if (auto it = sampled_by.find(name); it != sampled_by.end()) {
      r.usage = user_word_usage(name, it->second->comments, specific, loyalty);
    }
  });

  std::vector<CommunityProfile> profiles;
  for (const auto& r : results) profiles.push_back(r.profile);
  ArtifactWriter pw(ctx, stage, "profiles.tsv");
  write_profiles(pw.stream(), profiles, provenance(ctx, stage));
  pw.commit();

  ArtifactWriter cw(ctx, stage, "cutoffs.tsv");
  cw.stream() << header_line(ctx, stage) << '\n'
              << "mode\t" << mode << '\n'
              << "type_cutoff\t" << format_double(type_cutoff) << '\n'
              << "sense_cutoff\t" << format_double(sense_cutoff) << '\n';
  cw.commit();

  ArtifactWriter clw(ctx, stage, "closeness.tsv");
  clw.stream() << header_line(ctx, stage) << '\n' << "community\tuser\tdegree\tcloseness\n";
  for (const auto& r : results) {
    for (std::size_t v = 0; v < r.graph.nodes.size(); ++v) {
      clw.stream() << r.profile.community << '\t' << r.graph.nodes[v] << '\t' << r.graph.adjacency[v].size() << '\t'
                   << format_double(r.closeness[v]) << '\n';
    }
  }
  clw.commit();

  ArtifactWriter uw(ctx, stage, "user_usage.tsv");
  uw.stream() << header_line(ctx, stage) << '\n' << "community\tuser\tcomments\tloyal\tprobability\n";
  for (const auto& r : results) {
    for (const auto& u : r.usage) {
      uw.stream() << u.community << '\t' << u.user << '\t' << u.comments << '\t' << (u.loyal ? 1 : 0) << '\t'
                  << format_double(u.probability) << '\n';
    }
  }
  uw.commit();
  log(ctx, stage, std::to_string(profiles.size()) + " community profiles; cutoffs " + format_double(type_cutoff) +
                      " (type), " + format_double(sense_cutoff) + " (sense)");
}

// ---------------------------------------------------------------------------
// glossary-eval

void run_glossary_eval(const Context& ctx) {
  const auto stage = Stage::glossary_eval;
  GlossaryLoadStats gstats;
  auto gin = open_input("glossary", ctx);
  auto glossaries = load_glossaries(gin, &gstats);
  const auto slices = group_by_community(load_sampled_corpus(ctx));
  std::vector<std::pair<std::string, ScoreMap>> metrics;
  for (const char* m : kTypeMetrics) metrics.emplace_back(m, to_score_map(load_scores(ctx, m)));
  if (upstream_exists(ctx, Stage::sense_metrics, "sense_scores.tsv")) {
    ScoreMap sense;
    for (const auto& r : load_sense_scores(ctx)) sense[r.community][r.token] = r.value;
    metrics.emplace_back("sense-npmi", std::move(sense));
  } else {
    log(ctx, stage, "no sense scores found; evaluating type metrics only");
  }
  begin_stage(ctx, stage);

  const auto table = build_frequency_table(slices);
  std::vector<std::string> unknown;
  for (auto it = glossaries.begin(); it != glossaries.end();) {
    if (table.has_community(it->first)) {
      ++it;
    } else {
      unknown.push_back(it->first);
      it = glossaries.erase(it);
    }
  }
  if (glossaries.empty()) throw Error("no glossary community occurs in the corpus");
  flag_absent_terms(glossaries, table);

  const double p = ctx.config.get_double("percentile");
  ArtifactWriter w(ctx, stage, "glossary_eval.tsv");
  w.stream() << header_line(ctx, stage) << '\n'
             << "metric\tmrr\tmedian_glossary\tmedian_non_glossary\tpct_above_cutoff\tcutoff\tn_glossary\t"
                "n_non_glossary\n";
  for (const auto& [name, scores] : metrics) {
    std::vector<double> pooled;
    for (const auto& [c, m] : scores) {
      for (const auto& [t, v] : m) pooled.push_back(v);
    }
    if (pooled.empty()) continue;
    const double cutoff = percentile_cutoff(pooled, p);
    const auto cov = glossary_coverage(scores, glossaries, cutoff);
    w.stream() << name << '\t' << format_double(glossary_mrr(scores, glossaries)) << '\t'
               << format_double(cov.median_glossary) << '\t' << format_double(cov.median_non_glossary) << '\t'
               << format_double(cov.pct_above_cutoff) << '\t' << format_double(cutoff) << '\t' << cov.n_glossary
               << '\t' << cov.n_non_glossary << '\n';
  }
  w.commit();

  ArtifactWriter sw(ctx, stage, "glossary_stats.tsv");
  auto& s = sw.stream();
  s << header_line(ctx, stage) << '\n'
    << "entries\t" << gstats.entries << "\ndropped_multiword\t" << gstats.dropped_multiword << "\nduplicates\t"
    << gstats.duplicates << "\ncommunities\t" << glossaries.size() << '\n';
  for (const auto& c : unknown) s << "community_not_in_corpus\t" << c << '\n';
  for (const auto& [c, g] : glossaries) {
    for (const auto& t : g.absent_from_corpus) s << "absent_term\t" << c << '\t' << t << '\n';
  }
  sw.commit();

  const auto per = static_cast<std::size_t>(ctx.config.get_int("glossary_suggestions"));
  if (per > 0) {
    ArtifactWriter gw(ctx, stage, "suggestions.tsv");
    gw.stream() << header_line(ctx, stage) << '\n' << "community\ttoken\tnpmi\n";
    for (const auto& sg : glossary_suggestions(metrics[1].second, glossaries, per)) {
      gw.stream() << sg.community << '\t' << sg.token << '\t' << format_double(sg.value) << '\n';
    }
    gw.commit();
  }
  log(ctx, stage, std::to_string(glossaries.size()) + " glossaries evaluated");
}

// ---------------------------------------------------------------------------
// semeval

void run_semeval(const Context& ctx) {
  const auto stage = Stage::semeval;
  std::map<std::string, std::string> gold;
  {
    auto in = open_input("semeval_key", ctx);
    gold = read_sense_key(in);
  }
  KeyLoadStats test_stats, train_stats;
  std::vector<LabeledInstance> test, train;
  {
    auto in = open_input("semeval_test", ctx);
    test = read_semeval_instances(in, gold, &test_stats);
  }
  {
    std::map<std::string, std::string> train_key;
    const bool keyed = !ctx.config.get("semeval_train_key").empty();
    if (keyed) {
      auto kin = open_input("semeval_train_key", ctx);
      train_key = read_sense_key(kin);
    }
    auto in = open_input("semeval_train", ctx);
    train = read_semeval_instances(in, train_key, &train_stats, !keyed);
  }
  if (test.empty()) throw Error("no keyed test instances");
  begin_stage(ctx, stage);

  std::vector<WsiMethod> methods;
  for (const auto& m : ctx.config.get_list("semeval_methods")) methods.push_back(parse_wsi_method(m));
  if (methods.empty()) throw Error("config key 'semeval_methods' is empty");
  const bool need_emb = std::any_of(methods.begin(), methods.end(), [](WsiMethod m) { return m != WsiMethod::substitution; });
  const bool need_reps = std::any_of(methods.begin(), methods.end(), [](WsiMethod m) { return m == WsiMethod::substitution; });
  EmbeddingShard emb;
  RepresentativeShard reps;
  if (need_emb) emb = load_embeddings(ctx);
  if (need_reps) reps = load_representatives(ctx);
  const ProtocolData data{need_emb ? &emb : nullptr, need_reps ? &reps : nullptr};

  ProtocolParams params;
  params.train_cap = static_cast<std::size_t>(ctx.config.get_int("wsi_train_size"));
  params.kmeans = kmeans_params(ctx.config);
  params.spectral = spectral_params(ctx.config);
  params.substitution = substitution_params(ctx.config);

  const auto runs = static_cast<std::size_t>(ctx.config.get_int("semeval_runs"));
  std::map<std::string, std::vector<EvaluationScores>> results;
  for (auto m : methods) {
    params.method = m;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto seed = derive_seed(derive_seed(ctx.seed, std::string("semeval/") + to_string(m)), r);
      const auto predicted = run_protocol(train, test, data, params, seed, ctx.jobs);
      results[to_string(m)].push_back(evaluate(test, predicted));
    }
    log(ctx, stage, std::string(to_string(m)) + ": " + std::to_string(runs) + " runs");
  }
  results["MFS"].push_back(evaluate(test, most_frequent_sense_baseline(test)));

  ArtifactWriter w(ctx, stage, "benchmark.tsv");
  w.stream() << header_line(ctx, stage) << '\n';
  write_benchmark_table(w.stream(), results);
  w.commit();

  ArtifactWriter rw(ctx, stage, "runs.tsv");
  rw.stream() << header_line(ctx, stage) << '\n' << "method\trun\tF\tV\tNMI\tB-Cubed\tlemmas\tinstances\n";
  for (const auto& [name, list] : results) {
    for (std::size_t r = 0; r < list.size(); ++r) {
      const auto& e = list[r];
      rw.stream() << name << '\t' << r << '\t' << format_double(e.fscore) << '\t' << format_double(e.v_measure) << '\t'
                  << format_double(e.nmi) << '\t' << format_double(e.bcubed) << '\t' << e.lemmas << '\t'
                  << e.instances << '\n';
    }
  }
  rw.stream() << "# test instances " << test_stats.instances << ", skipped without key "
              << test_stats.skipped_without_key << "; training instances " << train.size() << '\n';
  rw.commit();
}

// ---------------------------------------------------------------------------
// regress

namespace {

std::optional<double> profile_value(const CommunityProfile& p, const std::string& name) {
  if (name == "size") return static_cast<double>(p.size);
  if (name == "activity") return p.activity;
  if (name == "loyalty") return p.loyalty;
  if (name == "density") return p.density;
  if (name == "F") return p.F;
  if (name == "F_type") return p.F_type;
  if (name == "F_sense") return p.F_sense;
  if (name == "topic_flag") return static_cast<double>(p.topic_flag);
  throw Error("unknown profile column '" + name + "'");
}

}  // namespace

void run_regress(const Context& ctx) {
  const auto stage = Stage::regress;
  auto in = open_upstream(ctx, Stage::community, "profiles.tsv");
  const auto profiles = read_profiles(in);
  const auto features = ctx.config.get_list("regress_features");
  const auto target = ctx.config.get("regress_target");
  if (features.empty()) throw Error("config key 'regress_features' is empty");
  begin_stage(ctx, stage);

  std::vector<std::vector<double>> columns(features.size());
  std::vector<double> y;
  std::size_t dropped = 0;
  for (const auto& p : profiles) {
    std::vector<double> row;
    bool complete = true;
    for (const auto& f : features) {
      const auto v = profile_value(p, f);
      if (!v) complete = false;
      row.push_back(v.value_or(0.0));
    }
    const auto t = profile_value(p, target);
    if (!complete || !t) {
      ++dropped;
      continue;
    }
    for (std::size_t j = 0; j < features.size(); ++j) columns[j].push_back(row[j]);
    y.push_back(*t);
  }
  const auto n = y.size();
  if (n == 0) throw Error("no community has every regression feature");

  Eigen::MatrixXd X(n, features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    std::vector<double> col = columns[j];
    if (features[j] != "topic_flag") {
      try {
        col = zscore(col);
      } catch (const Error& e) {
        throw Error("cannot standardize feature '" + features[j] + "': " + e.what());
      }
    }
    for (std::size_t i = 0; i < n; ++i) X(i, j) = col[i];
  }
  const auto result = ols(X, Eigen::Map<const Eigen::VectorXd>(y.data(), n), features);

  ArtifactWriter rw(ctx, stage, "regression.txt");
  rw.stream() << header_line(ctx, stage) << '\n';
  write_regression_report(rw.stream(), result, target + " on standardized community attributes");
  if (dropped) rw.stream() << dropped << " communities dropped for missing values\n";
  rw.commit();

  ArtifactWriter tw(ctx, stage, "regression.tsv");
  tw.stream() << header_line(ctx, stage) << '\n' << "term\tcoefficient\tstd_error\tp_value\n";
  for (std::size_t j = 0; j < result.names.size(); ++j) {
    tw.stream() << result.names[j] << '\t' << format_double(result.coefficients[j]) << '\t'
                << format_double(result.std_errors[j]) << '\t' << format_double(result.p_values[j]) << '\n';
  }
  tw.stream() << "# r2 " << format_double(result.r2) << " adj_r2 " << format_double(result.adj_r2) << " n "
              << result.n << '\n';
  tw.commit();

  // Communities above the median target against the rest.
  const double med = median(y);
  ArtifactWriter uw(ctx, stage, "utests.tsv");
  uw.stream() << header_line(ctx, stage) << '\n' << "feature\tn_high\tn_low\tU\tp\texact\n";
  ArtifactWriter cw(ctx, stage, "correlations.tsv");
  cw.stream() << header_line(ctx, stage) << '\n' << "feature\tpearson\tspearman\n";
  for (std::size_t j = 0; j < features.size(); ++j) {
    std::vector<double> high, low;
    for (std::size_t i = 0; i < n; ++i) (y[i] > med ? high : low).push_back(columns[j][i]);
    if (!high.empty() && !low.empty()) {
      const auto u = mann_whitney_u(high, low);
      uw.stream() << features[j] << '\t' << high.size() << '\t' << low.size() << '\t' << format_double(u.U) << '\t'
                  << format_double(u.p) << '\t' << (u.exact ? "yes" : "no") << '\n';
    }
    try {
      const auto c = correlations(columns[j], y);
      cw.stream() << features[j] << '\t' << format_double(c.pearson) << '\t' << format_double(c.spearman) << '\n';
    } catch (const Error&) {
      cw.stream() << features[j] << "\tNA\tNA\n";
    }
  }
  uw.commit();
  cw.commit();
  log(ctx, stage, "regression over " + std::to_string(n) + " communities, R^2 " + format_double(result.r2));
}

// ---------------------------------------------------------------------------
// report

void run_report(const Context& ctx) {
  const auto stage = Stage::report;
  std::map<std::string, ScoreMap> type;
  for (const char* m : kTypeMetrics) type[m] = to_score_map(load_scores(ctx, m));
  const auto vocab = load_type_vocab(ctx);
  const auto sense_rows = load_sense_scores(ctx);
  auto pin = open_upstream(ctx, Stage::community, "profiles.tsv");
  auto profiles = read_profiles(pin);
  const auto cutoffs = cutoffs_of(ctx);
  auto usage_in = open_upstream(ctx, Stage::community, "user_usage.tsv");
  begin_stage(ctx, stage);
  const auto top = static_cast<std::size_t>(ctx.config.get_int("report_top"));
  const auto value_or_na = [](const ScoreMap& m, const std::string& c, const std::string& t) {
    auto ci = m.find(c);
    if (ci == m.end()) return std::string("NA");
    auto ti = ci->second.find(t);
    return ti == ci->second.end() ? std::string("NA") : format_double(ti->second);
  };
  const auto by_value_desc = [](const std::pair<std::string, double>& a, const std::pair<std::string, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };

  {
    ArtifactWriter w(ctx, stage, "top_type_words.tsv");
    w.stream() << header_line(ctx, stage) << '\n' << "community\trank\ttoken\tusers\tnpmi\tpmi\ttfidf\tjsd\ttextrank\n";
    for (const auto& [community, scores] : type["npmi"]) {
      std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
      std::sort(ranked.begin(), ranked.end(), by_value_desc);
      for (std::size_t i = 0; i < std::min(top, ranked.size()); ++i) {
        const auto& t = ranked[i].first;
        auto u = vocab.users.find({community, t});
        w.stream() << community << '\t' << i + 1 << '\t' << t << '\t' << (u == vocab.users.end() ? 0 : u->second)
                   << '\t' << format_double(ranked[i].second) << '\t' << value_or_na(type["pmi"], community, t) << '\t'
                   << value_or_na(type["tfidf"], community, t) << '\t' << value_or_na(type["jsd"], community, t)
                   << '\t' << value_or_na(type["textrank"], community, t) << '\n';
      }
    }
    w.commit();
  }

  ScoreMap sense;
  std::map<std::pair<std::string, std::string>, SenseId> dominant;
  for (const auto& r : sense_rows) {
    sense[r.community][r.token] = r.value;
    dominant[{r.community, r.token}] = r.dominant_sense;
  }
  {
    ArtifactWriter w(ctx, stage, "top_sense_words.tsv");
    w.stream() << header_line(ctx, stage) << '\n' << "community\trank\ttoken\tdominant_sense\tsense_npmi\ttype_npmi\n";
    for (const auto& [community, scores] : sense) {
      std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
      std::sort(ranked.begin(), ranked.end(), by_value_desc);
      for (std::size_t i = 0; i < std::min(top, ranked.size()); ++i) {
        const auto& t = ranked[i].first;
        w.stream() << community << '\t' << i + 1 << '\t' << t << '\t' << dominant[{community, t}] << '\t'
                   << format_double(ranked[i].second) << '\t' << value_or_na(type["npmi"], community, t) << '\n';
      }
    }
    w.commit();
  }
  {
    ArtifactWriter w(ctx, stage, "type_vs_sense.tsv");
    w.stream() << header_line(ctx, stage) << '\n' << "community\ttoken\ttype_npmi\tsense_npmi\n";
    for (const auto& [community, words] : vocab.words) {
      auto si = sense.find(community);
      if (si == sense.end()) continue;
      for (const auto& t : words) {
        auto s = si->second.find(t);
        if (s == si->second.end()) continue;
        w.stream() << community << '\t' << t << '\t' << value_or_na(type["npmi"], community, t) << '\t'
                   << format_double(s->second) << '\n';
      }
    }
    w.commit();
  }
  {
    ArtifactWriter w(ctx, stage, "usage_by_loyalty.tsv");
    w.stream() << header_line(ctx, stage) << '\n';
    copy_stream(usage_in, w.stream(), true);
    w.commit();
  }

  std::stable_sort(profiles.begin(), profiles.end(),
                   [](const CommunityProfile& a, const CommunityProfile& b) { return a.F > b.F; });
  {
    ArtifactWriter w(ctx, stage, "communities_by_F.tsv");
    write_profiles(w.stream(), profiles, provenance(ctx, stage));
    w.commit();
  }
  if (upstream_exists(ctx, Stage::glossary_eval, "glossary_eval.tsv")) {
    auto in = open_upstream(ctx, Stage::glossary_eval, "glossary_eval.tsv");
    ArtifactWriter w(ctx, stage, "glossary_summary.tsv");
    w.stream() << header_line(ctx, stage) << '\n';
    copy_stream(in, w.stream(), true);
    w.commit();
  }
  if (upstream_exists(ctx, Stage::regress, "regression.txt")) {
    auto in = open_upstream(ctx, Stage::regress, "regression.txt");
    ArtifactWriter w(ctx, stage, "regression.txt");
    w.stream() << header_line(ctx, stage) << '\n';
    copy_stream(in, w.stream(), true);
    w.commit();
  }
  if (upstream_exists(ctx, Stage::semeval, "benchmark.tsv")) {
    auto in = open_upstream(ctx, Stage::semeval, "benchmark.tsv");
    ArtifactWriter w(ctx, stage, "benchmark.tsv");
    w.stream() << header_line(ctx, stage) << '\n';
    copy_stream(in, w.stream(), true);
    w.commit();
  }

  ArtifactWriter w(ctx, stage, "summary.txt");
  auto& s = w.stream();
  s << header_line(ctx, stage) << '\n';
  s << "communities: " << profiles.size() << '\n';
  for (const auto& [k, v] : cutoffs) s << k << ": " << format_double(v) << '\n';
  s << "\ncommunity\tF\tF_type\tF_sense\n";
  for (const auto& p : profiles) {
    s << p.community << '\t' << format_double(p.F) << '\t' << format_double(p.F_type) << '\t'
      << format_double(p.F_sense) << '\n';
  }
  w.commit();
  log(ctx, stage, "report written to " + stage_dir(ctx, stage).string());
}

}  // namespace lexvar::pipeline
