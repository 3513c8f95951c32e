#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexvar/config.hpp"
#include "lexvar/ingest.hpp"
#include "lexvar/wsi.hpp"

// Stage runners. Each stage reads the artifacts of earlier stages from
// <out>/<stage>/, checks that they were produced under the same config hash,
// and writes its own artifacts plus config.resolved. Text artifacts start with
// the line "# lexvar <stage> config=<hash>".
namespace lexvar::pipeline {

enum class Stage {
  ingest,
  type_metrics,
  wsi_train,
  wsi_match,
  sense_metrics,
  community,
  glossary_eval,
  semeval,
  regress,
  report,
};

const char* stage_name(Stage stage);
Stage parse_stage(const std::string& name);
const std::vector<Stage>& all_stages();

struct Context {
  Config config;
  std::filesystem::path out;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string hash;
  std::ostream* log = nullptr;
};

/// Validates the config and resolves out, jobs, seed and the hash.
Context make_context(Config config, std::ostream* log = nullptr);

std::filesystem::path stage_dir(const Context& ctx, Stage stage);
/// "lexvar <stage> config=<hash>"
std::string provenance(const Context& ctx, Stage stage);

void run_stage(const Context& ctx, Stage stage);

void run_ingest(const Context& ctx);
void run_type_metrics(const Context& ctx);
void run_wsi_train(const Context& ctx);
void run_wsi_match(const Context& ctx);
void run_sense_metrics(const Context& ctx);
void run_community(const Context& ctx);
void run_glossary_eval(const Context& ctx);
void run_semeval(const Context& ctx);
void run_regress(const Context& ctx);
void run_report(const Context& ctx);

// Upstream readers, exposed for tools that build representations.

/// The sampled canonical corpus written by ingest.
std::vector<Comment> load_sampled_corpus(const Context& ctx);
/// The sense vocabulary written by type-metrics.
std::set<std::string> load_sense_vocab(const Context& ctx);

/// Occurrences of each vocabulary word, bot-filtered per word.
std::map<std::string, std::vector<Occurrence>> collect_occurrences(const std::vector<Comment>& comments,
                                                                   const std::set<std::string>& vocab,
                                                                   BotFilterParams params);

}  // namespace lexvar::pipeline
