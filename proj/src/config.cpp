#include "lexvar/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lexvar/util.hpp"

namespace lexvar {

const std::vector<std::pair<std::string, std::pair<std::string, std::string>>>& Config::schema() {
  static const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> kSchema = {
      {"input", {"", "comma-separated raw comment dumps (line-delimited JSON)"}},
      {"strict", {"false", "abort ingest on the first malformed record"}},
      {"sample_size", {"80000", "comments sampled per community"}},
      {"seed", {"0", "global seed"}},
      {"jobs", {"1", "worker threads"}},
      {"out", {"out", "output directory"}},
      {"type_top_fraction", {"0.2", "share of a community's types scored by the type metrics"}},
      {"type_min_count", {"10", "minimum user count of a scored type"}},
      {"pos_sidecar", {"", "optional JSONL {id, pos} tags for TextRank"}},
      {"sense_top_fraction", {"0.1", "sense vocabulary: top share of types in some community"}},
      {"sense_min_total", {"500", "sense vocabulary: minimum occurrences corpus-wide"}},
      {"sense_min_breadth", {"350", "sense vocabulary: minimum number of communities"}},
      {"bot_window", {"5", "context tokens on each side for bot filtering"}},
      {"bot_min_repeats", {"10", "repeated context windows at or above this count are dropped"}},
      {"wsi_method", {"kmeans", "kmeans, spectral or substitution"}},
      {"wsi_train_size", {"500", "training occurrences sampled per word"}},
      {"kmeans_gamma", {"10000", "penalty per cluster in RSS + gamma k"}},
      {"kmeans_k_max", {"10", "largest k considered"}},
      {"kmeans_n_init", {"10", "k-means restarts per k"}},
      {"spectral_neighbors", {"7", "K of the nearest-neighbour graph"}},
      {"spectral_max_k", {"10", "largest k considered by the eigengap"}},
      {"substitution_max_clusters", {"25", "cluster cap c"}},
      {"substitution_min_fraction", {"0.02", "clusters below this share of representatives are merged"}},
      {"embedding_shards", {"", "directory or comma-separated EMBS files"}},
      {"representative_shards", {"", "directory or comma-separated REPS files"}},
      {"percentile", {"98", "percentile of the pooled scores used as cutoff"}},
      {"cutoff_mode", {"percentile", "percentile (computed) or fixed (type_cutoff / sense_cutoff)"}},
      {"type_cutoff", {"0.3035", "fixed type NPMI cutoff"}},
      {"sense_cutoff", {"0.1799", "fixed sense NPMI cutoff"}},
      {"reply_top_fraction", {"0.2", "share of most active users kept in the reply network"}},
      {"loyalty_min_top_level", {"10", "top-level comments needed for loyalty eligibility"}},
      {"loyalty_share", {"0.5", "share of top-level comments that makes a user loyal"}},
      {"closeness_epsilon", {"1e-7", "closeness approximation error parameter"}},
      {"closeness_pivots", {"5000", "closeness pivot budget"}},
      {"topics", {"", "TSV community -> topic"}},
      {"high_f_topics", {"", "comma-separated topics coded 1 in the topic flag"}},
      {"glossary", {"", "TSV community, term[, definition]"}},
      {"glossary_suggestions", {"0", "high-scoring non-glossary words reported per community"}},
      {"regress_features", {"size,activity,loyalty,density,topic_flag", "profile columns used as regressors"}},
      {"regress_target", {"F", "profile column regressed on the features"}},
      {"semeval_train", {"", "SemEval-style instance XML used for training"}},
      {"semeval_test", {"", "SemEval-style instance XML used for evaluation"}},
      {"semeval_train_key", {"", "sense key of the training instances (labels unused, ids select instances)"}},
      {"semeval_key", {"", "gold key of the test instances (single-sense key if available)"}},
      {"semeval_runs", {"5", "seeded runs per method"}},
      {"semeval_methods", {"kmeans", "comma-separated methods to benchmark"}},
      {"report_top", {"10", "rows per community in the report tables"}},
  };
  return kSchema;
}

Config::Config() {
  for (const auto& [key, entry] : schema()) values_[key] = entry.first;
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  load(in, path.string());
}

void Config::load(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(body.substr(0, eq)));
    try {
      set(key, std::string(trim(body.substr(eq + 1))));
    } catch (const Error& e) {
      throw Error(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Config::apply_environment() {
  for (const auto& [key, entry] : schema()) {
    std::string name = kEnvPrefix;
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(name.c_str())) set(key, v);
  }
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key '" + key + "'");
  return it->second;
}

long long Config::get_int(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error("config key '" + key + "' must be an integer, got '" + v + "'");
  return out;
}

double Config::get_double(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error("config key '" + key + "' must be a number, got '" + v + "'");
  return out;
}

bool Config::get_bool(const std::string& key) const {
  const auto v = to_lower_ascii(get(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("config key '" + key + "' must be true or false, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& part : split(get(key), ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void Config::validate() const {
  const auto positive_int = [&](const char* key) {
    if (get_int(key) <= 0) throw Error(std::string("config key '") + key + "' must be positive");
  };
  const auto fraction = [&](const char* key) {
    const double v = get_double(key);
    if (!(v > 0.0 && v <= 1.0)) throw Error(std::string("config key '") + key + "' must be in (0, 1]");
  };
  for (const char* key : {"sample_size", "jobs", "type_min_count", "sense_min_total", "sense_min_breadth",
                          "bot_window", "bot_min_repeats", "wsi_train_size", "kmeans_k_max", "kmeans_n_init",
                          "spectral_neighbors", "spectral_max_k", "substitution_max_clusters",
                          "loyalty_min_top_level", "closeness_pivots", "semeval_runs", "report_top"}) {
    positive_int(key);
  }
  for (const char* key : {"type_top_fraction", "sense_top_fraction", "reply_top_fraction", "loyalty_share"}) {
    fraction(key);
  }
  if (get_int("seed") < 0) throw Error("config key 'seed' must be non-negative");
  if (get_int("glossary_suggestions") < 0) throw Error("config key 'glossary_suggestions' must be non-negative");
  if (!(get_double("kmeans_gamma") > 0.0)) throw Error("config key 'kmeans_gamma' must be positive");
  if (!(get_double("closeness_epsilon") > 0.0)) throw Error("config key 'closeness_epsilon' must be positive");
  const double p = get_double("percentile");
  if (!(p > 0.0 && p <= 100.0)) throw Error("config key 'percentile' must be in (0, 100]");
  const double m = get_double("substitution_min_fraction");
  if (!(m >= 0.0 && m < 1.0)) throw Error("config key 'substitution_min_fraction' must be in [0, 1)");
  const auto mode = get("cutoff_mode");
  if (mode != "percentile" && mode != "fixed") throw Error("config key 'cutoff_mode' must be percentile or fixed");
  get_double("type_cutoff");
  get_double("sense_cutoff");
  get_bool("strict");
  const auto method = get("wsi_method");
  if (method != "kmeans" && method != "spectral" && method != "substitution") {
    throw Error("config key 'wsi_method' must be kmeans, spectral or substitution");
  }
}

std::string Config::hash() const {
  std::string canonical;
  for (const auto& [key, value] : values_) {
    if (key == "jobs" || key == "out") continue;
    canonical += key;
    canonical += '=';
    canonical += value;
    canonical += '\n';
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical);
  return os.str();
}

void Config::write_resolved(std::ostream& out) const {
  out << "# resolved configuration, hash " << hash() << '\n';
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

}  // namespace lexvar
