#include "lexvar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

#include "json.hpp"
#include "lexvar/util.hpp"

namespace lexvar::synthetic {
namespace {

using json = nlohmann::json;

const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "gl", "sk"};
const char* const kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::string make_word(Rng& rng, std::size_t syllables) {
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kOnsets[rng.uniform_index(std::size(kOnsets))];
    w += kVowels[rng.uniform_index(std::size(kVowels))];
  }
  return w;
}

// Cumulative weights 1/(i+1)^s for Zipf-like draws.
std::vector<double> zipf_cdf(std::size_t n, double s) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), s);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

Corpus generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  if (spec.communities == 0 || spec.comments_per_community == 0 || spec.users_per_community == 0) {
    throw Error("synthetic corpus needs communities, comments and users");
  }
  if (spec.min_tokens == 0 || spec.max_tokens < spec.min_tokens) throw Error("invalid synthetic comment lengths");
  Corpus corpus;
  corpus.sense_words = spec.sense_words;

  Rng words_rng(derive_seed(seed, "words"));
  std::set<std::string> used(spec.sense_words.begin(), spec.sense_words.end());
  const auto fresh = [&](std::size_t syllables) {
    while (true) {
      auto w = make_word(words_rng, syllables);
      if (used.insert(w).second) return w;
    }
  };
  for (std::size_t i = 0; i < spec.background_words; ++i) corpus.background.push_back(fresh(2 + i % 2));
  for (std::size_t c = 0; c < spec.communities; ++c) {
    const std::string name = "community" + std::to_string(c);
    corpus.communities.push_back(name);
    for (std::size_t j = 0; j < spec.jargon_per_community; ++j) corpus.jargon[name].push_back(fresh(3));
  }

  const auto word_cdf = zipf_cdf(corpus.background.size(), 1.0);
  const auto user_cdf = zipf_cdf(spec.users_per_community, 0.8);
  std::int64_t clock = 1556668800;  // 2019-05-01
  for (std::size_t c = 0; c < spec.communities; ++c) {
    const auto& community = corpus.communities[c];
    Rng rng(derive_seed(seed, community));
    std::vector<std::pair<std::string, std::string>> posted;  // (id, link)
    std::size_t posts = 0;
    for (std::size_t j = 0; j < spec.comments_per_community; ++j) {
      std::string author;
      if (spec.shared_users > 0 && rng.uniform01() < 0.15) {
        author = "shared" + std::to_string(rng.uniform_index(spec.shared_users));
      } else {
        author = "user" + std::to_string(c) + "x" + std::to_string(draw(user_cdf, rng));
      }

      const auto length = spec.min_tokens + rng.uniform_index(spec.max_tokens - spec.min_tokens + 1);
      std::vector<std::string> words;
      for (std::size_t k = 0; k < length; ++k) words.push_back(corpus.background[draw(word_cdf, rng)]);
      const auto& jargon = corpus.jargon[community];
      if (!jargon.empty() && rng.uniform01() < spec.jargon_rate) {
        words[rng.uniform_index(words.size())] = jargon[rng.uniform_index(jargon.size())];
      }
      for (const auto& sw : spec.sense_words) {
        if (rng.uniform01() < spec.sense_word_rate) words[rng.uniform_index(words.size())] = sw;
      }

      std::string body;
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (k > 0) body += ' ';
        std::string w = words[k];
        if (k == 0 && rng.uniform01() < 0.5) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        body += w;
      }
      const double deco = rng.uniform01();
      if (deco < 0.3) {
        body += '.';
      } else if (deco < 0.4) {
        body += " !";
      } else if (deco < 0.45) {
        body += " see https://example.org/" + words[0];
      } else if (deco < 0.5) {
        body += " thanks /u/" + author;
      }

      json record;
      const std::string id = "c" + std::to_string(c) + "n" + std::to_string(j);
      record["id"] = id;
      record["author"] = author;
      record["subreddit"] = community;
      record["created_utc"] = clock;
      clock += 1 + static_cast<std::int64_t>(rng.uniform_index(600));
      if (posted.empty() || rng.uniform01() < spec.top_level_rate) {
        const std::string link = "t3_p" + std::to_string(c) + "x" + std::to_string(posts++);
        record["parent_id"] = link;
        record["link_id"] = link;
        posted.emplace_back(id, link);
      } else {
        const auto& parent = posted[rng.uniform_index(posted.size())];
        record["parent_id"] = "t1_" + parent.first;
        record["link_id"] = parent.second;
        posted.emplace_back(id, parent.second);
      }
      record["body"] = body;
      corpus.raw_lines.push_back(record.dump());
    }
  }
  return corpus;
}

void write_glossary(std::ostream& out, const Corpus& corpus) {
  for (const auto& community : corpus.communities) {
    for (const auto& word : corpus.jargon.at(community)) out << community << '\t' << word << "\tplanted jargon\n";
    out << community << '\t' << corpus.jargon.at(community).front() << " thing\tmulti-word entry\n";
  }
}

void write_shuffled_glossary(std::ostream& out, const Corpus& corpus) {
  const auto n = corpus.communities.size();
  for (std::size_t c = 0; c < n; ++c) {
    const auto& donor = corpus.communities[(c + 1) % n];
    for (const auto& word : corpus.jargon.at(donor)) out << corpus.communities[c] << '\t' << word << '\n';
  }
}

void write_topics(std::ostream& out, const Corpus& corpus) {
  for (std::size_t c = 0; c < corpus.communities.size(); ++c) {
    out << corpus.communities[c] << "\ttopic" << c % 2 << '\n';
  }
}

void write_corpus_meta(std::ostream& out, const Corpus& corpus) {
  json meta;
  meta["communities"] = corpus.communities;
  meta["jargon"] = corpus.jargon;
  meta["background"] = corpus.background;
  meta["sense_words"] = corpus.sense_words;
  out << meta.dump(1) << '\n';
}

Corpus read_corpus_meta(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    const json meta = json::parse(text);
    Corpus corpus;
    corpus.communities = meta.at("communities").get<std::vector<std::string>>();
    corpus.jargon = meta.at("jargon").get<std::map<std::string, std::vector<std::string>>>();
    corpus.background = meta.at("background").get<std::vector<std::string>>();
    corpus.sense_words = meta.at("sense_words").get<std::vector<std::string>>();
    return corpus;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid synthetic corpus metadata: ") + e.what());
  }
}

SenseId planted_sense(const Corpus& corpus, const std::string& community, const std::string& token) {
  if (std::find(corpus.sense_words.begin(), corpus.sense_words.end(), token) == corpus.sense_words.end()) return 0;
  auto it = std::find(corpus.communities.begin(), corpus.communities.end(), community);
  if (it == corpus.communities.end()) return 0;
  return static_cast<SenseId>(it - corpus.communities.begin());
}

EmbeddingShard embed_occurrences(const Corpus& corpus, const std::vector<Comment>& comments,
                                 const std::set<std::string>& vocab, const EmbeddingSpec& spec, std::uint64_t seed) {
  EmbeddingShard shard;
  shard.dim = spec.dim;
  std::map<std::pair<std::string, SenseId>, std::vector<float>> centres;
  std::vector<float> vec(spec.dim);
  for (const auto& c : comments) {
    for (std::size_t p = 0; p < c.tokens.size(); ++p) {
      const auto& token = c.tokens[p];
      if (!vocab.count(token)) continue;
      const auto sense = planted_sense(corpus, c.community, token);
      auto [it, inserted] = centres.try_emplace({token, sense});
      if (inserted) {
        Rng rng(derive_seed(seed, token + '\x1f' + std::to_string(sense)));
        it->second.resize(spec.dim);
        for (auto& x : it->second) x = static_cast<float>(spec.center_scale * rng.normal());
      }
      Occurrence occ{token, c.community, c.id, static_cast<std::uint32_t>(p), c.author};
      Rng noise(derive_seed(seed ^ 0x5eedULL, occurrence_key_string(occ)));
      for (std::uint32_t d = 0; d < spec.dim; ++d) {
        vec[d] = it->second[d] + static_cast<float>(spec.noise * noise.normal());
      }
      shard.add(std::move(occ), vec);
    }
  }
  return shard;
}

RepresentativeShard represent_occurrences(const Corpus& corpus, const std::vector<Comment>& comments,
                                          const std::set<std::string>& vocab, std::uint64_t seed) {
  RepresentativeShard shard;
  constexpr std::size_t kPool = 30;
  const auto cdf = zipf_cdf(kPool, 1.0);
  for (const auto& c : comments) {
    for (std::size_t p = 0; p < c.tokens.size(); ++p) {
      const auto& token = c.tokens[p];
      if (!vocab.count(token)) continue;
      const auto sense = planted_sense(corpus, c.community, token);
      Occurrence occ{token, c.community, c.id, static_cast<std::uint32_t>(p), c.author};
      Rng rng(derive_seed(seed ^ 0x5b5ULL, occurrence_key_string(occ)));
      std::vector<std::vector<std::string>> reps(shard.reps_per_occurrence);
      for (auto& rep : reps) {
        for (std::uint32_t j = 0; j < shard.substitutes_per_rep; ++j) {
          rep.push_back(token + "~" + std::to_string(sense) + "~" + std::to_string(draw(cdf, rng)));
        }
      }
      shard.add(std::move(occ), reps);
    }
  }
  return shard;
}

Blobs planted_blobs(std::size_t n, std::size_t dim, std::size_t k, double separation, double sigma,
                    std::uint64_t seed) {
  if (k == 0 || k > dim || n < k) throw Error("planted_blobs: need 1 <= k <= dim and n >= k");
  Rng rng(seed);
  // Orthonormal directions by Gram-Schmidt on Gaussian draws; centres a*e_i
  // are pairwise a*sqrt(2) apart.
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < dirs.rows(); ++i) {
    for (Eigen::Index d = 0; d < dirs.cols(); ++d) dirs(i, d) = rng.normal();
    for (Eigen::Index j = 0; j < i; ++j) dirs.row(i) -= dirs.row(i).dot(dirs.row(j)) * dirs.row(j);
    dirs.row(i).normalize();
  }
  const double distance = separation * sigma * std::sqrt(static_cast<double>(dim));
  const double a = distance / std::sqrt(2.0);

  Blobs blobs;
  blobs.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  blobs.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = i % k;
    blobs.labels[i] = label;
    for (Eigen::Index d = 0; d < blobs.points.cols(); ++d) {
      blobs.points(static_cast<Eigen::Index>(i), d) = a * dirs(static_cast<Eigen::Index>(label), d) + sigma * rng.normal();
    }
  }
  return blobs;
}

}  // namespace lexvar::synthetic
