#pragma once

// Sentence relevance models (word overlap, TF-IDF cosine, embedding cosine,
// oracle), calibration, and projection of sentence scores onto tokens.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsaqfs/corpus.hpp"
#include "rsaqfs/error.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::relevance {

using Tokens = std::span<const std::string>;

enum class ModelKind { kWordCount, kTfIdf, kEmbedding, kOracle };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kWordCount: return "wordcount";
    case ModelKind::kTfIdf: return "tfidf";
    case ModelKind::kEmbedding: return "embedding";
    case ModelKind::kOracle: return "oracle";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "wordcount" || s == "word_count") return ModelKind::kWordCount;
  if (s == "tfidf") return ModelKind::kTfIdf;
  if (s == "embedding") return ModelKind::kEmbedding;
  if (s == "oracle") return ModelKind::kOracle;
  throw ConfigError("unknown relevance model '" + std::string(s) + "'");
}

struct RelevanceConfig {
  ModelKind kind = ModelKind::kWordCount;
  double calibration_factor = 10.0;
  // Divide word-overlap scores by the document maximum so they share the
  // [0,1] range of the cosine models before calibration.
  bool normalize_word_count = true;

  void validate() const {
    if (!(calibration_factor > 0.0) || !std::isfinite(calibration_factor)) {
      throw ConfigError("calibration_factor must be a positive finite number");
    }
  }
};

// One non-negative score per encoder token, constant within a sentence.
using RelevanceVector = std::vector<double>;

using CountVector = std::map<std::string, double, std::less<>>;

inline CountVector word_counts(Tokens tokens) {
  CountVector out;
  for (const auto& t : tokens) {
    if (text::is_word(t)) out[t] += 1.0;
  }
  return out;
}

inline std::set<std::string, std::less<>> word_types(Tokens tokens) {
  std::set<std::string, std::less<>> out;
  for (const auto& t : tokens) {
    if (text::is_word(t)) out.insert(t);
  }
  return out;
}

// Cosine of two sparse vectors; 0 when either is all-zero.
inline double cosine(const CountVector& a, const CountVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Number of shared word types.
inline double word_count_relevance(Tokens query, Tokens sentence) {
  const auto q = word_types(query);
  double n = 0.0;
  for (const auto& t : word_types(sentence)) n += q.count(t) > 0 ? 1.0 : 0.0;
  return n;
}

struct TfIdfStats {
  std::size_t document_count = 0;
  std::map<std::string, std::size_t, std::less<>> df;

  // ln(N / df) with df clamped to at least 1.
  double idf(std::string_view term) const {
    std::size_t d = 1;
    if (auto it = df.find(term); it != df.end()) d = std::max<std::size_t>(1, it->second);
    return std::log(static_cast<double>(document_count) / static_cast<double>(d));
  }

  CountVector weigh(Tokens tokens) const {
    CountVector v = word_counts(tokens);
    for (auto& [term, w] : v) w *= idf(term);
    return v;
  }
};

inline TfIdfStats compute_tfidf_stats(std::span<const corpus::Document> docs) {
  if (docs.empty()) throw ConfigError("tf-idf statistics need at least one document");
  TfIdfStats s;
  s.document_count = docs.size();
  for (const auto& d : docs) {
    for (const auto& t : word_types(d.tokens.tokens)) ++s.df[t];
  }
  return s;
}

inline TfIdfStats compute_topic_tfidf_stats(const corpus::Topic& topic) {
  return compute_tfidf_stats(topic.documents);
}

// Cosine of raw-count x idf vectors.
inline double tfidf_relevance(Tokens query, Tokens sentence, const TfIdfStats& stats) {
  return cosine(stats.weigh(query), stats.weigh(sentence));
}

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>, std::less<>> vector_of;
};

// Plain text, one `token v1 ... vd` entry per line.
inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read embeddings " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> v;
    std::string field;
    while (ss >> field) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ParseError(path.string(), line_no, "not a number: '" + field + "'");
      }
    }
    if (v.empty()) throw ParseError(path.string(), line_no, "entry has no vector components");
    if (table.dimension == 0) table.dimension = v.size();
    if (v.size() != table.dimension) {
      throw ParseError(path.string(), line_no,
                       "dimension " + std::to_string(v.size()) + " differs from " +
                           std::to_string(table.dimension));
    }
    table.vector_of[token] = std::move(v);
  }
  if (table.vector_of.empty()) throw ParseError(path.string(), 0, "embedding file is empty");
  return table;
}

struct ScoreWithDiagnostic {
  double score = 0.0;
  std::optional<std::string> diagnostic;
};

// Cosine of summed in-vocabulary word vectors; OOV words are ignored.
inline ScoreWithDiagnostic embedding_relevance(Tokens query, Tokens sentence,
                                               const EmbeddingTable& emb) {
  auto sum = [&](Tokens tokens) {
    std::vector<double> acc(emb.dimension, 0.0);
    for (const auto& t : tokens) {
      if (!text::is_word(t)) continue;
      auto it = emb.vector_of.find(t);
      if (it == emb.vector_of.end()) continue;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += it->second[i];
    }
    return acc;
  };
  const auto q = sum(query);
  const auto s = sum(sentence);
  auto is_zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };
  if (is_zero(q) || is_zero(s)) {
    return {0.0, std::string(is_zero(q) ? "query" : "sentence") +
                     " has no in-vocabulary words; relevance set to 0"};
  }
  return {cosine(q, s), std::nullopt};
}

// Word-count cosine against the concatenation of all references.
inline double oracle_relevance(Tokens sentence, std::span<const std::string> references) {
  if (references.empty()) throw ConfigError("oracle relevance requires reference summaries");
  CountVector ref;
  for (const auto& r : references) {
    for (const auto& [k, v] : word_counts(text::tokenize(r).tokens)) ref[k] += v;
  }
  return cosine(word_counts(sentence), ref);
}

inline RelevanceVector project_to_words(std::span<const double> sentence_scores,
                                        const text::TokenizedText& tt) {
  if (sentence_scores.size() != tt.sentence_spans.size()) {
    throw ConfigError("project_to_words: " + std::to_string(sentence_scores.size()) +
                      " scores for " + std::to_string(tt.sentence_spans.size()) + " sentences");
  }
  RelevanceVector out(tt.size(), 0.0);
  for (std::size_t k = 0; k < tt.sentence_spans.size(); ++k) {
    const auto s = tt.sentence_spans[k];
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(s.begin),
              out.begin() + static_cast<std::ptrdiff_t>(s.end), sentence_scores[k]);
  }
  return out;
}

inline std::vector<double> calibrate(std::span<const double> scores, double factor) {
  if (!(factor > 0.0)) throw ConfigError("calibration factor must be positive");
  std::vector<double> out(scores.begin(), scores.end());
  for (double& x : out) x *= factor;
  return out;
}

// Raw (uncalibrated) per-sentence scores of doc under the configured model.
inline std::vector<double> raw_sentence_scores(const corpus::Topic& topic,
                                               const corpus::Document& doc,
                                               const RelevanceConfig& config,
                                               const EmbeddingTable* emb = nullptr,
                                               std::vector<std::string>* diagnostics = nullptr) {
  const auto query = text::tokenize(topic.query);
  const auto& tt = doc.tokens;
  std::vector<double> scores;
  scores.reserve(tt.sentence_count());
  std::optional<TfIdfStats> stats;
  if (config.kind == ModelKind::kTfIdf) stats = compute_topic_tfidf_stats(topic);
  if (config.kind == ModelKind::kEmbedding && emb == nullptr) {
    throw ConfigError("embedding relevance requires an embedding table");
  }
  if (config.kind == ModelKind::kOracle && topic.references.empty()) {
    throw ConfigError("oracle relevance requires references for topic " + topic.topic_id);
  }
  for (std::size_t k = 0; k < tt.sentence_count(); ++k) {
    const auto sentence = tt.sentence(k);
    switch (config.kind) {
      case ModelKind::kWordCount:
        scores.push_back(word_count_relevance(query.tokens, sentence));
        break;
      case ModelKind::kTfIdf:
        scores.push_back(tfidf_relevance(query.tokens, sentence, *stats));
        break;
      case ModelKind::kEmbedding: {
        auto r = embedding_relevance(query.tokens, sentence, *emb);
        if (r.diagnostic && diagnostics != nullptr) {
          diagnostics->push_back(doc.doc_id + " sentence " + std::to_string(k) + ": " +
                                 *r.diagnostic);
        }
        scores.push_back(r.score);
        break;
      }
      case ModelKind::kOracle:
        scores.push_back(oracle_relevance(sentence, topic.references));
        break;
    }
  }
  return scores;
}

// Sentence scores after word-count normalisation and calibration.
inline std::vector<double> sentence_scores(const corpus::Topic& topic, const corpus::Document& doc,
                                           const RelevanceConfig& config,
                                           const EmbeddingTable* emb = nullptr,
                                           std::vector<std::string>* diagnostics = nullptr) {
  config.validate();
  auto scores = raw_sentence_scores(topic, doc, config, emb, diagnostics);
  if (config.kind == ModelKind::kWordCount && config.normalize_word_count && !scores.empty()) {
    const double max = *std::max_element(scores.begin(), scores.end());
    if (max > 0.0) {
      for (double& s : scores) s /= max;
    }
  }
  return calibrate(scores, config.calibration_factor);
}

inline RelevanceVector score_topic(const corpus::Topic& topic, const corpus::Document& doc,
                                   const RelevanceConfig& config,
                                   const EmbeddingTable* emb = nullptr,
                                   std::vector<std::string>* diagnostics = nullptr) {
  return project_to_words(sentence_scores(topic, doc, config, emb, diagnostics), doc.tokens);
}

}  // namespace rsaqfs::relevance
