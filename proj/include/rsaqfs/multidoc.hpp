#pragma once

// Iterative multi-document summarization under a word budget, plus the
// Filtered and BlackBox baselines.
//
// Documents are visited in decreasing TF-IDF cosine to the query. Each is
// summarized on its own; generated sentences are appended unless more than
// novelty_threshold of their word types are already in the summary. The
// first sentence that would overflow the budget ends the whole run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rsaqfs/corpus.hpp"
#include "rsaqfs/error.hpp"
#include "rsaqfs/nnsum.hpp"
#include "rsaqfs/relevance.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::multidoc {

using Sentence = std::vector<std::string>;

struct MultiDocConfig {
  std::size_t budget = 250;
  double novelty_threshold = 0.5;
  nnsum::DecodeConfig per_doc_decode;
  // false: stop at the first over-budget sentence. true: skip it and keep
  // scanning for shorter ones.
  bool skip_over_budget = false;

  void validate() const {
    if (budget < 1) throw ConfigError("budget must be >= 1");
    if (!(novelty_threshold > 0.0 && novelty_threshold <= 1.0)) {
      throw ConfigError("novelty_threshold must be in (0,1]");
    }
    per_doc_decode.validate();
  }
};

struct SummaryDraft {
  std::vector<Sentence> sentences;
  std::set<std::string, std::less<>> word_set;
  std::size_t word_count = 0;

  void add(const Sentence& s) {
    sentences.push_back(s);
    for (const auto& t : s) {
      if (text::is_word(t)) {
        word_set.insert(t);
        ++word_count;
      }
    }
  }

  std::string text() const {
    std::string out;
    for (const auto& s : sentences) out += text::detokenize(s) + "\n";
    return out;
  }
};

// Fraction of the sentence's word types already present in the draft.
// Sentences without words report 1.
inline double overlap_ratio(const SummaryDraft& draft, std::span<const std::string> sentence) {
  const auto types = relevance::word_types(sentence);
  if (types.empty()) return 1.0;
  std::size_t seen = 0;
  for (const auto& t : types) seen += draft.word_set.count(t);
  return static_cast<double>(seen) / static_cast<double>(types.size());
}

inline bool is_novel(const SummaryDraft& draft, std::span<const std::string> sentence,
                     double threshold) {
  if (relevance::word_types(sentence).empty()) return false;
  if (draft.word_set.empty()) return true;
  return overlap_ratio(draft, sentence) <= threshold;
}

struct RankedDocument {
  std::size_t index = 0;  // position in the topic's document list
  double cosine = 0.0;
};

// Descending TF-IDF cosine between the query and whole documents; ties keep
// the original order.
inline std::vector<RankedDocument> rank_documents(std::span<const corpus::Document> docs,
                                                  std::span<const std::string> query,
                                                  const relevance::TfIdfStats& stats) {
  std::vector<RankedDocument> ranked;
  const auto q = stats.weigh(query);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ranked.push_back({i, relevance::cosine(q, stats.weigh(docs[i].tokens.tokens))});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.cosine > b.cosine; });
  return ranked;
}

inline std::vector<corpus::Document> sort_by_relevance(std::span<const corpus::Document> docs,
                                                       std::span<const std::string> query,
                                                       const relevance::TfIdfStats& stats) {
  std::vector<corpus::Document> out;
  for (const auto& r : rank_documents(docs, query, stats)) out.push_back(docs[r.index]);
  return out;
}

enum class Decision { kAccepted, kRedundant, kOverBudget };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kAccepted: return "accepted";
    case Decision::kRedundant: return "redundant";
    case Decision::kOverBudget: return "over_budget";
  }
  return "?";
}

struct SentenceRecord {
  std::string doc_id;
  Sentence tokens;
  double novelty_ratio = 0.0;  // overlap with the draft at decision time
  Decision decision = Decision::kAccepted;
};

struct ProcessedDocument {
  std::string doc_id;
  double query_cosine = 0.0;
};

struct SummaryResult {
  SummaryDraft draft;
  std::vector<SentenceRecord> trace;
  std::vector<ProcessedDocument> documents;  // in processing order
  bool budget_reached = false;
};

// Produces the generated sentences of one document.
using DocumentSummarizer =
    std::function<std::vector<Sentence>(const corpus::Topic&, const corpus::Document&)>;

inline SummaryResult iterative_summarize(const corpus::Topic& topic,
                                         const DocumentSummarizer& summarize,
                                         const MultiDocConfig& cfg = {}) {
  cfg.validate();
  SummaryResult result;
  if (topic.documents.empty()) return result;
  const auto stats = relevance::compute_topic_tfidf_stats(topic);
  const auto query = text::tokenize(topic.query);
  for (const auto& ranked : rank_documents(topic.documents, query.tokens, stats)) {
    const auto& doc = topic.documents[ranked.index];
    result.documents.push_back({doc.doc_id, ranked.cosine});
    for (auto& sentence : summarize(topic, doc)) {
      SentenceRecord rec{doc.doc_id, sentence, overlap_ratio(result.draft, sentence),
                         Decision::kAccepted};
      if (result.draft.word_count + text::word_count(sentence) > cfg.budget) {
        rec.decision = Decision::kOverBudget;
        result.trace.push_back(std::move(rec));
        result.budget_reached = true;
        if (cfg.skip_over_budget) continue;
        return result;
      }
      if (is_novel(result.draft, sentence, cfg.novelty_threshold)) {
        result.draft.add(sentence);
      } else {
        rec.decision = Decision::kRedundant;
      }
      result.trace.push_back(std::move(rec));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Per-document summarizers backed by the toy model

inline std::vector<Sentence> generated_sentences(const nnsum::Generation& g,
                                                 const text::Vocabulary& vocab) {
  return text::split_token_sentences(text::decode_ids(g.ids, vocab));
}

inline nnsum::Generation rsa_generate(const corpus::Topic& topic, const corpus::Document& doc,
                                      const nnsum::ToyModel& model,
                                      const relevance::RelevanceConfig& relcfg,
                                      const relevance::EmbeddingTable* emb,
                                      const nnsum::DecodeConfig& decode) {
  const auto rel = relevance::score_topic(topic, doc, relcfg, emb);
  const auto ids = text::encode_ids(doc.tokens, model.vocab);
  return nnsum::generate(ids, std::span<const double>(rel), model.params, decode);
}

inline nnsum::Generation blackbox_baseline(const corpus::Document& doc,
                                           const nnsum::ToyModel& model,
                                           const nnsum::DecodeConfig& decode = {}) {
  const auto ids = text::encode_ids(doc.tokens, model.vocab);
  const std::vector<double> ones(ids.size(), 1.0);
  return nnsum::generate(ids, std::span<const double>(ones), model.params, decode);
}

// Indices of the ceil(n/2) highest scores (earlier position wins ties), in
// ascending order.
inline std::vector<std::size_t> select_top_half(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize((scores.size() + 1) / 2);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// The document reduced to its more relevant half, original order kept.
inline corpus::Document filtered_baseline(const corpus::Topic& topic, const corpus::Document& doc,
                                          const relevance::RelevanceConfig& relcfg,
                                          const relevance::EmbeddingTable* emb = nullptr) {
  const auto& tt = doc.tokens;
  if (tt.sentence_count() == 0) throw ConfigError("filtered_baseline: document has no sentences");
  const auto scores = relevance::raw_sentence_scores(topic, doc, relcfg, emb);
  std::string body;
  for (const std::size_t k : select_top_half(scores)) {
    const auto span = tt.sentence_spans[k];
    const std::size_t from = tt.char_spans[span.begin].begin;
    const std::size_t to = tt.char_spans[span.end - 1].end;
    if (!body.empty()) body += ' ';
    body += tt.source.substr(from, to - from);
  }
  return corpus::Document(doc.doc_id, body);
}

enum class Mode { kRsa, kFiltered, kBlackBox };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kRsa: return "rsa";
    case Mode::kFiltered: return "filtered";
    case Mode::kBlackBox: return "blackbox";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "rsa") return Mode::kRsa;
  if (s == "filtered") return Mode::kFiltered;
  if (s == "blackbox") return Mode::kBlackBox;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

// The model must outlive the returned summarizer.
inline DocumentSummarizer model_summarizer(const nnsum::ToyModel& model, Mode mode,
                                           const relevance::RelevanceConfig& relcfg,
                                           const relevance::EmbeddingTable* emb,
                                           const nnsum::DecodeConfig& decode) {
  return [&model, mode, relcfg, emb, decode](const corpus::Topic& topic,
                                             const corpus::Document& doc) {
    nnsum::Generation g;
    switch (mode) {
      case Mode::kRsa:
        g = rsa_generate(topic, doc, model, relcfg, emb, decode);
        break;
      case Mode::kFiltered:
        g = blackbox_baseline(filtered_baseline(topic, doc, relcfg, emb), model, decode);
        break;
      case Mode::kBlackBox:
        g = blackbox_baseline(doc, model, decode);
        break;
    }
    return generated_sentences(g, model.vocab);
  };
}

inline SummaryResult iterative_summarize(const corpus::Topic& topic, const nnsum::ToyModel& model,
                                         const relevance::RelevanceConfig& relcfg,
                                         const MultiDocConfig& cfg = {},
                                         const relevance::EmbeddingTable* emb = nullptr) {
  return iterative_summarize(
      topic, model_summarizer(model, Mode::kRsa, relcfg, emb, cfg.per_doc_decode), cfg);
}

}  // namespace rsaqfs::multidoc
