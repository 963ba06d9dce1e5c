#pragma once

// ROUGE-N, ROUGE-L and ROUGE-SU4 over lowercased word tokens (punctuation
// dropped, no stemming, no stop-word removal), plus abstractiveness measures
// of generated summaries against their sources.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsaqfs/error.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::metrics {

using Tokens = std::span<const std::string>;

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

inline double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline RougeScore make_score(double p, double r) { return {p, r, f1_of(p, r)}; }

// Integer match statistics summed over references.
struct MatchCounts {
  std::size_t overlap = 0;
  std::size_t candidate_total = 0;
  std::size_t reference_total = 0;

  RougeScore score() const {
    const double p = candidate_total == 0 ? 0.0
                                          : static_cast<double>(overlap) /
                                                static_cast<double>(candidate_total);
    const double r = reference_total == 0 ? 0.0
                                          : static_cast<double>(overlap) /
                                                static_cast<double>(reference_total);
    return make_score(p, r);
  }
};

using GramCounts = std::map<std::vector<std::string>, std::size_t>;

inline std::vector<std::string> word_tokens(std::string_view text) {
  return text::words(text::tokenize(text).tokens);
}

inline GramCounts ngrams(Tokens tokens, std::size_t n) {
  GramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

// Ordered pairs (i, j) with 0 < j - i <= max_distance, plus every unigram.
inline GramCounts skip_bigrams_with_unigrams(Tokens tokens, std::size_t max_distance) {
  GramCounts out = ngrams(tokens, 1);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j < tokens.size() && j - i <= max_distance; ++j) {
      ++out[{tokens[i], tokens[j]}];
    }
  }
  return out;
}

inline std::size_t total(const GramCounts& g) {
  std::size_t n = 0;
  for (const auto& [k, c] : g) n += c;
  return n;
}

inline std::size_t clipped_overlap(const GramCounts& cand, const GramCounts& ref) {
  std::size_t n = 0;
  for (const auto& [gram, c] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) n += std::min(c, it->second);
  }
  return n;
}

inline void require_references(std::span<const std::vector<std::string>> refs) {
  if (refs.empty()) throw ConfigError("ROUGE needs at least one reference");
}

// Micro-average over references: hits, candidate and reference totals are
// summed before dividing.
inline MatchCounts micro_counts(const GramCounts& cand,
                                std::span<const GramCounts> refs) {
  MatchCounts m;
  for (const auto& r : refs) {
    m.overlap += clipped_overlap(cand, r);
    m.candidate_total += total(cand);
    m.reference_total += total(r);
  }
  return m;
}

inline RougeScore rouge_n(Tokens candidate, std::span<const std::vector<std::string>> references,
                          std::size_t n) {
  if (n != 1 && n != 2) throw ConfigError("rouge_n supports n = 1 or 2");
  require_references(references);
  std::vector<GramCounts> refs;
  for (const auto& r : references) refs.push_back(ngrams(r, n));
  return micro_counts(ngrams(candidate, n), refs).score();
}

inline RougeScore rouge_su(Tokens candidate, std::span<const std::vector<std::string>> references,
                           std::size_t max_distance) {
  require_references(references);
  std::vector<GramCounts> refs;
  for (const auto& r : references) refs.push_back(skip_bigrams_with_unigrams(r, max_distance));
  return micro_counts(skip_bigrams_with_unigrams(candidate, max_distance), refs).score();
}

inline RougeScore rouge_su4(Tokens candidate,
                            std::span<const std::vector<std::string>> references) {
  return rouge_su(candidate, references, 4);
}

inline std::size_t lcs_length(Tokens a, Tokens b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Longest-common-subsequence ROUGE; with several references the one with the
// best F1 is reported (first wins ties).
inline RougeScore rouge_l(Tokens candidate, std::span<const std::vector<std::string>> references) {
  require_references(references);
  RougeScore best;
  bool first = true;
  for (const auto& r : references) {
    const auto lcs = static_cast<double>(lcs_length(candidate, r));
    const double p = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
    const double rec = r.empty() ? 0.0 : lcs / static_cast<double>(r.size());
    const RougeScore s = make_score(p, rec);
    if (first || s.f1 > best.f1) best = s;
    first = false;
  }
  return best;
}

struct RougeReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rouge_l;
  RougeScore rouge_su4;
};

// Scores raw texts (tokenized here).
inline RougeReport rouge_all(std::string_view candidate, std::span<const std::string> references) {
  const auto cand = word_tokens(candidate);
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : references) refs.push_back(word_tokens(r));
  return {rouge_n(cand, refs, 1), rouge_n(cand, refs, 2), rouge_l(cand, refs),
          rouge_su4(cand, refs)};
}

// ---------------------------------------------------------------------------
// Abstractiveness

struct Measured {
  double value = 0.0;
  std::optional<std::string> diagnostic;
};

// Fraction of summary sentences whose word sequence occurs contiguously in
// some source document.
inline Measured copied_sentence_fraction(std::span<const std::vector<std::string>> summary,
                                         std::span<const std::vector<std::string>> sources) {
  if (summary.empty()) return {0.0, "empty summary"};
  std::vector<std::vector<std::string>> src_words;
  for (const auto& s : sources) src_words.push_back(text::words(s));
  std::size_t copied = 0;
  for (const auto& sent : summary) {
    const auto w = text::words(sent);
    if (w.empty()) continue;
    const bool found = std::any_of(src_words.begin(), src_words.end(), [&](const auto& doc) {
      return std::search(doc.begin(), doc.end(), w.begin(), w.end()) != doc.end();
    });
    if (found) ++copied;
  }
  return {static_cast<double>(copied) / static_cast<double>(summary.size()), std::nullopt};
}

inline std::size_t word_edit_distance(Tokens a, Tokens b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Mean over summary sentences of the word-level Levenshtein distance to the
// closest source sentence.
inline Measured avg_min_edit_distance(std::span<const std::vector<std::string>> summary,
                                      std::span<const std::vector<std::string>> source_sentences) {
  if (source_sentences.empty()) throw ConfigError("avg_min_edit_distance: empty source");
  if (summary.empty()) return {0.0, "empty summary"};
  std::vector<std::vector<std::string>> src;
  for (const auto& s : source_sentences) src.push_back(text::words(s));
  double sum = 0.0;
  for (const auto& sent : summary) {
    const auto w = text::words(sent);
    std::size_t best = SIZE_MAX;
    for (const auto& s : src) best = std::min(best, word_edit_distance(w, s));
    sum += static_cast<double>(best);
  }
  return {sum / static_cast<double>(summary.size()), std::nullopt};
}

}  // namespace rsaqfs::metrics
