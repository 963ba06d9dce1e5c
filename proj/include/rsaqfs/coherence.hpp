#pragma once

// Surface heuristics for sentences that cannot be read without their
// context: a leading connective, or a pronoun / definite non-proper noun
// phrase that likely points back to an earlier sentence.

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsaqfs/corpus.hpp"
#include "rsaqfs/error.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::coherence {

class ConnectiveLexicon {
 public:
  explicit ConnectiveLexicon(const std::vector<std::string>& phrases) {
    for (const auto& p : phrases) {
      auto tokens = text::tokenize(p).tokens;
      if (tokens.empty()) throw ConfigError("connective lexicon: empty entry");
      entries_.push_back(std::move(tokens));
    }
    if (entries_.empty()) throw ConfigError("connective lexicon is empty");
    // Longest entries first so the first hit is the longest match.
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }

  static ConnectiveLexicon defaults() {
    return ConnectiveLexicon({"however", "moreover", "furthermore", "therefore", "thus",
                              "also", "but", "and", "so", "yet", "still", "meanwhile",
                              "instead", "consequently", "nevertheless", "nonetheless",
                              "additionally", "finally", "then", "similarly", "likewise",
                              "besides", "hence", "in addition", "on the other hand"});
  }

  // One lowercase phrase per line; blank lines are skipped.
  static ConnectiveLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read lexicon " + path.string());
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) phrases.push_back(line);
    }
    return ConnectiveLexicon(phrases);
  }

  // Length in tokens of the longest entry that prefixes tokens, or 0.
  std::size_t longest_match(std::span<const std::string> tokens) const {
    for (const auto& e : entries_) {
      if (e.size() <= tokens.size() && std::equal(e.begin(), e.end(), tokens.begin())) {
        return e.size();
      }
    }
    return 0;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::vector<std::string>> entries_;
};

inline bool starts_with_connective(const text::TokenizedText& sentence,
                                   const ConnectiveLexicon& lex) {
  return lex.longest_match(sentence.tokens) > 0;
}

inline constexpr std::array<std::string_view, 16> kReferringPronouns = {
    "he",  "she", "it",     "they",   "him",  "her",  "them",  "his",
    "hers", "its", "their", "theirs", "this", "that", "these", "those"};

// Window (in tokens) in which "the <lowercase word>" counts as a definite
// non-proper noun phrase.
inline constexpr std::size_t kDefiniteWindow = 5;

inline bool breaks_reference_chain(const text::TokenizedText& sentence) {
  const auto& toks = sentence.tokens;
  for (const auto& t : toks) {
    if (std::find(kReferringPronouns.begin(), kReferringPronouns.end(), t) !=
        kReferringPronouns.end()) {
      return true;
    }
  }
  const std::size_t window = std::min(toks.size(), kDefiniteWindow);
  for (std::size_t i = 0; i + 1 < window; ++i) {
    if (toks[i] != "the") continue;
    const std::string_view next = sentence.original(i + 1);
    const bool lowercase_word =
        !next.empty() && std::all_of(next.begin(), next.end(), [](char c) {
          return std::isalpha(static_cast<unsigned char>(c)) != 0;
        }) && std::islower(static_cast<unsigned char>(next.front())) != 0;
    if (lowercase_word) return true;
  }
  return false;
}

struct CoherenceReport {
  std::size_t total_sentences = 0;
  std::size_t connective_starts = 0;
  std::size_t chain_breaks = 0;
  std::size_t context_independent = 0;
  double context_independent_rate = 0.0;
};

inline CoherenceReport context_independence_rate(std::span<const text::TokenizedText> sentences,
                                                 const ConnectiveLexicon& lex) {
  if (sentences.empty()) throw ConfigError("coherence analysis needs at least one sentence");
  CoherenceReport r;
  for (const auto& s : sentences) {
    const bool conn = starts_with_connective(s, lex);
    const bool chain = breaks_reference_chain(s);
    ++r.total_sentences;
    r.connective_starts += conn ? 1 : 0;
    r.chain_breaks += chain ? 1 : 0;
    r.context_independent += (!conn && !chain) ? 1 : 0;
  }
  r.context_independent_rate =
      static_cast<double>(r.context_independent) / static_cast<double>(r.total_sentences);
  return r;
}

// Each sentence is tokenized on its own so casing and offsets are local.
inline std::vector<text::TokenizedText> sentences_of(std::string_view body) {
  std::vector<text::TokenizedText> out;
  for (const auto& s : text::split_sentences(body)) out.push_back(text::tokenize(s));
  return out;
}

inline CoherenceReport context_independence_rate(std::span<const corpus::Document> docs,
                                                 const ConnectiveLexicon& lex) {
  std::vector<text::TokenizedText> all;
  for (const auto& d : docs) {
    for (auto& s : sentences_of(d.text)) all.push_back(std::move(s));
  }
  return context_independence_rate(all, lex);
}

}  // namespace rsaqfs::coherence
