#pragma once

// Tokenization, sentence segmentation and vocabulary handling shared by every
// other module. All functions are pure and deterministic.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsaqfs/error.hpp"

namespace rsaqfs::text {

// Half-open [begin, end) range; token indices or character offsets depending
// on context.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct TokenizedText {
  std::string source;                // original text, original casing
  std::vector<std::string> tokens;   // lowercased
  std::vector<Span> sentence_spans;  // token ranges, partition of tokens
  std::vector<Span> char_spans;      // one per token, offsets into source

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::size_t sentence_count() const { return sentence_spans.size(); }

  std::span<const std::string> sentence(std::size_t k) const {
    const Span s = sentence_spans.at(k);
    return std::span<const std::string>(tokens).subspan(s.begin, s.size());
  }

  // Token i as it appeared in the source (before lowercasing).
  std::string_view original(std::size_t i) const {
    const Span c = char_spans.at(i);
    return std::string_view(source).substr(c.begin, c.size());
  }
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Non-ASCII bytes are treated as word characters so UTF-8 text survives intact.
inline bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

inline bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

inline char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

inline constexpr std::array<std::string_view, 24> kAbbreviations = {
    "dr.",  "mr.",  "mrs.", "ms.",  "prof.", "st.",  "jr.",  "sr.",
    "vs.",  "e.g.", "i.e.", "inc.", "ltd.",  "co.",  "corp.", "gen.",
    "gov.", "sen.", "rep.", "mt.",  "no.",   "jan.", "feb.", "aug."};

inline bool is_abbreviation(std::string_view word) {
  const std::string w = lowercase(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end();
}

// Character ranges of sentences; leading and trailing whitespace excluded.
inline std::vector<Span> sentence_char_spans(std::string_view text) {
  std::vector<Span> spans;
  const std::size_t n = text.size();
  std::size_t start = 0;
  auto skip_space = [&](std::size_t i) {
    while (i < n && is_space(text[i])) ++i;
    return i;
  };
  start = skip_space(0);
  std::size_t i = start;
  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < n && is_terminator(text[run_end])) ++run_end;
    const bool at_boundary = run_end == n || is_space(text[run_end]);
    bool split = at_boundary;
    if (split && run_end - i == 1 && text[i] == '.') {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      while (w < i && !is_word_char(text[w])) ++w;  // strip "(" or quotes
      split = !is_abbreviation(text.substr(w, run_end - w));
    }
    if (split) {
      spans.push_back({start, run_end});
      start = skip_space(run_end);
      i = start;
    } else {
      i = run_end;
    }
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && is_space(text[end - 1])) --end;
    if (end > start) spans.push_back({start, end});
  }
  return spans;
}

// Appends tokens of text[begin, end) to out.
inline void tokenize_range(std::string_view text, std::size_t begin, std::size_t end,
                           TokenizedText& out) {
  std::size_t i = begin;
  while (i < end) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      out.tokens.push_back(std::string(1, c));
      out.char_spans.push_back({i, i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < end) {
      if (is_word_char(text[j])) {
        ++j;
        continue;
      }
      // Joiners stay inside a word when flanked by word characters:
      // don't, well-known, 3.5, u.s, 1,000.
      const char p = text[j];
      const bool joiner = p == '\'' || p == '-' || p == '.' || p == ',';
      const bool flanked = j + 1 < end && is_word_char(text[j + 1]);
      const bool numeric_comma =
          p != ',' || (std::isdigit(static_cast<unsigned char>(text[j - 1])) != 0 &&
                       std::isdigit(static_cast<unsigned char>(text[j + 1])) != 0);
      if (joiner && flanked && numeric_comma) {
        ++j;
        continue;
      }
      break;
    }
    out.tokens.push_back(lowercase(text.substr(i, j - i)));
    out.char_spans.push_back({i, j});
    i = j;
  }
}

}  // namespace detail

// A token counts as a word when it contains at least one alphanumeric
// character. Punctuation tokens are kept for decoding but ignored by
// relevance overlap, novelty and ROUGE.
inline bool is_word(std::string_view token) {
  return std::any_of(token.begin(), token.end(), detail::is_word_char);
}

inline std::vector<std::string> words(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (is_word(t)) out.push_back(t);
  }
  return out;
}

inline std::size_t word_count(std::span<const std::string> tokens) {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return is_word(t); }));
}

// Splits at '.', '!' or '?' followed by whitespace or end of text, except
// after an abbreviation such as "Dr.".
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const Span s : detail::sentence_char_spans(text)) {
    out.emplace_back(text.substr(s.begin, s.size()));
  }
  return out;
}

inline TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.source = std::string(text);
  for (const Span s : detail::sentence_char_spans(text)) {
    const std::size_t first = out.tokens.size();
    detail::tokenize_range(text, s.begin, s.end, out);
    if (out.tokens.size() > first) out.sentence_spans.push_back({first, out.tokens.size()});
  }
  return out;
}

inline std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Splits a token stream into sentences after each terminator token.
inline std::vector<std::vector<std::string>> split_token_sentences(
    std::span<const std::string> tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  for (const auto& t : tokens) {
    current.push_back(t);
    if (t.size() == 1 && detail::is_terminator(t[0])) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

// Token <-> id map. Ids 0..3 are reserved; their spellings cannot be produced
// by the tokenizer because '<' and '>' are always split off.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kStart = 2;
  static constexpr int kStop = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  // tokens are the non-reserved entries, in id order starting at 4.
  explicit Vocabulary(const std::vector<std::string>& tokens) {
    token_of_ = {"<pad>", "<unk>", "<s>", "</s>"};
    for (std::size_t i = 0; i < token_of_.size(); ++i) {
      id_of_.emplace(token_of_[i], static_cast<int>(i));
    }
    for (const auto& t : tokens) {
      if (t.empty()) throw ConfigError("vocabulary: empty token");
      if (!id_of_.emplace(t, static_cast<int>(token_of_.size())).second) {
        throw ConfigError("vocabulary: duplicate token '" + t + "'");
      }
      token_of_.push_back(t);
    }
  }

  std::size_t size() const { return token_of_.size(); }

  bool contains(std::string_view token) const { return id_of_.find(token) != id_of_.end(); }

  int id_of(std::string_view token) const {
    auto it = id_of_.find(token);
    return it == id_of_.end() ? kUnk : it->second;
  }

  const std::string& token_of(int id) const { return token_of_.at(static_cast<std::size_t>(id)); }

  const std::vector<std::string>& tokens() const { return token_of_; }

  // One token per line; line number (0-based) is the id.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write vocabulary " + path.string());
    for (const auto& t : token_of_) out << t << '\n';
  }

  static Vocabulary load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read vocabulary " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    const Vocabulary reserved;
    for (std::size_t i = 0; i < kReserved; ++i) {
      if (i >= lines.size() || lines[i] != reserved.token_of_[i]) {
        throw ParseError(path.string(), i + 1, "expected reserved symbol " + reserved.token_of_[i]);
      }
    }
    try {
      return Vocabulary(std::vector<std::string>(lines.begin() + kReserved, lines.end()));
    } catch (const ConfigError& e) {
      throw ParseError(path.string(), 0, e.what());
    }
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.token_of_ == b.token_of_;
  }

 private:
  std::vector<std::string> token_of_;
  std::map<std::string, int, std::less<>> id_of_;
};

// Keeps the max_size - 4 most frequent tokens; ties break lexicographically.
inline Vocabulary build_vocabulary(std::span<const TokenizedText> texts, std::size_t max_size) {
  if (max_size < 5) throw ConfigError("build_vocabulary: max_size must be >= 5");
  std::map<std::string, std::size_t> counts;
  for (const auto& tt : texts) {
    for (const auto& t : tt.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t keep = std::min(ranked.size(), max_size - Vocabulary::kReserved);
  std::vector<std::string> tokens;
  tokens.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) tokens.push_back(ranked[i].first);
  return Vocabulary(tokens);
}

inline std::vector<int> encode_ids(std::span<const std::string> tokens, const Vocabulary& v) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(v.id_of(t));
  return ids;
}

inline std::vector<int> encode_ids(const TokenizedText& tt, const Vocabulary& v) {
  return encode_ids(tt.tokens, v);
}

inline std::vector<std::string> decode_ids(std::span<const int> ids, const Vocabulary& v) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const int id : ids) out.push_back(v.token_of(id));
  return out;
}

}  // namespace rsaqfs::text
