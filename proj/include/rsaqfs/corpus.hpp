#pragma once

// Topic/document data model, JSON corpus ingestion and the deterministic
// synthetic fixture generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsaqfs/error.hpp"
#include "rsaqfs/io.hpp"
#include "rsaqfs/random.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::corpus {

struct Document {
  std::string doc_id;
  std::string text;
  text::TokenizedText tokens;  // derived from text

  Document() = default;
  Document(std::string id, std::string body)
      : doc_id(std::move(id)), text(std::move(body)), tokens(text::tokenize(text)) {}

  friend bool operator==(const Document& a, const Document& b) {
    return a.doc_id == b.doc_id && a.text == b.text;
  }
};

struct Topic {
  std::string topic_id;
  std::string query;
  std::vector<Document> documents;
  std::vector<std::string> references;

  friend bool operator==(const Topic&, const Topic&) = default;
};

struct Diagnostic {
  std::string field;
  std::string reason;

  std::string str() const { return field + ": " + reason; }
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

namespace detail {
inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}
}  // namespace detail

// Empty iff every Topic invariant holds.
inline std::vector<Diagnostic> validate_topic(const Topic& topic) {
  std::vector<Diagnostic> out;
  if (detail::blank(topic.topic_id)) out.push_back({"topic_id", "must be non-empty"});
  if (detail::blank(topic.query)) out.push_back({"query", "must be non-empty"});
  if (topic.documents.empty()) out.push_back({"documents", "at least one document required"});
  std::set<std::string> seen;
  for (std::size_t i = 0; i < topic.documents.size(); ++i) {
    const auto& d = topic.documents[i];
    const std::string where = "documents[" + std::to_string(i) + "]";
    if (detail::blank(d.doc_id)) out.push_back({where + ".doc_id", "must be non-empty"});
    if (!seen.insert(d.doc_id).second) {
      out.push_back({where + ".doc_id", "duplicate doc_id '" + d.doc_id + "'"});
    }
    if (detail::blank(d.text)) out.push_back({where + ".text", "must be non-empty"});
  }
  return out;
}

inline nlohmann::json to_json(const Topic& topic) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : topic.documents) docs.push_back({{"doc_id", d.doc_id}, {"text", d.text}});
  return {{"topic_id", topic.topic_id},
          {"query", topic.query},
          {"documents", std::move(docs)},
          {"references", topic.references}};
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                                const std::string& file, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) throw ParseError(file, 0, "unknown key '" + it.key() + "' in " + where);
  }
}

inline std::string required_string(const nlohmann::json& obj, const char* key,
                                   const std::string& file, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(file, 0, where + ": missing key '" + key + "'");
  if (!it->is_string()) throw ParseError(file, 0, where + "." + key + ": expected string");
  return it->get<std::string>();
}

}  // namespace detail

// Parses one topic object. `file` is only used in error messages.
inline Topic topic_from_json(const nlohmann::json& j, const std::string& file = "<json>") {
  if (!j.is_object()) throw ParseError(file, 0, "topic must be a JSON object");
  detail::reject_unknown_keys(j, {"topic_id", "query", "documents", "references"}, file, "topic");
  Topic t;
  t.topic_id = detail::required_string(j, "topic_id", file, "topic");
  t.query = detail::required_string(j, "query", file, "topic");
  auto docs = j.find("documents");
  if (docs == j.end() || !docs->is_array()) {
    throw ParseError(file, 0, "topic.documents: expected array");
  }
  for (std::size_t i = 0; i < docs->size(); ++i) {
    const auto& d = (*docs)[i];
    const std::string where = "documents[" + std::to_string(i) + "]";
    if (!d.is_object()) throw ParseError(file, 0, where + ": expected object");
    detail::reject_unknown_keys(d, {"doc_id", "text"}, file, where);
    t.documents.emplace_back(detail::required_string(d, "doc_id", file, where),
                             detail::required_string(d, "text", file, where));
  }
  if (auto refs = j.find("references"); refs != j.end()) {
    if (!refs->is_array()) throw ParseError(file, 0, "topic.references: expected array");
    for (const auto& r : *refs) {
      if (!r.is_string()) throw ParseError(file, 0, "topic.references: expected strings");
      t.references.push_back(r.get<std::string>());
    }
  }
  return t;
}

inline Topic load_topic_file(const std::filesystem::path& path) {
  const std::string content = io::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), io::line_of_offset(content, e.byte), e.what());
  }
  Topic t = topic_from_json(j, path.string());
  const auto diags = validate_topic(t);
  if (!diags.empty()) throw ParseError(path.string(), 0, diags.front().str());
  return t;
}

inline bool is_manifest_file(const std::filesystem::path& p) {
  const std::string name = p.filename().string();
  const std::string_view suffix = ".manifest.json";
  return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Topic files (*.json) of a directory in lexicographic filename order. Run
// manifests (*.manifest.json) written next to them are skipped.
inline std::vector<std::filesystem::path> topic_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        !is_manifest_file(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return files;
}

// Accepts a single topic file or a directory of them.
inline std::vector<Topic> load_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("corpus path does not exist: " + path.string());
  const auto files = std::filesystem::is_directory(path) ? topic_files(path)
                                                         : std::vector<std::filesystem::path>{path};
  std::vector<Topic> topics;
  std::set<std::string> ids;
  for (const auto& f : files) {
    Topic t = load_topic_file(f);
    if (!ids.insert(t.topic_id).second) {
      throw ParseError(f.string(), 0, "duplicate topic_id '" + t.topic_id + "'");
    }
    topics.push_back(std::move(t));
  }
  return topics;
}

inline void write_topic(const Topic& topic, const std::filesystem::path& path) {
  io::write_file_atomic(path, to_json(topic).dump(2) + "\n");
}

// One <topic_id>.json per topic.
inline void write_corpus(const std::vector<Topic>& topics, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : topics) write_topic(t, dir / (t.topic_id + ".json"));
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

struct SyntheticConfig {
  std::size_t num_topics = 20;
  std::size_t docs_per_topic = 4;
  std::size_t sentences_per_doc = 10;
  std::size_t vocab_themes = 8;
  double noise_ratio = 0.5;
  std::uint64_t seed = 1;
  // Shape of the generated text.
  std::size_t lexicon_size = 40;
  std::size_t words_per_sentence = 6;
  std::size_t query_length = 6;
  std::string id_prefix = "topic";

  void validate() const {
    if (num_topics < 1 || docs_per_topic < 1 || sentences_per_doc < 1 || vocab_themes < 1) {
      throw ConfigError("synthetic config: counts must be >= 1");
    }
    if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
      throw ConfigError("synthetic config: noise_ratio must be in [0,1]");
    }
    if (noise_ratio > 0.0 && vocab_themes < 2) {
      throw ConfigError("synthetic config: noise needs at least two themes");
    }
    if (words_per_sentence < 1 || words_per_sentence > lexicon_size) {
      throw ConfigError("synthetic config: words_per_sentence must be in [1, lexicon_size]");
    }
    if (query_length < 1 || query_length > lexicon_size) {
      throw ConfigError("synthetic config: query_length must be in [1, lexicon_size]");
    }
  }
};

// Theme lexicons are a fixed function of (theme, index) and never depend on
// the seed, so corpora generated with different seeds share a vocabulary.
inline std::string theme_word(std::size_t theme, std::size_t index) {
  static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  auto syllable = [&](std::size_t k) {
    k %= syllables;
    return std::string{kConsonants[k / kVowels.size()], kVowels[k % kVowels.size()]};
  };
  std::string w = syllable(theme);
  if (theme >= syllables) w += std::to_string(theme / syllables);
  w += syllable(index * 7 + 3);
  w += syllable(index / syllables + 2 * index + 1);
  if (index >= syllables) w += std::to_string(index / syllables);
  return w;
}

inline std::vector<std::string> theme_lexicon(std::size_t theme, std::size_t size) {
  std::vector<std::string> out;
  out.reserve(size);
  for (std::size_t j = 0; j < size; ++j) out.push_back(theme_word(theme, j));
  return out;
}

struct SyntheticTopicInfo {
  std::size_t theme = 0;
  std::size_t distractor = 0;
  std::vector<std::vector<bool>> on_theme;  // [document][sentence]
};

struct SyntheticCorpus {
  std::vector<Topic> topics;
  std::vector<SyntheticTopicInfo> info;  // parallel to topics
};

inline SyntheticCorpus generate_labelled_corpus(const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<std::vector<std::string>> lexicons;
  for (std::size_t t = 0; t < config.vocab_themes; ++t) {
    lexicons.push_back(theme_lexicon(t, config.lexicon_size));
  }
  auto make_sentence = [&](const std::vector<std::string>& lex, std::size_t length,
                           bool capitalise) {
    std::string s;
    for (const std::size_t k : rng.sample(lex.size(), length)) {
      if (!s.empty()) s += ' ';
      s += lex[k];
    }
    if (capitalise) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };

  const auto noise_count = static_cast<std::size_t>(
      std::lround(config.noise_ratio * static_cast<double>(config.sentences_per_doc)));
  const int width = static_cast<int>(std::to_string(config.num_topics - 1).size());

  SyntheticCorpus out;
  for (std::size_t ti = 0; ti < config.num_topics; ++ti) {
    SyntheticTopicInfo info;
    info.theme = rng.index(config.vocab_themes);
    info.distractor = info.theme;
    if (config.vocab_themes > 1) {
      info.distractor = (info.theme + 1 + rng.index(config.vocab_themes - 1)) % config.vocab_themes;
    }
    std::string id = std::to_string(ti);
    id.insert(0, static_cast<std::size_t>(std::max(width, 4)) - id.size(), '0');

    Topic topic;
    topic.topic_id = config.id_prefix + "_" + id;
    topic.query = make_sentence(lexicons[info.theme], config.query_length, false);
    std::string reference;
    for (std::size_t di = 0; di < config.docs_per_topic; ++di) {
      std::vector<bool> labels(config.sentences_per_doc, true);
      std::fill_n(labels.begin(), noise_count, false);
      rng.shuffle(labels);
      std::string body;
      for (const bool on : labels) {
        std::string s = make_sentence(lexicons[on ? info.theme : info.distractor],
                                      config.words_per_sentence, true) + ".";
        if (on) reference += (reference.empty() ? "" : " ") + s;
        body += (body.empty() ? "" : " ") + s;
      }
      topic.documents.emplace_back("d" + std::to_string(di), body);
      info.on_theme.push_back(std::move(labels));
    }
    if (!reference.empty()) topic.references.push_back(reference);
    out.topics.push_back(std::move(topic));
    out.info.push_back(std::move(info));
  }
  return out;
}

// Pure function of the config, seed included.
inline std::vector<Topic> generate_synthetic_corpus(const SyntheticConfig& config) {
  return generate_labelled_corpus(config).topics;
}

}  // namespace rsaqfs::corpus
