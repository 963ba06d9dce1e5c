#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "rsaqfs/random.hpp"
#include "rsaqfs/relevance.hpp"

using namespace rsaqfs;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> toks(std::string_view s) { return text::tokenize(s).tokens; }

corpus::Topic topic_of(std::string query, std::vector<std::string> docs,
                       std::vector<std::string> refs = {}) {
  corpus::Topic t;
  t.topic_id = "t";
  t.query = std::move(query);
  for (std::size_t i = 0; i < docs.size(); ++i) t.documents.emplace_back("d" + std::to_string(i), docs[i]);
  t.references = std::move(refs);
  return t;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const auto p = fs::temp_directory_path() / name;
  io::write_file_atomic(p, content);
  return p;
}

}  // namespace

TEST(WordCount, Examples) {
  EXPECT_EQ(relevance::word_count_relevance(toks("a b"), toks("a b")), 2.0);
  EXPECT_EQ(relevance::word_count_relevance(toks("x y"), toks("a b")), 0.0);
  EXPECT_EQ(relevance::word_count_relevance(toks("oil spill cleanup"),
                                            toks("the oil spill cleanup effort")),
            3.0);
}

TEST(WordCount, TypesNotOccurrencesAndNoPunctuation) {
  EXPECT_EQ(relevance::word_count_relevance(toks("oil, oil."), toks("oil oil oil.")), 1.0);
}

TEST(WordCount, Symmetric) {
  Rng rng(3);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", ",", "."};
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> x, y;
    for (std::size_t k = rng.index(8); k > 0; --k) x.push_back(vocab[rng.index(vocab.size())]);
    for (std::size_t k = rng.index(8); k > 0; --k) y.push_back(vocab[rng.index(vocab.size())]);
    EXPECT_EQ(relevance::word_count_relevance(x, y), relevance::word_count_relevance(y, x));
  }
}

TEST(TfIdf, IdfClosedForms) {
  const auto t = topic_of("q", {"x y.", "x z."});
  const auto stats = relevance::compute_topic_tfidf_stats(t);
  EXPECT_EQ(stats.document_count, 2u);
  EXPECT_DOUBLE_EQ(stats.idf("x"), 0.0);
  EXPECT_NEAR(stats.idf("y"), 0.6931, 1e-4);
  EXPECT_DOUBLE_EQ(stats.idf("y"), std::log(2.0));

  const auto single = relevance::compute_topic_tfidf_stats(topic_of("q", {"a b c."}));
  for (const char* w : {"a", "b", "c"}) EXPECT_DOUBLE_EQ(single.idf(w), 0.0);
}

TEST(TfIdf, CosineExamples) {
  // Two documents, x and y each in exactly one of them: idf = ln 2 for both.
  const auto t = topic_of("x", {"x w.", "y w."});
  const auto stats = relevance::compute_topic_tfidf_stats(t);
  EXPECT_NEAR(relevance::tfidf_relevance(toks("x"), toks("x y"), stats), 1.0 / std::sqrt(2.0),
              1e-12);
  EXPECT_NEAR(relevance::tfidf_relevance(toks("x y"), toks("x y"), stats), 1.0, 1e-12);
  // w appears everywhere (idf 0), so sharing it gives nothing.
  EXPECT_EQ(relevance::tfidf_relevance(toks("x w"), toks("y w"), stats), 0.0);
}

TEST(Embedding, LoadAndScore) {
  const auto p = write_temp("rsaqfs_emb_ok.txt", "a 1 0\nb 0 1\n");
  const auto emb = relevance::load_embeddings(p);
  EXPECT_EQ(emb.dimension, 2u);
  EXPECT_EQ(emb.vector_of.size(), 2u);
  EXPECT_NEAR(relevance::embedding_relevance(toks("a"), toks("a b"), emb).score,
              oracle::dense_cosine({1, 0}, {1, 1}), 1e-12);
  EXPECT_NEAR(relevance::embedding_relevance(toks("a b"), toks("a b"), emb).score, 1.0, 1e-12);
  const auto oov = relevance::embedding_relevance(toks("zzz"), toks("a"), emb);
  EXPECT_EQ(oov.score, 0.0);
  EXPECT_TRUE(oov.diagnostic.has_value());
  EXPECT_DOUBLE_EQ(relevance::embedding_relevance(toks("a"), toks("a b b"), emb).score,
                   relevance::embedding_relevance(toks("a b b"), toks("a"), emb).score);
  fs::remove(p);
}

TEST(Embedding, DimensionMismatchNamesLine) {
  const auto p = write_temp("rsaqfs_emb_bad.txt", "a 1 0\nb 0 1 2\n");
  try {
    relevance::load_embeddings(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  fs::remove(p);
}

TEST(Embedding, EmptyFileAndBadNumber) {
  const auto empty = write_temp("rsaqfs_emb_empty.txt", "");
  EXPECT_THROW(relevance::load_embeddings(empty), ParseError);
  const auto bad = write_temp("rsaqfs_emb_nan.txt", "a 1 x\n");
  EXPECT_THROW(relevance::load_embeddings(bad), ParseError);
  fs::remove(empty);
  fs::remove(bad);
}

TEST(Oracle, Examples) {
  EXPECT_NEAR(relevance::oracle_relevance(toks("the cat sat."), std::vector<std::string>{"The cat sat."}),
              1.0, 1e-12);
  EXPECT_EQ(relevance::oracle_relevance(toks("dogs bark"), std::vector<std::string>{"cats sleep"}),
            0.0);
  // References concatenate: "a" and "a" behave like one reference "a a".
  EXPECT_NEAR(relevance::oracle_relevance(toks("a b"), std::vector<std::string>{"a", "a"}),
              oracle::dense_cosine({1, 1}, {2, 0}), 1e-12);
  EXPECT_THROW(relevance::oracle_relevance(toks("a"), std::vector<std::string>{}), ConfigError);
}

TEST(Project, Broadcast) {
  const auto one = text::tokenize("a b c");
  EXPECT_EQ(relevance::project_to_words(std::vector<double>{0.5}, one),
            (std::vector<double>{0.5, 0.5, 0.5}));
  const auto two = text::tokenize("a b. c d.");
  // spans (0,3),(3,6) because the periods are tokens
  EXPECT_EQ(relevance::project_to_words(std::vector<double>{1, 0}, two),
            (std::vector<double>{1, 1, 1, 0, 0, 0}));
  const auto three = text::tokenize("a. b c. d e f.");
  const auto v = relevance::project_to_words(std::vector<double>{0.2, 0.9, 0.4}, three);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = three.sentence_spans[k].begin; i < three.sentence_spans[k].end; ++i) {
      EXPECT_EQ(v[i], (std::vector<double>{0.2, 0.9, 0.4})[k]);
    }
  }
  EXPECT_THROW(relevance::project_to_words(std::vector<double>{1}, two), ConfigError);
}

TEST(Calibrate, Examples) {
  const auto c = relevance::calibrate(std::vector<double>{0.1, 0.9}, 10);
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  EXPECT_NEAR(c[1], 9.0, 1e-12);
  const std::vector<double> s = {0.3, 0.7, 0.0};
  EXPECT_EQ(relevance::calibrate(s, 1.0), s);
  EXPECT_EQ(relevance::calibrate(std::vector<double>{0, 0, 0}, 10), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(relevance::calibrate(s, 0.0), ConfigError);
}

TEST(Calibrate, PreservesArgmaxAndRatios) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> s(5);
    for (double& x : s) x = rng.uniform(0.01, 1.0);
    const auto c = relevance::calibrate(s, 10.0);
    EXPECT_EQ(std::max_element(s.begin(), s.end()) - s.begin(),
              std::max_element(c.begin(), c.end()) - c.begin());
    EXPECT_NEAR(c[1] / c[0], s[1] / s[0], 1e-12);
  }
}

TEST(ScoreTopic, WordCountDisjointIsZero) {
  const auto t = topic_of("zebra", {"Cats sleep. Dogs bark."});
  relevance::RelevanceConfig cfg;
  const auto v = relevance::score_topic(t, t.documents[0], cfg);
  EXPECT_EQ(v.size(), t.documents[0].tokens.size());
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(ScoreTopic, WordCountNormalisedByDocumentMax) {
  const auto t = topic_of("a b", {"a b c. a d. e f."});
  relevance::RelevanceConfig cfg;
  const auto s = relevance::sentence_scores(t, t.documents[0], cfg);
  EXPECT_EQ(s, (std::vector<double>{10.0, 5.0, 0.0}));
  cfg.normalize_word_count = false;
  EXPECT_EQ(relevance::sentence_scores(t, t.documents[0], cfg), (std::vector<double>{20.0, 10.0, 0.0}));
}

TEST(ScoreTopic, TfIdfCalibrated) {
  relevance::RelevanceConfig cfg;
  cfg.kind = relevance::ModelKind::kTfIdf;
  // x and y each occur in one of two documents, so both carry idf ln 2.
  const auto t2 = topic_of("x", {"x y.", "w z."});
  const auto s = relevance::sentence_scores(t2, t2.documents[0], cfg);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0], 10.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s[0], 7.071, 1e-3);
}

TEST(ScoreTopic, OracleStrictlyPositiveWithoutNoise) {
  corpus::SyntheticConfig sc;
  sc.num_topics = 3;
  sc.noise_ratio = 0.0;
  relevance::RelevanceConfig cfg;
  cfg.kind = relevance::ModelKind::kOracle;
  for (const auto& t : corpus::generate_synthetic_corpus(sc)) {
    for (const auto& d : t.documents) {
      for (double x : relevance::score_topic(t, d, cfg)) EXPECT_GT(x, 0.0);
    }
  }
}

TEST(ScoreTopic, MissingDependencies) {
  const auto t = topic_of("a", {"a b."});
  relevance::RelevanceConfig cfg;
  cfg.kind = relevance::ModelKind::kOracle;
  EXPECT_THROW(relevance::score_topic(t, t.documents[0], cfg), ConfigError);
  cfg.kind = relevance::ModelKind::kEmbedding;
  EXPECT_THROW(relevance::score_topic(t, t.documents[0], cfg), ConfigError);
  cfg.kind = relevance::ModelKind::kWordCount;
  cfg.calibration_factor = -1;
  EXPECT_THROW(relevance::score_topic(t, t.documents[0], cfg), ConfigError);
}

TEST(ScoreTopic, NonNegativeSentenceConstantDeterministic) {
  corpus::SyntheticConfig sc;
  sc.num_topics = 4;
  for (const auto kind : {relevance::ModelKind::kWordCount, relevance::ModelKind::kTfIdf,
                          relevance::ModelKind::kOracle}) {
    relevance::RelevanceConfig cfg;
    cfg.kind = kind;
    for (const auto& t : corpus::generate_synthetic_corpus(sc)) {
      for (const auto& d : t.documents) {
        const auto v = relevance::score_topic(t, d, cfg);
        EXPECT_EQ(v, relevance::score_topic(t, d, cfg));
        for (const auto& span : d.tokens.sentence_spans) {
          for (std::size_t i = span.begin; i < span.end; ++i) {
            EXPECT_GE(v[i], 0.0);
            EXPECT_EQ(v[i], v[span.begin]);
          }
        }
      }
    }
  }
}

TEST(ModelKind, ParseRoundTrip) {
  for (const auto k : {relevance::ModelKind::kWordCount, relevance::ModelKind::kTfIdf,
                       relevance::ModelKind::kEmbedding, relevance::ModelKind::kOracle}) {
    EXPECT_EQ(relevance::parse_model_kind(relevance::to_string(k)), k);
  }
  EXPECT_THROW(relevance::parse_model_kind("bm25"), ConfigError);
}
