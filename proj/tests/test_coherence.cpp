#include <gtest/gtest.h>

#include <filesystem>

#include "rsaqfs/coherence.hpp"
#include "rsaqfs/random.hpp"

using namespace rsaqfs;
using namespace rsaqfs::coherence;

namespace {

bool connective(std::string_view s) {
  return starts_with_connective(text::tokenize(s), ConnectiveLexicon::defaults());
}
bool chain(std::string_view s) { return breaks_reference_chain(text::tokenize(s)); }

}  // namespace

TEST(Connective, Examples) {
  EXPECT_TRUE(connective("However, the plan failed."));
  EXPECT_FALSE(connective("Plans failed."));
  EXPECT_TRUE(connective("In addition, costs rose."));
  EXPECT_TRUE(connective("ON THE OTHER HAND prices fell."));
  EXPECT_FALSE(connective("Inside, costs rose."));
}

TEST(Connective, LongestMatchWins) {
  const ConnectiveLexicon lex({"on", "on the other hand"});
  const auto tt = text::tokenize("On the other hand, no.");
  EXPECT_EQ(lex.longest_match(tt.tokens), 4u);
  EXPECT_EQ(ConnectiveLexicon::defaults().size(), 25u);
}

TEST(Connective, LexiconValidation) {
  EXPECT_THROW(ConnectiveLexicon({}), ConfigError);
  EXPECT_THROW(ConnectiveLexicon({"ok", "  "}), ConfigError);
}

TEST(Connective, ShippedLexiconFileMatchesDefaults) {
  const auto lex = ConnectiveLexicon::load(RSAQFS_DATA_DIR "/connectives.txt");
  EXPECT_EQ(lex.size(), ConnectiveLexicon::defaults().size());
  EXPECT_THROW(ConnectiveLexicon::load("/nonexistent/lexicon.txt"), ConfigError);
}

TEST(ReferenceChain, Examples) {
  EXPECT_TRUE(chain("He agreed."));
  EXPECT_FALSE(chain("Barack Obama visited Paris."));
  EXPECT_TRUE(chain("The proposal was rejected."));
  EXPECT_FALSE(chain("The United Nations met."));
  EXPECT_TRUE(chain("Officials said that talks stalled."));
  // "the" + lowercase only counts inside the first five tokens.
  EXPECT_FALSE(chain("Barack Obama visited Paris with the delegation."));
  EXPECT_FALSE(chain("Theirsworth Ltd grew."));
}

TEST(Rate, HandLabelledFixture) {
  const std::string body = io::read_file(RSAQFS_FIXTURE_DIR "/coherence_fixture.txt");
  const auto sentences = sentences_of(body);
  ASSERT_EQ(sentences.size(), 10u);
  const auto r = context_independence_rate(sentences, ConnectiveLexicon::defaults());
  EXPECT_EQ(r.total_sentences, 10u);
  EXPECT_EQ(r.context_independent, 3u);
  EXPECT_DOUBLE_EQ(r.context_independent_rate, 0.3);
  EXPECT_EQ(r.connective_starts, 3u);
  EXPECT_EQ(r.chain_breaks, 6u);
  EXPECT_GE(r.connective_starts + r.chain_breaks, r.total_sentences - r.context_independent);
}

TEST(Rate, Extremes) {
  const auto lex = ConnectiveLexicon::defaults();
  std::vector<corpus::Document> clean = {
      corpus::Document("a", "Barack Obama visited Paris. Angela Merkel met Macron.")};
  EXPECT_EQ(context_independence_rate(std::span<const corpus::Document>(clean), lex)
                .context_independent_rate,
            1.0);
  std::vector<corpus::Document> dirty = {
      corpus::Document("b", "However, Paris won. However, Rome lost.")};
  EXPECT_EQ(context_independence_rate(std::span<const corpus::Document>(dirty), lex)
                .context_independent_rate,
            0.0);
  EXPECT_THROW(context_independence_rate(std::span<const text::TokenizedText>(), lex), ConfigError);
}

TEST(Rate, OrderInvariant) {
  auto sentences = sentences_of(io::read_file(RSAQFS_FIXTURE_DIR "/coherence_fixture.txt"));
  const auto lex = ConnectiveLexicon::defaults();
  const auto base = context_independence_rate(sentences, lex).context_independent_rate;
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    rng.shuffle(sentences);
    EXPECT_EQ(context_independence_rate(sentences, lex).context_independent_rate, base);
  }
}
