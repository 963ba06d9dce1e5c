#include <gtest/gtest.h>

#include <cmath>

#include "rsaqfs/nnsum.hpp"
#include "rsaqfs/random.hpp"

using namespace rsaqfs;
using namespace rsaqfs::nnsum;

namespace {

ModelDims small_dims() { return {20, 6, 8, 7, 5}; }

std::vector<int> random_ids(Rng& rng, std::size_t n, std::size_t vocab) {
  std::vector<int> ids(n);
  for (int& id : ids) id = static_cast<int>(text::Vocabulary::kReserved + rng.index(vocab - 4));
  return ids;
}

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(Encode, ShapeAndDeterminism) {
  const auto p = init_params(small_dims(), 1);
  Rng rng(2);
  const auto ids = random_ids(rng, 9, 20);
  const auto a = encode(ids, p);
  EXPECT_EQ(a.size(), 9u);
  EXPECT_EQ(a.states.rows(), 8);
  EXPECT_EQ(a.states, encode(ids, p).states);
  EXPECT_THROW(encode(std::vector<int>{}, p), ConfigError);
  EXPECT_THROW(encode(std::vector<int>{25}, p), ConfigError);
}

TEST(Encode, UnidirectionalPrefix) {
  const auto p = init_params(small_dims(), 3, 0.5, true);
  std::vector<int> a = {4, 5, 6, 7, 8};
  std::vector<int> b = a;
  b.back() = 9;
  const auto ha = encode(a, p);
  const auto hb = encode(b, p);
  EXPECT_EQ(ha.states.leftCols(4), hb.states.leftCols(4));
  EXPECT_NE(ha.states.col(4), hb.states.col(4));
}

TEST(Attention, ZeroVGivesZeroScores) {
  auto p = init_params(small_dims(), 4);
  p.attn_v.setZero();
  const auto h = encode(std::vector<int>{4, 5, 6}, p);
  const DecoderState s{VectorXd::Constant(7, 0.3), 1};
  EXPECT_EQ(attention_raw(h, s, p), VectorXd::Zero(3));
}

TEST(Attention, OneDimensionalWorkedCase) {
  ModelDims d{5, 1, 1, 1, 1};
  auto p = zeros_like(d);
  p.attn_v << 1.0;
  p.attn_wh << 1.0;
  p.attn_ws << 0.0;
  EncoderOutputs h = make_encoder_outputs(MatrixXd::Constant(1, 1, 0.5), p);
  const DecoderState s{VectorXd::Constant(1, 123.0), 0};
  const auto e = attention_raw(h, s, p);
  EXPECT_NEAR(e[0], std::tanh(0.5), 1e-15);
  EXPECT_NEAR(e[0], 0.4621, 1e-4);
}

TEST(Attention, IdenticalStatesIdenticalScores) {
  const auto p = init_params(small_dims(), 5);
  MatrixXd states(8, 2);
  states.col(0) = VectorXd::LinSpaced(8, -1, 1);
  states.col(1) = states.col(0);
  const auto h = make_encoder_outputs(states, p);
  const auto e = attention_raw(h, {VectorXd::Constant(7, 0.1), 0}, p);
  EXPECT_EQ(e[0], e[1]);
}

TEST(ApplyRelevance, Examples) {
  const VectorXd raw = vec({2.0, -1.5, 0.25});
  EXPECT_EQ(apply_relevance(raw, std::vector<double>{1, 1, 1}), raw);
  EXPECT_EQ(apply_relevance(raw, std::vector<double>{0, 0, 0}), VectorXd::Zero(3));
  EXPECT_EQ(apply_relevance(vec({2, 2}), std::vector<double>{1, 0}), vec({2, 0}));
  EXPECT_THROW(apply_relevance(raw, std::vector<double>{1, 1}), ConfigError);
}

TEST(ApplyRelevance, NegativeLogitsAreScaledAsIs) {
  // Down-weighting a negative logit raises its share; the hook is applied
  // to signed scores without correction.
  const VectorXd raw = vec({-2.0, -2.0});
  const auto alpha = normalize(apply_relevance(raw, std::vector<double>{1.0, 0.1}));
  EXPECT_GT(alpha[1], alpha[0]);
}

TEST(Normalize, Examples) {
  const auto a = normalize(vec({0, 0}));
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.5);
  const auto b = normalize(vec({1, 2}));
  const double e = std::exp(1.0);
  EXPECT_NEAR(b[0], 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(b[1], e / (1.0 + e), 1e-15);
  EXPECT_NEAR(b[0], 0.2689, 1e-4);
  EXPECT_NEAR(b[1], 0.7311, 1e-4);
  const VectorXd x = vec({0.3, -1.2, 4.0});
  const auto base = normalize(x);
  for (double c : {-50.0, 7.5, 300.0}) {
    const auto shifted = normalize((x.array() + c).matrix());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(shifted[i], base[i], 1e-14);
  }
  const auto big = normalize(vec({1000.0, 999.0}));
  EXPECT_TRUE(big.allFinite());
  EXPECT_THROW(normalize(VectorXd()), ConfigError);
}

TEST(Normalize, ScaleMonotone) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd x(50);
    for (int i = 0; i < 50; ++i) x[i] = rng.uniform();
    double prev = 0.0;
    for (double a : {1.0, 2.0, 5.0, 10.0, 100.0}) {
      const double m = normalize(a * x).maxCoeff();
      EXPECT_GE(m, prev);
      prev = m;
    }
  }
}

TEST(Normalize, MonotoneRelevanceOnPositiveLogits) {
  const VectorXd raw = vec({1.5, 1.5, 0.2});
  const auto alpha = normalize(apply_relevance(raw, std::vector<double>{3.0, 2.0, 1.0}));
  EXPECT_GT(alpha[0], alpha[1]);
}

TEST(DecodeStep, DistributionAndTraces) {
  const auto p = init_params(small_dims(), 6, 0.3, true);
  const std::vector<int> ids = {4, 9, 13, 5};
  const auto h = encode(ids, p);
  const std::vector<double> ones(4, 1.0);
  const auto r = decode_step(text::Vocabulary::kStart, initial_state(p), h, std::span<const double>(ones), p);
  EXPECT_NEAR(r.distribution.sum(), 1.0, 1e-9);
  EXPECT_EQ(r.trace.adjusted, r.trace.raw);
  double total = 0;
  for (double a : r.trace.normalized) {
    EXPECT_GE(a, 0.0);
    total += a;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(r.state.step, 1u);
}

TEST(DecodeStep, OneHotRelevanceOnEqualPositiveScores) {
  // v, W_h chosen so every position gets the same positive raw score.
  ModelDims d{8, 2, 2, 2, 1};
  auto p = zeros_like(d);
  p.attn_v << 1.0;
  p.attn_b << 0.5;
  const std::vector<int> ids = {4, 5, 6, 7};
  const auto h = encode(ids, p);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    std::vector<double> rel(ids.size(), 0.0);
    rel[j] = 1.0;
    const auto r = decode_step(text::Vocabulary::kStart, initial_state(p), h,
                               std::span<const double>(rel), p);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EXPECT_GT(r.trace.raw[i], 0.0);
      if (i != j) {
        EXPECT_GT(r.trace.normalized[j], r.trace.normalized[i]);
      }
    }
  }
}

TEST(Generate, UnitRelevanceMatchesHookFree) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = init_params(small_dims(), 100 + static_cast<std::uint64_t>(trial), 0.8, true);
    const auto ids = random_ids(rng, 1 + rng.index(15), 20);
    const std::vector<double> ones(ids.size(), 1.0);
    DecodeConfig cfg;
    cfg.max_steps = 25;
    const auto a = generate(ids, std::nullopt, p, cfg);
    const auto b = generate(ids, std::span<const double>(ones), p, cfg);
    EXPECT_EQ(a.ids, b.ids);
    ASSERT_EQ(a.traces.size(), b.traces.size());
    for (std::size_t t = 0; t < a.traces.size(); ++t) {
      EXPECT_EQ(a.traces[t].normalized, b.traces[t].normalized);
    }
  }
}

TEST(Generate, ZeroRelevanceGivesUniformAttention) {
  const auto p = init_params(small_dims(), 8, 0.8, true);
  const std::vector<int> ids = {4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> zeros(ids.size(), 0.0);
  const auto g = generate(ids, std::span<const double>(zeros), p, {30, true});
  ASSERT_FALSE(g.traces.empty());
  for (const auto& tr : g.traces) {
    for (double a : tr.normalized) EXPECT_NEAR(a, 1.0 / 7.0, 1e-12);
  }
}

TEST(Generate, LengthMismatchAndConfig) {
  const auto p = init_params(small_dims(), 9);
  const std::vector<int> ids = {4, 5};
  const std::vector<double> rel = {1.0};
  EXPECT_THROW(generate(ids, std::span<const double>(rel), p), ConfigError);
  EXPECT_THROW(generate(ids, std::nullopt, p, {0, true}), ConfigError);
}

TEST(Generate, RespectsMaxStepsAndIsDeterministic) {
  const auto p = init_params(small_dims(), 10, 0.5, true);
  const std::vector<int> ids = {4, 5, 6};
  const auto a = generate(ids, std::nullopt, p, {3, true});
  EXPECT_LE(a.ids.size(), 3u);
  EXPECT_EQ(a.ids, generate(ids, std::nullopt, p, {3, true}).ids);
  const auto untraced = generate(ids, std::nullopt, p, {3, false});
  EXPECT_TRUE(untraced.traces.empty());
  EXPECT_EQ(untraced.ids, a.ids);
}

TEST(Argmax, LowestIdWinsTies) {
  EXPECT_EQ(argmax(vec({0.2, 0.5, 0.5, 0.1})), 1);
  EXPECT_EQ(argmax(vec({1.0, 1.0})), 0);
}

TEST(Generate, StopsOnStopToken) {
  ModelDims d{6, 2, 2, 2, 2};
  auto p = zeros_like(d);
  p.out_b[text::Vocabulary::kStop] = 5.0;
  const auto g = generate(std::vector<int>{4, 5}, std::nullopt, p);
  EXPECT_TRUE(g.stopped);
  EXPECT_TRUE(g.ids.empty());
  EXPECT_EQ(g.traces.size(), 1u);
}
