#include <gtest/gtest.h>

#include "rsaqfs/nnsum.hpp"

using namespace rsaqfs;
using namespace rsaqfs::nnsum;

namespace {

const ModelDims kDims{12, 5, 6, 7, 4};

std::vector<Example> random_batch(std::uint64_t seed, bool with_relevance) {
  Rng rng(seed);
  std::vector<Example> batch;
  for (int k = 0; k < 2; ++k) {
    Example e;
    for (int i = 0; i < 6; ++i) {
      e.source.push_back(static_cast<int>(4 + rng.index(8)));
      if (with_relevance) e.relevance.push_back(rng.uniform(0.0, 3.0));
    }
    for (int i = 0; i < 4; ++i) e.target.push_back(static_cast<int>(4 + rng.index(8)));
    batch.push_back(std::move(e));
  }
  return batch;
}

}  // namespace

TEST(GradCheck, AnalyticMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto p = init_params(kDims, seed, 0.5, true);
    const auto report = grad_check(p, random_batch(seed * 11, true));
    EXPECT_LT(report.max_relative_error, 1e-4) << "seed " << seed;
    EXPECT_EQ(report.per_tensor.size(), 13u);
  }
}

TEST(GradCheck, HookFreeBatch) {
  const auto p = init_params(kDims, 21, 0.5, true);
  EXPECT_LT(grad_check(p, random_batch(5, false)).max_relative_error, 1e-4);
}

TEST(GradCheck, DetectsZeroedAttentionKeyGradient) {
  const auto p = init_params(kDims, 2, 0.5, true);
  const GradientFn broken = [](const ModelParams& q, std::span<const Example> b, ModelParams* g) {
    const double loss = loss_and_gradient(q, b, g);
    if (g != nullptr) g->attn_wh.setZero();
    return loss;
  };
  const auto report = grad_check(p, random_batch(22, true), {}, broken);
  EXPECT_GT(report.per_tensor.at("attention.w_h"), 1e-2);
  EXPECT_LT(report.per_tensor.at("attention.w_s"), 1e-4);
}

TEST(GradCheck, InvalidOptions) {
  const auto p = init_params(kDims, 3);
  const auto batch = random_batch(1, true);
  GradCheckOptions o;
  o.coordinates_per_tensor = 0;
  EXPECT_THROW(grad_check(p, batch, o), ConfigError);
  o = {};
  o.epsilon = 1e-2;
  EXPECT_THROW(grad_check(p, batch, o), ConfigError);
  o.epsilon = 1e-7;
  EXPECT_THROW(grad_check(p, batch, o), ConfigError);
}

TEST(GradCheck, NonFiniteGradientRejected) {
  const auto p = init_params(kDims, 4);
  const GradientFn nan_grad = [](const ModelParams& q, std::span<const Example> b, ModelParams* g) {
    const double loss = loss_and_gradient(q, b, g);
    if (g != nullptr) g->out_b[0] = std::numeric_limits<double>::quiet_NaN();
    return loss;
  };
  EXPECT_THROW(grad_check(p, random_batch(2, true), {}, nan_grad), Error);
}
