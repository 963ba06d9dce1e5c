#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rsaqfs/error.hpp"
#include "rsaqfs/random.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::nnsum {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ModelDims {
  std::size_t vocab = 0;
  std::size_t embed = 32;
  std::size_t hidden = 64;  // encoder output size
  std::size_t state = 64;   // decoder state size
  std::size_t attn = 64;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Gated recurrent cell; rows of input/recurrent/bias are stacked as
// [update; reset; candidate].
struct GruWeights {
  MatrixXd input;      // 3d x d_in
  MatrixXd recurrent;  // 3d x d
  VectorXd bias;       // 3d

  std::size_t size() const { return static_cast<std::size_t>(recurrent.cols()); }
};

struct ModelParams {
  ModelDims dims;
  MatrixXd embedding;  // V x d_e, shared by encoder and decoder inputs
  GruWeights encoder;
  GruWeights decoder;
  VectorXd attn_v;   // d_a
  MatrixXd attn_wh;  // d_a x d_h
  MatrixXd attn_ws;  // d_a x d_s
  VectorXd attn_b;   // d_a
  MatrixXd out_w;    // V x (d_s + d_h)
  VectorXd out_b;    // V

  // Visits every trainable tensor with a stable name, in a fixed order.
  template <typename F>
  void for_each_tensor(F&& f) {
    f("embedding", embedding);
    f("encoder.input", encoder.input);
    f("encoder.recurrent", encoder.recurrent);
    f("encoder.bias", encoder.bias);
    f("decoder.input", decoder.input);
    f("decoder.recurrent", decoder.recurrent);
    f("decoder.bias", decoder.bias);
    f("attention.v", attn_v);
    f("attention.w_h", attn_wh);
    f("attention.w_s", attn_ws);
    f("attention.b", attn_b);
    f("output.w", out_w);
    f("output.b", out_b);
  }

  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](const char* name, auto& t) { f(name, std::as_const(t)); });
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const char*, const auto& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
  }

  bool all_finite() const {
    bool ok = true;
    for_each_tensor([&](const char*, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }

  void set_zero() {
    for_each_tensor([](const char*, auto& t) { t.setZero(); });
  }

  struct TensorView {
    const char* name;
    Eigen::Index rows;
    Eigen::Index cols;
    double* data;
  };

  std::vector<TensorView> tensors() {
    std::vector<TensorView> out;
    for_each_tensor([&](const char* name, auto& t) {
      out.push_back({name, t.rows(), t.cols(), t.data()});
    });
    return out;
  }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    if (!(a.dims == b.dims)) return false;
    const auto ta = const_cast<ModelParams&>(a).tensors();
    const auto tb = const_cast<ModelParams&>(b).tensors();
    for (std::size_t i = 0; i < ta.size(); ++i) {
      if (ta[i].rows != tb[i].rows || ta[i].cols != tb[i].cols) return false;
      if (!std::equal(ta[i].data, ta[i].data + ta[i].rows * ta[i].cols, tb[i].data)) return false;
    }
    return true;
  }
};

inline ModelParams zeros_like(const ModelDims& d) {
  ModelParams p;
  p.dims = d;
  const auto V = static_cast<Eigen::Index>(d.vocab);
  const auto E = static_cast<Eigen::Index>(d.embed);
  const auto H = static_cast<Eigen::Index>(d.hidden);
  const auto S = static_cast<Eigen::Index>(d.state);
  const auto A = static_cast<Eigen::Index>(d.attn);
  p.embedding = MatrixXd::Zero(V, E);
  p.encoder = {MatrixXd::Zero(3 * H, E), MatrixXd::Zero(3 * H, H), VectorXd::Zero(3 * H)};
  p.decoder = {MatrixXd::Zero(3 * S, E), MatrixXd::Zero(3 * S, S), VectorXd::Zero(3 * S)};
  p.attn_v = VectorXd::Zero(A);
  p.attn_wh = MatrixXd::Zero(A, H);
  p.attn_ws = MatrixXd::Zero(A, S);
  p.attn_b = VectorXd::Zero(A);
  p.out_w = MatrixXd::Zero(V, S + H);
  p.out_b = VectorXd::Zero(V);
  return p;
}

// Weights uniform in [-scale, scale]; biases zero unless include_biases.
inline ModelParams init_params(const ModelDims& d, std::uint64_t seed, double scale = 0.1,
                               bool include_biases = false) {
  if (d.vocab < text::Vocabulary::kReserved + 1 || d.embed == 0 || d.hidden == 0 ||
      d.state == 0 || d.attn == 0) {
    throw ConfigError("model dimensions must be positive and vocab > 4");
  }
  ModelParams p = zeros_like(d);
  Rng rng(seed);
  p.for_each_tensor([&](const char* name, auto& t) {
    const std::string n(name);
    const bool bias = n.ends_with(".bias") || n == "attention.b" || n == "output.b";
    if (bias && !include_biases) return;
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-scale, scale);
  });
  return p;
}

// Vocabulary plus weights: everything needed to run the summarizer.
struct ToyModel {
  text::Vocabulary vocab;
  ModelParams params;

  friend bool operator==(const ToyModel&, const ToyModel&) = default;
};

}  // namespace rsaqfs::nnsum
