#pragma once

// Encoder, additive attention with the relevance hook, and greedy decoding.
//
// At decode step t the unnormalised attention of input position i is
//
//   e_i = v . tanh(W_h h_i + W_s s_t + b_attn)
//
// and the relevance hook rescales it before the softmax: e'_i = rel_i * e_i.
// Passing no relevance vector runs the unmodified decoder.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "rsaqfs/error.hpp"
#include "rsaqfs/nnsum/model.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::nnsum {

// nullopt selects the hook-free decoder.
using RelevanceView = std::optional<std::span<const double>>;

struct EncoderOutputs {
  MatrixXd states;  // d_h x n, column i is h_i
  MatrixXd keys;    // d_a x n, W_h h_i (cached for attention)

  std::size_t size() const { return static_cast<std::size_t>(states.cols()); }
};

struct DecoderState {
  VectorXd s;
  std::size_t step = 0;
};

struct AttentionTrace {
  std::vector<double> raw;         // e_i
  std::vector<double> adjusted;    // rel_i * e_i
  std::vector<double> normalized;  // softmax of adjusted
};

struct DecodeConfig {
  std::size_t max_steps = 120;
  bool keep_traces = true;

  void validate() const {
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  }
};

inline std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Intermediate values of one recurrent step, kept for backpropagation.
struct GruCache {
  VectorXd x;
  VectorXd h_prev;
  VectorXd z;
  VectorXd r;
  VectorXd n;
};

inline VectorXd gru_step(const GruWeights& w, const VectorXd& x, const VectorXd& h_prev,
                         GruCache* cache = nullptr) {
  const auto d = static_cast<Eigen::Index>(w.size());
  const VectorXd a = w.input * x + w.bias;
  const VectorXd z = (a.head(d) + w.recurrent.topRows(d) * h_prev).unaryExpr(&sigmoid);
  const VectorXd r = (a.segment(d, d) + w.recurrent.middleRows(d, d) * h_prev).unaryExpr(&sigmoid);
  const VectorXd n =
      (a.tail(d) + w.recurrent.bottomRows(d) * r.cwiseProduct(h_prev)).array().tanh().matrix();
  VectorXd h = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h_prev);
  if (cache != nullptr) *cache = {x, h_prev, z, r, n};
  return h;
}

inline EncoderOutputs make_encoder_outputs(MatrixXd states, const ModelParams& p) {
  EncoderOutputs out;
  out.keys = p.attn_wh * states;
  out.states = std::move(states);
  return out;
}

inline void check_ids(std::span<const int> ids, const ModelParams& p) {
  for (const int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p.dims.vocab) {
      throw ConfigError("token id " + std::to_string(id) + " outside vocabulary");
    }
  }
}

// One h_i per input token from a unidirectional recurrent pass.
inline EncoderOutputs encode(std::span<const int> ids, const ModelParams& p,
                             std::vector<GruCache>* caches = nullptr) {
  if (ids.empty()) throw ConfigError("encode: empty input");
  check_ids(ids, p);
  const auto n = static_cast<Eigen::Index>(ids.size());
  MatrixXd states(static_cast<Eigen::Index>(p.dims.hidden), n);
  VectorXd h = VectorXd::Zero(static_cast<Eigen::Index>(p.dims.hidden));
  if (caches != nullptr) caches->assign(ids.size(), {});
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorXd x = p.embedding.row(ids[static_cast<std::size_t>(i)]).transpose();
    h = gru_step(p.encoder, x, h, caches != nullptr ? &(*caches)[static_cast<std::size_t>(i)] : nullptr);
    states.col(i) = h;
  }
  return make_encoder_outputs(std::move(states), p);
}

// tanh activations of the attention layer, d_a x n.
inline MatrixXd attention_hidden(const EncoderOutputs& h, const VectorXd& s, const ModelParams& p) {
  const VectorXd q = p.attn_ws * s + p.attn_b;
  return (h.keys.colwise() + q).array().tanh().matrix();
}

inline VectorXd attention_raw(const EncoderOutputs& h, const DecoderState& s,
                              const ModelParams& p) {
  return attention_hidden(h, s.s, p).transpose() * p.attn_v;
}

inline VectorXd apply_relevance(const VectorXd& raw, std::span<const double> rel) {
  if (rel.size() != static_cast<std::size_t>(raw.size())) {
    throw ConfigError("relevance vector length " + std::to_string(rel.size()) +
                      " != input length " + std::to_string(raw.size()));
  }
  VectorXd out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) out[i] = rel[static_cast<std::size_t>(i)] * raw[i];
  return out;
}

// Softmax with max subtraction.
inline VectorXd normalize(const VectorXd& scores) {
  if (scores.size() == 0) throw ConfigError("normalize: empty input");
  const double m = scores.maxCoeff();
  VectorXd e = (scores.array() - m).exp().matrix();
  return e / e.sum();
}

struct StepResult {
  VectorXd distribution;  // over the vocabulary
  DecoderState state;
  AttentionTrace trace;
};

inline DecoderState initial_state(const ModelParams& p) {
  return {VectorXd::Zero(static_cast<Eigen::Index>(p.dims.state)), 0};
}

// Consumes prev_id, attends over h and predicts the next token.
inline StepResult decode_step(int prev_id, const DecoderState& s, const EncoderOutputs& h,
                              RelevanceView rel, const ModelParams& p, bool keep_trace = true) {
  StepResult out;
  const VectorXd x = p.embedding.row(prev_id).transpose();
  out.state = {gru_step(p.decoder, x, s.s), s.step + 1};
  const VectorXd raw = attention_raw(h, out.state, p);
  const VectorXd adjusted = rel ? apply_relevance(raw, *rel) : raw;
  const VectorXd alpha = normalize(adjusted);
  const VectorXd context = h.states * alpha;
  VectorXd features(out.state.s.size() + context.size());
  features << out.state.s, context;
  out.distribution = normalize(p.out_w * features + p.out_b);
  if (keep_trace) out.trace = {to_std(raw), to_std(adjusted), to_std(alpha)};
  return out;
}

struct Generation {
  std::vector<int> ids;  // excludes START and STOP
  std::vector<AttentionTrace> traces;
  bool stopped = false;  // STOP emitted before max_steps
};

// Lowest id wins ties.
inline int argmax(const VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

// Greedy decoding from START until STOP or max_steps.
inline Generation generate(std::span<const int> ids, RelevanceView rel, const ModelParams& p,
                           const DecodeConfig& cfg = {}) {
  cfg.validate();
  if (rel && rel->size() != ids.size()) {
    throw ConfigError("relevance vector length " + std::to_string(rel->size()) +
                      " != input length " + std::to_string(ids.size()));
  }
  const EncoderOutputs h = encode(ids, p);
  Generation g;
  DecoderState s = initial_state(p);
  int prev = text::Vocabulary::kStart;
  for (std::size_t t = 0; t < cfg.max_steps; ++t) {
    StepResult r = decode_step(prev, s, h, rel, p, cfg.keep_traces);
    if (cfg.keep_traces) g.traces.push_back(std::move(r.trace));
    const int next = argmax(r.distribution);
    if (next == text::Vocabulary::kStop) {
      g.stopped = true;
      break;
    }
    g.ids.push_back(next);
    prev = next;
    s = std::move(r.state);
  }
  return g;
}

}  // namespace rsaqfs::nnsum
