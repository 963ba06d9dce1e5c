#pragma once

// Teacher-forced cross-entropy, its analytic gradient, and the seeded Adam
// training loop for the toy summarizer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rsaqfs/corpus.hpp"
#include "rsaqfs/error.hpp"
#include "rsaqfs/log.hpp"
#include "rsaqfs/nnsum/model.hpp"
#include "rsaqfs/nnsum/seq2seq.hpp"
#include "rsaqfs/random.hpp"
#include "rsaqfs/textproc.hpp"

namespace rsaqfs::nnsum {

struct Example {
  std::vector<int> source;
  std::vector<int> target;       // without STOP; STOP is appended as the final label
  std::vector<double> relevance;  // empty: hook-free attention
};

namespace detail {

// Accumulates gradients of one recurrent step into grad; returns dL/dh_prev
// and adds dL/dx to dx.
inline VectorXd gru_backward(const GruWeights& w, const GruCache& c, const VectorXd& dh,
                             GruWeights& grad, VectorXd& dx) {
  const auto d = static_cast<Eigen::Index>(w.size());
  const VectorXd dn = dh.cwiseProduct((1.0 - c.z.array()).matrix());
  const VectorXd dz = dh.cwiseProduct(c.h_prev - c.n);
  VectorXd dh_prev = dh.cwiseProduct(c.z);

  const VectorXd dan = dn.cwiseProduct((1.0 - c.n.array().square()).matrix());
  const VectorXd rh = c.r.cwiseProduct(c.h_prev);
  const VectorXd drh = w.recurrent.bottomRows(d).transpose() * dan;
  const VectorXd dr = drh.cwiseProduct(c.h_prev);
  dh_prev += drh.cwiseProduct(c.r);

  const VectorXd daz = dz.cwiseProduct(c.z.cwiseProduct((1.0 - c.z.array()).matrix()));
  const VectorXd dar = dr.cwiseProduct(c.r.cwiseProduct((1.0 - c.r.array()).matrix()));

  VectorXd da(3 * d);
  da << daz, dar, dan;
  grad.input.noalias() += da * c.x.transpose();
  grad.bias += da;
  grad.recurrent.topRows(d).noalias() += daz * c.h_prev.transpose();
  grad.recurrent.middleRows(d, d).noalias() += dar * c.h_prev.transpose();
  grad.recurrent.bottomRows(d).noalias() += dan * rh.transpose();
  dh_prev.noalias() += w.recurrent.topRows(d).transpose() * daz;
  dh_prev.noalias() += w.recurrent.middleRows(d, d).transpose() * dar;
  dx.noalias() += w.input.transpose() * da;
  return dh_prev;
}

struct StepCache {
  int input_id = 0;
  int target_id = 0;
  GruCache gru;
  VectorXd s;
  MatrixXd hidden;  // tanh(W_h h_i + W_s s + b), d_a x n
  VectorXd alpha;
  VectorXd features;  // [s; context]
  VectorXd prob;
};

}  // namespace detail

// Sum of token cross-entropies of one example. When grad is non-null the
// gradient of (sum * scale) is accumulated into it.
inline double example_loss(const ModelParams& p, const Example& ex, ModelParams* grad,
                           double scale = 1.0) {
  if (!ex.relevance.empty() && ex.relevance.size() != ex.source.size()) {
    throw ConfigError("example relevance length differs from source length");
  }
  check_ids(ex.target, p);
  std::vector<GruCache> enc_cache;
  const EncoderOutputs h = encode(ex.source, p, grad != nullptr ? &enc_cache : nullptr);
  const auto n = static_cast<Eigen::Index>(ex.source.size());
  const auto ds_size = static_cast<Eigen::Index>(p.dims.state);

  std::vector<detail::StepCache> steps(ex.target.size() + 1);
  VectorXd s = VectorXd::Zero(ds_size);
  double loss = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    auto& c = steps[t];
    c.input_id = t == 0 ? text::Vocabulary::kStart : ex.target[t - 1];
    c.target_id = t < ex.target.size() ? ex.target[t] : text::Vocabulary::kStop;
    const VectorXd x = p.embedding.row(c.input_id).transpose();
    s = gru_step(p.decoder, x, s, &c.gru);
    c.s = s;
    c.hidden = attention_hidden(h, s, p);
    VectorXd e = c.hidden.transpose() * p.attn_v;
    if (!ex.relevance.empty()) e = apply_relevance(e, ex.relevance);
    c.alpha = normalize(e);
    c.features.resize(ds_size + h.states.rows());
    c.features << s, h.states * c.alpha;
    c.prob = normalize(p.out_w * c.features + p.out_b);
    loss -= std::log(c.prob[c.target_id]);
  }
  if (grad == nullptr) return loss;

  MatrixXd dstates = MatrixXd::Zero(h.states.rows(), n);
  MatrixXd dkeys = MatrixXd::Zero(h.keys.rows(), n);
  VectorXd ds_carry = VectorXd::Zero(ds_size);
  for (std::size_t k = steps.size(); k-- > 0;) {
    const auto& c = steps[k];
    VectorXd dlogits = c.prob * scale;
    dlogits[c.target_id] -= scale;
    grad->out_w.noalias() += dlogits * c.features.transpose();
    grad->out_b += dlogits;
    const VectorXd dfeat = p.out_w.transpose() * dlogits;
    VectorXd ds = dfeat.head(ds_size) + ds_carry;
    const VectorXd dcontext = dfeat.tail(h.states.rows());

    dstates.noalias() += dcontext * c.alpha.transpose();
    const VectorXd dalpha = h.states.transpose() * dcontext;
    VectorXd de = c.alpha.cwiseProduct((dalpha.array() - c.alpha.dot(dalpha)).matrix());
    if (!ex.relevance.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) de[i] *= ex.relevance[static_cast<std::size_t>(i)];
    }
    grad->attn_v.noalias() += c.hidden * de;
    const MatrixXd dpre =
        (p.attn_v * de.transpose()).cwiseProduct((1.0 - c.hidden.array().square()).matrix());
    dkeys += dpre;
    const VectorXd dq = dpre.rowwise().sum();
    grad->attn_ws.noalias() += dq * c.s.transpose();
    grad->attn_b += dq;
    ds.noalias() += p.attn_ws.transpose() * dq;

    VectorXd dx = VectorXd::Zero(p.embedding.cols());
    ds_carry = detail::gru_backward(p.decoder, c.gru, ds, grad->decoder, dx);
    grad->embedding.row(c.input_id) += dx.transpose();
  }

  grad->attn_wh.noalias() += dkeys * h.states.transpose();
  dstates.noalias() += p.attn_wh.transpose() * dkeys;
  VectorXd dh_carry = VectorXd::Zero(h.states.rows());
  for (Eigen::Index i = n; i-- > 0;) {
    const VectorXd dh = dstates.col(i) + dh_carry;
    VectorXd dx = VectorXd::Zero(p.embedding.cols());
    dh_carry = detail::gru_backward(p.encoder, enc_cache[static_cast<std::size_t>(i)], dh,
                                    grad->encoder, dx);
    grad->embedding.row(ex.source[static_cast<std::size_t>(i)]) += dx.transpose();
  }
  return loss;
}

inline std::size_t label_count(std::span<const Example> batch) {
  std::size_t n = 0;
  for (const auto& ex : batch) n += ex.target.size() + 1;
  return n;
}

// Mean per-token cross-entropy over the batch; grad (if given) is overwritten
// with its gradient.
inline double loss_and_gradient(const ModelParams& p, std::span<const Example> batch,
                                ModelParams* grad) {
  if (batch.empty()) throw ConfigError("empty batch");
  const double scale = 1.0 / static_cast<double>(label_count(batch));
  if (grad != nullptr) {
    *grad = zeros_like(p.dims);
  }
  double total = 0.0;
  for (const auto& ex : batch) total += example_loss(p, ex, grad, scale);
  return total * scale;
}

using GradientFn = std::function<double(const ModelParams&, std::span<const Example>, ModelParams*)>;

// ---------------------------------------------------------------------------

struct TrainConfig {
  ModelDims dims;  // vocab is filled from the built vocabulary
  std::size_t max_vocab = 2000;
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  double learning_rate = 5e-3;
  double clip_norm = 5.0;
  double init_scale = 0.1;
  std::size_t max_source_tokens = 400;
  std::size_t max_target_tokens = 100;
  std::uint64_t seed = 1;
};

struct TrainResult {
  ToyModel model;
  double initial_loss = 0.0;         // mean loss over the training set before any update
  std::vector<double> loss_curve;    // mean training loss per epoch
};

// Training target for one document: its sentences that occur verbatim in a
// reference, in document order. Falls back to the first reference when no
// sentence is reference-supported.
inline std::vector<std::string> training_target(const corpus::Topic& topic,
                                                const corpus::Document& doc,
                                                std::size_t max_tokens) {
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : topic.references) refs.push_back(text::tokenize(r).tokens);
  auto occurs = [&](std::span<const std::string> needle) {
    for (const auto& hay : refs) {
      if (std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end()) {
        return true;
      }
    }
    return false;
  };
  std::vector<std::string> target;
  for (std::size_t k = 0; k < doc.tokens.sentence_count(); ++k) {
    const auto sent = doc.tokens.sentence(k);
    if (occurs(sent)) target.insert(target.end(), sent.begin(), sent.end());
  }
  if (target.empty() && !refs.empty()) target = refs.front();
  if (target.size() > max_tokens) target.resize(max_tokens);
  return target;
}

inline std::vector<Example> make_examples(const std::vector<corpus::Topic>& topics,
                                          const text::Vocabulary& vocab,
                                          const TrainConfig& cfg) {
  std::vector<Example> out;
  for (const auto& topic : topics) {
    if (topic.references.empty()) continue;
    for (const auto& doc : topic.documents) {
      if (doc.tokens.empty()) continue;
      Example ex;
      auto src = std::span<const std::string>(doc.tokens.tokens);
      src = src.first(std::min(src.size(), cfg.max_source_tokens));
      ex.source = text::encode_ids(src, vocab);
      ex.target = text::encode_ids(training_target(topic, doc, cfg.max_target_tokens), vocab);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

inline text::Vocabulary corpus_vocabulary(const std::vector<corpus::Topic>& topics,
                                          std::size_t max_size) {
  std::vector<text::TokenizedText> texts;
  for (const auto& t : topics) {
    texts.push_back(text::tokenize(t.query));
    for (const auto& d : t.documents) texts.push_back(d.tokens);
    for (const auto& r : t.references) texts.push_back(text::tokenize(r));
  }
  return text::build_vocabulary(texts, max_size);
}

class Adam {
 public:
  explicit Adam(const ModelParams& like, double lr) : lr_(lr), m_(zeros_like(like.dims)), v_(m_) {}

  void update(ModelParams& p, ModelParams& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    auto tp = p.tensors();
    auto tg = g.tensors();
    auto tm = m_.tensors();
    auto tv = v_.tensors();
    for (std::size_t k = 0; k < tp.size(); ++k) {
      const Eigen::Index n = tp[k].rows * tp[k].cols;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double gi = tg[k].data[i];
        double& mi = tm[k].data[i];
        double& vi = tv[k].data[i];
        mi = kBeta1 * mi + (1.0 - kBeta1) * gi;
        vi = kBeta2 * vi + (1.0 - kBeta2) * gi * gi;
        tp[k].data[i] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + kEps);
      }
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  std::uint64_t t_ = 0;
  ModelParams m_;
  ModelParams v_;
};

inline double global_norm(ModelParams& g) {
  double sq = 0.0;
  for (const auto& t : g.tensors()) {
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) sq += t.data[i] * t.data[i];
  }
  return std::sqrt(sq);
}

inline double mean_loss(const ModelParams& p, std::span<const Example> examples) {
  return loss_and_gradient(p, examples, nullptr);
}

// Trains with unit relevance everywhere, so the hook only matters at
// inference time. Deterministic for a fixed seed and corpus.
inline TrainResult train_toy(const std::vector<corpus::Topic>& corpus, const TrainConfig& cfg,
                             const std::function<void(std::size_t, double)>& on_epoch = {}) {
  if (corpus.empty()) throw ConfigError("train_toy: empty corpus");
  if (cfg.batch_size == 0 || cfg.epochs == 0) throw ConfigError("train_toy: zero batch/epochs");
  TrainResult result;
  result.model.vocab = corpus_vocabulary(corpus, cfg.max_vocab);
  ModelDims dims = cfg.dims;
  dims.vocab = result.model.vocab.size();
  std::vector<Example> examples = make_examples(corpus, result.model.vocab, cfg);
  if (examples.empty()) throw ConfigError("train_toy: corpus has no topics with references");

  ModelParams& p = result.model.params;
  p = init_params(dims, cfg.seed, cfg.init_scale);
  result.initial_loss = mean_loss(p, examples);
  Adam opt(p, cfg.learning_rate);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  ModelParams grad = zeros_like(dims);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_labels = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      std::vector<Example> batch;
      for (std::size_t k = b; k < std::min(order.size(), b + cfg.batch_size); ++k) {
        batch.push_back(examples[order[k]]);
      }
      const double loss = loss_and_gradient(p, batch, &grad);
      ++step;
      if (!std::isfinite(loss)) throw DivergenceError(step, loss);
      const double norm = global_norm(grad);
      if (!std::isfinite(norm)) throw DivergenceError(step, norm);
      if (norm > cfg.clip_norm) {
        grad.for_each_tensor([&](const char*, auto& t) { t *= cfg.clip_norm / norm; });
      }
      opt.update(p, grad);
      const std::size_t labels = label_count(batch);
      epoch_loss += loss * static_cast<double>(labels);
      epoch_labels += labels;
    }
    const double mean = epoch_loss / static_cast<double>(epoch_labels);
    result.loss_curve.push_back(mean);
    log::info("epoch ", epoch + 1, "/", cfg.epochs, " loss ", mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace rsaqfs::nnsum
