// rsaqfs command-line tool: fixtures, toy training, summarization,
// evaluation and analyses. Exit codes: 0 ok, 1 internal error, 2 usage or
// configuration error.

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsaqfs/coherence.hpp"
#include "rsaqfs/io.hpp"
#include "rsaqfs/log.hpp"
#include "rsaqfs/metrics.hpp"
#include "rsaqfs/multidoc.hpp"
#include "rsaqfs/nnsum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsaqfs;

namespace {

constexpr int kSchemaVersion = 1;

double round4(double x) { return std::round(x * 1e4) / 1e4; }

json manifest(const std::string& command, const std::vector<std::string>& args, std::uint64_t seed,
              json config, json inputs, json outputs) {
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"version", RSAQFS_VERSION},
              {"seed", seed},
              {"config", std::move(config)},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)},
              {"argv", args}};
}

void write_json(const fs::path& path, const json& j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out += suffix;
  return out;
}

// Runs fn(i) for i in [0, n) on up to jobs threads. The first exception is
// rethrown after all workers stop.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

// Text files of a directory keyed by topic id: "<id>.summary.txt" or "<id>.txt".
std::map<std::string, fs::path> summary_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
    std::string id = e.path().stem().string();
    if (id.size() > 8 && id.ends_with(".summary")) id.resize(id.size() - 8);
    out[id] = e.path();
  }
  return out;
}

json score_json(const metrics::RougeScore& s) {
  return {{"precision", round4(s.precision)}, {"recall", round4(s.recall)}, {"f1", round4(s.f1)}};
}

// ---------------------------------------------------------------------------

struct GenFixtures {
  corpus::SyntheticConfig cfg;
  std::string out;
};

int gen_fixtures(const GenFixtures& o, const std::vector<std::string>& args) {
  const auto topics = corpus::generate_synthetic_corpus(o.cfg);
  corpus::write_corpus(topics, o.out);
  json files = json::array();
  for (const auto& t : topics) files.push_back((fs::path(o.out) / (t.topic_id + ".json")).string());
  const json config = {{"topics", o.cfg.num_topics},
                       {"docs_per_topic", o.cfg.docs_per_topic},
                       {"sentences_per_doc", o.cfg.sentences_per_doc},
                       {"themes", o.cfg.vocab_themes},
                       {"noise_ratio", o.cfg.noise_ratio},
                       {"lexicon_size", o.cfg.lexicon_size},
                       {"words_per_sentence", o.cfg.words_per_sentence},
                       {"query_length", o.cfg.query_length},
                       {"id_prefix", o.cfg.id_prefix}};
  write_json(fs::path(o.out) / "gen-fixtures.manifest.json",
             manifest("gen-fixtures", args, o.cfg.seed, config, json::array(), files));
  log::info("wrote ", topics.size(), " topics to ", o.out);
  return 0;
}

struct TrainToy {
  std::string corpus;
  std::string out;
  nnsum::TrainConfig cfg;
};

int train_toy(const TrainToy& o, const std::vector<std::string>& args) {
  const auto topics = corpus::load_corpus(o.corpus);
  const auto res = nnsum::train_toy(topics, o.cfg);
  const fs::path ckpt = o.out;
  nnsum::save_model(res.model, ckpt);
  std::string vocab;
  for (const auto& t : res.model.vocab.tokens()) vocab += t + "\n";
  io::write_file_atomic(with_suffix(ckpt, ".vocab"), vocab);
  std::ostringstream loss;
  loss << "epoch\tloss\n0\t" << res.initial_loss << "\n";
  for (std::size_t e = 0; e < res.loss_curve.size(); ++e) loss << e + 1 << "\t" << res.loss_curve[e] << "\n";
  io::write_file_atomic(with_suffix(ckpt, ".loss.tsv"), loss.str());
  const auto& d = res.model.params.dims;
  const json config = {{"epochs", o.cfg.epochs},
                       {"batch_size", o.cfg.batch_size},
                       {"learning_rate", o.cfg.learning_rate},
                       {"clip_norm", o.cfg.clip_norm},
                       {"init_scale", o.cfg.init_scale},
                       {"max_vocab", o.cfg.max_vocab},
                       {"max_source_tokens", o.cfg.max_source_tokens},
                       {"max_target_tokens", o.cfg.max_target_tokens},
                       {"dims", {{"vocab", d.vocab}, {"embed", d.embed}, {"hidden", d.hidden},
                                 {"state", d.state}, {"attn", d.attn}}}};
  write_json(with_suffix(ckpt, ".manifest.json"),
             manifest("train-toy", args, o.cfg.seed, config, json::array({o.corpus}),
                      json::array({ckpt.string(), with_suffix(ckpt, ".vocab").string(),
                                   with_suffix(ckpt, ".loss.tsv").string()})));
  log::info("saved ", ckpt.string(), " (final loss ", res.loss_curve.back(), ")");
  return 0;
}

struct Summarize {
  std::string mode = "rsa";
  std::string relevance = "wordcount";
  double calibration = 10.0;
  std::size_t budget = 250;
  std::string model;
  std::string embeddings;
  std::string corpus;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t max_steps = 120;
};

json trace_json(const corpus::Topic& t, const multidoc::SummaryResult& r, const Summarize& o) {
  json docs = json::array();
  for (const auto& d : r.documents) docs.push_back({{"doc_id", d.doc_id}, {"query_cosine", d.query_cosine}});
  json sents = json::array();
  for (const auto& s : r.trace) {
    sents.push_back({{"doc_id", s.doc_id},
                     {"text", text::detokenize(s.tokens)},
                     {"novelty_ratio", s.novelty_ratio},
                     {"decision", multidoc::to_string(s.decision)}});
  }
  return {{"schema_version", kSchemaVersion}, {"topic_id", t.topic_id}, {"mode", o.mode},
          {"relevance", o.relevance},          {"word_count", r.draft.word_count},
          {"budget_reached", r.budget_reached}, {"documents", docs},
          {"sentences", sents}};
}

int summarize(const Summarize& o, const std::vector<std::string>& args) {
  const auto mode = multidoc::parse_mode(o.mode);
  relevance::RelevanceConfig rc;
  rc.kind = relevance::parse_model_kind(o.relevance);
  rc.calibration_factor = o.calibration;
  multidoc::MultiDocConfig cfg;
  cfg.budget = o.budget;
  cfg.per_doc_decode.max_steps = o.max_steps;
  cfg.validate();
  if (o.jobs < 1) throw ConfigError("--jobs must be >= 1");

  const auto topics = corpus::load_corpus(o.corpus);
  const bool needs_relevance = mode != multidoc::Mode::kBlackBox;
  std::optional<relevance::EmbeddingTable> emb;
  if (needs_relevance && rc.kind == relevance::ModelKind::kEmbedding) {
    if (o.embeddings.empty()) throw ConfigError("--relevance embedding requires --embeddings");
    emb = relevance::load_embeddings(o.embeddings);
  }
  if (needs_relevance && rc.kind == relevance::ModelKind::kOracle) {
    for (const auto& t : topics) {
      if (t.references.empty()) throw ConfigError("oracle relevance: topic " + t.topic_id + " has no references");
    }
  }
  const auto model = nnsum::load_model(o.model);
  const auto summarizer =
      multidoc::model_summarizer(model, mode, rc, emb ? &*emb : nullptr, cfg.per_doc_decode);

  fs::create_directories(o.out);
  std::vector<std::string> outputs(topics.size() * 2);
  parallel_for(topics.size(), o.jobs, [&](std::size_t i) {
    const auto& t = topics[i];
    const auto r = multidoc::iterative_summarize(t, summarizer, cfg);
    const fs::path txt = fs::path(o.out) / (t.topic_id + ".summary.txt");
    const fs::path trace = fs::path(o.out) / (t.topic_id + ".trace.json");
    io::write_file_atomic(txt, r.draft.text());
    write_json(trace, trace_json(t, r, o));
    outputs[2 * i] = txt.string();
    outputs[2 * i + 1] = trace.string();
    log::debug(t.topic_id, ": ", r.draft.word_count, " words");
  });

  json inputs = json::array({o.corpus, o.model});
  if (!o.embeddings.empty()) inputs.push_back(o.embeddings);
  const json config = {{"mode", o.mode},
                       {"relevance", o.relevance},
                       {"calibration_factor", o.calibration},
                       {"budget", o.budget},
                       {"novelty_threshold", cfg.novelty_threshold},
                       {"max_steps", o.max_steps},
                       {"jobs", o.jobs}};
  write_json(fs::path(o.out) / "summarize.manifest.json",
             manifest("summarize", args, o.seed, config, inputs, outputs));
  log::info("summarized ", topics.size(), " topics into ", o.out);
  return 0;
}

struct Evaluate {
  std::string candidates;
  std::string references;
  std::string corpus;
  std::string out;
};

int evaluate(const Evaluate& o, const std::vector<std::string>& args) {
  if (o.references.empty() == o.corpus.empty()) {
    throw ConfigError("evaluate needs exactly one of --references or --corpus");
  }
  const auto cands = summary_files(o.candidates);
  if (cands.empty()) throw ConfigError("no candidate summaries in " + o.candidates);

  std::map<std::string, std::vector<std::string>> refs;
  if (!o.corpus.empty()) {
    for (const auto& t : corpus::load_corpus(o.corpus)) refs[t.topic_id] = t.references;
  } else {
    for (const auto& [id, path] : summary_files(o.references)) refs[id] = {io::read_file(path)};
  }

  json per_topic = json::object();
  metrics::RougeScore sum[4];
  for (const auto& [id, path] : cands) {
    auto it = refs.find(id);
    if (it == refs.end() || it->second.empty()) throw ConfigError("no reference for topic " + id);
    const auto r = metrics::rouge_all(io::read_file(path), it->second);
    const metrics::RougeScore parts[4] = {r.rouge1, r.rouge2, r.rouge_l, r.rouge_su4};
    for (int k = 0; k < 4; ++k) {
      sum[k].precision += parts[k].precision;
      sum[k].recall += parts[k].recall;
      sum[k].f1 += parts[k].f1;
    }
    per_topic[id] = {{"rouge1", score_json(r.rouge1)},
                     {"rouge2", score_json(r.rouge2)},
                     {"rougeL", score_json(r.rouge_l)},
                     {"rougeSU4", score_json(r.rouge_su4)}};
  }
  const double n = static_cast<double>(cands.size());
  auto mean = [&](int k) {
    return metrics::RougeScore{sum[k].precision / n, sum[k].recall / n, sum[k].f1 / n};
  };
  const json report = {{"schema_version", kSchemaVersion},
                       {"topic_count", cands.size()},
                       {"topics", per_topic},
                       {"mean",
                        {{"rouge1", score_json(mean(0))},
                         {"rouge2", score_json(mean(1))},
                         {"rougeL", score_json(mean(2))},
                         {"rougeSU4", score_json(mean(3))}}}};
  if (o.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    write_json(o.out, report);
    json inputs = json::array({o.candidates, o.corpus.empty() ? o.references : o.corpus});
    write_json(with_suffix(o.out, ".manifest.json"),
               manifest("evaluate", args, 0, json::object(), inputs, json::array({o.out})));
  }
  return 0;
}

struct Analyze {
  std::string summaries;
  std::string corpus;
  std::string connectives;
  std::string out;
};

int analyze(const Analyze& o, const std::vector<std::string>& args) {
  const auto files = summary_files(o.summaries);
  if (files.empty()) throw ConfigError("no summaries in " + o.summaries);
  const auto lex = o.connectives.empty() ? coherence::ConnectiveLexicon::defaults()
                                         : coherence::ConnectiveLexicon::load(o.connectives);
  std::map<std::string, corpus::Topic> topics;
  if (!o.corpus.empty()) {
    for (auto& t : corpus::load_corpus(o.corpus)) topics.emplace(t.topic_id, std::move(t));
  }

  json per_topic = json::object();
  std::size_t total = 0, independent = 0, abstr_n = 0;
  double copied_sum = 0.0, edit_sum = 0.0;
  for (const auto& [id, path] : files) {
    const std::string body = io::read_file(path);
    const auto sentences = coherence::sentences_of(body);
    json entry = {{"sentences", sentences.size()}};
    if (!sentences.empty()) {
      const auto rep = coherence::context_independence_rate(sentences, lex);
      total += rep.total_sentences;
      independent += rep.context_independent;
      entry["connective_starts"] = rep.connective_starts;
      entry["chain_breaks"] = rep.chain_breaks;
      entry["context_independent_rate"] = rep.context_independent_rate;
    }
    auto it = topics.find(id);
    if (it != topics.end() && !sentences.empty()) {
      std::vector<std::vector<std::string>> src;
      for (const auto& d : it->second.documents) {
        for (std::size_t k = 0; k < d.tokens.sentence_count(); ++k) {
          const auto s = d.tokens.sentence(k);
          src.emplace_back(s.begin(), s.end());
        }
      }
      std::vector<std::vector<std::string>> summ;
      for (const auto& s : sentences) summ.push_back(s.tokens);
      const auto copied = metrics::copied_sentence_fraction(summ, src);
      const auto edit = metrics::avg_min_edit_distance(summ, src);
      entry["copied_sentence_fraction"] = copied.value;
      entry["avg_min_edit_distance"] = edit.value;
      copied_sum += copied.value;
      edit_sum += edit.value;
      ++abstr_n;
    }
    per_topic[id] = entry;
  }
  json overall = {{"sentences", total}};
  if (total > 0) {
    overall["context_independent_rate"] = static_cast<double>(independent) / static_cast<double>(total);
  }
  if (abstr_n > 0) {
    overall["copied_sentence_fraction"] = copied_sum / static_cast<double>(abstr_n);
    overall["avg_min_edit_distance"] = edit_sum / static_cast<double>(abstr_n);
  }
  const json report = {{"schema_version", kSchemaVersion}, {"topics", per_topic}, {"overall", overall}};
  if (o.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    write_json(o.out, report);
    json inputs = json::array({o.summaries});
    if (!o.corpus.empty()) inputs.push_back(o.corpus);
    if (!o.connectives.empty()) inputs.push_back(o.connectives);
    write_json(with_suffix(o.out, ".manifest.json"),
               manifest("analyze", args, 0, json::object(), inputs, json::array({o.out})));
  }
  return 0;
}

struct DemoScale {
  std::size_t samples = 1000;
  std::size_t length = 1000;
  std::vector<double> scales = {1.0, 100.0};
  std::uint64_t seed = 1;
  std::string out;
};

// Mean largest softmax probability of vectors drawn uniform on [0, scale].
// Every scale sees the same underlying draws.
int demo_softmax_scale(const DemoScale& o, const std::vector<std::string>& args) {
  if (o.samples < 1 || o.length < 2) throw ConfigError("need --samples >= 1 and --length >= 2");
  Rng rng(o.seed);
  std::vector<double> mean(o.scales.size(), 0.0);
  std::vector<std::size_t> above_first(o.scales.size(), 0);
  for (std::size_t s = 0; s < o.samples; ++s) {
    nnsum::VectorXd x(static_cast<Eigen::Index>(o.length));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform();
    std::vector<double> peak(o.scales.size());
    for (std::size_t k = 0; k < o.scales.size(); ++k) {
      peak[k] = nnsum::normalize(o.scales[k] * x).maxCoeff();
      mean[k] += peak[k];
      above_first[k] += peak[k] > peak[0] ? 1 : 0;
    }
  }
  json rows = json::array();
  std::cout << "range\tmean_max_prob\tlarger_than_first\n";
  for (std::size_t k = 0; k < o.scales.size(); ++k) {
    mean[k] /= static_cast<double>(o.samples);
    std::cout << "0-" << o.scales[k] << "\t" << mean[k] << "\t" << above_first[k] << "/" << o.samples << "\n";
    rows.push_back({{"scale", o.scales[k]}, {"mean_max_prob", mean[k]}, {"larger_than_first", above_first[k]}});
  }
  if (!o.out.empty()) {
    write_json(o.out, {{"schema_version", kSchemaVersion}, {"samples", o.samples}, {"length", o.length}, {"rows", rows}});
    const json config = {{"samples", o.samples}, {"length", o.length}, {"scales", o.scales}};
    write_json(with_suffix(o.out, ".manifest.json"),
               manifest("demo-softmax-scale", args, o.seed, config, json::array(), json::array({o.out})));
  }
  return 0;
}

int run(int argc, const char* const* argv, bool allow_replay);

int replay(const std::string& path) {
  json m;
  try {
    m = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw ParseError(path, 0, "manifest has no argv");
  if (m.value("schema_version", 0) != kSchemaVersion) throw ParseError(path, 0, "unsupported schema_version");
  std::vector<std::string> args = {"rsaqfs"};
  for (const auto& a : m["argv"]) args.push_back(a.get<std::string>());
  std::vector<const char*> ptrs;
  for (const auto& a : args) ptrs.push_back(a.c_str());
  log::info("replaying ", m.value("command", std::string("?")), " from ", path);
  return run(static_cast<int>(ptrs.size()), ptrs.data(), false);
}

int run(int argc, const char* const* argv, bool allow_replay) {
  CLI::App app{"Query-focused multi-document summarization toolkit"};
  app.set_version_flag("--version", std::string(RSAQFS_VERSION));
  app.require_subcommand(1);
  const std::vector<std::string> args(argv + 1, argv + argc);

  GenFixtures gf;
  auto* gen = app.add_subcommand("gen-fixtures", "Write a synthetic topic corpus");
  gen->add_option("--out", gf.out, "Output directory")->required();
  gen->add_option("--topics", gf.cfg.num_topics, "Number of topics")->capture_default_str();
  gen->add_option("--docs", gf.cfg.docs_per_topic, "Documents per topic")->capture_default_str();
  gen->add_option("--sentences", gf.cfg.sentences_per_doc, "Sentences per document")->capture_default_str();
  gen->add_option("--themes", gf.cfg.vocab_themes, "Number of themes")->capture_default_str();
  gen->add_option("--noise", gf.cfg.noise_ratio, "Fraction of off-theme sentences")->capture_default_str();
  gen->add_option("--lexicon-size", gf.cfg.lexicon_size, "Words per theme")->capture_default_str();
  gen->add_option("--words-per-sentence", gf.cfg.words_per_sentence)->capture_default_str();
  gen->add_option("--query-length", gf.cfg.query_length)->capture_default_str();
  gen->add_option("--id-prefix", gf.cfg.id_prefix)->capture_default_str();
  gen->add_option("--seed", gf.cfg.seed)->capture_default_str();

  TrainToy tt;
  auto* train = app.add_subcommand("train-toy", "Train the toy attention model");
  train->add_option("--corpus", tt.corpus, "Topic file or directory")->required();
  train->add_option("--out", tt.out, "Checkpoint path")->required();
  train->add_option("--seed", tt.cfg.seed)->capture_default_str();
  train->add_option("--epochs", tt.cfg.epochs)->capture_default_str();
  train->add_option("--batch-size", tt.cfg.batch_size)->capture_default_str();
  train->add_option("--learning-rate", tt.cfg.learning_rate)->capture_default_str();
  train->add_option("--clip-norm", tt.cfg.clip_norm)->capture_default_str();
  train->add_option("--max-vocab", tt.cfg.max_vocab)->capture_default_str();
  train->add_option("--embed", tt.cfg.dims.embed)->capture_default_str();
  train->add_option("--hidden", tt.cfg.dims.hidden)->capture_default_str();
  train->add_option("--state", tt.cfg.dims.state)->capture_default_str();
  train->add_option("--attn", tt.cfg.dims.attn)->capture_default_str();

  Summarize so;
  auto* summ = app.add_subcommand("summarize", "Summarize every topic of a corpus");
  summ->add_option("--mode", so.mode)->check(CLI::IsMember({"rsa", "filtered", "blackbox"}))->capture_default_str();
  summ->add_option("--relevance", so.relevance)
      ->check(CLI::IsMember({"wordcount", "tfidf", "embedding", "oracle"}))
      ->capture_default_str();
  summ->add_option("--calibration-factor", so.calibration)->capture_default_str();
  summ->add_option("--budget", so.budget)->capture_default_str();
  summ->add_option("--max-steps", so.max_steps)->capture_default_str();
  summ->add_option("--model", so.model)->required();
  summ->add_option("--embeddings", so.embeddings);
  summ->add_option("--corpus", so.corpus)->required();
  summ->add_option("--out", so.out)->required();
  summ->add_option("--seed", so.seed)->capture_default_str();
  summ->add_option("--jobs", so.jobs)->capture_default_str();

  Evaluate ev;
  auto* eval = app.add_subcommand("evaluate", "ROUGE-1/2/L/SU4 of summaries against references");
  eval->add_option("--candidates", ev.candidates)->required();
  eval->add_option("--references", ev.references, "Directory of reference texts");
  eval->add_option("--corpus", ev.corpus, "Corpus whose topics carry references");
  eval->add_option("--out", ev.out, "Report path (stdout if omitted)");

  Analyze an;
  auto* ana = app.add_subcommand("analyze", "Coherence and abstractiveness of summaries");
  ana->add_option("--summaries", an.summaries)->required();
  ana->add_option("--corpus", an.corpus, "Source corpus for abstractiveness");
  ana->add_option("--connectives", an.connectives, "Connective lexicon file");
  ana->add_option("--out", an.out, "Report path (stdout if omitted)");

  DemoScale ds;
  auto* demo = app.add_subcommand("demo-softmax-scale", "Peak softmax probability versus input range");
  demo->add_option("--samples", ds.samples)->capture_default_str();
  demo->add_option("--length", ds.length)->capture_default_str();
  demo->add_option("--scales", ds.scales)->delimiter(',')->capture_default_str();
  demo->add_option("--seed", ds.seed)->capture_default_str();
  demo->add_option("--out", ds.out);

  std::string manifest_path;
  auto* rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rep->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) return gen_fixtures(gf, args);
  if (train->parsed()) return train_toy(tt, args);
  if (summ->parsed()) return summarize(so, args);
  if (eval->parsed()) return evaluate(ev, args);
  if (ana->parsed()) return analyze(an, args);
  if (demo->parsed()) return demo_softmax_scale(ds, args);
  if (rep->parsed()) {
    if (!allow_replay) throw ConfigError("a manifest cannot replay another replay");
    return replay(manifest_path);
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv, true);
  } catch (const ConfigError& e) {
    log::error(e.what());
    return 2;
  } catch (const ParseError& e) {
    log::error(e.what());
    return 2;
  } catch (const DivergenceError& e) {
    log::error(e.what());
    return 1;
  } catch (const std::exception& e) {
    log::error("internal error: ", e.what());
    return 1;
  }
}
