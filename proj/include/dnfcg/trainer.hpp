#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dnfcg/binarizer.hpp"
#include "dnfcg/clause.hpp"
#include "dnfcg/corpus.hpp"
#include "dnfcg/master.hpp"
#include "dnfcg/pricing.hpp"
#include "dnfcg/rng.hpp"

namespace dnfcg {

struct Hyperparameters {
  double fn_penalty = 4.0;      // cost of an uncovered positive
  int complexity_budget = 30;   // total clause complexity allowed per rule
  int max_cg_iters = 30;
  double neg_ratio = 20.0;      // sampled negatives per positive
  PricingConfig pricing{};
  int top_k = 4;
  std::size_t vocab_budget = 1000;
  FrequencyMode vocab_frequency = FrequencyMode::token_count;
  std::size_t min_label_count = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(fn_penalty > 0.0)) throw std::invalid_argument("fn_penalty must be > 0");
    if (complexity_budget < 2) throw std::invalid_argument("complexity_budget must be >= 2");
    if (max_cg_iters < 1) throw std::invalid_argument("max_cg_iters must be >= 1");
    if (!(neg_ratio >= 1.0)) throw std::invalid_argument("neg_ratio must be >= 1");
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
    if (vocab_budget < 1) throw std::invalid_argument("vocab_budget must be >= 1");
    if (min_label_count < 1) throw std::invalid_argument("min_label_count must be >= 1");
    pricing.validate();
    if (pricing.max_clause_size > complexity_budget)
      throw std::invalid_argument("max_clause_size must not exceed complexity_budget");
  }

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct WeightedClause {
  Clause clause;
  double pos_acc = 0.0;  // fraction of positives satisfying the clause
  double neg_acc = 0.0;  // fraction of negatives satisfying the clause
  double weight = 0.0;   // (pos_acc - neg_acc) * n_k

  friend bool operator==(const WeightedClause&, const WeightedClause&) = default;
};

struct DnfRule {
  std::string label;
  std::vector<WeightedClause> clauses;  // empty means the rule is constantly false
  std::size_t n_k = 0;                  // positives + sampled negatives used
  std::size_t n_positives = 0;
  std::size_t n_negatives = 0;
  double train_objective = 0.0;
  double lp_objective = 0.0;
  bool cg_terminated_by_proof = false;
  bool integer_proven_optimal = true;
  int cg_iterations = 0;
  std::size_t columns_generated = 0;

  friend bool operator==(const DnfRule&, const DnfRule&) = default;
};

struct Provenance {
  std::string dataset_hash;
  std::uint64_t seed = 0;
  std::string timestamp;  // empty unless requested, keeps model files reproducible

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ModelBundle {
  Vocabulary vocabulary;
  Hyperparameters hyperparameters;
  std::map<std::string, DnfRule> rules;
  std::map<std::string, std::size_t> train_label_counts;  // every training label, before rare-label filtering
  Provenance provenance;
};

inline double clause_weight(double pos_acc, double neg_acc, double n_k) { return (pos_acc - neg_acc) * n_k; }

inline WeightedClause compute_clause_weights(const Clause& clause, std::span<const BinaryExample> positives,
                                             std::span<const BinaryExample> negatives, std::size_t n_k) {
  if (n_k == 0) throw std::invalid_argument("compute_clause_weights: n_k must be > 0");
  auto frac = [&](std::span<const BinaryExample> xs) {
    if (xs.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& e : xs) hit += clause.satisfied_by(e.features);
    return static_cast<double>(hit) / static_cast<double>(xs.size());
  };
  WeightedClause w{clause, frac(positives), frac(negatives), 0.0};
  w.weight = clause_weight(w.pos_acc, w.neg_acc, static_cast<double>(n_k));
  return w;
}

/// Uniform sample without replacement of min(ceil(neg_ratio * #positives),
/// #available) examples of other labels, in their original order. The
/// stream depends only on (seed, label).
inline std::vector<BinaryExample> sample_negatives(const std::string& label, std::span<const BinaryExample> train,
                                                   double neg_ratio, std::uint64_t seed) {
  std::size_t npos = 0;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].label == label) ++npos;
    else pool.push_back(i);
  }
  if (npos == 0) throw std::invalid_argument("sample_negatives: label '" + label + "' has no positive example");
  const auto want = static_cast<std::size_t>(std::ceil(neg_ratio * static_cast<double>(npos) - 1e-9));
  Rng rng(derive_seed(seed, label));
  std::vector<BinaryExample> out;
  for (auto k : rng.sample_indices(pool.size(), std::min(want, pool.size()))) out.push_back(train[pool[k]]);
  return out;
}

/// Column generation for one label followed by the restricted master
/// heuristic and clause weighting.
inline DnfRule train_label(const std::string& label, std::vector<BinaryExample> positives,
                           std::vector<BinaryExample> negatives, const Hyperparameters& hyper) {
  hyper.validate();
  if (positives.empty()) throw std::invalid_argument("train_label: no positive examples for '" + label + "'");

  PricingConfig pcfg = hyper.pricing;
  pcfg.max_clause_size = std::min(pcfg.max_clause_size, hyper.complexity_budget - 1);

  RmpState rmp(std::move(positives), std::move(negatives), hyper.fn_penalty, hyper.complexity_budget);
  const PricingContext pricing(rmp.positives(), rmp.negatives(), pcfg);

  auto fresh = [&](std::vector<Clause> cs) {
    std::erase_if(cs, [&](const Clause& c) { return rmp.contains(c); });
    return cs;
  };
  auto heuristic_round = [&](const DualSnapshot& d) {
    std::vector<Clause> cs;
    for (auto& p : pricing.heuristic(d)) cs.push_back(std::move(p.clause));
    return fresh(std::move(cs));
  };

  DnfRule rule;
  rule.label = label;

  // Seed columns: the heuristic's answer to the duals of the empty master.
  rule.columns_generated += rmp.add_columns(heuristic_round(solve_rmp(rmp).duals));

  bool need_final_solve = true;
  for (int it = 0; it < hyper.max_cg_iters; ++it) {
    const auto lp = solve_rmp(rmp);
    ++rule.cg_iterations;
    auto cols = heuristic_round(lp.duals);
    if (cols.empty()) cols = fresh(pricing.exact(lp.duals).all_negative);
    if (cols.empty()) {
      rule.cg_terminated_by_proof = true;
      need_final_solve = false;
      break;
    }
    rule.columns_generated += rmp.add_columns(cols);
  }
  rule.lp_objective = need_final_solve ? solve_rmp(rmp).objective : rmp.last_solution()->objective;

  const auto ip = solve_integer_rmp(rmp);
  rule.train_objective = ip.objective;
  rule.integer_proven_optimal = ip.proven_optimal;
  rule.n_positives = rmp.positives().size();
  rule.n_negatives = rmp.negatives().size();
  rule.n_k = rule.n_positives + rule.n_negatives;
  for (const auto& c : ip.selected)
    rule.clauses.push_back(compute_clause_weights(c, rmp.positives(), rmp.negatives(), rule.n_k));
  return rule;
}

struct TrainOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  bool record_timestamp = false;
};

struct LabelTiming {
  double seconds = 0.0;
};

struct TrainReport {
  ModelBundle model;
  std::map<std::string, std::string> failures;  // label -> error message
  std::map<std::string, LabelTiming> timings;
};

/// Trains one rule per label of already-binarized examples. Labels run on a
/// worker pool; results are assembled by label, so the outcome does not
/// depend on scheduling.
inline TrainReport train_binarized(const Vocabulary& vocab, const std::vector<BinaryExample>& train,
                                   const Hyperparameters& hyper, const TrainOptions& options = {}) {
  hyper.validate();
  if (train.empty()) throw std::invalid_argument("train: empty training set");
  std::vector<std::string> labels;
  for (const auto& e : train) labels.push_back(e.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  std::vector<std::optional<DnfRule>> rules(labels.size());
  std::vector<std::string> errors(labels.size());
  std::vector<double> seconds(labels.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < labels.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        std::vector<BinaryExample> pos;
        for (const auto& e : train)
          if (e.label == labels[i]) pos.push_back(e);
        auto neg = sample_negatives(labels[i], train, hyper.neg_ratio, hyper.seed);
        rules[i] = train_label(labels[i], std::move(pos), std::move(neg), hyper);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
      seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  unsigned n = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(labels.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  TrainReport report;
  report.model.vocabulary = vocab;
  report.model.hyperparameters = hyper;
  report.model.provenance.seed = hyper.seed;
  for (const auto& e : train) ++report.model.train_label_counts[e.label];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    report.timings[labels[i]].seconds = seconds[i];
    if (rules[i]) report.model.rules.emplace(labels[i], std::move(*rules[i]));
    else report.failures.emplace(labels[i], errors[i]);
  }
  return report;
}

/// Full pipeline from raw records: rare-label filter, vocabulary,
/// binarization, then per-label training.
inline TrainReport train_all(const LabeledCorpus& corpus, const Hyperparameters& hyper,
                             const TrainOptions& options = {}) {
  hyper.validate();
  if (corpus.empty()) throw std::invalid_argument("train_all: empty corpus");
  const auto kept = filter_rare_labels(corpus, hyper.min_label_count);
  if (kept.empty()) throw std::invalid_argument("train_all: no label has at least min_label_count examples");
  const auto vocab = build_vocabulary(kept, hyper.vocab_budget, hyper.vocab_frequency);
  auto report = train_binarized(vocab, binarize_corpus(kept, vocab), hyper, options);
  report.model.provenance.dataset_hash = corpus_fingerprint(kept);
  report.model.train_label_counts = corpus.label_counts();
  if (options.record_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    report.model.provenance.timestamp = buf;
  }
  return report;
}

}  // namespace dnfcg
