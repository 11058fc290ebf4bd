#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnfcg/binarizer.hpp"
#include "dnfcg/bitset.hpp"
#include "dnfcg/clause.hpp"

namespace dnfcg {

enum class ScaleMode { exact, integer_scaled };

/// Which examples the minimum document fraction of the word pool is
/// measured against.
enum class DocFracBase { all_examples, positives_only };

struct PricingConfig {
  int max_clause_size = 3;
  std::size_t pool_size = 200;
  double min_doc_frac = 0.02;
  double rc_threshold = -1e-2;
  ScaleMode scale_mode = ScaleMode::exact;
  int scale_factor = 100;
  DocFracBase doc_frac_base = DocFracBase::all_examples;
  bool fix_zero_features = true;

  void validate() const {
    if (max_clause_size < 1) throw std::invalid_argument("pricing: max_clause_size must be >= 1");
    if (pool_size < 1) throw std::invalid_argument("pricing: pool_size must be >= 1");
    if (!(min_doc_frac >= 0.0 && min_doc_frac <= 1.0))
      throw std::invalid_argument("pricing: min_doc_frac must lie in [0, 1]");
    if (scale_factor < 1) throw std::invalid_argument("pricing: scale_factor must be >= 1");
    if (std::isnan(rc_threshold)) throw std::invalid_argument("pricing: rc_threshold is NaN");
  }

  friend bool operator==(const PricingConfig&, const PricingConfig&) = default;
};

namespace detail {

inline std::size_t feature_count(std::span<const BinaryExample> positives, std::span<const BinaryExample> negatives) {
  if (!positives.empty()) return positives.front().features.size();
  if (!negatives.empty()) return negatives.front().features.size();
  return 0;
}

inline double mu_sum(const Bitset& covered, const std::vector<double>& mu) {
  double s = 0.0;
  covered.for_each_set([&](std::size_t i) { s += mu[i]; });
  return s;
}

}  // namespace detail

/// Reduced cost of a clause column: negatives it satisfies, minus the duals
/// of the positives it satisfies, minus lambda times its complexity.
inline double reduced_cost(const Clause& clause, const DualSnapshot& duals, std::span<const BinaryExample> positives,
                           std::span<const BinaryExample> negatives) {
  if (clause.empty()) throw std::invalid_argument("reduced_cost: empty clause");
  if (duals.mu.size() != positives.size()) throw std::invalid_argument("reduced_cost: one mu per positive required");
  double negs = 0.0;
  for (const auto& e : negatives) negs += clause.satisfied_by(e.features) ? 1.0 : 0.0;
  double mu = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i)
    if (clause.satisfied_by(positives[i].features)) mu += duals.mu[i];
  return negs - mu - duals.lambda * clause.complexity();
}

/// Features set in no positive example. A clause using one of them
/// satisfies no positive, so its reduced cost is at least zero.
inline std::vector<FeatureId> fixed_zero_features(std::span<const BinaryExample> positives, std::size_t num_features) {
  Bitset seen(num_features);
  for (const auto& e : positives) seen |= e.features;
  std::vector<FeatureId> out;
  for (std::size_t j = 0; j < num_features; ++j)
    if (!seen.test(j)) out.push_back(static_cast<FeatureId>(j));
  return out;
}

inline std::vector<FeatureId> fixed_zero_features(std::span<const BinaryExample> positives) {
  return fixed_zero_features(positives, detail::feature_count(positives, {}));
}

/// The candidate words for heuristic pricing: the pool_size features most
/// frequent among positives (ties by feature id), minus those occurring in
/// less than min_doc_frac of the reference examples.
inline std::vector<FeatureId> build_word_pool(std::span<const BinaryExample> positives,
                                              std::span<const BinaryExample> negatives, const PricingConfig& config) {
  config.validate();
  if (positives.empty()) throw std::invalid_argument("build_word_pool: no positive examples");
  const std::size_t nf = positives.front().features.size();
  std::vector<std::size_t> pos_freq(nf, 0), neg_freq(nf, 0);
  for (const auto& e : positives) e.features.for_each_set([&](std::size_t j) { ++pos_freq[j]; });
  for (const auto& e : negatives) e.features.for_each_set([&](std::size_t j) { ++neg_freq[j]; });

  std::vector<FeatureId> ranked;
  for (std::size_t j = 0; j < nf; ++j)
    if (pos_freq[j] > 0) ranked.push_back(static_cast<FeatureId>(j));
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](FeatureId a, FeatureId b) { return pos_freq[a] > pos_freq[b]; });
  if (ranked.size() > config.pool_size) ranked.resize(config.pool_size);

  const bool all = config.doc_frac_base == DocFracBase::all_examples;
  const double total = static_cast<double>(positives.size() + (all ? negatives.size() : 0));
  std::vector<FeatureId> pool;
  for (auto j : ranked) {
    const double docs = static_cast<double>(pos_freq[j] + (all ? neg_freq[j] : 0));
    if (docs < config.min_doc_frac * total) continue;
    pool.push_back(j);
  }
  return pool;
}

struct PricedClause {
  Clause clause;
  double reduced_cost = 0.0;
};

namespace detail {

inline void sort_priced(std::vector<PricedClause>& v) {
  std::sort(v.begin(), v.end(), [](const PricedClause& x, const PricedClause& y) {
    return x.reduced_cost != y.reduced_cost ? x.reduced_cost < y.reduced_cost : x.clause < y.clause;
  });
}

}  // namespace detail

struct PricingResult {
  std::optional<Clause> best;
  double best_rc = std::numeric_limits<double>::infinity();  // exact reduced cost of the minimiser found
  std::vector<Clause> all_negative;                          // ascending reduced cost, then clause
  std::size_t nodes = 0;
};

namespace detail {

/// Depth-first enumeration of clauses in a fixed feature order with
/// incremental coverage. Cost is either double (exact duals) or int64
/// (scaled and rounded duals).
///
/// A strict descendant of a node with positive coverage P and length l
/// covers a subset of P, at least zero negatives, and is at least one
/// literal longer. Since lambda <= 0 the complexity term grows with length,
/// so -mu(P) - lambda*(l+2) bounds every descendant from below.
template <class Cost>
class ClauseSearch {
 public:
  ClauseSearch(const FeatureIndex& pos, const FeatureIndex& neg, std::vector<FeatureId> order,
               std::vector<Cost> mu, Cost lambda, Cost neg_unit, int max_size, double threshold)
      : pos_(pos), neg_(neg), order_(std::move(order)), mu_(std::move(mu)), lambda_(lambda), neg_unit_(neg_unit),
        max_size_(max_size), threshold_(threshold) {}

  void run() {
    std::vector<FeatureId> current;
    Bitset pc(pos_.num_examples(), true), nc(neg_.num_examples(), true);
    expand(0, current, pc, nc);
  }

  std::vector<std::vector<FeatureId>> found;  // clauses below the threshold
  std::optional<std::vector<FeatureId>> best;
  Cost best_cost{};
  std::size_t nodes = 0;

 private:
  // Ties with the incumbent are kept so the smallest tied clause wins.
  bool dominated(Cost lower) const {
    return static_cast<double>(lower) >= threshold_ || (best && lower > best_cost);
  }

  Cost mu_of(const Bitset& pc) const {
    Cost s{};
    pc.for_each_set([&](std::size_t i) { s += mu_[i]; });
    return s;
  }

  void expand(std::size_t start, std::vector<FeatureId>& current, const Bitset& pc, const Bitset& nc) {
    const int len = static_cast<int>(current.size());
    if (len >= max_size_) return;
    const Cost child_cx = static_cast<Cost>(len + 2);
    for (std::size_t t = start; t < order_.size(); ++t) {
      const FeatureId j = order_[t];
      Bitset cp = pc & pos_.examples_with(j);
      const Cost mu = mu_of(cp);
      const Cost lower = -mu - lambda_ * child_cx;  // bounds the child and, a fortiori, its descendants
      if (dominated(lower)) continue;
      Bitset cn = nc & neg_.examples_with(j);
      ++nodes;
      const Cost rc = neg_unit_ * static_cast<Cost>(cn.count()) - mu - lambda_ * child_cx;
      current.push_back(j);
      record(current, rc);
      if (len + 1 < max_size_ && !dominated(lower - lambda_)) expand(t + 1, current, cp, cn);
      current.pop_back();
    }
  }

  void record(const std::vector<FeatureId>& clause, Cost rc) {
    if (static_cast<double>(rc) < threshold_) found.push_back(clause);
    auto sorted = clause;
    std::sort(sorted.begin(), sorted.end());
    if (!best || rc < best_cost || (rc == best_cost && sorted < *best)) {
      best = std::move(sorted);
      best_cost = rc;
    }
  }

  const FeatureIndex& pos_;
  const FeatureIndex& neg_;
  std::vector<FeatureId> order_;
  std::vector<Cost> mu_;
  Cost lambda_;
  Cost neg_unit_;
  int max_size_;
  double threshold_;
};

}  // namespace detail

/// Pricing state for one label. The feature indexes and the word pool do
/// not depend on the duals, so they are built once and reused by every
/// column generation iteration. The example spans must outlive the context.
class PricingContext {
 public:
  PricingContext(std::span<const BinaryExample> positives, std::span<const BinaryExample> negatives,
                 PricingConfig config)
      : positives_(positives), negatives_(negatives), config_(config) {
    config_.validate();
    if (positives_.empty()) throw std::invalid_argument("pricing: no positive examples");
    const std::size_t nf = positives_.front().features.size();
    pidx_ = FeatureIndex(positives_, nf);
    nidx_ = FeatureIndex(negatives_, nf);
    pool_ = build_word_pool(positives_, negatives_, config_);
    std::sort(pool_.begin(), pool_.end());

    // Most frequent among positives first, so strong incumbents appear early.
    std::vector<std::size_t> freq(nf, 0);
    for (std::size_t j = 0; j < nf; ++j) freq[j] = pidx_.examples_with(static_cast<FeatureId>(j)).count();
    for (std::size_t j = 0; j < nf; ++j)
      if (!config_.fix_zero_features || freq[j] > 0) search_order_.push_back(static_cast<FeatureId>(j));
    std::stable_sort(search_order_.begin(), search_order_.end(),
                     [&](FeatureId a, FeatureId b) { return freq[a] > freq[b]; });
  }

  const PricingConfig& config() const noexcept { return config_; }
  const std::vector<FeatureId>& word_pool() const noexcept { return pool_; }

  double price(const Clause& c, const DualSnapshot& duals) const {
    return static_cast<double>(nidx_.cover(c).count()) - detail::mu_sum(pidx_.cover(c), duals.mu) -
           duals.lambda * c.complexity();
  }

  /// Every size-1 and size-2 clause over the word pool with reduced cost
  /// below the threshold, ascending by reduced cost (ties by clause).
  std::vector<PricedClause> heuristic(const DualSnapshot& duals) const {
    check(duals);
    std::vector<PricedClause> out;
    auto consider = [&](std::vector<FeatureId> feats, const Bitset& pc, const Bitset& nc) {
      const double rc = static_cast<double>(nc.count()) - detail::mu_sum(pc, duals.mu) -
                        duals.lambda * (1.0 + static_cast<double>(feats.size()));
      if (rc < config_.rc_threshold) out.push_back({Clause(std::move(feats)), rc});
    };
    for (std::size_t a = 0; a < pool_.size(); ++a) {
      const Bitset& pa = pidx_.examples_with(pool_[a]);
      const Bitset& na = nidx_.examples_with(pool_[a]);
      consider({pool_[a]}, pa, na);
      if (config_.max_clause_size < 2) continue;
      for (std::size_t b = a + 1; b < pool_.size(); ++b)
        consider({pool_[a], pool_[b]}, pa & pidx_.examples_with(pool_[b]), na & nidx_.examples_with(pool_[b]));
    }
    detail::sort_priced(out);
    return out;
  }

  /// Exact pricing: the minimum reduced cost over all clauses of up to
  /// max_clause_size features (fixed-zero features excluded when enabled),
  /// plus every clause met during the search whose reduced cost is below
  /// the threshold. In integer_scaled mode the search runs on rounded duals
  /// that can only overstate reduced costs, and each candidate is then
  /// re-checked against the exact duals.
  PricingResult exact(const DualSnapshot& duals) const {
    check(duals);
    PricingResult result;
    std::vector<std::vector<FeatureId>> candidates;
    if (config_.scale_mode == ScaleMode::exact) {
      detail::ClauseSearch<double> search(pidx_, nidx_, search_order_, duals.mu, duals.lambda, 1.0,
                                          config_.max_clause_size, config_.rc_threshold);
      search.run();
      result.nodes = search.nodes;
      candidates = std::move(search.found);
      if (search.best) candidates.push_back(*search.best);
    } else {
      const auto scale = static_cast<double>(config_.scale_factor);
      std::vector<std::int64_t> mu;
      for (double m : duals.mu) mu.push_back(static_cast<std::int64_t>(std::floor(m * scale)));
      const auto lambda = static_cast<std::int64_t>(std::floor(duals.lambda * scale));
      detail::ClauseSearch<std::int64_t> search(pidx_, nidx_, search_order_, std::move(mu), lambda,
                                                config_.scale_factor, config_.max_clause_size,
                                                config_.rc_threshold * scale);
      search.run();
      result.nodes = search.nodes;
      candidates = std::move(search.found);
      if (search.best) candidates.push_back(*search.best);
    }

    std::set<Clause> seen;
    std::vector<PricedClause> priced;
    for (auto& feats : candidates) {
      std::sort(feats.begin(), feats.end());
      Clause c(feats);
      if (!seen.insert(c).second) continue;
      const double rc = price(c, duals);
      priced.push_back({std::move(c), rc});
    }
    detail::sort_priced(priced);
    if (!priced.empty()) result.best_rc = priced.front().reduced_cost;
    for (auto& p : priced)
      if (p.reduced_cost < config_.rc_threshold) result.all_negative.push_back(p.clause);
    if (!result.all_negative.empty()) result.best = result.all_negative.front();
    return result;
  }

 private:
  void check(const DualSnapshot& duals) const {
    duals.validate();
    if (duals.mu.size() != positives_.size()) throw std::invalid_argument("pricing: one mu per positive required");
  }

  std::span<const BinaryExample> positives_;
  std::span<const BinaryExample> negatives_;
  PricingConfig config_;
  FeatureIndex pidx_, nidx_;
  std::vector<FeatureId> pool_;
  std::vector<FeatureId> search_order_;
};

inline std::vector<PricedClause> heuristic_pricing_scored(std::span<const BinaryExample> positives,
                                                          std::span<const BinaryExample> negatives,
                                                          const DualSnapshot& duals, const PricingConfig& config) {
  return PricingContext(positives, negatives, config).heuristic(duals);
}

inline std::vector<Clause> heuristic_pricing(std::span<const BinaryExample> positives,
                                             std::span<const BinaryExample> negatives, const DualSnapshot& duals,
                                             const PricingConfig& config) {
  std::vector<Clause> out;
  for (auto& p : heuristic_pricing_scored(positives, negatives, duals, config)) out.push_back(std::move(p.clause));
  return out;
}

inline PricingResult exact_pricing(std::span<const BinaryExample> positives, std::span<const BinaryExample> negatives,
                                   const DualSnapshot& duals, const PricingConfig& config) {
  return PricingContext(positives, negatives, config).exact(duals);
}

}  // namespace dnfcg
