#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dnfcg/binarizer.hpp"
#include "dnfcg/trainer.hpp"

namespace dnfcg {

struct Candidate {
  std::string label;
  double score = 0.0;
  std::vector<WeightedClause> satisfied_clauses;  // rule order
};

struct PredictOptions {
  // When set, clauses with a negative weight still explain the candidate
  // but add nothing to its score.
  bool clip_negative_weights = false;
};

inline bool satisfies(const Bitset& message_bits, const Clause& clause) { return clause.satisfied_by(message_bits); }

inline std::vector<WeightedClause> satisfied_clauses(const Bitset& bits, const DnfRule& rule) {
  std::vector<WeightedClause> out;
  for (const auto& c : rule.clauses)
    if (satisfies(bits, c.clause)) out.push_back(c);
  return out;
}

/// Labels whose rule fires on the binarized message, by descending score
/// and then ascending label.
inline std::vector<Candidate> candidate_list(const Bitset& bits, const ModelBundle& model,
                                             const PredictOptions& options = {}) {
  std::vector<Candidate> out;
  for (const auto& [label, rule] : model.rules) {
    auto hits = satisfied_clauses(bits, rule);
    if (hits.empty()) continue;
    double score = 0.0;
    for (const auto& c : hits) score += options.clip_negative_weights ? std::max(0.0, c.weight) : c.weight;
    out.push_back({label, score, std::move(hits)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.label < b.label;
  });
  return out;
}

inline Bitset binarize_message(std::string_view message, const ModelBundle& model) {
  return binarize(clean_message(message), model.vocabulary);
}

inline std::vector<Candidate> candidate_list(std::string_view message, const ModelBundle& model,
                                             const PredictOptions& options = {}) {
  return candidate_list(binarize_message(message, model), model, options);
}

inline std::vector<Candidate> top_k(std::vector<Candidate> candidates, std::size_t k) {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  if (candidates.size() > k) candidates.resize(k);
  return candidates;
}

/// The clauses of `label`'s rule that the message satisfies; empty when
/// the rule does not fire.
inline std::vector<WeightedClause> explain(std::string_view message, const std::string& label,
                                           const ModelBundle& model) {
  const auto it = model.rules.find(label);
  if (it == model.rules.end()) throw std::invalid_argument("explain: unknown label '" + label + "'");
  return satisfied_clauses(binarize_message(message, model), it->second);
}

}  // namespace dnfcg
