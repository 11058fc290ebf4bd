#pragma once

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnfcg/corpus.hpp"
#include "dnfcg/predictor.hpp"

namespace dnfcg {

struct EvalReport {
  double accuracy = 0.0;
  std::size_t max_list_len = 0;
  double avg_list_len = 0.0;
  std::map<std::size_t, double> per_k_accuracy;
  std::size_t n_evaluated = 0;
  std::size_t n_multi_candidate = 0;  // lists with more than one label
  std::size_t n_empty = 0;            // messages with no candidate at all
  std::optional<std::size_t> k;       // truncation used for accuracy and list stats
};

struct EvalOptions {
  std::optional<std::size_t> k;  // absent: untruncated lists
  std::size_t k_sweep_max = 10;  // per_k_accuracy for k = 1..k_sweep_max (0 disables)
  PredictOptions predict{};
};

namespace detail {

// 1-based rank of the true label in the full list, 0 when absent.
inline std::size_t rank_of(const std::vector<Candidate>& list, const std::string& label) {
  for (std::size_t r = 0; r < list.size(); ++r)
    if (list[r].label == label) return r + 1;
  return 0;
}

}  // namespace detail

/// A message counts as a hit when its true label is in the (possibly
/// truncated) candidate list.
inline EvalReport evaluate(const LabeledCorpus& dataset, const ModelBundle& model, const EvalOptions& options = {}) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (options.k && *options.k < 1) throw std::invalid_argument("evaluate: k must be >= 1");
  EvalReport rep;
  rep.k = options.k;
  rep.n_evaluated = dataset.size();
  std::size_t hits = 0, total_len = 0;
  std::vector<std::size_t> hits_at(options.k_sweep_max + 1, 0);
  for (const auto& r : dataset.records()) {
    const auto list = candidate_list(r.message, model, options.predict);
    const std::size_t len = options.k ? std::min(*options.k, list.size()) : list.size();
    const std::size_t rank = detail::rank_of(list, r.label);
    if (rank != 0 && rank <= len) ++hits;
    total_len += len;
    rep.max_list_len = std::max(rep.max_list_len, len);
    if (len > 1) ++rep.n_multi_candidate;
    if (list.empty()) ++rep.n_empty;
    for (std::size_t k = 1; k <= options.k_sweep_max; ++k)
      if (rank != 0 && rank <= k) ++hits_at[k];
  }
  const auto n = static_cast<double>(dataset.size());
  rep.accuracy = static_cast<double>(hits) / n;
  rep.avg_list_len = static_cast<double>(total_len) / n;
  for (std::size_t k = 1; k <= options.k_sweep_max; ++k) rep.per_k_accuracy[k] = static_cast<double>(hits_at[k]) / n;
  return rep;
}

inline std::map<std::size_t, double> k_sweep(const LabeledCorpus& dataset, const ModelBundle& model,
                                             std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("k_sweep: k_max must be >= 1");
  EvalOptions o;
  o.k_sweep_max = k_max;
  return evaluate(dataset, model, o).per_k_accuracy;
}

/// Messages whose true label had at least `min_train_count` training
/// examples.
inline LabeledCorpus restrict_to_frequent_labels(const LabeledCorpus& dataset, const ModelBundle& model,
                                                 std::size_t min_train_count) {
  std::vector<RawRecord> kept;
  for (const auto& r : dataset.records()) {
    const auto it = model.train_label_counts.find(r.label);
    const std::size_t c = it == model.train_label_counts.end() ? 0 : it->second;
    if (c >= min_train_count) kept.push_back(r);
  }
  return LabeledCorpus::from_records(std::move(kept));
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["max_list_len"] = r.max_list_len;
  j["avg_list_len"] = r.avg_list_len;
  j["n_evaluated"] = r.n_evaluated;
  j["n_multi_candidate"] = r.n_multi_candidate;
  j["n_empty"] = r.n_empty;
  j["k"] = r.k ? nlohmann::ordered_json(*r.k) : nlohmann::ordered_json(nullptr);
  auto& per_k = j["per_k_accuracy"] = nlohmann::ordered_json::object();
  for (const auto& [k, acc] : r.per_k_accuracy) per_k[std::to_string(k)] = acc;
  return j;
}

inline void write_report_text(std::ostream& out, const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "messages evaluated   " << r.n_evaluated << '\n';
  os << "candidate list       " << (r.k ? "top " + std::to_string(*r.k) : std::string("untruncated")) << '\n';
  os << "accuracy             " << r.accuracy << '\n';
  os << "list length max      " << r.max_list_len << '\n';
  os << "list length avg      " << std::setprecision(2) << r.avg_list_len << std::setprecision(4) << '\n';
  os << "multi-candidate      " << r.n_multi_candidate << '\n';
  os << "no candidate         " << r.n_empty << '\n';
  if (!r.per_k_accuracy.empty()) {
    os << "\n   K  accuracy\n";
    for (const auto& [k, acc] : r.per_k_accuracy) os << std::setw(4) << k << "  " << acc << '\n';
  }
  out << os.str();
}

}  // namespace dnfcg
