#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfcg/corpus.hpp"
#include "dnfcg/rng.hpp"

namespace dnfcg::synth {

/// A label and the rule that generates its messages: every message of the
/// label contains all words of one of these clauses.
struct PlantedLabel {
  std::string name;
  std::vector<std::vector<std::string>> clauses;
};

struct PlantedSpec {
  std::vector<PlantedLabel> labels;
  std::size_t samples_per_label = 100;
  std::vector<std::string> background;  // filler vocabulary, disjoint from trigger words
  std::size_t min_background = 3;
  std::size_t max_background = 8;
  double noise_rate = 0.0;  // probability that a message's label is replaced by another label
  std::uint64_t seed = 0;

  void validate() const {
    if (labels.size() < 2) throw std::invalid_argument("synth: need at least two labels");
    if (!(noise_rate >= 0.0 && noise_rate < 0.5)) throw std::invalid_argument("synth: noise_rate must lie in [0, 0.5)");
    if (min_background > max_background) throw std::invalid_argument("synth: min_background > max_background");
    if (max_background > background.size()) throw std::invalid_argument("synth: background vocabulary too small");
    std::set<std::string> triggers, names;
    for (const auto& l : labels) {
      if (!names.insert(l.name).second) throw std::invalid_argument("synth: duplicate label " + l.name);
      if (l.clauses.empty()) throw std::invalid_argument("synth: label " + l.name + " has no planted clause");
      std::set<std::string> own;
      for (const auto& c : l.clauses) {
        if (c.empty()) throw std::invalid_argument("synth: empty planted clause");
        own.insert(c.begin(), c.end());
      }
      for (const auto& w : own)
        if (!triggers.insert(w).second) throw std::invalid_argument("synth: trigger word shared by labels: " + w);
    }
    for (const auto& w : background)
      if (triggers.contains(w)) throw std::invalid_argument("synth: background word is also a trigger: " + w);
  }
};

/// Messages are generated label by label: pick one planted clause
/// uniformly, add a uniform number of distinct background words, shuffle
/// the words, then with probability noise_rate relabel the message with a
/// uniformly chosen different label. The final corpus order is shuffled.
inline LabeledCorpus generate(const PlantedSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<RawRecord> records;
  for (std::size_t li = 0; li < spec.labels.size(); ++li) {
    const auto& label = spec.labels[li];
    for (std::size_t s = 0; s < spec.samples_per_label; ++s) {
      const auto& clause = label.clauses[rng.below(label.clauses.size())];
      std::vector<std::string> words(clause.begin(), clause.end());
      const auto nbg = spec.min_background + rng.below(spec.max_background - spec.min_background + 1);
      for (auto k : rng.sample_indices(spec.background.size(), nbg)) words.push_back(spec.background[k]);
      rng.shuffle(words);
      std::string msg;
      for (const auto& w : words) msg += (msg.empty() ? "" : " ") + w;
      std::string name = label.name;
      if (spec.noise_rate > 0.0 && rng.bernoulli(spec.noise_rate)) {
        auto other = rng.below(spec.labels.size() - 1);
        if (other >= li) ++other;
        name = spec.labels[other].name;
      }
      records.push_back({std::move(msg), std::move(name)});
    }
  }
  rng.shuffle(records);
  return LabeledCorpus::from_records(std::move(records));
}

/// A ready-made spec over a vocabulary of `vocab_size` words. Label i gets
/// a single-word clause and a two-word clause; the other words are
/// background.
inline PlantedSpec standard_spec(std::size_t num_labels, std::size_t samples_per_label, std::size_t vocab_size,
                                 double noise_rate, std::uint64_t seed) {
  if (vocab_size < 3 * num_labels + 8) throw std::invalid_argument("synth: vocabulary too small for the labels");
  PlantedSpec spec;
  spec.samples_per_label = samples_per_label;
  spec.noise_rate = noise_rate;
  spec.seed = seed;
  std::size_t w = 0;
  auto word = [&] { return "w" + std::to_string(w++); };
  for (std::size_t i = 0; i < num_labels; ++i) {
    PlantedLabel l;
    l.name = "L" + std::to_string(i);
    l.clauses.push_back({word()});
    auto a = word();
    l.clauses.push_back({a, word()});
    spec.labels.push_back(std::move(l));
  }
  while (w < vocab_size) spec.background.push_back(word());
  spec.max_background = std::min<std::size_t>(spec.max_background, spec.background.size());
  spec.min_background = std::min(spec.min_background, spec.max_background);
  return spec;
}

}  // namespace dnfcg::synth
