#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dnfcg/bitset.hpp"
#include "dnfcg/clause.hpp"
#include "dnfcg/corpus.hpp"

namespace dnfcg {

/// How word frequency is counted when picking the vocabulary.
enum class FrequencyMode {
  token_count,     // every occurrence counts
  document_count,  // a word counts once per message
};

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from an explicit ordered word list (e.g. a loaded model).
  static Vocabulary from_words(std::vector<std::string> words, std::size_t budget = 0) {
    Vocabulary v;
    v.budget_ = budget == 0 ? words.size() : budget;
    if (words.size() > v.budget_) throw std::invalid_argument("Vocabulary: more words than budget");
    v.words_ = std::move(words);
    for (std::size_t j = 0; j < v.words_.size(); ++j) {
      if (!v.index_.emplace(v.words_[j], static_cast<FeatureId>(j)).second)
        throw std::invalid_argument("Vocabulary: duplicate word '" + v.words_[j] + "'");
    }
    return v;
  }

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t budget() const noexcept { return budget_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(FeatureId j) const { return words_.at(j); }

  std::optional<FeatureId> find(std::string_view w) const {
    auto it = index_.find(std::string(w));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, FeatureId> index_;
  std::size_t budget_ = 0;
};

struct BinaryExample {
  Bitset features;
  std::string label;
  std::size_t id = 0;
};

/// The `budget` most frequent tokens of the cleaned training messages,
/// descending frequency, ties broken lexicographically.
inline Vocabulary build_vocabulary(const LabeledCorpus& train, std::size_t budget = 1000,
                                   FrequencyMode mode = FrequencyMode::token_count) {
  if (budget < 1) throw std::invalid_argument("build_vocabulary: budget must be >= 1");
  if (train.empty()) throw std::invalid_argument("build_vocabulary: empty training corpus");

  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& r : train.records()) {
    auto tokens = tokenize(clean_message(r.message));
    if (mode == FrequencyMode::document_count) {
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    }
    for (auto& t : tokens) ++freq[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > budget) ranked.resize(budget);

  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, _] : ranked) words.push_back(std::move(w));
  return Vocabulary::from_words(std::move(words), budget);
}

/// Binary bag of words over an already-cleaned message. Out-of-vocabulary
/// tokens are ignored.
inline Bitset binarize(std::string_view cleaned_message, const Vocabulary& vocab) {
  Bitset bits(vocab.size());
  for (const auto& t : tokenize(cleaned_message))
    if (auto j = vocab.find(t)) bits.set(*j);
  return bits;
}

/// Cleans and binarizes every record; ids are record positions.
inline std::vector<BinaryExample> binarize_corpus(const LabeledCorpus& corpus, const Vocabulary& vocab) {
  std::vector<BinaryExample> out;
  out.reserve(corpus.size());
  std::size_t id = 0;
  for (const auto& r : corpus.records())
    out.push_back({binarize(clean_message(r.message), vocab), r.label, id++});
  return out;
}

/// Zero-valued features of the example (complement of its set bits).
inline std::vector<FeatureId> zero_set(const BinaryExample& example) {
  std::vector<FeatureId> out;
  for (std::size_t j = 0; j < example.features.size(); ++j)
    if (!example.features.test(j)) out.push_back(static_cast<FeatureId>(j));
  return out;
}

/// Transposed view of a set of examples: for each feature, the bitset of
/// examples in which it is set. Clause coverage is the AND of its columns.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  FeatureIndex(std::span<const BinaryExample> examples, std::size_t num_features)
      : num_examples_(examples.size()), columns_(num_features, Bitset(examples.size())) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].features.size() != num_features)
        throw std::invalid_argument("FeatureIndex: example width does not match feature count");
      examples[i].features.for_each_set([&](std::size_t j) { columns_[j].set(i); });
    }
  }

  std::size_t num_examples() const noexcept { return num_examples_; }
  std::size_t num_features() const noexcept { return columns_.size(); }
  const Bitset& examples_with(FeatureId j) const { return columns_.at(j); }

  Bitset cover(const Clause& clause) const {
    Bitset c(num_examples_, true);
    for (auto j : clause.features()) c &= columns_.at(j);
    return c;
  }

 private:
  std::size_t num_examples_ = 0;
  std::vector<Bitset> columns_;
};

}  // namespace dnfcg
