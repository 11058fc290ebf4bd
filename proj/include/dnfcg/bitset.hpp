#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnfcg {

/// Fixed-width bit vector with the handful of set operations clause
/// evaluation needs (subset test, intersection, popcount).
class Bitset {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  Bitset() = default;
  explicit Bitset(std::size_t size, bool value = false)
      : size_(size), words_((size + word_bits - 1) / word_bits, value ? ~word_type{0} : 0) {
    trim();
  }

  std::size_t size() const noexcept { return size_; }

  bool test(std::size_t i) const noexcept {
    return (words_[i / word_bits] >> (i % word_bits)) & 1u;
  }
  void set(std::size_t i) noexcept { words_[i / word_bits] |= word_type{1} << (i % word_bits); }
  void reset(std::size_t i) noexcept { words_[i / word_bits] &= ~(word_type{1} << (i % word_bits)); }
  void set(std::size_t i, bool v) noexcept { v ? set(i) : reset(i); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const noexcept {
    return std::any_of(words_.begin(), words_.end(), [](word_type w) { return w != 0; });
  }
  bool none() const noexcept { return !any(); }

  /// True iff every set bit of *this is also set in `other`.
  bool is_subset_of(const Bitset& other) const {
    check_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

  std::size_t intersection_count(const Bitset& other) const {
    check_size(other);
    std::size_t c = 0;
    for (std::size_t k = 0; k < words_.size(); ++k)
      c += static_cast<std::size_t>(std::popcount(words_[k] & other.words_[k]));
    return c;
  }

  Bitset& operator&=(const Bitset& other) {
    check_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
    return *this;
  }
  Bitset& operator|=(const Bitset& other) {
    check_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }

  Bitset operator~() const {
    Bitset r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

  /// Calls f(i) for every set bit, in increasing order.
  template <typename F>
  void for_each_set(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      word_type w = words_[k];
      while (w) {
        const auto tz = static_cast<std::size_t>(std::countr_zero(w));
        f(k * word_bits + tz);
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> set_bits() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each_set([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  /// Bit 0 first, e.g. "011" has bits 1 and 2 set.
  std::string to_string() const {
    std::string s(size_, '0');
    for_each_set([&](std::size_t i) { s[i] = '1'; });
    return s;
  }

  static Bitset from_string(const std::string& s) {
    Bitset b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') b.set(i);
      else if (s[i] != '0') throw std::invalid_argument("Bitset::from_string: expected '0' or '1'");
    }
    return b;
  }

 private:
  void trim() noexcept {
    if (size_ % word_bits != 0 && !words_.empty())
      words_.back() &= (word_type{1} << (size_ % word_bits)) - 1;
  }
  void check_size(const Bitset& other) const {
    if (other.size_ != size_) throw std::invalid_argument("Bitset: size mismatch");
  }

  std::size_t size_ = 0;
  std::vector<word_type> words_;
};

}  // namespace dnfcg
