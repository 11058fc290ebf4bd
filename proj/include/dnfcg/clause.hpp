#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "dnfcg/bitset.hpp"

namespace dnfcg {

using FeatureId = std::uint32_t;

/// Conjunction of binary features. Features are kept strictly increasing,
/// so two clauses are equal iff they contain the same features.
class Clause {
 public:
  Clause() = default;

  explicit Clause(std::vector<FeatureId> features) : features_(std::move(features)) {
    if (features_.empty()) throw std::invalid_argument("Clause: must contain at least one feature");
    std::sort(features_.begin(), features_.end());
    if (std::adjacent_find(features_.begin(), features_.end()) != features_.end())
      throw std::invalid_argument("Clause: duplicate feature");
  }
  Clause(std::initializer_list<FeatureId> features) : Clause(std::vector<FeatureId>(features)) {}

  const std::vector<FeatureId>& features() const noexcept { return features_; }
  std::size_t length() const noexcept { return features_.size(); }
  bool empty() const noexcept { return features_.empty(); }

  /// c_k = 1 + clause length.
  int complexity() const noexcept { return 1 + static_cast<int>(features_.size()); }

  /// True iff every clause feature is set in `bits`.
  bool satisfied_by(const Bitset& bits) const {
    if (features_.empty()) return false;
    for (auto j : features_)
      if (j >= bits.size() || !bits.test(j)) return false;
    return true;
  }

  FeatureId max_feature() const { return features_.back(); }

  friend bool operator==(const Clause&, const Clause&) = default;
  friend auto operator<=>(const Clause& a, const Clause& b) { return a.features_ <=> b.features_; }

 private:
  std::vector<FeatureId> features_;
};

/// Dual values of the restricted master LP: lambda for the complexity row
/// (<= 0), mu per positive covering row (>= 0).
struct DualSnapshot {
  double lambda = 0.0;
  std::vector<double> mu;

  void validate(double tol = 1e-9) const {
    if (lambda > tol) throw std::invalid_argument("DualSnapshot: lambda must be <= 0");
    for (double m : mu)
      if (m < -tol) throw std::invalid_argument("DualSnapshot: mu must be >= 0");
  }
};

}  // namespace dnfcg
