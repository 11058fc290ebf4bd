#include "dnfcg/pricing.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace dnfcg;

namespace {

BinaryExample ex(const std::string& bits) { return {Bitset::from_string(bits), "x", 0}; }

PricingConfig open_threshold(int d) {
  PricingConfig c;
  c.max_clause_size = d;
  c.rc_threshold = std::numeric_limits<double>::infinity();
  c.fix_zero_features = false;
  return c;
}

}  // namespace

TEST(ReducedCost, ZeroDualsCountNegatives) {
  std::vector<BinaryExample> pos{ex("11")}, neg{ex("10"), ex("11"), ex("10"), ex("01")};
  DualSnapshot d{0.0, {0.0}};
  EXPECT_DOUBLE_EQ(reduced_cost(Clause{0}, d, pos, neg), 3.0);
}

TEST(ReducedCost, ComplexityTermOnly) {
  std::vector<BinaryExample> pos{ex("000")}, neg{ex("000")};
  DualSnapshot d{-1.0, {0.0}};
  EXPECT_DOUBLE_EQ(reduced_cost(Clause{0, 1}, d, pos, neg), 3.0);
}

TEST(ReducedCost, MatchesDirectScan) {
  std::mt19937_64 gen(3);
  auto pos = oracle::random_examples(gen, 4, 6, 0.5, "p");
  auto neg = oracle::random_examples(gen, 6, 6, 0.5, "n");
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_duals(gen, pos.size());
    for (const auto& c : oracle::all_clauses(6, 3))
      EXPECT_NEAR(reduced_cost(Clause(c), d, pos, neg), oracle::reduced_cost(c, d, pos, neg), 1e-12);
  }
}

TEST(FixedZero, ComplementOfPositiveUnion) {
  std::vector<BinaryExample> pos{ex("1000"), ex("1010")};
  EXPECT_EQ(fixed_zero_features(pos), (std::vector<FeatureId>{1, 3}));
  std::vector<BinaryExample> full{ex("1111")};
  EXPECT_TRUE(fixed_zero_features(full).empty());
}

TEST(WordPool, DocumentFractionFilter) {
  // 10 examples; feature 0 occurs once (10%), feature 1 never in positives
  std::vector<BinaryExample> pos{ex("100"), ex("001")};
  std::vector<BinaryExample> neg(8, ex("011"));
  PricingConfig c;
  const auto pool = build_word_pool(pos, neg, c);
  EXPECT_EQ(pool, (std::vector<FeatureId>{0, 2}));  // equal frequency, ties by id
}

TEST(WordPool, RareWordsDropped) {
  std::vector<BinaryExample> pos{ex("11")};
  std::vector<BinaryExample> neg(99, ex("01"));  // feature 0 in 1% of 100 examples
  PricingConfig c;
  EXPECT_EQ(build_word_pool(pos, neg, c), (std::vector<FeatureId>{1}));
  c.doc_frac_base = DocFracBase::positives_only;
  EXPECT_EQ(build_word_pool(pos, neg, c), (std::vector<FeatureId>{0, 1}));
}

TEST(WordPool, CappedAtPoolSize) {
  std::mt19937_64 gen(9);
  auto pos = oracle::random_examples(gen, 50, 400, 0.6, "p");
  PricingConfig c;
  const auto pool = build_word_pool(pos, {}, c);
  EXPECT_EQ(pool.size(), 200u);
  std::set<FeatureId> uniq(pool.begin(), pool.end());
  EXPECT_EQ(uniq.size(), pool.size());
}

TEST(Heuristic, ZeroDualsGiveNothing) {
  std::mt19937_64 gen(1);
  auto pos = oracle::random_examples(gen, 10, 8, 0.4, "p");
  auto neg = oracle::random_examples(gen, 10, 8, 0.4, "n");
  DualSnapshot d{0.0, std::vector<double>(pos.size(), 0.0)};
  EXPECT_TRUE(heuristic_pricing(pos, neg, d, PricingConfig{}).empty());
}

TEST(Heuristic, IsolatedPositiveWithUniqueWord) {
  std::vector<BinaryExample> pos{ex("1001"), ex("0101")}, neg{ex("0111")};
  DualSnapshot d{0.0, {5.0, 0.0}};
  const auto out = heuristic_pricing(pos, neg, d, PricingConfig{});
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out.front(), Clause{0});
  EXPECT_NEAR(oracle::reduced_cost({0}, d, pos, neg), -5.0, 1e-12);
}

TEST(Heuristic, AgreesWithEnumerationOverPool) {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 40; ++rep) {
    auto pos = oracle::random_examples(gen, 6 + gen() % 10, 12, 0.35, "p");
    auto neg = oracle::random_examples(gen, 6 + gen() % 20, 12, 0.35, "n");
    const auto d = oracle::random_duals(gen, pos.size());
    PricingConfig c;
    c.pool_size = 1 + gen() % 12;
    const auto pool = build_word_pool(pos, neg, c);
    std::set<std::vector<FeatureId>> expected;
    for (std::size_t a = 0; a < pool.size(); ++a)
      for (std::size_t b = a; b < pool.size(); ++b) {
        std::vector<FeatureId> cl{pool[a]};
        if (b != a) cl.push_back(pool[b]);
        std::sort(cl.begin(), cl.end());
        if (oracle::reduced_cost(cl, d, pos, neg) < c.rc_threshold) expected.insert(cl);
      }
    const auto got = heuristic_pricing_scored(pos, neg, d, c);
    std::set<std::vector<FeatureId>> got_set;
    for (std::size_t k = 0; k < got.size(); ++k) {
      got_set.insert(got[k].clause.features());
      if (k > 0) {
        EXPECT_LE(got[k - 1].reduced_cost, got[k].reduced_cost);
      }
    }
    EXPECT_EQ(got_set, expected);
  }
}

TEST(ExactPricing, ZeroDualsGiveNoBest) {
  std::mt19937_64 gen(4);
  auto pos = oracle::random_examples(gen, 8, 10, 0.4, "p");
  auto neg = oracle::random_examples(gen, 8, 10, 0.4, "n");
  DualSnapshot d{0.0, std::vector<double>(pos.size(), 0.0)};
  const auto r = exact_pricing(pos, neg, d, PricingConfig{});
  EXPECT_FALSE(r.best.has_value());
  EXPECT_TRUE(r.all_negative.empty());
}

TEST(ExactPricing, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(12345);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t nf = 4 + gen() % 11;
    const int D = 1 + static_cast<int>(gen() % 3);
    auto pos = oracle::random_examples(gen, 1 + gen() % 20, nf, 0.4, "p");
    auto neg = oracle::random_examples(gen, gen() % 20, nf, 0.4, "n");
    const auto d = oracle::random_duals(gen, pos.size());
    const auto r = exact_pricing(pos, neg, d, open_threshold(D));
    ASSERT_TRUE(r.best.has_value());
    EXPECT_NEAR(r.best_rc, oracle::brute_min_reduced_cost(nf, D, d, pos, neg), 1e-9) << rep;
    EXPECT_NEAR(reduced_cost(*r.best, d, pos, neg), r.best_rc, 1e-12);
  }
}

TEST(ExactPricing, AllNegativeAreSoundAndDeduplicated) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 40; ++rep) {
    auto pos = oracle::random_examples(gen, 12, 10, 0.4, "p");
    auto neg = oracle::random_examples(gen, 12, 10, 0.4, "n");
    const auto d = oracle::random_duals(gen, pos.size());
    PricingConfig c;
    const auto r = exact_pricing(pos, neg, d, c);
    std::set<Clause> uniq(r.all_negative.begin(), r.all_negative.end());
    EXPECT_EQ(uniq.size(), r.all_negative.size());
    for (const auto& cl : r.all_negative) {
      EXPECT_LT(oracle::reduced_cost(cl.features(), d, pos, neg), c.rc_threshold);
      EXPECT_LE(cl.length(), 3u);
    }
    if (r.best) {
      EXPECT_EQ(r.all_negative.front(), *r.best);
    }
    // the exact minimiser is below the threshold iff best is reported
    const double truth = oracle::brute_min_reduced_cost(10, 3, d, pos, neg);
    EXPECT_EQ(r.best.has_value(), truth < c.rc_threshold);
    if (r.best) {
      EXPECT_NEAR(r.best_rc, truth, 1e-9);
    }
  }
}

TEST(ExactPricing, FixingZeroFeaturesKeepsMinimum) {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 60; ++rep) {
    auto pos = oracle::random_examples(gen, 2 + gen() % 6, 12, 0.25, "p");
    auto neg = oracle::random_examples(gen, 10, 12, 0.5, "n");
    const auto d = oracle::random_duals(gen, pos.size());
    PricingConfig with, without;
    with.rc_threshold = without.rc_threshold = 0.0;
    with.fix_zero_features = true;
    without.fix_zero_features = false;
    const auto a = exact_pricing(pos, neg, d, with);
    const auto b = exact_pricing(pos, neg, d, without);
    EXPECT_EQ(a.best.has_value(), b.best.has_value());
    if (a.best && b.best) {
      EXPECT_NEAR(a.best_rc, b.best_rc, 1e-12);
    }
    const auto fixed = fixed_zero_features(pos);
    for (const auto& cl : a.all_negative)
      for (auto j : cl.features()) EXPECT_FALSE(std::binary_search(fixed.begin(), fixed.end(), j));
  }
}

TEST(ExactPricing, IntegerScaledIsSound) {
  std::mt19937_64 gen(99);
  int with_output = 0;
  for (int rep = 0; rep < 60; ++rep) {
    auto pos = oracle::random_examples(gen, 10, 10, 0.4, "p");
    auto neg = oracle::random_examples(gen, 10, 10, 0.4, "n");
    const auto d = oracle::random_duals(gen, pos.size());
    PricingConfig c;
    c.scale_mode = ScaleMode::integer_scaled;
    const auto r = exact_pricing(pos, neg, d, c);
    if (!r.all_negative.empty()) ++with_output;
    for (const auto& cl : r.all_negative) EXPECT_LT(oracle::reduced_cost(cl.features(), d, pos, neg), c.rc_threshold);
  }
  EXPECT_GT(with_output, 10);
}

TEST(ExactPricing, RejectsBadInput) {
  std::vector<BinaryExample> pos{ex("10")}, neg{ex("01")};
  DualSnapshot wrong{0.0, {1.0, 2.0}};
  EXPECT_THROW(exact_pricing(pos, neg, wrong, PricingConfig{}), std::invalid_argument);
  DualSnapshot positive_lambda{0.5, {1.0}};
  EXPECT_THROW(exact_pricing(pos, neg, positive_lambda, PricingConfig{}), std::invalid_argument);
  PricingConfig bad;
  bad.max_clause_size = 0;
  EXPECT_THROW(exact_pricing(pos, neg, DualSnapshot{0.0, {1.0}}, bad), std::invalid_argument);
}
