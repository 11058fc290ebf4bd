#include "dnfcg/predictor.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/laas_model.hpp"

using namespace dnfcg;

namespace {

std::vector<std::string> labels_of(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.label);
  return out;
}

ModelBundle random_model(std::mt19937_64& gen, std::size_t nf, std::size_t nlabels) {
  ModelBundle m;
  std::vector<std::string> words;
  for (std::size_t j = 0; j < nf; ++j) words.push_back("f" + std::to_string(j));
  m.vocabulary = Vocabulary::from_words(words);
  std::uniform_real_distribution<double> w(-50.0, 200.0);
  for (std::size_t l = 0; l < nlabels; ++l) {
    DnfRule r;
    r.label = "Q" + std::to_string(l);
    const auto nclauses = gen() % 4;
    for (std::size_t k = 0; k < nclauses; ++k) {
      std::vector<FeatureId> ids;
      for (std::size_t j = 0; j < nf; ++j)
        if (gen() % 4 == 0) ids.push_back(static_cast<FeatureId>(j));
      if (ids.empty()) ids.push_back(static_cast<FeatureId>(gen() % nf));
      r.clauses.push_back({Clause(ids), 0.5, 0.1, w(gen)});
    }
    m.rules.emplace(r.label, r);
  }
  return m;
}

}  // namespace

TEST(Satisfies, SubsetSemantics) {
  const auto m = testmodel::laas_model();
  const auto c = testmodel::clause_of(m.vocabulary, {"U/S", "ALS"});
  EXPECT_TRUE(satisfies(binarize_message("ALS U/S RWY", m), c));
  EXPECT_FALSE(satisfies(binarize_message("U/S only", m), c));
  EXPECT_FALSE(satisfies(binarize_message("", m), c));
}

TEST(CandidateList, EmptyWhenNothingFires) {
  EXPECT_TRUE(candidate_list("nothing relevant here", testmodel::laas_model()).empty());
}

TEST(CandidateList, ScoreIsSumOfSatisfiedWeights) {
  const auto m = testmodel::laas_model();
  const auto cs = candidate_list("ALS U/S MAINT RWY", m);
  ASSERT_FALSE(cs.empty());
  EXPECT_EQ(cs.front().label, "LAAS");
  EXPECT_NEAR(cs.front().score, 2894.89, 1e-9);
  EXPECT_EQ(cs.front().satisfied_clauses.size(), 2u);
}

TEST(CandidateList, RankedByScoreThenLabel) {
  auto m = testmodel::laas_model();
  const auto cs = candidate_list("RWY CLSD U/S 24", m);
  EXPECT_EQ(labels_of(cs), (std::vector<std::string>{"MRLC", "LAAS"}));
  m.rules["MRLC"].clauses[0].weight = 21.02;
  EXPECT_EQ(labels_of(candidate_list("RWY CLSD U/S 24", m)), (std::vector<std::string>{"LAAS", "MRLC"}));
}

TEST(CandidateList, ClipNegativeWeightsFlag) {
  auto m = testmodel::laas_model();
  m.rules["MRLC"].clauses[0].weight = -10.0;
  const auto plain = candidate_list("RWY CLSD", m);
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_DOUBLE_EQ(plain[0].score, -10.0);
  const auto clipped = candidate_list("RWY CLSD", m, {true});
  ASSERT_EQ(clipped.size(), 1u);
  EXPECT_DOUBLE_EQ(clipped[0].score, 0.0);
  EXPECT_EQ(clipped[0].satisfied_clauses.size(), 1u);
}

TEST(TopK, Truncation) {
  std::vector<Candidate> cs;
  for (int i = 0; i < 7; ++i) cs.push_back({"L" + std::to_string(i), 10.0 - i, {}});
  EXPECT_EQ(top_k(cs, 3).size(), 3u);
  EXPECT_EQ(top_k(cs, 3)[2].label, "L2");
  EXPECT_EQ(top_k(cs, 100).size(), 7u);
  EXPECT_EQ(top_k(cs, 1)[0].label, "L0");
  EXPECT_THROW(top_k(cs, 0), std::invalid_argument);
}

TEST(Explain, SatisfiedClausesInRuleOrder) {
  const auto m = testmodel::laas_model();
  const auto e = explain("ALS RWY 09 U/S", "LAAS", m);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].clause, testmodel::clause_of(m.vocabulary, {"U/S", "ALS"}));
  EXPECT_TRUE(explain("RWY CLSD", "LAAS", m).empty());
  const auto all = explain("U/S ALS RWY MAINT SYSTEM APCH 24 02 19", "LAAS", m);
  ASSERT_EQ(all.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(all[k], m.rules.at("LAAS").clauses[k]);
  EXPECT_THROW(explain("x", "QQQQ", m), std::invalid_argument);
}

TEST(CandidateList, MembershipMatchesBooleanEvaluation) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t nf = 4 + gen() % 7;
    const auto m = random_model(gen, nf, 5);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << nf); ++x) {
      Bitset bits(nf);
      for (std::size_t j = 0; j < nf; ++j)
        if (x >> j & 1u) bits.set(j);
      const auto cs = candidate_list(bits, m);
      for (const auto& [label, rule] : m.rules) {
        bool fires = false;
        for (const auto& c : rule.clauses) {
          bool all = true;
          for (auto j : c.clause.features()) all = all && (x >> j & 1u);
          fires = fires || all;
        }
        const bool listed = std::any_of(cs.begin(), cs.end(), [&](const Candidate& c) { return c.label == label; });
        EXPECT_EQ(fires, listed);
      }
    }
  }
}

TEST(CandidateList, RankingInvariantUnderPositiveRescaling) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 20; ++rep) {
    auto m = random_model(gen, 8, 6);
    auto scaled = m;
    for (auto& [_, r] : scaled.rules)
      for (auto& c : r.clauses) c.weight *= 3.5;
    for (std::uint64_t x = 0; x < 256; ++x) {
      Bitset bits(8);
      for (std::size_t j = 0; j < 8; ++j)
        if (x >> j & 1u) bits.set(j);
      EXPECT_EQ(labels_of(candidate_list(bits, m)), labels_of(candidate_list(bits, scaled)));
    }
  }
}

TEST(CandidateList, AddingPositiveClauseNeverLowersScore) {
  auto m = testmodel::laas_model();
  const auto before = candidate_list("U/S ALS CLSD TWY", m);
  m.rules["LAAS"].clauses.push_back({testmodel::clause_of(m.vocabulary, {"TWY"}), 0.1, 0.0, 5.0});
  const auto after = candidate_list("U/S ALS CLSD TWY", m);
  EXPECT_GE(after.front().score, before.front().score);
}
