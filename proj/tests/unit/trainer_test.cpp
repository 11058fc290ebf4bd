#include "dnfcg/trainer.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dnfcg/synth.hpp"
#include "oracles.hpp"

using namespace dnfcg;

namespace {

BinaryExample ex(const std::string& bits, const std::string& label) { return {Bitset::from_string(bits), label, 0}; }

Hyperparameters tight() {
  Hyperparameters h;
  h.pricing.rc_threshold = -1e-9;  // column generation stops only at the LP optimum
  h.max_cg_iters = 200;
  return h;
}

std::vector<std::vector<FeatureId>> raw(const DnfRule& r) {
  std::vector<std::vector<FeatureId>> out;
  for (const auto& c : r.clauses) out.push_back(c.clause.features());
  return out;
}

}  // namespace

TEST(Weights, TableValues) {
  EXPECT_NEAR(clause_weight(0.937, 0.006, 3003), 2795.79, 0.01);
  EXPECT_NEAR(clause_weight(0.035, 0.002, 3003), 99.10, 0.01);
  EXPECT_NEAR(clause_weight(0.007, 0.000, 3003), 21.02, 0.01);
  EXPECT_EQ(clause_weight(0.25, 0.25, 3003), 0.0);
}

TEST(Weights, FractionsFromExamples) {
  std::vector<BinaryExample> pos{ex("11", "a"), ex("10", "a"), ex("01", "a"), ex("11", "a")};
  std::vector<BinaryExample> neg{ex("10", "b"), ex("00", "b")};
  const auto w = compute_clause_weights(Clause{0}, pos, neg, 6);
  EXPECT_DOUBLE_EQ(w.pos_acc, 0.75);
  EXPECT_DOUBLE_EQ(w.neg_acc, 0.5);
  EXPECT_DOUBLE_EQ(w.weight, 0.25 * 6);
  EXPECT_THROW(compute_clause_weights(Clause{0}, pos, neg, 0), std::invalid_argument);
}

TEST(SampleNegatives, SizesAndDeterminism) {
  std::vector<BinaryExample> train;
  for (int i = 0; i < 3; ++i) train.push_back(ex("1", "a"));
  for (int i = 0; i < 100; ++i) train.push_back(ex("0", "b"));
  EXPECT_EQ(sample_negatives("a", train, 2.0, 1).size(), 6u);
  const auto s1 = sample_negatives("a", train, 2.0, 7);
  const auto s2 = sample_negatives("a", train, 2.0, 7);
  ASSERT_EQ(s1.size(), s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_EQ(s1[i].features, s2[i].features);
  for (const auto& e : s1) EXPECT_EQ(e.label, "b");
  EXPECT_THROW(sample_negatives("zzz", train, 2.0, 1), std::invalid_argument);

  std::vector<BinaryExample> big;
  for (int i = 0; i < 50; ++i) big.push_back(ex("1", "a"));
  for (int i = 0; i < 400; ++i) big.push_back(ex("0", "b"));
  EXPECT_EQ(sample_negatives("a", big, 20.0, 3).size(), 400u);
}

TEST(SampleNegatives, SeedDependsOnLabelOnly) {
  std::vector<BinaryExample> train;
  for (int i = 0; i < 40; ++i) {
    BinaryExample e{Bitset(8), i < 4 ? "a" : (i % 2 ? "b" : "c"), static_cast<std::size_t>(i)};
    train.push_back(e);
  }
  auto ids = [](const std::vector<BinaryExample>& xs) {
    std::vector<std::size_t> out;
    for (const auto& e : xs) out.push_back(e.id);
    return out;
  };
  const auto s = ids(sample_negatives("a", train, 2.0, 99));
  EXPECT_EQ(s.size(), 8u);
  EXPECT_EQ(s, ids(sample_negatives("a", train, 2.0, 99)));
  EXPECT_NE(s, ids(sample_negatives("a", train, 2.0, 100)));
}

TEST(Hyper, Validation) {
  Hyperparameters h;
  EXPECT_NO_THROW(h.validate());
  h.pricing.max_clause_size = 31;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.neg_ratio = 0.5;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.fn_penalty = 0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
}

TEST(TrainLabel, PerfectSeparatorGivesSingleClause) {
  // feature 2 occurs in exactly the positives
  std::vector<BinaryExample> pos{ex("1010", "a"), ex("0110", "a"), ex("0011", "a")};
  std::vector<BinaryExample> neg{ex("1100", "b"), ex("1001", "b"), ex("0101", "b"), ex("1101", "b")};
  auto h = tight();
  const auto rule = train_label("a", pos, neg, h);
  ASSERT_EQ(rule.clauses.size(), 1u);
  EXPECT_EQ(rule.clauses[0].clause, Clause{2});
  EXPECT_DOUBLE_EQ(rule.train_objective, 0.0);
  EXPECT_DOUBLE_EQ(rule.clauses[0].pos_acc, 1.0);
  EXPECT_DOUBLE_EQ(rule.clauses[0].neg_acc, 0.0);
  EXPECT_EQ(rule.n_k, 7u);
  EXPECT_TRUE(rule.cg_terminated_by_proof);
  EXPECT_NEAR(oracle::full_model_optimum(4, 3, pos, neg, h.fn_penalty, h.complexity_budget), 0.0, 1e-12);
}

TEST(TrainLabel, InseparableGivesConstantFalse) {
  // every feature pattern of a positive also appears in many negatives
  std::vector<BinaryExample> pos{ex("110", "a"), ex("011", "a")};
  std::vector<BinaryExample> neg;
  for (int i = 0; i < 5; ++i) {
    neg.push_back(ex("110", "b"));
    neg.push_back(ex("011", "b"));
    neg.push_back(ex("111", "b"));
  }
  auto h = tight();
  h.fn_penalty = 1.0;
  const auto rule = train_label("a", pos, neg, h);
  EXPECT_TRUE(rule.clauses.empty());
  EXPECT_DOUBLE_EQ(rule.train_objective, 2.0);
  EXPECT_NEAR(oracle::full_model_optimum(3, 3, pos, neg, 1.0, h.complexity_budget), 2.0, 1e-12);
}

TEST(TrainLabel, BracketsTheFullModelOptimum) {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t nf = 3 + gen() % 4;
    auto pos = oracle::random_examples(gen, 2 + gen() % 7, nf, 0.45, "a");
    auto neg = oracle::random_examples(gen, 2 + gen() % 8, nf, 0.4, "b");
    auto h = tight();
    h.complexity_budget = 2 + static_cast<int>(gen() % 9);
    h.pricing.max_clause_size = std::min(3, h.complexity_budget);
    h.fn_penalty = 1.0 + static_cast<double>(gen() % 5);
    const auto rule = train_label("a", pos, neg, h);
    const double opt = oracle::full_model_optimum(nf, 3, pos, neg, h.fn_penalty, h.complexity_budget);
    ASSERT_TRUE(rule.cg_terminated_by_proof);
    EXPECT_LE(rule.lp_objective, opt + 1e-7) << rep;
    EXPECT_GE(rule.train_objective, opt - 1e-9) << rep;
    EXPECT_LE(rule.lp_objective, rule.train_objective + 1e-7);
    EXPECT_NEAR(oracle::master_objective(raw(rule), pos, neg, h.fn_penalty), rule.train_objective, 1e-9);
    int cx = 0;
    for (const auto& c : rule.clauses) {
      cx += c.clause.complexity();
      EXPECT_NEAR(c.weight, (c.pos_acc - c.neg_acc) * static_cast<double>(rule.n_k), 1e-9);
    }
    EXPECT_LE(cx, h.complexity_budget);
  }
}

TEST(TrainAll, PlantedCorpusRecoversTriggers) {
  const auto spec = synth::standard_spec(3, 60, 30, 0.0, 5);
  const auto corpus = synth::generate(spec);
  Hyperparameters h;
  h.min_label_count = 1;
  const auto rep = train_all(corpus, h, {2, false});
  EXPECT_TRUE(rep.failures.empty());
  ASSERT_EQ(rep.model.rules.size(), 3u);
  for (const auto& [label, rule] : rep.model.rules) {
    EXPECT_DOUBLE_EQ(rule.train_objective, 0.0) << label;
    ASSERT_FALSE(rule.clauses.empty());
    for (const auto& c : rule.clauses) {
      EXPECT_EQ(c.neg_acc, 0.0);
      // every chosen clause uses a trigger word of its own label
      bool own = false;
      for (auto j : c.clause.features())
        for (const auto& pc : spec.labels[std::stoul(label.substr(1))].clauses)
          for (const auto& w : pc) own = own || rep.model.vocabulary.word(j) == w;
      EXPECT_TRUE(own) << label;
    }
  }
}

TEST(TrainAll, WorkerCountDoesNotChangeTheModel) {
  const auto corpus = synth::generate(synth::standard_spec(4, 40, 30, 0.1, 8));
  Hyperparameters h;
  h.min_label_count = 1;
  const auto a = train_all(corpus, h, {1, false});
  const auto b = train_all(corpus, h, {4, false});
  EXPECT_EQ(a.model.rules, b.model.rules);
  EXPECT_EQ(a.model.vocabulary, b.model.vocabulary);
  EXPECT_EQ(a.model.provenance, b.model.provenance);
}

TEST(TrainAll, Errors) {
  EXPECT_THROW(train_all(LabeledCorpus{}, Hyperparameters{}), std::invalid_argument);
  const auto corpus = synth::generate(synth::standard_spec(2, 5, 20, 0.0, 1));
  Hyperparameters h;
  h.min_label_count = 100;
  EXPECT_THROW(train_all(corpus, h), std::invalid_argument);
}
