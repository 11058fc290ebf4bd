#include "dnfcg/eval.hpp"

#include <gtest/gtest.h>

#include "support/laas_model.hpp"

using namespace dnfcg;

namespace {

LabeledCorpus corpus(std::vector<RawRecord> rs) { return LabeledCorpus::from_records(std::move(rs)); }

}  // namespace

TEST(Evaluate, CountsHits) {
  const auto m = testmodel::laas_model();
  const auto d = corpus({{"U/S ALS", "LAAS"}, {"RWY CLSD", "MRLC"}, {"RWY CLSD U/S 24", "LAAS"}, {"nothing", "LAAS"}});
  const auto r = evaluate(d, m);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.n_evaluated, 4u);
  EXPECT_EQ(r.max_list_len, 2u);
  EXPECT_DOUBLE_EQ(r.avg_list_len, (1 + 1 + 2 + 0) / 4.0);
  EXPECT_EQ(r.n_multi_candidate, 1u);
  EXPECT_EQ(r.n_empty, 1u);
  // LAAS ranks second on the third message
  EXPECT_DOUBLE_EQ(r.per_k_accuracy.at(1), 0.5);
  EXPECT_DOUBLE_EQ(r.per_k_accuracy.at(2), 0.75);
  EXPECT_DOUBLE_EQ(r.per_k_accuracy.at(10), r.accuracy);
}

TEST(Evaluate, TruncatedAgreesWithLargeK) {
  const auto m = testmodel::laas_model();
  const auto d = corpus({{"U/S ALS", "LAAS"}, {"RWY CLSD U/S 24", "LAAS"}, {"RWY CLSD ALS U/S", "MRLC"}});
  EvalOptions o;
  const auto full = evaluate(d, m, o);
  o.k = full.max_list_len;
  const auto cut = evaluate(d, m, o);
  EXPECT_EQ(full.accuracy, cut.accuracy);
  EXPECT_EQ(full.avg_list_len, cut.avg_list_len);
  o.k = 1;
  const auto one = evaluate(d, m, o);
  EXPECT_DOUBLE_EQ(one.accuracy, full.per_k_accuracy.at(1));
  EXPECT_EQ(one.max_list_len, 1u);
}

TEST(Evaluate, AllEmptyLists) {
  const auto r = evaluate(corpus({{"a", "LAAS"}, {"b", "MRLC"}}), testmodel::laas_model());
  EXPECT_EQ(r.accuracy, 0.0);
  EXPECT_EQ(r.avg_list_len, 0.0);
  EXPECT_EQ(r.max_list_len, 0u);
}

TEST(Evaluate, EmptyDatasetIsAnError) {
  EXPECT_THROW(evaluate(LabeledCorpus{}, testmodel::laas_model()), std::invalid_argument);
}

TEST(Evaluate, OrderInvariant) {
  const auto m = testmodel::laas_model();
  std::vector<RawRecord> rs{{"U/S ALS", "LAAS"}, {"RWY CLSD", "MRLC"}, {"RWY CLSD U/S 24", "LAAS"}, {"zz", "MRLC"}};
  const auto a = evaluate(corpus(rs), m);
  std::reverse(rs.begin(), rs.end());
  const auto b = evaluate(corpus(rs), m);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.per_k_accuracy, b.per_k_accuracy);
}

TEST(KSweep, Monotone) {
  const auto m = testmodel::laas_model();
  const auto d = corpus({{"U/S ALS", "LAAS"}, {"RWY CLSD U/S 24", "LAAS"}, {"RWY CLSD", "MRLC"}});
  const auto s = k_sweep(d, m, 5);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t k = 2; k <= 5; ++k) EXPECT_LE(s.at(k - 1), s.at(k));
  EXPECT_THROW(k_sweep(d, m, 0), std::invalid_argument);
}

TEST(KSweep, SingleRuleModelIsFlat) {
  auto m = testmodel::laas_model();
  m.rules.erase("MRLC");
  const auto s = k_sweep(corpus({{"U/S ALS", "LAAS"}, {"RWY CLSD", "MRLC"}, {"U/S 24", "LAAS"}}), m, 4);
  for (const auto& [k, acc] : s) EXPECT_DOUBLE_EQ(acc, s.at(1));
}

TEST(Restrict, ByTrainingCount) {
  const auto m = testmodel::laas_model();  // LAAS 143, MRLC 25
  const auto d = corpus({{"a", "LAAS"}, {"b", "MRLC"}, {"c", "LAAS"}});
  EXPECT_EQ(restrict_to_frequent_labels(d, m, 1), d);
  EXPECT_TRUE(restrict_to_frequent_labels(d, m, 1000).empty());
  const auto r = restrict_to_frequent_labels(d, m, 50);
  EXPECT_EQ(r, corpus({{"a", "LAAS"}, {"c", "LAAS"}}));
}

TEST(Report, JsonAndText) {
  const auto m = testmodel::laas_model();
  const auto r = evaluate(corpus({{"U/S ALS", "LAAS"}, {"RWY CLSD", "LAAS"}}), m);
  const auto j = report_to_json(r);
  EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), 0.5);
  EXPECT_TRUE(j.at("k").is_null());
  EXPECT_EQ(j.at("per_k_accuracy").size(), 10u);
  std::ostringstream os;
  write_report_text(os, r);
  EXPECT_NE(os.str().find("accuracy"), std::string::npos);
  EXPECT_NE(os.str().find("  10  "), std::string::npos);
}
