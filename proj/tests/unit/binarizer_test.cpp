#include "dnfcg/binarizer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dnfcg;

namespace {

LabeledCorpus corpus(std::vector<RawRecord> rs) { return LabeledCorpus::from_records(std::move(rs)); }

BinaryExample example(const std::string& bits) { return {Bitset::from_string(bits), "L", 0}; }

}  // namespace

TEST(BuildVocabulary, FrequencyThenLexicographic) {
  // RWY x5, CLSD x3, TWY x3
  const auto c = corpus({{"RWY RWY CLSD", "A"}, {"RWY TWY, TWY", "B"}, {"RWY RWY CLSD CLSD TWY", "A"}});
  EXPECT_EQ(build_vocabulary(c, 2).words(), (std::vector<std::string>{"RWY", "CLSD"}));
  EXPECT_EQ(build_vocabulary(c, 10).words(), (std::vector<std::string>{"RWY", "CLSD", "TWY"}));
  EXPECT_EQ(build_vocabulary(c, 10).budget(), 10u);
}

TEST(BuildVocabulary, DocumentCountMode) {
  // token counts: A 4, B 2; document counts: A 1, B 2
  const auto c = corpus({{"A A A A B", "x"}, {"B", "y"}});
  EXPECT_EQ(build_vocabulary(c, 1).words(), (std::vector<std::string>{"A"}));
  EXPECT_EQ(build_vocabulary(c, 1, FrequencyMode::document_count).words(), (std::vector<std::string>{"B"}));
}

TEST(BuildVocabulary, DefaultsAndErrors) {
  const auto c = corpus({{"A", "x"}});
  EXPECT_EQ(build_vocabulary(c).budget(), 1000u);
  EXPECT_THROW(build_vocabulary(LabeledCorpus{}, 5), std::invalid_argument);
  EXPECT_THROW(build_vocabulary(c, 0), std::invalid_argument);
}

TEST(BuildVocabulary, Deterministic) {
  const auto c = corpus({{"B A C", "x"}, {"C A", "y"}, {"D", "x"}});
  EXPECT_EQ(build_vocabulary(c, 3), build_vocabulary(c, 3));
}

TEST(Vocabulary, FromWordsAndLookup) {
  const auto v = Vocabulary::from_words({"RWY", "CLSD", "TWY"});
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(*v.find("TWY"), 2u);
  EXPECT_FALSE(v.find("ALS").has_value());
  EXPECT_EQ(v.word(1), "CLSD");
  EXPECT_THROW(Vocabulary::from_words({"A", "A"}), std::invalid_argument);
  EXPECT_THROW(Vocabulary::from_words({"A", "B"}, 1), std::invalid_argument);
}

TEST(Binarize, Membership) {
  const auto v = Vocabulary::from_words({"RWY", "CLSD", "TWY"});
  EXPECT_EQ(binarize("TWY CLSD", v).to_string(), "011");
  EXPECT_EQ(binarize("", v).to_string(), "000");
  EXPECT_EQ(binarize("CLSD CLSD CLSD", v).to_string(), "010");
  EXPECT_EQ(binarize("CLSD ALS RWYS", v).to_string(), "010");
}

TEST(Binarize, OrderAndRepetitionInvariant) {
  const auto v = Vocabulary::from_words({"A", "B", "C", "D"});
  EXPECT_EQ(binarize("A B C", v), binarize("C C B A A", v));
}

TEST(BinarizeCorpus, CleansAndNumbers) {
  const auto v = Vocabulary::from_words({"U/S", "ALS"});
  const auto ex = binarize_corpus(corpus({{"ALS: U/S.", "L"}, {"'ALS'", "M"}}), v);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].features.to_string(), "11");
  EXPECT_EQ(ex[1].features.to_string(), "01");
  EXPECT_EQ(ex[1].label, "M");
  EXPECT_EQ(ex[1].id, 1u);
}

TEST(ZeroSet, Complement) {
  EXPECT_EQ(zero_set(example("011")), (std::vector<FeatureId>{0}));
  EXPECT_TRUE(zero_set(example("111")).empty());
  EXPECT_EQ(zero_set(example("0000")), (std::vector<FeatureId>{0, 1, 2, 3}));
}

TEST(ZeroSet, PartitionsFeatures) {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 30; ++t) {
    std::string s;
    for (int j = 0; j < 1 + static_cast<int>(gen() % 70); ++j) s.push_back(gen() % 2 ? '1' : '0');
    const auto e = example(s);
    const auto zeros = zero_set(e);
    const auto ones = e.features.set_bits();
    EXPECT_EQ(zeros.size() + ones.size(), s.size());
    for (auto j : zeros) EXPECT_EQ(s[j], '0');
  }
}

TEST(FeatureIndex, CoverMatchesDirectEvaluation) {
  std::mt19937_64 gen(4);
  const std::size_t nf = 9;
  std::vector<BinaryExample> ex;
  for (std::size_t i = 0; i < 40; ++i) {
    Bitset b(nf);
    for (std::size_t j = 0; j < nf; ++j) b.set(j, gen() % 2 == 0);
    ex.push_back({b, "L", i});
  }
  const FeatureIndex idx(ex, nf);
  for (int t = 0; t < 50; ++t) {
    std::vector<FeatureId> f;
    for (FeatureId j = 0; j < nf; ++j)
      if (gen() % 4 == 0) f.push_back(j);
    if (f.empty()) f.push_back(static_cast<FeatureId>(gen() % nf));
    const Clause c(f);
    const auto cov = idx.cover(c);
    for (std::size_t i = 0; i < ex.size(); ++i) EXPECT_EQ(cov.test(i), c.satisfied_by(ex[i].features));
  }
  EXPECT_THROW(FeatureIndex(ex, nf + 1), std::invalid_argument);
}
