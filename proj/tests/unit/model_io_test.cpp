#include "dnfcg/model_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "dnfcg/synth.hpp"
#include "support/laas_model.hpp"

using namespace dnfcg;

TEST(ModelIo, RoundTripIsByteIdentical) {
  auto m = testmodel::laas_model();
  m.hyperparameters.pricing.rc_threshold = -std::numeric_limits<double>::infinity();
  m.provenance = {"abc123", 42, "2026-01-01T00:00:00Z"};
  const auto text = model_to_string(m);
  const auto back = model_from_string(text);
  EXPECT_EQ(back.rules, m.rules);
  EXPECT_EQ(back.vocabulary, m.vocabulary);
  EXPECT_EQ(back.hyperparameters, m.hyperparameters);
  EXPECT_EQ(back.provenance, m.provenance);
  EXPECT_EQ(back.train_label_counts, m.train_label_counts);
  EXPECT_EQ(model_to_string(back), text);
}

TEST(ModelIo, TrainedModelRoundTripsThroughFile) {
  Hyperparameters h;
  h.min_label_count = 1;
  const auto rep = train_all(synth::generate(synth::standard_spec(3, 30, 25, 0.1, 2)), h, {2, false});
  const auto path = std::filesystem::temp_directory_path() / "dnfcg_model_io_test.json";
  save_model(path, rep.model);
  const auto back = load_model(path);
  EXPECT_EQ(back.rules, rep.model.rules);
  EXPECT_EQ(model_to_string(back), model_to_string(rep.model));
  std::filesystem::remove(path);
}

TEST(ModelIo, UnknownVersionRejected) {
  auto j = model_to_json(testmodel::laas_model());
  j["format_version"] = 99;
  EXPECT_THROW(model_from_json(j), std::runtime_error);
  j.erase("format_version");
  EXPECT_THROW(model_from_json(j), std::runtime_error);
}

TEST(ModelIo, MalformedInputs) {
  EXPECT_THROW(model_from_string("{not json"), std::runtime_error);
  auto j = model_to_json(testmodel::laas_model());
  j["rules"][0]["clauses"][0]["words"][0] = "NOT-A-WORD";
  EXPECT_THROW(model_from_json(j), std::runtime_error);
  auto k = model_to_json(testmodel::laas_model());
  k["hyperparameters"].erase("seed");
  EXPECT_THROW(model_from_json(k), std::runtime_error);
  EXPECT_THROW(load_model("/nonexistent/dir/model.json"), std::runtime_error);
}

TEST(ModelIo, ClausesStoredAsWords) {
  const auto j = model_to_json(testmodel::laas_model());
  EXPECT_EQ(j["rules"][0]["label"], "LAAS");
  EXPECT_EQ(j["rules"][0]["clauses"][0]["words"], (std::vector<std::string>{"U/S", "ALS"}));
  EXPECT_EQ(j["format_version"], model_format_version);
}
