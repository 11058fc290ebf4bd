#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dnfcg/trainer.hpp"

namespace dnfcg {

inline constexpr int model_format_version = 1;

using ojson = nlohmann::ordered_json;

namespace detail {

// JSON has no infinities; they are stored as strings.
inline ojson real_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) throw std::invalid_argument("model: NaN cannot be stored");
  return v > 0 ? "inf" : "-inf";
}

inline double real_from_json(const ojson& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("model: expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

inline const char* to_string(ScaleMode m) { return m == ScaleMode::exact ? "exact" : "integer_scaled"; }
inline const char* to_string(DocFracBase b) {
  return b == DocFracBase::all_examples ? "all_examples" : "positives_only";
}

inline const char* to_string(FrequencyMode m) {
  return m == FrequencyMode::token_count ? "token_count" : "document_count";
}

inline FrequencyMode parse_frequency_mode(const std::string& s) {
  if (s == "token_count") return FrequencyMode::token_count;
  if (s == "document_count") return FrequencyMode::document_count;
  throw std::invalid_argument("unknown vocabulary frequency '" + s + "' (expected token_count or document_count)");
}

inline ScaleMode parse_scale_mode(const std::string& s) {
  if (s == "exact") return ScaleMode::exact;
  if (s == "integer_scaled") return ScaleMode::integer_scaled;
  throw std::invalid_argument("unknown scale mode '" + s + "' (expected exact or integer_scaled)");
}

inline DocFracBase parse_doc_frac_base(const std::string& s) {
  if (s == "all_examples") return DocFracBase::all_examples;
  if (s == "positives_only") return DocFracBase::positives_only;
  throw std::invalid_argument("unknown document fraction base '" + s + "' (expected all_examples or positives_only)");
}

}  // namespace detail

inline ojson hyperparameters_to_json(const Hyperparameters& h) {
  const auto& p = h.pricing;
  return ojson{
      {"fn_penalty", detail::real_to_json(h.fn_penalty)},
      {"complexity_budget", h.complexity_budget},
      {"max_cg_iters", h.max_cg_iters},
      {"neg_ratio", detail::real_to_json(h.neg_ratio)},
      {"top_k", h.top_k},
      {"vocab_budget", h.vocab_budget},
      {"vocab_frequency", detail::to_string(h.vocab_frequency)},
      {"min_label_count", h.min_label_count},
      {"seed", h.seed},
      {"pricing",
       {{"max_clause_size", p.max_clause_size},
        {"pool_size", p.pool_size},
        {"min_doc_frac", detail::real_to_json(p.min_doc_frac)},
        {"doc_frac_base", detail::to_string(p.doc_frac_base)},
        {"rc_threshold", detail::real_to_json(p.rc_threshold)},
        {"scale_mode", detail::to_string(p.scale_mode)},
        {"scale_factor", p.scale_factor},
        {"fix_zero_features", p.fix_zero_features}}},
  };
}

inline Hyperparameters hyperparameters_from_json(const ojson& j) {
  Hyperparameters h;
  h.fn_penalty = detail::real_from_json(j.at("fn_penalty"));
  h.complexity_budget = j.at("complexity_budget").get<int>();
  h.max_cg_iters = j.at("max_cg_iters").get<int>();
  h.neg_ratio = detail::real_from_json(j.at("neg_ratio"));
  h.top_k = j.at("top_k").get<int>();
  h.vocab_budget = j.at("vocab_budget").get<std::size_t>();
  h.vocab_frequency = detail::parse_frequency_mode(j.at("vocab_frequency").get<std::string>());
  h.min_label_count = j.at("min_label_count").get<std::size_t>();
  h.seed = j.at("seed").get<std::uint64_t>();
  const auto& p = j.at("pricing");
  h.pricing.max_clause_size = p.at("max_clause_size").get<int>();
  h.pricing.pool_size = p.at("pool_size").get<std::size_t>();
  h.pricing.min_doc_frac = detail::real_from_json(p.at("min_doc_frac"));
  h.pricing.doc_frac_base = detail::parse_doc_frac_base(p.at("doc_frac_base").get<std::string>());
  h.pricing.rc_threshold = detail::real_from_json(p.at("rc_threshold"));
  h.pricing.scale_mode = detail::parse_scale_mode(p.at("scale_mode").get<std::string>());
  h.pricing.scale_factor = p.at("scale_factor").get<int>();
  h.pricing.fix_zero_features = p.at("fix_zero_features").get<bool>();
  return h;
}

inline ojson model_to_json(const ModelBundle& m) {
  ojson j;
  j["format_version"] = model_format_version;
  j["vocabulary"] = m.vocabulary.words();
  j["hyperparameters"] = hyperparameters_to_json(m.hyperparameters);
  j["provenance"] = {{"dataset_hash", m.provenance.dataset_hash},
                     {"seed", m.provenance.seed},
                     {"timestamp", m.provenance.timestamp}};
  j["train_label_counts"] = ojson::object();
  for (const auto& [label, n] : m.train_label_counts) j["train_label_counts"][label] = n;
  auto& rules = j["rules"] = ojson::array();
  for (const auto& [label, r] : m.rules) {
    ojson clauses = ojson::array();
    for (const auto& c : r.clauses) {
      ojson words = ojson::array();
      for (auto f : c.clause.features()) words.push_back(m.vocabulary.word(f));
      clauses.push_back({{"words", words},
                         {"pos_acc", detail::real_to_json(c.pos_acc)},
                         {"neg_acc", detail::real_to_json(c.neg_acc)},
                         {"weight", detail::real_to_json(c.weight)}});
    }
    rules.push_back({{"label", label},
                     {"n_k", r.n_k},
                     {"n_positives", r.n_positives},
                     {"n_negatives", r.n_negatives},
                     {"train_objective", detail::real_to_json(r.train_objective)},
                     {"lp_objective", detail::real_to_json(r.lp_objective)},
                     {"cg_terminated_by_proof", r.cg_terminated_by_proof},
                     {"integer_proven_optimal", r.integer_proven_optimal},
                     {"cg_iterations", r.cg_iterations},
                     {"columns_generated", r.columns_generated},
                     {"clauses", clauses}});
  }
  return j;
}

inline ModelBundle model_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("format_version")) throw std::runtime_error("model: missing format_version");
  const auto version = j.at("format_version");
  if (!version.is_number_integer() || version.get<int>() != model_format_version)
    throw std::runtime_error("model: unsupported format_version " + version.dump() + " (this build reads " +
                             std::to_string(model_format_version) + ")");
  try {
    ModelBundle m;
    m.hyperparameters = hyperparameters_from_json(j.at("hyperparameters"));
    auto words = j.at("vocabulary").get<std::vector<std::string>>();
    const auto budget = std::max(words.size(), m.hyperparameters.vocab_budget);
    m.vocabulary = Vocabulary::from_words(std::move(words), budget);
    const auto& prov = j.at("provenance");
    m.provenance.dataset_hash = prov.at("dataset_hash").get<std::string>();
    m.provenance.seed = prov.at("seed").get<std::uint64_t>();
    m.provenance.timestamp = prov.at("timestamp").get<std::string>();
    for (const auto& [label, n] : j.at("train_label_counts").items()) m.train_label_counts[label] = n.get<std::size_t>();
    for (const auto& rj : j.at("rules")) {
      DnfRule r;
      r.label = rj.at("label").get<std::string>();
      r.n_k = rj.at("n_k").get<std::size_t>();
      r.n_positives = rj.at("n_positives").get<std::size_t>();
      r.n_negatives = rj.at("n_negatives").get<std::size_t>();
      r.train_objective = detail::real_from_json(rj.at("train_objective"));
      r.lp_objective = detail::real_from_json(rj.at("lp_objective"));
      r.cg_terminated_by_proof = rj.at("cg_terminated_by_proof").get<bool>();
      r.integer_proven_optimal = rj.at("integer_proven_optimal").get<bool>();
      r.cg_iterations = rj.at("cg_iterations").get<int>();
      r.columns_generated = rj.at("columns_generated").get<std::size_t>();
      for (const auto& cj : rj.at("clauses")) {
        std::vector<FeatureId> ids;
        for (const auto& w : cj.at("words")) {
          const auto word = w.get<std::string>();
          const auto id = m.vocabulary.find(word);
          if (!id) throw std::runtime_error("clause word '" + word + "' of label " + r.label + " not in vocabulary");
          ids.push_back(*id);
        }
        std::sort(ids.begin(), ids.end());
        r.clauses.push_back({Clause(std::move(ids)), detail::real_from_json(cj.at("pos_acc")),
                             detail::real_from_json(cj.at("neg_acc")), detail::real_from_json(cj.at("weight"))});
      }
      const auto label = r.label;
      if (!m.rules.emplace(label, std::move(r)).second) throw std::runtime_error("duplicate rule for label " + label);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model: malformed file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("model: ") + e.what());
  }
}

inline std::string model_to_string(const ModelBundle& m) { return model_to_json(m).dump(2) + "\n"; }

inline ModelBundle model_from_string(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("model: not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline void save_model(const std::filesystem::path& path, const ModelBundle& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << model_to_string(m);
  if (!out) throw std::runtime_error("error writing model file " + path.string());
}

inline ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_string(buf.str());
}

}  // namespace dnfcg
