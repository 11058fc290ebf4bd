#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dnfcg/corpus.hpp"
#include "dnfcg/model_io.hpp"
#include "dnfcg/trainer.hpp"

namespace dnfcg {

/// Raised for anything wrong with a run configuration: syntax, unknown
/// keys, malformed values, or hyperparameters that violate an invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  std::filesystem::path corpus;
  std::optional<CorpusFormat> format;  // absent: inferred from the file extension
  SplitRatios ratios{1.0, 0.0, 0.0};
  std::uint64_t split_seed = 0;
  std::optional<std::filesystem::path> valid_out;
  std::optional<std::filesystem::path> test_out;
};

struct RunConfig {
  DataConfig data;
  Hyperparameters hyper;
  TrainOptions train;
};

namespace detail {

inline std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& raw) {
  const auto s = trimmed(raw);
  Int v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + raw + "'");
  return v;
}

// strtod also accepts "inf" and "-inf", which rc_threshold relies on.
inline double parse_real(const std::string& key, const std::string& raw) {
  const auto s = trimmed(raw);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v))
    throw ConfigError("config: '" + key + "' expects a number, got '" + raw + "'");
  return v;
}

inline bool parse_flag(const std::string& key, const std::string& raw) {
  auto s = trimmed(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + raw + "'");
}

template <class F>
auto parse_enum(const std::string& key, const std::string& raw, F parse) {
  try {
    return parse(trimmed(raw));
  } catch (const std::exception& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

// Every recognised key, by section. Anything else in the file is rejected
// so that a typo cannot silently fall back to a default.
inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"data", {"corpus", "format", "train_ratio", "valid_ratio", "test_ratio", "split_seed", "valid_out", "test_out"}},
      {"preprocess", {"vocab_budget", "vocab_frequency", "min_label_count"}},
      {"train",
       {"fn_penalty", "complexity_budget", "max_cg_iters", "neg_ratio", "seed", "workers", "record_timestamp"}},
      {"pricing",
       {"max_clause_size", "pool_size", "min_doc_frac", "doc_frac_base", "rc_threshold", "scale_mode", "scale_factor",
        "fix_zero_features"}},
      {"predict", {"top_k"}},
  };
  return keys;
}

}  // namespace detail

/// Reads an INI run configuration. Relative paths are resolved against
/// `base_dir`, normally the directory holding the file.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }

  const auto& known = detail::known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("config: key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      if (!value.empty()) throw ConfigError("config: nested key under '" + section + "." + key + "'");
    }
  }

  auto value = [&](const std::string& dotted) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(dotted)) return *v;
    return std::nullopt;
  };
  auto path_of = [&](const std::string& raw) {
    std::filesystem::path p(detail::trimmed(raw));
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  RunConfig cfg;
  auto& h = cfg.hyper;
  auto& pc = h.pricing;

  const auto corpus = value("data.corpus");
  if (!corpus || detail::trimmed(*corpus).empty()) throw ConfigError("config: [data] corpus is required");
  cfg.data.corpus = path_of(*corpus);
  if (auto v = value("data.format")) cfg.data.format = detail::parse_enum("data.format", *v, parse_format);
  if (auto v = value("data.train_ratio")) cfg.data.ratios.train = detail::parse_real("data.train_ratio", *v);
  if (auto v = value("data.valid_ratio")) cfg.data.ratios.valid = detail::parse_real("data.valid_ratio", *v);
  if (auto v = value("data.test_ratio")) cfg.data.ratios.test = detail::parse_real("data.test_ratio", *v);
  if (auto v = value("data.split_seed")) cfg.data.split_seed = detail::parse_integer<std::uint64_t>("data.split_seed", *v);
  if (auto v = value("data.valid_out")) cfg.data.valid_out = path_of(*v);
  if (auto v = value("data.test_out")) cfg.data.test_out = path_of(*v);
  const auto& r = cfg.data.ratios;
  if (r.train < 0 || r.valid < 0 || r.test < 0 || std::abs(r.train + r.valid + r.test - 1.0) > 1e-9)
    throw ConfigError("config: split ratios must be non-negative and sum to 1");
  if (!(r.train > 0)) throw ConfigError("config: train_ratio must be positive");

  if (auto v = value("preprocess.vocab_budget"))
    h.vocab_budget = detail::parse_integer<std::size_t>("preprocess.vocab_budget", *v);
  if (auto v = value("preprocess.vocab_frequency"))
    h.vocab_frequency = detail::parse_enum("preprocess.vocab_frequency", *v, detail::parse_frequency_mode);
  if (auto v = value("preprocess.min_label_count"))
    h.min_label_count = detail::parse_integer<std::size_t>("preprocess.min_label_count", *v);

  if (auto v = value("train.fn_penalty")) h.fn_penalty = detail::parse_real("train.fn_penalty", *v);
  if (auto v = value("train.complexity_budget"))
    h.complexity_budget = detail::parse_integer<int>("train.complexity_budget", *v);
  if (auto v = value("train.max_cg_iters")) h.max_cg_iters = detail::parse_integer<int>("train.max_cg_iters", *v);
  if (auto v = value("train.neg_ratio")) h.neg_ratio = detail::parse_real("train.neg_ratio", *v);
  if (auto v = value("train.seed")) h.seed = detail::parse_integer<std::uint64_t>("train.seed", *v);
  if (auto v = value("train.workers")) cfg.train.workers = detail::parse_integer<unsigned>("train.workers", *v);
  if (auto v = value("train.record_timestamp"))
    cfg.train.record_timestamp = detail::parse_flag("train.record_timestamp", *v);

  if (auto v = value("pricing.max_clause_size"))
    pc.max_clause_size = detail::parse_integer<int>("pricing.max_clause_size", *v);
  if (auto v = value("pricing.pool_size")) pc.pool_size = detail::parse_integer<std::size_t>("pricing.pool_size", *v);
  if (auto v = value("pricing.min_doc_frac")) pc.min_doc_frac = detail::parse_real("pricing.min_doc_frac", *v);
  if (auto v = value("pricing.doc_frac_base"))
    pc.doc_frac_base = detail::parse_enum("pricing.doc_frac_base", *v, detail::parse_doc_frac_base);
  if (auto v = value("pricing.rc_threshold")) pc.rc_threshold = detail::parse_real("pricing.rc_threshold", *v);
  if (auto v = value("pricing.scale_mode"))
    pc.scale_mode = detail::parse_enum("pricing.scale_mode", *v, detail::parse_scale_mode);
  if (auto v = value("pricing.scale_factor")) pc.scale_factor = detail::parse_integer<int>("pricing.scale_factor", *v);
  if (auto v = value("pricing.fix_zero_features"))
    pc.fix_zero_features = detail::parse_flag("pricing.fix_zero_features", *v);

  if (auto v = value("predict.top_k")) h.top_k = detail::parse_integer<int>("predict.top_k", *v);

  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  std::istringstream in(text);
  return parse_config(in, base_dir);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace dnfcg
