#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnfcg/rng.hpp"

namespace dnfcg {

struct RawRecord {
  std::string message;
  std::string label;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Ordered records plus per-label counts. Counts are always derived from
/// the records, so construct through from_records().
class LabeledCorpus {
 public:
  LabeledCorpus() = default;

  static LabeledCorpus from_records(std::vector<RawRecord> records) {
    LabeledCorpus c;
    c.records_ = std::move(records);
    for (const auto& r : c.records_) ++c.label_counts_[r.label];
    return c;
  }

  const std::vector<RawRecord>& records() const noexcept { return records_; }
  const std::map<std::string, std::size_t>& label_counts() const noexcept { return label_counts_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::size_t count(const std::string& label) const {
    auto it = label_counts_.find(label);
    return it == label_counts_.end() ? 0 : it->second;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(label_counts_.size());
    for (const auto& [l, _] : label_counts_) out.push_back(l);
    return out;
  }

  friend bool operator==(const LabeledCorpus& a, const LabeledCorpus& b) { return a.records_ == b.records_; }

 private:
  std::vector<RawRecord> records_;
  std::map<std::string, std::size_t> label_counts_;
};

enum class CorpusFormat { csv, jsonl };

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = {})
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

inline CorpusFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::jsonl;
  if (ext == ".csv") return CorpusFormat::csv;
  throw std::invalid_argument("cannot infer corpus format from extension '" + ext + "' (use .csv or .jsonl)");
}

inline CorpusFormat parse_format(std::string_view s) {
  if (s == "csv") return CorpusFormat::csv;
  if (s == "jsonl") return CorpusFormat::jsonl;
  throw std::invalid_argument("unknown corpus format '" + std::string(s) + "'");
}

namespace detail {

// RFC 4180 record reader. Quoted fields may contain commas, doubled quotes
// and newlines. `line` tracks the physical line where the record started.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                            std::size_t& next_line) {
  fields.clear();
  line = next_line;
  std::string field;
  bool in_quotes = false, any = false, was_quoted = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++next_line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw ParseError(line, "unexpected quote inside unquoted field");
      in_quotes = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r') {
      // tolerate CRLF
    } else if (c == '\n') {
      ++next_line;
      fields.push_back(std::move(field));
      return true;
    } else {
      if (was_quoted) throw ParseError(line, "characters after closing quote");
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(line, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline LabeledCorpus parse_csv(std::istream& in) {
  std::vector<std::string> fields;
  std::size_t line = 0, next_line = 1;
  // skip blank lines before the header
  do {
    if (!read_csv_record(in, fields, line, next_line)) return {};
  } while (fields.size() == 1 && fields[0].empty());

  std::ptrdiff_t msg_col = -1, label_col = -1;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (fields[k] == "message") msg_col = static_cast<std::ptrdiff_t>(k);
    else if (fields[k] == "label") label_col = static_cast<std::ptrdiff_t>(k);
  }
  if (msg_col < 0) throw ParseError(line, "header has no 'message' column");
  if (label_col < 0) throw ParseError(line, "header has no 'label' column");
  const auto need = static_cast<std::size_t>(std::max(msg_col, label_col)) + 1;

  std::vector<RawRecord> records;
  while (read_csv_record(in, fields, line, next_line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() < need)
      throw ParseError(line, std::string("missing '") +
                                 (static_cast<std::size_t>(label_col) >= fields.size() ? "label" : "message") +
                                 "' field");
    records.push_back({fields[static_cast<std::size_t>(msg_col)], fields[static_cast<std::size_t>(label_col)]});
  }
  return LabeledCorpus::from_records(std::move(records));
}

inline LabeledCorpus parse_jsonl(std::istream& in) {
  std::vector<RawRecord> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
    for (const char* key : {"message", "label"}) {
      auto it = obj.find(key);
      if (it == obj.end()) throw ParseError(line, std::string("missing '") + key + "' field");
      if (!it->is_string()) throw ParseError(line, std::string("field '") + key + "' is not a string");
    }
    records.push_back({obj["message"].get<std::string>(), obj["label"].get<std::string>()});
  }
  return LabeledCorpus::from_records(std::move(records));
}

}  // namespace detail

inline LabeledCorpus parse_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::csv ? detail::parse_csv(in) : detail::parse_jsonl(in);
}

/// Reads a corpus file. An empty file yields an empty corpus.
inline LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file '" + path.string() + "'");
  try {
    return parse_corpus(in, format);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

inline LabeledCorpus load_corpus(const std::filesystem::path& path) { return load_corpus(path, format_from_path(path)); }

inline void write_corpus(std::ostream& out, const LabeledCorpus& corpus, CorpusFormat format) {
  if (format == CorpusFormat::csv) {
    out << "message,label\n";
    for (const auto& r : corpus.records())
      out << detail::csv_escape(r.message) << ',' << detail::csv_escape(r.label) << '\n';
  } else {
    for (const auto& r : corpus.records()) {
      nlohmann::ordered_json obj;
      obj["message"] = r.message;
      obj["label"] = r.label;
      out << obj.dump() << '\n';
    }
  }
}

inline void save_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus file '" + path.string() + "'");
  write_corpus(out, corpus, format);
}

inline bool is_punctuation(unsigned char c) noexcept {
  // bytes >= 0x80 belong to multi-byte UTF-8 sequences and are kept
  return c < 0x80 && !std::isalnum(c) && !std::isspace(c) && c != '/';
}

/// Replaces every punctuation character except '/' by a single space.
/// Case is left untouched.
inline std::string clean_message(std::string_view raw) {
  std::string out(raw);
  for (auto& c : out)
    if (is_punctuation(static_cast<unsigned char>(c))) c = ' ';
  return out;
}

inline std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
    const auto start = i;
    while (i < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

inline LabeledCorpus filter_rare_labels(const LabeledCorpus& corpus, std::size_t min_count) {
  if (min_count < 1) throw std::invalid_argument("filter_rare_labels: min_count must be >= 1");
  std::vector<RawRecord> kept;
  kept.reserve(corpus.size());
  for (const auto& r : corpus.records())
    if (corpus.count(r.label) >= min_count) kept.push_back(r);
  return LabeledCorpus::from_records(std::move(kept));
}

struct SplitRatios {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
};

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus valid;
  LabeledCorpus test;
};

/// Seeded uniform shuffle, then contiguous slicing. Validation and test
/// sizes are floor(n * ratio); the remainder goes to training.
inline CorpusSplit split(const LabeledCorpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0)
    throw std::invalid_argument("split: ratios must be non-negative");
  if (std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split: ratios must sum to 1");
  const std::size_t n = corpus.size();
  const bool all_positive = ratios.train > 0 && ratios.valid > 0 && ratios.test > 0;
  if (all_positive && n < 3) throw std::invalid_argument("split: need at least 3 records for three non-empty splits");

  const auto n_valid = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.valid + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.test + 1e-9));
  const std::size_t n_train = n - n_valid - n_test;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  auto slice = [&](std::size_t begin, std::size_t end) {
    std::vector<RawRecord> out;
    out.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) out.push_back(corpus.records()[order[k]]);
    return LabeledCorpus::from_records(std::move(out));
  };
  return {slice(0, n_train), slice(n_train, n_train + n_valid), slice(n_train + n_valid, n)};
}

/// Stable 64-bit fingerprint of the records, used as model provenance.
inline std::string corpus_fingerprint(const LabeledCorpus& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : corpus.records()) {
    h = fnv1a64(r.message, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(r.label, h);
    h = fnv1a64("\x1e", h);
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace dnfcg
