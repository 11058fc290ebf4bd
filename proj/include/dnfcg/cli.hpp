#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dnfcg/config.hpp"
#include "dnfcg/corpus.hpp"
#include "dnfcg/eval.hpp"
#include "dnfcg/model_io.hpp"
#include "dnfcg/predictor.hpp"
#include "dnfcg/synth.hpp"
#include "dnfcg/trainer.hpp"

namespace dnfcg::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  // something went wrong while doing the work
inline constexpr int exit_usage = 2;    // bad arguments, bad config, or inputs that cannot be read

inline constexpr const char* workers_env = "DNFCG_WORKERS";

/// "['U/S' AND 'ALS']"
inline std::string render_clause(const Clause& clause, const Vocabulary& vocab) {
  std::string s = "[";
  for (std::size_t i = 0; i < clause.features().size(); ++i) {
    if (i) s += " AND ";
    s += "'" + vocab.word(clause.features()[i]) + "'";
  }
  return s + "]";
}

inline std::string render_clauses(const std::vector<WeightedClause>& clauses, const Vocabulary& vocab) {
  std::string s;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) s += " OR ";
    s += render_clause(clauses[i].clause, vocab);
  }
  return s;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Reads the worker override from the environment. Returns false when the
// variable is set to something that is not a non-negative integer.
inline bool workers_from_env(unsigned& workers, std::ostream& err) {
  const char* raw = std::getenv(workers_env);
  if (raw == nullptr || *raw == '\0') return true;
  try {
    workers = dnfcg::detail::parse_integer<unsigned>(workers_env, raw);
    return true;
  } catch (const ConfigError& e) {
    err << "error: " << workers_env << ": expects a non-negative integer, got '" << raw << "'\n";
    return false;
  }
}

inline std::optional<ModelBundle> open_model(const std::string& path, std::ostream& err) {
  try {
    return load_model(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

inline void write_rule_table(std::ostream& out, const DnfRule& rule, const ModelBundle& model) {
  out << "rule " << rule.label << ": " << rule.n_positives << " positives, " << rule.n_negatives
      << " negatives, n_k " << rule.n_k << ", objective " << fixed(rule.train_objective, 4) << '\n';
  if (rule.clauses.empty()) {
    out << "  no clauses (the rule never fires)\n";
    return;
  }
  std::vector<std::string> rendered;
  std::size_t width = std::string("Clause").size();
  for (const auto& c : rule.clauses) {
    rendered.push_back(render_clause(c.clause, model.vocabulary));
    width = std::max(width, rendered.back().size());
  }
  const int w = static_cast<int>(width);
  out << "  " << std::left << std::setw(w) << "Clause" << std::right << "  " << std::setw(17) << "Positive accuracy"
      << "  " << std::setw(17) << "Negative accuracy" << "  " << std::setw(12) << "W*" << '\n';
  for (std::size_t i = 0; i < rule.clauses.size(); ++i) {
    const auto& c = rule.clauses[i];
    out << "  " << std::left << std::setw(w) << rendered[i] << std::right << "  " << std::setw(17)
        << fixed(c.pos_acc, 3) << "  " << std::setw(17) << fixed(c.neg_acc, 3) << "  " << std::setw(12)
        << fixed(c.weight, 2) << '\n';
  }
}

inline void write_candidates(std::ostream& out, std::size_t index, const std::string& message,
                             const std::vector<Candidate>& list, const Vocabulary& vocab) {
  out << "message " << index << ": " << message << '\n';
  if (list.empty()) {
    out << "  no candidates\n";
    return;
  }
  for (std::size_t r = 0; r < list.size(); ++r)
    out << "  " << r + 1 << ". " << list[r].label << "  score " << fixed(list[r].score, 2) << "  "
        << render_clauses(list[r].satisfied_clauses, vocab) << '\n';
}

struct TrainArgs {
  std::string config;
  std::string out;
};

inline int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(args.config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  if (!workers_from_env(cfg.train.workers, err)) return exit_usage;

  CorpusSplit parts;
  try {
    const auto format = cfg.data.format ? *cfg.data.format : format_from_path(cfg.data.corpus);
    parts = split(load_corpus(cfg.data.corpus, format), cfg.data.ratios, cfg.data.split_seed);
    if (cfg.data.valid_out) save_corpus(*cfg.data.valid_out, parts.valid, format_from_path(*cfg.data.valid_out));
    if (cfg.data.test_out) save_corpus(*cfg.data.test_out, parts.test, format_from_path(*cfg.data.test_out));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  TrainReport report;
  try {
    report = train_all(parts.train, cfg.hyper, cfg.train);
  } catch (const std::exception& e) {
    err << "error: training failed: " << e.what() << '\n';
    return exit_failure;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!report.failures.empty()) {
    for (const auto& [label, why] : report.failures) err << "error: label " << label << ": " << why << '\n';
    err << "error: no model written\n";
    return exit_failure;
  }
  try {
    save_model(args.out, report.model);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }

  const auto& m = report.model;
  out << "records  train " << parts.train.size() << "  valid " << parts.valid.size() << "  test "
      << parts.test.size() << '\n';
  out << "vocabulary  " << m.vocabulary.size() << " words\n\n";
  out << std::left << std::setw(16) << "label" << std::right << std::setw(10) << "positives" << std::setw(10)
      << "negatives" << std::setw(9) << "columns" << std::setw(7) << "iters" << std::setw(9) << "clauses"
      << std::setw(12) << "avg length" << std::setw(11) << "objective" << std::setw(7) << "proof" << std::setw(9)
      << "seconds" << '\n';
  std::size_t columns = 0, clauses = 0, literals = 0;
  for (const auto& [label, rule] : m.rules) {
    std::size_t len = 0;
    for (const auto& c : rule.clauses) len += c.clause.length();
    columns += rule.columns_generated;
    clauses += rule.clauses.size();
    literals += len;
    const double avg = rule.clauses.empty() ? 0.0 : static_cast<double>(len) / static_cast<double>(rule.clauses.size());
    out << std::left << std::setw(16) << label << std::right << std::setw(10) << rule.n_positives << std::setw(10)
        << rule.n_negatives << std::setw(9) << rule.columns_generated << std::setw(7) << rule.cg_iterations
        << std::setw(9) << rule.clauses.size() << std::setw(12) << fixed(avg, 2) << std::setw(11)
        << fixed(rule.train_objective, 2) << std::setw(7) << (rule.cg_terminated_by_proof ? "yes" : "no")
        << std::setw(9) << fixed(report.timings.at(label).seconds, 2) << '\n';
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, m.rules.size()));
  out << "\naverage columns added per label  " << fixed(static_cast<double>(columns) / n, 2) << '\n';
  out << "average clause length            "
      << fixed(clauses == 0 ? 0.0 : static_cast<double>(literals) / static_cast<double>(clauses), 2) << '\n';
  out << "training time                    " << fixed(elapsed, 2) << " s\n";

  const auto valid = restrict_to_frequent_labels(parts.valid, m, m.hyperparameters.min_label_count);
  if (!valid.empty()) {
    EvalOptions o;
    o.k_sweep_max = 0;
    const auto full = evaluate(valid, m, o);
    o.k = static_cast<std::size_t>(m.hyperparameters.top_k);
    const auto cut = evaluate(valid, m, o);
    out << "validation accuracy              " << fixed(full.accuracy, 4) << " untruncated, " << fixed(cut.accuracy, 4)
        << " at K=" << m.hyperparameters.top_k << '\n';
  }
  out << "model written to " << args.out << '\n';
  return exit_ok;
}

struct PredictArgs {
  std::string model;
  std::optional<std::string> message;
  std::optional<std::string> input;
  std::optional<int> top_k;
  bool untruncated = false;
  bool clip_negative_weights = false;
};

inline int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err) {
  const auto model = open_model(args.model, err);
  if (!model) return exit_usage;
  std::vector<std::string> messages;
  if (args.message) {
    messages.push_back(*args.message);
  } else {
    std::ifstream in(*args.input, std::ios::binary);
    if (!in) {
      err << "error: cannot read input file " << *args.input << '\n';
      return exit_usage;
    }
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) messages.push_back(line);
    }
  }
  const std::size_t k = static_cast<std::size_t>(args.top_k.value_or(model->hyperparameters.top_k));
  PredictOptions po;
  po.clip_negative_weights = args.clip_negative_weights;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    auto list = candidate_list(messages[i], *model, po);
    if (!args.untruncated) list = top_k(std::move(list), k);
    if (i) out << '\n';
    write_candidates(out, i + 1, messages[i], list, model->vocabulary);
  }
  return exit_ok;
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::size_t k_sweep = 10;
  std::optional<std::size_t> top_k;
  std::size_t min_train_count = 0;
  bool json = false;
  bool clip_negative_weights = false;
};

inline int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  const auto model = open_model(args.model, err);
  if (!model) return exit_usage;
  LabeledCorpus data;
  try {
    data = restrict_to_frequent_labels(load_corpus(args.data), *model, args.min_train_count);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  if (data.empty()) {
    err << "error: no records to evaluate in " << args.data << '\n';
    return exit_failure;
  }
  EvalOptions o;
  o.k = args.top_k;
  o.k_sweep_max = args.k_sweep;
  o.predict.clip_negative_weights = args.clip_negative_weights;
  const auto report = evaluate(data, *model, o);
  if (args.json) out << report_to_json(report).dump(2) << '\n';
  else write_report_text(out, report);
  return exit_ok;
}

struct InspectArgs {
  std::string model;
  std::optional<std::string> label;
};

inline int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
  const auto model = open_model(args.model, err);
  if (!model) return exit_usage;
  if (args.label) {
    const auto it = model->rules.find(*args.label);
    if (it == model->rules.end()) {
      err << "error: unknown label '" << *args.label << "'; available labels:";
      for (const auto& [label, rule] : model->rules) err << ' ' << label;
      err << '\n';
      return exit_usage;
    }
    write_rule_table(out, it->second, *model);
    return exit_ok;
  }
  bool first = true;
  for (const auto& [label, rule] : model->rules) {
    if (!first) out << '\n';
    first = false;
    write_rule_table(out, rule, *model);
  }
  return exit_ok;
}

struct SynthArgs {
  std::size_t labels = 3;
  std::size_t per_label = 500;
  std::size_t vocab = 50;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  LabeledCorpus corpus;
  CorpusFormat format;
  try {
    format = format_from_path(args.out);
    corpus = synth::generate(synth::standard_spec(args.labels, args.per_label, args.vocab, args.noise, args.seed));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  try {
    save_corpus(args.out, corpus, format);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  out << "wrote " << corpus.size() << " records to " << args.out << '\n';
  return exit_ok;
}

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn and apply DNF classification rules by column generation", "dnfcg"};
  app.require_subcommand(1);

  detail::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one rule per label from a config file");
  train_cmd->add_option("--config", train.config, "INI run configuration")->required();
  train_cmd->add_option("--out", train.out, "Model file to write")->required();

  detail::PredictArgs predict;
  int predict_k = 0;
  auto* predict_cmd = app.add_subcommand("predict", "Rank candidate labels for messages");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  auto* msg = predict_cmd->add_option("--message", predict.message, "A single message");
  auto* input = predict_cmd->add_option("--input", predict.input, "File with one message per line");
  msg->excludes(input);
  predict_cmd->add_option("--top-k", predict_k, "Candidates to keep (default: the model's K)")
      ->check(CLI::PositiveNumber);
  predict_cmd->add_flag("--untruncated", predict.untruncated, "Keep every candidate");
  predict_cmd->add_flag("--clip-negative-weights", predict.clip_negative_weights,
                        "Ignore negative clause weights when scoring");

  detail::EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Candidate-list accuracy on a labelled dataset");
  evaluate_cmd->add_option("--model", evaluate.model, "Model file")->required();
  evaluate_cmd->add_option("--data", evaluate.data, "Labelled CSV or JSONL file")->required();
  evaluate_cmd->add_option("--k-sweep", evaluate.k_sweep, "Report accuracy for K = 1..n (0 disables)");
  evaluate_cmd->add_option("--top-k", evaluate.top_k, "Truncate candidate lists (default: untruncated)")
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--min-train-count", evaluate.min_train_count,
                           "Only score labels seen at least this often in training");
  evaluate_cmd->add_flag("--json", evaluate.json, "Emit the report as JSON");
  evaluate_cmd->add_flag("--clip-negative-weights", evaluate.clip_negative_weights,
                         "Ignore negative clause weights when scoring");

  detail::InspectArgs inspect;
  bool inspect_all = false;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the clauses and weights of learned rules");
  inspect_cmd->add_option("--model", inspect.model, "Model file")->required();
  auto* label = inspect_cmd->add_option("--label", inspect.label, "Label to show");
  auto* all = inspect_cmd->add_flag("--all", inspect_all, "Show every label (the default)");
  label->excludes(all);

  detail::SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with planted rules");
  synth_cmd->add_option("--labels", synth_args.labels, "Number of labels");
  synth_cmd->add_option("--per-label", synth_args.per_label, "Messages per label");
  synth_cmd->add_option("--vocab", synth_args.vocab, "Vocabulary size");
  synth_cmd->add_option("--noise", synth_args.noise, "Label flip probability")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth_args.seed, "Random seed");
  synth_cmd->add_option("--out", synth_args.out, "Output .csv or .jsonl")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*predict_cmd && !predict.message && !predict.input)
      throw CLI::ValidationError("--message/--input", "predict needs one of them");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*train_cmd) return detail::cmd_train(train, out, err);
    if (*predict_cmd) {
      if (predict_k > 0) predict.top_k = predict_k;
      return detail::cmd_predict(predict, out, err);
    }
    if (*evaluate_cmd) return detail::cmd_evaluate(evaluate, out, err);
    if (*inspect_cmd) return detail::cmd_inspect(inspect, out, err);
    return detail::cmd_synth(synth_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + std::max(argc, 1)), out, err);
}

}  // namespace dnfcg::cli
