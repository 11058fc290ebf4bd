#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnfcg/binarizer.hpp"
#include "dnfcg/bitset.hpp"
#include "dnfcg/clause.hpp"
#include "dnfcg/lp.hpp"

namespace dnfcg {

/// A clause together with the examples it satisfies.
struct Column {
  Clause clause;
  Bitset pos_cover;
  Bitset neg_cover;
  double obj_coeff = 0.0;  // number of satisfied negatives

  int complexity() const noexcept { return clause.complexity(); }
};

struct RmpLpResult {
  DualSnapshot duals;
  double objective = 0.0;
};

/// Restricted master problem for one label.
///
/// LP layout: one xi variable per positive (cost fn_penalty), then one w
/// variable per column (cost = satisfied negatives). Rows: one covering row
/// per positive (xi_i + sum of covering w >= 1) and the complexity row
/// (sum c_k w_k <= C).
class RmpState {
 public:
  RmpState(std::vector<BinaryExample> positives, std::vector<BinaryExample> negatives, double fn_penalty,
           int complexity_budget)
      : positives_(std::move(positives)),
        negatives_(std::move(negatives)),
        fn_penalty_(fn_penalty),
        complexity_budget_(complexity_budget) {
    if (positives_.empty()) throw std::invalid_argument("RmpState: need at least one positive example");
    if (!(fn_penalty_ > 0.0)) throw std::invalid_argument("RmpState: fn_penalty must be > 0");
    if (complexity_budget_ < 2)
      throw std::invalid_argument("RmpState: complexity budget < 2 admits no clause");
    num_features_ = positives_.front().features.size();
    pos_index_ = FeatureIndex(positives_, num_features_);
    neg_index_ = FeatureIndex(negatives_, num_features_);
  }

  const std::vector<BinaryExample>& positives() const noexcept { return positives_; }
  const std::vector<BinaryExample>& negatives() const noexcept { return negatives_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  double fn_penalty() const noexcept { return fn_penalty_; }
  int complexity_budget() const noexcept { return complexity_budget_; }
  std::size_t num_features() const noexcept { return num_features_; }

  bool contains(const Clause& c) const { return index_.contains(c); }

  Column make_column(const Clause& clause) const {
    if (clause.empty()) throw std::invalid_argument("RmpState: empty clause");
    if (clause.max_feature() >= num_features_) throw std::invalid_argument("RmpState: clause feature out of range");
    Column col{clause, pos_index_.cover(clause), neg_index_.cover(clause), 0.0};
    col.obj_coeff = static_cast<double>(col.neg_cover.count());
    return col;
  }

  /// Appends clauses not already present; returns how many were added.
  std::size_t add_columns(std::span<const Clause> clauses) {
    std::size_t added = 0;
    for (const auto& c : clauses) {
      if (index_.contains(c)) continue;
      columns_.push_back(make_column(c));
      index_.insert(c);
      ++added;
    }
    return added;
  }

  LinearProgram build_lp() const {
    LinearProgram lp;
    const std::size_t np = positives_.size();
    for (std::size_t i = 0; i < np; ++i) lp.add_variable(fn_penalty_);
    // w needs no explicit upper bound: w_k <= 1 is implied at some optimum,
    // and an explicit bound would let existing columns keep negative
    // reduced costs, which pricing cannot tell apart from new columns.
    for (const auto& col : columns_) lp.add_variable(col.obj_coeff);

    std::vector<std::vector<LpTerm>> cover_rows(np);
    for (std::size_t i = 0; i < np; ++i) cover_rows[i].push_back({i, 1.0});
    for (std::size_t k = 0; k < columns_.size(); ++k)
      columns_[k].pos_cover.for_each_set([&](std::size_t i) { cover_rows[i].push_back({np + k, 1.0}); });
    for (auto& r : cover_rows) lp.add_row(std::move(r), RowSense::greater_equal, 1.0);

    std::vector<LpTerm> budget;
    for (std::size_t k = 0; k < columns_.size(); ++k)
      budget.push_back({np + k, static_cast<double>(columns_[k].complexity())});
    lp.add_row(std::move(budget), RowSense::less_equal, static_cast<double>(complexity_budget_));
    return lp;
  }

  bool solved() const noexcept { return last_.has_value(); }
  const std::optional<RmpLpResult>& last_solution() const noexcept { return last_; }
  /// LP values of the w variables from the last solve (column order).
  const std::vector<double>& column_values() const noexcept { return column_values_; }

  RmpLpResult solve() {
    const auto lp = build_lp();
    // Columns are only ever appended, so the previous optimal basis stays
    // primal feasible and usually needs just a few pivots.
    auto sol = solve_lp(lp, {}, basis_ ? &*basis_ : nullptr);
    if (!sol.optimal() && basis_) sol = solve_lp(lp);
    if (!sol.optimal())
      throw std::runtime_error(std::string("restricted master LP not optimal: ") + to_string(sol.status));
    const std::size_t np = positives_.size();
    RmpLpResult r;
    r.objective = sol.objective;
    r.duals.mu.resize(np);
    for (std::size_t i = 0; i < np; ++i) r.duals.mu[i] = std::max(0.0, sol.duals[i]);
    r.duals.lambda = std::min(0.0, sol.duals[np]);
    column_values_.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(np), sol.primal.end());
    last_ = r;
    basis_ = std::move(sol.basis);
    return r;
  }

 private:
  std::vector<BinaryExample> positives_;
  std::vector<BinaryExample> negatives_;
  double fn_penalty_;
  int complexity_budget_;
  std::size_t num_features_ = 0;
  FeatureIndex pos_index_, neg_index_;
  std::vector<Column> columns_;
  std::set<Clause> index_;
  std::optional<RmpLpResult> last_;
  std::optional<LpBasis> basis_;
  std::vector<double> column_values_;
};

inline RmpState build_rmp(std::vector<BinaryExample> positives, std::vector<BinaryExample> negatives,
                          double fn_penalty, int complexity_budget, std::span<const Clause> seed_columns = {}) {
  RmpState s(std::move(positives), std::move(negatives), fn_penalty, complexity_budget);
  s.add_columns(seed_columns);
  return s;
}

inline RmpLpResult solve_rmp(RmpState& state) { return state.solve(); }

inline std::size_t add_columns(RmpState& state, std::span<const Clause> clauses) {
  return state.add_columns(clauses);
}

/// fn_penalty * (uncovered positives) + sum over negatives of the number of
/// selected clauses they satisfy.
inline double master_objective(std::span<const Clause> selected, std::span<const BinaryExample> positives,
                               std::span<const BinaryExample> negatives, double fn_penalty) {
  std::size_t uncovered = 0;
  for (const auto& e : positives) {
    const bool hit = std::any_of(selected.begin(), selected.end(),
                                 [&](const Clause& c) { return c.satisfied_by(e.features); });
    if (!hit) ++uncovered;
  }
  std::size_t neg_hits = 0;
  for (const auto& e : negatives)
    for (const auto& c : selected)
      if (c.satisfied_by(e.features)) ++neg_hits;
  return fn_penalty * static_cast<double>(uncovered) + static_cast<double>(neg_hits);
}

struct MasterSolution {
  std::vector<Clause> selected;  // sorted
  Bitset xi;                     // positives satisfying no selected clause
  double objective = 0.0;
  int total_complexity = 0;
  bool proven_optimal = true;
  std::size_t nodes = 0;
};

struct IntegerRmpOptions {
  std::size_t node_limit = 200000;
};

namespace detail {

/// Exact 0/1 solve of the restricted master over its current columns.
///
/// Among optimal selections the returned one has the smallest total
/// complexity, then the lexicographically smallest sorted clause list.
/// Three LP-bounded searches: minimise the objective, then the complexity
/// at that objective, then an include-first dive in clause order that
/// recovers the lexicographically smallest selection meeting both values.
class IntegerRmpSolver {
 public:
  IntegerRmpSolver(const RmpState& state, const IntegerRmpOptions& opt)
      : fn_(state.fn_penalty()), budget_(state.complexity_budget()), np_(state.positives().size()), opt_(opt) {
    for (const auto& c : state.columns()) cols_.push_back(&c);
  }

  MasterSolution solve() {
    reduce();
    std::sort(cols_.begin(), cols_.end(), [](const Column* a, const Column* b) { return a->clause < b->clause; });
    n_ = cols_.size();
    covering_.assign(np_, {});
    for (std::size_t k = 0; k < n_; ++k) cols_[k]->pos_cover.for_each_set([&](std::size_t i) { covering_[i].push_back(k); });

    Incumbent inc = evaluate({});
    phase_min_objective(inc);
    const double v_star = inc.objective;
    phase_min_complexity(inc, v_star);
    const int c_star = inc.complexity;

    std::vector<std::size_t> canonical;
    if (proven_) {
      Node root = make_root();
      auto lp = root_complexity_lp_ ? *root_complexity_lp_ : node_lp(root, Mode::complexity, v_star, nullptr);
      std::vector<std::size_t> chosen;
      if (lp.feasible && dive(root, lp, 0, v_star, c_star, chosen)) canonical = chosen;
      else proven_ = false;  // numerical trouble; keep the phase-two incumbent
    }
    const Incumbent best = canonical.empty() && !proven_ ? inc : evaluate(canonical);

    MasterSolution out;
    for (auto k : best.selected) out.selected.push_back(cols_[k]->clause);
    std::sort(out.selected.begin(), out.selected.end());
    out.xi = ~best.covered;
    out.objective = best.objective;
    out.total_complexity = best.complexity;
    out.proven_optimal = proven_;
    out.nodes = nodes_;
    return out;
  }

 private:
  enum class Mode { objective, complexity };

  struct Incumbent {
    std::vector<std::size_t> selected;
    Bitset covered;
    double objective = std::numeric_limits<double>::infinity();
    int complexity = std::numeric_limits<int>::max();
  };

  struct Node {
    std::vector<signed char> fix;  // -1 free, 0 out, 1 in
    Bitset covered;
    double cost_in = 0.0;
    int complexity_in = 0;
    std::shared_ptr<const LpBasis> warm;  // parent's optimal basis
  };

  struct NodeLp {
    bool feasible = false;
    double bound = 0.0;      // includes the fixed part
    std::vector<double> w;   // per column
    std::vector<double> rc;  // reduced cost of each column's variable
    std::shared_ptr<const LpBasis> basis;
  };

  static constexpr double eps = 1e-9;

  // Drops columns that can never appear in the preferred optimum.
  void reduce() {
    std::vector<const Column*> kept;
    for (const auto* c : cols_) {
      if (c->complexity() > budget_) continue;
      // removing it changes the objective by <= fn*|cover| - obj_coeff
      if (c->obj_coeff >= fn_ * static_cast<double>(c->pos_cover.count()) - eps) continue;
      kept.push_back(c);
    }
    std::vector<bool> dominated(kept.size(), false);
    for (std::size_t b = 0; b < kept.size(); ++b) {
      for (std::size_t a = 0; a < kept.size() && !dominated[b]; ++a) {
        if (a == b || dominated[a]) continue;
        const Column& A = *kept[a];
        const Column& B = *kept[b];
        if (A.obj_coeff > B.obj_coeff || A.complexity() > B.complexity()) continue;
        if (!B.pos_cover.is_subset_of(A.pos_cover)) continue;
        if (A.obj_coeff < B.obj_coeff || A.complexity() < B.complexity() || A.clause < B.clause)
          dominated[b] = true;
      }
    }
    cols_.clear();
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (!dominated[k]) cols_.push_back(kept[k]);
  }

  Incumbent evaluate(std::vector<std::size_t> selected) const {
    Incumbent r;
    std::sort(selected.begin(), selected.end());
    r.selected = std::move(selected);
    r.covered = Bitset(np_);
    double negs = 0.0;
    int cx = 0;
    for (auto k : r.selected) {
      r.covered |= cols_[k]->pos_cover;
      negs += cols_[k]->obj_coeff;
      cx += cols_[k]->complexity();
    }
    r.objective = fn_ * static_cast<double>(np_ - r.covered.count()) + negs;
    r.complexity = cx;
    return r;
  }

  // (objective, complexity, lexicographic index list)
  static bool better(const Incumbent& a, const Incumbent& b) {
    if (a.objective < b.objective - eps) return true;
    if (a.objective > b.objective + eps) return false;
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return a.selected < b.selected;
  }

  Node make_root() const {
    Node n;
    n.fix.assign(n_, -1);
    n.covered = Bitset(np_);
    return n;
  }

  Node child(const Node& parent, std::size_t k, bool include,
             std::shared_ptr<const LpBasis> warm = nullptr) const {
    Node c = parent;
    c.warm = std::move(warm);
    c.fix[k] = include ? 1 : 0;
    if (include) {
      c.covered |= cols_[k]->pos_cover;
      c.cost_in += cols_[k]->obj_coeff;
      c.complexity_in += cols_[k]->complexity();
    }
    return c;
  }

  std::vector<std::size_t> fixed_in(const Node& node) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n_; ++k)
      if (node.fix[k] == 1) out.push_back(k);
    return out;
  }

  /// Objective mode: min fn*xi + negs.  Complexity mode: min complexity
  /// subject to fn*xi + negs <= cap.  Every node shares one LP layout per
  /// mode, with branching expressed through bounds, so a child starts from
  /// its parent's basis and the dual simplex only has to absorb the change.
  NodeLp node_lp(const Node& node, Mode mode, double cap, const LpBasis* start) {
    ++nodes_;
    NodeLp r;
    r.w.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k)
      if (node.fix[k] == 1) r.w[k] = 1.0;
    if (node.complexity_in > budget_) return r;
    const int left = budget_ - node.complexity_in;
    const bool by_objective = mode == Mode::objective;

    LinearProgram lp;
    for (std::size_t i = 0; i < np_; ++i)
      lp.add_variable(by_objective ? fn_ : 0.0, 0.0, node.covered.test(i) ? 0.0 : LinearProgram::infinity);
    for (std::size_t k = 0; k < n_; ++k) {
      const Column& c = *cols_[k];
      double lo = 0.0, hi = 0.0;
      if (node.fix[k] == 1) {
        lo = hi = 1.0;
      } else if (node.fix[k] == -1 && c.complexity() <= left && !c.pos_cover.is_subset_of(node.covered)) {
        // w <= 1 is left implicit: all costs are nonnegative, so capping an
        // optimal w at 1 keeps it feasible and optimal, and the explicit
        // bound makes the simplex far more degenerate.
        hi = LinearProgram::infinity;
      }
      lp.add_variable(by_objective ? c.obj_coeff : c.complexity(), lo, hi);
    }
    for (std::size_t i = 0; i < np_; ++i) {
      std::vector<LpTerm> row{{i, 1.0}};
      for (auto k : covering_[i]) row.push_back({np_ + k, 1.0});
      lp.add_row(std::move(row), RowSense::greater_equal, 1.0);
    }
    std::vector<LpTerm> cx;
    for (std::size_t k = 0; k < n_; ++k) cx.push_back({np_ + k, static_cast<double>(cols_[k]->complexity())});
    lp.add_row(std::move(cx), RowSense::less_equal, static_cast<double>(budget_));
    if (!by_objective) {
      std::vector<LpTerm> obj;
      for (std::size_t i = 0; i < np_; ++i) obj.push_back({i, fn_});
      for (std::size_t k = 0; k < n_; ++k) obj.push_back({np_ + k, cols_[k]->obj_coeff});
      lp.add_row(std::move(obj), RowSense::less_equal, cap + 1e-7);
    }

    auto sol = solve_lp(lp, {}, start);
    if (!sol.optimal() && sol.warm_started) sol = solve_lp(lp);
    if (!sol.optimal()) return r;
    r.feasible = true;
    r.bound = sol.objective;
    r.rc.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      r.w[k] = std::min(1.0, sol.primal[np_ + k]);
      r.rc[k] = sol.reduced_costs[np_ + k];
    }
    r.basis = std::make_shared<const LpBasis>(std::move(sol.basis));
    return r;
  }

  // Forcing a column that sits at zero up to one raises the LP bound by at
  // least its reduced cost, so columns that would push the bound past
  // `limit` are fixed out for the whole subtree.
  void fix_by_reduced_cost(Node& node, const NodeLp& lp, double limit) const {
    for (std::size_t k = 0; k < n_; ++k)
      if (node.fix[k] == -1 && lp.w[k] < 1e-9 && lp.bound + lp.rc[k] > limit) node.fix[k] = 0;
  }

  static bool integral(const std::vector<double>& w) {
    return std::all_of(w.begin(), w.end(), [](double v) { return v < 1e-9 || v > 1.0 - 1e-9; });
  }

  std::vector<std::size_t> round_selection(const Node& node, const std::vector<double>& w, double threshold) const {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < n_; ++k)
      if (node.fix[k] == -1 && w[k] >= threshold) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    auto sel = fixed_in(node);
    int cx = node.complexity_in;
    for (auto k : order)
      if (cx + cols_[k]->complexity() <= budget_) {
        sel.push_back(k);
        cx += cols_[k]->complexity();
      }
    return sel;
  }

  std::size_t branch_column(const Node& node, const std::vector<double>& w) const {
    std::size_t best = n_;
    for (std::size_t k = 0; k < n_; ++k) {
      if (node.fix[k] != -1 || w[k] < 1e-9 || w[k] > 1.0 - 1e-9) continue;
      if (best == n_ || w[k] > w[best]) best = k;
    }
    return best;
  }

  void phase_min_objective(Incumbent& inc) {
    std::vector<Node> stack{make_root()};
    while (!stack.empty()) {
      if (nodes_ >= opt_.node_limit) {
        proven_ = false;
        return;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      const auto lp = node_lp(node, Mode::objective, 0.0, node.warm.get());
      if (!root_objective_basis_) root_objective_basis_ = lp.basis;
      if (!lp.feasible || lp.bound >= inc.objective - eps) continue;
      for (double t : {0.5, 1e-9}) {
        auto cand = evaluate(round_selection(node, lp.w, t));
        if (better(cand, inc)) inc = std::move(cand);
      }
      if (integral(lp.w)) continue;  // rounding at 0.5 already took the LP point
      fix_by_reduced_cost(node, lp, inc.objective - 2 * eps);
      const auto k = branch_column(node, lp.w);
      if (k == n_) continue;
      stack.push_back(child(node, k, false, lp.basis));
      stack.push_back(child(node, k, true, lp.basis));
    }
  }

  void phase_min_complexity(Incumbent& inc, double v_star) {
    std::vector<Node> stack{make_root()};
    // The objective root's optimum satisfies the cap row, so its basis plus
    // that row's slack is a feasible start.
    if (root_objective_basis_) {
      auto b = std::make_shared<LpBasis>(*root_objective_basis_);
      b->rows.push_back(BasisState::basic);
      b->head.clear();
      b->inverse.reset();
      stack.back().warm = std::move(b);
    }
    while (!stack.empty()) {
      if (nodes_ >= opt_.node_limit) {
        proven_ = false;
        return;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      const auto lp = node_lp(node, Mode::complexity, v_star, node.warm.get());
      if (!root_complexity_lp_) root_complexity_lp_ = lp;
      if (!lp.feasible || lp.bound > static_cast<double>(inc.complexity) - 1.0 + 1e-6) continue;
      for (double t : {0.5, 1e-9}) {
        auto cand = evaluate(round_selection(node, lp.w, t));
        if (cand.objective <= v_star + eps && better(cand, inc)) inc = std::move(cand);
      }
      if (integral(lp.w)) continue;
      fix_by_reduced_cost(node, lp, static_cast<double>(inc.complexity) - 1.0 + 1e-6);
      const auto k = branch_column(node, lp.w);
      if (k == n_) continue;
      stack.push_back(child(node, k, false, lp.basis));
      stack.push_back(child(node, k, true, lp.basis));
    }
  }

  bool dive(Node node, const NodeLp& lp, std::size_t k, double v_star, int c_star,
            std::vector<std::size_t>& chosen) {
    if (nodes_ >= opt_.node_limit) return false;
    const double cap_cx = static_cast<double>(c_star) + 1e-6;
    fix_by_reduced_cost(node, lp, cap_cx);
    while (k < n_ && node.fix[k] == 0) ++k;
    if (k == n_) {
      const auto r = evaluate(fixed_in(node));
      if (r.objective <= v_star + eps && r.complexity <= c_star) {
        chosen = r.selected;
        return true;
      }
      return false;
    }
    const Bitset uncovered = ~node.covered;
    const bool usable = cols_[k]->complexity() <= budget_ - node.complexity_in &&
                        cols_[k]->pos_cover.intersection_count(uncovered) > 0;
    if (usable) {
      Node in = child(node, k, true);
      NodeLp in_lp;
      if (lp.w[k] > 1.0 - 1e-9) {
        in_lp = lp;
      } else {
        in_lp = node_lp(in, Mode::complexity, v_star, lp.basis.get());
      }
      if (in_lp.feasible && in_lp.bound <= cap_cx && dive(in, in_lp, k + 1, v_star, c_star, chosen)) return true;
    }
    Node out = child(node, k, false);
    if (!usable || lp.w[k] < 1e-9) return dive(out, lp, k + 1, v_star, c_star, chosen);
    const auto out_lp = node_lp(out, Mode::complexity, v_star, lp.basis.get());
    return out_lp.feasible && out_lp.bound <= cap_cx && dive(out, out_lp, k + 1, v_star, c_star, chosen);
  }

  double fn_;
  int budget_;
  std::size_t np_;
  IntegerRmpOptions opt_;
  std::vector<const Column*> cols_;
  std::vector<std::vector<std::size_t>> covering_;  // columns covering each positive
  std::shared_ptr<const LpBasis> root_objective_basis_;
  std::optional<NodeLp> root_complexity_lp_;
  std::size_t n_ = 0;
  std::size_t nodes_ = 0;
  bool proven_ = true;
};

}  // namespace detail

/// Restricted master heuristic: optimal 0/1 selection over the current
/// columns only, within the complexity budget.
inline MasterSolution solve_integer_rmp(const RmpState& state, const IntegerRmpOptions& options = {}) {
  if (!state.solved()) throw std::logic_error("solve_integer_rmp: solve the LP relaxation first");
  return detail::IntegerRmpSolver(state, options).solve();
}

}  // namespace dnfcg
