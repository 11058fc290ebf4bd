#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnfcg {

enum class RowSense { greater_equal, less_equal, equal };

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

struct LpTerm {
  std::size_t var;
  double coeff;
};

struct LpRow {
  std::vector<LpTerm> terms;
  RowSense sense;
  double rhs;
};

/// min c'x  s.t.  rows,  lower <= x <= upper.  Lower bounds must be finite.
class LinearProgram {
 public:
  static constexpr double infinity = std::numeric_limits<double>::infinity();

  std::size_t add_variable(double cost, double lower = 0.0, double upper = infinity) {
    objective_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return objective_.size() - 1;
  }

  std::size_t add_row(std::vector<LpTerm> terms, RowSense sense, double rhs) {
    rows_.push_back({std::move(terms), sense, rhs});
    return rows_.size() - 1;
  }

  std::size_t num_vars() const noexcept { return objective_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  const std::vector<double>& objective() const noexcept { return objective_; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<LpRow>& rows() const noexcept { return rows_; }

  void validate() const {
    for (std::size_t j = 0; j < num_vars(); ++j) {
      if (!std::isfinite(objective_[j])) throw std::invalid_argument("LinearProgram: non-finite cost");
      if (!std::isfinite(lower_[j])) throw std::invalid_argument("LinearProgram: lower bounds must be finite");
      if (std::isnan(upper_[j]) || upper_[j] < lower_[j])
        throw std::invalid_argument("LinearProgram: upper bound below lower bound");
    }
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("LinearProgram: non-finite right-hand side");
      for (const auto& t : r.terms) {
        if (t.var >= num_vars()) throw std::invalid_argument("LinearProgram: row references unknown variable");
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("LinearProgram: non-finite coefficient");
      }
    }
  }

 private:
  std::vector<double> objective_, lower_, upper_;
  std::vector<LpRow> rows_;
};

enum class BasisState : unsigned char { at_lower, at_upper, basic };

/// A simplex basis that can seed a later solve of a related LP. `rows`
/// refers to each row's slack (or artificial) variable. Variables missing
/// from the end of `vars` start at their lower bound, which is how columns
/// appended since the basis was taken are handled.
struct LpBasis {
  std::vector<BasisState> vars;
  std::vector<BasisState> rows;
  /// Optional cached inverse of the basis matrix, valid only for an LP with
  /// the same rows and the same coefficients in the basic columns. Entries
  /// of `head` are variable indices, or -(i+1) for row i's slack.
  std::vector<std::int64_t> head;
  std::shared_ptr<const std::vector<double>> inverse;
  std::size_t inverse_age = 0;  // pivots applied since the last refactorization
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> primal;
  /// One per row. Sign convention for minimization: >= rows have duals
  /// >= 0, <= rows have duals <= 0.
  std::vector<double> duals;
  /// c_j - sum_i y_i a_ij for each structural variable.
  std::vector<double> reduced_costs;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Final basis, filled when optimal.
  LpBasis basis;
  bool warm_started = false;

  bool optimal() const noexcept { return status == LpStatus::optimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 64;
  std::size_t max_iterations = 0;  // 0: automatic
};

namespace detail {

/// Dense bounded-variable revised simplex, two phases. The basis inverse is
/// kept explicitly and refreshed by Gauss-Jordan every refactor_interval
/// pivots. Devex pricing.
///
/// Covering LPs are massively degenerate, so a run of degenerate pivots
/// triggers a small random relaxation of the bounds of the basic variables.
/// Once the relaxed problem is optimal the true bounds are restored and a
/// few dual simplex pivots repair the primal infeasibility this leaves
/// behind. Bland's rule remains as a last resort against cycling.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt, const LpBasis* start) : lp_(lp), opt_(opt) {
    setup();
    warm_ = start && try_warm_start(*start);
    if (warm_ && opt_.max_iterations == 0) max_iter_ = std::min(max_iter_, warm_budget_);
    if (!warm_) {
      restore_cold_bounds();
      cold_start();
    }
  }

  LpSolution run() {
    LpSolution sol;
    sol.warm_started = warm_;
    // phase 1
    if (!warm_ && num_art_ > 0) {
      std::vector<double> c1(cols_.size(), 0.0);
      for (std::size_t k = first_art_; k < cols_.size(); ++k) c1[k] = 1.0;
      const auto st = solve_phase(c1, sol.iterations);
      if (st == LpStatus::iteration_limit) {
        sol.status = st;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (head_[r] >= first_art_) infeas += std::max(0.0, xb_[r]);
      if (infeas > 1e-7 * std::max(1.0, rhs_scale_)) {
        sol.status = LpStatus::infeasible;
        return sol;
      }
      for (std::size_t k = first_art_; k < cols_.size(); ++k) ub_[k] = 0.0;
    }
    // phase 2
    if (needs_dual_) {
      const auto st = dual_repair(cost_, sol.iterations);
      if (st != LpStatus::optimal) {
        sol.status = st;
        return sol;
      }
    }
    degenerate_run_ = 0;
    const auto st = solve_phase(cost_, sol.iterations);
    sol.status = st;
    if (st != LpStatus::optimal) return sol;
    extract(sol);
    return sol;
  }

 private:
  enum class Status : unsigned char { basic, at_lower, at_upper };
  struct Entry {
    std::size_t row;
    double val;
  };

  void setup() {
    lp_.validate();
    n_ = lp_.num_vars();
    m_ = lp_.num_rows();
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = lp_.rows()[i];
      double b = row.rhs;
      for (const auto& t : row.terms) b -= t.coeff * lp_.lower()[t.var];
      rhs[i] = b;
    }
    // Structural columns, shifted so that lower bounds are zero. Rows are
    // never rescaled by the sign of their right-hand side, so the matrix
    // depends on the coefficients alone and a cached basis inverse stays
    // valid when only bounds change.
    cols_.assign(n_, {});
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& t : lp_.rows()[i].terms)
        if (t.coeff != 0.0) cols_[t.var].push_back({i, t.coeff});
    for (auto& c : cols_) merge_duplicates(c);
    cost_ = lp_.objective();
    for (std::size_t j = 0; j < n_; ++j) ub_.push_back(lp_.upper()[j] - lp_.lower()[j]);

    b_.resize(m_);
    rhs_scale_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      b_[i] = rhs[i];
      rhs_scale_ = std::max(rhs_scale_, std::abs(b_[i]));
    }

    // slacks, then artificials for rows whose slack cannot start basic
    slack_of_row_.assign(m_, npos);
    art_of_row_.assign(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto sense = lp_.rows()[i].sense;
      if (sense == RowSense::equal) continue;
      const double coef = sense == RowSense::less_equal ? 1.0 : -1.0;
      slack_of_row_[i] = cols_.size();
      row_of_.resize(cols_.size() + 1, npos);
      row_of_[cols_.size()] = i;
      cols_.push_back({{i, coef}});
      cost_.push_back(0.0);
      ub_.push_back(LinearProgram::infinity);
    }
    first_art_ = cols_.size();
    for (std::size_t i = 0; i < m_; ++i) {
      // a slack can start basic when b / coef >= 0
      if (slack_of_row_[i] != npos && cols_[slack_of_row_[i]][0].val * b_[i] >= 0.0) continue;
      art_of_row_[i] = cols_.size();
      row_of_.resize(cols_.size() + 1, npos);
      row_of_[cols_.size()] = i;
      cols_.push_back({{i, b_[i] < 0.0 ? -1.0 : 1.0}});
      cost_.push_back(0.0);
      ub_.push_back(LinearProgram::infinity);
      ++num_art_;
    }
    lb_.assign(cols_.size(), 0.0);
    devex_.assign(cols_.size(), 1.0);
    xb_.assign(m_, 0.0);

    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 1000 + 200 * (m_ + cols_.size());
    warm_budget_ = 1000 + 4 * (m_ + cols_.size());
    bland_after_ = 5 * (m_ + cols_.size());
  }

  // Slack basis, except that a row needing an artificial takes a structural
  // singleton column instead when one can carry the row on its own.
  void cold_start() {
    std::vector<std::size_t> singleton(m_, npos);
    for (std::size_t j = 0; j < n_; ++j) {
      if (cols_[j].size() != 1) continue;
      const auto [i, a] = cols_[j][0];
      if (art_of_row_[i] == npos || b_[i] / a < 0.0 || b_[i] / a > ub_[j]) continue;
      if (singleton[i] == npos || cost_[j] * std::abs(b_[i] / a) < cost_[singleton[i]] * std::abs(b_[i] / cols_[singleton[i]][0].val))
        singleton[i] = j;
    }
    head_.assign(m_, npos);
    status_.assign(cols_.size(), Status::at_lower);
    for (std::size_t i = 0; i < m_; ++i) {
      if (art_of_row_[i] == npos) head_[i] = slack_of_row_[i];
      else if (singleton[i] != npos) head_[i] = singleton[i];
      else head_[i] = art_of_row_[i];
      status_[head_[i]] = Status::basic;
    }
    refactor();
  }

  void restore_cold_bounds() {
    for (std::size_t k = first_art_; k < cols_.size(); ++k) ub_[k] = LinearProgram::infinity;
    needs_dual_ = false;
  }

  bool try_warm_start(const LpBasis& start) {
    if (start.rows.size() != m_ || start.vars.size() > n_) return false;
    if (start.inverse && start.head.size() == m_ && start.inverse->size() == m_ * m_) {
      if (!adopt_head(start)) return false;
      binv_ = *start.inverse;
      age_ = start.inverse_age;
      recompute_xb();
      return finish_warm_start();
    }
    head_.clear();
    status_.assign(cols_.size(), Status::at_lower);
    for (std::size_t j = 0; j < start.vars.size(); ++j) {
      if (start.vars[j] == BasisState::basic) {
        if (head_.size() == m_) return false;
        head_.push_back(j);
        status_[j] = Status::basic;
      } else if (start.vars[j] == BasisState::at_upper && std::isfinite(ub_[j])) {
        status_[j] = Status::at_upper;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (start.rows[i] != BasisState::basic) continue;
      const auto j = slack_of_row_[i] != npos ? slack_of_row_[i] : art_of_row_[i];
      if (head_.size() == m_) return false;
      head_.push_back(j);
      status_[j] = Status::basic;
    }
    if (head_.size() != m_) return false;
    try {
      refactor();
    } catch (const std::runtime_error&) {
      return false;
    }
    return finish_warm_start();
  }

  bool adopt_head(const LpBasis& start) {
    status_.assign(cols_.size(), Status::at_lower);
    for (std::size_t j = 0; j < start.vars.size(); ++j)
      if (start.vars[j] == BasisState::at_upper && std::isfinite(ub_[j])) status_[j] = Status::at_upper;
    head_.assign(m_, npos);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto h = start.head[r];
      std::size_t j = npos;
      if (h >= 0 && static_cast<std::size_t>(h) < start.vars.size()) {
        j = static_cast<std::size_t>(h);
      } else if (h < 0 && static_cast<std::size_t>(-h - 1) < m_) {
        j = slack_of_row_[static_cast<std::size_t>(-h - 1)];
      }
      if (j == npos || status_[j] == Status::basic) return false;
      head_[r] = j;
      status_[j] = Status::basic;
    }
    return true;
  }

  bool finish_warm_start() {
    for (std::size_t k = first_art_; k < cols_.size(); ++k) ub_[k] = 0.0;
    const double tol = 1e-9 * std::max(1.0, rhs_scale_);
    bool primal_feasible = true;
    for (std::size_t r = 0; r < m_ && primal_feasible; ++r)
      primal_feasible = xb_[r] >= -tol && xb_[r] <= ub_[head_[r]] + tol;
    if (primal_feasible) return true;
    // A basis that is still dual feasible (typically the parent's basis
    // after a bound change) is repaired by the dual simplex instead.
    const auto y = duals(cost_);
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (status_[j] == Status::basic || !(ub_[j] > lb_[j])) continue;
      const double d = reduced_cost(j, cost_, y);
      if ((status_[j] == Status::at_lower && d < -opt_.optimality_tol) ||
          (status_[j] == Status::at_upper && d > opt_.optimality_tol))
        return false;
    }
    needs_dual_ = true;
    return true;
  }

  static void merge_duplicates(std::vector<Entry>& c) {
    std::sort(c.begin(), c.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
    std::vector<Entry> out;
    for (const auto& e : c) {
      if (!out.empty() && out.back().row == e.row) out.back().val += e.val;
      else out.push_back(e);
    }
    c = std::move(out);
  }

  double value_of_nonbasic(std::size_t j) const { return status_[j] == Status::at_upper ? ub_[j] : lb_[j]; }

  void refactor() {
    // B = [a_head(0) ... a_head(m-1)], invert with partial pivoting
    std::vector<double> B(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      for (const auto& e : cols_[head_[r]]) B[e.row * m_ + r] = e.val;
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) inv[r * m_ + r] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(B[r * m_ + c]) > std::abs(B[piv * m_ + c])) piv = r;
      if (std::abs(B[piv * m_ + c]) < 1e-13) throw std::runtime_error("simplex: singular basis");
      if (piv != c)
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(B[piv * m_ + k], B[c * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
        }
      const double p = B[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        B[c * m_ + k] /= p;
        inv[c * m_ + k] /= p;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = B[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          B[r * m_ + k] -= f * B[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    age_ = 0;
    recompute_xb();
  }

  void recompute_xb() {
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (status_[j] == Status::basic) continue;
      const double v = value_of_nonbasic(j);
      if (v == 0.0) continue;
      for (const auto& e : cols_[j]) rhs[e.row] -= v * e.val;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_[r * m_ + k] * rhs[k];
      xb_[r] = s;
    }
  }

  std::vector<double> duals(const std::vector<double>& c) const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = c[head_[r]];
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv_[r * m_ + k];
    }
    return y;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& c, const std::vector<double>& y) const {
    double d = c[j];
    for (const auto& e : cols_[j]) d -= y[e.row] * e.val;
    return d;
  }

  LpStatus iterate(const std::vector<double>& c, std::size_t& iterations) {
    bool perturb_pending = false;
    while (true) {
      if (iterations >= max_iter_) return LpStatus::iteration_limit;
      if (perturb_pending) {
        perturb_basic_bounds();
        perturb_pending = false;
      }
      if (age_ >= opt_.refactor_interval) refactor();
      const auto y = duals(c);

      // entering variable
      std::size_t q = cols_.size();
      double best = 0.0, dq = 0.0;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (status_[j] == Status::basic) continue;
        const double d = reduced_cost(j, c, y);
        double gain = 0.0;
        if (status_[j] == Status::at_lower && d < -opt_.optimality_tol && ub_[j] > lb_[j]) gain = -d;
        else if (status_[j] == Status::at_upper && d > opt_.optimality_tol) gain = d;
        if (gain <= 0.0) continue;
        if (bland_) {
          q = j;
          dq = d;
          break;
        }
        const double score = gain * gain / devex_[j];
        if (score > best) {
          best = score;
          q = j;
          dq = d;
        }
      }
      if (q == cols_.size()) {
        if (age_ > opt_.refactor_interval / 4) {
          // confirm optimality on a fresh factorization
          refactor();
          const auto y2 = duals(c);
          bool still_optimal = true;
          for (std::size_t j = 0; j < cols_.size() && still_optimal; ++j) {
            if (status_[j] == Status::basic) continue;
            const double d = reduced_cost(j, c, y2);
            if ((status_[j] == Status::at_lower && d < -opt_.optimality_tol && ub_[j] > lb_[j]) ||
                (status_[j] == Status::at_upper && d > opt_.optimality_tol))
              still_optimal = false;
          }
          if (!still_optimal) continue;
        }
        return LpStatus::optimal;
      }
      const double dir = dq < 0 ? 1.0 : -1.0;  // +1: increase from lower

      // alpha = B^-1 a_q
      std::vector<double> alpha(m_, 0.0);
      for (const auto& e : cols_[q])
        for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv_[r * m_ + e.row] * e.val;

      // ratio test; basic r changes at rate -dir*alpha[r]
      double theta = ub_[q] - lb_[q];  // bound flip
      std::size_t leave = m_;
      bool leave_to_upper = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const double rate = -dir * alpha[r];
        double t;
        bool to_upper;
        if (rate < -opt_.pivot_tol) {
          t = std::max(0.0, xb_[r] - lb_[head_[r]]) / -rate;
          to_upper = false;
        } else if (rate > opt_.pivot_tol && std::isfinite(ub_[head_[r]])) {
          t = std::max(0.0, ub_[head_[r]] - xb_[r]) / rate;
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (t < theta - 1e-12) {
          take = true;
        } else if (t <= theta + 1e-12) {
          // prefer a pivot over a tied bound flip
          if (leave == m_) take = true;
          else take = bland_ ? head_[r] < head_[leave] : std::abs(alpha[r]) > std::abs(alpha[leave]);
        }
        if (take) {
          theta = std::min(theta, t);
          leave = r;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return LpStatus::unbounded;

      ++iterations;
      if (theta <= 1e-12) {
        if (++degenerate_ > bland_after_) bland_ = true;
        // deferred to the next pass: relaxing bounds now would strand the
        // leaving variable away from the bound it is recorded at
        if (++degenerate_run_ > stall_run_ && perturb_rounds_ < max_perturb_rounds_) perturb_pending = true;
      } else {
        degenerate_run_ = 0;
      }

      for (std::size_t r = 0; r < m_; ++r) xb_[r] -= dir * alpha[r] * theta;
      const double xq = (dir > 0 ? lb_[q] : ub_[q]) + dir * theta;

      if (leave == m_) {
        status_[q] = dir > 0 ? Status::at_upper : Status::at_lower;
        continue;
      }

      update_devex(q, leave, alpha[leave]);
      const std::size_t out = head_[leave];
      status_[out] = leave_to_upper ? Status::at_upper : Status::at_lower;
      status_[q] = Status::basic;
      head_[leave] = q;
      xb_[leave] = xq;

      const double piv = alpha[leave];
      double* prow = &binv_[leave * m_];
      for (std::size_t k = 0; k < m_; ++k) prow[k] /= piv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == leave || alpha[r] == 0.0) continue;
        const double f = alpha[r];
        double* row = &binv_[r * m_];
        for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
      ++age_;
    }
  }

  // Devex reference weights approximate steepest-edge norms, which steer
  // the entering choice away from the long runs of degenerate pivots that
  // Dantzig pricing produces on covering problems. Must run before the basis
  // inverse is updated, since it reads the pivot row.
  void update_devex(std::size_t q, std::size_t leave, double pivot) {
    const double* rho = &binv_[leave * m_];
    const double wq = devex_[q];
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (status_[j] == Status::basic || j == q) continue;
      double a = 0.0;
      for (const auto& e : cols_[j]) a += rho[e.row] * e.val;
      if (a == 0.0) continue;
      const double ratio = a / pivot;
      devex_[j] = std::max(devex_[j], ratio * ratio * wq);
    }
    devex_[head_[leave]] = std::max(wq / (pivot * pivot), 1.0);
    if (devex_[head_[leave]] > 1e6) std::fill(devex_.begin(), devex_.end(), 1.0);
  }

  // Primal simplex on the current phase costs. If bounds were relaxed on the
  // way, restore them and repair feasibility with the dual simplex, which
  // keeps the reduced costs optimal; then polish with the primal again.
  LpStatus solve_phase(const std::vector<double>& c, std::size_t& iterations) {
    while (true) {
      const auto st = iterate(c, iterations);
      if (!perturbed_) return st;
      restore_bounds();
      recompute_xb();
      if (st != LpStatus::optimal) return st;
      const auto fix = dual_repair(c, iterations);
      if (fix != LpStatus::optimal) return fix;
      degenerate_run_ = 0;
    }
  }

  void perturb_basic_bounds() {
    if (!perturbed_) {
      orig_ub_ = ub_;
      perturbed_ = true;
    }
    ++perturb_rounds_;
    degenerate_run_ = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto j = head_[r];
      if (j >= first_art_ || lb_[j] != 0.0) continue;
      lb_[j] = -next_perturbation();
      if (std::isfinite(ub_[j])) ub_[j] += next_perturbation();
    }
  }

  double next_perturbation() {
    rng_state_ = rng_state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(rng_state_ >> 11) * 0x1.0p-53;
    return 1e-6 * (1.0 + u);
  }

  void restore_bounds() {
    std::fill(lb_.begin(), lb_.end(), 0.0);
    for (std::size_t j = 0; j < first_art_; ++j) ub_[j] = orig_ub_[j];
    perturbed_ = false;
  }

  LpStatus dual_repair(const std::vector<double>& c, std::size_t& iterations) {
    const double tol = opt_.feasibility_tol;
    while (true) {
      if (iterations >= max_iter_) return LpStatus::iteration_limit;
      if (age_ >= opt_.refactor_interval) refactor();
      // leaving row: largest bound violation
      std::size_t leave = m_;
      double worst = tol;
      bool below = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const auto j = head_[r];
        const double lo = lb_[j] - xb_[r];
        const double hi = std::isfinite(ub_[j]) ? xb_[r] - ub_[j] : 0.0;
        if (lo > worst) {
          worst = lo;
          leave = r;
          below = true;
        }
        if (hi > worst) {
          worst = hi;
          leave = r;
          below = false;
        }
      }
      if (leave == m_) return LpStatus::optimal;

      const auto y = duals(c);
      const double* rho = &binv_[leave * m_];
      std::size_t q = cols_.size();
      double best_ratio = LinearProgram::infinity, best_abs = 0.0;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (status_[j] == Status::basic || !(ub_[j] > lb_[j])) continue;
        double a = 0.0;
        for (const auto& e : cols_[j]) a += rho[e.row] * e.val;
        if (std::abs(a) <= opt_.pivot_tol) continue;
        // x_leave moves by -a per unit increase of x_j
        const bool up = status_[j] == Status::at_lower;
        const bool helps = below ? (up ? a < 0 : a > 0) : (up ? a > 0 : a < 0);
        if (!helps) continue;
        const double ratio = std::abs(reduced_cost(j, c, y)) / std::abs(a);
        if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && std::abs(a) > best_abs)) {
          best_ratio = ratio;
          best_abs = std::abs(a);
          q = j;
        }
      }
      if (q == cols_.size()) return LpStatus::infeasible;

      std::vector<double> alpha(m_, 0.0);
      for (const auto& e : cols_[q])
        for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv_[r * m_ + e.row] * e.val;
      const auto out = head_[leave];
      const double target = below ? lb_[out] : ub_[out];
      const double step = (xb_[leave] - target) / alpha[leave];
      for (std::size_t r = 0; r < m_; ++r) xb_[r] -= alpha[r] * step;
      const double xq = value_of_nonbasic(q) + step;
      status_[out] = below ? Status::at_lower : Status::at_upper;
      status_[q] = Status::basic;
      head_[leave] = q;
      xb_[leave] = xq;
      const double piv = alpha[leave];
      double* prow = &binv_[leave * m_];
      for (std::size_t k = 0; k < m_; ++k) prow[k] /= piv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == leave || alpha[r] == 0.0) continue;
        const double f = alpha[r];
        double* row = &binv_[r * m_];
        for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
      ++age_;
      ++iterations;
    }
  }

  static BasisState to_basis_state(Status s) {
    return s == Status::basic ? BasisState::basic : s == Status::at_upper ? BasisState::at_upper : BasisState::at_lower;
  }

  void extract(LpSolution& sol) {
    if (age_ > opt_.refactor_interval / 4) refactor();
    else recompute_xb();
    std::vector<double> x(cols_.size());
    for (std::size_t j = 0; j < cols_.size(); ++j) x[j] = value_of_nonbasic(j);
    for (std::size_t r = 0; r < m_; ++r) x[head_[r]] = xb_[r];

    sol.primal.resize(n_);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      double v = lp_.lower()[j] + x[j];
      v = std::max(v, lp_.lower()[j]);
      if (std::isfinite(lp_.upper()[j])) v = std::min(v, lp_.upper()[j]);
      sol.primal[j] = v;
      sol.objective += lp_.objective()[j] * v;
    }
    sol.basis.vars.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.basis.vars[j] = to_basis_state(status_[j]);
    sol.basis.rows.assign(m_, BasisState::at_lower);
    for (std::size_t i = 0; i < m_; ++i)
      for (auto j : {slack_of_row_[i], art_of_row_[i]})
        if (j != npos && status_[j] == Status::basic) sol.basis.rows[i] = BasisState::basic;
    // The inverse is only reusable when every basic column is a structural
    // or a slack; artificial columns depend on the right-hand side.
    if (std::none_of(head_.begin(), head_.end(), [&](std::size_t j) { return j >= first_art_; })) {
      sol.basis.head.resize(m_);
      for (std::size_t r = 0; r < m_; ++r)
        sol.basis.head[r] =
            head_[r] < n_ ? static_cast<std::int64_t>(head_[r]) : -static_cast<std::int64_t>(row_of_[head_[r]] + 1);
      sol.basis.inverse = std::make_shared<const std::vector<double>>(binv_);
      sol.basis.inverse_age = age_;
    }
    const auto y = duals(cost_);
    sol.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = y[i];
    sol.reduced_costs.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) sol.reduced_costs[j] = lp_.objective()[j];
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& t : lp_.rows()[i].terms) sol.reduced_costs[t.var] -= sol.duals[i] * t.coeff;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t n_ = 0, m_ = 0;
  std::vector<std::vector<Entry>> cols_;
  std::vector<double> cost_, lb_, ub_, orig_ub_, b_, xb_, binv_, devex_;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> head_, slack_of_row_, art_of_row_, row_of_;
  std::vector<Status> status_;
  std::size_t first_art_ = 0, num_art_ = 0;
  double rhs_scale_ = 0.0;
  std::size_t max_iter_ = 0, warm_budget_ = 0, bland_after_ = 0, degenerate_ = 0, age_ = 0;
  std::size_t degenerate_run_ = 0, perturb_rounds_ = 0;
  static constexpr std::size_t stall_run_ = 20, max_perturb_rounds_ = 50;
  std::uint64_t rng_state_ = 0x9e3779b97f4a7c15ULL;
  bool bland_ = false, perturbed_ = false, warm_ = false, needs_dual_ = false;
};

}  // namespace detail

/// Solves the LP to an optimal basic solution with duals. Infeasible and
/// unbounded problems are reported through `status`, never thrown.
/// `start` optionally seeds the solve with an earlier basis of a related LP
/// (same rows, possibly more columns); it is ignored unless primal feasible.
/// A warm start that runs past a modest iteration budget is abandoned in
/// favour of a cold start, since a degenerate starting vertex can cost far
/// more than solving from scratch.
inline LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {}, const LpBasis* start = nullptr) {
  auto sol = detail::RevisedSimplex(lp, options, start).run();
  if (sol.warm_started && sol.status == LpStatus::iteration_limit && options.max_iterations == 0) {
    const auto spent = sol.iterations;
    sol = detail::RevisedSimplex(lp, options, nullptr).run();
    sol.iterations += spent;
  }
  return sol;
}

}  // namespace dnfcg
