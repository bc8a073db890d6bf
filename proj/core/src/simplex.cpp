#include <algorithm>
#include <cmath>
#include <limits>

#include "gdp/solver.hpp"

namespace gdp {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Budget: return "budget";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

double LpSolution::value_of(const IlpModel& model, const VarId& id) const {
  int idx = model.var_index(id);
  if (idx < 0 || idx >= static_cast<int>(values.size()))
    throw SolverError("variable not present in model");
  return values[static_cast<std::size_t>(idx)];
}

bool LpSolution::is_integral(double tol) const {
  for (double v : values)
    if (std::fabs(v - std::round(v)) > tol) return false;
  return true;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded-variable primal simplex with an explicit dense basis inverse.
// Phase 1 uses artificial variables on rows whose slack starts out of
// bounds; Bland's rule takes over after a long degenerate streak.
class Simplex {
 public:
  Simplex(const IlpModel& model, const std::vector<double>& lo, const std::vector<double>& up,
          const SolverOptions& opts)
      : model_(model), opts_(opts) {
    nstruct_ = static_cast<int>(model.variables.size());
    lo_.assign(lo.begin(), lo.end());
    up_.assign(up.begin(), up.end());
    cost_.assign(static_cast<std::size_t>(nstruct_), 0.0);
    for (int j = 0; j < nstruct_; ++j)
      cost_[j] = static_cast<double>(model.variables[j].objective);
  }

  LpSolution run() {
    LpSolution out;
    if (!presolve()) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    build_rows();
    SolveStatus st = optimize();
    out.status = st;
    if (st == SolveStatus::Optimal || st == SolveStatus::Unbounded) {
      out.values.assign(xval_.begin(), xval_.begin() + nstruct_);
      for (int j = 0; j < nstruct_; ++j)
        out.values[j] = std::min(std::max(out.values[j], lo_[j]), up_[j]);
      double obj = 0.0;
      for (int j = 0; j < nstruct_; ++j) obj += cost_[j] * out.values[j];
      out.objective = obj;
    }
    return out;
  }

 private:
  // -- presolve ------------------------------------------------------------

  bool presolve() {
    std::vector<int> support(static_cast<std::size_t>(nstruct_), 0);
    for (const auto& c : model_.constraints)
      for (const auto& [var, coeff] : c.terms)
        if (coeff != 0) ++support[var];

    const double tol = 1e-9;
    bool changed = true;
    int passes = 0;
    while (changed && passes++ < 64) {
      changed = false;
      for (const auto& c : model_.constraints) {
        double minact = 0.0, maxact = 0.0;
        for (const auto& [var, coeff] : c.terms) {
          double a = static_cast<double>(coeff);
          minact += a > 0 ? a * lo_[var] : a * up_[var];
          maxact += a > 0 ? a * up_[var] : a * lo_[var];
        }
        double rhs = static_cast<double>(c.rhs);
        if (c.sense == Sense::Le || c.sense == Sense::Eq) {
          if (minact > rhs + opts_.feas_tol) return false;
          if (minact >= rhs - tol) changed |= force(c, /*minimize=*/true);
        }
        if (c.sense == Sense::Ge || c.sense == Sense::Eq) {
          if (maxact < rhs - opts_.feas_tol) return false;
          if (maxact <= rhs + tol) changed |= force(c, /*minimize=*/false);
        }
      }
    }
    for (int j = 0; j < nstruct_; ++j) {
      if (support[j] == 0 && lo_[j] < up_[j]) {
        double v = cost_[j] < 0 ? up_[j] : lo_[j];
        lo_[j] = up_[j] = v;
      }
    }
    return true;
  }

  // Pins every variable of a tight row to its activity-extremal bound.
  bool force(const LinearConstraint& c, bool minimize) {
    bool changed = false;
    for (const auto& [var, coeff] : c.terms) {
      if (lo_[var] == up_[var]) continue;
      bool at_lower = (coeff > 0) == minimize;
      double v = at_lower ? lo_[var] : up_[var];
      lo_[var] = up_[var] = v;
      changed = true;
    }
    return changed;
  }

  // -- setup ---------------------------------------------------------------

  void build_rows() {
    m_ = static_cast<int>(model_.constraints.size());
    cols_.assign(static_cast<std::size_t>(nstruct_), {});
    b_.assign(static_cast<std::size_t>(m_), 0.0);
    slack_lo_.assign(static_cast<std::size_t>(m_), 0.0);
    slack_up_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const auto& c = model_.constraints[static_cast<std::size_t>(i)];
      for (const auto& [var, coeff] : c.terms)
        if (coeff != 0) cols_[var].push_back({i, static_cast<double>(coeff)});
      b_[i] = static_cast<double>(c.rhs);
      switch (c.sense) {
        case Sense::Le: slack_lo_[i] = 0.0; slack_up_[i] = kInf; break;
        case Sense::Ge: slack_lo_[i] = -kInf; slack_up_[i] = 0.0; break;
        case Sense::Eq: slack_lo_[i] = 0.0; slack_up_[i] = 0.0; break;
      }
    }
  }

  int ncols() const { return nstruct_ + m_ + static_cast<int>(art_rows_.size()); }

  double col_lo(int j) const {
    if (j < nstruct_) return lo_[j];
    if (j < nstruct_ + m_) return slack_lo_[j - nstruct_];
    return 0.0;  // artificial
  }
  double col_up(int j) const {
    if (j < nstruct_) return up_[j];
    if (j < nstruct_ + m_) return slack_up_[j - nstruct_];
    return art_fixed_ ? 0.0 : kInf;
  }
  double col_cost(int j) const {
    if (phase1_) return j >= nstruct_ + m_ ? 1.0 : 0.0;
    return j < nstruct_ ? cost_[j] : 0.0;
  }

  // column j as (row, coeff) pairs
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < nstruct_) {
      for (const auto& [row, a] : cols_[j]) f(row, a);
    } else if (j < nstruct_ + m_) {
      f(j - nstruct_, 1.0);
    } else {
      const auto& [row, sign] = art_rows_[j - nstruct_ - m_];
      f(row, sign);
    }
  }

  // -- core ----------------------------------------------------------------

  enum State : unsigned char { AtLower, AtUpper, Basic };

  SolveStatus optimize() {
    if (m_ == 0) {
      xval_.assign(static_cast<std::size_t>(nstruct_), 0.0);
      for (int j = 0; j < nstruct_; ++j) xval_[j] = cost_[j] < 0 ? up_[j] : lo_[j];
      return SolveStatus::Optimal;
    }

    // Start structurals at their lower bound (fixed variables included),
    // slacks at the nearest bound when out of range, artificials elsewhere.
    xval_.assign(static_cast<std::size_t>(nstruct_ + m_), 0.0);
    state_.assign(static_cast<std::size_t>(nstruct_ + m_), AtLower);
    for (int j = 0; j < nstruct_; ++j) xval_[j] = lo_[j];

    std::vector<double> act(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < nstruct_; ++j)
      if (xval_[j] != 0.0)
        for (const auto& [row, a] : cols_[j]) act[row] += a * xval_[j];

    basic_.assign(static_cast<std::size_t>(m_), -1);
    art_rows_.clear();
    for (int i = 0; i < m_; ++i) {
      double v = b_[i] - act[i];
      int sj = nstruct_ + i;
      if (v >= slack_lo_[i] - opts_.feas_tol && v <= slack_up_[i] + opts_.feas_tol) {
        basic_[i] = sj;
        xval_[sj] = v;
        state_[sj] = Basic;
      } else {
        double s = std::min(std::max(v, slack_lo_[i]), slack_up_[i]);
        xval_[sj] = s;
        state_[sj] = s == slack_lo_[i] ? AtLower : AtUpper;
        double resid = v - s;
        art_rows_.push_back({i, resid > 0 ? 1.0 : -1.0});
      }
    }
    xval_.resize(static_cast<std::size_t>(ncols()), 0.0);
    state_.resize(static_cast<std::size_t>(ncols()), AtLower);
    for (std::size_t k = 0; k < art_rows_.size(); ++k) {
      auto [row, sign] = art_rows_[k];
      int aj = nstruct_ + m_ + static_cast<int>(k);
      double v = b_[row] - act[row] - xval_[nstruct_ + row];
      basic_[row] = aj;
      xval_[aj] = v / sign;
      state_[aj] = Basic;
    }

    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double d = 1.0;
      if (basic_[i] >= nstruct_ + m_) d = art_rows_[basic_[i] - nstruct_ - m_].second;
      binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0 / d;
    }

    art_fixed_ = false;
    if (!art_rows_.empty()) {
      phase1_ = true;
      SolveStatus st = iterate();
      if (st != SolveStatus::Optimal) return st == SolveStatus::Unbounded ? SolveStatus::NumericalFailure : st;
      double infeas = 0.0;
      for (int j = nstruct_ + m_; j < ncols(); ++j) infeas += xval_[j];
      if (infeas > 1e2 * opts_.feas_tol) return SolveStatus::Infeasible;
      art_fixed_ = true;
      for (int j = nstruct_ + m_; j < ncols(); ++j)
        if (state_[j] != Basic) xval_[j] = 0.0;
    }
    phase1_ = false;
    bland_ = false;
    degen_streak_ = 0;
    return iterate();
  }

  SolveStatus iterate() {
    const double dj_tol = 1e-9;
    const int max_iters = 50000 + 200 * (m_ + nstruct_);
    std::vector<double> y(static_cast<std::size_t>(m_));
    std::vector<double> alpha(static_cast<std::size_t>(m_));
    int since_refactor = 0;

    for (int iter = 0; iter < max_iters; ++iter) {
      // y = c_B^T B^-1, exploiting that few basic columns carry cost
      std::fill(y.begin(), y.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        double cb = col_cost(basic_[i]);
        if (cb == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int r = 0; r < m_; ++r) y[r] += cb * row[r];
      }

      int q = -1;
      double best = dj_tol;
      for (int j = 0; j < ncols(); ++j) {
        if (state_[j] == Basic) continue;
        double l = col_lo(j), u = col_up(j);
        if (l == u) continue;
        double d = col_cost(j);
        bool elig = false;
        {
          double dot = 0.0;
          for_col(j, [&](int row, double a) { dot += y[row] * a; });
          d -= dot;
        }
        if (state_[j] == AtLower && d < -dj_tol) elig = true;
        if (state_[j] == AtUpper && d > dj_tol) elig = true;
        if (!elig) continue;
        if (bland_) {
          q = j;
          break;
        }
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          q = j;
        }
      }
      if (q < 0) return SolveStatus::Optimal;

      std::fill(alpha.begin(), alpha.end(), 0.0);
      for_col(q, [&](int row, double a) {
        for (int i = 0; i < m_; ++i) alpha[i] += a * binv_[static_cast<std::size_t>(i) * m_ + row];
      });

      double sigma = state_[q] == AtLower ? 1.0 : -1.0;

      // Ratio test, pass 1: smallest blocking step (including a bound flip
      // of the entering variable itself).
      auto step_of = [&](int i) -> double {
        double rate = sigma * alpha[i];
        if (std::fabs(rate) < 1e-10) return kInf;
        int bj = basic_[i];
        if (rate > 0) {
          double l = col_lo(bj);
          if (l == -kInf) return kInf;
          return std::max((xval_[bj] - l) / rate, 0.0);
        }
        double u = col_up(bj);
        if (u == kInf) return kInf;
        return std::max((xval_[bj] - u) / rate, 0.0);
      };
      double flip = col_up(q) - col_lo(q);
      double min_row_step = kInf;
      for (int i = 0; i < m_; ++i) min_row_step = std::min(min_row_step, step_of(i));
      double min_step = std::min(flip, min_row_step);
      if (min_step == kInf) return SolveStatus::Unbounded;

      int leave_row = -1;
      if (flip > min_row_step + 1e-9) {
        // Pass 2: among rows within tolerance of the minimum pick the most
        // stable pivot (Bland mode: the lowest basic column index).
        double best_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
          if (step_of(i) > min_row_step + 1e-9) continue;
          if (leave_row < 0 ||
              (bland_ ? basic_[i] < basic_[leave_row] : std::fabs(alpha[i]) > best_pivot)) {
            leave_row = i;
            best_pivot = std::fabs(alpha[i]);
          }
        }
      }

      double delta = leave_row < 0 ? flip : std::max(min_step, 0.0);
      if (delta <= 1e-9) {
        if (++degen_streak_ > 400) bland_ = true;
      } else {
        degen_streak_ = 0;
      }

      // apply the step
      if (delta > 0) {
        xval_[q] += sigma * delta;
        for (int i = 0; i < m_; ++i)
          if (alpha[i] != 0.0) xval_[basic_[i]] -= sigma * delta * alpha[i];
      }

      if (leave_row < 0) {
        // bound flip, basis unchanged
        state_[q] = state_[q] == AtLower ? AtUpper : AtLower;
        xval_[q] = state_[q] == AtLower ? col_lo(q) : col_up(q);
        continue;
      }

      int lj = basic_[leave_row];
      double rate = sigma * alpha[leave_row];
      state_[lj] = rate > 0 ? AtLower : AtUpper;
      xval_[lj] = rate > 0 ? col_lo(lj) : col_up(lj);
      basic_[leave_row] = q;
      state_[q] = Basic;

      double pivot = alpha[leave_row];
      if (std::fabs(pivot) < 1e-11) return SolveStatus::NumericalFailure;
      double* prow = &binv_[static_cast<std::size_t>(leave_row) * m_];
      double inv = 1.0 / pivot;
      for (int r = 0; r < m_; ++r) prow[r] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row || alpha[i] == 0.0) continue;
        double f = alpha[i];
        double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int r = 0; r < m_; ++r) row[r] -= f * prow[r];
      }

      if (++since_refactor >= 512) {
        since_refactor = 0;
        if (!refactor()) return SolveStatus::NumericalFailure;
      }
    }
    return SolveStatus::NumericalFailure;
  }

  // Rebuilds the basis inverse by Gauss-Jordan and recomputes basic values.
  bool refactor() {
    std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for_col(basic_[i], [&](int row, double a) { mat[static_cast<std::size_t>(row) * m_ + i] = a; });
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int p = -1;
      double bestv = 1e-12;
      for (int r = c; r < m_; ++r) {
        double v = std::fabs(mat[static_cast<std::size_t>(r) * m_ + c]);
        if (v > bestv) {
          bestv = v;
          p = r;
        }
      }
      if (p < 0) return false;
      if (p != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(mat[static_cast<std::size_t>(p) * m_ + k], mat[static_cast<std::size_t>(c) * m_ + k]);
          std::swap(inv[static_cast<std::size_t>(p) * m_ + k], inv[static_cast<std::size_t>(c) * m_ + k]);
        }
      }
      double piv = mat[static_cast<std::size_t>(c) * m_ + c];
      double s = 1.0 / piv;
      for (int k = 0; k < m_; ++k) {
        mat[static_cast<std::size_t>(c) * m_ + k] *= s;
        inv[static_cast<std::size_t>(c) * m_ + k] *= s;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = mat[static_cast<std::size_t>(r) * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          mat[static_cast<std::size_t>(r) * m_ + k] -= f * mat[static_cast<std::size_t>(c) * m_ + k];
          inv[static_cast<std::size_t>(r) * m_ + k] -= f * inv[static_cast<std::size_t>(c) * m_ + k];
        }
      }
    }
    // inv is now (column-basis matrix)^-1 with rows/cols aligned to rows;
    // recompute basic values from scratch.
    binv_ = std::move(inv);
    std::vector<double> r(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) r[i] = b_[i];
    for (int j = 0; j < ncols(); ++j) {
      if (state_[j] == Basic || xval_[j] == 0.0) continue;
      for_col(j, [&](int row, double a) { r[row] -= a * xval_[j]; });
    }
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) v += row[k] * r[k];
      xval_[basic_[i]] = v;
    }
    return true;
  }

  const IlpModel& model_;
  SolverOptions opts_;
  int nstruct_ = 0;
  int m_ = 0;
  std::vector<double> lo_, up_, cost_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> b_, slack_lo_, slack_up_;
  std::vector<std::pair<int, double>> art_rows_;  // (row, sign) per artificial
  bool art_fixed_ = false;
  bool phase1_ = false;
  bool bland_ = false;
  int degen_streak_ = 0;

  std::vector<int> basic_;
  std::vector<unsigned char> state_;
  std::vector<double> xval_;
  std::vector<double> binv_;
};

}  // namespace

LpSolution solve_lp_bounded(const IlpModel& model, const std::vector<double>& lower,
                            const std::vector<double>& upper, const SolverOptions& opts) {
  Simplex s(model, lower, upper, opts);
  return s.run();
}

LpSolution solve_lp(const IlpModel& model, const SolverOptions& opts) {
  std::vector<double> lo, up;
  lo.reserve(model.variables.size());
  up.reserve(model.variables.size());
  for (const auto& v : model.variables) {
    lo.push_back(v.lower);
    up.push_back(v.upper);
  }
  return solve_lp_bounded(model, lo, up, opts);
}

}  // namespace gdp
