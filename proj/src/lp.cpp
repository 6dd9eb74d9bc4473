#include "celearn/lp.hpp"

#include <cmath>
#include <string>

#include "celearn/errors.hpp"

namespace celearn::lp {

void Problem::add_row(std::vector<double> coeffs, double b) {
  if (static_cast<int>(coeffs.size()) != num_vars)
    throw DimensionMismatch("LP row width mismatch");
  if (!std::isfinite(b)) throw DomainError("nonfinite LP right-hand side");
  rows.push_back(std::move(coeffs));
  rhs.push_back(b);
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kMaxIters = 200000;

struct Tableau {
  int num_rows = 0;
  int num_cols = 0;  // variable columns; rhs kept separately
  std::vector<double> a;
  std::vector<double> b;
  std::vector<int> basis;

  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * num_cols + c]; }
  double at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * num_cols + c];
  }

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    for (int c = 0; c < num_cols; ++c) at(pr, c) /= piv;
    b[pr] /= piv;
    for (int r = 0; r < num_rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c < num_cols; ++c) at(r, c) -= f * at(pr, c);
      b[r] -= f * b[pr];
    }
    basis[pr] = pc;
  }

  // Bland's rule: smallest eligible entering column, smallest basic index on
  // ratio ties. Returns Optimal or Unbounded.
  Status minimize(const std::vector<double>& obj,
                  const std::vector<char>& banned) {
    for (int iter = 0; iter < kMaxIters; ++iter) {
      int enter = -1;
      for (int j = 0; j < num_cols; ++j) {
        if (banned[j]) continue;
        double reduced = obj[j];
        for (int r = 0; r < num_rows; ++r)
          if (obj[basis[r]] != 0.0) reduced -= obj[basis[r]] * at(r, j);
        if (reduced < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::Optimal;

      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < num_rows; ++r) {
        const double coef = at(r, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = b[r] / coef;
        if (leave < 0 || ratio < best_ratio - kPivotTol ||
            (std::abs(ratio - best_ratio) <= kPivotTol &&
             basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
    }
    throw LPNumericalFailure("simplex iteration limit exceeded");
  }

  double objective_value(const std::vector<double>& obj) const {
    double total = 0.0;
    for (int r = 0; r < num_rows; ++r) total += obj[basis[r]] * b[r];
    return total;
  }

  void drop_row(int r) {
    a.erase(a.begin() + static_cast<std::size_t>(r) * num_cols,
            a.begin() + static_cast<std::size_t>(r + 1) * num_cols);
    b.erase(b.begin() + r);
    basis.erase(basis.begin() + r);
    --num_rows;
  }
};

}  // namespace

Solution solve_min(const Problem& problem) {
  const int n = problem.num_vars;
  const int num_rows = static_cast<int>(problem.rows.size());

  // Count artificials: one per negative-rhs row.
  int num_art = 0;
  for (double b : problem.rhs)
    if (b < 0.0) ++num_art;

  Tableau t;
  t.num_rows = num_rows;
  t.num_cols = n + num_rows + num_art;
  t.a.assign(static_cast<std::size_t>(t.num_rows) * t.num_cols, 0.0);
  t.b.resize(num_rows);
  t.basis.resize(num_rows);

  const int slack0 = n;
  const int art0 = n + num_rows;
  int art = art0;
  for (int r = 0; r < num_rows; ++r) {
    const double sign = problem.rhs[r] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t.at(r, j) = sign * problem.rows[r][j];
    t.at(r, slack0 + r) = sign;
    t.b[r] = sign * problem.rhs[r];
    if (sign < 0.0) {
      t.at(r, art) = 1.0;
      t.basis[r] = art++;
    } else {
      t.basis[r] = slack0 + r;
    }
  }

  std::vector<char> banned(t.num_cols, 0);
  if (num_art > 0) {
    std::vector<double> phase1(t.num_cols, 0.0);
    for (int j = art0; j < t.num_cols; ++j) phase1[j] = 1.0;
    if (t.minimize(phase1, banned) != Status::Optimal)
      throw LPNumericalFailure("phase-1 LP unbounded");
    if (t.objective_value(phase1) > kFeasTol) return {Status::Infeasible, {}, 0.0};
    // Pivot leftover artificials out of the basis; rows that cannot release
    // one are redundant.
    for (int r = t.num_rows - 1; r >= 0; --r) {
      if (t.basis[r] < art0) continue;
      int pc = -1;
      for (int j = 0; j < art0; ++j)
        if (std::abs(t.at(r, j)) > kPivotTol) {
          pc = j;
          break;
        }
      if (pc >= 0)
        t.pivot(r, pc);
      else
        t.drop_row(r);
    }
    for (int j = art0; j < t.num_cols; ++j) banned[j] = 1;
  }

  std::vector<double> obj(t.num_cols, 0.0);
  for (int j = 0; j < n; ++j) obj[j] = problem.objective[j];
  const Status status = t.minimize(obj, banned);
  if (status != Status::Optimal) return {status, {}, 0.0};

  Solution out;
  out.status = Status::Optimal;
  out.x.assign(n, 0.0);
  for (int r = 0; r < t.num_rows; ++r)
    if (t.basis[r] < n) out.x[t.basis[r]] = t.b[r];
  for (int j = 0; j < n; ++j)
    out.objective += problem.objective[j] * out.x[j];
  return out;
}

}  // namespace celearn::lp
