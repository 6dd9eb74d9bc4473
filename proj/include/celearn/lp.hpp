#pragma once

#include <vector>

namespace celearn::lp {

// minimize dot(c, x)  subject to  A x <= b,  x >= 0.
struct Problem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  explicit Problem(int vars) : num_vars(vars), objective(vars, 0.0) {}
  void add_row(std::vector<double> coeffs, double b);
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Optimal;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase primal simplex with Bland's rule (anti-cycling).
Solution solve_min(const Problem& problem);

}  // namespace celearn::lp
