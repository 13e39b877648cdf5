#pragma once

#include <vector>

namespace socs {

enum class RowSense { Le, Ge, Eq };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpRow {
  std::vector<double> a;  // dense, length num_vars
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

// maximize c.x  subject to rows, x >= 0
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;

  void add_row(std::vector<double> a, RowSense s, double rhs) { rows.push_back({std::move(a), s, rhs}); }
};

struct SimplexOptions {
  double pivot_tol = 1e-11;
  double feas_tol = 1e-9;
  long max_iterations = 200000;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

// Dense two-phase primal simplex with Bland's rule. Basic values are
// recomputed from the original data at the end to remove drift.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {});

const char* to_string(LpStatus s);

}  // namespace socs
