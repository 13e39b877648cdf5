#include "socs/simplex.hpp"

#include <cmath>
#include <utility>

#include "socs/error.hpp"

namespace socs {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

class Tableau {
 public:
  Tableau(int m, int cols) : m_(m), cols_(cols), t_((m + 1) * (cols + 1), 0.0), basis_(m, -1) {}
  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  // Row m_ is the objective row holding reduced costs (maximization: enter on > 0).
  double& cost(int c) { return at(m_, c); }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int k = 0; k <= cols_; ++k) at(r, k) /= p;
    at(r, c) = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      double* dst = &at(i, 0);
      const double* src = &at(r, 0);
      for (int k = 0; k <= cols_; ++k) dst[k] -= f * src[k];
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Bland's rule over columns allowed by `active`. Returns false when
  // unbounded.
  LpStatus run(const std::vector<char>& active, const SimplexOptions& opt, long& iters) {
    while (true) {
      int enter = -1;
      for (int c = 0; c < cols_; ++c)
        if (active[c] && cost(c) > opt.pivot_tol) {
          enter = c;
          break;
        }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      double best = 0;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = rhs(r) / a;
        if (leave < 0 || ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
      if (++iters > opt.max_iterations) return LpStatus::IterationLimit;
    }
  }

  int m_, cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

// Solves the square system M z = b by Gaussian elimination with partial
// pivoting; returns false if singular.
bool solve_dense(std::vector<std::vector<double>> M, std::vector<double> b, std::vector<double>& z) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (std::abs(M[piv][c]) < 1e-14) return false;
    std::swap(M[piv], M[c]);
    std::swap(b[piv], b[c]);
    for (int r = c + 1; r < n; ++r) {
      const double f = M[r][c] / M[c][c];
      if (f == 0) continue;
      for (int k = c; k < n; ++k) M[r][k] -= f * M[c][k];
      b[r] -= f * b[c];
    }
  }
  z.assign(n, 0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= M[r][k] * z[k];
    z[r] = s / M[r][r];
  }
  return true;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  const int n = lp.num_vars;
  if (static_cast<int>(lp.objective.size()) != n) throw InvalidInput("solve_lp: objective size mismatch");
  const int m = static_cast<int>(lp.rows.size());

  // Normalise to rhs >= 0.
  struct NRow {
    const LpRow* src;
    double sign;
    RowSense sense;
  };
  std::vector<NRow> rows;
  rows.reserve(m);
  int n_slack = 0, n_art = 0;
  for (const auto& r : lp.rows) {
    if (static_cast<int>(r.a.size()) != n) throw InvalidInput("solve_lp: row size mismatch");
    double sign = r.rhs < 0 ? -1.0 : 1.0;
    RowSense s = r.sense;
    if (sign < 0 && s != RowSense::Eq) s = s == RowSense::Le ? RowSense::Ge : RowSense::Le;
    rows.push_back({&r, sign, s});
    if (s != RowSense::Eq) ++n_slack;
    if (s != RowSense::Le) ++n_art;
  }
  const int cols = n + n_slack + n_art;
  const int art0 = n + n_slack;
  Tableau tab(m, cols);
  std::vector<int> slack_col(m, -1);
  {
    int sc = n, ac = art0;
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) tab.at(r, c) = rows[r].sign * rows[r].src->a[c];
      tab.rhs(r) = rows[r].sign * rows[r].src->rhs;
      if (rows[r].sense == RowSense::Le) {
        slack_col[r] = sc;
        tab.at(r, sc++) = 1.0;
        tab.basis_[r] = sc - 1;
      } else {
        if (rows[r].sense == RowSense::Ge) {
          slack_col[r] = sc;
          tab.at(r, sc++) = -1.0;
        }
        tab.at(r, ac) = 1.0;
        tab.basis_[r] = ac++;
      }
    }
  }

  LpSolution out;
  std::vector<char> active(cols, 1);
  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials).
    for (int r = 0; r < m; ++r)
      if (tab.basis_[r] >= art0)
        for (int c = 0; c <= cols; ++c)
          if (c < art0 || c == cols) tab.cost(c) += tab.at(r, c);
    LpStatus st = tab.run(active, opt, out.iterations);
    if (st == LpStatus::IterationLimit) {
      out.status = st;
      return out;
    }
    if (tab.cost(cols) > opt.feas_tol * (1 + m)) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (int r = 0; r < m; ++r) {
      if (tab.basis_[r] < art0) continue;
      int c = 0;
      for (; c < art0; ++c)
        if (std::abs(tab.at(r, c)) > 1e-9) break;
      if (c < art0) tab.pivot(r, c);
    }
    for (int c = art0; c < cols; ++c) active[c] = 0;
  }
  // Phase 2 objective row: reduced costs c_j - c_B B^-1 A_j.
  for (int c = 0; c <= cols; ++c) tab.cost(c) = 0;
  for (int c = 0; c < n; ++c) tab.cost(c) = lp.objective[c];
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis_[r];
    if (b < n && lp.objective[b] != 0) {
      const double cb = lp.objective[b];
      for (int c = 0; c <= cols; ++c) tab.cost(c) -= cb * tab.at(r, c);
    }
  }
  LpStatus st = tab.run(active, opt, out.iterations);
  out.status = st;
  if (st != LpStatus::Optimal) return out;

  out.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (tab.basis_[r] < n) out.x[tab.basis_[r]] = std::max(0.0, tab.rhs(r));

  // Refine: solve the basis system on the original rows. Rows whose basic
  // variable is a leftover artificial are redundant and dropped.
  std::vector<int> keep_rows, basic_cols;
  for (int r = 0; r < m; ++r)
    if (tab.basis_[r] < art0) {
      keep_rows.push_back(r);
      basic_cols.push_back(tab.basis_[r]);
    }
  const int k = static_cast<int>(keep_rows.size());
  std::vector<std::vector<double>> M(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k);
  for (int a = 0; a < k; ++a) {
    const int r = keep_rows[a];
    b[a] = rows[r].sign * rows[r].src->rhs;
    for (int q = 0; q < k; ++q) {
      const int c = basic_cols[q];
      if (c < n) M[a][q] = rows[r].sign * rows[r].src->a[c];
      else {
        int owner = -1;
        for (int rr = 0; rr < m; ++rr)
          if (slack_col[rr] == c) owner = rr;
        if (owner == r) M[a][q] = rows[r].sense == RowSense::Le ? 1.0 : -1.0;
      }
    }
  }
  std::vector<double> z;
  if (solve_dense(M, b, z)) {
    bool sane = true;
    for (int q = 0; q < k; ++q)
      if (z[q] < -1e-7 || std::abs(z[q] - (basic_cols[q] < n ? out.x[basic_cols[q]] : z[q])) > 1e-6) sane = false;
    if (sane) {
      std::fill(out.x.begin(), out.x.end(), 0.0);
      for (int q = 0; q < k; ++q)
        if (basic_cols[q] < n) out.x[basic_cols[q]] = std::max(0.0, z[q]);
    }
  }
  out.objective = 0;
  for (int c = 0; c < n; ++c) out.objective += lp.objective[c] * out.x[c];
  return out;
}

}  // namespace socs
