#include "specspan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specspan/error.hpp"

namespace specspan {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-10;
constexpr double kRatioTieRel = 1e-12;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
    ++pivots_;
  }

  std::size_t pivots() const { return pivots_; }

  /// Runs Bland-rule simplex for `cost` over columns where `allowed` is true.
  void optimize(const Vec& cost, const std::vector<bool>& allowed, std::size_t pivot_cap) {
    Vec reduced(cols_);
    for (;;) {
      for (std::size_t c = 0; c < cols_; ++c) {
        double d = cost[c];
        for (std::size_t r = 0; r < rows_; ++r) d -= cost[basis_[r]] * at(r, c);
        reduced[c] = d;
      }
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (allowed[c] && reduced[c] < -kReducedCostTol) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return;

      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a > kPivotTol) best_ratio = std::min(best_ratio, std::max(rhs(r), 0.0) / a);
      }
      if (!std::isfinite(best_ratio)) throw Error(ErrorCode::Unbounded, "solve_lp: objective is unbounded below");
      // Bland: among minimum-ratio rows, the lowest basic variable leaves
      const double tie = kRatioTieRel * std::max(1.0, best_ratio);
      std::size_t leave = rows_;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol || std::max(rhs(r), 0.0) / a > best_ratio + tie) continue;
        if (leave == rows_ || basis_[r] < basis_[leave]) leave = r;
      }
      if (pivots_ >= pivot_cap) throw Error(ErrorCode::Internal, "solve_lp: pivot cap exceeded");
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const std::size_t nvars = problem.objective.size();
  std::vector<VarKind> kinds = problem.kinds;
  if (kinds.empty()) kinds.assign(nvars, VarKind::NonNegative);
  if (kinds.size() != nvars) throw Error(ErrorCode::DimensionMismatch, "solve_lp: kinds size differs from objective");
  for (const LpConstraint& row : problem.constraints)
    if (row.coeffs.size() != nvars) throw Error(ErrorCode::DimensionMismatch, "solve_lp: constraint width differs");

  // structural columns: nonnegative vars map to one column, free vars to (plus, minus)
  std::vector<std::size_t> plus_col(nvars), minus_col(nvars, SIZE_MAX);
  std::size_t ns = 0;
  for (std::size_t j = 0; j < nvars; ++j) {
    plus_col[j] = ns++;
    if (kinds[j] == VarKind::Free) minus_col[j] = ns++;
  }

  const std::size_t m = problem.constraints.size();
  std::vector<Sense> sense(m);
  std::vector<double> sign(m, 1.0);
  std::size_t n_slack = 0, n_art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const LpConstraint& row = problem.constraints[r];
    sense[r] = row.sense;
    if (row.rhs < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::LessEqual)
        sense[r] = Sense::GreaterEqual;
      else if (sense[r] == Sense::GreaterEqual)
        sense[r] = Sense::LessEqual;
    }
    if (sense[r] != Sense::Equal) ++n_slack;
    if (sense[r] != Sense::LessEqual) ++n_art;
  }

  const std::size_t ncols = ns + n_slack + n_art;
  Tableau tab(m, ncols);
  std::vector<std::size_t> unit_col(m);
  std::vector<bool> is_art(ncols, false);
  std::size_t next_slack = ns, next_art = ns + n_slack;
  for (std::size_t r = 0; r < m; ++r) {
    const LpConstraint& row = problem.constraints[r];
    for (std::size_t j = 0; j < nvars; ++j) {
      const double a = sign[r] * row.coeffs[j];
      tab.at(r, plus_col[j]) = a;
      if (minus_col[j] != SIZE_MAX) tab.at(r, minus_col[j]) = -a;
    }
    tab.rhs(r) = sign[r] * row.rhs;
    if (sense[r] == Sense::LessEqual) {
      tab.at(r, next_slack) = 1.0;
      unit_col[r] = next_slack++;
    } else {
      if (sense[r] == Sense::GreaterEqual) tab.at(r, next_slack++) = -1.0;
      tab.at(r, next_art) = 1.0;
      is_art[next_art] = true;
      unit_col[r] = next_art++;
    }
    tab.basis()[r] = unit_col[r];
  }

  const std::size_t pivot_cap = 100 * (m + ncols) + 1000;

  if (n_art > 0) {
    Vec phase1(ncols, 0.0);
    for (std::size_t c = 0; c < ncols; ++c)
      if (is_art[c]) phase1[c] = 1.0;
    tab.optimize(phase1, std::vector<bool>(ncols, true), pivot_cap);
    double infeas = 0.0, scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (is_art[tab.basis()[r]]) infeas += std::max(tab.rhs(r), 0.0);
      scale += std::abs(problem.constraints[r].rhs);
    }
    if (infeas > 1e-9 * scale) throw Error(ErrorCode::Infeasible, "solve_lp: constraints are infeasible");
    // drive zero-level artificials out of the basis where a structural pivot exists
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[tab.basis()[r]]) continue;
      for (std::size_t c = 0; c < ncols; ++c) {
        if (!is_art[c] && std::abs(tab.at(r, c)) > 1e-9) {
          tab.pivot(r, c);
          break;
        }
      }
    }
  }

  Vec phase2(ncols, 0.0);
  for (std::size_t j = 0; j < nvars; ++j) {
    phase2[plus_col[j]] = problem.objective[j];
    if (minus_col[j] != SIZE_MAX) phase2[minus_col[j]] = -problem.objective[j];
  }
  std::vector<bool> allowed(ncols);
  for (std::size_t c = 0; c < ncols; ++c) allowed[c] = !is_art[c];
  tab.optimize(phase2, allowed, pivot_cap);

  Vec z(ncols, 0.0);
  for (std::size_t r = 0; r < m; ++r) z[tab.basis()[r]] = tab.rhs(r);

  LpSolution sol;
  sol.x.assign(nvars, 0.0);
  for (std::size_t j = 0; j < nvars; ++j) {
    sol.x[j] = z[plus_col[j]];
    if (minus_col[j] != SIZE_MAX) sol.x[j] -= z[minus_col[j]];
  }
  sol.value = dot(problem.objective, sol.x);
  sol.duals.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double y = 0.0;
    for (std::size_t i = 0; i < m; ++i) y += phase2[tab.basis()[i]] * tab.at(i, unit_col[r]);
    sol.duals[r] = sign[r] * y;
  }
  sol.pivots = tab.pivots();
  return sol;
}

// ---------------------------------------------------------------- domination

void DominationOracle::add(VecView u) {
  if (u.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "DominationOracle: dimension differs");
  members_.emplace_back(u.begin(), u.end());
  max_member_norm_ = std::max(max_member_norm_, norm(u));
  Vec r = project_orth(u, basis_);
  r = project_orth(r, basis_);
  const double rn = norm(r);
  if (rn > 1e-10 * max_member_norm_) {
    for (double& x : r) x /= rn;
    basis_.push_back(std::move(r));
  }
}

DominationResult DominationOracle::check(VecView v, double alpha) const {
  if (v.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "domination_check: dimension differs");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "domination_check: alpha must be positive");
  const double vn = norm(v);
  if (vn <= 1e-12) throw Error(ErrorCode::ZeroVector, "domination_check: candidate vector is zero");
  const double threshold = (1.0 - kCoverageSlack) / std::sqrt(alpha);

  auto finish = [&](Vec x) {
    // rescale so <x,v> = 1 holds to roundoff, then measure the margin on x itself
    const double xv = dot(x, v);
    for (double& c : x) c /= xv;
    double margin = 0.0;
    for (const Vec& u : members_) margin = std::max(margin, std::abs(dot(x, u)));
    DominationResult res;
    res.margin = margin;
    if (margin < threshold) {
      res.status = Coverage::Witness;
      res.witness = std::move(x);
    } else {
      res.status = Coverage::Covered;
    }
    return res;
  };

  Vec residual = project_orth(v, basis_);
  residual = project_orth(residual, basis_);
  if (norm(residual) > kOutOfSpanRel * vn) return finish(std::move(residual));

  // weighted l1 problem in the orthonormal frame of span(U):
  // min sum_i (a_i + b_i) / ||u_i||  s.t.  sum_i (a_i - b_i) u_i/||u_i|| = v/||v||
  const std::size_t rdim = basis_.size();
  const std::size_t s = members_.size();
  LpProblem lp;
  lp.objective.assign(2 * s, 0.0);
  lp.constraints.assign(rdim, LpConstraint{Vec(2 * s, 0.0), Sense::Equal, 0.0});
  for (std::size_t i = 0; i < s; ++i) {
    const double un = norm(members_[i]);
    lp.objective[2 * i] = lp.objective[2 * i + 1] = 1.0 / un;
    for (std::size_t r = 0; r < rdim; ++r) {
      const double c = dot(basis_[r], members_[i]) / un;
      lp.constraints[r].coeffs[2 * i] = c;
      lp.constraints[r].coeffs[2 * i + 1] = -c;
    }
  }
  for (std::size_t r = 0; r < rdim; ++r) lp.constraints[r].rhs = dot(basis_[r], v) / vn;
  const LpSolution sol = solve_lp(lp);

  Vec x(dim_, 0.0);
  for (std::size_t r = 0; r < rdim; ++r) axpy(sol.duals[r], basis_[r], x);
  if (dot(x, v) <= 0.0) throw Error(ErrorCode::Internal, "domination_check: dual direction has no progress on v");
  return finish(std::move(x));
}

DominationResult domination_check(VecView v, std::span<const VecView> spanner, double alpha) {
  DominationOracle oracle(v.size());
  for (VecView u : spanner) oracle.add(u);
  return oracle.check(v, alpha);
}

}  // namespace specspan
