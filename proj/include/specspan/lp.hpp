#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specspan/linalg.hpp"

namespace specspan {

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class VarKind { NonNegative, Free };

struct LpConstraint {
  Vec coeffs;
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

/// minimize objective^T x subject to the rows, with per-variable sign kinds.
struct LpProblem {
  Vec objective;
  std::vector<VarKind> kinds;  // empty means all NonNegative
  std::vector<LpConstraint> constraints;
};

struct LpSolution {
  Vec x;
  double value = 0.0;
  /// Multiplier per constraint row: d(value)/d(rhs) at the optimum.
  Vec duals;
  std::size_t pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule throughout.
/// Deterministic; throws Error(Infeasible) or Error(Unbounded).
LpSolution solve_lp(const LpProblem& problem);

enum class Coverage { Covered, Witness };

struct DominationResult {
  Coverage status = Coverage::Covered;
  /// Direction x with <x,v> = 1; present iff status == Witness.
  Vec witness;
  /// Optimal max_u |<x,u>| over <x,v> = 1. For a witness this is the value
  /// measured on the returned direction.
  double margin = 0.0;
};

/// Incremental form of the directional-domination test for a growing set U.
///
/// For a candidate v the oracle computes t* = min_x max_{u in U} |<x,u>|
/// subject to <x,v> = 1, and reports Covered iff t* >= (1 - slack)/sqrt(alpha).
/// The optimum is obtained from the equivalent problem
///   L* = min ||c||_1  subject to  sum_u c_u u = v,   t* = 1 / L*,
/// whose optimal dual vector is the max-margin witness direction.
class DominationOracle {
 public:
  explicit DominationOracle(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::span<const Vec> members() const noexcept { return members_; }
  std::span<const Vec> basis() const noexcept { return basis_; }

  void add(VecView u);
  /// Throws Error(ZeroVector) if ||v|| <= 1e-12.
  DominationResult check(VecView v, double alpha) const;

 private:
  std::size_t dim_;
  std::vector<Vec> members_;
  std::vector<Vec> basis_;  // orthonormal basis of span(members_)
  double max_member_norm_ = 0.0;
};

/// Relative slack on the coverage threshold 1/sqrt(alpha).
inline constexpr double kCoverageSlack = 1e-9;
/// Components of v outside span(U) above this * ||v|| make v trivially uncovered.
inline constexpr double kOutOfSpanRel = 1e-9;

/// One-shot domination check of v against U (see DominationOracle).
DominationResult domination_check(VecView v, std::span<const VecView> spanner, double alpha);

}  // namespace specspan
