#pragma once

// Offline determinant maximization and experimental-design objectives.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specspan/linalg.hpp"
#include "specspan/vector_set.hpp"

namespace specspan {

struct Solution {
  std::vector<std::size_t> indices;  // sorted; repeats allowed for sampled multisets
  double value = 0.0;                // det_k of the selected Gram sum
};

struct FractionalSolution {
  Vec weights;
  double budget = 0.0;
  double objective = 0.0;  // det for fractional_detmax, f(A(s)) for fractional_design
  std::size_t iterations = 0;
};

inline constexpr std::uint64_t kBruteForceGuard = 10'000'000;

/// det_k of sum of v v^T over `indices` with k = indices.size(), i.e. the
/// squared volume; 0 when the multiset is dependent.
double subset_value(const VectorSet& vs, std::span<const std::size_t> indices);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// Exact optimum over k-subsets, lexicographically smallest among ties.
/// Throws TooLarge when C(n, k) exceeds kBruteForceGuard.
Solution brute_force_detmax(const VectorSet& vs, std::size_t k);

/// Volume-greedy seed followed by first-improvement single swaps.
Solution greedy_local_search(const VectorSet& vs, std::size_t k, std::size_t max_rounds = 10);

/// Frank-Wolfe maximization of log det(sum s_v v v^T + eps I) over
/// {s >= 0, sum s = d}. Throws Degenerate when rank(V) < d.
FractionalSolution fractional_detmax(const VectorSet& vs);

struct RoundingResult {
  Solution best;
  double mean = 0.0;       // empirical mean det_k over trials
  double std_error = 0.0;  // sample standard deviation / sqrt(trials)
  std::size_t trials = 0;
};

/// Each trial draws k indices i.i.d. with probability s_v / k. The weights
/// must sum to k within 1e-6.
RoundingResult nikolov_round(const VectorSet& vs, const FractionalSolution& s, std::size_t k, std::size_t trials,
                             std::uint64_t seed);

enum class DesignKind { D, E, A };

/// D: det(A)^(-1/d), E: 1/lambda_min(A), A: Tr(A^-1)/d; +inf when singular.
double eval_design(const SymMat& a, DesignKind kind);
double eval_design(const VectorSet& vs, std::span<const double> weights, DesignKind kind);
double eval_design_subset(const VectorSet& vs, std::span<const std::size_t> indices, DesignKind kind);

/// Frank-Wolfe minimization of f(sum s_v v v^T) over {s >= 0, sum s <= B}.
/// Throws Degenerate when rank(V) < d.
FractionalSolution fractional_design(const VectorSet& vs, DesignKind kind, double budget);

}  // namespace specspan
