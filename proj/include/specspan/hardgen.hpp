#pragma once

// Instance generators: sphere samples, Haar rotations, the planted hard
// instance for composable core-sets, and the +-1 set no small spanner covers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "specspan/coreset.hpp"
#include "specspan/linalg.hpp"
#include "specspan/vector_set.hpp"

namespace specspan {

/// Normalized i.i.d. standard Gaussian vectors.
VectorSet sample_sphere(std::size_t count, std::size_t dim, std::uint64_t seed);

/// Q from the QR factorization of an i.i.d. Gaussian matrix, with the signs
/// of R's diagonal made positive so that Q is Haar distributed.
Matrix random_rotation(std::size_t dim, std::uint64_t seed);

struct HardInstance {
  std::size_t d = 0;
  std::size_t m = 0;  // ceil(d / ln d)
  double beta = 1.0;
  double big_m = 1e6;
  std::size_t n_per_set = 0;
  std::uint64_t seed = 0;
  /// X_1..X_{d-m} (n_per_set each) followed by the singletons Y_1..Y_m.
  VectorSet vectors;
  std::vector<std::size_t> part_ids;
  std::vector<std::size_t> planted;  // global index of the planted vector of X_i
  Matrix q;
  double max_g_inner = 0.0;  // max |<p,q>| over distinct pairs of the base set

  std::size_t x_sets() const noexcept { return d - m; }
  PartitionedInput partitioned() const;
  /// Q e_j (0-based j).
  Vec axis(std::size_t j) const { return q.column(j); }
};

inline constexpr double kDefaultBigM = 1e6;

/// Throws DimensionTooSmall for d < 8 and InvalidArgument for beta < 1 or M <= 0.
HardInstance gen_hard_instance(std::size_t d, double beta, double big_m, std::uint64_t seed,
                               std::optional<std::size_t> n_override = {});

/// Worst value of sum_j <u, Q e_{m+j}>^2 - max_g_inner^2 over the non-planted
/// X vectors; nonpositive (up to rounding) on every valid instance.
double offaxis_excess(const HardInstance& inst);

struct LowerBoundReport {
  std::vector<bool> planted_survived;  // per X_i
  std::vector<std::size_t> coreset_sizes;
  double objective = 0.0;
  double planted_value = 0.0;  // M^(2m)
  double ratio = 0.0;
  bool all_y_in_solution = false;
};

/// Core-set pipeline over the instance's own parts with k = d and every
/// spanner capped at `cap` vectors; the reference is the planted solution.
LowerBoundReport lowerbound_experiment(const HardInstance& inst, std::size_t cap, std::uint64_t seed);

inline constexpr std::size_t kPm1MaxCount = 10'000;
inline constexpr std::size_t kPm1DrawsPerVector = 100'000;

/// Random +-1 vectors with pairwise |<u,v>| <= sqrt(d^1.5 / 2). Each vector is
/// redrawn until it satisfies the bound against all accepted ones; throws
/// SamplingFailed when the draw budget is exhausted and TooLarge above
/// kPm1MaxCount.
VectorSet gen_pm1_lowerbound(std::size_t d, std::size_t count, std::uint64_t seed);

struct NonCoverage {
  double lhs = 0.0;  // <v,v>^2
  double rhs = 0.0;  // alpha * max_{u != v} <u,v>^2
  bool uncovered() const noexcept { return lhs > rhs; }
};

/// Weak check of vector `excluded` against all other vectors with witness x = v.
NonCoverage pm1_noncoverage(const VectorSet& vs, std::size_t excluded, double alpha);

}  // namespace specspan
