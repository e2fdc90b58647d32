#pragma once

// Spectral spanners: greedy construction of a small subset U of a vector set V
// such that every v v^T is dominated (in the PSD order, or the weaker k-order)
// by alpha times a convex combination of u u^T over U. Construction follows
// the weak-coverage greedy; verification checks either the weak per-direction
// condition or explicit distributions (strong certificates).

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specspan/linalg.hpp"
#include "specspan/vector_set.hpp"

namespace specspan {

struct SpannerParams {
  std::size_t k = 0;  // order of the k-domination; 0 means the full dimension
  std::optional<double> alpha;
  double alpha_scale = 1.0;
  std::optional<std::size_t> m_override;
  /// Optional cap on the number of d-spanner picks; construction stops early
  /// once it is reached (used for size-limited core-sets).
  std::optional<std::size_t> max_size;
};

/// alpha_scale * d * (1 + ln d)^2, floored at 1.
double default_alpha(std::size_t dim, double alpha_scale = 1.0);
/// min(d, 2k (1 + ceil(log2(k+1)))).
std::size_t default_m(std::size_t k, std::size_t dim);

enum class StageTag { VolumeGreedy, DSpanner };

struct SpannerPick {
  std::size_t index;
  Vec witness;  // direction that triggered the pick, ambient coordinates, <v,x> = 1 for the uncovered v
};

struct Spanner {
  std::vector<std::size_t> indices;  // distinct, into the source set
  std::vector<StageTag> stage_tags;
  std::vector<std::optional<Vec>> witnesses;  // absent for volume-greedy picks
  /// Every pick of the d-spanner stage in order, including picks that coincide
  /// with a volume-greedy member.
  std::vector<SpannerPick> d_stage;
  SpannerParams params;
  double alpha = 0.0;             // alpha used by the d-spanner stage
  std::size_t greedy_size = 0;    // number of volume-greedy picks (0 on the direct branch)

  std::size_t size() const noexcept { return indices.size(); }
  bool contains(std::size_t index) const noexcept;
  std::vector<std::size_t> greedy_indices() const;
};

/// Indices that survive ingestion: zero vectors (norm <= 1e-12 * max norm) are
/// dropped and exact duplicates keep only their lowest index. Ascending.
std::vector<std::size_t> ingest_indices(const VectorSet& vs);

/// Greedy weak-spanner construction. Throws InvalidArgument for alpha < 1 or
/// when no nonzero vector remains.
Spanner build_d_spanner(const VectorSet& vs, double alpha, std::optional<std::size_t> max_size = {});

struct WeakVerdict {
  bool ok = true;
  std::optional<std::size_t> violating_index;
  Vec witness;  // x with <v,x>^2 > alpha * max_u <u,x>^2 when !ok
};

WeakVerdict verify_weak(const VectorSet& vs, std::span<const std::size_t> spanner_indices, double alpha);

enum class CertificateStatus { Certified, Inconclusive };

struct CoverageCertificate {
  std::size_t vector_index = 0;
  std::vector<std::pair<std::size_t, double>> support;  // (spanner vector, probability)
  double delta = 0.0;
  CertificateStatus status = CertificateStatus::Inconclusive;
  std::size_t iterations = 0;
};

inline constexpr double kCertificateSlack = 1e-6;
inline constexpr double kNotInSpanRel = 1e-7;
inline constexpr std::size_t kCertificateMaxIter = 2000;

/// Distribution p over U maximizing delta with delta v v^T <= sum_u p_u u u^T,
/// i.e. minimizing v^T M(p)^+ v by Frank-Wolfe from the uniform distribution.
/// Support entries refer to positions in `spanner`. Throws NotInSpan or
/// ZeroVector.
CoverageCertificate strong_certificate(VecView v, std::span<const VecView> spanner, double alpha);

/// strong_certificate for every nonzero vector of `vs` against the spanner;
/// support entries refer to indices of `vs`.
std::vector<CoverageCertificate> certify_spanner(const VectorSet& vs, std::span<const std::size_t> spanner_indices,
                                                 double alpha);

/// Greedy volume maximization: repeatedly adds the vector with the largest
/// component orthogonal to the span of the vectors chosen so far.
Spanner volume_greedy(const VectorSet& vs, std::size_t m);

/// Spectral k-spanner: volume-greedy subspace of dimension m, then a d-spanner
/// of the projections onto that subspace. Falls back to build_d_spanner on the
/// whole set when m >= d, m <= 2k or d <= 2k.
Spanner build_k_spanner(const VectorSet& vs, const SpannerParams& params);

struct KSpannerVerdict {
  bool ok = true;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure;
  /// Smallest normalized k-order margin seen; negative means a violation.
  double min_margin = 0.0;
};

inline constexpr double kKOrderTol = 1e-7;

/// Checks v v^T <=_k alpha * E_mu[u u^T] for every v with the distribution mu
/// built constructively: strong certificate of the in-subspace part mixed with
/// the uniform distribution over the volume-greedy picks.
KSpannerVerdict verify_k_spanner(const VectorSet& vs, const Spanner& sp, std::size_t k, double alpha);

/// Orthogonal-component bound of the volume-greedy stage:
/// v_perp v_perp^T <=_k 2 m^(2k/m) * uniform mixture over the m greedy picks.
KSpannerVerdict check_orthogonal_component(const VectorSet& vs, const Spanner& sp, std::size_t k);

/// |<u_j, x_i>| <= <u_i, x_i> / sqrt(alpha) + tol for all d-stage picks j < i
/// (signs of x_i normalized so that <u_i, x_i> > 0).
bool check_witness_dominance(const VectorSet& vs, const Spanner& sp, double tol = 1e-9);

}  // namespace specspan
