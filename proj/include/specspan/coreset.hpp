#pragma once

// Composable core-set pipeline: every part is summarized by its k-spanner,
// the summaries are unioned and an offline solver runs on the union.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specspan/detmax.hpp"
#include "specspan/spanner.hpp"
#include "specspan/vector_set.hpp"

namespace specspan {

enum class PartitionScheme { RoundRobin, Hash, FromFile };

struct PartitionedInput {
  VectorSet vectors;
  std::vector<std::vector<std::size_t>> parts;  // global indices, ascending within a part

  std::size_t part_count() const noexcept { return parts.size(); }
  VectorSet part(std::size_t i) const { return vectors.subset(parts[i]); }
};

/// RoundRobin assigns index i to part i mod p; Hash draws the part from the
/// seeded mixer. FromFile uses `part_ids` (one per vector) and creates
/// max(id)+1 parts; throws BadPartColumn when ids are missing or mismatched.
PartitionedInput partition(VectorSet vs, std::size_t p, PartitionScheme scheme, std::uint64_t seed,
                           std::span<const std::size_t> part_ids = {});

/// Consecutive blocks of `block_size` vectors.
PartitionedInput partition_blocks(VectorSet vs, std::size_t block_size);

enum class SolverKind { Brute, GreedyLocal, FwRound };

struct PipelineOptions {
  std::size_t k = 0;  // 0 means the full dimension
  SpannerParams spanner;
  SolverKind solver = SolverKind::GreedyLocal;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t rounding_trials = 1000;
  std::size_t local_search_rounds = 10;
  bool compute_reference = true;
};

struct PipelineReport {
  std::vector<std::size_t> part_sizes;
  std::vector<std::vector<std::size_t>> coresets;  // global indices per part
  std::vector<std::size_t> union_indices;          // (part, local order)
  Solution solution;                               // global indices
  double objective = 0.0;
  /// Same solver on the full data; brute force additionally when within the guard.
  std::optional<double> same_solver_reference;
  std::optional<double> brute_reference;
  double ratio = 1.0;
  double guarantee = 0.0;  // (e * alpha)^(-k)
  double alpha_used = 0.0;
  std::size_t k = 0;
  std::uint64_t comm_bytes = 0;
  std::map<std::string, double> timings_ms;
  std::uint64_t seed = 0;
  std::size_t peak_retained = 0;  // streaming only

  std::vector<std::size_t> coreset_sizes() const;
  /// "brute" when the ratio is taken against brute force, "same-solver"
  /// otherwise, "none" without a reference.
  std::string reference_kind() const;
  std::optional<double> reference_value() const;
};

/// Runs `solver` on `vs` for subsets of size k; indices are local to `vs`.
Solution solve(const VectorSet& vs, std::size_t k, const PipelineOptions& opts);

PipelineReport run_pipeline(const PartitionedInput& input, const PipelineOptions& opts);

/// Blocks are summarized one after another; peak_retained counts the
/// summaries kept so far plus the block being processed.
PipelineReport stream_pipeline(const VectorSet& vs, std::size_t block_size, const PipelineOptions& opts);

}  // namespace specspan
