#include "specspan/coreset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "specspan/error.hpp"
#include "specspan/rng.hpp"

namespace specspan {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool has_nonzero(const VectorSet& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (norm(vs[i]) > 0.0) return true;
  return false;
}

}  // namespace

PartitionedInput partition(VectorSet vs, std::size_t p, PartitionScheme scheme, std::uint64_t seed,
                           std::span<const std::size_t> part_ids) {
  PartitionedInput out;
  const std::size_t n = vs.size();
  if (scheme == PartitionScheme::FromFile) {
    if (part_ids.size() != n) throw Error(ErrorCode::BadPartColumn, "part column missing or of the wrong length");
    std::size_t parts = 0;
    for (std::size_t id : part_ids) parts = std::max(parts, id + 1);
    out.parts.resize(parts);
    for (std::size_t i = 0; i < n; ++i) out.parts[part_ids[i]].push_back(i);
  } else {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "partition: p must be >= 1");
    out.parts.resize(p);
    const Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t part = scheme == PartitionScheme::RoundRobin ? i % p : rng.split(i).next_u64() % p;
      out.parts[part].push_back(i);
    }
  }
  out.vectors = std::move(vs);
  return out;
}

PartitionedInput partition_blocks(VectorSet vs, std::size_t block_size) {
  if (block_size < 1) throw Error(ErrorCode::InvalidArgument, "block size must be >= 1");
  PartitionedInput out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i % block_size == 0) out.parts.emplace_back();
    out.parts.back().push_back(i);
  }
  out.vectors = std::move(vs);
  return out;
}

std::vector<std::size_t> PipelineReport::coreset_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& c : coresets) out.push_back(c.size());
  return out;
}

std::string PipelineReport::reference_kind() const {
  if (brute_reference) return "brute";
  if (same_solver_reference) return "same-solver";
  return "none";
}

std::optional<double> PipelineReport::reference_value() const {
  return brute_reference ? brute_reference : same_solver_reference;
}

Solution solve(const VectorSet& vs, std::size_t k, const PipelineOptions& opts) {
  if (vs.size() < k) {
    Solution all;
    for (std::size_t i = 0; i < vs.size(); ++i) all.indices.push_back(i);
    return all;  // fewer than k vectors: every k-volume is zero
  }
  switch (opts.solver) {
    case SolverKind::Brute:
      return brute_force_detmax(vs, k);
    case SolverKind::GreedyLocal:
      return greedy_local_search(vs, k, opts.local_search_rounds);
    case SolverKind::FwRound: {
      if (k != vs.dim()) throw Error(ErrorCode::KOutOfRange, "fw-round is implemented for k = d only");
      const auto frac = fractional_detmax(vs);
      return nikolov_round(vs, frac, k, opts.rounding_trials, opts.seed).best;
    }
  }
  throw Error(ErrorCode::Internal, "unknown solver");
}

PipelineReport run_pipeline(const PartitionedInput& input, const PipelineOptions& opts) {
  const VectorSet& all = input.vectors;
  const std::size_t d = all.dim();
  const std::size_t k = opts.k == 0 ? d : opts.k;
  if (k < 1 || k > d) throw Error(ErrorCode::KOutOfRange, "pipeline: k outside [1, d]");
  SpannerParams params = opts.spanner;
  params.k = k;

  PipelineReport rep;
  rep.k = k;
  rep.seed = opts.seed;
  const std::size_t p = input.part_count();
  rep.coresets.resize(p);
  for (const auto& part : input.parts) rep.part_sizes.push_back(part.size());
  std::vector<double> alphas(p, 0.0);
  std::vector<std::exception_ptr> errors(p);

  auto t0 = Clock::now();
  auto work = [&](std::size_t i) {
    try {
      const VectorSet local = input.part(i);
      if (!has_nonzero(local)) return;
      const Spanner sp = build_k_spanner(local, params);
      for (std::size_t j : sp.indices) rep.coresets[i].push_back(input.parts[i][j]);
      alphas[i] = sp.alpha;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, p));
  if (threads == 1) {
    for (std::size_t i = 0; i < p; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < p; i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  rep.timings_ms["coreset"] = ms_since(t0);

  for (const auto& c : rep.coresets) rep.union_indices.insert(rep.union_indices.end(), c.begin(), c.end());
  rep.comm_bytes = 8ULL * d * rep.union_indices.size();
  rep.alpha_used = *std::max_element(alphas.begin(), alphas.end());
  rep.guarantee = std::pow(std::numbers::e * std::max(rep.alpha_used, 1.0), -static_cast<double>(k));

  t0 = Clock::now();
  const VectorSet pooled = all.subset(rep.union_indices);
  Solution local = solve(pooled, k, opts);
  for (auto& i : local.indices) i = rep.union_indices[i];
  std::sort(local.indices.begin(), local.indices.end());
  rep.solution = std::move(local);
  rep.objective = rep.solution.value;
  rep.timings_ms["solve"] = ms_since(t0);

  if (opts.compute_reference) {
    t0 = Clock::now();
    rep.same_solver_reference = solve(all, k, opts).value;
    if (opts.solver == SolverKind::Brute) {
      rep.brute_reference = rep.same_solver_reference;
    } else if (all.size() >= k && binomial(all.size(), k) <= kBruteForceGuard) {
      rep.brute_reference = brute_force_detmax(all, k).value;
    }
    rep.timings_ms["reference"] = ms_since(t0);
    const double ref = *rep.reference_value();
    rep.ratio = ref > 0.0 ? rep.objective / ref : 1.0;
  }
  return rep;
}

PipelineReport stream_pipeline(const VectorSet& vs, std::size_t block_size, const PipelineOptions& opts) {
  PipelineOptions sequential = opts;
  sequential.threads = 1;
  const PartitionedInput blocks = partition_blocks(vs, block_size);
  PipelineReport rep = run_pipeline(blocks, sequential);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < blocks.part_count(); ++i) {
    rep.peak_retained = std::max(rep.peak_retained, kept + blocks.parts[i].size());
    kept += rep.coresets[i].size();
  }
  rep.peak_retained = std::max(rep.peak_retained, kept);
  return rep;
}

}  // namespace specspan
