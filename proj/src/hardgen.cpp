#include "specspan/hardgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specspan/error.hpp"
#include "specspan/rng.hpp"

namespace specspan {

VectorSet sample_sphere(std::size_t count, std::size_t dim, std::uint64_t seed) {
  if (count < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "sample_sphere: count and dim must be >= 1");
  Rng rng(seed);
  VectorSet out(dim);
  out.reserve(count);
  Vec g(dim);
  while (out.size() < count) {
    for (double& x : g) x = rng.normal();
    const double n = norm(g);
    if (n == 0.0) continue;
    for (double& x : g) x /= n;
    out.push_back(g);
  }
  return out;
}

Matrix random_rotation(std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "random_rotation: dim must be >= 1");
  Rng rng(seed);
  Matrix a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = rng.normal();
  auto [q, r] = householder_qr(a);
  for (std::size_t j = 0; j < dim; ++j)
    if (r(j, j) < 0.0)
      for (std::size_t i = 0; i < dim; ++i) q(i, j) = -q(i, j);
  return q;
}

PartitionedInput HardInstance::partitioned() const {
  return partition(vectors, 0, PartitionScheme::FromFile, 0, part_ids);
}

HardInstance gen_hard_instance(std::size_t d, double beta, double big_m, std::uint64_t seed,
                               std::optional<std::size_t> n_override) {
  if (d < 8) throw Error(ErrorCode::DimensionTooSmall, "hard instance needs d >= 8, got " + std::to_string(d));
  if (!(beta >= 1.0)) throw Error(ErrorCode::InvalidArgument, "hard instance needs beta >= 1");
  if (!(big_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "hard instance needs M > 0");

  HardInstance inst;
  inst.d = d;
  inst.beta = beta;
  inst.big_m = big_m;
  inst.seed = seed;
  inst.m = static_cast<std::size_t>(std::ceil(static_cast<double>(d) / std::log(static_cast<double>(d))));
  const std::size_t m = inst.m;
  const std::size_t n =
      n_override.value_or(static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(d), beta + 2.0))));
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "hard instance needs at least one vector per set");
  inst.n_per_set = n;

  const Rng root(seed);
  const VectorSet g = sample_sphere(n, m + 1, root.split(1).next_u64());
  inst.q = random_rotation(d, root.split(2).next_u64());
  Rng pick = root.split(3);

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) inst.max_g_inner = std::max(inst.max_g_inner, std::abs(dot(g[a], g[b])));

  std::vector<Vec> qcols(d);
  for (std::size_t j = 0; j < d; ++j) qcols[j] = inst.q.column(j);

  inst.vectors = VectorSet(d);
  inst.vectors.reserve((d - m) * n + m);
  Vec h(m + 1);
  Vec x(d);
  for (std::size_t i = 0; i < d - m; ++i) {
    const std::size_t pi = pick.below(n);
    // Householder reflection sending g_pi to the last coordinate axis.
    Vec w = g.vector(pi);
    w[m] -= 1.0;
    const double wn2 = norm_sq(w);
    for (std::size_t a = 0; a < n; ++a) {
      const VecView ga = g[a];
      std::copy(ga.begin(), ga.end(), h.begin());
      if (wn2 > 0.0) axpy(-2.0 * dot(w, ga) / wn2, w, h);
      if (a == pi) {
        std::fill(h.begin(), h.end(), 0.0);
        h[m] = 1.0;
      }
      std::fill(x.begin(), x.end(), 0.0);
      for (std::size_t c = 0; c < m; ++c) axpy(h[c], qcols[c], x);
      axpy(h[m], qcols[m + i], x);
      if (a == pi) inst.planted.push_back(inst.vectors.size());
      inst.vectors.push_back(x);
      inst.part_ids.push_back(i);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    inst.vectors.push_back(scaled(qcols[j], big_m));
    inst.part_ids.push_back(d - m + j);
  }
  return inst;
}

double offaxis_excess(const HardInstance& inst) {
  std::vector<Vec> axes;
  for (std::size_t j = inst.m; j < inst.d; ++j) axes.push_back(inst.axis(j));
  std::vector<char> planted(inst.vectors.size(), 0);
  for (std::size_t p : inst.planted) planted[p] = 1;
  const double bound = inst.max_g_inner * inst.max_g_inner;
  double worst = -bound;
  const std::size_t nx = inst.x_sets() * inst.n_per_set;
  for (std::size_t i = 0; i < nx; ++i) {
    if (planted[i]) continue;
    double s = 0.0;
    for (const Vec& e : axes) {
      const double c = dot(inst.vectors[i], e);
      s += c * c;
    }
    worst = std::max(worst, s - bound);
  }
  return worst;
}

LowerBoundReport lowerbound_experiment(const HardInstance& inst, std::size_t cap, std::uint64_t seed) {
  PipelineOptions opts;
  opts.k = inst.d;
  opts.spanner.k = inst.d;
  opts.spanner.max_size = cap;
  opts.solver = SolverKind::GreedyLocal;
  opts.seed = seed;
  opts.compute_reference = false;
  const PipelineReport rep = run_pipeline(inst.partitioned(), opts);

  LowerBoundReport out;
  out.coreset_sizes = rep.coreset_sizes();
  for (std::size_t i = 0; i < inst.x_sets(); ++i) {
    const auto& c = rep.coresets[i];
    out.planted_survived.push_back(std::find(c.begin(), c.end(), inst.planted[i]) != c.end());
  }
  out.objective = rep.objective;
  out.planted_value = std::pow(inst.big_m, 2.0 * static_cast<double>(inst.m));
  out.ratio = out.objective / out.planted_value;
  const auto& sol = rep.solution.indices;
  out.all_y_in_solution = true;
  for (std::size_t j = 0; j < inst.m; ++j) {
    const std::size_t y = inst.x_sets() * inst.n_per_set + j;
    if (std::find(sol.begin(), sol.end(), y) == sol.end()) out.all_y_in_solution = false;
  }
  return out;
}

VectorSet gen_pm1_lowerbound(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "pm1: d must be >= 1");
  if (count > kPm1MaxCount)
    throw Error(ErrorCode::TooLarge, "pm1: count above the desk-scale limit of " + std::to_string(kPm1MaxCount));
  const double bound = std::sqrt(std::pow(static_cast<double>(d), 1.5) / 2.0);
  Rng rng(seed);
  VectorSet out(d);
  out.reserve(count);
  Vec v(d);
  while (out.size() < count) {
    bool accepted = false;
    for (std::size_t draw = 0; draw < kPm1DrawsPerVector && !accepted; ++draw) {
      for (double& x : v) x = rng.sign();
      accepted = true;
      for (std::size_t j = 0; j < out.size() && accepted; ++j)
        if (std::abs(dot(v, out[j])) > bound) accepted = false;
    }
    if (!accepted)
      throw Error(ErrorCode::SamplingFailed,
                  "pm1: no admissible vector after " + std::to_string(kPm1DrawsPerVector) + " draws");
    out.push_back(v);
  }
  return out;
}

NonCoverage pm1_noncoverage(const VectorSet& vs, std::size_t excluded, double alpha) {
  const VecView v = vs[excluded];
  NonCoverage out;
  const double vv = norm_sq(v);
  out.lhs = vv * vv;
  double worst = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i == excluded) continue;
    const double c = dot(vs[i], v);
    worst = std::max(worst, c * c);
  }
  out.rhs = alpha * worst;
  return out;
}

}  // namespace specspan
