#include "specspan/detmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "specspan/error.hpp"
#include "specspan/rng.hpp"
#include "specspan/spanner.hpp"

namespace specspan {

namespace {

constexpr double kImproveRel = 1e-12;
constexpr double kSwapRel = 1e-9;
constexpr std::size_t kDetmaxIter = 1000;
constexpr std::size_t kDesignIter = 2000;
constexpr double kDetmaxGap = 1e-9;
constexpr double kSingularRel = 1e-12;

void check_k(std::size_t k, std::size_t limit, const char* what) {
  if (k < 1 || k > limit)
    throw Error(ErrorCode::KOutOfRange,
                std::string(what) + ": k = " + std::to_string(k) + " outside [1, " + std::to_string(limit) + "]");
}

void require_full_rank(const VectorSet& vs, const char* what) {
  if (vs.rank() < vs.dim()) throw Error(ErrorCode::Degenerate, std::string(what) + ": vectors do not span R^d");
}

SymMat weighted_gram(const VectorSet& vs, std::span<const double> s) {
  SymMat a(vs.dim());
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (s[i] > 0.0) a.add_outer(vs[i], s[i]);
  return a;
}

}  // namespace

double subset_value(const VectorSet& vs, std::span<const std::size_t> indices) {
  const auto views = vs.views(indices);
  return gram_volume_sq(views);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step; guard the multiplication
    const std::uint64_t f = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    r = r * f / i;
  }
  return r;
}

Solution brute_force_detmax(const VectorSet& vs, std::size_t k) {
  const std::size_t n = vs.size();
  check_k(k, n, "brute_force_detmax");
  if (binomial(n, k) > kBruteForceGuard)
    throw Error(ErrorCode::TooLarge, "brute force over C(" + std::to_string(n) + ", " + std::to_string(k) +
                                         ") subsets exceeds the guard of " + std::to_string(kBruteForceGuard));

  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<VecView> views(k);
  Solution best;
  best.value = -1.0;
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) views[i] = vs[comb[i]];
    const double val = gram_volume_sq(views);
    if (best.value < 0.0 || val > best.value * (1.0 + kImproveRel)) {
      best.value = val;
      best.indices = comb;
    }
    // next combination in lexicographic order
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

Solution greedy_local_search(const VectorSet& vs, std::size_t k, std::size_t max_rounds) {
  const std::size_t n = vs.size();
  check_k(k, n, "greedy_local_search");

  std::vector<std::size_t> sel = volume_greedy(vs, k).indices;
  std::vector<char> used(n, 0);
  for (std::size_t i : sel) used[i] = 1;
  for (std::size_t i = 0; sel.size() < k && i < n; ++i)
    if (!used[i]) {
      sel.push_back(i);
      used[i] = 1;
    }

  double value = subset_value(vs, sel);
  const std::size_t budget = max_rounds * n * k;
  std::size_t evals = 0;
  bool improved = true;
  while (improved && evals < budget) {
    improved = false;
    for (std::size_t pos = 0; pos < k && evals < budget; ++pos) {
      for (std::size_t c = 0; c < n && evals < budget; ++c) {
        if (used[c]) continue;
        ++evals;
        const std::size_t old = sel[pos];
        sel[pos] = c;
        const double val = subset_value(vs, sel);
        if (val > value * (1.0 + kSwapRel)) {
          used[old] = 0;
          used[c] = 1;
          value = val;
          improved = true;
        } else {
          sel[pos] = old;
        }
      }
    }
  }
  std::sort(sel.begin(), sel.end());
  return {sel, value};
}

FractionalSolution fractional_detmax(const VectorSet& vs) {
  const std::size_t d = vs.dim();
  const std::size_t n = vs.size();
  require_full_rank(vs, "fractional_detmax");
  const double dd = static_cast<double>(d);
  const double mx = vs.max_norm();
  const double eps = 1e-12 * mx * mx;

  Vec s(n, 0.0);
  for (std::size_t i : greedy_local_search(vs, d).indices) s[i] = 1.0;

  auto regularized = [&](const Vec& w) {
    SymMat a = weighted_gram(vs, w);
    a += eps * SymMat::identity(d);
    return a;
  };

  FractionalSolution out;
  out.budget = dd;
  double best_obj = -std::numeric_limits<double>::infinity();
  Vec best_s = s;
  std::size_t it = 0;
  for (; it < kDetmaxIter; ++it) {
    const auto chol = Cholesky::factor(regularized(s));
    if (!chol) break;
    const double obj = chol->log_det();
    if (obj > best_obj) {
      best_obj = obj;
      best_s = s;
    }
    std::size_t j = 0;
    double top = -1.0;
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec z = chol->solve(vs[i]);
      const double g = dot(vs[i], z);
      inner += s[i] * g;
      if (g > top) {
        top = g;
        j = i;
      }
    }
    // duality gap of the linearization over the simplex of mass d
    if (dd * top - inner <= kDetmaxGap * dd) break;
    const double gamma = 2.0 / (static_cast<double>(it) + 3.0);
    for (double& w : s) w *= 1.0 - gamma;
    s[j] += gamma * dd;
  }
  out.iterations = it;
  out.weights = std::move(best_s);
  const Vec ev = sym_eigenvalues(weighted_gram(vs, out.weights));
  double det = 1.0;
  for (double l : ev) det *= std::max(l, 0.0);
  out.objective = det;
  return out;
}

RoundingResult nikolov_round(const VectorSet& vs, const FractionalSolution& s, std::size_t k, std::size_t trials,
                             std::uint64_t seed) {
  const std::size_t n = vs.size();
  check_k(k, vs.dim(), "nikolov_round");
  if (s.weights.size() != n) throw Error(ErrorCode::DimensionMismatch, "nikolov_round: weight count differs from set size");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "nikolov_round: trials must be >= 1");
  for (double w : s.weights)
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "nikolov_round: negative weight");
  const double total = pairwise_sum(s.weights);
  if (std::abs(total - static_cast<double>(k)) > 1e-6)
    throw Error(ErrorCode::InvalidArgument, "nikolov_round: weights must sum to k");

  Vec cdf(n);
  std::partial_sum(s.weights.begin(), s.weights.end(), cdf.begin());
  const Rng root(seed);
  Vec values(trials);
  RoundingResult out;
  out.trials = trials;
  out.best.value = -1.0;
  std::vector<std::size_t> draw(k);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = root.split(t);
    for (auto& idx : draw) {
      const double u = rng.uniform() * cdf.back();
      idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      idx = std::min(idx, n - 1);
      // zero-weight entries share their cdf value with a predecessor, so
      // upper_bound never lands on them
    }
    values[t] = subset_value(vs, draw);
    if (values[t] > out.best.value) {
      out.best.value = values[t];
      out.best.indices = draw;
    }
  }
  std::sort(out.best.indices.begin(), out.best.indices.end());
  out.mean = pairwise_sum(values) / static_cast<double>(trials);
  if (trials > 1) {
    Vec dev(trials);
    for (std::size_t t = 0; t < trials; ++t) dev[t] = (values[t] - out.mean) * (values[t] - out.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(trials - 1);
    out.std_error = std::sqrt(var / static_cast<double>(trials));
  }
  return out;
}

double eval_design(const SymMat& a, DesignKind kind) {
  const Vec ev = sym_eigenvalues(a);
  const double inf = std::numeric_limits<double>::infinity();
  if (ev.empty() || !(ev.front() > 0.0) || ev.back() <= kSingularRel * ev.front()) return inf;
  const double d = static_cast<double>(ev.size());
  switch (kind) {
    case DesignKind::D: {
      double logdet = 0.0;
      for (double l : ev) logdet += std::log(l);
      return std::exp(-logdet / d);
    }
    case DesignKind::E:
      return 1.0 / ev.back();
    case DesignKind::A: {
      double tr = 0.0;
      for (double l : ev) tr += 1.0 / l;
      return tr / d;
    }
  }
  return inf;
}

double eval_design(const VectorSet& vs, std::span<const double> weights, DesignKind kind) {
  if (weights.size() != vs.size()) throw Error(ErrorCode::DimensionMismatch, "eval_design: weight count differs");
  return eval_design(weighted_gram(vs, weights), kind);
}

double eval_design_subset(const VectorSet& vs, std::span<const std::size_t> indices, DesignKind kind) {
  SymMat a(vs.dim());
  for (VecView v : vs.views(indices)) a.add_outer(v);
  return eval_design(a, kind);
}

FractionalSolution fractional_design(const VectorSet& vs, DesignKind kind, double budget) {
  const std::size_t n = vs.size();
  if (!(budget > 0.0)) throw Error(ErrorCode::InvalidArgument, "fractional_design: budget must be positive");
  require_full_rank(vs, "fractional_design");

  Vec s(n, budget / static_cast<double>(n));
  FractionalSolution out;
  out.budget = budget;
  double best_obj = std::numeric_limits<double>::infinity();
  Vec best_s = s;
  std::size_t it = 0;
  for (; it < kDesignIter; ++it) {
    const SymMat a = weighted_gram(vs, s);
    const EigDecomp eig = sym_eig(a);
    const double obj = eval_design(a, kind);
    if (obj < best_obj) {
      best_obj = obj;
      best_s = s;
    }
    if (!std::isfinite(obj)) break;
    // Each objective decreases fastest along the vector with the largest
    // linearization score below.
    const std::size_t d = eig.values.size();
    std::size_t j = 0;
    double top = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec c(d);
      for (std::size_t e = 0; e < d; ++e) {
        double p = 0.0;
        for (std::size_t r = 0; r < d; ++r) p += eig.vectors(r, e) * vs[i][r];
        c[e] = p;
      }
      double g = 0.0;
      switch (kind) {
        case DesignKind::D:  // v^T A^-1 v
          for (std::size_t e = 0; e < d; ++e) g += c[e] * c[e] / eig.values[e];
          break;
        case DesignKind::A:  // v^T A^-2 v
          for (std::size_t e = 0; e < d; ++e) g += c[e] * c[e] / (eig.values[e] * eig.values[e]);
          break;
        case DesignKind::E:  // <v, w_min>^2
          g = c[d - 1] * c[d - 1];
          break;
      }
      if (g > top) {
        top = g;
        j = i;
      }
    }
    const double gamma = 2.0 / (static_cast<double>(it) + 3.0);
    for (double& w : s) w *= 1.0 - gamma;
    s[j] += gamma * budget;
  }
  out.iterations = it;
  out.weights = std::move(best_s);
  out.objective = best_obj;
  return out;
}

}  // namespace specspan
