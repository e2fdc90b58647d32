#include "specspan/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "specspan/error.hpp"
#include "specspan/lp.hpp"

namespace specspan {

namespace {

constexpr double kArgmaxTieRel = 1e-12;
constexpr double kVolumeTieRel = 1e-9;
constexpr double kVolumeStopRel = 1e-10;
constexpr double kZeroRel = 1e-12;
constexpr double kFwGapRel = 1e-10;

std::size_t resolve_k(std::size_t k, std::size_t dim) {
  if (k == 0) k = dim;
  if (k < 1 || k > dim)
    throw Error(ErrorCode::KOutOfRange, "k = " + std::to_string(k) + " outside [1, " + std::to_string(dim) + "]");
  return k;
}

Vec coords_in(std::span<const Vec> basis, VecView v) {
  Vec c(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) c[i] = dot(basis[i], v);
  return c;
}

Vec from_coords(std::span<const Vec> basis, VecView c, std::size_t dim) {
  Vec x(dim, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) axpy(c[i], basis[i], x);
  return x;
}

SymMat mixture(std::span<const VecView> vs, std::span<const double> w, std::size_t dim) {
  SymMat m(dim);
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (w[i] > 0.0) m.add_outer(vs[i], w[i]);
  return m;
}

double normalized_margin(const SymMat& a, const SymMat& b, std::size_t k) {
  return preceq_k_margin(a, b, k) / (1.0 + a.frobenius_norm() + b.frobenius_norm());
}

}  // namespace

double default_alpha(std::size_t dim, double alpha_scale) {
  const double d = static_cast<double>(dim);
  const double l = 1.0 + std::log(std::max(d, 1.0));
  return std::max(1.0, alpha_scale * d * l * l);
}

std::size_t default_m(std::size_t k, std::size_t dim) {
  const auto lg = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(k) + 1.0)));
  return std::min(dim, 2 * k * (1 + lg));
}

bool Spanner::contains(std::size_t index) const noexcept {
  return std::find(indices.begin(), indices.end(), index) != indices.end();
}

std::vector<std::size_t> Spanner::greedy_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (stage_tags[i] == StageTag::VolumeGreedy) out.push_back(indices[i]);
  return out;
}

std::vector<std::size_t> ingest_indices(const VectorSet& vs) {
  const double cutoff = kZeroRel * vs.max_norm();
  std::map<Vec, std::size_t> seen;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double n = norm(vs[i]);
    if (n == 0.0 || n <= cutoff) continue;
    if (seen.emplace(vs.vector(i), i).second) kept.push_back(i);
  }
  return kept;
}

Spanner build_d_spanner(const VectorSet& vs, double alpha, std::optional<std::size_t> max_size) {
  if (!(alpha >= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 1");
  const auto kept = ingest_indices(vs);
  if (kept.empty()) throw Error(ErrorCode::InvalidArgument, "no nonzero vectors to span");

  Spanner sp;
  sp.alpha = alpha;
  sp.params.k = vs.dim();
  sp.params.alpha = alpha;
  sp.params.max_size = max_size;

  DominationOracle oracle(vs.dim());
  std::vector<char> in_u(vs.size(), 0);
  // Coverage only becomes easier as U grows, so a vector found covered stays
  // covered and the rescan from index 0 can resume where it stopped.
  std::size_t pos = 0;
  while (pos < kept.size()) {
    if (max_size && sp.size() >= *max_size) break;
    const auto res = oracle.check(vs[kept[pos]], alpha);
    if (res.status == Coverage::Covered) {
      ++pos;
      continue;
    }
    std::size_t best = kept.front();
    double best_val = -1.0;
    for (std::size_t i : kept) {
      const double p = dot(vs[i], res.witness);
      const double val = p * p;
      if (val > best_val * (1.0 + kArgmaxTieRel) || best_val < 0.0) {
        best_val = val;
        best = i;
      }
    }
    if (in_u[best]) throw Error(ErrorCode::Internal, "spanner greedy selected a vector twice");
    in_u[best] = 1;
    oracle.add(vs[best]);
    sp.indices.push_back(best);
    sp.stage_tags.push_back(StageTag::DSpanner);
    sp.witnesses.emplace_back(res.witness);
    sp.d_stage.push_back({best, res.witness});
  }
  return sp;
}

WeakVerdict verify_weak(const VectorSet& vs, std::span<const std::size_t> spanner_indices, double alpha) {
  DominationOracle oracle(vs.dim());
  for (VecView u : vs.views(spanner_indices)) oracle.add(u);
  const double cutoff = kZeroRel * vs.max_norm();
  WeakVerdict out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double n = norm(vs[i]);
    if (n == 0.0 || n <= cutoff) continue;
    auto res = oracle.check(vs[i], alpha);
    if (res.status == Coverage::Witness) {
      out.ok = false;
      out.violating_index = i;
      out.witness = std::move(res.witness);
      return out;
    }
  }
  return out;
}

CoverageCertificate strong_certificate(VecView v, std::span<const VecView> spanner, double alpha) {
  const double vn = norm(v);
  if (vn <= 1e-12) throw Error(ErrorCode::ZeroVector, "strong_certificate: zero vector");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  for (VecView u : spanner)
    if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "strong_certificate: dimension mismatch");

  const auto basis = gram_schmidt(spanner);
  if (basis.empty() || norm(project_orth(v, basis)) > kNotInSpanRel * vn)
    throw Error(ErrorCode::NotInSpan, "vector is not in the span of the spanner");

  const std::size_t r = basis.size();
  const std::size_t s = spanner.size();
  const Vec vr = coords_in(basis, v);
  std::vector<Vec> ur(s);
  for (std::size_t i = 0; i < s; ++i) ur[i] = coords_in(basis, spanner[i]);

  Vec p(s, 1.0 / static_cast<double>(s));
  SymMat m(r);
  for (std::size_t i = 0; i < s; ++i) m.add_outer(ur[i], p[i]);

  CoverageCertificate cert;
  double best_g = std::numeric_limits<double>::infinity();
  Vec best_p = p;
  std::size_t it = 0;
  for (; it < kCertificateMaxIter; ++it) {
    const auto chol = Cholesky::factor(m);
    if (!chol) break;
    const Vec z = chol->solve(vr);
    const double g = dot(vr, z);
    if (g < best_g) {
      best_g = g;
      best_p = p;
    }
    std::size_t j = 0;
    double top = -1.0;
    for (std::size_t i = 0; i < s; ++i) {
      const double q = dot(ur[i], z);
      if (q * q > top) {
        top = q * q;
        j = i;
      }
    }
    // top - g is the Frank-Wolfe duality gap of the convex objective.
    if (top - g <= kFwGapRel * g) break;
    const double gamma = 2.0 / (static_cast<double>(it) + 3.0);
    for (double& pi : p) pi *= 1.0 - gamma;
    p[j] += gamma;
    m *= 1.0 - gamma;
    m.add_outer(ur[j], gamma);
  }
  cert.iterations = it;

  // FW reaches vertices of the simplex only asymptotically, so point masses on
  // members parallel to v are evaluated exactly.
  std::optional<std::size_t> point;
  for (std::size_t i = 0; i < s; ++i) {
    const double un = norm(spanner[i]);
    if (un <= 0.0) continue;
    const double c = dot(spanner[i], v);
    if (std::abs(std::abs(c) - un * vn) > 1e-12 * un * vn) continue;
    const double g = (c * c) / (un * un * un * un);
    if (g <= best_g) {
      best_g = g;
      point = i;
    }
  }
  if (point) {
    std::fill(best_p.begin(), best_p.end(), 0.0);
    best_p[*point] = 1.0;
  }

  for (std::size_t i = 0; i < s; ++i)
    if (best_p[i] > 0.0) cert.support.emplace_back(i, best_p[i]);
  cert.delta = 1.0 / best_g;
  cert.status = cert.delta >= 1.0 / alpha - kCertificateSlack ? CertificateStatus::Certified
                                                              : CertificateStatus::Inconclusive;
  return cert;
}

std::vector<CoverageCertificate> certify_spanner(const VectorSet& vs, std::span<const std::size_t> spanner_indices,
                                                 double alpha) {
  const auto u = vs.views(spanner_indices);
  const double cutoff = kZeroRel * vs.max_norm();
  std::vector<CoverageCertificate> out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double n = norm(vs[i]);
    if (n == 0.0 || n <= cutoff) continue;
    auto cert = strong_certificate(vs[i], u, alpha);
    cert.vector_index = i;
    for (auto& [pos, w] : cert.support) pos = spanner_indices[pos];
    out.push_back(std::move(cert));
  }
  return out;
}

Spanner volume_greedy(const VectorSet& vs, std::size_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "volume_greedy: m must be >= 1");
  const std::size_t n = vs.size();
  std::vector<Vec> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = vs.vector(i);
  const double stop = kVolumeStopRel * vs.max_norm();

  Spanner sp;
  sp.params.m_override = m;
  while (sp.size() < m) {
    std::size_t best = 0;
    double best_r = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = norm(res[i]);
      if (r > best_r * (1.0 + kVolumeTieRel) || best_r < 0.0) {
        best_r = r;
        best = i;
      }
    }
    if (best_r <= stop || best_r <= 0.0) break;
    Vec q = scaled(res[best], 1.0 / best_r);
    for (std::size_t i = 0; i < n; ++i) {
      // two passes keep the residuals orthogonal to working precision
      for (int pass = 0; pass < 2; ++pass) axpy(-dot(res[i], q), q, res[i]);
    }
    std::fill(res[best].begin(), res[best].end(), 0.0);
    sp.indices.push_back(best);
    sp.stage_tags.push_back(StageTag::VolumeGreedy);
    sp.witnesses.emplace_back(std::nullopt);
  }
  sp.greedy_size = sp.size();
  return sp;
}

Spanner build_k_spanner(const VectorSet& vs, const SpannerParams& params) {
  const std::size_t d = vs.dim();
  const std::size_t k = resolve_k(params.k, d);
  if (params.alpha && !(*params.alpha >= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 1");
  const std::size_t m = params.m_override.value_or(default_m(k, d));

  if (m >= d || m <= 2 * k || d <= 2 * k) {
    const double alpha = params.alpha.value_or(default_alpha(d, params.alpha_scale));
    Spanner sp = build_d_spanner(vs, alpha, params.max_size);
    sp.params = params;
    sp.params.k = k;
    return sp;
  }

  Spanner sp = volume_greedy(vs, m);
  const auto u0 = vs.views(sp.indices);
  const auto basis = gram_schmidt(std::span<const VecView>(u0));
  const std::size_t r = basis.size();

  VectorSet projected(r);
  projected.reserve(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) projected.push_back(coords_in(basis, vs[i]));

  const double alpha = params.alpha.value_or(default_alpha(r, params.alpha_scale));
  const Spanner inner = build_d_spanner(projected, alpha, params.max_size);

  sp.params = params;
  sp.params.k = k;
  sp.alpha = alpha;
  for (const auto& pick : inner.d_stage) {
    Vec x = from_coords(basis, pick.witness, d);
    if (!sp.contains(pick.index)) {
      sp.indices.push_back(pick.index);
      sp.stage_tags.push_back(StageTag::DSpanner);
      sp.witnesses.emplace_back(x);
    }
    sp.d_stage.push_back({pick.index, std::move(x)});
  }
  return sp;
}

KSpannerVerdict verify_k_spanner(const VectorSet& vs, const Spanner& sp, std::size_t k, double alpha) {
  const std::size_t d = vs.dim();
  k = resolve_k(k, d);
  KSpannerVerdict out;
  out.min_margin = std::numeric_limits<double>::infinity();
  const double cutoff = kZeroRel * vs.max_norm();

  const auto all_u = vs.views(sp.indices);
  const auto greedy = sp.greedy_indices();
  const auto u0 = vs.views(greedy);
  const bool direct = greedy.empty();
  const auto basis = direct ? std::vector<Vec>{} : gram_schmidt(std::span<const VecView>(u0));

  // Uniform mixture over the greedy picks and the projections of all spanner
  // vectors onto their span are shared by every v.
  SymMat uniform(d);
  for (VecView u : u0) uniform.add_outer(u, 1.0 / static_cast<double>(u0.size()));
  std::vector<Vec> hat;
  std::vector<VecView> hat_views;
  if (!direct) {
    hat.reserve(all_u.size());
    for (VecView u : all_u) {
      Vec h(d, 0.0);
      for (const Vec& b : basis) axpy(dot(b, u), b, h);
      hat.push_back(std::move(h));
    }
    for (const Vec& h : hat) hat_views.emplace_back(h);
  }
  const double mm = static_cast<double>(u0.size());
  const double c1 = direct ? 0.0 : 2.0 * std::pow(mm, 2.0 * static_cast<double>(k) / mm);

  auto fail = [&](std::size_t i) {
    out.ok = false;
    ++out.failures;
    if (!out.first_failure) out.first_failure = i;
  };

  for (std::size_t i = 0; i < vs.size(); ++i) {
    const VecView v = vs[i];
    const double vn = norm(v);
    if (vn == 0.0 || vn <= cutoff) continue;
    ++out.checked;
    if (sp.contains(i)) {
      // point mass on v itself: v v^T <= alpha v v^T for alpha >= 1
      if (alpha < 1.0) fail(i);
      continue;
    }
    Vec w(all_u.size(), 0.0);
    try {
      if (direct) {
        const auto cert = strong_certificate(v, all_u, alpha);
        for (auto [pos, p] : cert.support) w[pos] = p;
      } else {
        Vec vhat(d, 0.0);
        for (const Vec& b : basis) axpy(dot(b, v), b, vhat);
        if (norm(vhat) <= kNotInSpanRel * vn) {
          for (std::size_t j = 0; j < all_u.size(); ++j)
            if (sp.stage_tags[j] == StageTag::VolumeGreedy) w[j] = 1.0 / mm;
        } else {
          const auto cert = strong_certificate(vhat, hat_views, alpha);
          const double a = 4.0 / cert.delta;
          const double b = 2.0 * c1 * (1.0 + 2.0 / cert.delta);
          for (auto [pos, p] : cert.support) w[pos] += a * p / (a + b);
          for (std::size_t j = 0; j < all_u.size(); ++j)
            if (sp.stage_tags[j] == StageTag::VolumeGreedy) w[j] += b / (a + b) / mm;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInSpan) throw;
      fail(i);
      continue;
    }
    const SymMat lhs = SymMat::outer(v);
    SymMat rhs = mixture(all_u, w, d);
    rhs *= alpha;
    const double margin = normalized_margin(lhs, rhs, k);
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < -kKOrderTol) fail(i);
  }
  if (out.checked == 0 || out.min_margin == std::numeric_limits<double>::infinity()) out.min_margin = 0.0;
  return out;
}

KSpannerVerdict check_orthogonal_component(const VectorSet& vs, const Spanner& sp, std::size_t k) {
  const std::size_t d = vs.dim();
  k = resolve_k(k, d);
  KSpannerVerdict out;
  const auto greedy = sp.greedy_indices();
  if (greedy.empty()) return out;
  const auto u0 = vs.views(greedy);
  const auto basis = gram_schmidt(std::span<const VecView>(u0));
  const double mm = static_cast<double>(u0.size());
  const double c1 = 2.0 * std::pow(mm, 2.0 * static_cast<double>(k) / mm);
  SymMat rhs(d);
  for (VecView u : u0) rhs.add_outer(u, c1 / mm);

  out.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    ++out.checked;
    const Vec perp = project_orth(vs[i], basis);
    const double margin = normalized_margin(SymMat::outer(perp), rhs, k);
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < -kKOrderTol) {
      out.ok = false;
      ++out.failures;
      if (!out.first_failure) out.first_failure = i;
    }
  }
  if (out.checked == 0) out.min_margin = 0.0;
  return out;
}

bool check_witness_dominance(const VectorSet& vs, const Spanner& sp, double tol) {
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sp.alpha);
  for (std::size_t i = 0; i < sp.d_stage.size(); ++i) {
    const auto& pick = sp.d_stage[i];
    const double s = std::abs(dot(vs[pick.index], pick.witness));
    for (std::size_t j = 0; j < i; ++j) {
      const double c = std::abs(dot(vs[sp.d_stage[j].index], pick.witness));
      if (c > s * inv_sqrt_alpha + tol) return false;
    }
  }
  return true;
}

}  // namespace specspan
