#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "specspan/error.hpp"
#include "specspan/hardgen.hpp"
#include "specspan/spanner.hpp"

using namespace specspan;

namespace {

VectorSet from_rows(std::size_t d, const std::vector<Vec>& rows) {
  VectorSet vs(d);
  for (const Vec& r : rows) vs.push_back(r);
  return vs;
}

double k_alpha(std::size_t k) {
  const double l = 1.0 + std::log(static_cast<double>(k));
  return 32.0 * static_cast<double>(k) * l * l * l;
}

}  // namespace

TEST_CASE("default parameters") {
  CHECK(default_alpha(1) == 1.0);
  const double l = 1.0 + std::log(8.0);
  CHECK(default_alpha(8) == doctest::Approx(8.0 * l * l));
  CHECK(default_alpha(8, 0.5) == doctest::Approx(4.0 * l * l));
  CHECK(default_alpha(2, 1e-6) == 1.0);
  CHECK(default_m(2, 100) == 12);  // 2*2*(1+ceil(log2 3))
  CHECK(default_m(3, 100) == 18);
  CHECK(default_m(1, 100) == 4);
  CHECK(default_m(3, 12) == 12);
  for (std::size_t k = 1; k <= 20; ++k) {
    const std::size_t m = default_m(k, 1000);
    CHECK(m > 2 * k);
    CHECK(std::pow(static_cast<double>(m), 2.0 * k / m) <= 4.0);
  }
}

TEST_CASE("build_d_spanner on the standard basis keeps every vector in order") {
  for (std::size_t d : {1u, 3u, 6u}) {
    const VectorSet vs = oracle::basis_set(d);
    for (double alpha : {1.0, 5.0, 100.0}) {
      const Spanner sp = build_d_spanner(vs, alpha);
      REQUIRE(sp.size() == d);
      for (std::size_t i = 0; i < d; ++i) CHECK(sp.indices[i] == i);
    }
  }
}

TEST_CASE("build_d_spanner hand-traced example") {
  // witness e1 selects 2e1 by argmax; e1 is then covered; witness e2 selects e2
  const VectorSet vs = from_rows(2, {{1, 0}, {2, 0}, {0, 1}});
  const Spanner sp = build_d_spanner(vs, 2.0);
  REQUIRE(sp.size() == 2);
  CHECK(sp.indices[0] == 1);
  CHECK(sp.indices[1] == 2);
  CHECK(sp.witnesses[0].has_value());
}

TEST_CASE("build_d_spanner singleton, zero vectors and duplicates") {
  const VectorSet one = from_rows(3, {{1, 2, 3}});
  const Spanner sp = build_d_spanner(one, 4.0);
  REQUIRE(sp.size() == 1);
  CHECK(sp.indices[0] == 0);

  const VectorSet messy = from_rows(2, {{0, 0}, {1, 1}, {1, 1}, {0, 0}});
  CHECK(ingest_indices(messy) == std::vector<std::size_t>{1});
  const Spanner sm = build_d_spanner(messy, 2.0);
  REQUIRE(sm.size() == 1);
  CHECK(sm.indices[0] == 1);

  CHECK_THROWS_AS(build_d_spanner(from_rows(2, {{0, 0}}), 2.0), Error);
  CHECK_THROWS_AS(build_d_spanner(one, 0.5), Error);
}

TEST_CASE("build_d_spanner respects the size cap") {
  const VectorSet vs = oracle::basis_set(6);
  const Spanner sp = build_d_spanner(vs, 2.0, 4);
  CHECK(sp.size() == 4);
}

TEST_CASE("verify_weak examples") {
  const VectorSet vs = from_rows(2, {{1, 0}, {0, 1}});
  const std::vector<std::size_t> only_e1{0};
  const auto bad = verify_weak(vs, only_e1, 3.0);
  REQUIRE_FALSE(bad.ok);
  CHECK(*bad.violating_index == 1);
  CHECK(std::abs(bad.witness[0]) <= 1e-12);
  CHECK(bad.witness[1] == doctest::Approx(1.0));

  const VectorSet with_sum = from_rows(2, {{1, 0}, {0, 1}, {1, 1}});
  const std::vector<std::size_t> basis{0, 1};
  CHECK(verify_weak(with_sum, basis, 4.0).ok);
  CHECK_FALSE(verify_weak(with_sum, basis, 3.9).ok);
}

TEST_CASE("strong_certificate examples") {
  const Vec e1{1, 0}, e2{0, 1};
  const std::vector<VecView> u{e1, e2};

  const auto point = strong_certificate(e1, u, 4.0);
  CHECK(point.delta == doctest::Approx(1.0));
  REQUIRE(point.support.size() == 1);
  CHECK(point.support[0].first == 0);
  CHECK(point.support[0].second == 1.0);

  const Vec sum{1, 1};
  const auto half = strong_certificate(sum, u, 4.0);
  CHECK(half.delta == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(half.status == CertificateStatus::Certified);
  REQUIRE(half.support.size() == 2);
  CHECK(half.support[0].second == doctest::Approx(0.5));
  CHECK(half.support[1].second == doctest::Approx(0.5));
  // just above the tight alpha the same certificate no longer passes
  CHECK(strong_certificate(sum, u, 3.9).status == CertificateStatus::Inconclusive);

  const Vec e3{0, 0, 1}, a{1, 0, 0}, b{0, 1, 0};
  const std::vector<VecView> plane{a, b};
  try {
    strong_certificate(e3, plane, 4.0);
    FAIL("expected NotInSpan");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInSpan);
  }
}

TEST_CASE("strong_certificate: delta is the best value over the simplex") {
  // For two vectors the optimum over p in [0,1] can be scanned directly.
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Vec u1{rng.normal(), rng.normal()}, u2{rng.normal(), rng.normal()};
    const Vec v{rng.normal(), rng.normal()};
    const std::vector<VecView> u{u1, u2};
    const auto cert = strong_certificate(v, u, 1e6);
    double best = 0.0;
    for (int i = 1; i < 4000; ++i) {
      const double p = i / 4000.0;
      SymMat m(2);
      m.add_outer(u1, p);
      m.add_outer(u2, 1.0 - p);
      best = std::max(best, 1.0 / *pinv_quadform(m, v));
    }
    CHECK(cert.delta >= best * (1.0 - 1e-4));
    CHECK(cert.delta <= best * (1.0 + 1e-3));
    double total = 0.0;
    for (auto [i, p] : cert.support) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    // the certificate really is a PSD domination
    SymMat m(2);
    for (auto [i, p] : cert.support) m.add_outer(u[i], p);
    SymMat lhs = SymMat::outer(v);
    lhs *= cert.delta * (1.0 - 1e-9);
    CHECK(preceq_k(lhs, m, 2, 1e-12));
  }
}

TEST_CASE("volume_greedy examples") {
  const VectorSet e = oracle::basis_set(4);
  const Spanner all = volume_greedy(e, 4);
  CHECK(all.indices == std::vector<std::size_t>{0, 1, 2, 3});
  for (StageTag t : all.stage_tags) CHECK(t == StageTag::VolumeGreedy);

  const VectorSet tie = from_rows(2, {{2, 0}, {1, 1}, {0, 1}});
  CHECK(volume_greedy(tie, 2).indices == std::vector<std::size_t>{0, 1});

  const VectorSet low = from_rows(3, {{1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  CHECK(volume_greedy(low, 3).size() == 2);
}

TEST_CASE("volume_greedy picks maximize the residual at every step") {
  const VectorSet vs = oracle::gaussian_set(30, 6, 4);
  const Spanner sp = volume_greedy(vs, 4);
  std::vector<Vec> basis;
  for (std::size_t step = 0; step < sp.size(); ++step) {
    double best = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) best = std::max(best, norm(project_orth(vs[i], basis)));
    const Vec r = project_orth(vs[sp.indices[step]], basis);
    CHECK(norm(r) >= best * (1.0 - 1e-9));
    basis.push_back(scaled(r, 1.0 / norm(r)));
  }
}

TEST_CASE("build_k_spanner degenerate branch equals build_d_spanner") {
  const VectorSet vs = sample_sphere(80, 5, 3);
  SpannerParams p;
  p.k = 5;
  const Spanner a = build_k_spanner(vs, p);
  const Spanner b = build_d_spanner(vs, default_alpha(5));
  CHECK(a.indices == b.indices);
  CHECK(a.greedy_size == 0);
}

TEST_CASE("build_k_spanner on a k-dimensional subspace") {
  // vectors in span(e1, e2) inside R^8, k = 2, explicit m = 5 so the
  // volume-greedy branch runs and stops at the rank
  Rng rng(21);
  VectorSet vs(8);
  for (int i = 0; i < 40; ++i) {
    Vec v(8, 0.0);
    v[0] = rng.normal();
    v[1] = rng.normal();
    vs.push_back(v);
  }
  SpannerParams p;
  p.k = 2;
  p.m_override = 5;
  const Spanner sp = build_k_spanner(vs, p);
  CHECK(sp.greedy_size == 2);
  const auto verdict = verify_k_spanner(vs, sp, 2, k_alpha(2));
  CHECK(verdict.ok);
  CHECK(check_orthogonal_component(vs, sp, 2).ok);
}

TEST_CASE("build_k_spanner on the standard basis with k = 1") {
  const std::size_t d = 10;
  const VectorSet vs = oracle::basis_set(d);
  SpannerParams p;
  p.k = 1;
  const Spanner sp = build_k_spanner(vs, p);
  const std::size_t m = default_m(1, d);
  CHECK(sp.size() <= d);
  CHECK(sp.greedy_size == m);
  // trace comparison: the uniform mixture over m picks has trace 1, so with
  // alpha >= m every e_i passes the k = 1 order
  const auto verdict = verify_k_spanner(vs, sp, 1, k_alpha(1));
  CHECK(verdict.ok);
}

TEST_CASE("verify_k_spanner trivial cases") {
  const VectorSet vs = sample_sphere(40, 4, 9);
  SpannerParams p;
  p.k = 4;
  const Spanner sp = build_k_spanner(vs, p);
  CHECK(verify_k_spanner(vs, sp, 4, sp.alpha).ok);

  const VectorSet one = from_rows(3, {{1, 2, 2}});
  const Spanner s1 = build_k_spanner(one, SpannerParams{});
  CHECK(verify_k_spanner(one, s1, 2, 1.0).ok);
}

TEST_CASE("verify_k_spanner on random input, d = 8, k = 3") {
  const VectorSet vs = oracle::gaussian_set(200, 8, 8);
  SpannerParams p;
  p.k = 3;
  const Spanner sp = build_k_spanner(vs, p);
  const auto verdict = verify_k_spanner(vs, sp, 3, k_alpha(3));
  CHECK(verdict.ok);
  CHECK(verdict.checked == 200);
}

TEST_CASE("verify_k_spanner on the volume-greedy branch, d = 12, k = 2") {
  const VectorSet vs = sample_sphere(300, 12, 5);
  SpannerParams p;
  p.k = 2;
  p.m_override = 8;
  const Spanner sp = build_k_spanner(vs, p);
  CHECK(sp.greedy_size == 8);
  CHECK(check_witness_dominance(vs, sp));
  const auto verdict = verify_k_spanner(vs, sp, 2, k_alpha(2));
  CHECK(verdict.ok);
  CHECK(check_orthogonal_component(vs, sp, 2).ok);
}

TEST_CASE("spanner properties on unit-sphere samples") {
  for (std::size_t d : {3u, 6u}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const VectorSet vs = sample_sphere(150, d, seed);
      const double alpha = default_alpha(d);
      const Spanner sp = build_d_spanner(vs, alpha);
      CHECK(verify_weak(vs, sp.indices, alpha).ok);
      CHECK(check_witness_dominance(vs, sp));
      CHECK(static_cast<double>(sp.size()) <= 10.0 * d * (1.0 + std::log(static_cast<double>(d))));
      for (const auto& c : certify_spanner(vs, sp.indices, alpha)) CHECK(c.status == CertificateStatus::Certified);

      // every selection is argmax_u <u,x>^2 of its witness
      for (const auto& pick : sp.d_stage) {
        const double chosen = std::pow(dot(vs[pick.index], pick.witness), 2);
        for (std::size_t i = 0; i < vs.size(); ++i)
          CHECK(std::pow(dot(vs[i], pick.witness), 2) <= chosen * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("union of spanners of a split is a spanner of the whole") {
  const VectorSet vs = sample_sphere(200, 5, 12);
  const double alpha = default_alpha(5);
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < vs.size(); ++i) (i % 3 == 0 ? left : right).push_back(i);
  std::vector<std::size_t> uni;
  for (const auto* part : {&left, &right}) {
    const Spanner sp = build_d_spanner(vs.subset(*part), alpha);
    for (std::size_t j : sp.indices) uni.push_back((*part)[j]);
  }
  CHECK(verify_weak(vs, uni, alpha).ok);
}

TEST_CASE("appending a spanner vector does not grow the spanner") {
  VectorSet vs = sample_sphere(60, 4, 2);
  const double alpha = default_alpha(4);
  const Spanner sp = build_d_spanner(vs, alpha);
  vs.push_back(vs.vector(sp.indices.back()));
  const Spanner again = build_d_spanner(vs, alpha);
  CHECK(again.indices == sp.indices);
}

TEST_CASE("construction is deterministic") {
  const VectorSet vs = sample_sphere(120, 6, 77);
  const Spanner a = build_d_spanner(vs, default_alpha(6));
  const Spanner b = build_d_spanner(vs, default_alpha(6));
  CHECK(a.indices == b.indices);
  for (std::size_t i = 0; i < a.d_stage.size(); ++i) CHECK(a.d_stage[i].witness == b.d_stage[i].witness);
}
