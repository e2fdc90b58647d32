#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "specspan/error.hpp"
#include "specspan/linalg.hpp"
#include "specspan/rng.hpp"

using namespace specspan;

namespace {

Vec random_vec(std::size_t d, Rng& rng) {
  Vec v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

std::vector<Vec> random_orthonormal(std::size_t d, std::size_t n, Rng& rng) {
  std::vector<Vec> raw;
  for (std::size_t i = 0; i < n; ++i) raw.push_back(random_vec(d, rng));
  return gram_schmidt(std::span<const Vec>(raw));
}

}  // namespace

TEST_CASE("sym_eig on identity and diagonal input") {
  const auto id = sym_eig(SymMat::identity(3));
  for (double l : id.values) CHECK(l == doctest::Approx(1.0));

  const Vec diag{3, 1, 2};
  const auto e = sym_eig(SymMat::diagonal(diag));
  CHECK(e.values[0] == doctest::Approx(3.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random Gram matrices") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymMat a = oracle::random_gram(5, 7, seed);
    const auto e = sym_eig(a);
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    SymMat rec(5);
    for (std::size_t i = 0; i < 5; ++i) rec.add_outer(e.eigenvector(i), e.values[i]);
    CHECK((rec - a).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    const Matrix wtw = e.vectors.transpose() * e.vectors;
    CHECK((wtw - Matrix::identity(5)).frobenius_norm() <= 1e-9);
  }
}

TEST_CASE("sym_eig rejects non-finite input") {
  SymMat a(2);
  a.at(0, 1) = std::nan("");
  CHECK_THROWS_AS(sym_eig(a), Error);
}

TEST_CASE("det_k small cases") {
  CHECK(det_k(SymMat::identity(3), 2) == doctest::Approx(3.0));
  const Vec diag{1, 2, 3};
  CHECK(det_k(SymMat::diagonal(diag), 2) == doctest::Approx(11.0));
  CHECK(det_k(SymMat::diagonal(diag), 3) == doctest::Approx(6.0));
  CHECK(det_k(SymMat::diagonal(diag), 1) == doctest::Approx(6.0));
}

TEST_CASE("det_k matches the principal-minor oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t d = 1 + seed % 6;
    const SymMat a = oracle::random_gram(d, d + 1, seed);
    for (std::size_t k = 1; k <= d; ++k)
      CHECK(oracle::rel_err(det_k(a, k), oracle::principal_minor_sum(a, k)) <= 1e-8);
  }
}

TEST_CASE("det_k range and PSD checks") {
  const SymMat a = SymMat::identity(3);
  CHECK_THROWS_AS(det_k(a, 0), Error);
  try {
    det_k(a, 4);
    FAIL("expected KOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KOutOfRange);
  }
  const Vec indefinite{1.0, -0.5};
  try {
    det_k(SymMat::diagonal(indefinite), 1);
    FAIL("expected NotPsd");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPsd);
  }
  // roundoff-sized negative eigenvalues are clamped
  const Vec nearly{1.0, -1e-12};
  CHECK(det_k(SymMat::diagonal(nearly), 2) == 0.0);
}

TEST_CASE("elementary_symmetric recurrence") {
  const Vec x{1, 2, 3, 4};
  CHECK(elementary_symmetric(x, 0) == 1.0);
  CHECK(elementary_symmetric(x, 1) == doctest::Approx(10.0));
  CHECK(elementary_symmetric(x, 2) == doctest::Approx(35.0));
  CHECK(elementary_symmetric(x, 3) == doctest::Approx(50.0));
  CHECK(elementary_symmetric(x, 4) == doctest::Approx(24.0));
  CHECK(elementary_symmetric(x, 5) == 0.0);
}

TEST_CASE("preceq_k examples") {
  const Vec da{1, 0}, db{0, 2};
  const SymMat a = SymMat::diagonal(da), b = SymMat::diagonal(db);
  CHECK(preceq_k(a, b, 1, 0.0));
  CHECK_FALSE(preceq_k(a, b, 2, 0.0));
  CHECK_THROWS_AS(preceq_k(a, SymMat::identity(3), 1, 0.0), Error);

  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const SymMat x = oracle::random_symmetric(5, 100 + t);
    SymMat y = x;
    y.add_outer(random_vec(5, rng));
    for (std::size_t k = 1; k <= 5; ++k) CHECK(preceq_k(x, y, k, 1e-12));
  }
}

TEST_CASE("preceq_k with k = d agrees with a direct PSD check") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const SymMat a = oracle::random_gram(4, 3, seed);
    const SymMat b = oracle::random_gram(4, 5, seed + 1000);
    // PSD oracle: B - A + tol I admits a Cholesky factorization iff
    // lambda_min(B - A) > -tol (for all tiny tol alike)
    const double tol = 1e-9 * (1.0 + a.frobenius_norm() + b.frobenius_norm());
    const bool psd = Cholesky::factor(b - a + tol * SymMat::identity(4)).has_value();
    CHECK(preceq_k(a, b, 4, 1e-9) == psd);
  }
}

TEST_CASE("preceq_k_margin sums the trailing eigenvalues of B - A") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SymMat a = oracle::random_symmetric(5, seed);
    const SymMat b = oracle::random_symmetric(5, seed + 50);
    const Vec ev = sym_eigenvalues(b - a);
    for (std::size_t k = 1; k <= 5; ++k) {
      double s = 0.0;
      for (std::size_t i = k - 1; i < 5; ++i) s += ev[i];
      CHECK(preceq_k_margin(a, b, k) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("extremal partial trace bound") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 6;
    const SymMat l = oracle::random_symmetric(d, 300 + t);
    const Vec ev = sym_eigenvalues(l);
    for (std::size_t n = 1; n <= d; ++n) {
      const auto xs = random_orthonormal(d, n, rng);
      double lhs = 0.0;
      for (const Vec& x : xs) lhs += l.quad_form(x);
      double rhs = 0.0;
      for (std::size_t i = d - n; i < d; ++i) rhs += ev[i];
      CHECK(lhs >= rhs - 1e-9);
    }
  }
}

TEST_CASE("projection of a sum is at most twice the projection of the parts") {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 5;
    const Vec u = random_vec(d, rng), v = random_vec(d, rng);
    const auto basis = random_orthonormal(d, 1 + t % d, rng);
    auto energy = [&](const Vec& x) {
      double s = 0.0;
      for (const Vec& b : basis) s += dot(b, x) * dot(b, x);
      return s;
    };
    Vec w = u;
    axpy(1.0, v, w);
    CHECK(energy(w) <= 2.0 * (energy(u) + energy(v)) + 1e-9);
  }
}

TEST_CASE("project_orth") {
  const std::vector<Vec> e1{{1, 0, 0}};
  const Vec v1{1, 0, 0};
  for (double x : project_orth(v1, e1)) CHECK(x == 0.0);
  const Vec v2{1, 1, 0};
  const Vec r = project_orth(v2, e1);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 0.0);

  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto basis = random_orthonormal(6, 3, rng);
    const Vec p = project_orth(random_vec(6, rng), basis);
    for (const Vec& b : basis) CHECK(std::abs(dot(p, b)) <= 1e-10);
  }
}

TEST_CASE("gram_schmidt") {
  const std::vector<Vec> dup{{1, 0}, {1, 0}, {0, 1}};
  const auto q = gram_schmidt(std::span<const Vec>(dup));
  REQUIRE(q.size() == 2);
  CHECK(q[0][0] == doctest::Approx(1.0));
  CHECK(q[1][1] == doctest::Approx(1.0));

  const std::vector<Vec> two{{2, 0}};
  const auto n = gram_schmidt(std::span<const Vec>(two));
  REQUIRE(n.size() == 1);
  CHECK(n[0][0] == doctest::Approx(1.0));

  Rng rng(8);
  std::vector<Vec> five;
  for (int i = 0; i < 5; ++i) five.push_back(random_vec(3, rng));
  const auto b = gram_schmidt(std::span<const Vec>(five));
  REQUIRE(b.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(dot(b[i], b[j]) - (i == j ? 1.0 : 0.0)) <= 1e-9);
}

TEST_CASE("pinv_quadform") {
  const Vec e1{1, 0}, e2{0, 1};
  CHECK(*pinv_quadform(SymMat::identity(2), e1) == doctest::Approx(1.0));
  const Vec d20{2, 0};
  CHECK(*pinv_quadform(SymMat::diagonal(d20), e1) == doctest::Approx(0.5));
  CHECK_FALSE(pinv_quadform(SymMat::diagonal(d20), e2).has_value());

  // against a Cholesky solve on full-rank input
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymMat a = oracle::random_gram(4, 6, seed);
    Rng rng(seed);
    const Vec v = random_vec(4, rng);
    const auto ch = Cholesky::factor(a);
    REQUIRE(ch);
    CHECK(oracle::rel_err(*pinv_quadform(a, v), dot(v, ch->solve(v))) <= 1e-9);
  }
}

TEST_CASE("gram_volume_sq equals the Gram determinant") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto vs = oracle::gaussian_set(4, 5, seed);
    std::vector<std::size_t> idx{0, 1, 2, 3};
    const auto views = vs.views(idx);
    CHECK(oracle::rel_err(gram_volume_sq(views), oracle::gram_det(vs, idx)) <= 1e-10);
  }
  VectorSet dep(2);
  dep.push_back(Vec{1, 0});
  dep.push_back(Vec{2, 0});
  CHECK(gram_volume_sq(dep.views()) == 0.0);
}

TEST_CASE("Cauchy-Binet on small instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const std::size_t n = d + 1 + seed % 3;
    const auto vs = oracle::gaussian_set(n, d, seed);
    for (std::size_t k = 1; k <= d; ++k) {
      double sum = 0.0;
      oracle::for_each_subset(n, k, [&](const std::vector<std::size_t>& s) { sum += oracle::gram_det(vs, s); });
      CHECK(oracle::rel_err(det_k(vs.gram_sum(), k), sum) <= 1e-6);
    }
  }
}

TEST_CASE("householder_qr and determinant") {
  Rng rng(9);
  Matrix a(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) a(i, j) = rng.normal();
  const auto [q, r] = householder_qr(a);
  CHECK((q.transpose() * q - Matrix::identity(5)).frobenius_norm() <= 1e-12);
  CHECK((q * r - a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(r(i, j) == 0.0);

  oracle::Dense dense(5, std::vector<double>(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) dense[i][j] = a(i, j);
  CHECK(oracle::rel_err(determinant(a), oracle::cofactor_det(dense)) <= 1e-10);
}

TEST_CASE("Cholesky solve and log_det") {
  const SymMat a = oracle::random_gram(4, 8, 3);
  const auto ch = Cholesky::factor(a);
  REQUIRE(ch);
  const Vec b{1, 2, 3, 4};
  const Vec x = ch->solve(b);
  const Vec ax = a.apply(x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-10));
  CHECK(std::exp(ch->log_det()) == doctest::Approx(oracle::cofactor_det(oracle::dense(a))).epsilon(1e-10));
  CHECK_FALSE(Cholesky::factor(SymMat(2)).has_value());
}

TEST_CASE("pairwise_sum and vector helpers") {
  const Vec xs{0.5, 0.25, 0.125, 0.125, 1.0};
  CHECK(pairwise_sum(xs) == 2.0);
  CHECK(pairwise_sum(Vec{}) == 0.0);
  const Vec big{1e200, 1e200};
  CHECK(std::isfinite(norm(big)));
  CHECK(norm(big) == doctest::Approx(std::sqrt(2.0) * 1e200));
}

TEST_CASE("SymMat packed storage is symmetric by construction") {
  SymMat a(4);
  a.at(1, 3) = 5.0;
  CHECK(a(3, 1) == 5.0);
  a.at(3, 2) = -1.0;
  CHECK(a(2, 3) == -1.0);
  const Matrix m = a.to_matrix();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(m(i, j) == m(j, i));
}
