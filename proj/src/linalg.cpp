#include "specspan/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "specspan/error.hpp"

namespace specspan {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotFinite: return "NotFinite";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NotInSpan: return "NotInSpan";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::BadPartColumn: return "BadPartColumn";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::SamplingFailed: return "SamplingFailed";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

double dot(VecView a, VecView b) noexcept {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(VecView a) noexcept { return dot(a, a); }

double norm(VecView a) noexcept {
  // scale to avoid overflow for the large-M vectors of the hard instance
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : a) {
    const double y = x / scale;
    s += y * y;
  }
  return scale * std::sqrt(s);
}

bool all_finite(VecView a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

void axpy(double alpha, VecView x, std::span<double> y) noexcept {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec scaled(VecView a, double s) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

double pairwise_sum(std::span<const double> xs) noexcept {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// ---------------------------------------------------------------- Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::column(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Matrix::apply(VecView x) const {
  assert(x.size() == cols_);
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
  return y;
}

double Matrix::frobenius_norm() const noexcept { return norm(data_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix difference: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

// ---------------------------------------------------------------- SymMat

SymMat SymMat::identity(std::size_t dim) {
  SymMat m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMat SymMat::diagonal(VecView diag) {
  SymMat m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.at(i, i) = diag[i];
  return m;
}

SymMat SymMat::from_upper(const Matrix& full) {
  if (full.rows() != full.cols()) throw Error(ErrorCode::DimensionMismatch, "from_upper: matrix is not square");
  SymMat m(full.rows());
  for (std::size_t i = 0; i < full.rows(); ++i)
    for (std::size_t j = i; j < full.cols(); ++j) m.at(i, j) = full(i, j);
  return m;
}

SymMat SymMat::gram_sum(std::span<const VecView> vectors, std::span<const double> weights) {
  if (vectors.empty()) return SymMat();
  if (!weights.empty() && weights.size() != vectors.size())
    throw Error(ErrorCode::DimensionMismatch, "gram_sum: weight count differs from vector count");
  SymMat m(vectors.front().size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "gram_sum: ragged vectors");
    m.add_outer(vectors[i], weights.empty() ? 1.0 : weights[i]);
  }
  return m;
}

SymMat SymMat::outer(VecView v) {
  SymMat m(v.size());
  m.add_outer(v);
  return m;
}

void SymMat::add_outer(VecView v, double w) noexcept {
  assert(v.size() == dim_);
  std::size_t p = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double wi = w * v[i];
    for (std::size_t j = i; j < dim_; ++j) packed_[p++] += wi * v[j];
  }
}

SymMat& SymMat::operator+=(const SymMat& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "SymMat +=: dimensions differ");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] += o.packed_[i];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "SymMat -=: dimensions differ");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] -= o.packed_[i];
  return *this;
}

SymMat& SymMat::operator*=(double s) noexcept {
  for (double& x : packed_) x *= s;
  return *this;
}

double SymMat::frobenius_norm() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) {
      const double x = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * x * x;
    }
  return std::sqrt(s);
}

double SymMat::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMat::quad_form(VecView x) const noexcept {
  assert(x.size() == dim_);
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    s += (*this)(i, i) * x[i] * x[i];
    for (std::size_t j = i + 1; j < dim_; ++j) s += 2.0 * (*this)(i, j) * x[i] * x[j];
  }
  return s;
}

Vec SymMat::apply(VecView x) const {
  assert(x.size() == dim_);
  Vec y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

Matrix SymMat::to_matrix() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

bool SymMat::all_finite() const noexcept { return specspan::all_finite(packed_); }

// ---------------------------------------------------------------- eigen

namespace {

void jacobi(Matrix& a, Matrix* v, const LinalgConfig& cfg) {
  const std::size_t n = a.rows();
  const double threshold = cfg.jacobi_rel_threshold * a.frobenius_norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0;; ++sweep) {
    if (off_norm() <= threshold) return;
    if (sweep >= cfg.jacobi_max_sweeps)
      throw Error(ErrorCode::Internal, "sym_eig: Jacobi sweep cap exceeded");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        // the rotation annihilates a(p,q) exactly in exact arithmetic
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (v != nullptr) {
          for (std::size_t r = 0; r < n; ++r) {
            const double vrp = (*v)(r, p);
            const double vrq = (*v)(r, q);
            (*v)(r, p) = c * vrp - s * vrq;
            (*v)(r, q) = s * vrp + c * vrq;
          }
        }
      }
    }
  }
}

void check_finite(const SymMat& a) {
  if (!a.all_finite()) throw Error(ErrorCode::NotFinite, "symmetric matrix has non-finite entries");
}

}  // namespace

EigDecomp sym_eig(const SymMat& a, const LinalgConfig& cfg) {
  check_finite(a);
  const std::size_t n = a.dim();
  Matrix work = a.to_matrix();
  Matrix vecs = Matrix::identity(n);
  jacobi(work, &vecs, cfg);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return work(i, i) > work(j, j); });

  EigDecomp out{Vec(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = work(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = vecs(r, order[c]);
  }
  return out;
}

Vec sym_eigenvalues(const SymMat& a, const LinalgConfig& cfg) {
  check_finite(a);
  Matrix work = a.to_matrix();
  jacobi(work, nullptr, cfg);
  Vec values(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) values[i] = work(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double elementary_symmetric(VecView values, std::size_t k) noexcept {
  if (k > values.size()) return 0.0;
  Vec e(k + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t top = std::min(k, i + 1);
    for (std::size_t j = top; j >= 1; --j) e[j] += values[i] * e[j - 1];
  }
  return e[k];
}

double det_k(const SymMat& a, std::size_t k, const LinalgConfig& cfg) {
  if (k < 1 || k > a.dim()) throw Error(ErrorCode::KOutOfRange, "det_k: k must lie in [1, d]");
  Vec values = sym_eigenvalues(a, cfg);
  const double lmax = std::max(values.front(), 0.0);
  for (double& l : values) {
    if (l < 0.0) {
      if (l < -cfg.psd_clamp_rel * lmax) throw Error(ErrorCode::NotPsd, "det_k: matrix is not positive semidefinite");
      l = 0.0;
    }
  }
  return elementary_symmetric(values, k);
}

double preceq_k_margin(const SymMat& a, const SymMat& b, std::size_t k, const LinalgConfig& cfg) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "preceq_k: dimensions differ");
  if (k < 1 || k > a.dim()) throw Error(ErrorCode::KOutOfRange, "preceq_k: k must lie in [1, d]");
  const Vec values = sym_eigenvalues(b - a, cfg);
  double s = 0.0;
  for (std::size_t i = k - 1; i < values.size(); ++i) s += values[i];
  return s;
}

bool preceq_k(const SymMat& a, const SymMat& b, std::size_t k, double tol, const LinalgConfig& cfg) {
  if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "preceq_k: tolerance must be nonnegative");
  const double margin = preceq_k_margin(a, b, k, cfg);
  return margin >= -tol * (1.0 + a.frobenius_norm() + b.frobenius_norm());
}

// ---------------------------------------------------------------- projections

Vec project_orth(VecView v, std::span<const Vec> basis) {
  Vec r(v.begin(), v.end());
  for (const Vec& b : basis) {
    if (b.size() != r.size()) throw Error(ErrorCode::DimensionMismatch, "project_orth: basis dimension differs");
    axpy(-dot(r, b), b, r);
  }
  return r;
}

std::vector<Vec> gram_schmidt(std::span<const VecView> vs, const LinalgConfig& cfg) {
  double max_norm = 0.0;
  for (VecView v : vs) max_norm = std::max(max_norm, norm(v));
  std::vector<Vec> basis;
  if (max_norm == 0.0) return basis;
  const double drop = cfg.gs_drop_rel * max_norm;
  for (VecView v : vs) {
    if (!basis.empty() && v.size() != basis.front().size())
      throw Error(ErrorCode::DimensionMismatch, "gram_schmidt: ragged vectors");
    // two passes of modified Gram-Schmidt keep the basis orthonormal to roundoff
    Vec r = project_orth(v, basis);
    r = project_orth(r, basis);
    const double rn = norm(r);
    if (rn <= drop) continue;
    for (double& x : r) x /= rn;
    basis.push_back(std::move(r));
  }
  return basis;
}

std::vector<Vec> gram_schmidt(std::span<const Vec> vs, const LinalgConfig& cfg) {
  std::vector<VecView> views(vs.begin(), vs.end());
  return gram_schmidt(std::span<const VecView>(views), cfg);
}

std::optional<double> pinv_quadform(const SymMat& m, VecView v, const LinalgConfig& cfg) {
  if (m.dim() != v.size()) throw Error(ErrorCode::DimensionMismatch, "pinv_quadform: dimensions differ");
  const EigDecomp eig = sym_eig(m, cfg);
  const double lmax = std::max(eig.values.empty() ? 0.0 : eig.values.front(), 0.0);
  const double cutoff = cfg.pinv_cutoff_rel * lmax;
  double range_part = 0.0;
  double null_sq = 0.0;
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    double c = 0.0;
    for (std::size_t r = 0; r < v.size(); ++r) c += eig.vectors(r, i) * v[r];
    if (lmax > 0.0 && eig.values[i] > cutoff)
      range_part += c * c / eig.values[i];
    else
      null_sq += c * c;
  }
  if (std::sqrt(null_sq) > cfg.pinv_null_rel * norm(v)) return std::nullopt;
  return range_part;
}

double gram_volume_sq(std::span<const VecView> vectors) {
  std::vector<Vec> basis;
  basis.reserve(vectors.size());
  double vol = 1.0;
  for (VecView v : vectors) {
    Vec r = project_orth(v, basis);
    r = project_orth(r, basis);
    const double rn = norm(r);
    if (rn == 0.0) return 0.0;
    vol *= rn * rn;
    for (double& x : r) x /= rn;
    basis.push_back(std::move(r));
  }
  return vol;
}

// ---------------------------------------------------------------- factorizations

std::optional<Cholesky> Cholesky::factor(const SymMat& a) {
  const std::size_t n = a.dim();
  Cholesky c;
  c.lower_ = Matrix(n, n);
  Matrix& l = c.lower_;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / ljj;
    }
  }
  return c;
}

Vec Cholesky::solve(VecView b) const {
  const std::size_t n = lower_.rows();
  assert(b.size() == n);
  Vec y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < i; ++p) y[i] -= lower_(i, p) * y[p];
    y[i] /= lower_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t p = i + 1; p < n; ++p) y[i] -= lower_(p, i) * y[p];
    y[i] /= lower_(i, i);
  }
  return y;
}

double Cholesky::log_det() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < lower_.rows(); ++i) s += 2.0 * std::log(lower_(i, i));
  return s;
}

QrResult householder_qr(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "householder_qr: matrix is not square");
  const std::size_t n = a.rows();
  Matrix r = a;
  Matrix q = Matrix::identity(n);
  Vec w(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double col_norm_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) col_norm_sq += r(i, k) * r(i, k);
    const double col_norm = std::sqrt(col_norm_sq);
    if (col_norm == 0.0) continue;
    const double alpha = -std::copysign(col_norm, r(k, k));
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = k; i < n; ++i) w[i] = r(i, k);
    w[k] -= alpha;
    double wn_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) wn_sq += w[i] * w[i];
    if (wn_sq == 0.0) continue;
    // r <- (I - 2 w w^T / w^T w) r
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += w[i] * r(i, j);
      s *= 2.0 / wn_sq;
      for (std::size_t i = k; i < n; ++i) r(i, j) -= s * w[i];
    }
    // q <- q (I - 2 w w^T / w^T w)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k; j < n; ++j) s += q(i, j) * w[j];
      s *= 2.0 / wn_sq;
      for (std::size_t j = k; j < n; ++j) q(i, j) -= s * w[j];
    }
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) r(i, j) = 0.0;
  return {std::move(q), std::move(r)};
}

double determinant(Matrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "determinant: matrix is not square");
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace specspan
