#pragma once

// Dense real linear algebra used by the spanner, determinant and design code.
//
// Everything here is a pure function of its arguments. Sizes are small (the
// library targets d up to a few hundred), so storage is plain std::vector and
// algorithms favour robustness and determinism over speed.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace specspan {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

/// Numerical thresholds for the linear-algebra kernel. All relative tolerances
/// are relative to the scale named in the field comment.
struct LinalgConfig {
  double jacobi_rel_threshold = 1e-12;  // off-diagonal Frobenius norm vs ||A||_F
  int jacobi_max_sweeps = 100;
  double psd_clamp_rel = 1e-8;    // negative eigenvalues within this * lambda_max are clamped
  double pinv_cutoff_rel = 1e-10; // eigenvalues below this * lambda_max are treated as zero
  double pinv_null_rel = 1e-7;    // allowed null-space component vs ||v||
  double gs_drop_rel = 1e-10;     // Gram-Schmidt residual threshold vs max input norm
};

double dot(VecView a, VecView b) noexcept;
double norm_sq(VecView a) noexcept;
double norm(VecView a) noexcept;
bool all_finite(VecView a) noexcept;
/// y += alpha * x
void axpy(double alpha, VecView x, std::span<double> y) noexcept;
Vec scaled(VecView a, double s);

/// Pairwise (cascade) summation; result does not depend on thread scheduling.
double pairwise_sum(std::span<const double> xs) noexcept;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  VecView row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  Vec column(std::size_t j) const;

  Matrix transpose() const;
  Vec apply(VecView x) const;  // this * x
  double frobenius_norm() const noexcept;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix stored as its packed upper triangle, so symmetry holds
/// exactly by construction.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

  static SymMat identity(std::size_t dim);
  static SymMat diagonal(VecView diag);
  /// Upper triangle of a square matrix; the lower triangle is ignored.
  static SymMat from_upper(const Matrix& full);
  /// sum_i w_i v_i v_i^T (w defaults to all ones).
  static SymMat gram_sum(std::span<const VecView> vectors, std::span<const double> weights = {});
  static SymMat outer(VecView v);

  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return packed_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) noexcept { return packed_[index(i, j)]; }

  /// this += w * v v^T
  void add_outer(VecView v, double w = 1.0) noexcept;

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double s) noexcept;
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }

  double frobenius_norm() const noexcept;
  double trace() const noexcept;
  double quad_form(VecView x) const noexcept;  // x^T A x
  Vec apply(VecView x) const;
  Matrix to_matrix() const;
  bool all_finite() const noexcept;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    // row i of the upper triangle starts after sum_{r<i} (dim - r) entries
    return i * dim_ - i * (i - 1) / 2 + (j - i);
  }

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

struct EigDecomp {
  Vec values;      // descending
  Matrix vectors;  // column i is the eigenvector for values[i]
  Vec eigenvector(std::size_t i) const { return vectors.column(i); }
};

/// Cyclic Jacobi eigendecomposition. Throws Error(Internal) if the sweep cap
/// is hit, which does not happen for finite symmetric input.
EigDecomp sym_eig(const SymMat& a, const LinalgConfig& cfg = {});
/// Eigenvalues only (descending); same algorithm without accumulating vectors.
Vec sym_eigenvalues(const SymMat& a, const LinalgConfig& cfg = {});

/// k-th elementary symmetric polynomial e_k(values); e_0 = 1.
double elementary_symmetric(VecView values, std::size_t k) noexcept;

/// Sum of all k x k principal minors, computed as e_k of the eigenvalues.
/// Throws KOutOfRange for k outside [1, d] and NotPsd for genuinely
/// indefinite input (lambda_min < -psd_clamp_rel * lambda_max).
double det_k(const SymMat& a, std::size_t k, const LinalgConfig& cfg = {});

/// Sum of the d-k+1 smallest eigenvalues of B - A.
double preceq_k_margin(const SymMat& a, const SymMat& b, std::size_t k, const LinalgConfig& cfg = {});

/// A <=_k B, i.e. <A,P> <= <B,P> for every rank d-k+1 projection P, checked
/// as sum_{i>=k} lambda_i(B-A) >= -tol * (1 + ||A||_F + ||B||_F).
bool preceq_k(const SymMat& a, const SymMat& b, std::size_t k, double tol, const LinalgConfig& cfg = {});

/// Component of v orthogonal to span(basis); basis must be orthonormal.
Vec project_orth(VecView v, std::span<const Vec> basis);

/// Orthonormal basis of span(vs) in input order. Vectors whose residual is at
/// most gs_drop_rel * max input norm are dropped.
std::vector<Vec> gram_schmidt(std::span<const Vec> vs, const LinalgConfig& cfg = {});
std::vector<Vec> gram_schmidt(std::span<const VecView> vs, const LinalgConfig& cfg = {});

/// v^T M^+ v, or nullopt when v has a null-space component of M larger than
/// pinv_null_rel * ||v||.
std::optional<double> pinv_quadform(const SymMat& m, VecView v, const LinalgConfig& cfg = {});

/// Squared volume of the parallelepiped spanned by `vectors`, i.e. the
/// determinant of their Gram matrix, which equals det_k(sum v v^T) for
/// k = vectors.size(). Zero on linear dependence.
double gram_volume_sq(std::span<const VecView> vectors);

/// Cholesky factorization of a symmetric positive definite matrix.
class Cholesky {
 public:
  /// nullopt if a pivot is not strictly positive.
  static std::optional<Cholesky> factor(const SymMat& a);

  Vec solve(VecView b) const;
  double log_det() const noexcept;

 private:
  Matrix lower_;
};

struct QrResult {
  Matrix q;
  Matrix r;
};

/// Householder QR of a square matrix: a = q * r, q orthogonal, r upper triangular.
QrResult householder_qr(const Matrix& a);

/// Determinant by LU with partial pivoting.
double determinant(Matrix a);

}  // namespace specspan
