#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace siws {

/// Dense real matrix, row-major. All numerics in this project are desk-scale
/// (a few hundred rows at most), so everything here favors determinism and
/// simplicity over speed.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const std::vector<double>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

  DenseMatrix transpose() const;
  DenseMatrix operator+(const DenseMatrix& other) const;
  DenseMatrix operator-(const DenseMatrix& other) const;
  DenseMatrix operator*(const DenseMatrix& other) const;
  DenseMatrix scaled(double c) const;

  std::vector<double> apply(const std::vector<double>& v) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;
  bool nonnegative() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Thrown when an eigen-iteration fails to converge within its cap.
/// Carries the last iterate value and residual for diagnostics.
class EigenFailure : public std::runtime_error {
 public:
  EigenFailure(const std::string& what, double last_value, double residual)
      : std::runtime_error(what), last_value(last_value), residual(residual) {}
  double last_value;
  double residual;
};

/// Strongly connected components of a directed support graph, in reverse
/// topological order (every edge leaves a later component toward an earlier
/// one in the returned list).
std::vector<std::vector<std::size_t>> scc_condensation(
    const std::vector<std::vector<bool>>& support);

/// Support graph of a matrix: edge i -> j iff entry (i, j) is nonzero.
std::vector<std::vector<bool>> support_of(const DenseMatrix& m);

/// Spectral radius of an entrywise nonnegative square matrix, to relative
/// tolerance tol. Reducible matrices are handled blockwise via SCC
/// condensation so exact zeros in the graph are respected; each irreducible
/// block gets power iteration on (block + I).
double spectral_radius_nonneg(const DenseMatrix& m, double tol = 1e-10);

/// Induced 2-norm, sqrt(lambda_max(M^T M)) via power iteration.
double induced2_norm(const DenseMatrix& m, double tol = 1e-10);

/// Extreme eigenvalues (min, max) of the symmetrized (S + S^T)/2. Rejects
/// inputs whose asymmetry exceeds 1e-12 * ||S||.
std::pair<double, double> symmetric_eigen_extrema(const DenseMatrix& s,
                                                  double tol = 1e-10);

struct LyapunovSolution {
  DenseMatrix q;        // I + sum_{j>=1} (M^T)^j M^j
  double tail_bound;    // bound on the truncated series tail
  double residual;      // ||M^T Q M - Q + I||_F of the returned Q
  std::size_t terms;    // number of series terms accumulated
};

/// Solves M^T Q M - Q = -I by geometric series summation. Requires a Schur
/// stable M; divergence (terms not contracting) is reported as an error.
LyapunovSolution solve_discrete_lyapunov(const DenseMatrix& m, double tol = 1e-12);

struct PerronPair {
  double value;                // spectral radius estimate
  std::vector<double> right;   // right eigenvector, nonnegative, unit 2-norm
  std::vector<double> left;    // left eigenvector, nonnegative, unit 2-norm
};

/// Dominant eigenvalue and left/right eigenvectors of a nonnegative matrix
/// via power iteration on (M + I) and its transpose.
PerronPair perron_pair(const DenseMatrix& m, double tol = 1e-10);

}  // namespace siws
