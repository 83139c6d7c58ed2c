#include "siws/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace siws {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(const std::vector<double>& d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix dimension mismatch in +");
  DenseMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + other.data_[i];
  return r;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix dimension mismatch in -");
  DenseMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - other.data_[i];
  return r;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& other) const {
  if (cols_ != other.rows_)
    throw std::invalid_argument("matrix dimension mismatch in *");
  DenseMatrix r(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) r(i, j) += a * other(k, j);
    }
  }
  return r;
}

DenseMatrix DenseMatrix::scaled(double c) const {
  DenseMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = c * data_[i];
  return r;
}

std::vector<double> DenseMatrix::apply(const std::vector<double>& v) const {
  if (v.size() != cols_) throw std::invalid_argument("vector dimension mismatch");
  std::vector<double> r(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
    r[i] = acc;
  }
  return r;
}

double DenseMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (double x : data_) acc += x * x;
  return std::sqrt(acc);
}

double DenseMatrix::max_abs() const {
  double acc = 0.0;
  for (double x : data_) acc = std::max(acc, std::abs(x));
  return acc;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

bool DenseMatrix::nonnegative() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x >= 0.0; });
}

namespace {

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

std::size_t iteration_cap(std::size_t dim, double tol) {
  const double steps = 100.0 * static_cast<double>(std::max<std::size_t>(dim, 2)) *
                       std::log(1.0 / std::max(tol, 1e-300));
  return static_cast<std::size_t>(steps) + 100;
}

// Deterministic start vector: all-ones with a slight tilt so that it is not
// orthogonal to the dominant eigenspace of symmetric matrices with sign-mixed
// eigenvectors.
std::vector<double> start_vector(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + 0.01 * static_cast<double>(i) / static_cast<double>(n + 1);
  normalize(v);
  return v;
}

// Rayleigh-quotient power iteration. Returns the dominant eigenvalue of m
// (assumed to have a real dominant eigenvalue, as is the case for nonnegative
// and for shifted symmetric matrices).
double power_iterate(const DenseMatrix& m, double tol, std::vector<double>* vec_out) {
  const std::size_t n = m.rows();
  std::vector<double> v = start_vector(n);
  double lambda = 0.0;
  double residual = 0.0;
  int settled = 0;
  const std::size_t cap = iteration_cap(n, tol);
  for (std::size_t it = 0; it < cap; ++it) {
    std::vector<double> mv = m.apply(v);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += v[i] * mv[i];
    const double next = num;  // v has unit norm
    const double mvn = norm2(mv);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = mv[i] - next * v[i];
      residual += d * d;
    }
    residual = std::sqrt(residual);
    if (mvn == 0.0) {
      // v is in the kernel; dominant action along this direction is zero.
      if (vec_out) *vec_out = v;
      return 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / mvn;
    const double scale = std::max(1.0, std::abs(next));
    if (std::abs(next - lambda) <= tol * scale) {
      if (++settled >= 3) {
        if (vec_out) *vec_out = v;
        return next;
      }
    } else {
      settled = 0;
    }
    lambda = next;
  }
  throw EigenFailure("power iteration did not converge", lambda, residual);
}

void strongconnect(std::size_t v, const std::vector<std::vector<std::size_t>>& adj,
                   std::vector<int>& index, std::vector<int>& lowlink,
                   std::vector<bool>& on_stack, std::vector<std::size_t>& stack,
                   int& counter, std::vector<std::vector<std::size_t>>& components) {
  // Iterative Tarjan, explicit call frames.
  struct Frame {
    std::size_t node;
    std::size_t edge = 0;
  };
  std::vector<Frame> frames{{v}};
  index[v] = lowlink[v] = counter++;
  stack.push_back(v);
  on_stack[v] = true;
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.edge < adj[f.node].size()) {
      const std::size_t w = adj[f.node][f.edge++];
      if (index[w] < 0) {
        index[w] = lowlink[w] = counter++;
        stack.push_back(w);
        on_stack[w] = true;
        frames.push_back({w});
      } else if (on_stack[w]) {
        lowlink[f.node] = std::min(lowlink[f.node], index[w]);
      }
    } else {
      if (lowlink[f.node] == index[f.node]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != f.node);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      const std::size_t done = f.node;
      frames.pop_back();
      if (!frames.empty())
        lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[done]);
    }
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> scc_condensation(
    const std::vector<std::vector<bool>>& support) {
  const std::size_t n = support.size();
  for (const auto& row : support)
    if (row.size() != n) throw std::invalid_argument("support matrix not square");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (support[i][j]) adj[i].push_back(j);
  std::vector<int> index(n, -1), lowlink(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  int counter = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0)
      strongconnect(v, adj, index, lowlink, on_stack, stack, counter, components);
  // Tarjan emits components in reverse topological order already.
  return components;
}

std::vector<std::vector<bool>> support_of(const DenseMatrix& m) {
  std::vector<std::vector<bool>> s(m.rows(), std::vector<bool>(m.cols(), false));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s[i][j] = m(i, j) != 0.0;
  return s;
}

double spectral_radius_nonneg(const DenseMatrix& m, double tol) {
  if (!m.square()) throw std::invalid_argument("spectral_radius_nonneg: matrix not square");
  if (tol <= 0.0) throw std::invalid_argument("spectral_radius_nonneg: tol must be > 0");
  if (!m.nonnegative())
    throw std::invalid_argument("spectral_radius_nonneg: matrix has a negative entry");
  const auto components = scc_condensation(support_of(m));
  double rho = 0.0;
  for (const auto& comp : components) {
    if (comp.size() == 1) {
      rho = std::max(rho, m(comp[0], comp[0]));
      continue;
    }
    DenseMatrix block(comp.size(), comp.size());
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = 0; b < comp.size(); ++b)
        block(a, b) = m(comp[a], comp[b]);
    // (block + I) is primitive for an irreducible nonnegative block, so power
    // iteration converges; the Perron root of block is the result minus 1.
    for (std::size_t a = 0; a < comp.size(); ++a) block(a, a) += 1.0;
    const double shifted = power_iterate(block, tol, nullptr);
    rho = std::max(rho, shifted - 1.0);
  }
  return std::max(rho, 0.0);
}

double induced2_norm(const DenseMatrix& m, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("induced2_norm: tol must be > 0");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const DenseMatrix gram = m.transpose() * m;
  if (gram.max_abs() == 0.0) return 0.0;
  const double lambda = power_iterate(gram, tol, nullptr);
  return std::sqrt(std::max(lambda, 0.0));
}

std::pair<double, double> symmetric_eigen_extrema(const DenseMatrix& s, double tol) {
  if (!s.square()) throw std::invalid_argument("symmetric_eigen_extrema: matrix not square");
  if (tol <= 0.0) throw std::invalid_argument("symmetric_eigen_extrema: tol must be > 0");
  const DenseMatrix st = s.transpose();
  const double asym = (s - st).frobenius_norm();
  const double scale = s.frobenius_norm();
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("symmetric_eigen_extrema: asymmetry beyond slack");
  DenseMatrix sym = (s + st).scaled(0.5);
  const std::size_t n = sym.rows();
  // Gershgorin-style shift: with c >= rho(sym), both sym + cI and cI - sym are
  // PSD and their dominant eigenvalues are lambda_max + c and c - lambda_min.
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(sym(i, j));
    c = std::max(c, row);
  }
  if (c == 0.0) return {0.0, 0.0};
  DenseMatrix up = sym;
  DenseMatrix down = sym.scaled(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    up(i, i) += c;
    down(i, i) += c;
  }
  const double lambda_max = power_iterate(up, tol, nullptr) - c;
  const double lambda_min = c - power_iterate(down, tol, nullptr);
  return {lambda_min, lambda_max};
}

LyapunovSolution solve_discrete_lyapunov(const DenseMatrix& m, double tol) {
  if (!m.square()) throw std::invalid_argument("solve_discrete_lyapunov: matrix not square");
  if (tol <= 0.0) throw std::invalid_argument("solve_discrete_lyapunov: tol must be > 0");
  const std::size_t n = m.rows();

  // Contraction pretest on repeated squarings: some power of a Schur-stable
  // matrix has small norm; unbounded growth means the series diverges.
  {
    DenseMatrix p = m;
    bool contracting = false;
    for (int j = 0; j < 40; ++j) {
      const double fn = p.frobenius_norm();
      if (fn < 0.999) {
        contracting = true;
        break;
      }
      if (fn > 1e8 || !p.all_finite())
        throw std::runtime_error("Lyapunov series divergent");
      p = p * p;
    }
    if (!contracting) throw std::runtime_error("Lyapunov series divergent");
  }

  const DenseMatrix mt = m.transpose();
  DenseMatrix q = DenseMatrix::identity(n);
  DenseMatrix term = DenseMatrix::identity(n);
  double prev_norm = term.frobenius_norm();
  double ratio = 0.0;
  std::size_t j = 0;
  for (;;) {
    term = mt * term * m;
    ++j;
    const double fn = term.frobenius_norm();
    if (prev_norm > 0.0) ratio = fn / prev_norm;
    prev_norm = fn;
    if (fn < tol) break;
    q = q + term;
    if (j > 200000) throw std::runtime_error("Lyapunov series divergent");
  }
  // Symmetrize away rounding drift from the triple products.
  q = (q + q.transpose()).scaled(0.5);
  const double tail = ratio < 1.0 ? prev_norm * ratio / (1.0 - ratio) : prev_norm;
  const DenseMatrix res = mt * q * m - q + DenseMatrix::identity(n);
  return {q, tail, res.frobenius_norm(), j};
}

PerronPair perron_pair(const DenseMatrix& m, double tol) {
  if (!m.square()) throw std::invalid_argument("perron_pair: matrix not square");
  DenseMatrix shifted = m;
  for (std::size_t i = 0; i < m.rows(); ++i) shifted(i, i) += 1.0;
  PerronPair out;
  out.value = power_iterate(shifted, tol, &out.right) - 1.0;
  power_iterate(shifted.transpose(), tol, &out.left);
  return out;
}

}  // namespace siws
