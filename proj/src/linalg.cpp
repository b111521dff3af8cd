#include "miorder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace miorder {

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  HermitianMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

HermitianMatrix HermitianMatrix::from_entries(std::size_t dim, std::vector<cplx> entries,
                                              double tol) {
  if (entries.size() != dim * dim)
    throw invalid_input_error("matrix entries do not match dimension " + std::to_string(dim));
  HermitianMatrix m;
  m.dim_ = dim;
  m.a_ = std::move(entries);
  m.check_hermitian(tol);
  return m;
}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += a_[i * dim_ + i].real();
  return t;
}

double HermitianMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double HermitianMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      d = std::max(d, std::abs(a_[i * dim_ + j] - std::conj(a_[j * dim_ + i])));
  return d;
}

void HermitianMatrix::check_hermitian(double tol) const {
  double d = hermiticity_defect();
  if (d > tol)
    throw invalid_input_error("matrix is not Hermitian (defect " + std::to_string(d) + ")");
}

double HermitianMatrix::frobenius_distance(const HermitianMatrix& other) const {
  if (other.dim_ != dim_) throw invalid_input_error("dimension mismatch in frobenius_distance");
  double s = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) s += std::norm(a_[k] - other.a_[k]);
  return std::sqrt(s);
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  if (other.dim_ != dim_) throw invalid_input_error("dimension mismatch in operator+=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  for (cplx& v : a_) v *= s;
  return *this;
}

std::vector<cplx> EigenDecomposition::eigenvector(std::size_t col) const {
  std::vector<cplx> v(dim);
  for (std::size_t r = 0; r < dim; ++r) v[r] = vectors[r * dim + col];
  return v;
}

namespace {

double offdiag_frobenius(const std::vector<cplx>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += std::norm(a[i * n + j]);
  return std::sqrt(s);
}

// One Jacobi rotation zeroing a(p,q), p < q. Updates a and the accumulated
// eigenvector matrix v in place.
void rotate(std::vector<cplx>& a, std::vector<cplx>& v, std::size_t n, std::size_t p,
            std::size_t q) {
  const cplx apq = a[p * n + q];
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cplx phase = apq / mag;  // e^{i phi}

  const double app = a[p * n + p].real();
  const double aqq = a[q * n + q].real();
  const double tau = (aqq - app) / (2.0 * mag);
  // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0, which zeroes the
  // rotated (p, q) element for this transform convention.
  const double t = (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx sp = s * phase;        // s e^{i phi}
  const cplx spc = std::conj(sp);   // s e^{-i phi}

  // Columns: (A J) with J acting on columns p, q.
  for (std::size_t r = 0; r < n; ++r) {
    const cplx arp = a[r * n + p];
    const cplx arq = a[r * n + q];
    a[r * n + p] = c * arp + spc * arq;
    a[r * n + q] = -sp * arp + c * arq;
  }
  // Rows: (J^H A).
  for (std::size_t col = 0; col < n; ++col) {
    const cplx apc = a[p * n + col];
    const cplx aqc = a[q * n + col];
    a[p * n + col] = c * apc + sp * aqc;
    a[q * n + col] = -spc * apc + c * aqc;
  }
  // Clean the rotated pair: diagonals are real, target element is zero.
  a[p * n + p] = cplx(a[p * n + p].real(), 0.0);
  a[q * n + q] = cplx(a[q * n + q].real(), 0.0);
  a[p * n + q] = 0.0;
  a[q * n + p] = 0.0;

  // Accumulate eigenvectors: V <- V J.
  for (std::size_t r = 0; r < n; ++r) {
    const cplx vrp = v[r * n + p];
    const cplx vrq = v[r * n + q];
    v[r * n + p] = c * vrp + spc * vrq;
    v[r * n + q] = -sp * vrp + c * vrq;
  }
}

}  // namespace

EigenDecomposition eigh(const HermitianMatrix& m, double hermiticity_tol) {
  m.check_hermitian(hermiticity_tol);
  const std::size_t n = m.dim();
  if (n == 0) throw invalid_input_error("eigh: empty matrix");

  // Work on the symmetrized copy so sub-tolerance asymmetries cannot bias
  // the sweep.
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = 0.5 * (m(i, j) + std::conj(m(j, i)));

  std::vector<cplx> v(n * n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const double threshold = 1e-12 * static_cast<double>(n);
  constexpr int kMaxSweeps = 100;
  double off = offdiag_frobenius(a, n);
  int sweep = 0;
  while (off >= threshold) {
    if (sweep++ >= kMaxSweeps)
      throw convergence_error("eigh: Jacobi sweeps did not converge", off);
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, n, p, q);
    off = offdiag_frobenius(a, n);
  }

  // Sort descending; ties keep the original column order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x].real() > a[y * n + y].real();
  });

  EigenDecomposition d;
  d.dim = n;
  d.eigenvalues.resize(n);
  d.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    d.eigenvalues[k] = a[src * n + src].real();
    // Phase convention: largest-modulus component real-positive, ties broken
    // by lowest row index.
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double mag = std::abs(v[r * n + src]);
      if (mag > best + 1e-15) {
        best = mag;
        imax = r;
      }
    }
    cplx ref = v[imax * n + src];
    cplx factor = (std::abs(ref) > 0.0) ? std::conj(ref) / std::abs(ref) : cplx(1.0, 0.0);
    for (std::size_t r = 0; r < n; ++r) d.vectors[r * n + k] = v[r * n + src] * factor;
  }

  d.groups.resize(n);
  int g = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && d.eigenvalues[k - 1] - d.eigenvalues[k] >= kDegeneracyTol) ++g;
    d.groups[k] = g;
  }
  return d;
}

double entropy_bits(std::span<const double> p) {
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-12)
      throw invalid_input_error("entropy_bits: negative probability " + std::to_string(x));
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw invalid_input_error("entropy_bits: probabilities sum to " + std::to_string(sum));
  double s = 0.0;
  for (double x : p) {
    if (x <= 0.0) continue;  // clamp tiny negatives, 0 log 0 = 0
    s -= x * std::log2(x);
  }
  return s;
}

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  HermitianMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l)
          out(i * db + k, j * db + l) = aij * b(k, l);
    }
  return out;
}

double expectation(const HermitianMatrix& m, const HermitianMatrix& rho) {
  if (m.dim() != rho.dim())
    throw invalid_input_error("expectation: dimension mismatch (" + std::to_string(m.dim()) +
                              " vs " + std::to_string(rho.dim()) + ")");
  const std::size_t n = m.dim();
  cplx t = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t += rho(i, j) * m(j, i);
  if (std::abs(t.imag()) > 1e-10)
    throw numeric_error("expectation: imaginary residue " + std::to_string(t.imag()));
  return t.real();
}

HermitianMatrix pauli_x() {
  HermitianMatrix m(2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

HermitianMatrix pauli_y() {
  HermitianMatrix m(2);
  m(0, 1) = cplx(0.0, -1.0);
  m(1, 0) = cplx(0.0, 1.0);
  return m;
}

HermitianMatrix pauli_z() {
  HermitianMatrix m(2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace miorder
