#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "miorder/errors.hpp"

namespace miorder {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Construction from raw entries checks
// Hermiticity; in-place accumulation (partial traces, operator synthesis)
// uses the unchecked element access and is Hermitian by construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static HermitianMatrix identity(std::size_t dim);
  // Validates entries[i*dim+j] == conj(entries[j*dim+i]) within tol.
  static HermitianMatrix from_entries(std::size_t dim, std::vector<cplx> entries,
                                      double tol = 1e-12);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  std::span<const cplx> entries() const { return a_; }
  std::span<cplx> entries_mut() { return a_; }

  double trace() const;
  double max_abs() const;
  // max_ij |a_ij - conj(a_ji)|
  double hermiticity_defect() const;
  void check_hermitian(double tol = 1e-12) const;
  double frobenius_distance(const HermitianMatrix& other) const;

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

// Eigenvalues sorted descending; column k of `vectors` is the eigenvector of
// eigenvalues[k]. `groups[k]` labels clusters of (near-)degenerate
// eigenvalues; eigenvectors are individually meaningful only across group
// boundaries.
struct EigenDecomposition {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;
  std::vector<cplx> vectors;  // row-major dim x dim
  std::vector<int> groups;

  cplx vec(std::size_t row, std::size_t col) const { return vectors[row * dim + col]; }
  std::vector<cplx> eigenvector(std::size_t col) const;
};

// Cyclic Jacobi eigensolver for dense Hermitian matrices. Deterministic:
// fixed sweep order, eigenvector phase fixed by making the largest-modulus
// component real-positive (ties broken by lowest index). Converged when the
// off-diagonal Frobenius norm drops below 1e-12 * dim.
EigenDecomposition eigh(const HermitianMatrix& m, double hermiticity_tol = 1e-12);

// Threshold used to cluster eigenvalues into degenerate groups.
inline constexpr double kDegeneracyTol = 1e-9;

// Von Neumann entropy in bits: -sum p log2 p with 0 log2 0 := 0. Requires
// p_i >= -1e-12 and sum(p) = 1 +- 1e-10; tiny negatives are clamped to zero.
double entropy_bits(std::span<const double> p);

// Tensor product with A-major index ordering: index = mu * dim(b) + nu.
HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b);

// tr(rho * m); the imaginary residue must stay below 1e-10 and is discarded.
double expectation(const HermitianMatrix& m, const HermitianMatrix& rho);

// Pauli matrices in the (up, down) basis; up maps to +1 under sigma_z.
HermitianMatrix pauli_x();
HermitianMatrix pauli_y();
HermitianMatrix pauli_z();

}  // namespace miorder
