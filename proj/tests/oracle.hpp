#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check: dense Hamiltonians assembled from Kronecker chains and
// diagonalized with Eigen, plus index-map partial traces.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <complex>
#include <random>
#include <vector>

#include "miorder/models.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

inline MatrixXd kron_dense(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// I_high (x) op(site_hi) (x) I_mid (x) op(site_lo) (x) I_low with site 0 as
// the lowest bit of the basis index.
inline MatrixXd two_site_chain(int n, int si, const MatrixXd& oi, int sj, const MatrixXd& oj) {
  int lo = si, hi = sj;
  MatrixXd op_lo = oi, op_hi = oj;
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(op_lo, op_hi);
  }
  const auto dim = [](int sites) { return Eigen::Index{1} << sites; };
  MatrixXd m = MatrixXd::Identity(dim(n - 1 - hi), dim(n - 1 - hi));
  m = kron_dense(m, op_hi);
  m = kron_dense(m, MatrixXd::Identity(dim(hi - lo - 1), dim(hi - lo - 1)));
  m = kron_dense(m, op_lo);
  m = kron_dense(m, MatrixXd::Identity(dim(lo), dim(lo)));
  return m;
}

// Dense real H; the sigma_y sigma_y part enters through the real matrix
// i*sigma_y at both sites.
inline MatrixXd dense_hamiltonian(const miorder::SpinChainModel& model) {
  const int n = model.n_sites;
  const Eigen::Index dim = Eigen::Index{1} << n;
  MatrixXd sx(2, 2), isy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  isy << 0, 1, -1, 0;
  sz << 1, 0, 0, -1;
  MatrixXd h = MatrixXd::Zero(dim, dim);
  for (const miorder::Bond& b : model.bonds) {
    h += (b.jx / 4.0) * two_site_chain(n, b.i, sx, b.j, sx);
    h -= (b.jy / 4.0) * two_site_chain(n, b.i, isy, b.j, isy);
    h += (b.jz / 4.0) * two_site_chain(n, b.i, sz, b.j, sz);
  }
  return h;
}

struct DenseGround {
  double energy = 0.0;
  std::vector<cplx> state;  // full 2^N amplitudes
  double gap = 0.0;         // E1 - E0 over the diagonalized space
};

inline DenseGround dense_ground_state(const miorder::SpinChainModel& model) {
  const MatrixXd h = dense_hamiltonian(model);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h);
  DenseGround g;
  g.energy = solver.eigenvalues()(0);
  g.gap = solver.eigenvalues()(1) - solver.eigenvalues()(0);
  const VectorXd v = solver.eigenvectors().col(0);
  g.state.assign(v.data(), v.data() + v.size());
  return g;
}

// Ground state restricted to the popcount-(N/2) sector of the dense H;
// valid when the model conserves Sz and its ground state sits there.
inline DenseGround dense_ground_state_sz0(const miorder::SpinChainModel& model) {
  const MatrixXd h = dense_hamiltonian(model);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < h.rows(); ++b)
    if (std::popcount(static_cast<std::uint64_t>(b)) == model.n_sites / 2) idx.push_back(b);
  const auto m = static_cast<Eigen::Index>(idx.size());
  MatrixXd hs(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) hs(r, c) = h(idx[r], idx[c]);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(hs);
  DenseGround g;
  g.energy = solver.eigenvalues()(0);
  g.gap = solver.eigenvalues()(1) - solver.eigenvalues()(0);
  g.state.assign(static_cast<std::size_t>(h.rows()), cplx(0.0, 0.0));
  for (Eigen::Index r = 0; r < m; ++r) g.state[idx[r]] = solver.eigenvectors()(r, 0);
  return g;
}

// Reference reduced density matrix over an ordered site list (first site is
// the most significant local bit), built from an explicit (block, rest)
// index map.
inline MatrixXcd reference_rdm(const std::vector<cplx>& amplitudes, int n,
                               const std::vector<int>& sites) {
  const int m = static_cast<int>(sites.size());
  const std::size_t d = std::size_t{1} << m;
  const std::size_t rest_dim = (std::size_t{1} << n) >> m;
  std::vector<std::vector<std::size_t>> index(rest_dim, std::vector<std::size_t>(d));
  std::vector<std::size_t> rest_seen;
  rest_seen.reserve(rest_dim);
  std::vector<int> rest_sites;
  for (int s = 0; s < n; ++s)
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) rest_sites.push_back(s);
  for (std::size_t g = 0; g < (std::size_t{1} << n); ++g) {
    std::size_t a = 0;
    for (int k = 0; k < m; ++k)
      if ((g >> sites[static_cast<std::size_t>(k)]) & 1u) a |= std::size_t{1} << (m - 1 - k);
    std::size_t e = 0;
    for (std::size_t k = 0; k < rest_sites.size(); ++k)
      if ((g >> rest_sites[k]) & 1u) e |= std::size_t{1} << k;
    index[e][a] = g;
  }
  MatrixXcd rho = MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t e = 0; e < rest_dim; ++e)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            amplitudes[index[e][i]] * std::conj(amplitudes[index[e][j]]);
  return rho;
}

inline double reference_entropy_bits(const MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double p = solver.eigenvalues()(k);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

inline double reference_mutual_information(const std::vector<cplx>& amplitudes, int n,
                                           const std::vector<int>& a,
                                           const std::vector<int>& b) {
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  return reference_entropy_bits(reference_rdm(amplitudes, n, a)) +
         reference_entropy_bits(reference_rdm(amplitudes, n, b)) -
         reference_entropy_bits(reference_rdm(amplitudes, n, ab));
}

// Deterministic uniform in [0, 1); mt19937_64 output is pinned by the
// standard, distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }
  cplx complex_unit_box() { return {symmetric(), symmetric()}; }

 private:
  std::mt19937_64 rng_;
};

inline miorder::HermitianMatrix random_hermitian(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  miorder::HermitianMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = rng.symmetric();
    for (std::size_t j = i + 1; j < dim; ++j) {
      const cplx v = rng.complex_unit_box();
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

inline miorder::StateVector random_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> amp(std::size_t{1} << n);
  for (cplx& a : amp) a = rng.complex_unit_box();
  miorder::StateVector state(n, std::move(amp));
  state.normalize();
  return state;
}

inline miorder::StateVector random_product_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<cplx, 2>> spinors(static_cast<std::size_t>(n));
  for (auto& s : spinors) {
    s = {rng.complex_unit_box(), rng.complex_unit_box()};
    const double norm = std::sqrt(std::norm(s[0]) + std::norm(s[1]));
    s[0] /= norm;
    s[1] /= norm;
  }
  std::vector<cplx> amp(std::size_t{1} << n);
  for (std::size_t b = 0; b < amp.size(); ++b) {
    cplx v = 1.0;
    for (int site = 0; site < n; ++site) v *= spinors[static_cast<std::size_t>(site)][(b >> site) & 1u];
    amp[b] = v;
  }
  miorder::StateVector state(n, std::move(amp));
  state.normalize();
  return state;
}

inline miorder::StateVector random_sector_state(int n, int n_down, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> amp(std::size_t{1} << n, cplx(0.0, 0.0));
  for (std::uint64_t b : miorder::sz_sector_states(n, n_down)) amp[b] = rng.complex_unit_box();
  miorder::StateVector state(n, std::move(amp));
  state.normalize();
  return state;
}

}  // namespace oracle
