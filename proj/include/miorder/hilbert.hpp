#pragma once

#include <cstdint>
#include <vector>

#include "miorder/linalg.hpp"

namespace miorder {

// Basis encoding contract, fixed globally: basis index b in [0, 2^N); bit s
// of b is 0 when site s is up and 1 when it is down; site 0 is the lowest
// bit. Chains are capped at 24 sites.
struct SpinBasis {
  int n_sites = 0;

  explicit SpinBasis(int n);
  std::uint64_t dim() const { return std::uint64_t{1} << n_sites; }
};

inline constexpr int kMaxSites = 24;
// Largest single-block local dimension handled by partial traces (2^8).
inline constexpr std::size_t kMaxBlockDim = 256;
// Largest combined site count for a joint two-block density matrix.
inline constexpr int kMaxJointSites = 8;

// Ordered list of distinct site indices. Within a block's local basis the
// first listed site carries the most significant bit, so concatenating two
// blocks reproduces the A-major ordering of kron.
class Block {
 public:
  explicit Block(std::vector<int> sites);
  static Block contiguous(int start, int size);

  const std::vector<int>& sites() const { return sites_; }
  int size() const { return static_cast<int>(sites_.size()); }
  bool overlaps(const Block& other) const;

 private:
  std::vector<int> sites_;
};

struct StateVector {
  int n_sites = 0;
  std::vector<cplx> amplitudes;

  StateVector() = default;
  StateVector(int n, std::vector<cplx> amp);
  std::uint64_t dim() const { return std::uint64_t{1} << n_sites; }
  double norm() const;
  void normalize();
  // Deterministic global phase: largest-modulus amplitude real-positive.
  void fix_phase();
};

// Hermitian, PSD, trace-1 matrix on a block Hilbert space. `sites` records
// the basis ordering: the first listed site is the most significant local
// bit (A-major for joint blocks).
struct DensityMatrix {
  HermitianMatrix mat;
  std::vector<int> sites;

  std::size_t dim() const { return mat.dim(); }
};

// Reduced density matrix of `block`, tracing out every other site.
DensityMatrix partial_trace(const StateVector& state, const Block& block);

// Joint RDM on blocks a and b (disjoint, combined size <= 8 sites); basis is
// A-major, consistent with kron(rdm_a, rdm_b).
DensityMatrix joint_rdm(const StateVector& state, const Block& a, const Block& b);

// Embeds `op` on the block sites (identity elsewhere). Output is not
// renormalized.
StateVector apply_local_operator(const StateVector& state, const HermitianMatrix& op,
                                 const Block& block);

inline double expectation(const HermitianMatrix& m, const DensityMatrix& rho) {
  return expectation(m, rho.mat);
}

// <state| op_on_block |state>, discarding an imaginary residue below 1e-10.
double expectation_on_state(const StateVector& state, const HermitianMatrix& op,
                            const Block& block);

}  // namespace miorder
