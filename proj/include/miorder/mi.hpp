#pragma once

#include <optional>
#include <vector>

#include "miorder/hilbert.hpp"

namespace miorder {

struct MIPoint {
  int r = 0;
  double mi_bits = 0.0;
};

struct MIProfile {
  int block_size = 0;
  std::vector<MIPoint> points;
  // Verdict at the largest computed distance.
  bool long_range = false;
  double threshold = 0.0;
  int long_distance = 0;
};

// S(i|j) = S(rho_i) + S(rho_j) - S(rho_ij) in bits.
double mutual_information(const StateVector& state, const Block& a, const Block& b);

// MI between the m-site block at `anchor` and its translate at each listed
// distance (block starts anchor and anchor+r; no wrap-around).
MIProfile mi_profile(const StateVector& state, int block_size, int anchor,
                     std::span<const int> distances, double threshold = 1e-3);

struct MinBlockScan {
  std::optional<int> min_block_size;
  // Full m-by-r table, one profile per scanned block size.
  std::vector<MIProfile> profiles;
  int long_distance = 0;
  double threshold = 0.0;
};

// Smallest block size m in [1, max_m] whose MI at distance floor(N/2)
// exceeds the threshold.
MinBlockScan min_block_scan(const StateVector& state, int max_m, double threshold = 1e-3);

// Doubly stochastic matrix of squared overlaps between the joint-RDM
// eigenvectors (columns) and the product-basis eigenvectors (rows, A-major).
struct PMatrix {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::vector<double> entries;  // row-major (dim_a*dim_b)^2

  std::size_t dim() const { return dim_a * dim_b; }
  double operator()(std::size_t row, std::size_t col) const { return entries[row * dim() + col]; }
  double row_sum(std::size_t row) const;
  double col_sum(std::size_t col) const;
};

PMatrix p_matrix(const DensityMatrix& rdm_a, const DensityMatrix& rdm_b,
                 const DensityMatrix& rdm_joint);
PMatrix p_matrix(const EigenDecomposition& modes_a, const EigenDecomposition& modes_b,
                 const EigenDecomposition& modes_joint);

}  // namespace miorder
