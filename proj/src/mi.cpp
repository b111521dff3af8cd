#include "miorder/mi.hpp"

#include <cmath>

namespace miorder {

double mutual_information(const StateVector& state, const Block& a, const Block& b) {
  const DensityMatrix rho_a = partial_trace(state, a);
  const DensityMatrix rho_b = partial_trace(state, b);
  const DensityMatrix rho_ab = joint_rdm(state, a, b);
  const double sa = entropy_bits(eigh(rho_a.mat).eigenvalues);
  const double sb = entropy_bits(eigh(rho_b.mat).eigenvalues);
  const double sab = entropy_bits(eigh(rho_ab.mat).eigenvalues);
  return sa + sb - sab;
}

MIProfile mi_profile(const StateVector& state, int block_size, int anchor,
                     std::span<const int> distances, double threshold) {
  if (block_size < 1) throw invalid_input_error("block size must be positive");
  MIProfile profile;
  profile.block_size = block_size;
  profile.threshold = threshold;
  const Block a = Block::contiguous(anchor, block_size);
  for (int r : distances) {
    if (r < block_size)
      throw invalid_input_error("distance " + std::to_string(r) +
                                " makes the blocks overlap (block size " +
                                std::to_string(block_size) + ")");
    if (anchor + r + block_size > state.n_sites)
      throw invalid_input_error("distance " + std::to_string(r) + " does not fit on the chain");
    const Block b = Block::contiguous(anchor + r, block_size);
    profile.points.push_back(MIPoint{r, mutual_information(state, a, b)});
    profile.long_distance = std::max(profile.long_distance, r);
  }
  for (const MIPoint& p : profile.points)
    if (p.r == profile.long_distance) profile.long_range = p.mi_bits > threshold;
  return profile;
}

MinBlockScan min_block_scan(const StateVector& state, int max_m, double threshold) {
  const int long_distance = state.n_sites / 2;
  if (max_m < 1) throw invalid_input_error("max_m must be positive");
  if (2 * max_m > kMaxJointSites)
    throw capacity_error("max_m " + std::to_string(max_m) + " exceeds the joint-block cap of " +
                         std::to_string(kMaxJointSites) + " sites");
  if (max_m > long_distance)
    throw invalid_input_error("max_m exceeds the available long distance floor(N/2)");

  MinBlockScan scan;
  scan.long_distance = long_distance;
  scan.threshold = threshold;
  for (int m = 1; m <= max_m; ++m) {
    std::vector<int> distances;
    for (int r = m; r <= long_distance; ++r) distances.push_back(r);
    MIProfile profile = mi_profile(state, m, 0, distances, threshold);
    const bool hit = profile.long_range;
    scan.profiles.push_back(std::move(profile));
    if (hit && !scan.min_block_size) scan.min_block_size = m;
  }
  return scan;
}

double PMatrix::row_sum(std::size_t row) const {
  double s = 0.0;
  for (std::size_t c = 0; c < dim(); ++c) s += entries[row * dim() + c];
  return s;
}

double PMatrix::col_sum(std::size_t col) const {
  double s = 0.0;
  for (std::size_t r = 0; r < dim(); ++r) s += entries[r * dim() + col];
  return s;
}

PMatrix p_matrix(const EigenDecomposition& modes_a, const EigenDecomposition& modes_b,
                 const EigenDecomposition& modes_joint) {
  const std::size_t da = modes_a.dim, db = modes_b.dim, dj = modes_joint.dim;
  if (dj != da * db)
    throw invalid_input_error("p_matrix: joint dimension must equal dim(a) * dim(b)");
  PMatrix p;
  p.dim_a = da;
  p.dim_b = db;
  p.entries.assign(dj * dj, 0.0);
  for (std::size_t mu = 0; mu < da; ++mu)
    for (std::size_t nu = 0; nu < db; ++nu) {
      const std::size_t row = mu * db + nu;
      for (std::size_t k = 0; k < dj; ++k) {
        // <joint_k | phi_a[mu] x phi_b[nu]>
        cplx overlap = 0.0;
        for (std::size_t ra = 0; ra < da; ++ra)
          for (std::size_t rb = 0; rb < db; ++rb)
            overlap += std::conj(modes_joint.vec(ra * db + rb, k)) * modes_a.vec(ra, mu) *
                       modes_b.vec(rb, nu);
        p.entries[row * dj + k] = std::norm(overlap);
      }
    }
  // Eq.-style stochasticity constraints, enforced as postconditions.
  for (std::size_t r = 0; r < dj; ++r)
    if (std::abs(p.row_sum(r) - 1.0) > 1e-10)
      throw numeric_error("p_matrix: row sum deviates from 1 by more than 1e-10");
  for (std::size_t c = 0; c < dj; ++c)
    if (std::abs(p.col_sum(c) - 1.0) > 1e-10)
      throw numeric_error("p_matrix: column sum deviates from 1 by more than 1e-10");
  return p;
}

PMatrix p_matrix(const DensityMatrix& rdm_a, const DensityMatrix& rdm_b,
                 const DensityMatrix& rdm_joint) {
  return p_matrix(eigh(rdm_a.mat), eigh(rdm_b.mat), eigh(rdm_joint.mat));
}

}  // namespace miorder
