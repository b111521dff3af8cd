#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "miorder/hilbert.hpp"
#include "miorder/mi.hpp"

namespace miorder {

// Count of RDM eigenvalues above eps.
int rank_of(const DensityMatrix& rdm, double eps = 1e-10);
int rank_of(const EigenDecomposition& modes, double eps = 1e-10);

struct DiagonalOrderSpec {
  int rank = 0;
  // Degenerate-group label for each of the first `rank` modes.
  std::vector<int> groups;
  // One real weight per mode (descending-eigenvalue order); max modulus 1.
  std::vector<double> weights;
};

enum class DiagonalOrderStatus {
  ok,
  // Property i: a rank-1 block carries no correlation, so no operator exists.
  rank_one,
  // The traceless projection annihilated every candidate weight vector.
  degenerate,
};

struct DiagonalOrderResult {
  DiagonalOrderStatus status = DiagonalOrderStatus::rank_one;
  DiagonalOrderSpec spec;
  // Operator in the block computational basis; zero matrix unless status ok.
  HermitianMatrix op;
  // Connected correlation sum_{mu,nu} w_mu w_nu (q_munu - p_mu p_nu) at the
  // reference separation encoded by rdm_joint.
  double connected_at_reference = 0.0;
};

// Synthesize the diagonal order operator from the entanglement spectrum of
// rdm_i and the joint RDM of two translate blocks (both factors use the
// eigenbasis of rdm_i). Exactly two distinct eigenvalue groups admit the
// closed-form traceless solution; otherwise weights maximize the connected
// correlation at the reference separation before traceless projection.
DiagonalOrderResult construct_diagonal(const DensityMatrix& rdm_i,
                                       const DensityMatrix& rdm_joint, double eps = 1e-10);

// Mode pairs <mu, nu>, mu < nu, whose joint-RDM off-diagonal elements in the
// product eigenbasis exceed eps in modulus.
std::vector<std::pair<int, int>> detect_offdiagonal_pairs(const DensityMatrix& rdm_a,
                                                          const DensityMatrix& rdm_b,
                                                          const DensityMatrix& rdm_joint,
                                                          double eps = 1e-8);

struct OffDiagonalOrderResult {
  std::vector<std::pair<int, int>> pairs;
  HermitianMatrix op_x;  // sum over pairs of |phi_mu><phi_nu| + h.c.
  HermitianMatrix op_y;  // the conjugate (sigma_y-like) combination
  double xx = 0.0;       // <Ox Ox> on the joint RDM
  double yy = 0.0;       // <Oy Oy>
  double xy = 0.0;       // <Ox Oy>
};

std::optional<OffDiagonalOrderResult> construct_offdiagonal(
    const DensityMatrix& rdm_i, const std::vector<std::pair<int, int>>& pairs,
    const DensityMatrix& rdm_joint);

// w |phi_nu><phi_mu| + conj(w) |phi_mu><phi_nu| for the pair (mu, nu). On
// the (phi_mu, phi_nu) plane, w = 1 gives sigma_x and w = i gives sigma_y.
HermitianMatrix pair_operator(const EigenDecomposition& modes, std::pair<int, int> pair, cplx w);

struct CorrelationPoint {
  int r = 0;
  double connected = 0.0;
  double raw = 0.0;
};

struct CorrelationProfile {
  std::vector<CorrelationPoint> points;
  // Largest deviation between the direct joint-RDM trace and the spectral
  // route through the joint eigendecomposition.
  double route_delta = 0.0;
};

// Connected correlation <O_i O_{i+r}> - <O_i><O_{i+r}> with the operator
// applied to the m-site blocks at anchor and anchor+r.
CorrelationProfile correlation_profile(const StateVector& state, const HermitianMatrix& op,
                                       int block_size, int anchor, std::span<const int> distances);

struct ModeResult {
  bool found = false;
  double k = 0.0;
  double wavelength = 0.0;  // 2*pi/k, infinity when k == 0
  // (momentum, |DFT magnitude|) over the admissible grid {2 pi m / R}.
  std::vector<std::pair<double, double>> dft;
  int points_used = 0;
};

// Dominant momentum of the connected correlation profile. Requires at least
// four points at consecutive integer distances; an odd trailing point is
// dropped so the momentum grid contains pi. Constant profiles map to k = 0,
// all-zero profiles to no mode.
ModeResult extract_mode(const CorrelationProfile& profile);

// Contraction variants of the correlation function for a diagonal weight
// vector: `literal` pairs the weights with the joint eigenvector labels and
// the spectrum product p_mu' p_nu' with the product modes; `q_weighted`
// pairs the weights with the product modes and the joint eigenvalues q with
// the joint modes (this one equals the direct trace).
struct DiagonalContractionVariants {
  double literal = 0.0;
  double q_weighted = 0.0;
};

DiagonalContractionVariants diagonal_contraction_variants(const std::vector<double>& weights,
                                                          const DensityMatrix& rdm_i,
                                                          const DensityMatrix& rdm_joint);

}  // namespace miorder
