#include "miorder/orderparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace miorder {

int rank_of(const EigenDecomposition& modes, double eps) {
  int rank = 0;
  for (double p : modes.eigenvalues)
    if (p > eps) ++rank;
  return rank;
}

int rank_of(const DensityMatrix& rdm, double eps) { return rank_of(eigh(rdm.mat), eps); }

namespace {

// <phi_mu phi_nu| rho_joint |phi_mu' phi_nu'> with both factors drawn from
// the same single-block eigenbasis.
cplx joint_element(const EigenDecomposition& modes, const HermitianMatrix& joint, std::size_t mu,
                   std::size_t nu, std::size_t mup, std::size_t nup) {
  const std::size_t d = modes.dim;
  cplx acc = 0.0;
  for (std::size_t ra = 0; ra < d; ++ra)
    for (std::size_t rb = 0; rb < d; ++rb) {
      const cplx bra = std::conj(modes.vec(ra, mu) * modes.vec(rb, nu));
      if (bra == cplx(0.0, 0.0)) continue;
      cplx row = 0.0;
      for (std::size_t ca = 0; ca < d; ++ca)
        for (std::size_t cb = 0; cb < d; ++cb)
          row += joint(ra * d + rb, ca * d + cb) * modes.vec(ca, mup) * modes.vec(cb, nup);
      acc += bra * row;
    }
  return acc;
}

// Diagonal of the joint RDM in the product eigenbasis, restricted to the
// first `cut` modes of each factor.
std::vector<double> joint_diagonal(const EigenDecomposition& modes, const HermitianMatrix& joint,
                                   std::size_t cut) {
  std::vector<double> q(cut * cut, 0.0);
  for (std::size_t mu = 0; mu < cut; ++mu)
    for (std::size_t nu = 0; nu < cut; ++nu) {
      const cplx v = joint_element(modes, joint, mu, nu, mu, nu);
      q[mu * cut + nu] = v.real();
    }
  return q;
}

// Dominant eigenvector (largest |eigenvalue|) of a small real symmetric
// matrix, via the Hermitian solver.
std::vector<double> dominant_eigenvector(const std::vector<double>& m, std::size_t n) {
  HermitianMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = m[i * n + j];
  const EigenDecomposition d = eigh(h);
  const std::size_t pick =
      std::abs(d.eigenvalues.front()) >= std::abs(d.eigenvalues.back()) ? 0 : n - 1;
  std::vector<double> v(n);
  for (std::size_t r = 0; r < n; ++r) v[r] = d.vec(r, pick).real();
  return v;
}

std::vector<int> regroup(const EigenDecomposition& modes, int rank) {
  std::vector<int> groups(static_cast<std::size_t>(rank));
  int g = 0;
  for (int k = 0; k < rank; ++k) {
    if (k > 0 && modes.eigenvalues[k - 1] - modes.eigenvalues[k] >= kDegeneracyTol) ++g;
    groups[static_cast<std::size_t>(k)] = g;
  }
  return groups;
}

}  // namespace

DiagonalOrderResult construct_diagonal(const DensityMatrix& rdm_i, const DensityMatrix& rdm_joint,
                                       double eps) {
  const std::size_t d = rdm_i.dim();
  if (rdm_joint.dim() != d * d)
    throw invalid_input_error("construct_diagonal: joint RDM must live on the doubled block");
  const EigenDecomposition modes = eigh(rdm_i.mat);
  const int rank = rank_of(modes, eps);

  DiagonalOrderResult result;
  result.op = HermitianMatrix(d);
  result.spec.rank = rank;
  if (rank <= 1) {
    result.status = DiagonalOrderStatus::rank_one;
    return result;
  }
  const std::size_t xi = static_cast<std::size_t>(rank);
  result.spec.groups = regroup(modes, rank);
  const int n_groups = result.spec.groups.back() + 1;

  const std::vector<double> q = joint_diagonal(modes, rdm_joint.mat, xi);
  std::vector<double> corr(xi * xi);  // C_munu = q_munu - p_mu p_nu
  for (std::size_t mu = 0; mu < xi; ++mu)
    for (std::size_t nu = 0; nu < xi; ++nu)
      corr[mu * xi + nu] = q[mu * xi + nu] - modes.eigenvalues[mu] * modes.eigenvalues[nu];
  // The two blocks are translates, so C is symmetric up to solver noise;
  // keep only the symmetric part the quadratic form sees.
  for (std::size_t mu = 0; mu < xi; ++mu)
    for (std::size_t nu = mu + 1; nu < xi; ++nu) {
      const double avg = 0.5 * (corr[mu * xi + nu] + corr[nu * xi + mu]);
      corr[mu * xi + nu] = avg;
      corr[nu * xi + mu] = avg;
    }

  std::vector<double> w(xi, 0.0);
  if (n_groups == 2) {
    // Equal weights inside each group; traceless fixes the ratio, and the
    // weight on the larger-eigenvalue group is taken negative.
    double pop0 = 0.0, pop1 = 0.0;
    for (std::size_t k = 0; k < xi; ++k)
      (result.spec.groups[k] == 0 ? pop0 : pop1) += modes.eigenvalues[k];
    double u0 = -pop1, u1 = pop0;
    const double scale = std::max(std::abs(u0), std::abs(u1));
    u0 /= scale;
    u1 /= scale;
    for (std::size_t k = 0; k < xi; ++k) w[k] = result.spec.groups[k] == 0 ? u0 : u1;
  } else if (n_groups == 1) {
    // Fully degenerate spectrum: equal weights would vanish under the
    // traceless condition, so resolve in mode space instead.
    w = dominant_eigenvector(corr, xi);
    double wp = 0.0, pp = 0.0;
    for (std::size_t k = 0; k < xi; ++k) {
      wp += w[k] * modes.eigenvalues[k];
      pp += modes.eigenvalues[k] * modes.eigenvalues[k];
    }
    for (std::size_t k = 0; k < xi; ++k) w[k] -= wp / pp * modes.eigenvalues[k];
    double scale = 0.0;
    for (double x : w) scale = std::max(scale, std::abs(x));
    if (scale < 1e-12) {
      result.status = DiagonalOrderStatus::degenerate;
      return result;
    }
    double lead = 0.0;
    for (double x : w)
      if (std::abs(x) > 1e-12) {
        lead = x;
        break;
      }
    const double sign = lead >= 0.0 ? 1.0 : -1.0;
    for (double& x : w) x *= sign / scale;
  } else {
    // Three or more groups: collapse the connected-correlation matrix onto
    // the group space, take its dominant eigenvector, project traceless,
    // rescale.
    const std::size_t ng = static_cast<std::size_t>(n_groups);
    std::vector<double> collapsed(ng * ng, 0.0);
    std::vector<double> pop(ng, 0.0);
    for (std::size_t mu = 0; mu < xi; ++mu) {
      pop[static_cast<std::size_t>(result.spec.groups[mu])] += modes.eigenvalues[mu];
      for (std::size_t nu = 0; nu < xi; ++nu)
        collapsed[static_cast<std::size_t>(result.spec.groups[mu]) * ng +
                  static_cast<std::size_t>(result.spec.groups[nu])] += corr[mu * xi + nu];
    }
    std::vector<double> u = dominant_eigenvector(collapsed, ng);
    double up = 0.0, pp = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      up += u[g] * pop[g];
      pp += pop[g] * pop[g];
    }
    for (std::size_t g = 0; g < ng; ++g) u[g] -= up / pp * pop[g];
    double scale = 0.0;
    for (double x : u) scale = std::max(scale, std::abs(x));
    if (scale < 1e-12) {
      result.status = DiagonalOrderStatus::degenerate;
      return result;
    }
    double sign = 1.0;
    for (double x : u)
      if (std::abs(x) > 1e-12) {
        sign = x > 0.0 ? -1.0 : 1.0;  // leading (largest-eigenvalue) group negative
        break;
      }
    for (std::size_t g = 0; g < ng; ++g) u[g] *= sign / scale;
    for (std::size_t k = 0; k < xi; ++k) w[k] = u[static_cast<std::size_t>(result.spec.groups[k])];
  }

  result.status = DiagonalOrderStatus::ok;
  result.spec.weights = w;
  for (std::size_t k = 0; k < xi; ++k)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        result.op(r, c) += w[k] * modes.vec(r, k) * std::conj(modes.vec(c, k));
  for (std::size_t mu = 0; mu < xi; ++mu)
    for (std::size_t nu = 0; nu < xi; ++nu)
      result.connected_at_reference += w[mu] * w[nu] * corr[mu * xi + nu];
  return result;
}

std::vector<std::pair<int, int>> detect_offdiagonal_pairs(const DensityMatrix& rdm_a,
                                                          const DensityMatrix& rdm_b,
                                                          const DensityMatrix& rdm_joint,
                                                          double eps) {
  const std::size_t d = rdm_a.dim();
  if (rdm_b.dim() != d)
    throw invalid_input_error("detect_offdiagonal_pairs: blocks must share one dimension");
  if (rdm_joint.dim() != d * d)
    throw invalid_input_error("detect_offdiagonal_pairs: joint RDM dimension mismatch");
  const EigenDecomposition modes = eigh(rdm_a.mat);

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t mu = 0; mu < d; ++mu)
    for (std::size_t nu = mu + 1; nu < d; ++nu) {
      // <phi_nu phi_nu| rho |phi_mu phi_mu> and <phi_mu phi_nu| rho |phi_nu phi_mu>
      const cplx t1 = joint_element(modes, rdm_joint.mat, nu, nu, mu, mu);
      const cplx t2 = joint_element(modes, rdm_joint.mat, mu, nu, nu, mu);
      if (std::abs(t1) > eps || std::abs(t2) > eps)
        pairs.emplace_back(static_cast<int>(mu), static_cast<int>(nu));
    }
  return pairs;
}

HermitianMatrix pair_operator(const EigenDecomposition& modes, std::pair<int, int> pair, cplx w) {
  const std::size_t d = modes.dim;
  const auto mu = static_cast<std::size_t>(pair.first);
  const auto nu = static_cast<std::size_t>(pair.second);
  if (mu >= d || nu >= d || mu == nu)
    throw invalid_input_error("pair_operator: invalid mode pair");
  HermitianMatrix op(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      op(r, c) += w * modes.vec(r, nu) * std::conj(modes.vec(c, mu));
      op(r, c) += std::conj(w) * modes.vec(r, mu) * std::conj(modes.vec(c, nu));
    }
  return op;
}

std::optional<OffDiagonalOrderResult> construct_offdiagonal(
    const DensityMatrix& rdm_i, const std::vector<std::pair<int, int>>& pairs,
    const DensityMatrix& rdm_joint) {
  if (pairs.empty()) return std::nullopt;
  const EigenDecomposition modes = eigh(rdm_i.mat);
  OffDiagonalOrderResult result;
  result.pairs = pairs;
  result.op_x = HermitianMatrix(modes.dim);
  result.op_y = HermitianMatrix(modes.dim);
  for (const auto& pr : pairs) {
    result.op_x += pair_operator(modes, pr, cplx(1.0, 0.0));
    result.op_y += pair_operator(modes, pr, cplx(0.0, 1.0));
  }
  result.xx = expectation(kron(result.op_x, result.op_x), rdm_joint.mat);
  result.yy = expectation(kron(result.op_y, result.op_y), rdm_joint.mat);
  result.xy = expectation(kron(result.op_x, result.op_y), rdm_joint.mat);
  return result;
}

CorrelationProfile correlation_profile(const StateVector& state, const HermitianMatrix& op,
                                       int block_size, int anchor,
                                       std::span<const int> distances) {
  const std::size_t d = std::size_t{1} << block_size;
  if (op.dim() != d)
    throw invalid_input_error("correlation_profile: operator dimension does not match block size");
  op.check_hermitian(1e-12);

  CorrelationProfile profile;
  const Block a = Block::contiguous(anchor, block_size);
  const DensityMatrix rho_a = partial_trace(state, a);
  const double mean_a = expectation(op, rho_a);
  for (int r : distances) {
    if (r < block_size || anchor + r + block_size > state.n_sites)
      throw invalid_input_error("correlation distance " + std::to_string(r) +
                                " is invalid for this chain");
    const Block b = Block::contiguous(anchor + r, block_size);
    const DensityMatrix rho_b = partial_trace(state, b);
    const DensityMatrix rho_ab = joint_rdm(state, a, b);
    const double mean_b = expectation(op, rho_b);
    const HermitianMatrix oo = kron(op, op);
    const double raw = expectation(oo, rho_ab.mat);

    // Spectral route through the joint eigenbasis; must agree with the
    // direct trace.
    const EigenDecomposition joint_modes = eigh(rho_ab.mat);
    double spectral = 0.0;
    const std::size_t dj = joint_modes.dim;
    for (std::size_t k = 0; k < dj; ++k) {
      if (std::abs(joint_modes.eigenvalues[k]) < 1e-15) continue;
      cplx acc = 0.0;
      for (std::size_t rr = 0; rr < dj; ++rr) {
        cplx row = 0.0;
        for (std::size_t cc = 0; cc < dj; ++cc) row += oo(rr, cc) * joint_modes.vec(cc, k);
        acc += std::conj(joint_modes.vec(rr, k)) * row;
      }
      spectral += joint_modes.eigenvalues[k] * acc.real();
    }
    profile.route_delta = std::max(profile.route_delta, std::abs(raw - spectral));
    profile.points.push_back(CorrelationPoint{r, raw - mean_a * mean_b, raw});
  }
  return profile;
}

ModeResult extract_mode(const CorrelationProfile& profile) {
  const auto& pts = profile.points;
  if (pts.size() < 4)
    throw invalid_input_error("extract_mode needs at least 4 profile points");
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].r != pts[k - 1].r + 1)
      throw invalid_input_error("extract_mode needs consecutive integer distances");

  // Even point count keeps pi on the momentum grid.
  std::size_t used = pts.size() - (pts.size() % 2);
  ModeResult mode;
  mode.points_used = static_cast<int>(used);

  double max_abs = 0.0, l1 = 0.0;
  for (std::size_t j = 0; j < used; ++j) {
    max_abs = std::max(max_abs, std::abs(pts[j].connected));
    l1 += std::abs(pts[j].connected);
  }

  const auto big_r = static_cast<double>(used);
  for (std::size_t mprime = 0; mprime <= used / 2; ++mprime) {
    const double k = 2.0 * std::numbers::pi * static_cast<double>(mprime) / big_r;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < used; ++j)
      acc += pts[j].connected * std::exp(cplx(0.0, -k * static_cast<double>(pts[j].r)));
    mode.dft.emplace_back(k, std::abs(acc));
  }

  if (max_abs <= 1e-12) return mode;  // all-zero profile: no mode

  // Argmax over nonzero momenta; ties (within 1e-12 of the profile scale)
  // break toward smaller k.
  std::size_t best = 1;
  double best_mag = mode.dft[1].second;
  for (std::size_t m = 2; m < mode.dft.size(); ++m)
    if (mode.dft[m].second > best_mag + 1e-12 * l1) {
      best_mag = mode.dft[m].second;
      best = m;
    }
  mode.found = true;
  if (best_mag <= 1e-8 * l1) {
    // Numerically constant profile.
    mode.k = 0.0;
    mode.wavelength = std::numeric_limits<double>::infinity();
    return mode;
  }
  mode.k = mode.dft[best].first;
  mode.wavelength = mode.k > 0.0 ? 2.0 * std::numbers::pi / mode.k
                                 : std::numeric_limits<double>::infinity();
  return mode;
}

DiagonalContractionVariants diagonal_contraction_variants(const std::vector<double>& weights,
                                                          const DensityMatrix& rdm_i,
                                                          const DensityMatrix& rdm_joint) {
  const std::size_t d = rdm_i.dim();
  const EigenDecomposition modes = eigh(rdm_i.mat);
  const EigenDecomposition joint_modes = eigh(rdm_joint.mat);
  const PMatrix p = p_matrix(modes, modes, joint_modes);
  const std::size_t dj = joint_modes.dim;

  auto weight = [&](std::size_t mode_index) {
    return mode_index < weights.size() ? weights[mode_index] : 0.0;
  };

  // Label each joint eigenvector by its dominant product pair.
  std::vector<std::pair<std::size_t, std::size_t>> label(dj);
  for (std::size_t k = 0; k < dj; ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t row = 0; row < dj; ++row)
      if (p(row, k) > best + 1e-15) {
        best = p(row, k);
        arg = row;
      }
    label[k] = {arg / d, arg % d};
  }

  DiagonalContractionVariants out;
  for (std::size_t k = 0; k < dj; ++k) {
    const double wk = weight(label[k].first) * weight(label[k].second);
    const double qk = joint_modes.eigenvalues[k];
    for (std::size_t row = 0; row < dj; ++row) {
      const double pp = modes.eigenvalues[row / d] * modes.eigenvalues[row % d];
      const double ww = weight(row / d) * weight(row % d);
      out.literal += wk * pp * p(row, k);
      out.q_weighted += ww * qk * p(row, k);
    }
  }
  return out;
}

}  // namespace miorder
