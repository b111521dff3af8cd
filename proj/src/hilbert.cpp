#include "miorder/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace miorder {

SpinBasis::SpinBasis(int n) : n_sites(n) {
  if (n < 1 || n > kMaxSites)
    throw capacity_error("chain length " + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxSites) + "]");
}

Block::Block(std::vector<int> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw invalid_input_error("block must contain at least one site");
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (sites_[k] < 0) throw invalid_input_error("block sites must be non-negative");
    if (k > 0 && sites_[k] <= sites_[k - 1])
      throw invalid_input_error("block sites must be strictly increasing");
  }
}

Block Block::contiguous(int start, int size) {
  std::vector<int> s(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) s[static_cast<std::size_t>(k)] = start + k;
  return Block(std::move(s));
}

bool Block::overlaps(const Block& other) const {
  for (int s : sites_)
    if (std::find(other.sites_.begin(), other.sites_.end(), s) != other.sites_.end()) return true;
  return false;
}

StateVector::StateVector(int n, std::vector<cplx> amp) : n_sites(n), amplitudes(std::move(amp)) {
  SpinBasis basis(n);
  if (amplitudes.size() != basis.dim())
    throw invalid_input_error("amplitude vector length does not match 2^N");
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  double n = norm();
  if (n == 0.0) throw invalid_input_error("cannot normalize the zero vector");
  for (cplx& a : amplitudes) a /= n;
}

void StateVector::fix_phase() {
  std::size_t imax = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double mag = std::abs(amplitudes[k]);
    if (mag > best + 1e-15) {
      best = mag;
      imax = k;
    }
  }
  const cplx ref = amplitudes[imax];
  if (std::abs(ref) == 0.0) return;
  const cplx factor = std::conj(ref) / std::abs(ref);
  for (cplx& a : amplitudes) a *= factor;
}

namespace {

void check_sites_in_range(const std::vector<int>& sites, int n_sites) {
  for (int s : sites)
    if (s >= n_sites)
      throw invalid_input_error("block site " + std::to_string(s) + " outside chain of " +
                                std::to_string(n_sites) + " sites");
}

void check_normalized(const StateVector& state) {
  const double n = state.norm();
  if (std::abs(n * n - 1.0) > 1e-10)
    throw invalid_input_error("state vector is not normalized (|psi|^2 = " +
                              std::to_string(n * n) + ")");
}

// Local basis index -> global bit pattern for an ordered site list. The
// first site carries the most significant local bit.
std::vector<std::uint64_t> local_to_global(const std::vector<int>& sites) {
  const int m = static_cast<int>(sites.size());
  std::vector<std::uint64_t> map(std::size_t{1} << m, 0);
  for (std::uint64_t a = 0; a < map.size(); ++a) {
    std::uint64_t g = 0;
    for (int k = 0; k < m; ++k)
      if ((a >> (m - 1 - k)) & 1u) g |= std::uint64_t{1} << sites[static_cast<std::size_t>(k)];
    map[a] = g;
  }
  return map;
}

std::vector<int> complement_sites(const std::vector<int>& sites, int n_sites) {
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(n_sites));
  for (int s = 0; s < n_sites; ++s)
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) rest.push_back(s);
  return rest;
}

// Core reduction: RDM over an ordered site list (first site = most
// significant local bit). Cost O(2^(N-m) * 4^m).
DensityMatrix trace_to_sites(const StateVector& state, const std::vector<int>& sites) {
  const int m = static_cast<int>(sites.size());
  const std::size_t d = std::size_t{1} << m;
  const auto loc = local_to_global(sites);
  const auto rest = complement_sites(sites, state.n_sites);
  const auto rst = local_to_global(rest);

  HermitianMatrix rho(d);
  std::vector<cplx> v(d);
  for (std::uint64_t e = 0; e < rst.size(); ++e) {
    const std::uint64_t base = rst[e];
    for (std::size_t a = 0; a < d; ++a) v[a] = state.amplitudes[base | loc[a]];
    for (std::size_t i = 0; i < d; ++i) {
      if (v[i] == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) rho(i, j) += v[i] * std::conj(v[j]);
    }
  }
  const double tr = rho.trace();
  if (tr <= 0.0) throw numeric_error("partial trace produced a non-positive trace");
  rho *= 1.0 / tr;
  return DensityMatrix{std::move(rho), sites};
}

}  // namespace

DensityMatrix partial_trace(const StateVector& state, const Block& block) {
  check_sites_in_range(block.sites(), state.n_sites);
  check_normalized(state);
  const std::size_t d = std::size_t{1} << block.size();
  if (d > kMaxBlockDim)
    throw capacity_error("block of " + std::to_string(block.size()) +
                         " sites exceeds the 2^8 local dimension cap");
  return trace_to_sites(state, block.sites());
}

DensityMatrix joint_rdm(const StateVector& state, const Block& a, const Block& b) {
  if (a.overlaps(b)) throw invalid_input_error("joint_rdm: blocks overlap");
  check_sites_in_range(a.sites(), state.n_sites);
  check_sites_in_range(b.sites(), state.n_sites);
  check_normalized(state);
  if (a.size() + b.size() > kMaxJointSites)
    throw capacity_error("joint block of " + std::to_string(a.size() + b.size()) +
                         " sites exceeds the " + std::to_string(kMaxJointSites) + "-site cap");
  std::vector<int> sites = a.sites();
  sites.insert(sites.end(), b.sites().begin(), b.sites().end());
  return trace_to_sites(state, sites);
}

StateVector apply_local_operator(const StateVector& state, const HermitianMatrix& op,
                                 const Block& block) {
  check_sites_in_range(block.sites(), state.n_sites);
  const std::size_t d = std::size_t{1} << block.size();
  if (op.dim() != d)
    throw invalid_input_error("operator dimension " + std::to_string(op.dim()) +
                              " does not match block dimension " + std::to_string(d));
  const auto loc = local_to_global(block.sites());
  const auto rest = complement_sites(block.sites(), state.n_sites);
  const auto rst = local_to_global(rest);

  StateVector out;
  out.n_sites = state.n_sites;
  out.amplitudes.assign(state.amplitudes.size(), cplx(0.0, 0.0));
  std::vector<cplx> v(d);
  for (std::uint64_t e = 0; e < rst.size(); ++e) {
    const std::uint64_t base = rst[e];
    for (std::size_t a = 0; a < d; ++a) v[a] = state.amplitudes[base | loc[a]];
    for (std::size_t i = 0; i < d; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += op(i, j) * v[j];
      out.amplitudes[base | loc[i]] = acc;
    }
  }
  return out;
}

double expectation_on_state(const StateVector& state, const HermitianMatrix& op,
                            const Block& block) {
  const StateVector applied = apply_local_operator(state, op, block);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < state.amplitudes.size(); ++k)
    acc += std::conj(state.amplitudes[k]) * applied.amplitudes[k];
  if (std::abs(acc.imag()) > 1e-10)
    throw numeric_error("expectation_on_state: imaginary residue " + std::to_string(acc.imag()));
  return acc.real();
}

}  // namespace miorder
