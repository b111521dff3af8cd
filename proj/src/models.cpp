#include "miorder/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace miorder {

namespace {

std::vector<Bond> ring_bonds(int n, int step, double jx, double jy, double jz, Boundary b) {
  std::vector<Bond> bonds;
  for (int i = 0; i < n; ++i) {
    const int j = i + step;
    if (j >= n && b == Boundary::open) continue;
    bonds.push_back(Bond{i, j % n, jx, jy, jz});
  }
  return bonds;
}

}  // namespace

SpinChainModel SpinChainModel::heisenberg(int n, Boundary b) {
  SpinChainModel m;
  m.n_sites = n;
  m.boundary = b;
  m.bonds = ring_bonds(n, 1, 1.0, 1.0, 1.0, b);
  m.name = "heisenberg";
  m.validate();
  return m;
}

SpinChainModel SpinChainModel::xxz(int n, double delta, Boundary b) {
  SpinChainModel m;
  m.n_sites = n;
  m.boundary = b;
  m.bonds = ring_bonds(n, 1, 1.0, 1.0, delta, b);
  m.name = "xxz(" + std::to_string(delta) + ")";
  m.validate();
  return m;
}

SpinChainModel SpinChainModel::majumdar_ghosh(int n, Boundary b) {
  SpinChainModel m;
  m.n_sites = n;
  m.boundary = b;
  m.bonds = ring_bonds(n, 1, 1.0, 1.0, 1.0, b);
  const auto nnn = ring_bonds(n, 2, 0.5, 0.5, 0.5, b);
  m.bonds.insert(m.bonds.end(), nnn.begin(), nnn.end());
  m.name = "majumdar_ghosh";
  m.validate();
  return m;
}

SpinChainModel SpinChainModel::from_preset(std::string_view preset, int n_sites, Boundary b) {
  if (preset == "heisenberg") return heisenberg(n_sites, b);
  if (preset == "majumdar_ghosh") return majumdar_ghosh(n_sites, b);
  if (preset.starts_with("xxz(") && preset.ends_with(")")) {
    const std::string arg(preset.substr(4, preset.size() - 5));
    std::size_t pos = 0;
    double delta = 0.0;
    try {
      delta = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw invalid_input_error("cannot parse xxz anisotropy from '" + std::string(preset) + "'");
    }
    if (pos != arg.size())
      throw invalid_input_error("cannot parse xxz anisotropy from '" + std::string(preset) + "'");
    return xxz(n_sites, delta, b);
  }
  throw invalid_input_error("unknown model preset '" + std::string(preset) + "'");
}

SpinChainModel SpinChainModel::from_json(const nlohmann::json& doc) {
  SpinChainModel m;
  try {
    m.n_sites = doc.at("n_sites").get<int>();
    const std::string b = doc.value("boundary", "periodic");
    if (b == "periodic")
      m.boundary = Boundary::periodic;
    else if (b == "open")
      m.boundary = Boundary::open;
    else
      throw invalid_input_error("boundary must be 'periodic' or 'open', got '" + b + "'");
    for (const auto& row : doc.at("bonds")) {
      if (!row.is_array() || row.size() != 5)
        throw invalid_input_error("each bond must be [i, j, Jx, Jy, Jz]");
      m.bonds.push_back(Bond{row[0].get<int>(), row[1].get<int>(), row[2].get<double>(),
                             row[3].get<double>(), row[4].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("malformed model document: ") + e.what());
  }
  m.name = doc.value("name", "custom");
  m.validate();
  return m;
}

nlohmann::json SpinChainModel::to_json() const {
  nlohmann::json doc;
  doc["name"] = name;
  doc["n_sites"] = n_sites;
  doc["boundary"] = boundary == Boundary::periodic ? "periodic" : "open";
  auto& rows = doc["bonds"] = nlohmann::json::array();
  for (const Bond& b : bonds) rows.push_back({b.i, b.j, b.jx, b.jy, b.jz});
  return doc;
}

bool SpinChainModel::conserves_sz() const {
  return std::all_of(bonds.begin(), bonds.end(), [](const Bond& b) { return b.jx == b.jy; });
}

void SpinChainModel::validate() const {
  SpinBasis basis(n_sites);
  for (const Bond& b : bonds) {
    if (b.i < 0 || b.i >= n_sites || b.j < 0 || b.j >= n_sites)
      throw invalid_input_error("bond references a site outside the chain");
    if (b.i == b.j) throw invalid_input_error("bond endpoints must differ");
  }
}

StateVector apply_hamiltonian(const SpinChainModel& model, const StateVector& v) {
  if (v.n_sites != model.n_sites)
    throw invalid_input_error("state dimension does not match the model");
  StateVector out;
  out.n_sites = v.n_sites;
  out.amplitudes.assign(v.amplitudes.size(), cplx(0.0, 0.0));
  const std::uint64_t dim = v.dim();
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx amp = v.amplitudes[b];
    if (amp == cplx(0.0, 0.0)) continue;
    for (const Bond& bond : model.bonds) {
      const int bi = static_cast<int>((b >> bond.i) & 1u);
      const int bj = static_cast<int>((b >> bond.j) & 1u);
      const bool aligned = bi == bj;
      out.amplitudes[b] += bond.jz * (aligned ? 0.25 : -0.25) * amp;
      const double flip = aligned ? 0.25 * (bond.jx - bond.jy) : 0.25 * (bond.jx + bond.jy);
      if (flip != 0.0) {
        const std::uint64_t b2 =
            b ^ ((std::uint64_t{1} << bond.i) | (std::uint64_t{1} << bond.j));
        out.amplitudes[b2] += flip * amp;
      }
    }
  }
  return out;
}

std::vector<std::uint64_t> sz_sector_states(int n_sites, int n_down) {
  SpinBasis basis(n_sites);
  if (n_down < 0 || n_down > n_sites)
    throw invalid_input_error("sector population outside [0, N]");
  std::vector<std::uint64_t> states;
  for (std::uint64_t b = 0; b < basis.dim(); ++b)
    if (std::popcount(b) == n_down) states.push_back(b);
  return states;
}

namespace {

// Matrix-vector product restricted to a fixed-popcount sector. Valid only
// when every bond has Jx == Jy.
void apply_sector(const SpinChainModel& model, const std::vector<std::uint64_t>& states,
                  const std::vector<double>& in, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t dim = states.size();
  for (std::size_t k = 0; k < dim; ++k) {
    const std::uint64_t b = states[k];
    const double amp = in[k];
    if (amp == 0.0) continue;
    for (const Bond& bond : model.bonds) {
      const bool aligned = (((b >> bond.i) ^ (b >> bond.j)) & 1u) == 0;
      out[k] += bond.jz * (aligned ? 0.25 : -0.25) * amp;
      if (!aligned) {
        const std::uint64_t b2 =
            b ^ ((std::uint64_t{1} << bond.i) | (std::uint64_t{1} << bond.j));
        const auto it = std::lower_bound(states.begin(), states.end(), b2);
        out[static_cast<std::size_t>(it - states.begin())] += 0.5 * bond.jx * amp;
      }
    }
  }
}

void apply_full(const SpinChainModel& model, const std::vector<double>& in,
                std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::uint64_t dim = in.size();
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double amp = in[b];
    if (amp == 0.0) continue;
    for (const Bond& bond : model.bonds) {
      const bool aligned = (((b >> bond.i) ^ (b >> bond.j)) & 1u) == 0;
      out[b] += bond.jz * (aligned ? 0.25 : -0.25) * amp;
      const double flip = aligned ? 0.25 * (bond.jx - bond.jy) : 0.25 * (bond.jx + bond.jy);
      if (flip != 0.0) {
        const std::uint64_t b2 =
            b ^ ((std::uint64_t{1} << bond.i) | (std::uint64_t{1} << bond.j));
        out[b2] += flip * amp;
      }
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double vec_norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiag_smallest(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t k = alpha.size();
  double lo = alpha[0], hi = alpha[0];
  for (std::size_t i = 0; i < k; ++i) {
    const double bl = i > 0 ? std::abs(beta[i - 1]) : 0.0;
    const double br = i + 1 < k ? std::abs(beta[i]) : 0.0;
    lo = std::min(lo, alpha[i] - bl - br);
    hi = std::max(hi, alpha[i] + bl + br);
  }
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - b2 / d;
      if (d == 0.0) d = 1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  };
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector of the tridiagonal matrix for eigenvalue lambda, by inverse
// iteration with a slightly shifted Thomas solve.
std::vector<double> tridiag_eigenvector(const std::vector<double>& alpha,
                                        const std::vector<double>& beta, double lambda) {
  const std::size_t k = alpha.size();
  std::vector<double> y(k, 1.0 / std::sqrt(static_cast<double>(k)));
  double scale = std::abs(lambda);
  for (double a : alpha) scale = std::max(scale, std::abs(a));
  const double shift = lambda - 1e-13 * (scale + 1.0);
  std::vector<double> c(k), d(k);
  for (int pass = 0; pass < 3; ++pass) {
    // Thomas forward sweep on (T - shift I) x = y.
    d[0] = alpha[0] - shift;
    if (std::abs(d[0]) < 1e-300) d[0] = 1e-300;
    c[0] = k > 1 ? beta[0] / d[0] : 0.0;
    std::vector<double> g(k);
    g[0] = y[0] / d[0];
    for (std::size_t i = 1; i < k; ++i) {
      d[i] = alpha[i] - shift - beta[i - 1] * c[i - 1];
      if (std::abs(d[i]) < 1e-300) d[i] = 1e-300;
      if (i + 1 < k) c[i] = beta[i] / d[i];
      g[i] = (y[i] - beta[i - 1] * g[i - 1]) / d[i];
    }
    y[k - 1] = g[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) y[i] = g[i] - c[i] * y[i + 1];
    const double n = vec_norm(y);
    for (double& v : y) v /= n;
  }
  return y;
}

struct LanczosOutcome {
  double energy;
  std::vector<double> vector;
  int iterations;
  double residual;
};

// Ground-state Lanczos on a generic real-symmetric matvec, with full
// reorthogonalization against the stored Krylov basis.
template <typename MatVec>
LanczosOutcome lanczos_lowest(MatVec&& matvec, std::size_t dim, double tol, int max_iter,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // Raw 53-bit mantissa draw; avoids std::uniform_real_distribution, whose
    // output is implementation-defined.
    return static_cast<double>(rng() >> 11) * 0x1p-53;
  };
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;

  std::vector<double> q(dim);
  for (double& x : q) x = 2.0 * uniform() - 1.0;
  double n0 = vec_norm(q);
  for (double& x : q) x /= n0;

  std::vector<double> w(dim), ritz;
  double best_residual = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  double lambda_prev = std::numeric_limits<double>::infinity();

  const int cap = std::min<int>(max_iter, static_cast<int>(dim));
  for (int it = 0; it < cap; ++it) {
    basis.push_back(q);
    matvec(basis.back(), w);
    const double a = dot(basis.back(), w);
    alpha.push_back(a);

    // w <- w - a q_k - b q_{k-1}, then re-orthogonalize against everything.
    for (std::size_t i = 0; i < dim; ++i) w[i] -= a * basis.back()[i];
    if (!beta.empty()) {
      const auto& prev = basis[basis.size() - 2];
      const double b = beta.back();
      for (std::size_t i = 0; i < dim; ++i) w[i] -= b * prev[i];
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) {
        const double ov = dot(v, w);
        if (ov == 0.0) continue;
        for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * v[i];
      }

    lambda = tridiag_smallest(alpha, beta);
    const bool settled = std::abs(lambda - lambda_prev) < std::max(tol * 0.1, 1e-15);
    lambda_prev = lambda;

    const double bnext = vec_norm(w);
    const bool exhausted = bnext < 1e-13 || it + 1 == cap;
    if (settled || exhausted) {
      const auto s = tridiag_eigenvector(alpha, beta, lambda);
      ritz.assign(dim, 0.0);
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t i = 0; i < dim; ++i) ritz[i] += s[k] * basis[k][i];
      const double rn = vec_norm(ritz);
      for (double& x : ritz) x /= rn;
      matvec(ritz, w);
      const double energy = dot(ritz, w);
      double res = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double r = w[i] - energy * ritz[i];
        res += r * r;
      }
      res = std::sqrt(res);
      best_residual = std::min(best_residual, res);
      if (res <= tol || exhausted) {
        if (res > tol)
          throw convergence_error("lanczos did not reach tolerance " + std::to_string(tol), res);
        return LanczosOutcome{energy, std::move(ritz), it + 1, res};
      }
      // Not converged yet: rebuild w = H q_k - a q_k - ... for continuation.
      matvec(basis.back(), w);
      for (std::size_t i = 0; i < dim; ++i) w[i] -= a * basis.back()[i];
      if (!beta.empty()) {
        const auto& prev = basis[basis.size() - 2];
        const double b = beta.back();
        for (std::size_t i = 0; i < dim; ++i) w[i] -= b * prev[i];
      }
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : basis) {
          const double ov = dot(v, w);
          if (ov == 0.0) continue;
          for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * v[i];
        }
    }

    const double b = vec_norm(w);
    if (b < 1e-13) {
      // Krylov space exhausted before reaching tolerance.
      continue;
    }
    beta.push_back(b);
    for (std::size_t i = 0; i < dim; ++i) q[i] = w[i] / b;
  }
  throw convergence_error("lanczos exceeded max_iter", best_residual);
}

bool sector_heuristic(const SpinChainModel& model) {
  if (model.n_sites % 2 != 0 || !model.conserves_sz()) return false;
  return std::all_of(model.bonds.begin(), model.bonds.end(),
                     [](const Bond& b) { return b.jx > 0.0 && b.jz > -b.jx; });
}

}  // namespace

GroundStateResult lanczos_ground_state(const SpinChainModel& model, double tol, int max_iter,
                                       std::uint64_t seed, SectorMode sector) {
  model.validate();
  if (max_iter < 1) throw invalid_input_error("max_iter must be positive");
  bool use_sector = false;
  switch (sector) {
    case SectorMode::automatic:
      use_sector = sector_heuristic(model);
      break;
    case SectorMode::full:
      use_sector = false;
      break;
    case SectorMode::sz_zero:
      if (model.n_sites % 2 != 0 || !model.conserves_sz())
        throw invalid_input_error("Sz=0 sector requires even N and Jx == Jy on every bond");
      use_sector = true;
      break;
  }

  GroundStateResult result;
  result.used_sz_sector = use_sector;
  result.state.n_sites = model.n_sites;
  const std::uint64_t full_dim = std::uint64_t{1} << model.n_sites;

  if (use_sector) {
    const auto states = sz_sector_states(model.n_sites, model.n_sites / 2);
    auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
      apply_sector(model, states, in, out);
    };
    auto out = lanczos_lowest(matvec, states.size(), tol, max_iter, seed);
    result.energy = out.energy;
    result.iterations = out.iterations;
    result.residual = out.residual;
    result.state.amplitudes.assign(full_dim, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < states.size(); ++k)
      result.state.amplitudes[states[k]] = out.vector[k];
  } else {
    auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
      apply_full(model, in, out);
    };
    auto out = lanczos_lowest(matvec, full_dim, tol, max_iter, seed);
    result.energy = out.energy;
    result.iterations = out.iterations;
    result.residual = out.residual;
    result.state.amplitudes.assign(full_dim, cplx(0.0, 0.0));
    for (std::uint64_t k = 0; k < full_dim; ++k) result.state.amplitudes[k] = out.vector[k];
  }
  result.state.fix_phase();
  return result;
}

StateVector ghz_state(int n) {
  SpinBasis basis(n);
  if (n < 4) throw invalid_input_error("analytic states need n >= 4");
  std::vector<cplx> amp(basis.dim(), cplx(0.0, 0.0));
  const double r = 1.0 / std::sqrt(2.0);
  amp[0] = r;
  amp[basis.dim() - 1] = r;
  return StateVector(n, std::move(amp));
}

StateVector neel_ghz_state(int n) {
  SpinBasis basis(n);
  if (n < 4 || n % 2 != 0) throw invalid_input_error("neel_ghz_state needs even n >= 4");
  std::uint64_t odd_down = 0;
  for (int s = 1; s < n; s += 2) odd_down |= std::uint64_t{1} << s;
  std::vector<cplx> amp(basis.dim(), cplx(0.0, 0.0));
  const double r = 1.0 / std::sqrt(2.0);
  amp[odd_down] = r;
  amp[basis.dim() - 1 - odd_down] = r;
  return StateVector(n, std::move(amp));
}

namespace {

// Product of singlets on the given (i, j)-oriented bonds:
// [i,j] = (|up_i down_j> - |down_i up_j>)/sqrt(2).
void add_valence_bond_covering(std::vector<cplx>& amp, int n,
                               const std::vector<std::pair<int, int>>& bonds) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  const double r = 1.0 / std::sqrt(2.0);
  for (std::uint64_t b = 0; b < dim; ++b) {
    double coeff = 1.0;
    for (const auto& [i, j] : bonds) {
      const int bi = static_cast<int>((b >> i) & 1u);
      const int bj = static_cast<int>((b >> j) & 1u);
      if (bi == bj) {
        coeff = 0.0;
        break;
      }
      coeff *= (bi == 0) ? r : -r;
    }
    if (coeff != 0.0) amp[b] += coeff;
  }
}

}  // namespace

StateVector dimer_superposition(int n) {
  SpinBasis basis(n);
  if (n < 4 || n % 2 != 0) throw invalid_input_error("dimer_superposition needs even n >= 4");
  std::vector<std::pair<int, int>> covering1, covering2;
  for (int i = 0; i < n; i += 2) covering1.emplace_back(i, i + 1);
  for (int i = 1; i + 1 < n; i += 2) covering2.emplace_back(i, i + 1);
  covering2.emplace_back(n - 1, 0);

  std::vector<cplx> amp(basis.dim(), cplx(0.0, 0.0));
  add_valence_bond_covering(amp, n, covering1);
  add_valence_bond_covering(amp, n, covering2);
  StateVector state(n, std::move(amp));
  state.normalize();
  return state;
}

StateVector all_up_state(int n) {
  SpinBasis basis(n);
  std::vector<cplx> amp(basis.dim(), cplx(0.0, 0.0));
  amp[0] = 1.0;
  return StateVector(n, std::move(amp));
}

}  // namespace miorder
