#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "miorder/hilbert.hpp"

namespace miorder {

enum class Boundary { periodic, open };

struct Bond {
  int i = 0;
  int j = 0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;
};

// Spin-1/2 chain Hamiltonian H = sum_bonds (Jx Sx Sx + Jy Sy Sy + Jz Sz Sz)
// with S = sigma/2 operators.
struct SpinChainModel {
  int n_sites = 0;
  Boundary boundary = Boundary::periodic;
  std::vector<Bond> bonds;
  std::string name;  // preset name or "custom"

  static SpinChainModel heisenberg(int n, Boundary b = Boundary::periodic);
  static SpinChainModel xxz(int n, double delta, Boundary b = Boundary::periodic);
  static SpinChainModel majumdar_ghosh(int n, Boundary b = Boundary::periodic);
  // "heisenberg" | "xxz(<delta>)" | "majumdar_ghosh"
  static SpinChainModel from_preset(std::string_view preset, int n_sites,
                                    Boundary b = Boundary::periodic);
  // {"n_sites": int, "bonds": [[i, j, Jx, Jy, Jz], ...], "boundary": "periodic"|"open"}
  static SpinChainModel from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  // True when every bond has Jx == Jy, so total S^z commutes with H.
  bool conserves_sz() const;
  void validate() const;
};

// H|v> via bit-wise bond application; linear, not normalized.
StateVector apply_hamiltonian(const SpinChainModel& model, const StateVector& v);

struct GroundStateResult {
  double energy = 0.0;
  StateVector state;
  int iterations = 0;
  double residual = 0.0;
  bool used_sz_sector = false;
};

enum class SectorMode { automatic, full, sz_zero };

// Lanczos with full reorthogonalization and a fixed-seed start vector.
// Deterministic for identical inputs. Restricts to the Sz=0 sector when the
// model conserves Sz, N is even and the couplings are antiferromagnetic-like.
GroundStateResult lanczos_ground_state(const SpinChainModel& model, double tol = 1e-10,
                                       int max_iter = 500, std::uint64_t seed = 1,
                                       SectorMode sector = SectorMode::automatic);

// (|up..up> + |down..down>)/sqrt(2)
StateVector ghz_state(int n);
// (|udud...> + |dudu...>)/sqrt(2); n must be even.
StateVector neel_ghz_state(int n);
// Symmetric superposition of the two nearest-neighbour singlet coverings of
// a ring, renormalized numerically (the coverings are not orthogonal); n
// must be even.
StateVector dimer_superposition(int n);
// |up...up>
StateVector all_up_state(int n);

// Basis states with exactly n_down set bits (total Sz = (N - 2 n_down)/2 in
// units of the S-convention), sorted ascending.
std::vector<std::uint64_t> sz_sector_states(int n_sites, int n_down);

}  // namespace miorder
