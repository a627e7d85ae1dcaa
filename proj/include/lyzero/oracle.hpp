#pragma once

// Brute-force reference for the probe dynamics. Every bath configuration is
// an eigenstate of H_b and H_i, so the probe pair evolves under a 4x4
// Hamiltonian that depends on the configuration's magnetization; the probe
// state is the Boltzmann-weighted average of those evolutions. No fugacity
// polynomial is involved anywhere on this path.

#include "lyzero/bath.hpp"
#include "lyzero/probe.hpp"

namespace lyzero {

inline constexpr int kOracleSiteBudget = 12;

struct OracleResult {
  Matrix4c rdm = Matrix4c::Zero();
  std::uint64_t n_configs = 0;
  /// sum_c exp(-beta E(c)); equals Z(beta, h) of the bath.
  double weight_sum = 0.0;
};

/// Probe Hamiltonian H_AB + M (lambda_A s_A^z + lambda_B s_B^z) for bath
/// magnetization M, assembled from explicit spin matrices.
Matrix4c probe_hamiltonian(const ProbeParams& params, double magnetization);

/// Throws Error(kSizeExceeded) above kOracleSiteBudget sites. Uses the
/// spec's field: configurations are weighted by exp(-beta (E_0 - h M)).
OracleResult exact_thermal_rdm(const BathSpec& spec, const ProbeState& state0,
                               const ProbeParams& params, double t);

}  // namespace lyzero
