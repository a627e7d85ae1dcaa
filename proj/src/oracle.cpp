#include "lyzero/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>

#include "lyzero/error.hpp"

namespace lyzero {

namespace {

using cd = std::complex<double>;

struct SpinMatrices {
  Eigen::Matrix2cd x, y, z, id;
};

SpinMatrices spin_half() {
  SpinMatrices s;
  s.x << 0.0, 0.5, 0.5, 0.0;
  s.y << 0.0, cd(0.0, -0.5), cd(0.0, 0.5), 0.0;
  s.z << 0.5, 0.0, 0.0, -0.5;
  s.id.setIdentity();
  return s;
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Matrix4c propagator(const Matrix4c& hamiltonian, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(hamiltonian);
  Vector4c phases;
  for (int i = 0; i < 4; ++i) phases[i] = std::polar(1.0, -eig.eigenvalues()[i] * t);
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

Matrix4c probe_hamiltonian(const ProbeParams& p, double magnetization) {
  const SpinMatrices s = spin_half();
  return p.j_xx * (kron(s.x, s.x) + kron(s.y, s.y)) + p.j_zz * kron(s.z, s.z) +
         p.h0 * (kron(s.z, s.id) + kron(s.id, s.z)) +
         magnetization * (p.lambda_a * kron(s.z, s.id) + p.lambda_b * kron(s.id, s.z));
}

OracleResult exact_thermal_rdm(const BathSpec& spec, const ProbeState& state0,
                               const ProbeParams& params, double t) {
  spec.validate();
  if (spec.n_sites > kOracleSiteBudget) {
    throw Error(ErrorCode::kSizeExceeded, "oracle is limited to " +
                                              std::to_string(kOracleSiteBudget) + " sites");
  }
  const std::uint64_t configs = std::uint64_t{1} << spec.n_sites;
  std::vector<double> exponent(configs);
  std::vector<int> down_count(configs);
  for (std::uint64_t c = 0; c < configs; ++c) {
    down_count[c] = std::popcount(c);
    const double magnetization = 0.5 * spec.n_sites - down_count[c];
    exponent[c] = -spec.beta * (zero_field_energy(spec.bonds, c) - spec.field_h * magnetization);
  }
  const double shift = *std::max_element(exponent.begin(), exponent.end());

  const Vector4c psi = state0.vector();
  const Matrix4c rho0 = psi * psi.adjoint();
  // The probe evolution depends on the configuration only through its
  // magnetization; cache one evolved projector per down-spin count.
  std::map<int, Matrix4c> evolved;
  Matrix4c acc = Matrix4c::Zero();
  double weight_sum = 0.0;
  for (std::uint64_t c = 0; c < configs; ++c) {
    const double w = std::exp(exponent[c] - shift);
    auto it = evolved.find(down_count[c]);
    if (it == evolved.end()) {
      const Matrix4c u = propagator(probe_hamiltonian(params, 0.5 * spec.n_sites - down_count[c]), t);
      it = evolved.emplace(down_count[c], u * rho0 * u.adjoint()).first;
    }
    acc += w * it->second;
    weight_sum += w;
  }
  OracleResult out;
  out.rdm = acc / weight_sum;
  out.n_configs = configs;
  out.weight_sum = weight_sum * std::exp(shift);
  return out;
}

}  // namespace lyzero
