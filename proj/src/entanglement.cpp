#include "lyzero/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lyzero/error.hpp"

namespace lyzero {

namespace {

using cd = std::complex<double>;

constexpr double kPsdTol = 1e-10;
constexpr double kSubspaceTol = 1e-12;

Matrix4c sigma_yy() {
  Matrix4c s = Matrix4c::Zero();
  s(0, 3) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 0) = -1.0;
  return s;
}

}  // namespace

Matrix4c spin_flipped(const Matrix4c& rho) {
  const Matrix4c s = sigma_yy();
  return s * rho.conjugate() * s;
}

std::array<cd, 4> spin_flip_product_eigenvalues(const Matrix4c& rho) {
  Eigen::ComplexEigenSolver<Matrix4c> solver(rho * spin_flipped(rho), false);
  std::array<cd, 4> out;
  for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
  return out;
}

ConcurrenceResult concurrence(const Matrix4c& rho) {
  const Matrix4c hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(hermitian);
  const Eigen::Vector4d& values = eig.eigenvalues();
  if (values.minCoeff() < -kPsdTol) {
    throw Error(ErrorCode::kInvalidState,
                "density matrix eigenvalue " + std::to_string(values.minCoeff()) +
                    " is negative beyond tolerance");
  }
  Matrix4c w = eig.eigenvectors();
  for (int i = 0; i < 4; ++i) w.col(i) *= std::sqrt(std::max(values[i], 0.0));
  const Matrix4c tau = w.transpose() * sigma_yy() * w;
  Eigen::JacobiSVD<Matrix4c> svd(tau);

  ConcurrenceResult out;
  for (int i = 0; i < 4; ++i) out.omegas[static_cast<std::size_t>(i)] = svd.singularValues()[i];
  std::sort(out.omegas.begin(), out.omegas.end(), std::greater<>());
  out.concurrence =
      std::max(0.0, out.omegas[0] - out.omegas[1] - out.omegas[2] - out.omegas[3]);
  out.branch = ConcurrenceBranch::kGeneral;
  return out;
}

ConcurrenceResult concurrence_at_zero_time(const ProbeState& a, double r2) {
  if (!(std::abs(r2) <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::kDomainError, "|r2| must not exceed 1");
  }
  const double mid = std::abs(a[kUpDown] * a[kDownUp]);
  const double outer = std::abs(a[kUpUp] * a[kDownDown]);
  const double w1 = 2.0 * mid;
  const double w3 = outer * (1.0 + r2);
  const double w4 = outer * (1.0 - r2);

  ConcurrenceResult out;
  out.omegas = {w1, 0.0, w3, w4};
  std::sort(out.omegas.begin(), out.omegas.end(), std::greater<>());
  if (w1 > std::max(w3, w4)) {
    out.branch = ConcurrenceBranch::kZeroTimeW1;
    out.concurrence = std::max(0.0, 2.0 * (mid - outer));
  } else if (w1 < std::max(w3, w4)) {
    out.branch = ConcurrenceBranch::kZeroTimeW34;
    out.concurrence = std::max(0.0, 2.0 * (outer * std::abs(r2) - mid));
  } else {
    out.branch = ConcurrenceBranch::kGeneral;
    out.concurrence =
        std::max(0.0, out.omegas[0] - out.omegas[1] - out.omegas[2] - out.omegas[3]);
  }
  return out;
}

double subspace_concurrence(const ProbeState& state0, const ProbeParams& params, double t,
                            std::complex<double> ratio, Subspace subspace) {
  const bool mid = subspace == Subspace::kMid;
  const double leak = mid ? std::norm(state0[kUpUp]) + std::norm(state0[kDownDown])
                          : std::norm(state0[kUpDown]) + std::norm(state0[kDownUp]);
  if (leak > kSubspaceTol) {
    throw Error(ErrorCode::kSubspaceViolation,
                "state has weight " + std::to_string(leak) + " outside the subspace");
  }
  ProbeState a = state0;
  if (params.is_symmetric()) {
    a = evolve_amplitudes(state0, params, t);
  } else if (params.j_xx != 0.0) {
    throw Error(ErrorCode::kModeMismatch, "unequal bath couplings require j_xx = 0");
  }
  // With j_xx = 0 the evolution is diagonal and moduli are conserved.
  const cd product = mid ? a[kUpDown] * a[kDownUp] : a[kUpUp] * a[kDownDown];
  return 2.0 * std::abs(product) * std::abs(ratio);
}

double geometric_measure(double xx, double yx) {
  const double radicand = 1.0 - 16.0 * (xx * xx + yx * yx);
  if (radicand < -1e-10) {
    throw Error(ErrorCode::kDomainError, "correlators exceed the physical range");
  }
  return 0.5 * (1.0 - std::sqrt(std::max(radicand, 0.0)));
}

double concurrence_from_correlators(double xx, double yx) {
  return 4.0 * std::hypot(xx, yx);
}

ZeroTimeBlocks appendix_matrices(const ProbeState& a, double r2) {
  const cd uu = a[kUpUp], ud = a[kUpDown], du = a[kDownUp], dd = a[kDownDown];
  const double nuu = std::norm(uu), nud = std::norm(ud), ndu = std::norm(du), ndd = std::norm(dd);
  const cd mid_coh = ud * std::conj(du);
  const cd outer_coh = uu * std::conj(dd) * r2;

  ZeroTimeBlocks b;
  b.rho_mid << nud, mid_coh, std::conj(mid_coh), ndu;
  b.rho_outer << nuu, outer_coh, std::conj(outer_coh), ndd;
  b.tilde_mid << ndu, mid_coh, std::conj(mid_coh), nud;
  b.tilde_outer << ndd, outer_coh, std::conj(outer_coh), nuu;
  b.product_mid << 2.0 * nud * ndu, 2.0 * nud * mid_coh,
      2.0 * ndu * std::conj(mid_coh), 2.0 * nud * ndu;
  const double diag = nuu * ndd * (1.0 + r2 * r2);
  b.product_outer << diag, 2.0 * nuu * outer_coh, 2.0 * ndd * std::conj(outer_coh), diag;
  return b;
}

CharacteristicValues appendix_characteristic(const ProbeState& a, double r2, double w2) {
  const double m = std::norm(a[kUpDown]) * std::norm(a[kDownUp]);
  const double b = std::norm(a[kUpUp]) * std::norm(a[kDownDown]);
  const double one_minus = 1.0 - r2 * r2;
  return {w2 * (w2 - 4.0 * m),
          w2 * w2 - 2.0 * w2 * b * (1.0 + r2 * r2) + b * b * one_minus * one_minus};
}

}  // namespace lyzero
