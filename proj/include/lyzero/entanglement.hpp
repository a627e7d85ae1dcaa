#pragma once

// Wootters concurrence of the probe pair, its closed forms at zero times and
// on the two invariant subspaces, and the geometric measure.

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "lyzero/probe.hpp"

namespace lyzero {

enum class ConcurrenceBranch { kGeneral, kZeroTimeW1, kZeroTimeW34, kSubspaceMid, kSubspaceOuter };

struct ConcurrenceResult {
  double concurrence = 0.0;
  std::array<double, 4> omegas{};  // descending
  ConcurrenceBranch branch = ConcurrenceBranch::kGeneral;
};

/// rho~ = (sigma_y x sigma_y) rho^* (sigma_y x sigma_y).
Matrix4c spin_flipped(const Matrix4c& rho);

/// Eigenvalues of the non-Hermitian product rho rho~ (the omega_i^2), from a
/// general dense eigensolver.
std::array<std::complex<double>, 4> spin_flip_product_eigenvalues(const Matrix4c& rho);

/// C = max(0, w1 - w2 - w3 - w4). The w_i are obtained as singular values of
/// tau = W^T (sigma_y x sigma_y) W with rho = W W^dagger, which equal the
/// square roots of the eigenvalues of rho rho~ without squaring the rounding
/// error of the small ones.
/// Throws Error(kInvalidState) if rho has an eigenvalue below -1e-10.
ConcurrenceResult concurrence(const Matrix4c& rho);
inline ConcurrenceResult concurrence(const ReducedDensityMatrix& rdm) { return concurrence(rdm.rho); }

/// Closed form at a zero of Z(beta, -i lambda t / beta) (r1 = 0):
/// w1 = 2|a_{+-} a_{-+}|, w2 = 0, w3,4 = |a_{++} a_{--}| (1 +- r2).
ConcurrenceResult concurrence_at_zero_time(const ProbeState& state_t, double r2);

enum class Subspace { kMid, kOuter };

/// Concurrence of a state supported on span{|+->, |-+>} (kMid) or
/// span{|++>, |-->} (kOuter): 2 |a_i(t) a_j(t)| |ratio|. `ratio` is the
/// partition-function ratio damping that subspace's coherence: 1 for kMid
/// with equal couplings, Z(beta, -2i lambda t/beta)/Z for kOuter, and the
/// (lambda_A -+ lambda_B) ratios for unequal couplings.
/// Throws Error(kSubspaceViolation) if the state leaks out of the subspace.
double subspace_concurrence(const ProbeState& state0, const ProbeParams& params, double t,
                            std::complex<double> ratio, Subspace subspace);

/// E = (1 - sqrt(1 - 16 xx^2 - 16 yx^2)) / 2 for xx = <s_A^x s_B^x>,
/// yx = <s_A^y s_B^x>.
double geometric_measure(double xx, double yx);

/// 4 sqrt(xx^2 + yx^2); equals the concurrence on either invariant subspace.
double concurrence_from_correlators(double xx, double yx);

/// Direct-sum blocks of rho, rho~ and rho rho~ at a zero time, written out
/// entry by entry: the mid block acts on (|+->, |-+>), the outer block on
/// (|++>, |-->).
struct ZeroTimeBlocks {
  Eigen::Matrix2cd rho_mid, rho_outer;
  Eigen::Matrix2cd tilde_mid, tilde_outer;
  Eigen::Matrix2cd product_mid, product_outer;
};

ZeroTimeBlocks appendix_matrices(const ProbeState& state_t, double r2);

/// Values of the two characteristic polynomials of rho rho~ at w^2:
///   mid:   w^2 (w^2 - 4 |a_{+-}|^2 |a_{-+}|^2)
///   outer: w^4 - 2 w^2 B (1 + r2^2) + B^2 (1 - r2^2)^2,  B = |a_{++}|^2 |a_{--}|^2.
struct CharacteristicValues {
  double mid = 0.0;
  double outer = 0.0;
};

CharacteristicValues appendix_characteristic(const ProbeState& state_t, double r2, double omega_sq);

}  // namespace lyzero
