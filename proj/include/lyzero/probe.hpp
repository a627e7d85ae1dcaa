#pragma once

// Two probe spins A and B coupled to an Ising bath through
//
//   H_AB = J_xx (s_A^x s_B^x + s_A^y s_B^y) + J_zz s_A^z s_B^z + h0 (s_A^z + s_B^z),
//   H_i  = (lambda_A s_A^z + lambda_B s_B^z) sum_i s_i^z.
//
// All three parts commute, so the reduced probe state is the pure-state
// projector of the evolved amplitudes with every coherence |m><k| damped by
// a bath partition-function ratio at an imaginary field.
//
// Basis order everywhere: |++>, |+->, |-+>, |-->  (first label = spin A).

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lyzero/bath.hpp"

namespace lyzero {

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

enum Basis : int { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

/// 2 * s^z of each probe for the basis states.
inline constexpr std::array<int, 4> kSpinA2 = {1, 1, -1, -1};
inline constexpr std::array<int, 4> kSpinB2 = {1, -1, 1, -1};

struct ProbeParams {
  double j_xx = 0.0;
  double j_zz = 0.0;
  double h0 = 0.0;
  double lambda_a = 0.0;
  double lambda_b = 0.0;

  static ProbeParams symmetric(double j_xx, double j_zz, double h0, double lambda) {
    return {j_xx, j_zz, h0, lambda, lambda};
  }
  bool is_symmetric() const { return lambda_a == lambda_b; }

  friend bool operator==(const ProbeParams&, const ProbeParams&) = default;
};

class ProbeState {
 public:
  using Amplitudes = std::array<std::complex<double>, 4>;

  ProbeState() : amplitudes_{1.0, 0.0, 0.0, 0.0} {}
  /// Throws Error(kInvalidState) unless sum |a|^2 = 1 within norm_tol.
  explicit ProbeState(const Amplitudes& amplitudes, double norm_tol = 1e-12);

  static ProbeState normalized(Amplitudes amplitudes);
  /// (|++> - |+-> + |-+> - |-->) / 2: A along +x, B along -x.
  static ProbeState x_projected();

  const std::complex<double>& operator[](int i) const { return amplitudes_[static_cast<std::size_t>(i)]; }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Vector4c vector() const;
  double norm_squared() const;

  friend bool operator==(const ProbeState&, const ProbeState&) = default;

 private:
  Amplitudes amplitudes_;
};

/// Closed-form amplitudes of exp(-i H_AB t)|psi>. Outer amplitudes pick up
/// exp(-+i h0 t) exp(-i J_zz t/4); the middle pair rotates by
/// [cos(J_xx t/2), -i sin(J_xx t/2)] with common phase exp(i J_zz t/4).
/// Throws Error(kModeMismatch) for lambda_a != lambda_b.
ProbeState evolve_amplitudes(const ProbeState& state0, const ProbeParams& params, double t);

struct ReducedDensityMatrix {
  Matrix4c rho = Matrix4c::Zero();
  double t = 0.0;
  /// Z(beta, h - i lambda_A t / beta) / Z(beta, h).
  std::complex<double> r1 = 1.0;
  /// Z(beta, h - i (lambda_A + lambda_B) t / beta) / Z(beta, h); the
  /// 2 lambda t ratio in the symmetric case.
  std::complex<double> r2 = 1.0;
  bool symmetric = true;
  double field_h = 0.0;
};

/// Symmetric coupling: rho_mk = a_m(t) a_k(t)^* R(lambda dm t) with
/// dm = m_A - k_A + m_B - k_B and
/// R(x) = exp(-i N x/2) Q(exp(-beta h + i x)) / Q(exp(-beta h)).
/// At h = 0 the ratios are real; an imaginary residue above 1e-10 throws
/// Error(kNumerical).
ReducedDensityMatrix reduced_density_matrix(const ProbeState& state0,
                                            const ProbeParams& params,
                                            const SectorWeights& weights, double beta,
                                            double t, double field_h = 0.0);

/// Different couplings lambda_A, lambda_B with an Ising probe interaction
/// (J_xx = 0, otherwise Error(kModeMismatch)): amplitudes only gain phases and
/// rho_mk carries R((lambda_A dm_A + lambda_B dm_B) t).
ReducedDensityMatrix evolve_asymmetric(const ProbeState& state0, const ProbeParams& params,
                                       const SectorWeights& weights, double beta, double t,
                                       double field_h = 0.0);

/// |psi><psi|, i.e. the probe state with every bath ratio set to 1.
Matrix4c pure_state_matrix(const ProbeState& state);

struct CorrelationRecord {
  double t = 0.0;
  double xz = 0.0;
  double yz = 0.0;
  double zx = 0.0;
  double zy = 0.0;
  double xx_minus_yy = 0.0;
  double xy_plus_yx = 0.0;
  double zz = 0.0;
  double xx_plus_yy = 0.0;
  double xy_minus_yx = 0.0;
  double sx_sum = 0.0;
  double sy_sum = 0.0;

  double xx() const { return 0.5 * (xx_plus_yy + xx_minus_yy); }
  double yy() const { return 0.5 * (xx_plus_yy - xx_minus_yy); }
  double xy() const { return 0.5 * (xy_plus_yx + xy_minus_yx); }
  double yx() const { return 0.5 * (xy_plus_yx - xy_minus_yx); }
};

/// Correlators from the amplitude/ratio closed forms. These hold for
/// symmetric coupling with real ratios; any other matrix is routed through
/// correlators_from_matrix.
CorrelationRecord correlators(const ReducedDensityMatrix& rdm, const ProbeState& state_t);

/// Tr[rho O] read off the matrix entries, valid for any probe state.
CorrelationRecord correlators_from_matrix(const Matrix4c& rho, double t = 0.0);

struct RingSetup {
  int n_sites = 10;
  double bath_coupling = 1.0;  // J^b
  double probe_coupling = 1.0;  // J (isotropic: J_xx = J_zz = J)
  double lambda = 1.0;
  double beta = 1.0;
  /// Overrides J_zz; the yz signal is r1 sin((J_xx + J_zz) t / 2) / 4.
  std::optional<double> probe_zz;

  ProbeParams params() const {
    return ProbeParams::symmetric(probe_coupling, probe_zz.value_or(probe_coupling), 0.0, lambda);
  }
};

enum class RatioPrecision { kDouble, kExtended };

/// The nearest-neighbour ring bath with the x-projected probe state.
class RingExperiment {
 public:
  explicit RingExperiment(const RingSetup& setup, unsigned threads = 1);

  const RingSetup& setup() const { return setup_; }
  const SectorWeights& weights() const { return weights_; }

  /// Z(beta, -i x / beta) / Z(beta, 0).
  double ratio(double x, RatioPrecision precision = RatioPrecision::kDouble) const;
  ReducedDensityMatrix density_matrix(double t) const;
  CorrelationRecord record(double t) const;
  /// <s_A^y s_B^z>(t) with the requested ratio precision.
  double yz(double t, RatioPrecision precision = RatioPrecision::kDouble) const;
  /// Zeros of the bath-independent prefactor sin((J_xx + J_zz) t / 2) in [t0, t1].
  std::vector<double> prefactor_zeros(double t0, double t1) const;

 private:
  RingSetup setup_;
  SectorWeights weights_;
};

/// Correlation records of the ring experiment over a time grid; "valid for
/// any N": xz = 0 and yz = r1 sin(J t) / 4 for the isotropic coupling.
std::vector<CorrelationRecord> ring_signal(const RingSetup& setup, std::span<const double> times,
                                           unsigned threads = 1);

struct SweepRow {
  double lambda_t = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  CorrelationRecord correlations;
  double concurrence = 0.0;
  bool marked = false;
};

/// CSV header: lambda_t, r1, r2, xz, yz, zx, zy, xx_minus_yy, xy_plus_yx, zz,
/// xx_plus_yy, xy_minus_yx, sx_sum, sy_sum, concurrence, marked. Numbers are
/// written as %.12e. `comment` lines are emitted first, prefixed with '#'.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     std::span<const std::string> comment = {});

}  // namespace lyzero
