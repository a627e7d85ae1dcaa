#include "lyzero/probe.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "lyzero/error.hpp"
#include "lyzero/parallel.hpp"

namespace lyzero {

namespace {

using cd = std::complex<double>;

constexpr double kImagResidueTol = 1e-10;

// Ratios at h = 0 are real by the conjugate symmetry of the zeros; check it
// rather than assume it.
cd checked_ratio(const SectorWeights& weights, double beta, double field_h, double x) {
  cd r = partition_ratio(weights, beta, field_h, x);
  if (field_h == 0.0) {
    if (std::abs(r.imag()) > kImagResidueTol) {
      throw Error(ErrorCode::kNumerical,
                  "zero-field ratio has imaginary residue " + std::to_string(r.imag()));
    }
    r = cd(r.real(), 0.0);
  }
  return r;
}

ProbeState phase_evolve(const ProbeState& s, const ProbeParams& p, double t) {
  const cd outer = std::polar(1.0, -0.25 * p.j_zz * t);
  const cd middle = std::polar(1.0, 0.25 * p.j_zz * t);
  const double c = std::cos(0.5 * p.j_xx * t);
  const cd is(0.0, std::sin(0.5 * p.j_xx * t));
  return ProbeState(ProbeState::Amplitudes{
                        s[kUpUp] * std::polar(1.0, -p.h0 * t) * outer,
                        middle * (s[kUpDown] * c - is * s[kDownUp]),
                        middle * (s[kDownUp] * c - is * s[kUpDown]),
                        s[kDownDown] * std::polar(1.0, p.h0 * t) * outer,
                    },
                    1e-10);
}

template <typename RatioOf>
Matrix4c dress(const ProbeState& a, RatioOf&& ratio_of) {
  Matrix4c rho;
  for (int m = 0; m < 4; ++m) {
    for (int k = 0; k < 4; ++k) {
      rho(m, k) = a[m] * std::conj(a[k]) * ratio_of(m, k);
    }
  }
  return rho;
}

}  // namespace

ProbeState::ProbeState(const Amplitudes& amplitudes, double norm_tol) : amplitudes_(amplitudes) {
  const double n2 = norm_squared();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > norm_tol) {
    throw Error(ErrorCode::kInvalidState,
                "probe amplitudes have squared norm " + std::to_string(n2));
  }
}

ProbeState ProbeState::normalized(Amplitudes amplitudes) {
  double n2 = 0.0;
  for (const auto& a : amplitudes) n2 += std::norm(a);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw Error(ErrorCode::kInvalidState, "cannot normalize a zero state");
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : amplitudes) a *= inv;
  return ProbeState(amplitudes);
}

ProbeState ProbeState::x_projected() {
  return ProbeState(Amplitudes{0.5, -0.5, 0.5, -0.5});
}

Vector4c ProbeState::vector() const {
  return Vector4c(amplitudes_[0], amplitudes_[1], amplitudes_[2], amplitudes_[3]);
}

double ProbeState::norm_squared() const {
  double n2 = 0.0;
  for (const auto& a : amplitudes_) n2 += std::norm(a);
  return n2;
}

ProbeState evolve_amplitudes(const ProbeState& state0, const ProbeParams& params, double t) {
  if (!params.is_symmetric()) {
    throw Error(ErrorCode::kModeMismatch,
                "closed-form amplitudes need lambda_a == lambda_b; use evolve_asymmetric");
  }
  return phase_evolve(state0, params, t);
}

ReducedDensityMatrix reduced_density_matrix(const ProbeState& state0, const ProbeParams& params,
                                            const SectorWeights& weights, double beta, double t,
                                            double field_h) {
  const ProbeState a = evolve_amplitudes(state0, params, t);
  const double lambda = params.lambda_a;
  // Index by dm + 2 for dm in [-2, 2]; R(-dm) = conj(R(dm)) only at h = 0,
  // so every jump is evaluated.
  std::array<cd, 5> ratio{};
  for (int dm = -2; dm <= 2; ++dm) {
    ratio[static_cast<std::size_t>(dm + 2)] =
        dm == 0 ? cd(1.0) : checked_ratio(weights, beta, field_h, lambda * dm * t);
  }
  ReducedDensityMatrix out;
  out.t = t;
  out.field_h = field_h;
  out.symmetric = true;
  out.r1 = ratio[3];
  out.r2 = ratio[4];
  out.rho = dress(a, [&](int m, int k) {
    const int dm = (kSpinA2[m] - kSpinA2[k] + kSpinB2[m] - kSpinB2[k]) / 2;
    return ratio[static_cast<std::size_t>(dm + 2)];
  });
  return out;
}

ReducedDensityMatrix evolve_asymmetric(const ProbeState& state0, const ProbeParams& params,
                                       const SectorWeights& weights, double beta, double t,
                                       double field_h) {
  if (params.j_xx != 0.0) {
    throw Error(ErrorCode::kModeMismatch,
                "unequal bath couplings require an Ising probe interaction (j_xx = 0)");
  }
  const ProbeState a = phase_evolve(state0, params, t);
  auto ratio_at = [&](int dm_a, int dm_b) {
    if (dm_a == 0 && dm_b == 0) return cd(1.0);
    return checked_ratio(weights, beta, field_h,
                         (params.lambda_a * dm_a + params.lambda_b * dm_b) * t);
  };
  // Jumps of each probe take values in {-1, 0, 1}.
  std::array<std::array<cd, 3>, 3> ratio{};
  for (int da = -1; da <= 1; ++da) {
    for (int db = -1; db <= 1; ++db) {
      ratio[static_cast<std::size_t>(da + 1)][static_cast<std::size_t>(db + 1)] = ratio_at(da, db);
    }
  }
  ReducedDensityMatrix out;
  out.t = t;
  out.field_h = field_h;
  out.symmetric = params.is_symmetric();
  out.r1 = ratio[2][1];
  out.r2 = ratio[2][2];
  out.rho = dress(a, [&](int m, int k) {
    const int da = (kSpinA2[m] - kSpinA2[k]) / 2;
    const int db = (kSpinB2[m] - kSpinB2[k]) / 2;
    return ratio[static_cast<std::size_t>(da + 1)][static_cast<std::size_t>(db + 1)];
  });
  return out;
}

Matrix4c pure_state_matrix(const ProbeState& state) {
  const Vector4c v = state.vector();
  return v * v.adjoint();
}

CorrelationRecord correlators_from_matrix(const Matrix4c& rho, double t) {
  CorrelationRecord c;
  c.t = t;
  c.xz = 0.5 * (rho(0, 2) - rho(1, 3)).real();
  c.yz = 0.5 * (rho(1, 3).imag() - rho(0, 2).imag());
  c.zx = 0.5 * (rho(0, 1) - rho(2, 3)).real();
  c.zy = 0.5 * (rho(2, 3).imag() - rho(0, 1).imag());
  c.xx_minus_yy = rho(0, 3).real();
  c.xy_plus_yx = -rho(0, 3).imag();
  c.zz = 0.25 * (rho(0, 0) - rho(1, 1) - rho(2, 2) + rho(3, 3)).real();
  c.xx_plus_yy = rho(1, 2).real();
  c.xy_minus_yx = rho(1, 2).imag();
  c.sx_sum = (rho(0, 1) + rho(0, 2) + rho(1, 3) + rho(2, 3)).real();
  c.sy_sum = -(rho(0, 1) + rho(0, 2) + rho(1, 3) + rho(2, 3)).imag();
  return c;
}

CorrelationRecord correlators(const ReducedDensityMatrix& rdm, const ProbeState& a) {
  if (!rdm.symmetric || rdm.r1.imag() != 0.0 || rdm.r2.imag() != 0.0) {
    return correlators_from_matrix(rdm.rho, rdm.t);
  }
  const double r1 = rdm.r1.real();
  const double r2 = rdm.r2.real();
  const cd uu = a[kUpUp], ud = a[kUpDown], du = a[kDownUp], dd = a[kDownDown];

  CorrelationRecord c;
  c.t = rdm.t;
  c.xz = 0.5 * r1 * (std::conj(uu) * du - ud * std::conj(dd)).real();
  c.yz = 0.5 * r1 * (std::conj(uu) * du + ud * std::conj(dd)).imag();
  c.zx = 0.5 * r1 * (std::conj(uu) * ud - du * std::conj(dd)).real();
  c.zy = 0.5 * r1 * (std::conj(uu) * ud + du * std::conj(dd)).imag();
  c.xx_minus_yy = r2 * (std::conj(uu) * dd).real();
  c.xy_plus_yx = r2 * (std::conj(uu) * dd).imag();
  c.zz = 0.25 * (std::norm(uu) - std::norm(ud) - std::norm(du) + std::norm(dd));
  c.xx_plus_yy = (ud * std::conj(du)).real();
  c.xy_minus_yx = (ud * std::conj(du)).imag();
  c.sx_sum = r1 * ((uu + dd) * (std::conj(ud) + std::conj(du))).real();
  c.sy_sum = -r1 * ((uu - dd) * (std::conj(ud) + std::conj(du))).imag();
  return c;
}

RingExperiment::RingExperiment(const RingSetup& setup, unsigned threads) : setup_(setup) {
  EnumerationOptions options;
  options.threads = threads;
  weights_ = enumerate_sector_weights(
      BathSpec::ring(setup.n_sites, setup.bath_coupling, setup.beta), options);
}

double RingExperiment::ratio(double x, RatioPrecision precision) const {
  if (precision == RatioPrecision::kExtended) return zero_field_ratio_extended(weights_, x);
  return checked_ratio(weights_, setup_.beta, 0.0, x).real();
}

ReducedDensityMatrix RingExperiment::density_matrix(double t) const {
  return reduced_density_matrix(ProbeState::x_projected(), setup_.params(), weights_,
                                setup_.beta, t);
}

CorrelationRecord RingExperiment::record(double t) const {
  const ReducedDensityMatrix rdm = density_matrix(t);
  return correlators(rdm, evolve_amplitudes(ProbeState::x_projected(), setup_.params(), t));
}

double RingExperiment::yz(double t, RatioPrecision precision) const {
  const ProbeState a = evolve_amplitudes(ProbeState::x_projected(), setup_.params(), t);
  const double r1 = ratio(setup_.lambda * t, precision);
  return 0.5 * r1 *
         (std::conj(a[kUpUp]) * a[kDownUp] + a[kUpDown] * std::conj(a[kDownDown])).imag();
}

std::vector<double> RingExperiment::prefactor_zeros(double t0, double t1) const {
  const ProbeParams p = setup_.params();
  const double rate = 0.5 * (p.j_xx + p.j_zz);
  std::vector<double> out;
  if (rate == 0.0) return out;
  const double period = std::numbers::pi / std::abs(rate);
  for (double k = std::ceil(t0 / period); k * period <= t1; k += 1.0) {
    out.push_back(k * period);
  }
  return out;
}

std::vector<CorrelationRecord> ring_signal(const RingSetup& setup, std::span<const double> times,
                                           unsigned threads) {
  const RingExperiment experiment(setup, threads);
  std::vector<CorrelationRecord> out(times.size());
  parallel_for(times.size(), threads, [&](std::size_t i) { out[i] = experiment.record(times[i]); });
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     std::span<const std::string> comment) {
  for (const auto& line : comment) out << "# " << line << '\n';
  out << "lambda_t,r1,r2,xz,yz,zx,zy,xx_minus_yy,xy_plus_yx,zz,xx_plus_yy,xy_minus_yx,"
         "sx_sum,sy_sum,concurrence,marked\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12e", v);
    out << buf;
  };
  for (const auto& r : rows) {
    const auto& c = r.correlations;
    for (double v : {r.lambda_t, r.r1, r.r2, c.xz, c.yz, c.zx, c.zy, c.xx_minus_yy,
                     c.xy_plus_yx, c.zz, c.xx_plus_yy, c.xy_minus_yx, c.sx_sum, c.sy_sum,
                     r.concurrence}) {
      num(v);
      out << ',';
    }
    out << (r.marked ? 1 : 0) << '\n';
  }
}

}  // namespace lyzero
