#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lyzero/bath.hpp"
#include "lyzero/error.hpp"
#include "lyzero/zeros.hpp"
#include "oracles.hpp"

using namespace lyzero;
using cd = std::complex<double>;

namespace {

SectorWeights ring_weights(int n, double beta) { return enumerate_sector_weights(BathSpec::ring(n, 1.0, beta)); }

std::vector<long double> as_long(const SectorWeights& w) {
  return {w.weights.begin(), w.weights.end()};
}

double circle_residual(const SectorWeights& w, cd z) {
  double peak = 0.0;
  for (int k = 0; k < 4096; ++k) peak = std::max(peak, std::abs(fugacity_polynomial_eval(w, std::polar(1.0, 2 * M_PI * k / 4096))));
  return std::abs(fugacity_polynomial_eval(w, z)) / peak;
}

}  // namespace

TEST_CASE("single spin has its zero at -1") {
  const SectorWeights w{1, {1.0, 1.0}, 0.0};
  const LeeYangZeroSet z = find_zeros(w);
  REQUIRE(z.angles.size() == 1);
  CHECK(z.angles[0] == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(z.radii[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z.multiplicity[0] == 1);
}

TEST_CASE("degenerate infinite-temperature ring") {
  const LeeYangZeroSet z = find_zeros(ring_weights(10, 0.0));
  REQUIRE(z.angles.size() == 1);
  CHECK(z.multiplicity[0] == 10);
  CHECK(std::abs(z.angles[0] - M_PI) < 1e-12);
  for (const cd& r : z.roots) {
    CHECK(std::abs(std::arg(-r)) < 1e-4);
    CHECK(std::abs(std::abs(r) - 1.0) < 1e-8);
  }
  CHECK(z.circle == CircleCheck::kPass);
  CHECK(z.min_angular_gap() == 0.0);
}

TEST_CASE("ring at beta J = 1 against a grid scan of |Q| on the circle") {
  const SectorWeights w = ring_weights(10, 1.0);
  const LeeYangZeroSet z = find_zeros(w);
  REQUIRE(z.angles.size() == 10);
  CHECK(z.total_multiplicity() == 10);
  for (std::size_t i = 0; i < z.angles.size(); ++i) {
    CHECK(z.multiplicity[i] == 1);
    CHECK(std::abs(z.angles[i] - M_PI) > 1e-3);
    CHECK(std::abs(z.radii[i] - 1.0) < 1e-8);
  }

  // Local minima of |Q(e^{i theta})| on a 10^5-point grid.
  const int samples = 100000;
  const auto p = as_long(w);
  std::vector<double> mod(samples);
  for (int s = 0; s < samples; ++s) {
    oracle::cld q = 0.0L;
    const long double th = 2.0L * M_PI * s / samples;
    for (std::size_t k = p.size(); k-- > 0;) q = q * std::polar(1.0L, th) + p[k];
    mod[static_cast<std::size_t>(s)] = static_cast<double>(std::abs(q));
  }
  std::vector<double> minima;
  for (int s = 0; s < samples; ++s) {
    const double prev = mod[static_cast<std::size_t>((s + samples - 1) % samples)];
    const double next = mod[static_cast<std::size_t>((s + 1) % samples)];
    if (mod[static_cast<std::size_t>(s)] < prev && mod[static_cast<std::size_t>(s)] <= next) {
      minima.push_back(2.0 * M_PI * s / samples);
    }
  }
  REQUIRE(minima.size() == 10);
  const double step = 2.0 * M_PI / samples;
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(minima[i] - z.angles[i]) <= step);
  for (double th : z.angles) CHECK(circle_residual(w, std::polar(1.0, th)) < 1e-8);
}

TEST_CASE("root residuals and conjugate pairing on random ferromagnets") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ub(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    BathSpec s = oracle::random_spec(rng, 2 + trial % 11, true);
    s.beta = ub(rng);
    const SectorWeights w = enumerate_sector_weights(s);
    const LeeYangZeroSet z = find_zeros(w);
    CHECK(z.total_multiplicity() == s.n_sites);
    CHECK(z.circle == CircleCheck::kPass);
    for (const cd& r : z.roots) CHECK(circle_residual(w, r) < 1e-8);

    // Degenerate roots are smeared; only simple roots are held to 1e-10.
    if (z.angles.size() == z.roots.size()) {
      for (const cd& r : z.roots) {
        double nearest = INFINITY;
        for (const cd& q : z.roots) nearest = std::min(nearest, std::abs(std::conj(r) - q));
        CHECK(nearest < 1e-10);
      }
    }
  }
}

TEST_CASE("antiferromagnetic zeros leave the circle") {
  BathSpec s;
  s.n_sites = 2;
  s.bonds = {{0, 1, -1.0}};
  s.beta = 2.0;
  ZeroOptions o;
  o.ferromagnetic = s.is_ferromagnetic();
  const LeeYangZeroSet z = find_zeros(enumerate_sector_weights(s), o);
  CHECK(z.circle == CircleCheck::kNotApplicable);
  CHECK(z.max_radius_deviation > 0.5);
  // Both roots real and negative with product 1.
  REQUIRE(z.roots.size() == 2);
  CHECK(std::abs((z.roots[0] * z.roots[1]) - 1.0) < 1e-12);

  // Forcing the ferromagnetic check reports the violation as data.
  o.ferromagnetic = true;
  CHECK(find_zeros(enumerate_sector_weights(s), o).circle == CircleCheck::kFail);

  // A larger frustrated ring.
  BathSpec ring = BathSpec::ring(6, -1.0, 3.0);
  o.ferromagnetic = false;
  CHECK(find_zeros(enumerate_sector_weights(ring), o).max_radius_deviation > 1e-3);
}

TEST_CASE("polynomial roots of known polynomials") {
  const double c[] = {-6.0, 1.0, 1.0};  // (z - 2)(z + 3)
  auto r = polynomial_roots(c);
  std::sort(r.begin(), r.end(), [](cd a, cd b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] - cd(-3.0)) < 1e-14);
  CHECK(std::abs(r[1] - cd(2.0)) < 1e-14);

  const double trailing[] = {1.0, 1.0, 0.0, 0.0};
  CHECK(polynomial_roots(trailing).size() == 1);

  const double zeros_only[] = {0.0, 0.0};
  CHECK_THROWS_AS(polynomial_roots(zeros_only), Error);
  const double constant[] = {2.0};
  CHECK_THROWS_AS(polynomial_roots(constant), Error);
  CHECK_THROWS_AS(find_zeros(SectorWeights{2, {0.0, 0.0, 0.0}, 0.0}), Error);
}

TEST_CASE("degenerate roots stay resolved at high degree") {
  const SectorWeights w = ring_weights(20, 0.0);
  const LeeYangZeroSet z = find_zeros(w);
  REQUIRE(z.angles.size() == 1);
  CHECK(z.multiplicity[0] == 20);
  CHECK(z.max_radius_deviation < 1e-8);
}

TEST_CASE("zero times") {
  LeeYangZeroSet z;
  z.angles = {M_PI};
  z.radii = {1.0};
  z.multiplicity = {1};
  CHECK(zero_times(z, 1.0, 1).times[0] == doctest::Approx(M_PI));
  CHECK(zero_times(z, 1.0, 2).times[0] == doctest::Approx(M_PI / 2));
  CHECK(zero_times(z, 2.0, -2).times[0] == doctest::Approx(M_PI / 4));
  CHECK_THROWS_AS(zero_times(z, 1.0, 3), Error);
  CHECK_THROWS_AS(zero_times(z, 0.0, 1), Error);

  const LeeYangZeroSet ring = find_zeros(ring_weights(10, 1.0));
  const ZeroTimes t1 = zero_times(ring, 1.0, 1);
  const ZeroTimes t2 = zero_times(ring, 1.0, 2);
  CHECK(std::is_sorted(t1.times.begin(), t1.times.end()));
  for (std::size_t i = 0; i < t1.times.size(); ++i) {
    CHECK(t1.times[i] == doctest::Approx(ring.angles[i]));
    CHECK(t2.times[i] == doctest::Approx(0.5 * t1.times[i]));
    CHECK(t1.times[i] > 0.0);
  }
}

TEST_CASE("product form of the ratio") {
  const SectorWeights w = ring_weights(10, 1.0);
  const LeeYangZeroSet z = find_zeros(w);
  CHECK(ratio_product_form(z, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double th : z.angles) CHECK(std::abs(ratio_product_form(z, th)) < 1e-14);

  const double direct = partition_ratio(w, 1.0, 0.0, 0.7).real();
  CHECK(std::abs(ratio_product_form(z, 0.7) - direct) < 1e-10);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng);
    CHECK(std::abs(ratio_product_form(z, x) - partition_ratio(w, 1.0, 0.0, x).real()) < 1e-10);
  }

  // The degenerate point: the product form carries multiplicity.
  const LeeYangZeroSet z0 = find_zeros(ring_weights(10, 0.0));
  CHECK(ratio_product_form(z0, 1.1) == doctest::Approx(std::pow(std::cos(0.55), 10)).epsilon(1e-10));

  LeeYangZeroSet bad;
  bad.angles = {1e-14};
  bad.radii = {1.0};
  bad.multiplicity = {1};
  try {
    ratio_product_form(bad, 0.3);
    FAIL("expected ZeroAtUnity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroAtUnity);
  }
}

TEST_CASE("signal detection: degenerate envelope") {
  std::vector<SignalSample> s;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 2 * M_PI * i / 2000;
    s.push_back({t, std::pow(std::abs(std::cos(0.5 * t)), 10)});
  }
  DetectionOptions o;
  o.threshold = 1e-3;
  const auto d = detect_zeros_from_signal(s, o);
  REQUIRE(d.size() == 1);
  CHECK(std::abs(d[0].t - M_PI) < 1e-3);
  CHECK_FALSE(d[0].masked);
}

TEST_CASE("signal detection: constant and short inputs") {
  std::vector<SignalSample> s;
  for (int i = 0; i < 100; ++i) s.push_back({0.01 * i, 0.3});
  CHECK(detect_zeros_from_signal(s, {}).empty());
  CHECK(detect_zeros_from_signal(std::span<const SignalSample>(s).first(2), {}).empty());
}

TEST_CASE("signal detection recovers zero times and masks prefactor zeros") {
  const SectorWeights w = ring_weights(10, 1.0);
  const LeeYangZeroSet z = find_zeros(w);
  const ZeroTimes times = zero_times(z, 1.0, 1);

  auto run = [&](double j) {
    auto f = [&, j](double t) { return 0.25 * std::sin(j * t) * zero_field_ratio_extended(w, t); };
    std::vector<SignalSample> s;
    for (int i = 0; i <= 4000; ++i) {
      const double t = 2 * M_PI * i / 4000;
      s.push_back({t, f(t)});
    }
    DetectionOptions o;
    o.threshold = 1e-2;
    o.refine_tol = 1e-6;
    o.refine = f;
    for (double k = 1; k * M_PI / j <= 2 * M_PI; k += 1) o.masking_times.push_back(k * M_PI / j);
    return detect_zeros_from_signal(s, o);
  };

  const auto d = run(1.0 / (2 * M_PI));
  REQUIRE(d.size() == times.times.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(d[i].t - times.times[i]) <= 1e-6);
    CHECK_FALSE(d[i].masked);
  }

  // Choose J so that sin(J t) vanishes exactly at the third zero time.
  // sin(J t) then also vanishes at 2 t_3 and 3 t_3; those are masked too.
  const double j = M_PI / times.times[2];
  const auto dm = run(j);
  bool third_masked = false;
  for (const auto& x : dm) {
    const double k = std::round(x.t * j / M_PI);
    CHECK(x.masked == (k >= 1 && std::abs(x.t - k * M_PI / j) <= 1e-6));
    if (!x.masked) {
      double nearest = INFINITY;
      for (double t : times.times) nearest = std::min(nearest, std::abs(t - x.t));
      CHECK(nearest <= 1e-6);
    }
    third_masked |= x.masked && std::abs(x.t - times.times[2]) <= 1e-6;
  }
  CHECK(third_masked);
}

TEST_CASE("signal csv") {
  std::istringstream in("# comment\nt,value\n0,1\n0.5,0.2\n1.0,-0.3\n");
  const auto s = read_signal_csv(in);
  REQUIRE(s.size() == 3);
  CHECK(s[2].value == doctest::Approx(-0.3));

  std::istringstream unsorted("1,0\n0,1\n");
  CHECK_THROWS_AS(read_signal_csv(unsorted), Error);
  std::istringstream garbage("0,1\nx,y\n");
  CHECK_THROWS_AS(read_signal_csv(garbage), Error);
}

TEST_CASE("zero set json round trip") {
  const LeeYangZeroSet z = find_zeros(ring_weights(8, 2.0));
  nlohmann::json j = z;
  const auto back = j.get<LeeYangZeroSet>();
  CHECK(back.angles == z.angles);
  CHECK(back.radii == z.radii);
  CHECK(back.multiplicity == z.multiplicity);
  CHECK(back.n_sites == 8);
}

TEST_CASE("minimum angular gap grows as the ring cools") {
  double previous = -1.0;
  for (double beta : {0.0, 1.0, 4.0, 8.0}) {
    const double gap = find_zeros(ring_weights(10, beta)).min_angular_gap();
    CHECK(gap > previous);
    previous = gap;
  }
}

TEST_CASE("isolated spins give an exact multiple zero at -1") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int isolated = 1; isolated <= 6; ++isolated) {
    BathSpec s;
    s.n_sites = 12;
    s.beta = 1.7;
    for (int i = 0; i + 1 < 12 - isolated; ++i) s.bonds.push_back({i, i + 1, u(rng)});
    const LeeYangZeroSet z = find_zeros(enumerate_sector_weights(s));
    CHECK(z.circle == CircleCheck::kPass);
    CHECK(z.max_radius_deviation <= 1e-10);
    CHECK(z.total_multiplicity() == 12);
    // The chain part has odd degree when 12 - isolated is odd.
    const int expected = isolated + ((12 - isolated) % 2);
    int at_pi = 0;
    for (std::size_t k = 0; k < z.angles.size(); ++k) {
      if (std::abs(z.angles[k] - M_PI) < 1e-12) at_pi = z.multiplicity[k];
    }
    CHECK(at_pi == expected);
  }
}

TEST_CASE("a simple zero next to -1 is not absorbed") {
  // Roots e^{+-i(pi - d)}: z^2 - 2 cos(pi - d) z + 1.
  const double d = 1e-4;
  const std::vector<double> c = {1.0, -2.0 * std::cos(M_PI - d), 1.0};
  const LeeYangZeroSet z = find_zeros(SectorWeights{2, c, 0.0});
  REQUIRE(z.angles.size() == 2);
  CHECK(z.angles[0] == doctest::Approx(M_PI - d).epsilon(1e-10));
  CHECK(z.angles[1] == doctest::Approx(M_PI + d).epsilon(1e-10));
}
