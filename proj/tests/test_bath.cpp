#include <doctest.h>

#include <cmath>
#include <random>

#include "lyzero/bath.hpp"
#include "lyzero/error.hpp"
#include "oracles.hpp"

using namespace lyzero;
using cd = std::complex<double>;

namespace {

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("ring builder handles small N") {
  CHECK(BathSpec::ring(1, 1.0, 0.0).bonds.empty());
  CHECK(BathSpec::ring(2, 1.0, 0.0).bonds.size() == 1);
  CHECK(BathSpec::ring(3, 1.0, 0.0).bonds.size() == 3);
  CHECK(BathSpec::ring(10, 1.0, 0.0).bonds.size() == 10);
}

TEST_CASE("spec validation") {
  BathSpec s = BathSpec::ring(4, 1.0, 1.0);
  CHECK_NOTHROW(s.validate());

  BathSpec bad = s;
  bad.bonds.push_back({0, 0, 1.0});
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = s;
  bad.bonds.push_back({1, 0, 0.5});  // reversed duplicate of (0, 1)
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = s;
  bad.bonds.push_back({0, 7, 0.5});
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = s;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = s;
  bad.bonds[0].coupling = NAN;
  CHECK_THROWS_AS(bad.validate(), Error);

  try {
    bad.validate();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidSpec);
  }
}

TEST_CASE("enumeration respects the size cap") {
  EnumerationOptions o;
  o.cap = 8;
  try {
    enumerate_sector_weights(BathSpec::ring(9, 1.0, 1.0), o);
    FAIL("expected SizeExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSizeExceeded);
  }
  CHECK_NOTHROW(enumerate_sector_weights(BathSpec::ring(8, 1.0, 1.0), o));
}

TEST_CASE("three-site ring by hand") {
  const SectorWeights w = enumerate_sector_weights(BathSpec::ring(3, 1.0, 1.0));
  REQUIRE(w.weights.size() == 4);
  const double expected[] = {std::exp(0.75), 3.0 * std::exp(-0.25), 3.0 * std::exp(-0.25), std::exp(0.75)};
  for (int n = 0; n < 4; ++n) CHECK(w.unscaled(n) == doctest::Approx(expected[n]).epsilon(1e-14));
}

TEST_CASE("infinite temperature gives binomial counts") {
  for (int n : {1, 2, 5, 10, 14}) {
    const SectorWeights w = enumerate_sector_weights(BathSpec::ring(n, 1.0, 0.0));
    for (int k = 0; k <= n; ++k) CHECK(w.unscaled(k) == doctest::Approx(oracle::binomial(n, k)).epsilon(1e-14));
  }
}

TEST_CASE("fugacity polynomial examples") {
  SectorWeights one{1, {1.0, 1.0}, 0.0};
  CHECK(std::abs(fugacity_polynomial_eval(one, -1.0)) < 1e-15);
  SectorWeights three{3, {1.0, 3.0, 3.0, 1.0}, 0.0};
  CHECK(std::abs(fugacity_polynomial_eval(three, 1.0) - 8.0) < 1e-14);

  const BathSpec ring = BathSpec::ring(10, 1.0, 1.0);
  const SectorWeights w = enumerate_sector_weights(ring);
  const cd z = std::polar(1.0, M_PI / 5);
  cd direct = 0.0;
  for (std::uint64_t m = 0; m < 1024; ++m) {
    direct += std::exp(-static_cast<double>(oracle::config_energy(ring, m))) *
              std::pow(z, __builtin_popcountll(m));
  }
  CHECK(rel(fugacity_polynomial_eval(w, z, Scaling::kUnscaled), direct) < 1e-12);
}

TEST_CASE("enumeration matches direct configuration sums") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ub(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 11;
    BathSpec s = oracle::random_spec(rng, n, trial % 3 != 0);
    const double beta = ub(rng);
    const SectorWeights w = enumerate_sector_weights(s);
    s.beta = beta;
    const SectorWeights wb = enumerate_sector_weights(s);
    const auto ref = oracle::sector_weights(s, beta);
    for (int k = 0; k <= n; ++k) {
      CHECK(wb.unscaled(k) == doctest::Approx(static_cast<double>(ref[static_cast<std::size_t>(k)])).epsilon(1e-12));
    }
    CHECK(w.weights.size() == static_cast<std::size_t>(n + 1));
  }
}

TEST_CASE("multithreaded enumeration is deterministic") {
  BathSpec s = BathSpec::ring(16, 1.3, 2.0);
  EnumerationOptions one, four;
  four.threads = 4;
  const SectorWeights a = enumerate_sector_weights(s, one);
  const SectorWeights b = enumerate_sector_weights(s, four);
  CHECK(a.weights == b.weights);
  CHECK(a.scale == b.scale);
}

TEST_CASE("sector weights satisfy their contract") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ub(0.0, 8.0);
  for (int trial = 0; trial < 60; ++trial) {
    BathSpec s = oracle::random_spec(rng, 2 + trial % 11, trial % 2 == 0);
    s.beta = ub(rng);
    const SectorWeights w = enumerate_sector_weights(s);
    CHECK(check_sector_weights(w).empty());
    for (int k = 0; k <= w.degree(); ++k) CHECK(w.weights[static_cast<std::size_t>(k)] == w.weights[static_cast<std::size_t>(w.degree() - k)]);
  }
}

TEST_CASE("corrupted weights are named") {
  SectorWeights w = enumerate_sector_weights(BathSpec::ring(6, 1.0, 1.0));
  w.weights[1] *= 1.5;
  auto v = check_sector_weights(w);
  REQUIRE(!v.empty());
  CHECK(v[0].invariant == "flip_symmetry");

  w = enumerate_sector_weights(BathSpec::ring(6, 1.0, 1.0));
  w.weights[2] = w.weights[4] = -1.0;
  v = check_sector_weights(w);
  REQUIRE(!v.empty());
  CHECK(v[0].invariant == "nonnegative");

  w.weights.pop_back();
  v = check_sector_weights(w);
  REQUIRE(!v.empty());
  CHECK(v[0].invariant == "sector_count");
}

TEST_CASE("large beta stays representable through the scale factor") {
  BathSpec s = BathSpec::ring(12, 1.0, 50.0);
  const SectorWeights w = enumerate_sector_weights(s);
  CHECK(std::isfinite(w.scale));
  CHECK(w.weights.front() == doctest::Approx(1.0));
  // Q(1) e^scale reproduces Z(beta, 0): compare logs to avoid overflow.
  const double log_z = std::log(std::abs(fugacity_polynomial_eval(w, 1.0))) + w.scale;
  const double ref = 12.0 * std::log(2.0 * std::cosh(12.5)) +
                     std::log1p(std::pow(std::tanh(12.5), 12));
  CHECK(log_z == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("Q of a conjugate is the conjugate") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const SectorWeights w = enumerate_sector_weights(BathSpec::ring(9, 0.7, 1.7));
  for (int i = 0; i < 50; ++i) {
    const cd z(u(rng), u(rng));
    CHECK(std::abs(fugacity_polynomial_eval(w, std::conj(z)) - std::conj(fugacity_polynomial_eval(w, z))) <=
          1e-14 * std::abs(fugacity_polynomial_eval(w, z)) + 1e-300);
  }
}

TEST_CASE("partition function at real and complex fields") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    BathSpec s = oracle::random_spec(rng, 3 + trial % 8, true);
    const double beta = 1.0 + u(rng);
    const SectorWeights w = enumerate_sector_weights([&] { auto c = s; c.beta = beta; return c; }());
    const cd h(u(rng), u(rng));
    const cd ours = partition_function(w, beta, h);
    const auto ref = oracle::partition_function(s, beta, h);
    CHECK(rel(ours, cd(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))) < 1e-11);
  }
}

TEST_CASE("transfer matrix examples") {
  for (int n : {3, 7, 12}) {
    CHECK(std::abs(transfer_matrix_partition(n, 1.3, 0.0, cd(0.4, -2.0)) - std::pow(2.0, n)) < 1e-9);
  }
  const double beta = 1.0;
  const double expected = std::exp(2.5) * (std::pow(1.0 + std::exp(-0.5), 10) + std::pow(1.0 - std::exp(-0.5), 10));
  CHECK(rel(transfer_matrix_partition(10, 1.0, beta, 0.0), expected) < 1e-13);
  CHECK(rel(transfer_matrix_partition(10, 1.0, beta, 0.0), oracle::ring_zero_field(10, 1.0, beta)) < 1e-13);

  const SectorWeights w = enumerate_sector_weights(BathSpec::ring(10, 1.0, beta));
  const cd h(0.0, -1.3 / beta);
  CHECK(rel(transfer_matrix_partition(10, 1.0, beta, h), partition_function(w, beta, h)) < 1e-10);

  try {
    transfer_matrix_partition(2, 1.0, 1.0, 0.0);
    FAIL("expected TopologyUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTopologyUnsupported);
  }
}

TEST_CASE("ratio is real at zero field and matches its extended evaluation") {
  const SectorWeights w = enumerate_sector_weights(BathSpec::ring(10, 1.0, 4.0));
  for (double x = 0.05; x < 6.3; x += 0.37) {
    const cd r = partition_ratio(w, 4.0, 0.0, x);
    CHECK(std::abs(r.imag()) < 1e-13);
    CHECK(r.real() == doctest::Approx(zero_field_ratio_extended(w, x)).epsilon(1e-12));
  }
  // At beta = 0 the ratio is cos^N(x/2) exactly.
  const SectorWeights w0 = enumerate_sector_weights(BathSpec::ring(10, 1.0, 0.0));
  for (double x : {0.3, 1.0, 2.9, 3.1415, M_PI}) {
    const double ref = std::pow(std::cos(0.5 * x), 10);
    CHECK(std::abs(zero_field_ratio_extended(w0, x) - ref) <= 1e-13 * ref + 1e-90);
  }
}

TEST_CASE("json round trips") {
  const BathSpec ring = BathSpec::ring(5, 0.8, 1.5, 0.1);
  nlohmann::json j = ring;
  CHECK(j.get<BathSpec>() == ring);

  const auto shortcut = nlohmann::json::parse(R"({"topology":"ring","n_sites":4,"coupling":2.0,"beta":0.5})");
  CHECK(shortcut.get<BathSpec>() == BathSpec::ring(4, 2.0, 0.5));

  const auto malformed = nlohmann::json::parse(R"({"n_sites":3,"bonds":[[0,1]]})");
  CHECK_THROWS_AS(malformed.get<BathSpec>(), Error);

  const SectorWeights w = enumerate_sector_weights(BathSpec::ring(6, 1.0, 2.0));
  nlohmann::json jw = w;
  const auto back = jw.get<SectorWeights>();
  CHECK(back.weights == w.weights);
  CHECK(back.scale == w.scale);
}
