#include "lyzero/bath.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "extended.hpp"
#include "lyzero/error.hpp"
#include "lyzero/parallel.hpp"

namespace lyzero {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

constexpr std::size_t kEnumerationChunks = 256;

}  // namespace

BathSpec BathSpec::ring(int n_sites, double coupling, double beta,
                        double field_h) {
  BathSpec spec;
  spec.n_sites = n_sites;
  spec.beta = beta;
  spec.field_h = field_h;
  if (n_sites == 2) {
    spec.bonds.push_back({0, 1, coupling});
  } else if (n_sites >= 3) {
    for (int i = 0; i < n_sites; ++i) {
      spec.bonds.push_back({i, (i + 1) % n_sites, coupling});
    }
  }
  return spec;
}

void BathSpec::validate() const {
  if (n_sites <= 0) {
    throw Error(ErrorCode::kInvalidSpec, "n_sites must be positive");
  }
  if (n_sites > 63) {
    throw Error(ErrorCode::kInvalidSpec, "n_sites must fit a 64-bit mask");
  }
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::kInvalidSpec, "beta must be finite and >= 0");
  }
  if (!std::isfinite(field_h)) {
    throw Error(ErrorCode::kInvalidSpec, "field_h must be finite");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& b : bonds) {
    if (b.i < 0 || b.i >= n_sites || b.j < 0 || b.j >= n_sites) {
      throw Error(ErrorCode::kInvalidSpec,
                  "bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) +
                      ") out of range for " + std::to_string(n_sites) +
                      " sites");
    }
    if (b.i == b.j) {
      throw Error(ErrorCode::kInvalidSpec,
                  "self-bond on site " + std::to_string(b.i));
    }
    if (!std::isfinite(b.coupling)) {
      throw Error(ErrorCode::kInvalidSpec, "non-finite coupling");
    }
    if (!seen.emplace(std::min(b.i, b.j), std::max(b.i, b.j)).second) {
      throw Error(ErrorCode::kInvalidSpec,
                  "duplicate bond (" + std::to_string(b.i) + ", " +
                      std::to_string(b.j) + ")");
    }
  }
}

bool BathSpec::is_ferromagnetic() const {
  return std::all_of(bonds.begin(), bonds.end(),
                     [](const Bond& b) { return b.coupling >= 0.0; });
}

double SectorWeights::unscaled(int n) const {
  return weights.at(static_cast<std::size_t>(n)) * std::exp(scale);
}

double zero_field_energy(std::span<const Bond> bonds, std::uint64_t down_mask) {
  // s_i s_j = +1/4 for aligned sites, -1/4 otherwise.
  double energy = 0.0;
  for (const auto& b : bonds) {
    const bool anti = ((down_mask >> b.i) ^ (down_mask >> b.j)) & 1u;
    energy += anti ? 0.25 * b.coupling : -0.25 * b.coupling;
  }
  return energy;
}

SectorWeights enumerate_sector_weights(const BathSpec& spec,
                                       const EnumerationOptions& options) {
  spec.validate();
  if (spec.n_sites > options.cap) {
    throw Error(ErrorCode::kSizeExceeded,
                std::to_string(spec.n_sites) + " sites exceeds enumeration cap " +
                    std::to_string(options.cap));
  }
  const int n = spec.n_sites;
  const double beta = spec.beta;
  const std::span<const Bond> bonds(spec.bonds);

  // Only masks with the top site up are visited; the global flip partner has
  // the same energy and lands in sector n - popcount, which makes the
  // p_n = p_{N-n} symmetry exact in floating point.
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  const std::size_t chunks =
      static_cast<std::size_t>(std::min<std::uint64_t>(half, kEnumerationChunks));
  const std::uint64_t chunk_len = (half + chunks - 1) / chunks;
  auto chunk_range = [&](std::size_t c) {
    const std::uint64_t lo = c * chunk_len;
    return std::pair{lo, std::min(half, lo + chunk_len)};
  };

  std::vector<double> chunk_max(chunks, -std::numeric_limits<double>::infinity());
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    auto [lo, hi] = chunk_range(c);
    double m = chunk_max[c];
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      m = std::max(m, -beta * zero_field_energy(bonds, mask));
    }
    chunk_max[c] = m;
  });
  const double scale = *std::max_element(chunk_max.begin(), chunk_max.end());

  std::vector<std::vector<CompensatedSum>> partial(
      chunks, std::vector<CompensatedSum>(static_cast<std::size_t>(n) + 1));
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    auto [lo, hi] = chunk_range(c);
    auto& acc = partial[c];
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      const double w = std::exp(-beta * zero_field_energy(bonds, mask) - scale);
      const int down = std::popcount(mask);
      acc[static_cast<std::size_t>(down)].add(w);
      acc[static_cast<std::size_t>(n - down)].add(w);
    }
  });

  SectorWeights out;
  out.n_sites = n;
  out.scale = scale;
  out.weights.resize(static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
    CompensatedSum total;
    for (std::size_t c = 0; c < chunks; ++c) {
      total.add(partial[c][k].sum);
      total.add(partial[c][k].carry);
    }
    out.weights[k] = total.value();
  }
  return out;
}

std::complex<double> fugacity_polynomial_eval(const SectorWeights& weights,
                                              std::complex<double> z,
                                              Scaling scaling) {
  std::complex<double> acc = 0.0;
  for (auto it = weights.weights.rbegin(); it != weights.weights.rend(); ++it) {
    acc = acc * z + *it;
  }
  if (scaling == Scaling::kUnscaled) acc *= std::exp(weights.scale);
  return acc;
}

std::complex<double> partition_function(const SectorWeights& weights,
                                        double beta, std::complex<double> h) {
  const double spin_total = 0.5 * weights.n_sites;
  return std::exp(beta * spin_total * h) *
         fugacity_polynomial_eval(weights, std::exp(-beta * h),
                                  Scaling::kUnscaled);
}

std::complex<double> partition_ratio(const SectorWeights& weights, double beta,
                                     double field_h, double x) {
  const double fugacity = std::exp(-beta * field_h);
  const std::complex<double> num = fugacity_polynomial_eval(
      weights, fugacity * std::polar(1.0, x));
  const std::complex<double> den = fugacity_polynomial_eval(weights, fugacity);
  return std::polar(1.0, -0.5 * weights.n_sites * x) * num / den;
}

double zero_field_ratio_extended(const SectorWeights& weights, double x) {
  using detail::Extended;
  const Extended ex(x);
  const Extended c = cos(ex);
  const Extended s = sin(ex);
  Extended re = 0, im = 0, total = 0;
  for (auto it = weights.weights.rbegin(); it != weights.weights.rend(); ++it) {
    const Extended nr = re * c - im * s + Extended(*it);
    const Extended ni = re * s + im * c;
    re = nr;
    im = ni;
    total += Extended(*it);
  }
  const Extended phase = -ex * weights.n_sites / 2;
  const Extended value = (re * cos(phase) - im * sin(phase)) / total;
  return static_cast<double>(value);
}

std::complex<double> transfer_matrix_partition(int n_sites, double coupling,
                                               double beta,
                                               std::complex<double> h) {
  if (n_sites < 3) {
    throw Error(ErrorCode::kTopologyUnsupported,
                "transfer-matrix ring needs N >= 3, got " +
                    std::to_string(n_sites));
  }
  const std::complex<double> half = 0.5 * beta * h;
  const std::complex<double> sh = std::sinh(half);
  const std::complex<double> root = std::sqrt(sh * sh + std::exp(-beta * coupling));
  const double prefactor = std::exp(0.25 * beta * coupling);
  const std::complex<double> z_plus = prefactor * (std::cosh(half) + root);
  const std::complex<double> z_minus = prefactor * (std::cosh(half) - root);
  return std::pow(z_plus, n_sites) + std::pow(z_minus, n_sites);
}

std::vector<WeightViolation> check_sector_weights(const SectorWeights& weights,
                                                  double rel_tol) {
  std::vector<WeightViolation> out;
  const auto& p = weights.weights;
  if (weights.n_sites <= 0 ||
      p.size() != static_cast<std::size_t>(weights.n_sites) + 1) {
    out.push_back({"sector_count", "expected n_sites + 1 weights"});
    return out;
  }
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (!std::isfinite(p[n]) || p[n] < 0.0) {
      out.push_back({"nonnegative", "p_" + std::to_string(n) + " = " +
                                        std::to_string(p[n])});
    }
  }
  if (!(p.front() > 0.0)) {
    out.push_back({"p0_positive", "p_0 must be > 0"});
  }
  const double pmax = *std::max_element(p.begin(), p.end());
  for (std::size_t n = 0; n < p.size() / 2; ++n) {
    const double a = p[n], b = p[p.size() - 1 - n];
    if (std::abs(a - b) > rel_tol * std::max({std::abs(a), std::abs(b), 1e-300 * pmax})) {
      out.push_back({"flip_symmetry", "p_" + std::to_string(n) + " != p_" +
                                          std::to_string(p.size() - 1 - n)});
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const BathSpec& spec) {
  nlohmann::json bonds = nlohmann::json::array();
  for (const auto& b : spec.bonds) bonds.push_back({b.i, b.j, b.coupling});
  j = nlohmann::json{{"n_sites", spec.n_sites},
                     {"bonds", bonds},
                     {"field_h", spec.field_h},
                     {"beta", spec.beta}};
}

void from_json(const nlohmann::json& j, BathSpec& spec) {
  try {
    const int n = j.at("n_sites").get<int>();
    const double h = j.value("field_h", 0.0);
    const double beta = j.value("beta", 0.0);
    if (j.contains("topology")) {
      const auto topology = j.at("topology").get<std::string>();
      if (topology != "ring") {
        throw Error(ErrorCode::kInvalidSpec, "unknown topology '" + topology + "'");
      }
      spec = BathSpec::ring(n, j.at("coupling").get<double>(), beta, h);
    } else {
      spec = BathSpec{};
      spec.n_sites = n;
      spec.field_h = h;
      spec.beta = beta;
      for (const auto& row : j.at("bonds")) {
        if (!row.is_array() || row.size() != 3) {
          throw Error(ErrorCode::kInvalidSpec, "bond must be [i, j, J]");
        }
        spec.bonds.push_back(
            {row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
  spec.validate();
}

void to_json(nlohmann::json& j, const SectorWeights& weights) {
  j = nlohmann::json{{"n_sites", weights.n_sites},
                     {"weights", weights.weights},
                     {"scale", weights.scale}};
}

void from_json(const nlohmann::json& j, SectorWeights& weights) {
  try {
    weights.n_sites = j.at("n_sites").get<int>();
    weights.weights = j.at("weights").get<std::vector<double>>();
    weights.scale = j.value("scale", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
}

}  // namespace lyzero
