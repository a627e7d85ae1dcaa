#pragma once

// Ising spin baths and their exact partition functions.
//
// A bath of N spin-1/2 sites with Hamiltonian
//
//   H_b = -sum_{(i,j)} J_ij s_i^z s_j^z - h sum_i s_i^z,   s^z = +-1/2,
//
// has Z(beta, h) = exp(beta N h / 2) * Q(exp(-beta h)), where
// Q(z) = sum_n p_n z^n is the fugacity polynomial and p_n is the zero-field
// Boltzmann sum over configurations with exactly n down spins.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace lyzero {

inline constexpr int kDefaultEnumerationCap = 24;

struct Bond {
  int i = 0;
  int j = 0;
  double coupling = 0.0;

  friend bool operator==(const Bond&, const Bond&) = default;
};

struct BathSpec {
  int n_sites = 0;
  std::vector<Bond> bonds;
  double field_h = 0.0;
  double beta = 0.0;

  /// Nearest-neighbour ring 0-1-...-(N-1)-0 with a single coupling. N = 2
  /// yields one bond (the closing bond would duplicate it), N = 1 none.
  static BathSpec ring(int n_sites, double coupling, double beta,
                       double field_h = 0.0);

  /// Throws Error(kInvalidSpec) on out-of-range indices, self-bonds,
  /// duplicate pairs (in either orientation), non-finite values or beta < 0.
  void validate() const;

  bool is_ferromagnetic() const;

  friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

/// Coefficients of Q(z). Stored values are p_n * exp(-scale).
struct SectorWeights {
  int n_sites = 0;
  std::vector<double> weights;
  double scale = 0.0;

  /// p_n including the scale factor (may overflow for huge beta*J).
  double unscaled(int n) const;
  int degree() const { return static_cast<int>(weights.size()) - 1; }
};

struct EnumerationOptions {
  int cap = kDefaultEnumerationCap;
  unsigned threads = 1;
};

/// Exact sector weights by enumerating all 2^N configurations. The field of
/// `spec` is ignored: sector weights are defined at h = 0.
SectorWeights enumerate_sector_weights(const BathSpec& spec,
                                       const EnumerationOptions& options = {});

/// Zero-field energy of a configuration; bit i of `down_mask` set means
/// site i points down.
double zero_field_energy(std::span<const Bond> bonds, std::uint64_t down_mask);

enum class Scaling { kStored, kUnscaled };

/// Horner evaluation of Q(z). kStored returns Q(z) * exp(-scale).
std::complex<double> fugacity_polynomial_eval(const SectorWeights& weights,
                                              std::complex<double> z,
                                              Scaling scaling = Scaling::kStored);

/// Z(beta, h) = exp(beta N h / 2) Q(exp(-beta h)) for real or complex h.
std::complex<double> partition_function(const SectorWeights& weights,
                                        double beta, std::complex<double> h);

/// Z(beta, h - i x / beta) / Z(beta, h)
///   = exp(-i N x / 2) Q(exp(-beta h + i x)) / Q(exp(-beta h)).
/// At h = 0 the result is real for symmetric weights.
std::complex<double> partition_ratio(const SectorWeights& weights, double beta,
                                     double field_h, double x);

/// The h = 0 ratio evaluated as a cosine sum in ~100-digit arithmetic and
/// rounded once. Resolves high-order zeros (e.g. (1+z)^N at beta = 0) that
/// double-precision Horner buries in rounding noise.
double zero_field_ratio_extended(const SectorWeights& weights, double x);

/// Ring partition function z_+^N + z_-^N from the 2x2 transfer matrix,
///   z_+- = e^{beta J/4} [cosh(beta h/2) +- sqrt(sinh^2(beta h/2) + e^{-beta J})].
/// Throws Error(kTopologyUnsupported) for N < 3.
std::complex<double> transfer_matrix_partition(int n_sites, double coupling,
                                               double beta,
                                               std::complex<double> h);

struct WeightViolation {
  std::string invariant;
  std::string detail;
};

/// Checks the SectorWeights contract (nonnegative, p_0 > 0, flip symmetry);
/// an empty result means the weights are consistent.
std::vector<WeightViolation> check_sector_weights(const SectorWeights& weights,
                                                  double rel_tol = 1e-12);

void to_json(nlohmann::json& j, const BathSpec& spec);
/// Accepts {"n_sites", "bonds": [[i, j, J], ...], "field_h", "beta"} or the
/// shortcut {"topology": "ring", "n_sites", "coupling", ...}.
void from_json(const nlohmann::json& j, BathSpec& spec);

void to_json(nlohmann::json& j, const SectorWeights& weights);
void from_json(const nlohmann::json& j, SectorWeights& weights);

}  // namespace lyzero
