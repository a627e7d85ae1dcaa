#pragma once

// Lee-Yang zeros of a fugacity polynomial, their detection times, and the
// zero-product form of the partition-function ratio.

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "lyzero/bath.hpp"

namespace lyzero {

enum class CircleCheck { kPass, kFail, kNotApplicable };

struct ZeroOptions {
  double circle_tol = 1e-8;
  double cluster_tol = 1e-6;  // radians
  /// Only ferromagnetic baths are guaranteed zeros on |z| = 1; for others the
  /// circle check reports kNotApplicable.
  bool ferromagnetic = true;
};

struct LeeYangZeroSet {
  int n_sites = 0;
  // One entry per root cluster, sorted by angle in (0, 2pi].
  std::vector<double> angles;
  std::vector<double> radii;
  std::vector<int> multiplicity;
  // Every root with multiplicity, unclustered and unmodified. Factors
  // (1 + z) are divided out first and reported as exact roots at -1.
  std::vector<std::complex<double>> roots;
  double max_radius_deviation = 0.0;
  CircleCheck circle = CircleCheck::kNotApplicable;

  int total_multiplicity() const;
  /// Smallest angular distance between neighbouring zeros around the
  /// circle; 0 if any zero is repeated.
  double min_angular_gap() const;
};

/// All roots of Q(z) as eigenvalues of the balanced companion matrix of the
/// monic polynomial, computed in 100-digit arithmetic (300 above degree 12)
/// so that the maximal-multiplicity root of (1+z)^N stays resolved to well
/// below 1e-8. Factors (1 + z) are divided out beforehand when the remainder
/// is at rounding level. Radii are reported as computed, never snapped to 1.
/// Throws Error(kDegenerateInput) if all weights vanish or the degree is 0.
LeeYangZeroSet find_zeros(const SectorWeights& weights,
                          const ZeroOptions& options = {});

/// Roots of an arbitrary real polynomial sum_k c_k z^k by the same
/// extended-precision companion route.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

struct ZeroTimes {
  std::vector<double> times;
  int delta_m = 1;
  double lambda = 1.0;
};

/// t_n = theta_n / (lambda |delta_m|), ascending. |delta_m| must be 1 or 2.
ZeroTimes zero_times(const LeeYangZeroSet& zeros, double lambda, int delta_m);

/// prod_n [cos(x/2) - cos(theta_n - x/2)] / prod_n [1 - cos(theta_n)], which
/// equals exp(-i N x / 2) Q(e^{ix}) / Q(1) when the zeros lie on the circle.
/// Throws Error(kZeroAtUnity) if some angle is within angle_floor of 0 or 2pi.
double ratio_product_form(const LeeYangZeroSet& zeros, double x,
                          double angle_floor = 1e-12);

struct SignalSample {
  double t = 0.0;
  double value = 0.0;
};

struct DetectionOptions {
  double threshold = 1e-3;
  double refine_tol = 1e-6;
  /// Exact signal used during refinement. Without it the refinement runs on
  /// a cubic interpolant through the nearest four samples.
  std::function<double(double)> refine;
  /// Zeros of a known multiplicative prefactor (e.g. sin(Jt)); a detection
  /// within refine_tol of one of these is reported as masked.
  std::vector<double> masking_times;
};

struct DetectedZero {
  double t = 0.0;
  double value = 0.0;
  bool masked = false;
};

/// Interior local minima of |value| below the threshold, each refined by
/// golden-section search on |value| to refine_tol. Samples must be sorted by
/// t. Endpoints are never reported. Returns an empty list when nothing
/// qualifies.
std::vector<DetectedZero> detect_zeros_from_signal(
    std::span<const SignalSample> samples, const DetectionOptions& options);

/// Two-column CSV (t, value). Lines starting with '#' and a non-numeric
/// header row are skipped.
std::vector<SignalSample> read_signal_csv(std::istream& in);

void to_json(nlohmann::json& j, const LeeYangZeroSet& zeros);
void from_json(const nlohmann::json& j, LeeYangZeroSet& zeros);

}  // namespace lyzero
