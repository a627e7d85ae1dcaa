#include "lyzero/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include "extended.hpp"
#include "lyzero/error.hpp"

namespace lyzero {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parlett-Reinsch balancing by powers of two; leaves eigenvalues unchanged.
template <typename Matrix>
void balance(Matrix& a) {
  using Scalar = typename Matrix::Scalar;
  const Eigen::Index n = a.rows();
  const Scalar radix = 2;
  const Scalar radix_sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar r = 0, c = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs(a(j, i));
        r += abs(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      Scalar g = r / radix;
      Scalar f = 1;
      const Scalar s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix_sq;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix_sq;
      }
      if ((c + r) / f < Scalar(0.95) * s) {
        done = false;
        g = 1 / f;
        a.row(i) *= g;
        a.col(i) *= f;
      }
    }
  }
}

template <unsigned Digits>
std::vector<std::complex<double>> companion_roots(std::span<const double> c) {
  using Real = detail::ExtendedFloat<Digits>;
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  const auto degree = static_cast<Eigen::Index>(c.size()) - 1;
  const double cmax = std::abs(*std::max_element(
      c.begin(), c.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
  const Real lead = Real(c.back()) / cmax;

  Matrix companion = Matrix::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1;
  for (Eigen::Index i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -(Real(c[static_cast<std::size_t>(i)]) / cmax) / lead;
  }
  balance(companion);

  Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "companion eigenvalue iteration failed");
  }
  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(degree));
  for (Eigen::Index i = 0; i < degree; ++i) {
    const auto& z = solver.eigenvalues()[i];
    roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return roots;
}

// Splits off factors (1 + z) while the division remainder stays within the
// rounding bound of a Horner evaluation at z = -1. Isolated spins and odd
// palindromic degrees put exact roots there, and a k-fold root smears by
// eps^(1/k) in any eigenvalue solve.
int deflate_minus_one(std::vector<double>& c) {
  int count = 0;
  while (c.size() > 1) {
    const std::size_t n = c.size() - 1;
    double sum_abs = 0.0;
    for (double v : c) sum_abs += std::abs(v);
    std::vector<double> q(n);
    double carry = c[n];
    for (std::size_t k = n; k-- > 0;) {
      q[k] = carry;
      carry = c[k] - carry;
    }
    if (std::abs(carry) > 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * sum_abs) break;
    c = std::move(q);
    ++count;
  }
  return count;
}

double angle_in_range(std::complex<double> z) {
  double theta = std::arg(z);
  if (theta <= 0.0) theta += kTwoPi;
  return theta;
}

}  // namespace

int LeeYangZeroSet::total_multiplicity() const {
  return std::accumulate(multiplicity.begin(), multiplicity.end(), 0);
}

double LeeYangZeroSet::min_angular_gap() const {
  if (angles.empty()) return 0.0;
  for (int m : multiplicity) {
    if (m > 1) return 0.0;
  }
  if (angles.size() == 1) return 2.0 * std::numbers::pi;
  double gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::min(gap, angles[i] - angles[i - 1]);
  return gap;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  std::size_t top = coeffs.size();
  while (top > 0 && coeffs[top - 1] == 0.0) --top;
  if (top == 0) throw Error(ErrorCode::kDegenerateInput, "all coefficients vanish");
  if (top == 1) throw Error(ErrorCode::kDegenerateInput, "polynomial has degree 0");
  const auto trimmed = coeffs.first(top);
  if (top - 1 <= 12) return companion_roots<100>(trimmed);
  return companion_roots<300>(trimmed);
}

LeeYangZeroSet find_zeros(const SectorWeights& weights, const ZeroOptions& options) {
  LeeYangZeroSet out;
  out.n_sites = weights.n_sites;
  std::size_t top = weights.weights.size();
  while (top > 0 && weights.weights[top - 1] == 0.0) --top;
  if (top < 2) out.roots = polynomial_roots(weights.weights);  // throws
  std::vector<double> rest(weights.weights.begin(), weights.weights.begin() + static_cast<std::ptrdiff_t>(top));
  const int at_minus_one = deflate_minus_one(rest);
  out.roots.assign(static_cast<std::size_t>(at_minus_one), std::complex<double>(-1.0, 0.0));
  if (rest.size() > 1) {
    const auto others = polynomial_roots(rest);
    out.roots.insert(out.roots.end(), others.begin(), others.end());
  }

  struct Root {
    double theta;
    double radius;
  };
  std::vector<Root> sorted;
  for (const auto& z : out.roots) {
    sorted.push_back({angle_in_range(z), std::abs(z)});
    out.max_radius_deviation =
        std::max(out.max_radius_deviation, std::abs(std::abs(z) - 1.0));
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Root& a, const Root& b) { return a.theta < b.theta; });

  std::vector<std::vector<Root>> clusters;
  for (const auto& r : sorted) {
    if (!clusters.empty() && r.theta - clusters.back().back().theta < options.cluster_tol) {
      clusters.back().push_back(r);
    } else {
      clusters.push_back({r});
    }
  }
  if (clusters.size() > 1 &&
      clusters.front().front().theta + kTwoPi - clusters.back().back().theta <
          options.cluster_tol) {
    for (auto r : clusters.front()) {
      r.theta += kTwoPi;
      clusters.back().push_back(r);
    }
    clusters.erase(clusters.begin());
  }

  for (const auto& cl : clusters) {
    std::complex<double> direction = 0.0;
    double radius = 0.0;
    for (const auto& r : cl) {
      direction += std::polar(1.0, r.theta);
      radius += r.radius;
    }
    out.angles.push_back(angle_in_range(direction));
    out.radii.push_back(radius / static_cast<double>(cl.size()));
    out.multiplicity.push_back(static_cast<int>(cl.size()));
  }
  // Circular means can shift an angle across neighbours only at the seam.
  std::vector<std::size_t> order(out.angles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.angles[a] < out.angles[b]; });
  LeeYangZeroSet sorted_out = out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted_out.angles[k] = out.angles[order[k]];
    sorted_out.radii[k] = out.radii[order[k]];
    sorted_out.multiplicity[k] = out.multiplicity[order[k]];
  }
  out = std::move(sorted_out);

  if (!options.ferromagnetic) {
    out.circle = CircleCheck::kNotApplicable;
  } else {
    out.circle = out.max_radius_deviation <= options.circle_tol ? CircleCheck::kPass
                                                                 : CircleCheck::kFail;
  }
  return out;
}

ZeroTimes zero_times(const LeeYangZeroSet& zeros, double lambda, int delta_m) {
  const int jump = std::abs(delta_m);
  if (jump != 1 && jump != 2) {
    throw Error(ErrorCode::kDomainError, "magnetization jump must be 1 or 2");
  }
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kDomainError, "lambda must be positive");
  }
  ZeroTimes out;
  out.delta_m = jump;
  out.lambda = lambda;
  for (double theta : zeros.angles) out.times.push_back(theta / (lambda * jump));
  std::sort(out.times.begin(), out.times.end());
  return out;
}

double ratio_product_form(const LeeYangZeroSet& zeros, double x, double angle_floor) {
  double product = 1.0;
  for (std::size_t k = 0; k < zeros.angles.size(); ++k) {
    const double theta = zeros.angles[k];
    if (theta < angle_floor || kTwoPi - theta < angle_floor) {
      throw Error(ErrorCode::kZeroAtUnity, "zero angle too close to z = 1");
    }
    // [cos(x/2) - cos(theta - x/2)] / [1 - cos(theta)]
    //   = sin((theta - x)/2) / sin(theta/2), free of cancellation near x = 0.
    const double factor = std::sin(0.5 * (theta - x)) / std::sin(0.5 * theta);
    product *= std::pow(factor, zeros.multiplicity[k]);
  }
  return product;
}

namespace {

double cubic_interpolate(std::span<const SignalSample> s, std::size_t center, double t) {
  std::size_t lo = center >= 1 ? center - 1 : 0;
  if (lo + 4 > s.size()) lo = s.size() >= 4 ? s.size() - 4 : 0;
  const std::size_t hi = std::min(s.size(), lo + 4);
  double value = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    double basis = 1.0;
    for (std::size_t j = lo; j < hi; ++j) {
      if (j != i) basis *= (t - s[j].t) / (s[i].t - s[j].t);
    }
    value += basis * s[i].value;
  }
  return value;
}

template <typename F>
double golden_section_min(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<DetectedZero> detect_zeros_from_signal(std::span<const SignalSample> samples,
                                                   const DetectionOptions& options) {
  std::vector<DetectedZero> out;
  if (samples.size() < 3) return out;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const double v = std::abs(samples[i].value);
    if (!(v < options.threshold)) continue;
    if (!(v < std::abs(samples[i - 1].value) && v <= std::abs(samples[i + 1].value))) {
      continue;
    }
    auto magnitude = [&](double t) {
      return std::abs(options.refine ? options.refine(t)
                                     : cubic_interpolate(samples, i, t));
    };
    const double t_star = golden_section_min(magnitude, samples[i - 1].t,
                                             samples[i + 1].t, options.refine_tol);
    if (!out.empty() && t_star - out.back().t < options.refine_tol) continue;
    DetectedZero z;
    z.t = t_star;
    z.value = options.refine ? options.refine(t_star) : cubic_interpolate(samples, i, t_star);
    z.masked = std::any_of(options.masking_times.begin(), options.masking_times.end(),
                           [&](double m) { return std::abs(m - t_star) <= options.refine_tol; });
    out.push_back(z);
  }
  return out;
}

std::vector<SignalSample> read_signal_csv(std::istream& in) {
  std::vector<SignalSample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    SignalSample s;
    if (!(row >> s.t >> s.value)) {
      if (out.empty()) continue;  // header row
      throw Error(ErrorCode::kIo, "malformed signal row: " + line);
    }
    out.push_back(s);
  }
  if (!std::is_sorted(out.begin(), out.end(),
                      [](const SignalSample& a, const SignalSample& b) { return a.t < b.t; })) {
    throw Error(ErrorCode::kIo, "signal samples must be sorted by t");
  }
  return out;
}

void to_json(nlohmann::json& j, const LeeYangZeroSet& zeros) {
  j = nlohmann::json{{"n_sites", zeros.n_sites},
                     {"angles", zeros.angles},
                     {"radii", zeros.radii},
                     {"multiplicity", zeros.multiplicity}};
}

void from_json(const nlohmann::json& j, LeeYangZeroSet& zeros) {
  try {
    zeros = LeeYangZeroSet{};
    zeros.angles = j.at("angles").get<std::vector<double>>();
    zeros.radii = j.at("radii").get<std::vector<double>>();
    zeros.multiplicity = j.at("multiplicity").get<std::vector<int>>();
    zeros.n_sites = j.value("n_sites", zeros.total_multiplicity());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, e.what());
  }
  if (zeros.angles.size() != zeros.radii.size() ||
      zeros.angles.size() != zeros.multiplicity.size()) {
    throw Error(ErrorCode::kIo, "zero set columns differ in length");
  }
}

}  // namespace lyzero
