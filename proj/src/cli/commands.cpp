#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "lyzero/cli.hpp"
#include "lyzero/entanglement.hpp"
#include "lyzero/error.hpp"
#include "lyzero/oracle.hpp"
#include "lyzero/parallel.hpp"

namespace lyzero {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kOracleTol = 1e-10;
constexpr double kStateTol = 1e-10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) { open_output(path) << j.dump(2) << '\n'; }

SectorWeights weights_at(const ExperimentConfig& c, double beta, unsigned threads) {
  BathSpec spec = c.bath.spec;
  spec.beta = beta;
  EnumerationOptions options;
  options.cap = c.enumeration_cap;
  options.threads = threads;
  return enumerate_sector_weights(spec, options);
}

ZeroOptions zero_options(const ExperimentConfig& c) {
  ZeroOptions o;
  o.circle_tol = c.tolerances.circle_tol;
  o.cluster_tol = c.tolerances.cluster_tol;
  o.ferromagnetic = c.bath.spec.is_ferromagnetic();
  return o;
}

std::string circle_name(CircleCheck c) {
  switch (c) {
    case CircleCheck::kPass: return "pass";
    case CircleCheck::kFail: return "fail";
    case CircleCheck::kNotApplicable: return "not applicable";
  }
  return "?";
}

ReducedDensityMatrix probe_state_at(const ExperimentConfig& c, const ProbeState& state0,
                                    const SectorWeights& w, double beta, double t) {
  if (c.probe.is_symmetric()) {
    return reduced_density_matrix(state0, c.probe, w, beta, t, c.bath.spec.field_h);
  }
  return evolve_asymmetric(state0, c.probe, w, beta, t, c.bath.spec.field_h);
}

ProbeState amplitudes_at(const ExperimentConfig& c, const ProbeState& state0, double t) {
  if (c.probe.is_symmetric()) return evolve_amplitudes(state0, c.probe, t);
  // Asymmetric coupling is restricted to J_xx = 0, where the symmetric
  // closed form reduces to pure phases independent of lambda.
  ProbeParams p = c.probe;
  p.lambda_b = p.lambda_a;
  return evolve_amplitudes(state0, p, t);
}

void write_zero_files(const fs::path& dir, const LeeYangZeroSet& zeros, double beta,
                      const std::string& hash) {
  json j = zeros;
  j["beta"] = beta;
  j["config_hash"] = hash;
  write_json(dir / "zeros.json", j);

  auto csv = open_output(dir / "zeros_scatter.csv");
  csv << "# config_hash: " << hash << '\n' << "theta,re,im,multiplicity\n";
  for (std::size_t i = 0; i < zeros.angles.size(); ++i) {
    const double th = zeros.angles[i];
    const double r = zeros.radii[i];
    csv << num(th) << ',' << num(r * std::cos(th)) << ',' << num(r * std::sin(th)) << ','
        << zeros.multiplicity[i] << '\n';
  }
}

RingSetup ring_setup(const ExperimentConfig& c, double beta) {
  if (!c.bath.ring_coupling) throw Error(ErrorCode::kConfig, "figures need a ring bath");
  if (!c.probe.is_symmetric() || c.probe.h0 != 0.0 || c.bath.spec.field_h != 0.0) {
    throw Error(ErrorCode::kConfig, "figures need equal lambdas and zero fields");
  }
  RingSetup s;
  s.n_sites = c.bath.spec.n_sites;
  s.bath_coupling = *c.bath.ring_coupling;
  s.probe_coupling = c.probe.j_xx;
  s.probe_zz = c.probe.j_zz;
  s.lambda = c.probe.lambda_a;
  s.beta = beta;
  return s;
}

struct ReportLine {
  std::string status;  // PASS, FAIL, N/A
  std::string name;
  std::string detail;
};

}  // namespace

RingZeroDetection detect_ring_zeros(const RingExperiment& experiment, const LeeYangZeroSet& zeros,
                                    const TimeGrid& grid, double threshold, double refine_tol,
                                    unsigned threads) {
  const double lambda = experiment.setup().lambda;
  const std::vector<double> lt = grid.lambda_t();
  std::vector<SignalSample> samples(lt.size());
  parallel_for(lt.size(), threads, [&](std::size_t i) {
    const double t = lt[i] / lambda;
    samples[i] = {t, experiment.yz(t, RatioPrecision::kExtended)};
  });

  DetectionOptions opt;
  opt.threshold = threshold;
  opt.refine_tol = refine_tol / lambda;
  opt.refine = [&](double t) { return experiment.yz(t, RatioPrecision::kExtended); };
  opt.masking_times = experiment.prefactor_zeros(lt.front() / lambda, lt.back() / lambda);
  std::vector<DetectedZero> found = detect_zeros_from_signal(samples, opt);

  RingZeroDetection out;
  for (auto& d : found) {
    d.t *= lambda;
    out.detections.push_back(d);
  }

  const ZeroTimes times = zero_times(zeros, lambda, 1);
  for (std::size_t i = 0; i < times.times.size(); ++i) {
    const double plt = times.times[i] * lambda;
    if (plt <= lt.front() || plt >= lt.back()) continue;
    RingZeroMarker m;
    m.theta = zeros.angles[i];
    m.multiplicity = zeros.multiplicity[i];
    m.predicted_lambda_t = plt;
    for (double z : opt.masking_times) {
      if (std::abs(z * lambda - plt) <= refine_tol) m.masked = true;
    }
    out.markers.push_back(m);
  }

  // Each detection goes to the nearest prediction within two grid steps.
  const double window = 2.0 * (lt.back() - lt.front()) / static_cast<double>(lt.size() - 1);
  std::vector<double> best(out.markers.size(), std::numeric_limits<double>::infinity());
  for (const auto& d : out.detections) {
    if (d.masked) continue;
    std::size_t nearest = out.markers.size();
    double gap = window;
    for (std::size_t k = 0; k < out.markers.size(); ++k) {
      const double g = std::abs(out.markers[k].predicted_lambda_t - d.t);
      if (g <= gap) {
        gap = g;
        nearest = k;
      }
    }
    if (nearest == out.markers.size() || gap >= best[nearest]) {
      out.unmatched.push_back(d.t);
      continue;
    }
    if (out.markers[nearest].detected_lambda_t) out.unmatched.push_back(*out.markers[nearest].detected_lambda_t);
    best[nearest] = gap;
    out.markers[nearest].detected_lambda_t = d.t;
  }
  std::sort(out.unmatched.begin(), out.unmatched.end());
  return out;
}

int cmd_weights(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const std::string hash = config_hash(c);
  for (const auto& tp : temperature_points(c)) {
    const SectorWeights w = weights_at(c, tp.beta, o.threads);
    json j = w;
    j["beta"] = tp.beta;
    j["config_hash"] = hash;
    const fs::path path = o.out_dir / tp.label / "weights.json";
    write_json(path, j);
    log << tp.label << ": " << w.weights.size() << " sector weights -> " << path.string() << '\n';
  }
  return 0;
}

int cmd_zeros(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const std::string hash = config_hash(c);
  for (const auto& tp : temperature_points(c)) {
    const LeeYangZeroSet zeros = find_zeros(weights_at(c, tp.beta, o.threads), zero_options(c));
    write_zero_files(o.out_dir / tp.label, zeros, tp.beta, hash);
    log << tp.label << ": " << zeros.angles.size() << " distinct zeros, max | |z|-1 | = "
        << num(zeros.max_radius_deviation) << ", circle " << circle_name(zeros.circle) << '\n';
  }
  return 0;
}

int cmd_dynamics(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const std::string hash = config_hash(c);
  const double lambda = c.probe.lambda_a;
  for (const auto& tp : temperature_points(c)) {
    const SectorWeights w = weights_at(c, tp.beta, o.threads);
    std::vector<std::pair<double, bool>> grid;
    for (double lt : c.grid.lambda_t()) grid.emplace_back(lt, false);
    // Exact zero times are inserted so the sweep hits r1 = 0 on the nose.
    const LeeYangZeroSet zeros = find_zeros(w, zero_options(c));
    if (zeros.circle != CircleCheck::kFail) {
      for (double theta : zeros.angles) {
        if (theta > c.grid.lambda_t_min && theta < c.grid.lambda_t_max) grid.emplace_back(theta, true);
      }
    }
    std::sort(grid.begin(), grid.end());

    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), o.threads, [&](std::size_t i) {
      const double t = grid[i].first / lambda;
      const ReducedDensityMatrix rdm = probe_state_at(c, c.initial_state, w, tp.beta, t);
      SweepRow& r = rows[i];
      r.lambda_t = grid[i].first;
      r.r1 = rdm.r1.real();
      r.r2 = rdm.r2.real();
      r.correlations = correlators(rdm, amplitudes_at(c, c.initial_state, t));
      r.concurrence = concurrence(rdm).concurrence;
      r.marked = grid[i].second;
    });

    const fs::path path = o.out_dir / tp.label / "dynamics.csv";
    auto out = open_output(path);
    const std::vector<std::string> comment = {"config_hash: " + hash, "beta: " + num(tp.beta)};
    write_sweep_csv(out, rows, comment);
    log << tp.label << ": " << rows.size() << " rows -> " << path.string() << '\n';
  }
  return 0;
}

int cmd_verify(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const std::string hash = config_hash(c);
  std::vector<ReportLine> report;
  auto add = [&](bool ok, std::string name, std::string detail) {
    report.push_back({ok ? "PASS" : "FAIL", std::move(name), std::move(detail)});
  };

  if (o.weights_file) {
    std::ifstream in(*o.weights_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + o.weights_file->string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidSpec, o.weights_file->string() + ": " + e.what());
    }
    const auto w = j.get<SectorWeights>();
    const auto violations = check_sector_weights(w);
    std::string detail = std::to_string(w.weights.size()) + " weights";
    for (const auto& v : violations) detail += "; " + v.invariant + ": " + v.detail;
    add(violations.empty(), "weights_file", detail);
    if (j.contains("beta") && w.n_sites == c.bath.spec.n_sites) {
      const SectorWeights ref = weights_at(c, j.at("beta").get<double>(), o.threads);
      double worst = 0.0;
      const bool same_size = ref.weights.size() == w.weights.size();
      for (std::size_t n = 0; same_size && n < w.weights.size(); ++n) {
        const double a = w.unscaled(static_cast<int>(n));
        const double b = ref.unscaled(static_cast<int>(n));
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      }
      add(same_size && worst <= 1e-12, "weights_file_matches_bath", "max rel diff " + num(worst));
    }
  }

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(c.grid.lambda_t_min, c.grid.lambda_t_max);
  const bool ferro = c.bath.spec.is_ferromagnetic();
  const double lambda = c.probe.lambda_a;

  for (const auto& tp : temperature_points(c)) {
    const std::string tag = tp.label + ": ";
    const SectorWeights w = weights_at(c, tp.beta, o.threads);
    {
      const auto violations = check_sector_weights(w);
      std::string detail;
      for (const auto& v : violations) detail += v.invariant + ": " + v.detail + "; ";
      add(violations.empty(), tag + "sector_weights", violations.empty() ? "ok" : detail);
    }

    const LeeYangZeroSet zeros = find_zeros(w, zero_options(c));
    add(zeros.total_multiplicity() == c.bath.spec.n_sites, tag + "zero_count",
        std::to_string(zeros.total_multiplicity()) + " zeros");
    if (!ferro) {
      report.push_back({"N/A", tag + "unit_circle", "bath is not ferromagnetic"});
    } else {
      add(zeros.circle == CircleCheck::kPass, tag + "unit_circle",
          "max | |z|-1 | = " + num(zeros.max_radius_deviation));
    }

    if (ferro && zeros.circle == CircleCheck::kPass && c.bath.spec.field_h == 0.0) {
      double worst = 0.0;
      for (int k = 0; k < 64; ++k) {
        const double x = uniform(rng);
        bool near_zero = false;
        for (double th : zeros.angles) near_zero |= std::abs(std::remainder(x - th, 2 * M_PI)) < 1e-6;
        if (near_zero) continue;
        worst = std::max(worst, std::abs(ratio_product_form(zeros, x) -
                                         partition_ratio(w, tp.beta, 0.0, x).real()));
      }
      add(worst <= 1e-9, tag + "ratio_product_form", "max abs diff " + num(worst));
    }

    double worst_state = 0.0;
    for (int k = 0; k < std::min(c.verify_draws, 32); ++k) {
      const double t = uniform(rng) / lambda;
      const Matrix4c rho = probe_state_at(c, c.initial_state, w, tp.beta, t).rho;
      worst_state = std::max(worst_state, std::abs(rho.trace() - 1.0));
      worst_state = std::max(worst_state, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Matrix4c> eig(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
      worst_state = std::max(worst_state, -eig.eigenvalues().minCoeff());
    }
    add(worst_state <= kStateTol, tag + "density_matrix", "trace/hermiticity/psd defect " + num(worst_state));

    if (c.bath.spec.n_sites > kOracleSiteBudget) {
      report.push_back({"N/A", tag + "oracle", "more than " + std::to_string(kOracleSiteBudget) + " sites"});
      continue;
    }
    BathSpec spec = c.bath.spec;
    spec.beta = tp.beta;
    double worst = 0.0;
    for (int k = 0; k < c.verify_draws; ++k) {
      const double t = uniform(rng) / lambda;
      ProbeState::Amplitudes a;
      for (auto& z : a) z = {gauss(rng), gauss(rng)};
      for (const ProbeState& s : {c.initial_state, ProbeState::normalized(a)}) {
        const Matrix4c fast = probe_state_at(c, s, w, tp.beta, t).rho;
        const Matrix4c slow = exact_thermal_rdm(spec, s, c.probe, t).rdm;
        worst = std::max(worst, (fast - slow).cwiseAbs().maxCoeff());
      }
    }
    add(worst <= kOracleTol, tag + "oracle",
        std::to_string(c.verify_draws) + " draws, max entry diff " + num(worst));
  }

  bool all_ok = true;
  std::ostringstream text;
  text << "# config_hash: " << hash << '\n';
  for (const auto& r : report) {
    all_ok &= r.status != "FAIL";
    text << r.status << ' ' << r.name << ' ' << r.detail << '\n';
  }
  const fs::path path = o.out_dir / "verify_report.txt";
  open_output(path) << text.str();
  log << text.str() << (all_ok ? "verify: all checks passed" : "verify: FAILED") << '\n';
  return all_ok ? 0 : 1;
}

int cmd_figures(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const std::string hash = config_hash(c);
  const std::vector<double> lt = c.grid.lambda_t();
  const ProbeState x0 = ProbeState::x_projected();
  double previous_gap = std::numeric_limits<double>::quiet_NaN();

  for (const auto& tp : temperature_points(c)) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = o.out_dir / tp.label;
    const RingExperiment experiment(ring_setup(c, tp.beta), o.threads);
    const LeeYangZeroSet zeros = find_zeros(experiment.weights(), zero_options(c));
    write_zero_files(dir, zeros, tp.beta, hash);

    const double lambda = experiment.setup().lambda;
    std::vector<std::array<double, 4>> traces(lt.size());
    parallel_for(lt.size(), o.threads, [&](std::size_t i) {
      const double t = lt[i] / lambda;
      const ReducedDensityMatrix rdm = experiment.density_matrix(t);
      const ProbeState a = evolve_amplitudes(x0, experiment.setup().params(), t);
      traces[i] = {lt[i], experiment.yz(t, RatioPrecision::kExtended), concurrence(rdm).concurrence,
                   concurrence(pure_state_matrix(a)).concurrence};
    });
    {
      auto out = open_output(dir / "traces.csv");
      out << "# config_hash: " << hash << '\n' << "lambda_t,yz,concurrence,concurrence_bath_free\n";
      for (const auto& r : traces) out << num(r[0]) << ',' << num(r[1]) << ',' << num(r[2]) << ',' << num(r[3]) << '\n';
    }

    const RingZeroDetection det = detect_ring_zeros(experiment, zeros, c.grid, c.tolerances.detect_threshold,
                                                    c.tolerances.refine_tol, o.threads);
    {
      auto out = open_output(dir / "markers.csv");
      out << "# config_hash: " << hash << '\n'
          << "theta,multiplicity,predicted_lambda_t,detected_lambda_t,abs_error,masked\n";
      for (const auto& m : det.markers) {
        const double d = m.detected_lambda_t.value_or(std::numeric_limits<double>::quiet_NaN());
        out << num(m.theta) << ',' << m.multiplicity << ',' << num(m.predicted_lambda_t) << ','
            << num(d) << ',' << num(std::abs(d - m.predicted_lambda_t)) << ',' << (m.masked ? 1 : 0) << '\n';
      }
      for (double u : det.unmatched) out << "nan,0,nan," << num(u) << ",nan,0\n";
    }

    const double gap = zeros.min_angular_gap();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::size_t matched = 0;
    for (const auto& m : det.markers) matched += m.detected_lambda_t.has_value();
    log << tp.label << ": beta = " << num(tp.beta) << ", " << zeros.angles.size() << " distinct zeros, "
        << matched << '/' << det.markers.size() << " detected, " << det.unmatched.size()
        << " unmatched, min zero gap: " << num(gap);
    if (!std::isnan(previous_gap) && gap < previous_gap) log << " (gap shrank)";
    log << ", " << elapsed << " s\n";
    previous_gap = gap;
  }
  return 0;
}

}  // namespace lyzero
