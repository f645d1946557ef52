#include "zatom/harmony.hpp"

#include <cmath>
#include <sstream>

namespace zatom {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

std::vector<SelectionEntry> selection_rule_enumerate(std::int64_t alpha0_inv, int n_max,
                                                     bool include_half_integers) {
  if (alpha0_inv < 1) throw DomainError("selection_rule_enumerate: alpha0_inv must be >= 1");
  if (n_max < 1) throw DomainError("selection_rule_enumerate: n_max must be >= 1");
  if (alpha0_inv > 1000000000LL || n_max > 100000) {
    throw DomainError("selection_rule_enumerate: inputs exceed the supported range");
  }

  std::vector<SelectionEntry> entries;
  // Candidates n~ = j/2. N = n~^2 alpha0_inv, m+- = N +- n~; in quarters:
  // 4 m+ = j^2 alpha0_inv + 2j must be divisible by 4 (then m- = m+ - j too).
  int jstep = include_half_integers ? 1 : 2;
  for (std::int64_t j = jstep == 1 ? 1 : 2; j <= 2LL * n_max; j += jstep) {
    std::int64_t quad_plus = j * j * alpha0_inv + 2 * j;
    std::int64_t quad_minus = j * j * alpha0_inv - 2 * j;
    if (quad_minus < 0) continue;
    if (quad_plus % 4 != 0 || quad_minus % 4 != 0) continue;
    SelectionEntry e;
    e.m_plus = quad_plus / 4;
    e.m_minus = quad_minus / 4;
    e.n = 0.5 * j;
    e.N_big = 0.5 * (e.m_plus + e.m_minus);
    e.alpha0 = e.n * e.n / e.N_big;
    entries.push_back(e);
  }
  return entries;
}

DebroglieResiduals debroglie_consistency(const OrbitSolution& orbit, const ModePair& pair,
                                         const ModelParams& params) {
  if (params.b_const != 1.0) throw DomainError("debroglie_consistency: requires b = 1");
  if (std::abs(orbit.r - pair.r_n) > 1e-12 * pair.r_n ||
      std::abs(orbit.n - pair.n_tilde) > 1e-9) {
    throw ConsistencyError("debroglie_consistency: orbit and pair do not match");
  }
  DebroglieResiduals res;
  res.P_minus_k = std::abs(orbit.P - pair.k_n) / std::abs(orbit.P);
  res.E_minus_omega = std::abs(orbit.E - pair.omega_n) / std::abs(orbit.E);
  double vg = group_velocity(pair);
  res.vg_minus_vp = std::abs(vg - orbit.v) / std::abs(orbit.v);
  res.alpha_minus_n2_over_N =
      std::abs(params.alpha - orbit.n * orbit.n / pair.N_big) / params.alpha;
  return res;
}

InternalFrequency internal_frequency(const OrbitSolution& orbit, const ModelParams& params,
                                     double m_eff) {
  InternalFrequency f;
  double v = orbit.v, r = orbit.r;
  double gamma = 1.0 / std::sqrt(1.0 - v * v);
  f.exact = m_eff - (params.alpha / r + 0.5 * params.e_charge * params.B * r * v) * gamma;
  double omega_L = larmor_frequency(params, m_eff);
  double a2n2 = params.alpha * params.alpha / (orbit.n * orbit.n);
  f.perturbative = m_eff * (1.0 - a2n2) + omega_L * orbit.n * (1.0 - 0.5 * a2n2);
  return f;
}

FixedPointResult dressed_mass_fixed_point(const ModelParams& params, double n,
                                          int max_iterations, double tol) {
  const double z0 = params.u0;
  auto next = [&](double m_eff) {
    OrbitSolution orbit = solve_orbit_exact(n, params, m_eff, OrbitMethod::ExactRelativistic);
    double omega_p = internal_frequency(orbit, params, m_eff).exact;
    return std::pair<double, double>(
        params.m_p * (1.0 + params.sigma * omega_p * omega_p * z0 * z0), omega_p);
  };

  double m = params.m_p;
  double prev = m, prev2 = m;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    auto [m_new, op] = next(m);
    (void)op;
    if (!(m_new > 0.0) || m_new > 10.0 * params.m_p) {
      std::ostringstream msg;
      msg << "dressed_mass_fixed_point: dressed mass ran beyond 10 m_p (iterate " << m_new
          << "); no transparency fixed point in this regime (requires roughly "
          << "4 sigma u0^2 m_p (Omega_p/m_eff)^2 <= 1)";
      throw ConvergenceError(msg.str());
    }
    double delta = std::abs(m_new - m);
    if (delta <= tol * std::abs(m_new)) {
      return {m_new, z0, next(m_new).second, iter + 1};
    }
    // Aitken extrapolation every third step; plain damping is hopeless near
    // the critical coupling where the iteration contraction rate approaches 1.
    prev2 = prev;
    prev = m;
    m = m_new;
    if (iter >= 2 && (iter % 3) == 2) {
      double d2 = m - 2.0 * prev + prev2;
      if (d2 != 0.0) {
        double acc = prev2 - (prev - prev2) * (prev - prev2) / d2;
        if (acc > 0.1 * params.m_p && acc < 10.0 * params.m_p) m = acc;
      }
    }
  }
  std::ostringstream msg;
  msg << "dressed_mass_fixed_point: no convergence in " << max_iterations
      << " iterations; last iterates " << prev << ", " << m;
  throw ConvergenceError(msg.str());
}

double lagrangian_value(const OrbitSolution& orbit, const ModelParams& params) {
  double v = orbit.v, r = orbit.r;
  return -orbit.m_eff * std::sqrt(1.0 - v * v) + params.alpha / r +
         0.5 * params.e_charge * params.B * r * v;
}

PhaseHarmonyResult phase_harmony_residual(const OrbitSolution& orbit, const ModePair& pair,
                                          const ModelParams& params, int t_samples,
                                          double velocity_scale) {
  if (t_samples < 8) throw DomainError("phase_harmony_residual: too few samples");
  double lagrangian = lagrangian_value(orbit, params);
  double v = orbit.v * velocity_scale;
  double period = kTwoPi * orbit.r / std::abs(v);

  // Unwrapping needs comfortably more than two samples per phase cycle; the
  // dominant rate is |L_p| plus the beat drift.
  double rate = std::abs(pair.n_tilde * v / orbit.r - pair.omega_n) +
                std::abs((pair.omega_n + pair.eps_bar) * (v - group_velocity(pair)));
  double min_samples = 8.0 * period * rate / kTwoPi;
  if (t_samples < min_samples) {
    std::ostringstream msg;
    msg << "phase_harmony_residual: sampling too coarse for phase unwrapping (need >= "
        << min_samples << " samples per period)";
    throw DomainError(msg.str());
  }

  PhaseHarmonyResult out;
  out.lagrangian = lagrangian;

  // Nearest-branch unwrapping with an integer branch count; a floating
  // running sum would accumulate rounding at the size of the total phase
  // (|L_p| T ~ 1e5 rad for the 137 atom) and bury the 1e-9 residual.
  double phase_prev = 0.0;
  long long branch = 0;
  double dev_min = 0.0, dev_max = 0.0, dev0 = 0.0;
  double mag0 = 0.0, mag_dev = 0.0;
  for (int i = 0; i < t_samples; ++i) {
    double t = period * i / (t_samples - 1);
    double phi = v / orbit.r * t;
    std::complex<double> u = eval_total_field(t, pair.r_n, 0.5 * kPi, phi, pair);
    double mag = std::abs(u);
    double ph = std::arg(u);
    if (i == 0) {
      phase_prev = ph;
      dev0 = ph;
      mag0 = mag;
    } else {
      branch -= std::llround((ph - phase_prev) / kTwoPi);
      phase_prev = ph;
      double dev = (ph - lagrangian * t - dev0) + kTwoPi * static_cast<double>(branch);
      dev_min = std::min(dev_min, dev);
      dev_max = std::max(dev_max, dev);
      mag_dev = std::max(mag_dev, std::abs(mag - mag0));
    }
  }
  out.max_residual_rad = std::max(std::abs(dev_min), std::abs(dev_max));
  out.amplitude_variation = mag_dev / pair.u0;

  double gamma = 1.0 / std::sqrt(1.0 - orbit.v * orbit.v);
  double omega_p = internal_frequency(orbit, params, orbit.m_eff).exact;
  out.omega_p_consistency = std::abs(omega_p + gamma * lagrangian) / orbit.m_eff;
  return out;
}

double gamma_closed_form(double E, double omega_p, double m_eff) {
  double radicand = E * E - 4.0 * m_eff * (omega_p - m_eff);
  if (radicand < 0.0) {
    throw DomainError("gamma_closed_form: negative radicand");
  }
  return E / (2.0 * m_eff) + std::sqrt(radicand) / (2.0 * m_eff);
}

HarmonyReport build_harmony_report(const ModelParams& params, int m_plus, int m_minus,
                                   int t_samples) {
  double n = 0.5 * (m_plus - m_minus);
  if (n == 0.0) throw DomainError("build_harmony_report: m+ = m- gives n = 0");

  FixedPointResult fp = dressed_mass_fixed_point(params, n);
  OrbitSolution orbit =
      solve_orbit_exact(n, params, fp.m_eff, OrbitMethod::ExactRelativistic);
  ModePair pair = build_mode_pair(m_plus, m_minus, orbit, params);

  HarmonyReport report;
  report.Omega_p = fp.omega_p;
  report.z0 = fp.z0;
  report.m_eff = fp.m_eff;
  report.gamma_orbit = orbit.gamma;
  report.gamma_closed = gamma_closed_form(orbit.E, fp.omega_p, fp.m_eff);
  report.debroglie = debroglie_consistency(orbit, pair, params);
  report.phase_residual =
      phase_harmony_residual(orbit, pair, params, t_samples).max_residual_rad;
  return report;
}

nlohmann::json to_json(const DebroglieResiduals& r) {
  return {{"P_minus_k", r.P_minus_k},
          {"E_minus_omega", r.E_minus_omega},
          {"vg_minus_vp", r.vg_minus_vp},
          {"alpha_minus_n2_over_N", r.alpha_minus_n2_over_N}};
}

nlohmann::json to_json(const HarmonyReport& r) {
  return {{"Omega_p", r.Omega_p},
          {"z0", r.z0},
          {"m_eff", r.m_eff},
          {"gamma_closed", r.gamma_closed},
          {"gamma_orbit", r.gamma_orbit},
          {"phase_residual", r.phase_residual},
          {"debroglie", to_json(r.debroglie)}};
}

nlohmann::json to_json(const SelectionEntry& e) {
  return {{"m_plus", e.m_plus},
          {"m_minus", e.m_minus},
          {"n", e.n},
          {"N", e.N_big},
          {"alpha0", e.alpha0}};
}

}  // namespace zatom
