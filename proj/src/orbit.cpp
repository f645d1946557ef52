#include "zatom/orbit.hpp"

#include <cmath>
#include <sstream>

namespace zatom {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

struct Kinematics {
  double v, gamma;
};

// Eliminates the speed through J = 2 pi n: gamma m v = n/r - e B r/2.
Kinematics speed_from_action(double n, double r, const ModelParams& p, double m_eff,
                             bool relativistic) {
  double momentum = n / r - 0.5 * p.e_charge * p.B * r;  // kinetic part gamma m v
  if (!relativistic) return {momentum / m_eff, 1.0};
  double gv = momentum / m_eff;
  double gamma = std::sqrt(1.0 + gv * gv);
  return {gv / gamma, gamma};
}

// Force-balance residual -m gamma v^2/r + alpha/r^2 - e v B at the speed
// implied by the action constraint. Roots of this in r are circular orbits.
double radius_equation(double n, double r, const ModelParams& p, double m_eff,
                       bool relativistic) {
  if (!relativistic) {
    // Equivalent to the quartic (m w_L)^2 r^4 + m alpha r - n^2 = 0 after
    // multiplying by -r^3/... ; solve the quartic form directly, it is
    // monotone increasing in r.
    double omega_L = larmor_frequency(p, m_eff);
    double mw = m_eff * omega_L;
    return mw * mw * r * r * r * r + m_eff * p.alpha * r - n * n;
  }
  Kinematics k = speed_from_action(n, r, p, m_eff, true);
  return -m_eff * k.gamma * k.v * k.v / r + p.alpha / (r * r) - p.e_charge * k.v * p.B;
}

OrbitSolution assemble(double n, double r, const ModelParams& p, double m_eff,
                       OrbitMethod method, int iterations) {
  bool relativistic = (method == OrbitMethod::ExactRelativistic);
  Kinematics k = speed_from_action(n, r, p, m_eff, relativistic);
  OrbitSolution s;
  s.n = n;
  s.r = r;
  s.v = k.v;
  s.gamma = relativistic ? k.gamma : 1.0;
  s.m_eff = m_eff;
  s.omega_L = larmor_frequency(p, m_eff);
  s.method = method;
  s.iterations = iterations;
  if (relativistic) {
    s.E = k.gamma * m_eff - p.alpha / r;
  } else {
    s.E = m_eff + 0.5 * m_eff * k.v * k.v - p.alpha / r;
  }
  s.P = s.gamma * m_eff * s.v + 0.5 * p.e_charge * p.B * r;
  s.force_residual = lorentz_residual(s, p);
  s.action_residual = std::abs(action_integral(s, p) / kTwoPi - n) / std::abs(n);
  return s;
}

}  // namespace

std::string to_string(OrbitMethod m) {
  switch (m) {
    case OrbitMethod::ExactRelativistic: return "exact-relativistic";
    case OrbitMethod::ExactNonrelativistic: return "exact-nonrelativistic";
    case OrbitMethod::Perturbative: return "perturbative";
  }
  return "unknown";
}

OrbitSolution solve_orbit_exact(double n, const ModelParams& params, double m_eff,
                                OrbitMethod mode) {
  if (n == 0.0 || !std::isfinite(n)) {
    throw DomainError("solve_orbit_exact: the case n = 0 is excluded");
  }
  if (!(m_eff > 0.0)) throw DomainError("solve_orbit_exact: m_eff must be positive");
  if (mode == OrbitMethod::Perturbative) {
    throw DomainError("solve_orbit_exact: use orbit_perturbative for the perturbative path");
  }
  bool relativistic = (mode == OrbitMethod::ExactRelativistic);

  const double r0 = n * n / (m_eff * params.alpha);
  double lo = 0.25 * r0, hi = 4.0 * r0;
  double flo = radius_equation(n, lo, params, m_eff, relativistic);
  double fhi = radius_equation(n, hi, params, m_eff, relativistic);
  if (!(flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0))) {
    std::ostringstream msg;
    msg << "solve_orbit_exact: no circular orbit in bracket [" << lo << ", " << hi
        << "]; residuals " << flo << ", " << fhi;
    throw ConvergenceError(msg.str());
  }

  // Bisection-safeguarded Newton; derivative by central difference.
  double r = r0;
  double fr = radius_equation(n, r, params, m_eff, relativistic);
  int iter = 0;
  const int max_iter = 200;
  for (; iter < max_iter; ++iter) {
    if ((fr < 0.0) == (flo < 0.0)) {
      lo = r;
      flo = fr;
    } else {
      hi = r;
    }
    double h = 1e-7 * r;
    double fp = (radius_equation(n, r + h, params, m_eff, relativistic) -
                 radius_equation(n, r - h, params, m_eff, relativistic)) /
                (2.0 * h);
    double step = (fp != 0.0) ? -fr / fp : 0.0;
    double next = r + step;
    if (!(next > lo && next < hi) || step == 0.0) next = 0.5 * (lo + hi);
    double fnext = radius_equation(n, next, params, m_eff, relativistic);
    if (std::abs(next - r) <= 1e-16 * std::abs(next) || fnext == 0.0) {
      r = next;
      fr = fnext;
      break;
    }
    r = next;
    fr = fnext;
  }
  return assemble(n, r, params, m_eff, mode, iter + 1);
}

OrbitSolution orbit_perturbative(double n, const ModelParams& params, double m_eff) {
  if (n == 0.0 || !std::isfinite(n)) {
    throw DomainError("orbit_perturbative: the case n = 0 is excluded");
  }
  double omega_L = larmor_frequency(params, m_eff);
  double r0 = n * n / (m_eff * params.alpha);
  double expansion = std::abs(m_eff * omega_L * r0 * r0 / n);
  if (expansion >= 0.5) {
    std::ostringstream msg;
    msg << "orbit_perturbative: expansion parameter |m_eff omega_L r0^2 / n| = " << expansion
        << " exceeds the weak-field bound 0.5";
    throw DomainError(msg.str());
  }

  double ma = m_eff * params.alpha;
  double mw = m_eff * omega_L;
  double n2 = n * n;

  OrbitSolution s;
  s.n = n;
  s.r = r0 * (1.0 - mw * mw * n2 * n2 * n2 / (ma * ma * ma * ma));
  s.v = params.alpha / n + omega_L * r0;
  s.gamma = 1.0 / std::sqrt(1.0 - s.v * s.v);
  s.E = m_eff * (1.0 - 0.5 * params.alpha * params.alpha / n2) + n * omega_L;
  s.P = s.gamma * m_eff * s.v + 0.5 * params.e_charge * params.B * s.r;
  s.omega_L = omega_L;
  s.m_eff = m_eff;
  s.method = OrbitMethod::Perturbative;
  s.regime_parameter = expansion;
  s.regime_warning = expansion > 0.01;
  s.force_residual = lorentz_residual(s, params);
  s.action_residual = std::abs(action_integral(s, params) / kTwoPi - n) / std::abs(n);
  return s;
}

std::vector<ZeemanRow> zeeman_table(const std::vector<double>& n_list,
                                    const ModelParams& params, double m_eff) {
  ModelParams zero_field = params;
  zero_field.B = 0.0;
  double omega_L = larmor_frequency(params, m_eff);

  std::vector<ZeemanRow> rows;
  rows.reserve(n_list.size());
  for (double n : n_list) {
    ZeemanRow row;
    row.n = n;
    row.omega_L = omega_L;

    OrbitSolution pert = orbit_perturbative(n, params, m_eff);
    OrbitSolution pert0 = orbit_perturbative(n, zero_field, m_eff);
    row.E_pert = pert.E;
    row.E0_pert = pert0.E;
    row.dE_pert = n * omega_L;

    OrbitSolution ex = solve_orbit_exact(n, params, m_eff, OrbitMethod::ExactNonrelativistic);
    OrbitSolution ex0 =
        solve_orbit_exact(n, zero_field, m_eff, OrbitMethod::ExactNonrelativistic);
    row.E_exact = ex.E;
    row.E0_exact = ex0.E;
    row.dE_exact = ex.E - ex0.E;
    rows.push_back(row);
  }
  return rows;
}

double action_integral(const OrbitSolution& orbit, const ModelParams& params) {
  return kTwoPi * orbit.r *
         (orbit.gamma * orbit.m_eff * orbit.v + 0.5 * params.e_charge * params.B * orbit.r);
}

double lorentz_residual(const OrbitSolution& orbit, const ModelParams& params) {
  double r = orbit.r, v = orbit.v;
  double balance = -orbit.m_eff * orbit.gamma * v * v / r + params.alpha / (r * r) -
                   params.e_charge * v * params.B;
  return std::abs(balance) / (params.alpha / (r * r));
}

Trajectory integrate_orbit_ode(const OdeInitialState& initial, const ModelParams& params,
                               double m_eff, double dt, int steps, double r_min_guard) {
  if (!(dt > 0.0)) throw DomainError("integrate_orbit_ode: dt must be positive");
  if (steps < 1) throw DomainError("integrate_orbit_ode: steps must be >= 1");
  double speed0 = std::hypot(initial.vx, initial.vy);
  if (speed0 >= 0.05) {
    throw DomainError("integrate_orbit_ode: nonrelativistic regime requires |v| < 0.05");
  }

  const double alpha = params.alpha;
  const double eB_over_m = params.e_charge * params.B / m_eff;
  const double a_over_m = alpha / m_eff;

  auto accel = [&](double x, double y, double vx, double vy, double& ax, double& ay) {
    double r2 = x * x + y * y;
    double r = std::sqrt(r2);
    double inv_r3 = 1.0 / (r2 * r);
    // v x B z^ = (vy B, -vx B)
    ax = -a_over_m * x * inv_r3 + eB_over_m * vy;
    ay = -a_over_m * y * inv_r3 - eB_over_m * vx;
  };

  Trajectory traj;
  traj.dt = dt;
  traj.alpha = alpha;
  traj.m_eff = m_eff;
  traj.B = params.B;
  traj.e_charge = params.e_charge;
  traj.samples.reserve(static_cast<size_t>(steps) + 1);

  double x = initial.x, y = initial.y, vx = initial.vx, vy = initial.vy;
  traj.samples.push_back({0.0, x, y, vx, vy});

  struct State {
    double x, y, vx, vy;
  };
  auto deriv = [&](const State& s) {
    State d;
    d.x = s.vx;
    d.y = s.vy;
    accel(s.x, s.y, s.vx, s.vy, d.vx, d.vy);
    return d;
  };
  auto advance = [](const State& s, const State& d, double h) {
    return State{s.x + h * d.x, s.y + h * d.y, s.vx + h * d.vx, s.vy + h * d.vy};
  };

  for (int i = 0; i < steps; ++i) {
    State s{x, y, vx, vy};
    State k1 = deriv(s);
    State k2 = deriv(advance(s, k1, 0.5 * dt));
    State k3 = deriv(advance(s, k2, 0.5 * dt));
    State k4 = deriv(advance(s, k3, dt));

    x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    vx += dt / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    vy += dt / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    double t = dt * (i + 1);
    traj.samples.push_back({t, x, y, vx, vy});
    if (x * x + y * y < r_min_guard * r_min_guard) {
      std::ostringstream msg;
      msg << "integrate_orbit_ode: trajectory reached r < " << r_min_guard << " at t = " << t
          << " (x=" << x << ", y=" << y << ")";
      throw ConvergenceError(msg.str());
    }
  }
  return traj;
}

}  // namespace zatom
