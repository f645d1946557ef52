#pragma once

#include <string>
#include <vector>

#include "zatom/model.hpp"

// Circular-orbit dynamics under Coulomb attraction -alpha/r^2 plus a uniform
// magnetic field B z^, solved exactly (bracketed root-finding on the radius)
// and perturbatively (weak-field closed forms), plus a fixed-step RK4
// integrator for the planar equation of motion.
//
// Sign conventions, kept coherent across the module:
//   v > 0 means anticlockwise motion (+phi^); n carries the sign of L_z;
//   omega_L = -e B/(2 m_eff) is positive for B > 0 (e < 0).

namespace zatom {

enum class OrbitMethod { ExactRelativistic, ExactNonrelativistic, Perturbative };

std::string to_string(OrbitMethod m);

struct OrbitSolution {
  double n = 0.0;        // quantization number = L_z, continuous and signed
  double r = 0.0;        // orbit radius
  double v = 0.0;        // signed speed along +phi^
  double gamma = 1.0;    // Lorentz factor (1 in nonrelativistic mode)
  double E = 0.0;        // total energy including rest mass
  double P = 0.0;        // canonical momentum along +phi^: gamma m v + e B r / 2
  double omega_L = 0.0;  // Larmor frequency used
  double m_eff = 0.0;    // dressed mass used
  OrbitMethod method = OrbitMethod::ExactNonrelativistic;

  // Solver diagnostics
  double force_residual = 0.0;   // normalized force-balance residual
  double action_residual = 0.0;  // |J/(2 pi) - n| / |n|
  int iterations = 0;
  double regime_parameter = 0.0;  // |m_eff omega_L r0^2 / n| for the perturbative path
  bool regime_warning = false;    // set when the expansion parameter exceeds 0.01
};

struct TrajectorySample {
  double t, x, y, vx, vy;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  double alpha = 0.0, m_eff = 0.0, B = 0.0, e_charge = 0.0;  // params snapshot
};

// Solves {force balance, J = 2 pi n} for a circular orbit. The speed is
// eliminated through the action constraint (gamma m v = n/r - e B r/2) and the
// radius is found by bisection-safeguarded Newton in the bracket
// [r0/4, 4 r0], r0 = n^2/(m_eff alpha). In nonrelativistic mode the radius
// equation reduces to the quartic (m_eff omega_L)^2 r^4 + m_eff alpha r = n^2.
// Throws DomainError for n = 0, ConvergenceError when no root lies in the
// bracket (reports the endpoints and residuals).
OrbitSolution solve_orbit_exact(double n, const ModelParams& params, double m_eff,
                                OrbitMethod mode = OrbitMethod::ExactRelativistic);

// Weak-field closed forms:
//   r = r0 (1 - (m_eff omega_L)^2 n^6/(m_eff alpha)^4)
//   v = alpha/n + omega_L r0
//   E = m_eff (1 - alpha^2/(2 n^2)) + n omega_L
// Errors out when the expansion parameter |m_eff omega_L r0^2/n| exceeds 0.5;
// flags a warning above 0.01. The Zeeman tables need n = +-2 at B = 1e-5
// (expansion 0.23), which sets the bound.
OrbitSolution orbit_perturbative(double n, const ModelParams& params, double m_eff);

struct ZeemanRow {
  double n;
  double E0_pert, E_pert, dE_pert;     // dE_pert = n omega_L exactly
  double E0_exact, E_exact, dE_exact;  // nonrelativistic exact solver
  double omega_L;
};

std::vector<ZeemanRow> zeeman_table(const std::vector<double>& n_list,
                                    const ModelParams& params, double m_eff);

// J = 2 pi r (gamma m_eff v + e B r / 2); equals 2 pi n for solved orbits.
double action_integral(const OrbitSolution& orbit, const ModelParams& params);

// | -m_eff gamma v^2/r + alpha/r^2 - e v B | normalized by alpha/r^2.
double lorentz_residual(const OrbitSolution& orbit, const ModelParams& params);

struct OdeInitialState {
  double x, y, vx, vy;
};

// Classical fixed-step RK4 on m_eff dv/dt = -alpha r^/r^2 + e v x B z^.
// Trajectory terminates with an error if r drops below r_min_guard.
Trajectory integrate_orbit_ode(const OdeInitialState& initial, const ModelParams& params,
                               double m_eff, double dt, int steps,
                               double r_min_guard = 1e-6);

}  // namespace zatom
