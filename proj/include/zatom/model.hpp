#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

// Physical parameters and unit conventions shared by all solvers.
//
// Natural units throughout: c = hbar = 1. Masses, energies, frequencies and
// inverse lengths share one unit; lengths and times share the inverse unit.
// Charge convention: e = -|e| < 0 with alpha = e^2/(4 pi).

namespace zatom {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  double alpha = 1.0 / 137.0;  // fine-structure constant, in (0,1)
  double m_p = 1.0;            // bare particle mass, > 0
  double sigma = 0.0;          // internal-oscillator coupling, >= 0
  double B = 0.0;              // magnetic field along +z, signed
  double u0 = 1.0;             // field amplitude, > 0
  double e_charge = 0.0;       // signed charge, always -sqrt(4 pi alpha)
  double b_const = 1.0;        // de Broglie proportionality constant, fixed to 1
  double tension = 0.0;        // field tension T; accepted for completeness, unused
};

struct DerivedConstants {
  double m_eff = 0.0;    // dressed mass m_p (1 + sigma Omega_p^2 |z0|^2)
  double omega_L = 0.0;  // Larmor frequency -e B / (2 m_eff), signed
};

// e = -sqrt(4 pi alpha). Throws DomainError unless 0 < alpha < 1.
double charge_from_alpha(double alpha);

// omega_L = -e B / (2 m_eff); positive for B > 0 since e < 0.
double larmor_frequency(const ModelParams& params, double m_eff);

// m_eff = m_p (1 + sigma Omega_p^2 z0^2).
double dressed_mass(const ModelParams& params, double omega_p, double z0);

DerivedConstants derive_constants(const ModelParams& params, double omega_p, double z0);

// Builds a ModelParams from a flat JSON object with keys
//   alpha_inv (or alpha), m_p, sigma, B, u0, and optionally T.
// alpha_inv wins when both are given and consistent; inconsistent values
// (beyond 1e-12 relative) are an error. Unknown keys are rejected unless
// `permissive` is set. Every rejection names the offending field.
ModelParams validate_params(const nlohmann::json& raw, bool permissive = false);

ModelParams params_from_file(const std::string& path, bool permissive = false);

// Convenience constructor used by tests and the CLI: fills e_charge from alpha
// and checks all invariants.
ModelParams make_params(double alpha, double m_p, double sigma, double B, double u0);

}  // namespace zatom
