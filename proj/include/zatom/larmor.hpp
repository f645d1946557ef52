#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zatom/field.hpp"
#include "zatom/model.hpp"
#include "zatom/orbit.hpp"

// Larmor's theorem, quantified.
//
// Wave side: the first-order lab operator
//   L[u] = (d_t - i alpha/r)^2 u - lap u + i e B d_phi u
// annihilates the zero-field modes exactly when B = 0; with B on, applying it
// to the *rotated* zero-field solution (phi -> phi - omega_L t) suppresses the
// residual by ~alpha/n relative to the un-rotated solution. The cancellation
// is not O(B^2)-perfect: the derivation identifies the mode frequency with
// m_eff and neglects alpha/r against omega, so an O(B alpha) leftover is
// expected and measured.
//
// Particle side: v(B) = v(0) + omega_L r and E(B) = E(0) + n omega_L up to
// O(B^2), checked against the exact solvers.

namespace zatom {

struct CylPoint {
  double rho, phi, z;
};

// t' = t, rho' = rho, z' = z, phi' = phi - omega_L t.
CylPoint rotate_coordinates(double t, const CylPoint& p, double omega_L);

// A field of the separable form S(r, theta) e^{i(m_phase phi - omega t)};
// t and phi derivatives are analytic, r and theta derivatives are taken by
// Richardson-extrapolated central differences of S.
struct HarmonicComponent {
  std::function<std::complex<double>(double r, double theta)> spatial;
  double omega = 0.0;
  double m_phase = 0.0;  // signed azimuthal order
};

struct OperatorPoint {
  double t, r, theta, phi;
};

struct FdSteps {
  double radial = 0.0;  // default r_n * 1e-4 in the aggregate test
  double polar = 0.0;   // default 4.2e-3 / max(m,1), keeps the m^6 FD error down
};

// Evaluates L[u] at a point for a sum of harmonic components.
// Requires r > 10 * radial step and theta away from the poles.
std::complex<double> lab_operator_residual(const std::vector<HarmonicComponent>& field,
                                           const OperatorPoint& point,
                                           const ModelParams& params, const FdSteps& steps);

struct ResidualReport {
  std::vector<std::array<double, 4>> sample_points;  // (t, r, theta, phi)
  // RMS over samples of |L[u]| / (|u+| + |u-|), i.e. residuals relative to
  // the local mode magnitude (the polar sin^l falloff spans ~8 decades over
  // the sample band and would otherwise dominate the aggregate).
  double residual_rotated = 0.0;
  double residual_unrotated = 0.0;
  double ratio = 0.0;
  double B_value = 0.0;
  double fd_step = 0.0;
};

nlohmann::json to_json(const ResidualReport& report);

// Samples both residuals near the orbit (r in [0.95, 1.05] r_n, theta in
// [pi/3, 2pi/3]) with a deterministic generator.
ResidualReport larmor_cancellation_test(const ModePair& pair, const ModelParams& params,
                                        int sample_count, unsigned seed = 12345);

// {velocity_map: |v_B - (v_0 + omega_L r_0)|, energy_map: |E_B - (E_0 + n omega_L)|}.
std::map<std::string, double> particle_larmor_check(const OrbitSolution& orbit_B,
                                                    const OrbitSolution& orbit_0,
                                                    double omega_L);

}  // namespace zatom
