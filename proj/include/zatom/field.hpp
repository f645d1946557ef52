#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "zatom/model.hpp"
#include "zatom/orbit.hpp"
#include "zatom/specfun.hpp"

// The two counter-propagating guiding-wave modes
//
//   u+-(t,r,theta,phi) = A+- R_l~(r) P_l^{+-m}(cos theta) e^{i(+-m phi - omega+- t)}
//   R_l~(r) = e^{i omega r} r^l~ M(l~ + 1 - i alpha, 2 l~ + 2, -2 i omega r)
//
// with omega+- the Larmor-shifted frequencies. Amplitudes A+- are fixed by
// A+- R(r_n) P(0) = u0/2 on the orbit; evaluation is organised around the
// ratios R(r)/R(r_n) and P(x)/P(0) so that degrees in the hundreds stay in
// range (A+- itself can be far below the double underflow threshold).
//
// Frequencies are built dispersion-exact: k+- = m+-/r_n, eps+- = alpha/r_n
// +- e B r_n / 2, omega+- := k+- - eps+-, omega+-(0) := omega+- -+ m+- omega_L.
// On a selection-rule orbit (alpha = n^2/N, relativistic radius, B = 0) these
// zero-field frequencies coincide exactly with the closed form
// m_eff (1 +- alpha/n - alpha^2/n^2)/sqrt(1 - alpha^2/n^2); the build checks
// that agreement and rejects inconsistent (n, m+-) choices.

namespace zatom {

enum class Frame {
  Lab,      // Larmor-shifted time phases omega+-
  Rotating  // zero-field time phases omega+-(0), same radial profile
};

struct Mode {
  int m = 0;               // non-negative azimuthal order
  int phase_sign = +1;     // +1: e^{+i m phi}; -1: e^{-i m phi}
  int l = 0;               // polar degree, l >= m
  double l_tilde = 0.0;    // effective degree from lambda_tilde
  double alpha = 0.0;
  double omega_time = 0.0;   // lab-frame phase frequency (shifted)
  double omega0_time = 0.0;  // rotating-frame phase frequency
  double omega_radial = 0.0; // frequency inside R
  double r_ref = 0.0;        // orbit radius used for amplitude matching
  double half_u0 = 0.0;      // u0/2, the on-orbit mode amplitude
  ScaledComplex m_at_ref;    // M(a, b, -2 i omega_radial r_ref), cached
  ScaledComplex amplitude;   // A+-, for reporting; evaluation uses ratios

  // Rebuilds the cached radial reference after changing frequencies; used by
  // the rotating-frame checks which need (omega_radial, omega_time) decoupled.
  Mode with_frequencies(double omega_radial_new, double omega_time_new) const;
};

std::complex<double> eval_mode_at(const Mode& mode, double t, double r, double theta,
                                  double phi, Frame frame = Frame::Lab);

struct ModePair {
  int m_plus = 0, m_minus = 0;
  int l_plus = 0, l_minus = 0;
  double ltilde_plus = 0.0, ltilde_minus = 0.0;
  double omega0_plus = 0.0, omega0_minus = 0.0;  // zero-field frequencies
  double omega_plus = 0.0, omega_minus = 0.0;    // Larmor-shifted
  double k_plus = 0.0, k_minus = 0.0;            // m+-/r_n
  double eps_plus = 0.0, eps_minus = 0.0;        // alpha/r_n +- e B r_n/2
  ScaledComplex A_plus, A_minus;

  double n_tilde = 0.0;   // (m+ - m-)/2
  double N_big = 0.0;     // (m+ + m-)/2
  double k_n = 0.0;       // (k+ - k-)/2
  double omega_n = 0.0;   // (omega+ + omega-)/2
  double omega0_n = 0.0;  // (omega+(0) + omega-(0))/2
  double eta = 0.0;       // (eps+ - eps-)/2
  double eps_bar = 0.0;   // (eps+ + eps-)/2

  double r_n = 0.0;
  double omega_L = 0.0;
  double u0 = 0.0;
  double alpha = 0.0;
  double m_eff = 0.0;

  Mode plus, minus;
};

// omega+-(0) = m_eff (1 +- alpha/n - alpha^2/n^2) / sqrt(1 - alpha^2/n^2).
std::pair<double, double> mode_frequencies_zero(double n, double alpha, double m_eff);

struct BuildOptions {
  int l_plus = -1;   // default: l = m (minimal degree, equator-compatible)
  int l_minus = -1;
  double consistency_tol = 1e-9;  // allowed selection-rule residual
                                  // |alpha N - n~^2| / n~^2
  bool check_consistency = true;
};

ModePair build_mode_pair(int m_plus, int m_minus, const OrbitSolution& orbit,
                         const ModelParams& params, const BuildOptions& opts = {});

enum class ModeSelect { Plus, Minus };

std::complex<double> eval_mode(double t, double r, double theta, double phi,
                               ModeSelect which, const ModePair& pair);

// u = u+ + u-. In Frame::Rotating the +-m omega_L phase shifts are dropped;
// the lab field at (t, phi) equals the rotating-frame field at (t, phi - omega_L t)
// identically.
std::complex<double> eval_total_field(double t, double r, double theta, double phi,
                                      const ModePair& pair, Frame frame = Frame::Lab);

// On-orbit closed form
//   u0 e^{i(n~ phi - omega_n t)} cos[(omega_n + eps)(r_n phi) - (k_n - eta) t].
std::complex<double> field_on_orbit_closed_form(double t, double phi, const ModePair& pair,
                                                const OrbitSolution& orbit);

// v_g = (k_n - eta) / (omega_n + eps).
double group_velocity(const ModePair& pair);

struct FieldGrid {
  double t = 0.0;
  double half_extent = 0.0;
  int resolution = 0;
  std::vector<std::complex<double>> values;  // row-major, index = iy*res + ix
  std::vector<double> magnitudes;
};

struct GridSpec {
  double t = 0.0;
  double half_extent = 0.0;
  int resolution = 0;
  Frame frame = Frame::Lab;
};

// Samples the total field on the z = 0 plane; the r = 0 centre sample is 0 by
// convention. resolution must be in [2, 4096].
FieldGrid field_grid(const ModePair& pair, const GridSpec& spec);

// |u| sampled on the orbit circle at nsamples uniform angles.
std::vector<double> orbit_circle_magnitudes(const ModePair& pair, double t, int nsamples,
                                            Frame frame = Frame::Lab);

// Strict local maxima of a cyclic sequence.
int count_cyclic_local_maxima(const std::vector<double>& values);

void write_grid_csv(const FieldGrid& grid, std::ostream& out);
void write_grid_pgm(const FieldGrid& grid, std::ostream& out);

}  // namespace zatom
