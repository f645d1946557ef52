#include "zatom/field.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace zatom {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::complex<double> polar_unit(double phase) {
  return {std::cos(phase), std::sin(phase)};
}

// Multiplies a scaled complex by 2^x for real x, keeping the exponent split.
ScaledComplex scaled_mul_pow2(const ScaledComplex& a, double x) {
  double ip = std::floor(x);
  ScaledComplex out = a;
  out.mant *= std::exp2(x - ip);
  out.exp2 += static_cast<long>(ip);
  return out;
}

ScaledComplex radial_reference(const Mode& mode) {
  std::complex<double> a(mode.l_tilde + 1.0, -mode.alpha);
  std::complex<double> b(2.0 * mode.l_tilde + 2.0, 0.0);
  std::complex<double> c(0.0, -2.0 * mode.omega_radial * mode.r_ref);
  return kummer_m_scaled(a, b, c);
}

}  // namespace

Mode Mode::with_frequencies(double omega_radial_new, double omega_time_new) const {
  Mode out = *this;
  out.omega_radial = omega_radial_new;
  out.omega_time = omega_time_new;
  out.omega0_time = omega_time_new;
  out.m_at_ref = radial_reference(out);
  return out;
}

std::complex<double> eval_mode_at(const Mode& mode, double t, double r, double theta,
                                  double phi, Frame frame) {
  if (!(r > 0.0)) throw DomainError("eval_mode_at: r > 0 required");

  double x = std::cos(theta);
  double p_ratio = assoc_legendre_ratio(mode.l, mode.m, x);

  ScaledComplex m_ratio;
  if (r == mode.r_ref) {
    m_ratio = scaled_from({1.0, 0.0});  // on-orbit evaluation, ratio exactly 1
  } else {
    std::complex<double> a(mode.l_tilde + 1.0, -mode.alpha);
    std::complex<double> b(2.0 * mode.l_tilde + 2.0, 0.0);
    std::complex<double> c(0.0, -2.0 * mode.omega_radial * r);
    m_ratio = scaled_div(kummer_m_scaled(a, b, c), mode.m_at_ref);
  }

  // (r/r_ref)^l~ folded into the exponent, e^{i omega (r - r_ref)} unimodular.
  ScaledComplex rad = scaled_mul_pow2(m_ratio, mode.l_tilde * std::log2(r / mode.r_ref));
  double omega_t = (frame == Frame::Lab) ? mode.omega_time : mode.omega0_time;
  double phase = mode.omega_radial * (r - mode.r_ref) + mode.phase_sign * mode.m * phi -
                 omega_t * t;

  ScaledComplex u = rad;
  u.mant *= mode.half_u0 * p_ratio * polar_unit(phase);
  // Far from the orbit the ratio under/overflows double range; underflow is a
  // genuinely negligible field, overflow is out of the supported window.
  if (u.log2_abs() < -1060.0) return {0.0, 0.0};
  return u.value();
}

std::pair<double, double> mode_frequencies_zero(double n, double alpha, double m_eff) {
  double ratio = alpha / n;
  if (!(std::abs(ratio) < 1.0)) {
    throw DomainError("mode_frequencies_zero: |alpha/n| < 1 required");
  }
  double common = m_eff / std::sqrt(1.0 - ratio * ratio);
  double wp = common * (1.0 + ratio - ratio * ratio);
  double wm = common * (1.0 - ratio - ratio * ratio);
  return {wp, wm};
}

ModePair build_mode_pair(int m_plus, int m_minus, const OrbitSolution& orbit,
                         const ModelParams& params, const BuildOptions& opts) {
  if (m_plus < 0 || m_minus < 0) {
    throw DomainError("build_mode_pair: azimuthal orders must be non-negative");
  }
  int l_plus = (opts.l_plus >= 0) ? opts.l_plus : m_plus;
  int l_minus = (opts.l_minus >= 0) ? opts.l_minus : m_minus;
  if (l_plus < m_plus || l_minus < m_minus) {
    throw DomainError("build_mode_pair: need m <= l for each mode");
  }
  if ((l_plus + m_plus) % 2 != 0 || (l_minus + m_minus) % 2 != 0) {
    throw DomainError("build_mode_pair: equatorial node: amplitude condition unsolvable "
                      "(l + m must be even)");
  }

  double n_tilde = 0.5 * (m_plus - m_minus);
  if (std::abs(n_tilde - orbit.n) > 1e-9) {
    std::ostringstream msg;
    msg << "build_mode_pair: (m+ - m-)/2 = " << n_tilde << " does not match orbit n = "
        << orbit.n;
    throw ConsistencyError(msg.str());
  }

  ModePair pair;
  pair.m_plus = m_plus;
  pair.m_minus = m_minus;
  pair.l_plus = l_plus;
  pair.l_minus = l_minus;
  pair.r_n = orbit.r;
  pair.m_eff = orbit.m_eff;
  pair.omega_L = larmor_frequency(params, orbit.m_eff);
  pair.u0 = params.u0;
  pair.alpha = params.alpha;

  pair.ltilde_plus = lambda_tilde(l_plus, params.alpha);
  pair.ltilde_minus = lambda_tilde(l_minus, params.alpha);

  double r = orbit.r;
  pair.k_plus = m_plus / r;
  pair.k_minus = m_minus / r;
  pair.eps_plus = params.alpha / r + 0.5 * params.e_charge * params.B * r;
  pair.eps_minus = params.alpha / r - 0.5 * params.e_charge * params.B * r;

  // Dispersion-exact frequencies; the Larmor split then defines the stored
  // zero-field values. omega+- is rebuilt from the stored split so that
  // omega+- = omega+-(0) +- m omega_L holds bitwise; the one rounding this
  // costs lands in the dispersion residual, which carries a 1e-12 budget.
  pair.omega_plus = pair.k_plus - pair.eps_plus;
  pair.omega_minus = pair.k_minus - pair.eps_minus;
  pair.omega0_plus = pair.omega_plus - m_plus * pair.omega_L;
  pair.omega0_minus = pair.omega_minus + m_minus * pair.omega_L;
  pair.omega_plus = pair.omega0_plus + m_plus * pair.omega_L;
  pair.omega_minus = pair.omega0_minus - m_minus * pair.omega_L;

  if (opts.check_consistency) {
    // An (n, m+-) choice is consistent iff the selection rule alpha = n~^2/N
    // holds; only then do the dispersion frequencies match the zero-field
    // closed form. (At B = 0 that match is exact and checked below; at B != 0
    // the frequencies acquire a genuine O(B^2) r^3/alpha offset.)
    double N_big = 0.5 * (m_plus + m_minus);
    double sel = std::abs(params.alpha * N_big - n_tilde * n_tilde) / (n_tilde * n_tilde);
    if (sel > opts.consistency_tol) {
      std::ostringstream msg;
      msg << "build_mode_pair: (n, m+-) inconsistent with alpha: |alpha N - n~^2|/n~^2 = "
          << sel;
      throw ConsistencyError(msg.str());
    }
    if (params.B == 0.0) {
      auto [wp_jd, wm_jd] = mode_frequencies_zero(orbit.n, params.alpha, orbit.m_eff);
      double gap = std::max(std::abs(pair.omega0_plus - wp_jd),
                            std::abs(pair.omega0_minus - wm_jd));
      if (gap > 1e-10 * orbit.m_eff) {
        std::ostringstream msg;
        msg << "build_mode_pair: zero-field frequencies disagree with the closed form by "
            << gap << "; orbit not solved on the selection rule (use the relativistic "
            << "solver)";
        throw ConsistencyError(msg.str());
      }
    }
  }

  pair.n_tilde = n_tilde;
  pair.N_big = 0.5 * (m_plus + m_minus);
  pair.k_n = 0.5 * (pair.k_plus - pair.k_minus);
  pair.omega_n = 0.5 * (pair.omega_plus + pair.omega_minus);
  pair.omega0_n = 0.5 * (pair.omega0_plus + pair.omega0_minus);
  pair.eta = 0.5 * (pair.eps_plus - pair.eps_minus);
  pair.eps_bar = 0.5 * (pair.eps_plus + pair.eps_minus);

  auto make_mode = [&](int m, int sign, int l, double lt, double omega, double omega0) {
    Mode md;
    md.m = m;
    md.phase_sign = sign;
    md.l = l;
    md.l_tilde = lt;
    md.alpha = params.alpha;
    md.omega_time = omega;
    md.omega0_time = omega0;
    md.omega_radial = omega;
    md.r_ref = r;
    md.half_u0 = 0.5 * params.u0;
    md.m_at_ref = radial_reference(md);

    // A = (u0/2) / (R(r_n) P_l^m(0)); R(r_n) = e^{i w r_n} r_n^l~ M_ref.
    ScaledComplex R_ref = scaled_mul_pow2(md.m_at_ref, lt * std::log2(r));
    R_ref.mant *= polar_unit(md.omega_radial * r);
    ScaledComplex P0 = assoc_legendre_at_zero_scaled(l, m);
    ScaledComplex denom = scaled_mul(R_ref, P0);
    md.amplitude = scaled_div(scaled_from({md.half_u0, 0.0}), denom);
    return md;
  };

  pair.plus = make_mode(m_plus, +1, l_plus, pair.ltilde_plus, pair.omega_plus,
                        pair.omega0_plus);
  pair.minus = make_mode(m_minus, -1, l_minus, pair.ltilde_minus, pair.omega_minus,
                         pair.omega0_minus);
  pair.A_plus = pair.plus.amplitude;
  pair.A_minus = pair.minus.amplitude;
  return pair;
}

std::complex<double> eval_mode(double t, double r, double theta, double phi,
                               ModeSelect which, const ModePair& pair) {
  const Mode& mode = (which == ModeSelect::Plus) ? pair.plus : pair.minus;
  return eval_mode_at(mode, t, r, theta, phi, Frame::Lab);
}

std::complex<double> eval_total_field(double t, double r, double theta, double phi,
                                      const ModePair& pair, Frame frame) {
  return eval_mode_at(pair.plus, t, r, theta, phi, frame) +
         eval_mode_at(pair.minus, t, r, theta, phi, frame);
}

std::complex<double> field_on_orbit_closed_form(double t, double phi, const ModePair& pair,
                                                const OrbitSolution& orbit) {
  if (std::abs(orbit.r - pair.r_n) > 1e-12 * pair.r_n) {
    throw ConsistencyError("field_on_orbit_closed_form: orbit and pair disagree on r_n");
  }
  double plane_phase = pair.n_tilde * phi - pair.omega_n * t;
  double beat = (pair.omega_n + pair.eps_bar) * pair.r_n * phi - (pair.k_n - pair.eta) * t;
  return pair.u0 * polar_unit(plane_phase) * std::cos(beat);
}

double group_velocity(const ModePair& pair) {
  double denom = pair.omega_n + pair.eps_bar;
  if (denom == 0.0) throw DomainError("group_velocity: zero denominator");
  return (pair.k_n - pair.eta) / denom;
}

FieldGrid field_grid(const ModePair& pair, const GridSpec& spec) {
  if (spec.resolution < 2) throw DomainError("field_grid: resolution must be >= 2");
  if (spec.resolution > 4096) throw DomainError("field_grid: resolution cap is 4096");
  if (!(spec.half_extent > 0.0)) throw DomainError("field_grid: half_extent must be positive");

  FieldGrid grid;
  grid.t = spec.t;
  grid.half_extent = spec.half_extent;
  grid.resolution = spec.resolution;
  const int res = spec.resolution;
  grid.values.resize(static_cast<size_t>(res) * res);
  grid.magnitudes.resize(grid.values.size());

  for (int iy = 0; iy < res; ++iy) {
    double y = -spec.half_extent + 2.0 * spec.half_extent * iy / (res - 1);
    for (int ix = 0; ix < res; ++ix) {
      double x = -spec.half_extent + 2.0 * spec.half_extent * ix / (res - 1);
      double r = std::hypot(x, y);
      std::complex<double> u(0.0, 0.0);
      if (r > 0.0) {
        u = eval_total_field(spec.t, r, 0.5 * kPi, std::atan2(y, x), pair, spec.frame);
      }
      size_t idx = static_cast<size_t>(iy) * res + ix;
      grid.values[idx] = u;
      grid.magnitudes[idx] = std::abs(u);
    }
  }
  return grid;
}

std::vector<double> orbit_circle_magnitudes(const ModePair& pair, double t, int nsamples,
                                            Frame frame) {
  if (nsamples < 4) throw DomainError("orbit_circle_magnitudes: need at least 4 samples");
  std::vector<double> mags(nsamples);
  for (int i = 0; i < nsamples; ++i) {
    double phi = 2.0 * kPi * i / nsamples;
    mags[i] = std::abs(eval_total_field(t, pair.r_n, 0.5 * kPi, phi, pair, frame));
  }
  return mags;
}

int count_cyclic_local_maxima(const std::vector<double>& values) {
  int n = static_cast<int>(values.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    double prev = values[(i + n - 1) % n];
    double next = values[(i + 1) % n];
    if (values[i] > prev && values[i] > next) ++count;
  }
  return count;
}

void write_grid_csv(const FieldGrid& grid, std::ostream& out) {
  out << "x,y,re,im,magnitude\n";
  char buf[160];
  const int res = grid.resolution;
  for (int iy = 0; iy < res; ++iy) {
    double y = -grid.half_extent + 2.0 * grid.half_extent * iy / (res - 1);
    for (int ix = 0; ix < res; ++ix) {
      double x = -grid.half_extent + 2.0 * grid.half_extent * ix / (res - 1);
      size_t idx = static_cast<size_t>(iy) * res + ix;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y,
                    grid.values[idx].real(), grid.values[idx].imag(), grid.magnitudes[idx]);
      out << buf;
    }
  }
}

void write_grid_pgm(const FieldGrid& grid, std::ostream& out) {
  double maxmag = 0.0;
  for (double m : grid.magnitudes) maxmag = std::max(maxmag, m);
  out << "P2\n" << grid.resolution << " " << grid.resolution << "\n255\n";
  const int res = grid.resolution;
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix) {
      size_t idx = static_cast<size_t>(iy) * res + ix;
      int v = (maxmag > 0.0)
                  ? static_cast<int>(std::lround(grid.magnitudes[idx] / maxmag * 255.0))
                  : 0;
      out << v << (ix + 1 == res ? '\n' : ' ');
    }
  }
}

}  // namespace zatom
