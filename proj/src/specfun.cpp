#include "zatom/specfun.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace zatom {

namespace {

ScaledComplex normalize(std::complex<double> m, long e) {
  ScaledComplex out;
  double mag = std::max(std::abs(m.real()), std::abs(m.imag()));
  if (mag == 0.0 || !std::isfinite(mag)) {
    out.mant = m;
    out.exp2 = 0;
    return out;
  }
  int sh = 0;
  std::frexp(mag, &sh);
  out.mant = {std::ldexp(m.real(), -sh), std::ldexp(m.imag(), -sh)};
  out.exp2 = e + sh;
  return out;
}

}  // namespace

std::complex<double> ScaledComplex::value() const {
  if (mant == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
  if (exp2 > 1020) throw DomainError("ScaledComplex: value overflows double range");
  if (exp2 < -1060) return {0.0, 0.0};
  return {std::ldexp(mant.real(), static_cast<int>(exp2)),
          std::ldexp(mant.imag(), static_cast<int>(exp2))};
}

double ScaledComplex::log2_abs() const {
  double a = std::abs(mant);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(a) + static_cast<double>(exp2);
}

ScaledComplex scaled_from(std::complex<double> z) { return normalize(z, 0); }

ScaledComplex scaled_mul(const ScaledComplex& a, const ScaledComplex& b) {
  return normalize(a.mant * b.mant, a.exp2 + b.exp2);
}

ScaledComplex scaled_div(const ScaledComplex& a, const ScaledComplex& b) {
  return normalize(a.mant / b.mant, a.exp2 - b.exp2);
}

// ---------------------------------------------------------------------------
// Kummer M(a,b,c) by extended-precision Taylor summation.
// ---------------------------------------------------------------------------

namespace {

constexpr int kKummerIterationCap = 10000;

// One summation pass at fixed precision. Returns the scaled sum and reports
// the cancellation (bits between the largest intermediate and the result) so
// the caller can decide whether the precision was sufficient.
struct SeriesPass {
  ScaledComplex sum;
  double cancellation_bits = 0.0;
  double last_increment = 0.0;  // |term|/|sum| at exit, for diagnostics
  bool converged = false;
};

SeriesPass kummer_series_pass(std::complex<double> a, std::complex<double> b,
                              std::complex<double> c, mpfr_prec_t prec) {
  // All scalars live at working precision: the shifted denominators (and the
  // a + k, c products) must NOT round through double, or every term picks up
  // a 2^-53 relative error that survives the cancellation at full size.
  mpfr_t tr, ti, sr, si, t1, t2, t3, den, mag, maxmag, eps, sabs;
  mpfr_t akr, aki, bkr, bki, cr, ci;
  mpfr_inits2(prec, tr, ti, sr, si, t1, t2, t3, den, mag, maxmag, eps, sabs, akr, aki, bkr,
              bki, cr, ci, static_cast<mpfr_ptr>(nullptr));

  // term = 1, sum = 1
  mpfr_set_d(tr, 1.0, MPFR_RNDN);
  mpfr_set_d(ti, 0.0, MPFR_RNDN);
  mpfr_set_d(sr, 1.0, MPFR_RNDN);
  mpfr_set_d(si, 0.0, MPFR_RNDN);
  mpfr_set_d(maxmag, 1.0, MPFR_RNDN);
  mpfr_set_ui_2exp(eps, 1, -(prec - 16), MPFR_RNDN);
  mpfr_set_d(aki, a.imag(), MPFR_RNDN);
  mpfr_set_d(bki, b.imag(), MPFR_RNDN);
  mpfr_set_d(cr, c.real(), MPFR_RNDN);
  mpfr_set_d(ci, c.imag(), MPFR_RNDN);

  SeriesPass out;
  int quiet = 0;
  for (int k = 0; k < kKummerIterationCap; ++k) {
    mpfr_set_d(akr, a.real(), MPFR_RNDN);
    mpfr_add_ui(akr, akr, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_set_d(bkr, b.real(), MPFR_RNDN);
    mpfr_add_ui(bkr, bkr, static_cast<unsigned long>(k), MPFR_RNDN);

    // term *= (a + k)
    mpfr_mul(t1, tr, akr, MPFR_RNDN);
    mpfr_mul(t2, ti, aki, MPFR_RNDN);
    mpfr_sub(t3, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, tr, aki, MPFR_RNDN);
    mpfr_mul(t2, ti, akr, MPFR_RNDN);
    mpfr_add(ti, t1, t2, MPFR_RNDN);
    mpfr_set(tr, t3, MPFR_RNDN);

    // term /= (b + k)
    mpfr_mul(t1, bkr, bkr, MPFR_RNDN);
    mpfr_mul(t2, bki, bki, MPFR_RNDN);
    mpfr_add(den, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, tr, bkr, MPFR_RNDN);
    mpfr_mul(t2, ti, bki, MPFR_RNDN);
    mpfr_add(t3, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, ti, bkr, MPFR_RNDN);
    mpfr_mul(t2, tr, bki, MPFR_RNDN);
    mpfr_sub(ti, t1, t2, MPFR_RNDN);
    mpfr_div(ti, ti, den, MPFR_RNDN);
    mpfr_div(tr, t3, den, MPFR_RNDN);

    // term *= c / (k + 1)
    mpfr_mul(t1, tr, cr, MPFR_RNDN);
    mpfr_mul(t2, ti, ci, MPFR_RNDN);
    mpfr_sub(t3, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, tr, ci, MPFR_RNDN);
    mpfr_mul(t2, ti, cr, MPFR_RNDN);
    mpfr_add(ti, t1, t2, MPFR_RNDN);
    mpfr_set(tr, t3, MPFR_RNDN);
    mpfr_div_ui(tr, tr, static_cast<unsigned long>(k + 1), MPFR_RNDN);
    mpfr_div_ui(ti, ti, static_cast<unsigned long>(k + 1), MPFR_RNDN);

    mpfr_add(sr, sr, tr, MPFR_RNDN);
    mpfr_add(si, si, ti, MPFR_RNDN);

    // 1-norm magnitudes are enough for the stopping and cancellation logic.
    mpfr_abs(t1, tr, MPFR_RNDN);
    mpfr_abs(t2, ti, MPFR_RNDN);
    mpfr_add(mag, t1, t2, MPFR_RNDN);
    mpfr_abs(t1, sr, MPFR_RNDN);
    mpfr_abs(t2, si, MPFR_RNDN);
    mpfr_add(sabs, t1, t2, MPFR_RNDN);
    if (mpfr_cmp(mag, maxmag) > 0) mpfr_set(maxmag, mag, MPFR_RNDN);
    if (mpfr_cmp(sabs, maxmag) > 0) mpfr_set(maxmag, sabs, MPFR_RNDN);

    mpfr_mul(t3, sabs, eps, MPFR_RNDN);
    if (mpfr_cmp(mag, t3) < 0) {
      if (++quiet >= 3) {
        out.converged = true;
        break;
      }
    } else {
      quiet = 0;
    }
  }

  long se = 0, me = 0;
  double smr = mpfr_get_d_2exp(&se, sr, MPFR_RNDN);
  long sie = 0;
  double smi = mpfr_get_d_2exp(&sie, si, MPFR_RNDN);
  // Re-express both components against the larger exponent.
  long ebase = std::max(se, sie);
  if (mpfr_zero_p(sr) && mpfr_zero_p(si)) ebase = 0;
  std::complex<double> mant(mpfr_zero_p(sr) ? 0.0 : std::ldexp(smr, static_cast<int>(se - ebase)),
                            mpfr_zero_p(si) ? 0.0 : std::ldexp(smi, static_cast<int>(sie - ebase)));
  out.sum = normalize(mant, ebase);

  double mm = mpfr_get_d_2exp(&me, maxmag, MPFR_RNDN);
  double sum_log2 = out.sum.log2_abs();
  double max_log2 = std::log2(std::abs(mm)) + static_cast<double>(me);
  out.cancellation_bits = std::isfinite(sum_log2) ? (max_log2 - sum_log2) : max_log2 + prec;

  long le = 0;
  double lm = mpfr_get_d_2exp(&le, mag, MPFR_RNDN);
  double mag_log2 = (mpfr_zero_p(mag)) ? -1e9 : std::log2(std::abs(lm)) + static_cast<double>(le);
  out.last_increment = std::exp2(mag_log2 - (std::isfinite(sum_log2) ? sum_log2 : 0.0));

  mpfr_clears(tr, ti, sr, si, t1, t2, t3, den, mag, maxmag, eps, sabs, akr, aki, bkr, bki, cr,
              ci, static_cast<mpfr_ptr>(nullptr));
  return out;
}

void check_b_pole(std::complex<double> b) {
  if (b.imag() != 0.0) return;
  double r = b.real();
  if (r > 0.5) return;
  double nearest = std::round(r);
  if (nearest <= 0.0 && std::abs(r - nearest) <= 1e-12) {
    throw DomainError("kummer_m: b at a pole (zero or negative integer): b = " +
                      std::to_string(r));
  }
}

ScaledComplex kummer_impl(std::complex<double> a, std::complex<double> b,
                          std::complex<double> c) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
      !std::isfinite(b.imag()) || !std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw DomainError("kummer_m: non-finite argument");
  }
  check_b_pole(b);
  if (c == std::complex<double>(0.0, 0.0)) {
    return scaled_from({1.0, 0.0});  // M(a,b,0) = 1 exactly
  }

  // Initial precision from the worst-case alternating-series cancellation
  // ~ |c| log2(e); the observed cancellation then drives up to two retries.
  double cabs = std::abs(c);
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(
      std::min(20000.0, std::max(128.0, 1.45 * cabs + 96.0)));

  for (int attempt = 0; attempt < 3; ++attempt) {
    SeriesPass pass = kummer_series_pass(a, b, c, prec);
    if (!pass.converged) {
      throw ConvergenceError(
          "kummer_m: series did not converge within " + std::to_string(kKummerIterationCap) +
          " terms (last increment " + std::to_string(pass.last_increment) + ")");
    }
    double needed = pass.cancellation_bits + 53.0 + 24.0;
    if (static_cast<double>(prec) >= needed) return pass.sum;
    prec = static_cast<mpfr_prec_t>(std::min(1.0e6, needed + 48.0));
  }
  throw ConvergenceError("kummer_m: precision escalation failed to stabilise");
}

}  // namespace

ScaledComplex kummer_m_scaled(std::complex<double> a, std::complex<double> b,
                              std::complex<double> c) {
  return kummer_impl(a, b, c);
}

std::complex<double> kummer_m(std::complex<double> a, std::complex<double> b,
                              std::complex<double> c) {
  return kummer_impl(a, b, c).value();
}

// ---------------------------------------------------------------------------
// Associated Legendre
// ---------------------------------------------------------------------------

namespace {

void check_legendre_domain(int l, int m, double x) {
  if (l < 0 || m < 0 || m > l) {
    throw DomainError("assoc_legendre: need 0 <= m <= l, got l=" + std::to_string(l) +
                      " m=" + std::to_string(m));
  }
  if (!(std::abs(x) <= 1.0)) {
    throw DomainError("assoc_legendre: |x| <= 1 required, got x=" + std::to_string(x));
  }
}

// Upward recurrence on Q_l := P_l^m / [(2m-1)!! (1-x^2)^{m/2}], which drops
// the prefactor that overflows at large m. Q_m = 1, Q_{m+1} = x(2m+1).
double legendre_q(int l, int m, double x) {
  double qmm = 1.0;
  if (l == m) return qmm;
  double qprev = qmm;
  double q = x * (2.0 * m + 1.0);
  for (int ll = m + 2; ll <= l; ++ll) {
    double qnext = (x * (2.0 * ll - 1.0) * q - (ll + m - 1.0) * qprev) / (ll - m);
    qprev = q;
    q = qnext;
  }
  return q;
}

}  // namespace

double assoc_legendre(int l, int m, double x) {
  check_legendre_domain(l, m, x);
  double pmm = 1.0;
  if (m > 0) {
    double s2 = (1.0 - x) * (1.0 + x);
    double fact = 1.0;
    double s = std::sqrt(s2);
    for (int i = 0; i < m; ++i) {
      pmm *= fact * s;  // no Condon-Shortley factor
      fact += 2.0;
    }
  }
  if (!std::isfinite(pmm)) {
    throw DomainError("assoc_legendre: overflow at m=" + std::to_string(m) +
                      "; use the ratio form for large degrees");
  }
  return pmm * legendre_q(l, m, x);
}

double assoc_legendre_ratio(int l, int m, double x) {
  check_legendre_domain(l, m, x);
  if ((l + m) % 2 != 0) {
    throw DomainError("assoc_legendre_ratio: equatorial node, P_l^m(0) = 0 for odd l+m");
  }
  double q0 = legendre_q(l, m, 0.0);
  double smm = std::pow((1.0 - x) * (1.0 + x), 0.5 * m);
  return legendre_q(l, m, x) * smm / q0;
}

double assoc_legendre_theta_deriv_ratio(int l, int m, double theta) {
  double x = std::cos(theta);
  double s = std::sin(theta);
  check_legendre_domain(l, m, x);
  if ((l + m) % 2 != 0) {
    throw DomainError("assoc_legendre_theta_deriv_ratio: equatorial node, P_l^m(0) = 0");
  }
  // (1-x^2) dP/dx = (l+m) P_{l-1}^m - l x P_l^m ; dP/dtheta = -sin(theta) dP/dx.
  double q0 = legendre_q(l, m, 0.0);
  double ql = legendre_q(l, m, x);
  double qlm1 = (l - 1 >= m) ? legendre_q(l - 1, m, x) : 0.0;
  double smm = (m >= 1) ? std::pow(s * s, 0.5 * (m - 1)) : 1.0 / s;
  // dP/dtheta / P(0) = -[(l+m) Q_{l-1} - l x Q_l] * s^{m-1} / Q_l(0)
  return -((l + m) * qlm1 - l * x * ql) * smm / q0;
}

ScaledComplex assoc_legendre_at_zero_scaled(int l, int m) {
  check_legendre_domain(l, m, 0.0);
  double q0 = legendre_q(l, m, 0.0);
  double log2_dfact = 0.0;  // log2 (2m-1)!!
  for (int i = 1; i <= m; ++i) log2_dfact += std::log2(2.0 * i - 1.0);
  double ip = std::floor(log2_dfact);
  ScaledComplex out = scaled_from({q0 * std::exp2(log2_dfact - ip), 0.0});
  out.exp2 += static_cast<long>(ip);
  return out;
}

double lambda_tilde(int l, double alpha) {
  if (l < 0) throw DomainError("lambda_tilde: l must be non-negative");
  double h = l + 0.5;
  double rad = h * h - alpha * alpha;
  if (!(rad > 0.0) || !(std::abs(alpha) < h)) {
    throw DomainError("lambda_tilde: radicand non-positive (need |alpha| < l + 1/2)");
  }
  return -0.5 + std::sqrt(rad);
}

}  // namespace zatom
