#pragma once

#include <complex>

#include "zatom/model.hpp"

// Special-function kernels for the guiding-field solutions: the Kummer
// confluent hypergeometric series M(a,b,c) = 1F1(a;b;c), associated Legendre
// functions P_l^m (no Condon-Shortley phase), and the effective degree
// l~ = -1/2 + sqrt((l+1/2)^2 - alpha^2).

namespace zatom {

// value = mant * 2^exp2. Keeps quantities whose magnitude exceeds the double
// range representable (Coulomb radial factors at degree ~ 10^2 overflow
// doubles by hundreds of decades; their ratios are O(1)).
struct ScaledComplex {
  std::complex<double> mant{0.0, 0.0};
  long exp2 = 0;

  std::complex<double> value() const;        // throws DomainError on overflow
  double log2_abs() const;                   // log2 |value|, -inf for zero
};

ScaledComplex scaled_from(std::complex<double> z);
ScaledComplex scaled_mul(const ScaledComplex& a, const ScaledComplex& b);
ScaledComplex scaled_div(const ScaledComplex& a, const ScaledComplex& b);

// Kummer series by direct Taylor summation.
//
// The summation runs in extended precision (MPFR) with the working precision
// chosen adaptively from the observed cancellation, so the returned double
// carries ~1e-15 relative error over the supported domain (|c| up to a few
// hundred; moderate a, b). Stopping rule: |term|/|partial sum| below the
// working epsilon for 3 consecutive terms, iteration cap 10000.
//
// Throws DomainError when b is (within 1e-12 of) zero or a negative integer,
// ConvergenceError when the cap is hit (reports the last increment).
std::complex<double> kummer_m(std::complex<double> a, std::complex<double> b,
                              std::complex<double> c);

// Same series, scaled return; use when the magnitude may leave double range.
ScaledComplex kummer_m_scaled(std::complex<double> a, std::complex<double> b,
                              std::complex<double> c);

// Associated Legendre P_l^m(x) by upward recurrence from P_m^m, WITHOUT the
// Condon-Shortley (-1)^m factor. Requires 0 <= m <= l and |x| <= 1.
double assoc_legendre(int l, int m, double x);

// P_l^m(x) / P_l^m(0), computed prefactor-free (stable for degrees in the
// hundreds where P itself overflows). Requires l+m even, else P_l^m(0) = 0
// and the ratio is undefined (DomainError "equatorial node").
double assoc_legendre_ratio(int l, int m, double x);

// d/dtheta P_l^m(cos theta) / P_l^m(0); same domain notes as the ratio.
double assoc_legendre_theta_deriv_ratio(int l, int m, double theta);

// P_l^m(0) in scaled form, valid for degrees far beyond double range.
ScaledComplex assoc_legendre_at_zero_scaled(int l, int m);

// l~ = -1/2 + sqrt((l+1/2)^2 - alpha^2); requires |alpha| < l + 1/2.
double lambda_tilde(int l, double alpha);

}  // namespace zatom
