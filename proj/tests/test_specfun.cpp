#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "zatom/specfun.hpp"

using namespace zatom;
using cplx = std::complex<double>;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(20260809u);
  return gen;
}

cplx random_disk(double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    cplx z(u(rng()), u(rng()));
    if (std::abs(z) <= radius) return z;
  }
}

cplx random_b(double radius) {
  for (;;) {
    cplx b = random_disk(radius);
    bool near_pole = false;
    for (int j = 0; j <= 2 * static_cast<int>(radius); ++j) {
      if (std::abs(b + static_cast<double>(j)) < 0.5) near_pole = true;
    }
    if (!near_pole) return b;
  }
}

}  // namespace

TEST_CASE("kummer M(a,b,0) = 1 exactly") {
  for (int i = 0; i < 10; ++i) {
    cplx a = random_disk(8.0), b = random_b(8.0);
    CHECK(kummer_m(a, b, 0.0) == cplx(1.0, 0.0));
  }
}

TEST_CASE("kummer reduces to exp when a = b") {
  CHECK(std::abs(kummer_m(2.0, 2.0, 1.0) - std::exp(1.0)) < 1e-14);
  for (int i = 0; i < 50; ++i) {
    cplx a = random_b(8.0);
    cplx z = random_disk(50.0);
    cplx expected = std::exp(z);
    CHECK(std::abs(kummer_m(a, a, z) - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("kummer M(1,2,1) = e - 1") {
  cplx v = kummer_m(1.0, 2.0, 1.0);
  CHECK(std::abs(v - cplx(std::exp(1.0) - 1.0, 0.0)) < 1e-14);
}

TEST_CASE("kummer matches the high-precision series oracle") {
  for (int i = 0; i < 60; ++i) {
    cplx a = random_disk(10.0);
    cplx b = random_b(10.0);
    cplx c = random_disk(50.0);
    cplx got = kummer_m(a, b, c);
    cplx want = oracles::kummer_highprec(a, b, c);
    CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
  }
}

TEST_CASE("kummer rational spot checks") {
  // M at rational arguments against an exact mpq partial sum; the series for
  // these arguments decays fast enough that 60 terms pin 1e-14.
  struct Case {
    long an, ad, bn, bd, cn, cd;
  };
  for (const Case& cs : {Case{1, 2, 5, 3, 1, 4}, Case{-3, 2, 7, 5, 2, 3},
                         Case{5, 1, 9, 2, -1, 2}, Case{1, 7, 3, 11, 3, 5},
                         Case{2, 3, -7, 3, 1, 6}, Case{9, 4, 11, 6, -2, 5},
                         Case{1, 1, 2, 1, 1, 1}, Case{-1, 3, 4, 7, 5, 4},
                         Case{3, 8, 13, 9, -3, 7}, Case{7, 6, 1, 2, 2, 9}}) {
    double want = oracles::kummer_rational_partial(cs.an, cs.ad, cs.bn, cs.bd, cs.cn, cs.cd, 60);
    cplx got = kummer_m(cplx(double(cs.an) / cs.ad, 0.0), cplx(double(cs.bn) / cs.bd, 0.0),
                        cplx(double(cs.cn) / cs.cd, 0.0));
    CHECK(std::abs(got.real() - want) <= 1e-13 * std::max(1.0, std::abs(want)));
    CHECK(got.imag() == 0.0);
  }
}

TEST_CASE("kummer derivative identity d/dc M = (a/b) M(a+1,b+1,c)") {
  for (int i = 0; i < 40; ++i) {
    cplx a = random_disk(6.0);
    cplx b = random_b(6.0);
    cplx c = random_disk(20.0);
    cplx h(1e-5, 0.0);
    cplx fd = (kummer_m(a, b, c + h) - kummer_m(a, b, c - h)) / (2.0 * h);
    cplx analytic = a / b * kummer_m(a + 1.0, b + 1.0, c);
    CHECK(std::abs(fd - analytic) <= 1e-7 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("kummer iteration cap reports non-convergence") {
  // |c| = 12000 keeps growing terms past the 10000-term cap.
  CHECK_THROWS_AS(kummer_m(2.0, 3.0, cplx(0.0, 12000.0)), ConvergenceError);
}

TEST_CASE("kummer rejects b at a pole") {
  CHECK_THROWS_AS(kummer_m(1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(kummer_m(1.0, -3.0, 1.0), DomainError);
  CHECK_THROWS_AS(kummer_m(1.0, cplx(-3.0 + 1e-13, 0.0), 1.0), DomainError);
  CHECK_NOTHROW(kummer_m(1.0, cplx(-3.5, 0.0), 1.0));
  CHECK_NOTHROW(kummer_m(1.0, cplx(-3.0, 0.5), 1.0));
}

TEST_CASE("scaled kummer agrees with the plain value in range") {
  cplx a(2.0, -1.0), b(4.0, 0.5), c(10.0, -20.0);
  ScaledComplex s = kummer_m_scaled(a, b, c);
  CHECK(std::abs(s.value() - kummer_m(a, b, c)) <= 1e-15 * std::abs(s.value()));
}

TEST_CASE("assoc_legendre base cases") {
  CHECK(assoc_legendre(0, 0, 0.77) == 1.0);
  CHECK(assoc_legendre(1, 0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(assoc_legendre(2, 1, 0.0) == 0.0);  // parity: l+m odd
  // P_1^1 = sqrt(1-x^2), P_2^2 = 3 (1-x^2)
  CHECK(assoc_legendre(1, 1, 0.6) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(assoc_legendre(2, 2, 0.6) == doctest::Approx(3.0 * 0.64).epsilon(1e-14));
  // P_2^0 = (3x^2 - 1)/2
  CHECK(assoc_legendre(2, 0, 0.4) == doctest::Approx(0.5 * (3 * 0.16 - 1)).epsilon(1e-14));
}

TEST_CASE("assoc_legendre domain errors") {
  CHECK_THROWS_AS(assoc_legendre(1, 2, 0.3), DomainError);
  CHECK_THROWS_AS(assoc_legendre(2, 1, 1.5), DomainError);
  CHECK_THROWS_AS(assoc_legendre_ratio(2, 1, 0.3), DomainError);  // P(0) = 0
}

TEST_CASE("legendre orthogonality and normalization") {
  std::vector<double> x, w;
  oracles::gauss_legendre(48, x, w);
  for (int m = 0; m <= 2; ++m) {
    for (int l = m; l <= 6; ++l) {
      for (int lp = m; lp <= 6; ++lp) {
        double integral = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
          integral += w[i] * assoc_legendre(l, m, x[i]) * assoc_legendre(lp, m, x[i]);
        }
        if (l != lp) {
          CHECK(std::abs(integral) < 1e-10);
        } else {
          double expected = 2.0 / (2.0 * l + 1.0);
          for (int j = l - m + 1; j <= l + m; ++j) expected *= j;  // (l+m)!/(l-m)!
          CHECK(std::abs(integral - expected) <= 1e-8 * expected);
        }
      }
    }
  }
}

TEST_CASE("assoc_legendre_ratio matches the direct ratio at small degree") {
  for (int m = 0; m <= 4; m += 2) {
    for (int l = m; l <= 8; l += 2) {
      for (double x : {-0.9, -0.4, 0.0, 0.25, 0.8}) {
        double direct = assoc_legendre(l, m, x) / assoc_legendre(l, m, 0.0);
        CHECK(assoc_legendre_ratio(l, m, x) == doctest::Approx(direct).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("assoc_legendre_ratio survives degree 138") {
  double r = assoc_legendre_ratio(138, 138, std::cos(1.2));
  CHECK(r == doctest::Approx(std::pow(std::sin(1.2), 138)).epsilon(1e-12));
  CHECK(std::isfinite(r));
}

TEST_CASE("theta derivative ratio against finite differences") {
  for (int m : {2, 4}) {
    for (int l : {4, 6}) {
      if ((l + m) % 2 != 0) continue;
      for (double theta : {0.7, 1.3, 2.1}) {
        double h = 1e-6;
        double fd = (assoc_legendre_ratio(l, m, std::cos(theta + h)) -
                     assoc_legendre_ratio(l, m, std::cos(theta - h))) /
                    (2.0 * h);
        double analytic = assoc_legendre_theta_deriv_ratio(l, m, theta);
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("lambda_tilde") {
  CHECK(lambda_tilde(3, 0.0) == 3.0);
  CHECK(lambda_tilde(0, 0.4) == doctest::Approx(-0.2).epsilon(1e-15));
  // extended-precision reference for l = 1, alpha = 1/137
  CHECK(lambda_tilde(1, 1.0 / 137.0) ==
        doctest::Approx(0.99998224011366265).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_tilde(0, 0.6), DomainError);

  SUBCASE("strictly decreasing in alpha, exact radicand identity") {
    double prev = lambda_tilde(2, 1e-4);
    for (double alpha : {0.05, 0.2, 0.5, 1.2, 2.2}) {
      double lt = lambda_tilde(2, alpha);
      CHECK(lt < prev);
      prev = lt;
      double lhs = (lt + 0.5) * (lt + 0.5) + alpha * alpha;
      CHECK(lhs == doctest::Approx(2.5 * 2.5).epsilon(1e-14));
    }
  }
}
