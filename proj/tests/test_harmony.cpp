#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "zatom/harmony.hpp"

using namespace zatom;

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

struct Atom {
  ModelParams params;
  OrbitSolution orbit;
  ModePair pair;
};

Atom make_atom(double alpha_inv, int m_plus, int m_minus, double B) {
  Atom a{make_params(1.0 / alpha_inv, 1.0, 0.0, B, 1.0), {}, {}};
  double n = 0.5 * (m_plus - m_minus);
  a.orbit = solve_orbit_exact(n, a.params, 1.0, OrbitMethod::ExactRelativistic);
  a.pair = build_mode_pair(m_plus, m_minus, a.orbit, a.params);
  return a;
}

}  // namespace

TEST_CASE("selection rule enumeration") {
  SUBCASE("toy atom: alpha0_inv = 3 gives (4, 2) at n = 1") {
    auto entries = selection_rule_enumerate(3, 1);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].m_plus == 4);
    CHECK(entries[0].m_minus == 2);
    CHECK(entries[0].n == 1.0);
    CHECK(entries[0].N_big == 3.0);
    CHECK(entries[0].alpha0 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("alpha0_inv = 137: (138,136) and (550,546)") {
    auto entries = selection_rule_enumerate(137, 2);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].m_plus == 138);
    CHECK(entries[0].m_minus == 136);
    CHECK(entries[1].m_plus == 550);
    CHECK(entries[1].m_minus == 546);
    CHECK(entries[1].N_big == 548.0);
  }
  SUBCASE("half-integer candidates are rejected by m integrality at 137") {
    auto with_half = selection_rule_enumerate(137, 2, true);
    CHECK(with_half.size() == 2);  // identical to the integer-only run
  }
  SUBCASE("alpha0_inv = 4 with the flag: n~ = 1/2 gives non-integer m, row absent") {
    auto entries = selection_rule_enumerate(4, 1, true);
    REQUIRE(entries.size() == 1);  // only n = 1: N = 4, (5, 3)
    CHECK(entries[0].m_plus == 5);
    CHECK(entries[0].m_minus == 3);
  }
  SUBCASE("alpha0_inv = 2 with the flag admits a genuine half-integer entry") {
    auto entries = selection_rule_enumerate(2, 1, true);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].m_plus == 1);  // n~ = 1/2: N = 1/2, m+- = 1, 0
    CHECK(entries[0].m_minus == 0);
    CHECK(entries[0].n == 0.5);
    CHECK(entries[1].m_plus == 3);  // n~ = 1: N = 2
    CHECK(entries[1].m_minus == 1);
  }
  SUBCASE("exact rational invariant: N alpha0 = n^2") {
    for (auto& e : selection_rule_enumerate(137, 3)) {
      // in integers: (m+ - m-)^2 * alpha0_inv == 2 (m+ + m-)
      std::int64_t tn = e.m_plus - e.m_minus;
      CHECK(tn * tn * 137 == 2 * (e.m_plus + e.m_minus));
    }
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(selection_rule_enumerate(0, 1), DomainError);
    CHECK_THROWS_AS(selection_rule_enumerate(3, 0), DomainError);
  }
}

TEST_CASE("selection rule matches brute force for alpha0_inv in {1,2,3,137}") {
  for (std::int64_t inv : {1LL, 2LL, 3LL, 137LL}) {
    int n_max = (inv == 137) ? 3 : 10;
    std::int64_t m_cap = 1500;
    auto brute = oracles::selection_brute_force(inv, n_max, m_cap);
    auto fast = selection_rule_enumerate(inv, n_max);
    // keep only fast entries within the brute-force cap
    std::vector<std::pair<std::int64_t, std::int64_t>> fast_pairs;
    for (auto& e : fast) {
      if (e.m_plus <= m_cap) fast_pairs.emplace_back(e.m_plus, e.m_minus);
    }
    std::sort(brute.begin(), brute.end());
    std::sort(fast_pairs.begin(), fast_pairs.end());
    CHECK(fast_pairs == brute);
  }
}

TEST_CASE("de Broglie consistency, toy atom") {
  SUBCASE("B = 0: every relation is exact") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    DebroglieResiduals res = debroglie_consistency(toy.orbit, toy.pair, toy.params);
    CHECK(res.P_minus_k < 1e-14);
    CHECK(res.E_minus_omega < 1e-14);
    CHECK(res.vg_minus_vp < 1e-13);
    CHECK(res.alpha_minus_n2_over_N == 0.0);
  }
  SUBCASE("B != 0: residuals match the exact O(B^2) coefficients") {
    Atom toy = make_atom(3.0, 4, 2, 1e-5);
    DebroglieResiduals res = debroglie_consistency(toy.orbit, toy.pair, toy.params);
    double wL = larmor_frequency(toy.params, 1.0);
    double r = toy.orbit.r;
    CHECK(res.P_minus_k < 1e-14);
    // omega_n - E_n = (m_eff omega_L)^2 r^3 / alpha
    double ew = wL * wL * r * r * r / toy.params.alpha / toy.orbit.E;
    CHECK(res.E_minus_omega == doctest::Approx(ew).epsilon(1e-6));
    // v_g - v_n = -q^2/(N (n - q)), q = m_eff omega_L r^2
    double q = wL * r * r;
    double vv = q * q / (toy.pair.N_big * (1.0 - q)) / std::abs(toy.orbit.v);
    CHECK(res.vg_minus_vp == doctest::Approx(vv).epsilon(1e-6));
  }
  SUBCASE("residual growth is O(B^2): halving test") {
    Atom a = make_atom(3.0, 4, 2, 1e-5);
    Atom b = make_atom(3.0, 4, 2, 5e-6);
    auto ra = debroglie_consistency(a.orbit, a.pair, a.params);
    auto rb = debroglie_consistency(b.orbit, b.pair, b.params);
    CHECK(ra.vg_minus_vp / rb.vg_minus_vp == doctest::Approx(4.0).epsilon(0.02));
    CHECK(ra.E_minus_omega / rb.E_minus_omega == doctest::Approx(4.0).epsilon(0.02));
  }
  SUBCASE("mismatched pair/orbit rejected") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    OrbitSolution other =
        solve_orbit_exact(1.0, toy.params, 1.0, OrbitMethod::ExactNonrelativistic);
    CHECK_THROWS_AS(debroglie_consistency(other, toy.pair, toy.params), ConsistencyError);
  }
}

TEST_CASE("137 atom at B = 0: de Broglie relations exact") {
  Atom atom = make_atom(137.0, 138, 136, 0.0);
  DebroglieResiduals res = debroglie_consistency(atom.orbit, atom.pair, atom.params);
  CHECK(res.P_minus_k < 1e-13);
  CHECK(res.E_minus_omega < 1e-13);
  CHECK(res.vg_minus_vp < 1e-12);
  CHECK(res.alpha_minus_n2_over_N == 0.0);
}

TEST_CASE("internal frequency Omega_p") {
  SUBCASE("B = 0 reduction: Omega_p = m_eff - gamma alpha / r") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    InternalFrequency f = internal_frequency(toy.orbit, toy.params, 1.0);
    double expected = 1.0 - toy.orbit.gamma * toy.params.alpha / toy.orbit.r;
    CHECK(f.exact == doctest::Approx(expected).epsilon(1e-15));
    CHECK(f.exact == doctest::Approx(0.875).epsilon(1e-14));  // 1 - gamma^2 alpha^2
  }
  SUBCASE("137 atom: Omega_p = 1 - gamma^2 alpha^2 = 0.99994672") {
    Atom atom = make_atom(137.0, 138, 136, 0.0);
    InternalFrequency f = internal_frequency(atom.orbit, atom.params, 1.0);
    CHECK(f.exact == doctest::Approx(0.99994671781756181).epsilon(1e-14));
    // exact vs perturbative agree at O(alpha^4)
    CHECK(std::abs(f.exact - f.perturbative) < 3.0 * std::pow(1.0 / 137.0, 4));
  }
  SUBCASE("n = +-1 at B > 0 differ by ~2 omega_L (1 - alpha^2/2)") {
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.0, 1e-5, 1.0);
    double wL = larmor_frequency(p, 1.0);
    OrbitSolution up = solve_orbit_exact(1.0, p, 1.0, OrbitMethod::ExactRelativistic);
    OrbitSolution dn = solve_orbit_exact(-1.0, p, 1.0, OrbitMethod::ExactRelativistic);
    double gap = internal_frequency(up, p, 1.0).perturbative -
                 internal_frequency(dn, p, 1.0).perturbative;
    double expected = 2.0 * wL * (1.0 - 0.5 / (137.0 * 137.0));
    CHECK(gap == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dressed-mass fixed point") {
  SUBCASE("sigma = 0 converges to m_p in one iteration") {
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.0, 0.0, 1.0);
    FixedPointResult fp = dressed_mass_fixed_point(p, 1.0);
    CHECK(fp.m_eff == 1.0);
    CHECK(fp.iterations == 1);
    CHECK(fp.z0 == 1.0);
  }

  SUBCASE("sigma u0^2 = 0.1 against the independent bisection oracle") {
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.1, 0.0, 1.0);
    FixedPointResult fp = dressed_mass_fixed_point(p, 1.0);
    // bisection on f(m) = m - m_p (1 + sigma Omega_p(m)^2 u0^2)
    auto f = [&](double m) {
      OrbitSolution orbit = solve_orbit_exact(1.0, p, m, OrbitMethod::ExactRelativistic);
      double op = internal_frequency(orbit, p, m).exact;
      return m - p.m_p * (1.0 + p.sigma * op * op * p.u0 * p.u0);
    };
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 120; ++i) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double m_oracle = 0.5 * (lo + hi);
    CHECK(fp.m_eff == doctest::Approx(m_oracle).epsilon(1e-12));
    // closed-form cross-check: with c0 = Omega_p/m_eff, m* solves the quadratic
    CHECK(fp.m_eff == doctest::Approx(1.1269991806497753).epsilon(1e-10));
    // converged residual
    OrbitSolution orbit =
        solve_orbit_exact(1.0, p, fp.m_eff, OrbitMethod::ExactRelativistic);
    double op = internal_frequency(orbit, p, fp.m_eff).exact;
    CHECK(std::abs(fp.m_eff - dressed_mass(p, op, fp.z0)) <= 1e-13 * fp.m_eff);
  }

  SUBCASE("near-critical coupling still converges within the budget") {
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.25, 0.0, 1.0);
    FixedPointResult fp = dressed_mass_fixed_point(p, 1.0);
    CHECK(fp.iterations <= 200);
    OrbitSolution orbit =
        solve_orbit_exact(1.0, p, fp.m_eff, OrbitMethod::ExactRelativistic);
    double op = internal_frequency(orbit, p, fp.m_eff).exact;
    CHECK(std::abs(fp.m_eff - dressed_mass(p, op, fp.z0)) <= 1e-13 * fp.m_eff);
  }

  SUBCASE("beyond the existence bound the divergence guard fires") {
    // 4 sigma u0^2 c0^2 m_p > 1 has no real fixed point (c0 ~ 0.99995).
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.26, 0.0, 1.0);
    CHECK_THROWS_AS(dressed_mass_fixed_point(p, 1.0), ConvergenceError);
  }

  SUBCASE("monotone iterates below the critical coupling") {
    ModelParams p = make_params(1.0 / 137.0, 1.0, 0.2, 0.0, 1.0);
    double m = p.m_p;
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
      OrbitSolution orbit = solve_orbit_exact(1.0, p, m, OrbitMethod::ExactRelativistic);
      double op = internal_frequency(orbit, p, m).exact;
      double next = p.m_p * (1.0 + p.sigma * op * op);
      CHECK(next >= m - 1e-15);
      prev = m;
      m = next;
    }
    CHECK(m > prev - 1e-15);
  }
}

TEST_CASE("Lagrangian value and the Legendre identity") {
  for (double B : {0.0, 1e-5}) {
    Atom toy = make_atom(3.0, 4, 2, B);
    double lag = lagrangian_value(toy.orbit, toy.params);
    double legendre = toy.orbit.P * toy.orbit.v - toy.orbit.E;
    CHECK(std::abs(lag - legendre) <= 1e-10 * std::abs(lag));
    if (B == 0.0) {
      double expected = -1.0 / toy.orbit.gamma + toy.params.alpha / toy.orbit.r;
      CHECK(lag == doctest::Approx(expected).epsilon(1e-14));
      CHECK(lag == doctest::Approx(-0.82495791138430545).epsilon(1e-14));
    }
  }
}

TEST_CASE("phase harmony") {
  SUBCASE("toy atom at B = 0: residual at roundoff, amplitude constant") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    PhaseHarmonyResult ph = phase_harmony_residual(toy.orbit, toy.pair, toy.params, 4096);
    CHECK(ph.max_residual_rad < 1e-9);
    CHECK(ph.amplitude_variation < 1e-12);
    CHECK(ph.omega_p_consistency < 1e-12);
    CHECK(ph.lagrangian == doctest::Approx(-0.82495791138430545).epsilon(1e-13));
  }
  SUBCASE("137 atom at B = 0") {
    Atom atom = make_atom(137.0, 138, 136, 0.0);
    PhaseHarmonyResult ph =
        phase_harmony_residual(atom.orbit, atom.pair, atom.params, 200000);
    CHECK(ph.max_residual_rad < 1e-9);
    CHECK(ph.omega_p_consistency < 1e-12);
  }
  SUBCASE("detuned path fails by construction, residual linear in t") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    PhaseHarmonyResult detuned =
        phase_harmony_residual(toy.orbit, toy.pair, toy.params, 4096, 1.01);
    CHECK(detuned.max_residual_rad > 1e-3);
    // doubling the detuning doubles the drift rate
    PhaseHarmonyResult detuned2 =
        phase_harmony_residual(toy.orbit, toy.pair, toy.params, 4096, 1.02);
    CHECK(detuned2.max_residual_rad ==
          doctest::Approx(2.0 * detuned.max_residual_rad).epsilon(0.05));
  }
  SUBCASE("sampling guard") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    CHECK_THROWS_AS(phase_harmony_residual(toy.orbit, toy.pair, toy.params, 16),
                    DomainError);
  }
}

TEST_CASE("gamma closed form") {
  SUBCASE("at rest: E = Omega_p = m_eff gives gamma = 1") {
    CHECK(gamma_closed_form(1.0, 1.0, 1.0) == 1.0);
  }
  SUBCASE("toy atom B = 0 exact orbit") {
    Atom toy = make_atom(3.0, 4, 2, 0.0);
    double op = internal_frequency(toy.orbit, toy.params, 1.0).exact;
    double g = gamma_closed_form(toy.orbit.E, op, 1.0);
    CHECK(std::abs(g - toy.orbit.gamma) <= 1e-9 * toy.orbit.gamma);
    CHECK(g == doctest::Approx(1.0606601717798213).epsilon(1e-12));
  }
  SUBCASE("137 atom: gamma = 1 + alpha^2/2 + ...") {
    Atom atom = make_atom(137.0, 138, 136, 0.0);
    double op = internal_frequency(atom.orbit, atom.params, 1.0).exact;
    double g = gamma_closed_form(atom.orbit.E, op, 1.0);
    CHECK(std::abs(g - atom.orbit.gamma) <= 1e-9);
    double a2 = std::pow(1.0 / 137.0, 2);
    CHECK(std::abs(g - 1.0 - 0.5 * a2) < a2 * a2);
  }
  SUBCASE("negative radicand rejected") {
    CHECK_THROWS_AS(gamma_closed_form(0.1, 5.0, 1.0), DomainError);
  }
}

TEST_CASE("Bohr-Sommerfeld emergence: selection entries quantize the action") {
  ModelParams p3 = make_params(1.0 / 3.0, 1.0, 0.0, 0.0, 1.0);
  for (auto& e : selection_rule_enumerate(3, 2)) {
    OrbitSolution orbit =
        solve_orbit_exact(e.n, p3, 1.0, OrbitMethod::ExactRelativistic);
    CHECK(std::abs(action_integral(orbit, p3) - kTwoPi * e.n) < 1e-10 * kTwoPi * e.n);
    CHECK(e.n == std::round(e.n));  // integer n for integer alpha0_inv
  }
}

TEST_CASE("harmony report end to end") {
  ModelParams p = make_params(1.0 / 3.0, 1.0, 0.05, 0.0, 1.0);
  HarmonyReport rep = build_harmony_report(p, 4, 2);
  CHECK(rep.z0 == 1.0);
  CHECK(rep.m_eff > 1.0);
  CHECK(rep.phase_residual < 1e-9);
  CHECK(std::abs(rep.gamma_closed - rep.gamma_orbit) < 1e-9);
  CHECK(rep.debroglie.P_minus_k < 1e-13);

  auto j = to_json(rep);
  CHECK(j["m_eff"].get<double>() == rep.m_eff);
  CHECK(j["debroglie"]["vg_minus_vp"].get<double>() == rep.debroglie.vg_minus_vp);
}
