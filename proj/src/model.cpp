#include "zatom/model.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace zatom {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require_finite(double x, const char* field) {
  if (!std::isfinite(x)) {
    throw ValidationError(std::string(field) + ": value is not finite");
  }
}

}  // namespace

double charge_from_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    throw DomainError("alpha out of range (0,1): " + std::to_string(alpha));
  }
  return -std::sqrt(4.0 * kPi * alpha);
}

double larmor_frequency(const ModelParams& params, double m_eff) {
  if (!(m_eff > 0.0) || !std::isfinite(m_eff)) {
    throw DomainError("m_eff must be positive");
  }
  return -params.e_charge * params.B / (2.0 * m_eff);
}

double dressed_mass(const ModelParams& params, double omega_p, double z0) {
  return params.m_p * (1.0 + params.sigma * omega_p * omega_p * z0 * z0);
}

DerivedConstants derive_constants(const ModelParams& params, double omega_p, double z0) {
  DerivedConstants d;
  d.m_eff = dressed_mass(params, omega_p, z0);
  d.omega_L = larmor_frequency(params, d.m_eff);
  return d;
}

ModelParams make_params(double alpha, double m_p, double sigma, double B, double u0) {
  require_finite(alpha, "alpha");
  require_finite(m_p, "m_p");
  require_finite(sigma, "sigma");
  require_finite(B, "B");
  require_finite(u0, "u0");
  if (alpha <= 0.0 || alpha >= 1.0) throw ValidationError("alpha out of range (0,1)");
  if (m_p <= 0.0) throw ValidationError("m_p must be positive");
  if (sigma < 0.0) throw ValidationError("sigma must be non-negative");
  if (u0 <= 0.0) throw ValidationError("u0 must be positive");

  ModelParams p;
  p.alpha = alpha;
  p.m_p = m_p;
  p.sigma = sigma;
  p.B = B;
  p.u0 = u0;
  p.e_charge = charge_from_alpha(alpha);
  p.b_const = 1.0;
  return p;
}

ModelParams validate_params(const nlohmann::json& raw, bool permissive) {
  if (!raw.is_object()) throw ValidationError("config: expected a flat JSON object");

  static const std::set<std::string> known = {"alpha", "alpha_inv", "m_p", "sigma",
                                              "B",     "u0",        "b",   "T"};
  if (!permissive) {
    for (auto it = raw.begin(); it != raw.end(); ++it) {
      if (!known.count(it.key())) {
        throw ValidationError("config: unknown key \"" + it.key() + "\"");
      }
    }
  }

  auto get_num = [&raw](const char* key, double fallback, bool* present = nullptr) {
    if (!raw.contains(key)) {
      if (present) *present = false;
      return fallback;
    }
    if (!raw.at(key).is_number()) {
      throw ValidationError(std::string(key) + ": expected a number");
    }
    if (present) *present = true;
    return raw.at(key).get<double>();
  };

  bool has_alpha = false, has_inv = false;
  double alpha = get_num("alpha", 0.0, &has_alpha);
  double alpha_inv = get_num("alpha_inv", 0.0, &has_inv);
  if (!has_alpha && !has_inv) {
    throw ValidationError("config: one of alpha or alpha_inv is required");
  }
  if (has_inv) {
    require_finite(alpha_inv, "alpha_inv");
    if (alpha_inv <= 1.0) throw ValidationError("alpha_inv out of range: alpha out of range (0,1)");
    double from_inv = 1.0 / alpha_inv;
    if (has_alpha) {
      require_finite(alpha, "alpha");
      if (std::abs(alpha - from_inv) > 1e-12 * std::abs(from_inv)) {
        throw ValidationError("config: alpha and alpha_inv are inconsistent");
      }
    }
    alpha = from_inv;  // alpha_inv wins
  }

  double m_p = get_num("m_p", 1.0);
  double sigma = get_num("sigma", 0.0);
  double B = get_num("B", 0.0);
  double u0 = get_num("u0", 1.0);

  if (raw.contains("b")) {
    double b = get_num("b", 1.0);
    if (b != 1.0) throw ValidationError("b: only b = 1 is supported");
  }

  ModelParams p = make_params(alpha, m_p, sigma, B, u0);
  p.tension = get_num("T", 0.0);  // accepted, not used by any dynamics here
  return p;
}

ModelParams params_from_file(const std::string& path, bool permissive) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: JSON parse error: " + std::string(e.what()));
  }
  return validate_params(j, permissive);
}

}  // namespace zatom
