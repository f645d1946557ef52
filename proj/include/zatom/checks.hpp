#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "zatom/model.hpp"

// Named invariant checks behind the `verify` CLI command. Each check records
// the measured value and its bound; a tolerance scale multiplies every bound
// (0 makes any nonzero residual fail).

namespace zatom {

struct Check {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyOptions {
  double tol_scale = 1.0;
  std::int64_t alpha0_inv = 137;  // selection suite input
  int n_max = 2;
};

struct VerifyResult {
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();  // e.g. the larmor ResidualReport
};

VerifyResult run_checks(const std::string& suite, const ModelParams& params,
                        const VerifyOptions& opts);

std::vector<std::string> available_suites();

nlohmann::json checks_to_json(const VerifyResult& result);

}  // namespace zatom
