// zatom: levels / grid / selection / orbit / verify front end.
//
// Exit codes: 0 success, 1 usage or input validation, 2 solver or domain
// error, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zatom/checks.hpp"
#include "zatom/field.hpp"
#include "zatom/harmony.hpp"
#include "zatom/larmor.hpp"
#include "zatom/model.hpp"
#include "zatom/orbit.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> parse_n_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw zatom::ValidationError("levels: malformed n list entry \"" + item + "\"");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) {
      throw zatom::ValidationError("levels: malformed n list entry \"" + item + "\"");
    }
    if (v == 0.0) throw zatom::ValidationError("levels: n = 0 is excluded");
    out.push_back(v);
  }
  if (out.empty()) throw zatom::ValidationError("levels: empty n list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw zatom::ValidationError("cannot open output path \"" + path + "\"");
  out << text;
}

struct GlobalOpts {
  std::string config_path;
  bool permissive = false;
  std::optional<double> alpha, alpha_inv, m_p, sigma, B, u0;

  zatom::ModelParams resolve() const {
    json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw zatom::ValidationError("config: cannot open \"" + config_path + "\"");
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw zatom::ValidationError("config: JSON parse error: " + std::string(e.what()));
      }
    } else {
      j = json::object();
      j["alpha_inv"] = 137.0;
    }
    if (alpha) j["alpha"] = *alpha;
    if (alpha_inv) j["alpha_inv"] = *alpha_inv;
    if (m_p) j["m_p"] = *m_p;
    if (sigma) j["sigma"] = *sigma;
    if (B) j["B"] = *B;
    if (u0) j["u0"] = *u0;
    if (alpha && !alpha_inv) j.erase("alpha_inv");
    return zatom::validate_params(j, permissive);
  }
};

int cmd_levels(const GlobalOpts& g, const std::string& n_text, double m_eff,
               const std::string& output, const std::string& format) {
  zatom::ModelParams params = g.resolve();
  std::vector<double> ns = parse_n_list(n_text);
  auto rows = zatom::zeeman_table(ns, params, m_eff);
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n},
                     {"E0", r.E0_exact},
                     {"E_exact", r.E_exact},
                     {"E_pert", r.E_pert},
                     {"dE", r.dE_pert},
                     {"dE_exact", r.dE_exact},
                     {"omega_L", r.omega_L}});
    }
    write_text(output, json{{"levels", arr}}.dump(2) + "\n");
  } else {
    std::string text = "n,E0,E_exact,E_pert,dE,omega_L\n";
    for (const auto& r : rows) {
      text += fmt17(r.n) + "," + fmt17(r.E0_exact) + "," + fmt17(r.E_exact) + "," +
              fmt17(r.E_pert) + "," + fmt17(r.dE_pert) + "," + fmt17(r.omega_L) + "\n";
    }
    write_text(output, text);
  }
  return 0;
}

int cmd_orbit(const GlobalOpts& g, double n, double m_eff, const std::string& solver,
              const std::string& output) {
  zatom::ModelParams params = g.resolve();
  zatom::OrbitSolution s;
  if (solver == "pert") {
    s = zatom::orbit_perturbative(n, params, m_eff);
  } else {
    auto mode = (solver == "nonrel") ? zatom::OrbitMethod::ExactNonrelativistic
                                     : zatom::OrbitMethod::ExactRelativistic;
    s = zatom::solve_orbit_exact(n, params, m_eff, mode);
  }
  json j = {{"n", s.n},
            {"r", s.r},
            {"v", s.v},
            {"gamma", s.gamma},
            {"E", s.E},
            {"P", s.P},
            {"omega_L", s.omega_L},
            {"m_eff", s.m_eff},
            {"method", zatom::to_string(s.method)},
            {"force_residual", s.force_residual},
            {"action_residual", s.action_residual}};
  write_text(output, j.dump(2) + "\n");
  return 0;
}

int cmd_selection(std::int64_t alpha0_inv, int n_max, bool half, const std::string& output,
                  const std::string& format) {
  auto entries = zatom::selection_rule_enumerate(alpha0_inv, n_max, half);
  if (format == "json") {
    json arr = json::array();
    for (const auto& e : entries) arr.push_back(zatom::to_json(e));
    write_text(output, json{{"entries", arr}}.dump(2) + "\n");
  } else {
    std::string text = "n,N,m_plus,m_minus,alpha0\n";
    for (const auto& e : entries) {
      text += fmt17(e.n) + "," + fmt17(e.N_big) + "," + std::to_string(e.m_plus) + "," +
              std::to_string(e.m_minus) + "," + fmt17(e.alpha0) + "\n";
    }
    write_text(output, text);
  }
  return 0;
}

int cmd_grid(const GlobalOpts& g, int m_plus, int m_minus, double n, double m_eff, int l_plus,
             int l_minus, const std::vector<double>& times, double half_extent_scale,
             int resolution, const std::string& output, const std::string& format) {
  if (resolution < 2) throw zatom::ValidationError("grid: resolution must be >= 2");
  if (resolution > 4096) throw zatom::ValidationError("grid: resolution cap is 4096");
  if (times.empty()) throw zatom::ValidationError("grid: at least one --t required");
  if (!(half_extent_scale > 0.0)) {
    throw zatom::ValidationError("grid: half-extent scale must be positive");
  }

  zatom::ModelParams params = g.resolve();
  auto orbit = zatom::solve_orbit_exact(n, params, m_eff, zatom::OrbitMethod::ExactRelativistic);
  zatom::BuildOptions opts;
  opts.l_plus = l_plus;
  opts.l_minus = l_minus;
  auto pair = zatom::build_mode_pair(m_plus, m_minus, orbit, params, opts);

  for (size_t k = 0; k < times.size(); ++k) {
    zatom::GridSpec spec;
    spec.t = times[k];
    spec.half_extent = half_extent_scale * pair.r_n;
    spec.resolution = resolution;
    zatom::FieldGrid grid = zatom::field_grid(pair, spec);

    std::string path = output;
    if (!path.empty() && path != "-" && times.size() > 1) {
      auto dot = path.rfind('.');
      std::string stem = (dot == std::string::npos) ? path : path.substr(0, dot);
      std::string ext = (dot == std::string::npos) ? "" : path.substr(dot);
      path = stem + "_" + std::to_string(k) + ext;
    }
    std::ostringstream ss;
    if (format == "csv") {
      zatom::write_grid_csv(grid, ss);
    } else {
      zatom::write_grid_pgm(grid, ss);
    }
    write_text(path, ss.str());
  }
  return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite, double tol_scale,
               std::int64_t alpha0_inv, int n_max, const std::string& output) {
  zatom::ModelParams params = g.resolve();
  zatom::VerifyOptions opts;
  opts.tol_scale = tol_scale;
  opts.alpha0_inv = alpha0_inv;
  opts.n_max = n_max;
  auto result = zatom::run_checks(suite, params, opts);
  json report = zatom::checks_to_json(result);
  write_text(output, report.dump(2) + "\n");
  if (!report["all_pass"].get<bool>()) {
    for (const auto& c : result.checks) {
      if (!c.pass) {
        std::cerr << "[verify] FAIL " << c.suite << "/" << c.name << ": measured "
                  << c.measured << " > bound " << c.bound << "\n";
      }
    }
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave-particle Bohr atom in a weak magnetic field (natural units c = hbar = 1)"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_flag("--permissive", g.permissive, "allow unknown config keys");
  double a = 0, ai = 0, mp = 0, sg = 0, bb = 0, u0 = 0;
  auto* oa = app.add_option("--alpha", a, "fine-structure constant");
  auto* oai = app.add_option("--alpha-inv", ai, "inverse fine-structure constant");
  auto* omp = app.add_option("--m-p", mp, "bare particle mass");
  auto* osg = app.add_option("--sigma", sg, "oscillator coupling");
  auto* ob = app.add_option("--B", bb, "magnetic field along +z");
  auto* ou = app.add_option("--u0", u0, "field amplitude");

  std::string output = "-";
  app.add_option("--output", output, "output path (default stdout)");

  auto* levels = app.add_subcommand("levels", "Zeeman level table");
  std::string n_text = "1,-1";
  double m_eff = 1.0;
  std::string levels_format = "csv";
  levels->add_option("--n", n_text, "comma-separated list of n");
  levels->add_option("--m-eff", m_eff, "dressed mass");
  levels->add_option("--format", levels_format)->check(CLI::IsMember({"csv", "json"}));

  auto* orbit = app.add_subcommand("orbit", "single-orbit dump");
  double n_single = 1.0;
  std::string solver = "rel";
  orbit->add_option("--n", n_single, "quantization number");
  orbit->add_option("--m-eff", m_eff, "dressed mass");
  orbit->add_option("--solver", solver)->check(CLI::IsMember({"rel", "nonrel", "pert"}));

  auto* selection = app.add_subcommand("selection", "selection-rule enumeration");
  std::int64_t alpha0_inv = 137;
  int n_max = 2;
  bool half = false;
  std::string selection_format = "csv";
  selection->add_option("--alpha0-inv", alpha0_inv, "integer inverse alpha0");
  selection->add_option("--n-max", n_max, "largest candidate n");
  selection->add_flag("--include-half-integers", half, "also test half-integer candidates");
  selection->add_option("--format", selection_format)->check(CLI::IsMember({"csv", "json"}));

  auto* grid = app.add_subcommand("grid", "|u| grid on the z = 0 plane");
  int m_plus = 4, m_minus = 2;
  int l_plus = -1, l_minus = -1;
  double n_grid = 1.0;
  std::vector<double> times;
  double half_extent_scale = 2.0;
  int resolution = 201;
  grid->add_option("--m-plus", m_plus);
  grid->add_option("--m-minus", m_minus);
  grid->add_option("--n", n_grid, "orbit quantization number");
  grid->add_option("--m-eff", m_eff, "dressed mass");
  grid->add_option("--l-plus", l_plus, "polar degree override (default m)");
  grid->add_option("--l-minus", l_minus);
  grid->add_option("--t", times, "sample times (repeatable)");
  grid->add_option("--half-extent", half_extent_scale, "half width in units of r_n");
  grid->add_option("--resolution", resolution, "points per axis");
  std::string grid_format = "pgm";
  grid->add_option("--format", grid_format)->check(CLI::IsMember({"csv", "pgm"}));

  auto* verify = app.add_subcommand("verify", "run invariant checks, JSON report");
  std::string suite = "all";
  double tol_scale = 1.0;
  auto suites = zatom::available_suites();
  suites.push_back("all");
  verify->add_option("--suite", suite)->check(CLI::IsMember(suites));
  verify->add_option("--tol-scale", tol_scale, "multiplies every bound (0 fails everything)");
  verify->add_option("--alpha0-inv", alpha0_inv, "selection suite input");
  verify->add_option("--n-max", n_max, "selection suite input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*oa) g.alpha = a;
  if (*oai) g.alpha_inv = ai;
  if (*omp) g.m_p = mp;
  if (*osg) g.sigma = sg;
  if (*ob) g.B = bb;
  if (*ou) g.u0 = u0;

  try {
    if (levels->parsed()) return cmd_levels(g, n_text, m_eff, output, levels_format);
    if (orbit->parsed()) return cmd_orbit(g, n_single, m_eff, solver, output);
    if (selection->parsed()) {
      return cmd_selection(alpha0_inv, n_max, half, output, selection_format);
    }
    if (grid->parsed()) {
      if (times.empty()) times.push_back(0.0);
      return cmd_grid(g, m_plus, m_minus, n_grid, m_eff, l_plus, l_minus, times,
                      half_extent_scale, resolution, output, grid_format);
    }
    if (verify->parsed()) {
      return cmd_verify(g, suite, tol_scale, alpha0_inv, n_max, output);
    }
  } catch (const zatom::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
