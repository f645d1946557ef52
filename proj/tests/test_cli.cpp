#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef ZATOM_CLI_PATH
#error "ZATOM_CLI_PATH must be defined"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

std::string temp_path(const std::string& suffix) {
  static int counter = 0;
  return "/tmp/zatom_cli_test_" + std::to_string(::getpid()) + "_" +
         std::to_string(counter++) + suffix;
}

RunResult run_cli(const std::string& args) {
  std::string out_path = temp_path(".out");
  std::string cmd = std::string(ZATOM_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(out_path.c_str());
  return {WEXITSTATUS(rc), ss.str()};
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("levels: CSV table with antisymmetric dE column") {
  RunResult r = run_cli("--B 1e-5 levels --n 1,-1,2,-2");
  CHECK(r.exit_code == 0);
  auto lines = split_lines(r.stdout_text);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "n,E0,E_exact,E_pert,dE,omega_L");

  auto field = [&](int row, int col) {
    std::stringstream ss(lines[row]);
    std::string item;
    for (int i = 0; i <= col; ++i) std::getline(ss, item, ',');
    return std::stod(item);
  };
  CHECK(field(1, 4) == -field(2, 4));  // dE(+1) = -dE(-1), exact
  CHECK(field(3, 4) == -field(4, 4));
  CHECK(field(1, 4) == doctest::Approx(1.5143095204706897e-06).epsilon(1e-12));
}

TEST_CASE("levels: B = 0 zeroes the dE column") {
  RunResult r = run_cli("--B 0 levels --n 1,2,3");
  CHECK(r.exit_code == 0);
  auto lines = split_lines(r.stdout_text);
  for (size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].find(",0,") != std::string::npos);
  }
}

TEST_CASE("levels: malformed n list exits 1") {
  CHECK(run_cli("levels --n 1,abc").exit_code == 1);
  CHECK(run_cli("levels --n 1,,2").exit_code == 1);
  CHECK(run_cli("levels --n 0").exit_code == 1);
}

TEST_CASE("selection tables") {
  RunResult r = run_cli("selection --alpha0-inv 137 --n-max 2");
  CHECK(r.exit_code == 0);
  auto lines = split_lines(r.stdout_text);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,N,m_plus,m_minus,alpha0");
  CHECK(lines[1].substr(0, 10) == "1,137,138,");
  CHECK(lines[2].substr(0, 10) == "2,548,550,");

  RunResult toy = run_cli("selection --alpha0-inv 3 --n-max 1");
  CHECK(split_lines(toy.stdout_text)[1].substr(0, 8) == "1,3,4,2,");

  // the half-integer flag only widens the candidate set; m must stay integer
  RunResult half = run_cli("selection --include-half-integers --alpha0-inv 4 --n-max 1");
  CHECK(split_lines(half.stdout_text).size() == 2);  // header + (5,3) only
}

TEST_CASE("orbit dump") {
  RunResult r = run_cli("--B 0 orbit --n 1 --solver nonrel --m-eff 1");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("\"r\": 137") != std::string::npos);
  CHECK(r.stdout_text.find("\"method\": \"exact-nonrelativistic\"") != std::string::npos);

  RunResult pert = run_cli("--B 1e-5 orbit --n 1 --solver pert");
  CHECK(pert.exit_code == 0);
  CHECK(pert.stdout_text.find("\"method\": \"perturbative\"") != std::string::npos);

  // solver/domain failures exit 2: strong field leaves the bracket rootless
  CHECK(run_cli("--B 1 orbit --n 1 --solver nonrel").exit_code == 2);
}

TEST_CASE("levels JSON format") {
  RunResult r = run_cli("--B 1e-5 levels --n 1,-1 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("\"levels\"") != std::string::npos);
  CHECK(r.stdout_text.find("\"dE_exact\"") != std::string::npos);
}

TEST_CASE("grid: PGM output, determinism, validation") {
  std::string path = temp_path(".pgm");
  std::string args = "--alpha-inv 3 --B 0 --output " + path +
                     " grid --m-plus 4 --m-minus 2 --n 1 --resolution 33 --t 0";
  CHECK(run_cli(args).exit_code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string first = ss.str();
  CHECK(first.substr(0, 3) == "P2\n");
  CHECK(first.find("33 33\n255\n") != std::string::npos);

  CHECK(run_cli(args).exit_code == 0);
  std::ifstream in2(path);
  std::stringstream ss2;
  ss2 << in2.rdbuf();
  CHECK(ss2.str() == first);  // byte-identical rerun
  std::remove(path.c_str());

  CHECK(run_cli("--alpha-inv 3 --B 0 grid --m-plus 4 --m-minus 2 --n 1 --resolution 0")
            .exit_code == 1);
}

TEST_CASE("grid: parity mismatch from the mode builder exits 2") {
  int rc = run_cli("--alpha-inv 3 --B 0 grid --m-plus 4 --m-minus 2 --n 1 "
                   "--l-plus 5 --resolution 17")
               .exit_code;
  CHECK(rc == 2);
}

TEST_CASE("config file handling") {
  std::string cfg = temp_path(".json");
  {
    std::ofstream out(cfg);
    out << R"({"alpha_inv": 137, "m_p": 1.0, "sigma": 0.0, "B": 1e-5, "u0": 1.0, "T": 2.0})";
  }
  CHECK(run_cli("--config " + cfg + " orbit --n 1").exit_code == 0);

  {
    std::ofstream out(cfg);
    out << R"({"alpha_inv": 137, "unknown_key": 1})";
  }
  CHECK(run_cli("--config " + cfg + " orbit --n 1").exit_code == 1);
  CHECK(run_cli("--config " + cfg + " --permissive orbit --n 1").exit_code == 0);
  std::remove(cfg.c_str());
}

TEST_CASE("verify: default passes, zero tolerance fails with exit 3") {
  RunResult ok = run_cli("--B 1e-5 verify --suite orbit");
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("\"all_pass\": true") != std::string::npos);

  RunResult fail = run_cli("--B 1e-5 verify --suite orbit --tol-scale 0");
  CHECK(fail.exit_code == 3);

  RunResult sel = run_cli("verify --suite selection --alpha0-inv 3 --n-max 1");
  CHECK(sel.exit_code == 0);
  CHECK(sel.stdout_text.find("(4,2)") != std::string::npos);
}

TEST_CASE("verify: full default suite") {
  RunResult r = run_cli("--B 1e-5 verify");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("\"all_pass\": true") != std::string::npos);
  CHECK(r.stdout_text.find("cancellation_ratio") != std::string::npos);
  CHECK(r.stdout_text.find("phase_harmony_toy") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("bogus-subcommand").exit_code == 1);
}
