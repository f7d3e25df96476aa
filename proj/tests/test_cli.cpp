#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = "cli_" + std::to_string(counter++);
  const std::string out_file = tag + ".stdout", err_file = tag + ".stderr";
  const std::string cmd =
      std::string(RMITER_CLI_PATH) + " " + args + " > " + out_file + " 2> " + err_file;
  const int status = std::system(cmd.c_str());
  CmdResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out_file);
  res.err = slurp(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return res;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

int count_char(const std::string& s, char c) {
  return static_cast<int>(std::count(s.begin(), s.end(), c));
}

}  // namespace

TEST_CASE("run subcommand: converged cavity") {
  auto res = run_cli("run --set mesh_n=10 --out cli_run.csv");
  CHECK(res.code == 0);
  CHECK(res.out.find("converged=true") != std::string::npos);
  CHECK(res.out.find("tol=9.9999999999999995e-07") != std::string::npos);

  // iterations within the expected band for the 10x10 cavity
  auto pos = res.out.find("iterations=");
  REQUIRE(pos != std::string::npos);
  const int iters = std::atoi(res.out.c_str() + pos + 11);
  CHECK(iters >= 10);
  CHECK(iters <= 300);

  const std::string csv = slurp("cli_run.csv");
  // self-describing comment header carries every config key
  for (const char* key :
       {"# mesh_n=", "# alpha2=", "# beta=", "# tol=", "# max_outer=", "# inner_tol=",
        "# inner_max=", "# lid=", "# step1=", "# richardson_omega=", "# seed=", "# eig_tol=",
        "# eig_max=", "# mesh_list=", "# beta_list="})
    CHECK(csv.find(key) != std::string::npos);

  auto lines = data_lines(csv);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines.front() == "iter,u_inc,p_inc,div_norm");
  CHECK(static_cast<int>(lines.size()) == iters + 1);
  CHECK(lines[1].rfind("1,", 0) == 0);
  CHECK(count_char(lines[1], ',') == 3);
  std::remove("cli_run.csv");
}

TEST_CASE("run subcommand: divergence exits with code 2") {
  auto res = run_cli("run --set mesh_n=10 --set alpha2=2.5 --out cli_div.csv");
  CHECK(res.code == 2);
  CHECK(res.out.find("converged=false") != std::string::npos);

  // increments grow towards the end of a diverging trace
  auto lines = data_lines(slurp("cli_div.csv"));
  REQUIRE(lines.size() > 3);
  auto second_field = [](const std::string& line) {
    auto a = line.find(',');
    auto b = line.find(',', a + 1);
    return std::stod(line.substr(a + 1, b - a - 1));
  };
  CHECK(second_field(lines.back()) > 1e6);
  CHECK(second_field(lines.back()) > second_field(lines[lines.size() / 2]));
  std::remove("cli_div.csv");
}

TEST_CASE("sweep subcommand: row order, non-convergence, determinism") {
  const std::string args =
      "sweep --set mesh_list=5,8 --set beta_list=0,0.5 --set alpha2=1.5 --out cli_sweep.csv";
  auto res = run_cli(args);
  CHECK(res.code == 2);  // the beta=0.5 rows do not converge

  const std::string csv1 = slurp("cli_sweep.csv");
  auto lines = data_lines(csv1);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "mesh_n,beta,alpha2,iterations,converged,final_div_norm");
  CHECK(lines[1].rfind("5,0,", 0) == 0);
  CHECK(lines[2].rfind("5,0.5,", 0) == 0);
  CHECK(lines[3].rfind("8,0,", 0) == 0);
  CHECK(lines[4].rfind("8,0.5,", 0) == 0);
  CHECK(lines[1].find("true") != std::string::npos);
  CHECK(lines[2].find("false") != std::string::npos);

  auto res2 = run_cli(args);
  CHECK(res2.code == 2);
  CHECK(slurp("cli_sweep.csv") == csv1);  // byte-identical rerun
  std::remove("cli_sweep.csv");
}

TEST_CASE("sweep subcommand: all-converged table exits 0") {
  auto res = run_cli("sweep --set mesh_list=5 --set beta_list=0,0.01 --out cli_sw0.csv");
  CHECK(res.code == 0);
  auto lines = data_lines(slurp("cli_sw0.csv"));
  REQUIRE(lines.size() == 3);
  std::remove("cli_sw0.csv");
}

TEST_CASE("divnorm subcommand matches two runs bitwise") {
  auto res = run_cli("divnorm --set mesh_n=4 --set max_outer=30 --out cli_dn.csv");
  const std::string dn = slurp("cli_dn.csv");
  // defaults for the divergence-trace experiment are recorded in the header
  CHECK(dn.find("# alpha2=1.5") != std::string::npos);
  CHECK(dn.find("# beta=0.05") != std::string::npos);

  auto run_reg = run_cli(
      "run --set mesh_n=4 --set max_outer=30 --set beta=0.05 --set lid=regularized "
      "--out cli_reg.csv");
  auto run_uni = run_cli(
      "run --set mesh_n=4 --set max_outer=30 --set beta=0.05 --set lid=unit --out cli_uni.csv");

  auto dn_lines = data_lines(dn);
  auto reg_lines = data_lines(slurp("cli_reg.csv"));
  auto uni_lines = data_lines(slurp("cli_uni.csv"));
  REQUIRE(dn_lines.size() >= 2);

  auto field = [](const std::string& line, int idx) {
    std::stringstream ss(line);
    std::string item;
    for (int i = 0; i <= idx; ++i) std::getline(ss, item, ',');
    return item;
  };
  for (std::size_t k = 1; k < dn_lines.size(); ++k) {
    if (k < reg_lines.size())
      CHECK(field(dn_lines[k], 1) == field(reg_lines[k], 3));  // div_norm column, bitwise
    if (k < uni_lines.size())
      CHECK(field(dn_lines[k], 2) == field(uni_lines[k], 3));
  }
  std::remove("cli_dn.csv");
  std::remove("cli_reg.csv");
  std::remove("cli_uni.csv");
}

TEST_CASE("spectrum subcommand on the 4x4 cavity") {
  auto res = run_cli(
      "spectrum --set mesh_n=4 --set eig_tol=1e-5 --set eig_max=20000 --set alpha2=1.5");
  CHECK(res.code == 0);
  CHECK(res.out.rfind("m=", 0) == 0);
  CHECK(res.out.find(" M=") != std::string::npos);
  CHECK(res.out.find(" one_over_M=") != std::string::npos);
  // M ~ 1 makes alpha2 = 1.5, beta = 0 violate the sufficient condition
  CHECK(res.out.find("sufficient=false") != std::string::npos);
  CHECK(res.out.find("predicted_rho=n/a") == std::string::npos);  // mesh <= 6: dense radius
  CHECK(res.out.find("m_converged=true") != std::string::npos);
  CHECK(res.out.find("M_converged=true") != std::string::npos);

  double m = std::stod(res.out.substr(2));
  auto posM = res.out.find(" M=");
  double M = std::stod(res.out.substr(posM + 3));
  CHECK(std::abs(M - 1.0000000000000011) <= 0.01);
  CHECK(std::abs(m - 0.39143536352233377) <= 0.05 * 0.39143536352233377);

  // larger meshes skip the dense predictor
  auto res8 = run_cli("spectrum --set mesh_n=8 --set eig_tol=1e-3");
  CHECK(res8.out.find("predicted_rho=n/a") != std::string::npos);
}

TEST_CASE("spectrum subcommand at a production mesh") {
  auto res = run_cli("spectrum --set mesh_n=40");  // takes a few seconds
  CHECK(res.out.find("M_converged=true") != std::string::npos);
  auto posM = res.out.find(" M=");
  REQUIRE(posM != std::string::npos);
  const double M = std::stod(res.out.substr(posM + 3));
  CHECK(M > 0.5);
  CHECK(M < 1.5);
  CHECK(std::isfinite(M));
}

TEST_CASE("config file loading and --set precedence") {
  {
    std::ofstream cfg("cli_cfg.txt");
    cfg << "# comment line\n";
    cfg << "mesh_n=5\n";
    cfg << "alpha2 = 1.2   # trailing comment\n";
    cfg << "beta=0.01\n";
  }
  auto res = run_cli("run --config cli_cfg.txt --set beta=0.02 --out cli_cfgd.csv");
  CHECK(res.code == 0);
  const std::string csv = slurp("cli_cfgd.csv");
  CHECK(csv.find("# mesh_n=5") != std::string::npos);
  CHECK(csv.find("# alpha2=1.2") != std::string::npos);
  CHECK(csv.find("# beta=0.02") != std::string::npos);  // --set wins
  std::remove("cli_cfg.txt");
  std::remove("cli_cfgd.csv");
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("run --set nonsense=1").code == 1);
  CHECK(run_cli("run --set mesh_n=2").code == 1);
  CHECK(run_cli("run --set alpha2=banana").code == 1);
  CHECK(run_cli("run --set alpha2=0").code == 1);
  CHECK(run_cli("run --config does_not_exist.cfg").code == 1);
  CHECK(run_cli("run --set").code == 1);
  CHECK(run_cli("").code == 1);
}
