// Command-line harness for the Ramshaw-Mesina / Uzawa cavity experiments.
//
// Subcommands:
//   run       one iteration history as CSV (iter,u_inc,p_inc,div_norm)
//   sweep     mesh x beta iteration-count table at fixed alpha2
//   divnorm   divergence-norm traces for both lid profiles side by side
//   spectrum  Schur-complement spectral report (m, M, sufficient condition)
//
// Exit codes: 0 converged, 1 usage/config error, 2 non-convergence or
// divergence, 3 internal abort.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rmiter/iterate.hpp"
#include "rmiter/oracle.hpp"
#include "rmiter/saddle.hpp"
#include "rmiter/stokes.hpp"

namespace {

using namespace rmiter;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInternal = 3;

struct CliConfig {
  Index mesh_n = 10;
  double alpha2 = 1.5;
  double beta = 0.0;
  double tol = 1e-6;
  Index max_outer = 500;
  double inner_tol = 1e-12;
  Index inner_max = 10000;
  std::string lid = "regularized";
  std::string step1 = "exact";
  std::string richardson_omega = "auto";
  std::uint64_t seed = 1;
  double eig_tol = 1e-4;
  Index eig_max = 20000;
  std::vector<Index> mesh_list = {10, 20, 40};
  std::vector<double> beta_list = {0.0, 1e-4, 1e-2, 0.1};
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value);

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + key + ": '" + value + "'");
  }
}

template <>
Index parse_number<Index>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw UsageError("invalid integer for " + key + ": '" + value + "'");
  }
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid unsigned integer for " + key + ": '" + value + "'");
  }
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<T>(key, item));
  }
  if (out.empty()) throw UsageError(key + " must be a nonempty comma-separated list");
  return out;
}

void apply_setting(CliConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mesh_n") cfg.mesh_n = parse_number<Index>(key, value);
  else if (key == "alpha2") cfg.alpha2 = parse_number<double>(key, value);
  else if (key == "beta") cfg.beta = parse_number<double>(key, value);
  else if (key == "tol") cfg.tol = parse_number<double>(key, value);
  else if (key == "max_outer") cfg.max_outer = parse_number<Index>(key, value);
  else if (key == "inner_tol") cfg.inner_tol = parse_number<double>(key, value);
  else if (key == "inner_max") cfg.inner_max = parse_number<Index>(key, value);
  else if (key == "lid") cfg.lid = value;
  else if (key == "step1") cfg.step1 = value;
  else if (key == "richardson_omega") cfg.richardson_omega = value;
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "eig_tol") cfg.eig_tol = parse_number<double>(key, value);
  else if (key == "eig_max") cfg.eig_max = parse_number<Index>(key, value);
  else if (key == "mesh_list") cfg.mesh_list = parse_list<Index>(key, value);
  else if (key == "beta_list") cfg.beta_list = parse_list<double>(key, value);
  else throw UsageError("unknown config key: '" + key + "'");
}

void apply_key_value(CliConfig& cfg, const std::string& setting) {
  const auto eq = setting.find('=');
  if (eq == std::string::npos)
    throw UsageError("expected key=value, got '" + setting + "'");
  apply_setting(cfg, trim(setting.substr(0, eq)), trim(setting.substr(eq + 1)));
}

void load_config_file(CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    apply_key_value(cfg, line);
  }
}

void validate(const CliConfig& cfg) {
  if (cfg.mesh_n < 3) throw UsageError("mesh_n must be at least 3");
  if (cfg.alpha2 <= 0.0) throw UsageError("alpha2 must be positive");
  if (cfg.beta < 0.0) throw UsageError("beta must be nonnegative");
  if (cfg.tol <= 0.0) throw UsageError("tol must be positive");
  if (cfg.max_outer < 1) throw UsageError("max_outer must be at least 1");
  if (cfg.inner_tol <= 0.0) throw UsageError("inner_tol must be positive");
  if (cfg.eig_tol <= 0.0) throw UsageError("eig_tol must be positive");
  if (cfg.lid != "regularized" && cfg.lid != "unit")
    throw UsageError("lid must be 'regularized' or 'unit'");
  if (cfg.step1 != "exact" && cfg.step1 != "richardson")
    throw UsageError("step1 must be 'exact' or 'richardson'");
  if (cfg.richardson_omega != "auto")
    if (parse_number<double>("richardson_omega", cfg.richardson_omega) <= 0.0)
      throw UsageError("richardson_omega must be positive or 'auto'");
  for (Index n : cfg.mesh_list)
    if (n < 3) throw UsageError("mesh_list entries must be at least 3");
  for (double b : cfg.beta_list)
    if (b < 0.0) throw UsageError("beta_list entries must be nonnegative");
}

LidProfile lid_of(const std::string& name) {
  return name == "unit" ? LidProfile::unit : LidProfile::regularized;
}

IterationConfig iteration_config(const CliConfig& cfg) {
  IterationConfig it;
  it.alpha2 = cfg.alpha2;
  it.beta = cfg.beta;
  it.tol = cfg.tol;
  it.max_outer = cfg.max_outer;
  it.inner_tol = cfg.inner_tol;
  it.inner_max = cfg.inner_max;
  it.step1 = cfg.step1 == "richardson" ? Step1Kind::richardson : Step1Kind::exact;
  it.richardson_omega =
      cfg.richardson_omega == "auto" ? 0.0
                                     : parse_number<double>("richardson_omega", cfg.richardson_omega);
  return it;
}

// Every output begins with the full effective configuration, one
// '# key=value' line each, so result files are self-describing.
void write_config_comments(std::ostream& os, const CliConfig& cfg) {
  os << "# mesh_n=" << cfg.mesh_n << "\n";
  os << "# alpha2=" << fmt17(cfg.alpha2) << "\n";
  os << "# beta=" << fmt17(cfg.beta) << "\n";
  os << "# tol=" << fmt17(cfg.tol) << "\n";
  os << "# max_outer=" << cfg.max_outer << "\n";
  os << "# inner_tol=" << fmt17(cfg.inner_tol) << "\n";
  os << "# inner_max=" << cfg.inner_max << "\n";
  os << "# lid=" << cfg.lid << "\n";
  os << "# step1=" << cfg.step1 << "\n";
  os << "# richardson_omega=" << cfg.richardson_omega << "\n";
  os << "# seed=" << cfg.seed << "\n";
  os << "# eig_tol=" << fmt17(cfg.eig_tol) << "\n";
  os << "# eig_max=" << cfg.eig_max << "\n";
  os << "# mesh_list=";
  for (std::size_t i = 0; i < cfg.mesh_list.size(); ++i)
    os << (i ? "," : "") << cfg.mesh_list[i];
  os << "\n# beta_list=";
  for (std::size_t i = 0; i < cfg.beta_list.size(); ++i)
    os << (i ? "," : "") << fmt17(cfg.beta_list[i]);
  os << "\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

IterationHistory run_once(const CliConfig& cfg, Index mesh_n, LidProfile lid, double beta) {
  auto sys = build_mac_stokes(mesh_n, lid);
  auto prob = make_saddle_problem(sys, cfg.inner_tol, cfg.inner_max);
  IterationConfig it = iteration_config(cfg);
  it.beta = beta;
  return run(prob, it);
}

int cmd_run(const CliConfig& cfg, const std::string& out_path) {
  IterationHistory hist = run_once(cfg, cfg.mesh_n, lid_of(cfg.lid), cfg.beta);

  auto out = open_output(out_path.empty() ? "run.csv" : out_path);
  write_config_comments(out, cfg);
  out << "iter,u_inc,p_inc,div_norm\n";
  for (std::size_t k = 0; k < hist.records.size(); ++k) {
    const auto& r = hist.records[k];
    out << (k + 1) << ',' << fmt17(r.u_increment_norm) << ',' << fmt17(r.p_increment_norm)
        << ',' << fmt17(r.div_norm) << "\n";
  }

  const double final_div = hist.records.empty() ? 0.0 : hist.records.back().div_norm;
  std::cout << "converged=" << fmt_bool(hist.converged) << " iterations=" << hist.iterations
            << " final_div_norm=" << fmt17(final_div) << " tol=" << fmt17(cfg.tol) << "\n";
  return hist.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CliConfig& cfg, const std::string& out_path) {
  struct Entry {
    Index mesh_n;
    double beta;
  };
  std::vector<Entry> entries;
  for (Index n : cfg.mesh_list)
    for (double b : cfg.beta_list) entries.push_back({n, b});

  // Rows may run concurrently; results are written in list order.
  std::vector<std::future<IterationHistory>> futures;
  futures.reserve(entries.size());
  for (const auto& e : entries)
    futures.push_back(std::async(std::launch::async, [&cfg, e] {
      return run_once(cfg, e.mesh_n, lid_of(cfg.lid), e.beta);
    }));

  auto out = open_output(out_path.empty() ? "sweep.csv" : out_path);
  write_config_comments(out, cfg);
  out << "mesh_n,beta,alpha2,iterations,converged,final_div_norm\n";

  bool all_converged = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    IterationHistory hist;
    try {
      hist = futures[i].get();
    } catch (const std::exception& err) {
      out.flush();
      std::cerr << "sweep aborted at mesh_n=" << entries[i].mesh_n
                << " beta=" << fmt17(entries[i].beta) << ": " << err.what() << "\n";
      return kExitInternal;
    }
    const double final_div = hist.records.empty() ? 0.0 : hist.records.back().div_norm;
    out << entries[i].mesh_n << ',' << fmt17(entries[i].beta) << ',' << fmt17(cfg.alpha2) << ','
        << hist.iterations << ',' << fmt_bool(hist.converged) << ',' << fmt17(final_div) << "\n";
    all_converged = all_converged && hist.converged;
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_divnorm(const CliConfig& cfg, const std::string& out_path) {
  IterationHistory reg = run_once(cfg, cfg.mesh_n, LidProfile::regularized, cfg.beta);
  IterationHistory uni = run_once(cfg, cfg.mesh_n, LidProfile::unit, cfg.beta);

  auto out = open_output(out_path.empty() ? "divnorm.csv" : out_path);
  write_config_comments(out, cfg);
  out << "iter,div_norm_regularized,div_norm_unit\n";
  const std::size_t rows = std::max(reg.records.size(), uni.records.size());
  for (std::size_t k = 0; k < rows; ++k) {
    out << (k + 1) << ',';
    if (k < reg.records.size()) out << fmt17(reg.records[k].div_norm);
    out << ',';
    if (k < uni.records.size()) out << fmt17(uni.records[k].div_norm);
    out << "\n";
  }

  std::cout << "regularized: converged=" << fmt_bool(reg.converged)
            << " iterations=" << reg.iterations
            << " | unit: converged=" << fmt_bool(uni.converged)
            << " iterations=" << uni.iterations << "\n";
  return (reg.converged && uni.converged) ? kExitOk : kExitNotConverged;
}

int cmd_spectrum(const CliConfig& cfg, const std::string& out_path) {
  auto sys = build_mac_stokes(cfg.mesh_n, lid_of(cfg.lid));
  auto prob = make_saddle_problem(sys, cfg.inner_tol, cfg.inner_max);

  SpectralEstimate M = estimate_extreme_eigen(prob, true, cfg.eig_tol, cfg.eig_max, cfg.seed);
  SpectralEstimate m = estimate_extreme_eigen(prob, false, cfg.eig_tol, cfg.eig_max, cfg.seed);

  std::string rho = "n/a";
  if (cfg.mesh_n <= 6) {
    auto dense = oracle::assemble_dense_schur(prob);
    auto eigs = oracle::zero_mean_spectrum(oracle::dense_sym_eigs(dense.matrix));
    rho = fmt17(oracle::companion_spectral_radius(eigs, cfg.alpha2, cfg.beta));
  }

  std::ostringstream report;
  report << "m=" << fmt17(m.value) << " M=" << fmt17(M.value)
         << " one_over_M=" << fmt17(1.0 / M.value)
         << " sufficient=" << fmt_bool(check_sufficient_condition(cfg.alpha2, cfg.beta, M.value))
         << " predicted_rho=" << rho << " m_converged=" << fmt_bool(m.converged)
         << " M_converged=" << fmt_bool(M.converged) << "\n";

  std::cout << report.str();
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    write_config_comments(out, cfg);
    out << report.str();
  }
  return (m.converged && M.converged) ? kExitOk : kExitNotConverged;
}

int usage(std::ostream& os, int code) {
  os << "usage: rmiter <run|sweep|divnorm|spectrum> [--config <path>]\n"
        "              [--set key=value]... [--out <path>]\n"
        "config keys: mesh_n alpha2 beta tol max_outer inner_tol inner_max\n"
        "             lid step1 richardson_omega seed eig_tol eig_max\n"
        "             mesh_list beta_list\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage(std::cerr, kExitUsage);
  const std::string sub = argv[1];
  if (sub == "--help" || sub == "-h" || sub == "help") return usage(std::cout, kExitOk);
  if (sub != "run" && sub != "sweep" && sub != "divnorm" && sub != "spectrum") {
    std::cerr << "unknown subcommand: " << sub << "\n";
    return usage(std::cerr, kExitUsage);
  }

  CliConfig cfg;
  if (sub == "divnorm") {  // divergence-trace experiment defaults
    cfg.mesh_n = 40;
    cfg.beta = 0.05;
  }

  std::string out_path;
  try {
    for (int i = 2; i < argc; ++i) {
      const std::string arg = argv[i];
      auto next = [&]() -> std::string {
        if (i + 1 >= argc) throw UsageError("missing value after " + arg);
        return argv[++i];
      };
      if (arg == "--config") load_config_file(cfg, next());
      else if (arg == "--set") apply_key_value(cfg, next());
      else if (arg == "--out") out_path = next();
      else throw UsageError("unknown flag: " + arg);
    }
    validate(cfg);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sub == "run") return cmd_run(cfg, out_path);
    if (sub == "sweep") return cmd_sweep(cfg, out_path);
    if (sub == "divnorm") return cmd_divnorm(cfg, out_path);
    return cmd_spectrum(cfg, out_path);
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
}
