#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "ybl/error.hpp"
#include "ybl/report.hpp"

namespace {

struct Options {
  int n = 25, n_min = 25, n_max = 51, bridge_min = 19, bridge_max = 200, eps_samples = 5, steps = 301, grid = 3, forms = 3, N0 = 20, N_max = 60;
  std::uint64_t seed = 42;
  std::size_t samples = 1000000, directions = 100000;
  double eps_min = 0.5, eps_max = 2.0, lambda = 0.02, scaling_lambda = 0.04, mu = 0.5, rho = 0.5;
  std::string json, csv;
  std::vector<int> dims{25, 37, 51};
  bool quiet = false;
};

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification laboratory for the Yamabe blow-up construction, n = 25..51"};
  app.set_version_flag("--version", ybl::tool_version());
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--json", o.json, "write the report as JSON");
    c->add_option("--csv", o.csv, "write the sweep table (or the checks) as CSV");
    c->add_flag("--quiet", o.quiet, "no summary on stdout");
  };
  auto* certify = app.add_subcommand("certify", "exact dimension certification");
  certify->add_option("--n-min", o.n_min);
  certify->add_option("--n-max", o.n_max);
  auto* bridge = app.add_subcommand("bridge", "polynomial bridge identities in Q[tau]");
  bridge->add_option("--n-min", o.bridge_min);
  bridge->add_option("--n-max", o.bridge_max);
  auto* profile = app.add_subcommand("profile", "eps-sweep of F(0,eps), its derivatives and the xi-Hessian");
  profile->add_option("--n", o.n);
  profile->add_option("--eps-min", o.eps_min);
  profile->add_option("--eps-max", o.eps_max);
  profile->add_option("--steps", o.steps);
  profile->add_option("--seed", o.seed);
  auto* critical = app.add_subcommand("critical", "critical point at (0,1) for random forms");
  critical->add_option("--n-min", o.n_min);
  critical->add_option("--n-max", o.n_max);
  critical->add_option("--forms", o.forms);
  critical->add_option("--seed", o.seed);
  auto* integrals = app.add_subcommand("integrals", "radial integral engine");
  integrals->add_option("--dims", o.dims);
  integrals->add_option("--samples", o.eps_samples, "eps draws per dimension");
  integrals->add_option("--seed", o.seed);
  auto* sphere = app.add_subcommand("sphere-check", "sphere identities by exact moments and Monte Carlo");
  sphere->add_option("--n", o.n);
  sphere->add_option("--seed", o.seed);
  sphere->add_option("--samples", o.samples);
  auto* bubble = app.add_subcommand("bubble-check", "bubble PDE, mass, cokernel Gram matrix");
  bubble->add_option("--n", o.n);
  bubble->add_option("--seed", o.seed);
  auto* metric = app.add_subcommand("metric-check", "curvature expansion of the perturbed metric");
  metric->add_option("--n", o.n);
  metric->add_option("--lambda", o.lambda);
  metric->add_option("--mu", o.mu);
  metric->add_option("--rho", o.rho);
  metric->add_option("--seed", o.seed);
  auto* scaling = app.add_subcommand("scaling", "lambda and mu exponents of the error-term norm");
  scaling->add_option("--n", o.n);
  scaling->add_option("--grid", o.grid, "points per sweep");
  scaling->add_option("--lambda", o.scaling_lambda, "largest lambda");
  scaling->add_option("--mu", o.mu);
  scaling->add_option("--rho", o.rho);
  scaling->add_option("--samples", o.directions, "sphere directions");
  scaling->add_option("--seed", o.seed);
  auto* glued = app.add_subcommand("glued-check", "disjoint supports and decay of the glued bumps");
  glued->add_option("--n", o.n);
  glued->add_option("--n0", o.N0);
  glued->add_option("--n-last", o.N_max);
  glued->add_option("--seed", o.seed);
  for (auto* c : app.get_subcommands({})) common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::optional<ybl::CheckReport> r;
  try {
    if (*certify)
      r = ybl::cmd_certify(o.n_min, o.n_max);
    else if (*bridge)
      r = ybl::cmd_bridge(o.bridge_min, o.bridge_max);
    else if (*profile)
      r = ybl::cmd_profile(o.n, o.eps_min, o.eps_max, o.steps, o.seed);
    else if (*critical)
      r = ybl::cmd_critical(o.n_min, o.n_max, o.forms, o.seed);
    else if (*integrals)
      r = ybl::cmd_integrals(o.dims, o.eps_samples, o.seed);
    else if (*sphere)
      r = ybl::cmd_sphere_check(o.n, o.seed, o.samples);
    else if (*bubble)
      r = ybl::cmd_bubble_check(o.n, o.seed);
    else if (*metric)
      r = ybl::cmd_metric_check(o.n, o.lambda, o.mu, o.rho, o.seed);
    else if (*scaling)
      r = ybl::cmd_scaling(o.n, o.grid, o.scaling_lambda, o.mu, o.rho, o.directions, o.seed);
    else if (*glued)
      r = ybl::cmd_glued_check(o.n, o.N0, o.N_max, o.seed);
  } catch (const ybl::Error& e) {
    std::cerr << "ybl: " << ybl::errc_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ybl: " << e.what() << "\n";
    return 2;
  }
  if (!r) return 2;
  if (!o.json.empty() && !write_file(o.json, ybl::report_json(*r))) {
    std::cerr << "ybl: cannot write " << o.json << "\n";
    return 2;
  }
  if (!o.csv.empty() && !write_file(o.csv, ybl::report_csv(*r))) {
    std::cerr << "ybl: cannot write " << o.csv << "\n";
    return 2;
  }
  if (!o.quiet) std::cout << ybl::report_summary(*r);
  return r->exit_code();
}
