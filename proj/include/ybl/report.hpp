#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ybl {

enum class Outcome { pass, fail, info };
const char* outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& s);  // unknown -> Errc::invalid_argument

// lhs / rhs / tolerance are numbers, or {"decimal", "fraction"} objects for exact rationals.
// provenance says how the values were obtained: exact, closed-form, quadrature,
// monte-carlo, finite-difference, fit, or sampled.
struct Check {
  std::string name;
  Outcome verdict = Outcome::info;
  nlohmann::json lhs, rhs, tolerance;
  std::string provenance;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool empty() const { return columns.empty(); }
};

struct CheckReport {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  std::string version, timestamp;
  Table table;

  bool pass() const;  // no FAIL entry
  int exit_code() const { return pass() ? 0 : 1; }
  const Check* find(const std::string& name) const;
  Check& add(std::string name, Outcome v, nlohmann::json lhs, nlohmann::json rhs, nlohmann::json tol,
             std::string provenance);
};

void to_json(nlohmann::json& j, const Check& c);
void from_json(const nlohmann::json& j, Check& c);
void to_json(nlohmann::json& j, const CheckReport& r);
void from_json(const nlohmann::json& j, CheckReport& r);

std::string report_json(const CheckReport& r);  // pretty, trailing newline
// The sweep table when present, otherwise one row per check.
std::string report_csv(const CheckReport& r);
std::string report_summary(const CheckReport& r);  // one line per check

std::string tool_version();
// ISO-8601 UTC from SOURCE_DATE_EPOCH, or the epoch itself when unset.
std::string report_timestamp();

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Parameter problems throw ybl::Error before any check runs; failures inside
// the module code become FAIL entries.
CheckReport cmd_certify(int n_min, int n_max);
CheckReport cmd_bridge(int n_min, int n_max);
CheckReport cmd_profile(int n, double eps_min, double eps_max, int steps, std::uint64_t seed);
CheckReport cmd_critical(int n_min, int n_max, int forms, std::uint64_t seed);
CheckReport cmd_integrals(const std::vector<int>& dims, int eps_samples, std::uint64_t seed);
CheckReport cmd_sphere_check(int n, std::uint64_t seed, std::size_t samples);
CheckReport cmd_bubble_check(int n, std::uint64_t seed);
CheckReport cmd_metric_check(int n, double lambda, double mu, double rho, std::uint64_t seed);
CheckReport cmd_scaling(int n, int grid, double lambda, double mu, double rho, std::size_t directions,
                        std::uint64_t seed);
CheckReport cmd_glued_check(int n, int N0, int N_max, std::uint64_t seed);

}  // namespace ybl
