// One line per acceptance criterion; exit status 1 when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ybl/error.hpp"
#include "ybl/report.hpp"

using namespace ybl;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

void absorb(Result& o, const CheckReport& r) {
  for (const auto& c : r.checks)
    if (c.verdict == ybl::Outcome::fail) {
      o.pass = false;
      if (o.detail.size() < 300) o.detail += (o.detail.empty() ? "" : "; ") + r.command + ": " + c.name;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria{
      {"exact dimension certification 25..51 within 5 s",
       [] {
         Result o;
         const auto t0 = std::chrono::steady_clock::now();
         absorb(o, cmd_certify(25, 51));
         const double s = seconds_since(t0);
         if (s > 5.0) o.pass = false;
         o.detail += (o.detail.empty() ? "" : "; ") + std::string("runtime ") + std::to_string(s) + " s";
         return o;
       }},
      {"polynomial bridge identities 19..200",
       [] {
         Result o;
         absorb(o, cmd_bridge(19, 200));
         return o;
       }},
      {"critical point at (0,1) for 25..51, 3 forms each",
       [] {
         Result o;
         absorb(o, cmd_critical(25, 51, 3, 42));
         return o;
       }},
      {"integral engine at n = 25, 37, 51",
       [] {
         Result o;
         absorb(o, cmd_integrals({25, 37, 51}, 5, 42));
         return o;
       }},
      {"sphere identities at n = 6, 25, 51, exact and Monte Carlo with 3 seeds",
       [] {
         Result o;
         for (int n : {6, 25, 51})
           for (std::uint64_t seed : {42u, 7u, 2024u}) absorb(o, cmd_sphere_check(n, seed, 1000000));
         return o;
       }},
      {"bubble suite",
       [] {
         Result o;
         absorb(o, cmd_bubble_check(25, 42));
         return o;
       }},
      {"curvature expansion at (25, 0.02, 0.1, 0.5)",
       [] {
         Result o;
         absorb(o, cmd_metric_check(25, 0.02, 0.1, 0.5, 42));
         return o;
       }},
      {"error-term scaling exponents within 5 min",
       [] {
         Result o;
         const auto t0 = std::chrono::steady_clock::now();
         absorb(o, cmd_scaling(25, 3, 0.04, 0.5, 0.5, 100000, 42));
         const double s = seconds_since(t0);
         if (s > 300.0) o.pass = false;
         o.detail += (o.detail.empty() ? "" : "; ") + std::string("runtime ") + std::to_string(s) + " s";
         return o;
       }},
      {"glued construction, N0 = 20, N_max = 60",
       [] {
         Result o;
         absorb(o, cmd_glued_check(25, 20, 60, 42));
         return o;
       }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Result o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s: %s%s%s\n", k + 1, criteria[k].name, o.pass ? "PASS" : "FAIL",
                o.detail.empty() ? "" : " (", o.detail.empty() ? "" : (o.detail + ")").c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
