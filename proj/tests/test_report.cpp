#include <cmath>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "property.hpp"
#include "ybl/error.hpp"
#include "ybl/report.hpp"

using namespace ybl;

namespace {

CheckReport sample_report() {
  CheckReport r;
  r.command = "demo";
  r.parameters = {{"n", 25}};
  r.seed = 7;
  r.version = tool_version();
  r.timestamp = "1970-01-01T00:00:00Z";
  r.add("plain", Outcome::pass, 1.5, 2.0, 0.1, "closed-form");
  r.add("has, a comma and \"quotes\"", Outcome::info, nullptr, "text", nullptr, "sampled");
  r.add("exact", Outcome::pass, nlohmann::json{{"decimal", "0.5"}, {"fraction", "1/2"}}, 0, 0, "exact");
  return r;
}

}  // namespace

TEST_CASE("outcome names round trip") {
  for (Outcome o : {Outcome::pass, Outcome::fail, Outcome::info}) CHECK(outcome_from_name(outcome_name(o)) == o);
  CHECK(std::string(outcome_name(Outcome::pass)) == "PASS");
  CHECK_THROWS_AS(outcome_from_name("MAYBE"), Error);
}

TEST_CASE("verdict aggregation") {
  CheckReport r = sample_report();
  CHECK(r.pass());
  CHECK(r.exit_code() == 0);
  r.add("broken", Outcome::fail, 3.0, 1.0, 0.0, "fit");
  CHECK_FALSE(r.pass());
  CHECK(r.exit_code() == 1);
  REQUIRE(r.find("broken") != nullptr);
  CHECK(r.find("broken")->verdict == Outcome::fail);
  CHECK(r.find("absent") == nullptr);
  // INFO never fails a report
  CheckReport info;
  info.add("note", Outcome::info, 1, 2, 3, "fit");
  CHECK(info.pass());
}

TEST_CASE("json round trip") {
  const CheckReport r = sample_report();
  const CheckReport back = nlohmann::json::parse(report_json(r)).get<CheckReport>();
  CHECK(back.command == r.command);
  CHECK(back.parameters == r.parameters);
  CHECK(back.seed == r.seed);
  CHECK(back.version == r.version);
  CHECK(back.timestamp == r.timestamp);
  REQUIRE(back.checks.size() == r.checks.size());
  for (std::size_t k = 0; k < r.checks.size(); ++k) {
    CHECK(back.checks[k].name == r.checks[k].name);
    CHECK(back.checks[k].verdict == r.checks[k].verdict);
    CHECK(back.checks[k].lhs == r.checks[k].lhs);
    CHECK(back.checks[k].rhs == r.checks[k].rhs);
    CHECK(back.checks[k].provenance == r.checks[k].provenance);
  }
  CHECK(report_json(back) == report_json(r));
  CHECK(report_json(r).back() == '\n');
  nlohmann::json bad = nlohmann::json::parse(report_json(r));
  bad["checks"][0]["verdict"] = "SOMETIMES";
  CHECK_THROWS(bad.get<CheckReport>());
}

TEST_CASE("csv quoting and summary lines") {
  const CheckReport r = sample_report();
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("name,verdict,lhs,rhs,tolerance,provenance\n", 0) == 0);
  CHECK(csv.find("\"has, a comma and \"\"quotes\"\"\",INFO,,text,,sampled\n") != std::string::npos);
  CHECK(csv.find("exact,PASS,0.5,") != std::string::npos);
  std::istringstream lines(report_summary(r));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 4);
  CHECK(report_summary(r).find("demo: PASS") != std::string::npos);

  CheckReport t = r;
  t.table.columns = {"a", "b"};
  t.table.rows = {{1.0, 2.0}, {3.0, 4.5}};
  CHECK(report_csv(t).rfind("a,b\n1,2\n3,4.5\n", 0) == 0);
}

TEST_CASE("timestamp follows SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(report_timestamp() == "1970-01-02T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(report_timestamp() == "2023-11-14T22:13:20Z");
  setenv("SOURCE_DATE_EPOCH", "garbage", 1);
  CHECK(report_timestamp() == "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(report_timestamp() == "1970-01-01T00:00:00Z");
}

TEST_CASE("log-log slope recovers power laws") {
  prop::for_all("slope", 30, 71, [](prop::Rng& r) {
    return std::pair{prop::uniform(r, -4.0, 9.0), prop::uniform(r, 0.1, 10.0)};
  }, [](const std::pair<double, double>& c) {
    std::vector<double> x, y;
    for (double v : {0.01, 0.02, 0.04, 0.08}) {
      x.push_back(v);
      y.push_back(c.second * std::pow(v, c.first));
    }
    return std::fabs(loglog_slope(x, y) - c.first) < 1e-10;
  });
}

TEST_CASE("commands reject bad parameters with ybl::Error") {
  CHECK_THROWS_AS(cmd_certify(30, 29), Error);
  CHECK_THROWS_AS(cmd_certify(20, 30), Error);
  CHECK_THROWS_AS(cmd_profile(25, 0.5, 2.0, 2, 1), Error);
  CHECK_THROWS_AS(cmd_profile(25, 2.0, 0.5, 10, 1), Error);
  CHECK_THROWS_AS(cmd_profile(24, 0.5, 2.0, 10, 1), Error);
  CHECK_THROWS_AS(cmd_metric_check(25, 0.02, 1.5, 0.5, 1), Error);
  CHECK_THROWS_AS(cmd_metric_check(25, 0.8, 0.1, 0.5, 1), Error);
  CHECK_THROWS_AS(cmd_bubble_check(2, 1), Error);
  CHECK_THROWS_AS(cmd_glued_check(25, 30, 20, 1), Error);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  const CheckReport a = cmd_profile(25, 0.5, 2.0, 31, 9), b = cmd_profile(25, 0.5, 2.0, 31, 9);
  CHECK(report_json(a) == report_json(b));
  CHECK(a.seed == 9);
  CHECK(a.version == tool_version());
  CHECK(a.timestamp == "1970-01-01T00:00:00Z");
  CHECK(a.table.rows.size() == 31);
  const CheckReport c = cmd_bubble_check(6, 3), d = cmd_bubble_check(6, 3);
  CHECK(report_json(c) == report_json(d));
  CHECK(c.pass());
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("certify reports exact values as fractions") {
  const CheckReport r = cmd_certify(25, 26);
  CHECK(r.pass());
  bool exact_seen = false;
  for (const auto& c : r.checks)
    if (c.provenance == "exact" && c.lhs.is_object()) {
      exact_seen = true;
      CHECK(c.lhs.contains("fraction"));
      CHECK(c.lhs.contains("decimal"));
    }
  CHECK(exact_seen);
}
