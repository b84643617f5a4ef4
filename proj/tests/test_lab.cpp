#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qot/error.hpp"
#include "qot/lab.hpp"
#include "qot/qubit.hpp"

using namespace qot;
using namespace qot::lab;

#ifndef QOT_TEST_DATA
#define QOT_TEST_DATA "tests/data"
#endif

namespace {

ScanConfig small(int samples) {
  ScanConfig c;
  c.samples = samples;
  c.seed = 7;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(97, threads, [&](int k) { hits[static_cast<std::size_t>(k)]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("scan reports do not depend on the thread count") {
  auto c = small(300);
  c.order = 1.0;
  const auto one = to_json(scan_triangle(c));
  c.threads = 3;
  const auto three = to_json(scan_triangle(c));
  CHECK(one.dump() == three.dump());
  c.seed = 8;
  CHECK(to_json(scan_triangle(c)).dump() != one.dump());
}

TEST_CASE("order-two triangle scan on qubits passes") {
  const auto r = scan_triangle(small(2000));
  CHECK(r.status == Status::Passed);
  CHECK(r.method == "analytic");
  CHECK(r.evaluated == 2000);
  CHECK(r.worst_slack >= -1e-7);
}

TEST_CASE("order-one triangle scan finds and minimises a witness") {
  auto c = small(500);
  c.order = 1.0;
  const auto r = scan_triangle(c);
  REQUIRE(r.status == Status::Violated);
  REQUIRE(r.witness);
  CHECK(r.witness->slack == r.worst_slack);
  CHECK(triangle_slack(r.witness->states, c) == r.witness->slack);
  REQUIRE(r.minimized);
  CHECK(r.minimized->slack <= 0.5 * r.witness->slack);
  CHECK(triangle_slack(r.minimized->states, c) == r.minimized->slack);
}

TEST_CASE("stored order-one witness replays exactly") {
  std::ifstream in(std::string(QOT_TEST_DATA) + "/w1_triangle_witness.json");
  REQUIRE(in.good());
  const auto report = report_from_json(io::Json::parse(in));
  REQUIRE(report.witness);
  CHECK(report.status == Status::Violated);
  const double replayed = triangle_slack(report.witness->states, report.config);
  CHECK(replayed == report.witness->slack);
  CHECK(replayed < -1e-3);
}

TEST_CASE("report JSON round trip") {
  auto c = small(200);
  c.order = 1.0;
  const auto r = scan_triangle(c);
  const auto back = report_from_json(io::Json::parse(to_json(r).dump()));
  CHECK(to_json(back).dump() == to_json(r).dump());
  CHECK_THROWS_AS(report_from_json(io::Json::parse("{\"name\": 3}")), Error);
}

TEST_CASE("classification") {
  ScanReport r;
  r.samples = 1000;
  r.evaluated = 1000;
  r.tolerance = 1e-6;
  r.worst_slack = -1e-7;
  CHECK(classify(r) == Status::Passed);
  r.worst_slack = -1e-5;
  CHECK(classify(r) == Status::Violated);
  r.failures = 11;
  r.evaluated = 989;
  CHECK(classify(r) == Status::Inconclusive);
  r.failures = 10;
  r.evaluated = 990;
  CHECK(classify(r) == Status::Violated);
  r.worst_slack = 1.0;
  r.config.expect_violation = true;
  CHECK(classify(r) == Status::Inconclusive);
  r.samples = 0;
  r.config.expect_violation = false;
  CHECK(classify(r) == Status::Inconclusive);
}

TEST_CASE("bound chain scan") {
  auto c = small(200);
  const auto r = scan_bounds(c);
  CHECK(r.status == Status::Passed);
  for (const char* name : {"bures_lower", "infidelity_upper", "bures_upper", "overlap_upper", "trace_root",
                           "pure_saturation"})
    CHECK(r.chains.count(name) == 1);
  c.dim = 3;
  c.samples = 20;
  CHECK(scan_bounds(c).status == Status::Passed);
}

TEST_CASE("decoherence scan") {
  const auto r = scan_decoherence(small(30));
  CHECK(r.status == Status::Passed);
  CHECK(r.chains.count("state_dephasing_monotone") == 1);
  CHECK(r.chains.count("classical_endpoint") == 1);
}

TEST_CASE("super-multiplicativity scan") {
  const auto r = scan_supermult(small(3));
  CHECK(r.status == Status::Passed);
  CHECK(r.method == "sdp");
}

TEST_CASE("a search that expects a violation never passes silently") {
  auto c = small(50);
  c.expect_violation = true;
  const auto r = scan_triangle(c);
  CHECK(r.status == Status::Inconclusive);
}

TEST_CASE("CSV rows match the header") {
  const auto r = scan_triangle(small(10));
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(count(csv_header()) == count(csv_row(r)));
}

TEST_CASE("discrepancy report sides with the implemented closed forms") {
  const auto j = discrepancy_report();
  CHECK(j.at("ok").get<bool>());
  for (const auto& row : j.at("isospectral").at("rows")) {
    CHECK(row.at("sdp_matches_closed_form").get<bool>());
    CHECK(!row.at("sdp_matches_variant").get<bool>());
  }
  for (const auto& row : j.at("antipodal").at("rows")) CHECK(row.at("sdp_matches_closed_form").get<bool>());
}

TEST_CASE("measures by name") {
  CHECK(measure_from_string("hs") == Measure::HilbertSchmidt);
  CHECK(measure_from_string("pure") == Measure::Pure);
  CHECK_THROWS_AS(measure_from_string("bogus"), Error);
}
