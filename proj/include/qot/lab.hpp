#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qot/io.hpp"
#include "qot/states.hpp"

// Seeded Monte-Carlo checks of transport inequalities. Sample k draws its
// states from derive_seed(seed, k), so reports do not depend on the number of
// worker threads.
namespace qot::lab {

enum class Status { Passed, Violated, Inconclusive };
std::string_view to_string(Status s) noexcept;

enum class Measure {
  HilbertSchmidt,  // normalised G G^dag, G square Ginibre
  Pure,            // Haar-random pure states
};
std::string_view to_string(Measure m) noexcept;
Measure measure_from_string(const std::string& name);

struct ScanConfig {
  int dim = 2;
  double order = 2.0;              // cost power p
  double exponent = 0.0;           // distance = T^exponent; 0 means 1 / order
  std::string geometry = "simplex";
  int samples = 10000;
  std::uint64_t seed = 1;
  int threads = 0;                 // 0: hardware concurrency
  Measure measure = Measure::HilbertSchmidt;
  double tolerance = -1.0;         // < 0: 1e-6 on analytic paths, 1e-5 with the SDP
  bool expect_violation = false;   // a search that must not report a silent pass
  bool minimize = true;
  std::vector<double> alphas;      // decoherence grid; empty means 0, 0.1, ..., 1
};

struct Witness {
  std::uint64_t index = 0;
  std::vector<DensityMatrix> states;
  double slack = 0.0;
  std::string chain;
};

struct ScanReport {
  std::string name;
  ScanConfig config;
  std::string method;               // "analytic" or "sdp"
  int samples = 0;
  int evaluated = 0;
  int failures = 0;                 // solver non-convergence, excluded from the slack
  double worst_slack = 0.0;
  double tolerance = 0.0;
  Status status = Status::Passed;
  std::optional<Witness> witness;
  std::optional<Witness> minimized;
  std::map<std::string, double> chains;  // worst slack per inequality
};

/// W(A,B) + W(B,C) - W(A,C) and its two permutations, minimum over the three.
ScanReport scan_triangle(const ScanConfig& config);

/// Bound chain between the transport distance, fidelity, Bures and trace
/// distances; every tenth sample has a pure second state, where the upper
/// bound I / sqrt 2 must be attained.
ScanReport scan_bounds(const ScanConfig& config);

/// F_S(a (x) c, b (x) d) - F_S(a, b) F_S(c, d) for qubit factors.
ScanReport scan_supermult(const ScanConfig& config);

/// Monotonicity in alpha of the cost between dephased qubit states, plus the
/// dephased-cost closed form against the SDP and its classical alpha = 0 end.
ScanReport scan_decoherence(const ScanConfig& config);

/// Slack of a triangle witness recomputed from its states.
double triangle_slack(const std::vector<DensityMatrix>& states, const ScanConfig& config);

/// Report status from the counts and slack.
Status classify(const ScanReport& r);

io::Json to_json(const ScanReport& r);
ScanReport report_from_json(const io::Json& j);
std::string csv_header();
std::string csv_row(const ScanReport& r);

/// Competing closed forms for isospectral and antipodal qubit pairs next to
/// the SDP value. "ok" is set when the SDP matches the implemented forms to 1e-6.
io::Json discrepancy_report();

/// Runs fn(k) for k in [0, n) on `threads` workers (0: hardware concurrency).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// QOT_THREADS when set, otherwise `fallback`.
int thread_count(int fallback);

}  // namespace qot::lab
