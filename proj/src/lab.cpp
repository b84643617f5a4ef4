#include "qot/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "qot/classical.hpp"
#include "qot/cost_model.hpp"
#include "qot/error.hpp"
#include "qot/metrics.hpp"
#include "qot/qubit.hpp"
#include "qot/random.hpp"
#include "qot/transport.hpp"

namespace qot::lab {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Passed: return "passed";
    case Status::Violated: return "violated";
    case Status::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::HilbertSchmidt: return "hilbert-schmidt";
    case Measure::Pure: return "pure";
  }
  return "unknown";
}

Measure measure_from_string(const std::string& name) {
  if (name == "hilbert-schmidt" || name == "hs") return Measure::HilbertSchmidt;
  if (name == "pure") return Measure::Pure;
  throw Error(ErrorKind::InvalidArgument, "unknown measure '" + name + "'");
}

int thread_count(int fallback) {
  if (const char* env = std::getenv("QOT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return fallback;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(1, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t slot) {
  return derive_seed(derive_seed(seed, index), slot);
}

// T^exponent with the quantised geometry raised to `order`.
class Distance {
 public:
  explicit Distance(const ScanConfig& c)
      : geometry_(geometry_by_name(c.geometry, c.dim)),
        cost_(cost_power(quantize_geometry(geometry_), c.order)),
        order_(c.order),
        exponent_(c.exponent > 0.0 ? c.exponent : 1.0 / c.order),
        analytic_(c.dim == 2) {}

  bool analytic() const { return analytic_; }

  double cost(const DensityMatrix& a, const DensityMatrix& b) const {
    if (analytic_)  // the N = 2 quantised geometry is E_01 times the simplex cost
      return std::pow(geometry_(0, 1), order_) * qubit::cost_exact(qubit::canonicalize(a, b)).value;
    return transport_cost(a, b, cost_.matrix);
  }

  double operator()(const DensityMatrix& a, const DensityMatrix& b) const {
    return std::pow(std::max(0.0, cost(a, b)), exponent_);
  }

 private:
  ClassicalGeometry geometry_;
  QuantumCostMatrix cost_;
  double order_;
  double exponent_;
  bool analytic_;
};

struct SampleOut {
  bool failed = false;
  std::vector<double> slacks;
};

// Evaluates every sample, keeps the per-chain minimum and the earliest
// sample attaining the overall minimum.
struct Tally {
  std::vector<std::string> names;
  int evaluated = 0;
  int failures = 0;
  std::vector<double> worst;
  double overall = INFINITY;
  int worst_index = -1;
  std::string worst_chain;
};

Tally run(const ScanConfig& c, std::vector<std::string> names, const std::function<SampleOut(int)>& sample) {
  std::vector<SampleOut> out(static_cast<std::size_t>(std::max(0, c.samples)));
  parallel_for(c.samples, c.threads, [&](int k) {
    try {
      out[static_cast<std::size_t>(k)] = sample(k);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
      out[static_cast<std::size_t>(k)].failed = true;
    }
  });
  Tally t;
  t.names = std::move(names);
  t.worst.assign(t.names.size(), INFINITY);
  for (int k = 0; k < c.samples; ++k) {
    const SampleOut& s = out[static_cast<std::size_t>(k)];
    if (s.failed) {
      ++t.failures;
      continue;
    }
    ++t.evaluated;
    for (std::size_t i = 0; i < s.slacks.size(); ++i) {
      if (std::isnan(s.slacks[i])) continue;  // chain not applicable to this sample
      t.worst[i] = std::min(t.worst[i], s.slacks[i]);
      if (s.slacks[i] < t.overall) {
        t.overall = s.slacks[i];
        t.worst_index = k;
        t.worst_chain = t.names[i];
      }
    }
  }
  return t;
}

ScanReport make_report(const std::string& name, const ScanConfig& c, const Tally& t, double tolerance,
                       const std::string& method) {
  ScanReport r;
  r.name = name;
  r.config = c;
  r.method = method;
  r.samples = c.samples;
  r.evaluated = t.evaluated;
  r.failures = t.failures;
  r.worst_slack = std::isfinite(t.overall) ? t.overall : 0.0;
  r.tolerance = tolerance;
  for (std::size_t i = 0; i < t.names.size(); ++i)
    if (std::isfinite(t.worst[i])) r.chains[t.names[i]] = t.worst[i];
  r.status = classify(r);
  return r;
}

double pick_tolerance(const ScanConfig& c, bool analytic) {
  if (c.tolerance >= 0.0) return c.tolerance;
  return analytic ? 1e-6 : 1e-5;
}

std::vector<DensityMatrix> triangle_states(const ScanConfig& c, int k) {
  const auto idx = static_cast<std::uint64_t>(k);
  switch (c.measure) {
    case Measure::HilbertSchmidt:
      return {random_density(c.dim, sub_seed(c.seed, idx, 0)), random_density(c.dim, sub_seed(c.seed, idx, 1)),
              random_density(c.dim, sub_seed(c.seed, idx, 2))};
    case Measure::Pure:
      return {random_pure(c.dim, sub_seed(c.seed, idx, 0)), random_pure(c.dim, sub_seed(c.seed, idx, 1)),
              random_pure(c.dim, sub_seed(c.seed, idx, 2))};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown measure");
}

double triangle_slack_with(const Distance& d, const std::vector<DensityMatrix>& s) {
  const double ab = d(s[0], s[1]);
  const double bc = d(s[1], s[2]);
  const double ac = d(s[0], s[2]);
  return std::min({ab + bc - ac, ab + ac - bc, ac + bc - ab});
}

// Halves Bloch coordinates toward the maximally mixed state one at a time,
// keeping a move while the violation stays at least half the original.
Witness minimize_witness(const Distance& d, const Witness& w) {
  Witness best = w;
  const double threshold = 0.5 * w.slack;
  std::vector<BlochVector> bloch;
  for (const auto& s : w.states) bloch.push_back(to_bloch(s));
  for (int round = 0; round < 50; ++round) {
    bool moved = false;
    for (std::size_t k = 0; k < bloch.size(); ++k) {
      for (Eigen::Index i = 0; i < bloch[k].components.size(); ++i) {
        if (bloch[k].components[i] == 0.0) continue;
        BlochVector trial = bloch[k];
        trial.components[i] *= 0.5;
        if (std::abs(trial.components[i]) < 1e-3) trial.components[i] = 0.0;
        std::vector<DensityMatrix> states = best.states;
        try {
          states[k] = from_bloch(trial);
          const double slack = triangle_slack_with(d, states);
          if (slack <= threshold) {
            bloch[k] = trial;
            best.states = std::move(states);
            best.slack = slack;
            moved = true;
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NotAState) throw;
        }
      }
    }
    if (!moved) break;
  }
  return best;
}

// pure second state on every tenth sample
bool bounds_pure_sample(int k) { return k % 10 == 0; }

std::vector<DensityMatrix> bounds_states(const ScanConfig& c, int k) {
  const auto idx = static_cast<std::uint64_t>(k);
  DensityMatrix a = random_density(c.dim, sub_seed(c.seed, idx, 0));
  DensityMatrix b = bounds_pure_sample(k) ? random_pure(c.dim, sub_seed(c.seed, idx, 1))
                                          : random_density(c.dim, sub_seed(c.seed, idx, 1));
  return {a, b};
}

std::vector<DensityMatrix> supermult_states(const ScanConfig& c, int k) {
  std::vector<DensityMatrix> out;
  for (std::uint64_t slot = 0; slot < 4; ++slot)
    out.push_back(random_density(2, sub_seed(c.seed, static_cast<std::uint64_t>(k), slot)));
  return out;
}

struct DecoherenceSample {
  DensityMatrix a, b;
  double r, s, alpha;
};

DecoherenceSample decoherence_sample(const ScanConfig& c, int k) {
  const auto idx = static_cast<std::uint64_t>(k);
  Rng rng(sub_seed(c.seed, idx, 2));
  const double r = rng.uniform();
  const double s = rng.uniform();
  const double alpha = rng.uniform();
  return {random_density(2, sub_seed(c.seed, idx, 0)), random_density(2, sub_seed(c.seed, idx, 1)), r, s, alpha};
}

double qubit_cost(const DensityMatrix& a, const DensityMatrix& b) {
  return qubit::cost_exact(qubit::canonicalize(a, b)).value;
}

Witness witness_from(const Tally& t, std::vector<DensityMatrix> states) {
  Witness w;
  w.index = static_cast<std::uint64_t>(t.worst_index);
  w.states = std::move(states);
  w.slack = t.overall;
  w.chain = t.worst_chain;
  return w;
}

}  // namespace

Status classify(const ScanReport& r) {
  if (r.samples <= 0 || r.failures > 0.01 * r.samples || r.evaluated == 0) return Status::Inconclusive;
  if (r.worst_slack < -r.tolerance) return Status::Violated;
  if (r.config.expect_violation) return Status::Inconclusive;
  return Status::Passed;
}

double triangle_slack(const std::vector<DensityMatrix>& states, const ScanConfig& config) {
  if (states.size() != 3) throw Error(ErrorKind::InvalidArgument, "a triangle witness has three states");
  return triangle_slack_with(Distance(config), states);
}

ScanReport scan_triangle(const ScanConfig& c) {
  if (c.dim < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  const Distance d(c);
  const Tally t = run(c, {"triangle"}, [&](int k) {
    return SampleOut{false, {triangle_slack_with(d, triangle_states(c, k))}};
  });
  ScanReport r = make_report("triangle", c, t, pick_tolerance(c, d.analytic()), d.analytic() ? "analytic" : "sdp");
  if (t.worst_index >= 0) {
    r.witness = witness_from(t, triangle_states(c, t.worst_index));
    if (c.minimize && r.status == Status::Violated) r.minimized = minimize_witness(d, *r.witness);
  }
  return r;
}

ScanReport scan_bounds(const ScanConfig& c) {
  ScanConfig cfg = c;
  cfg.geometry = "simplex";
  const bool analytic = c.dim == 2;
  const CMatrix cost = simplex_cost(c.dim).matrix;
  const Tally t = run(cfg,
                      {"bures_lower", "infidelity_upper", "bures_upper", "overlap_upper", "trace_root",
                       "fidelity_lower", "fidelity_upper", "pure_saturation"},
                      [&](int k) {
                        const auto s = bounds_states(cfg, k);
                        const double tq = analytic ? qubit_cost(s[0], s[1]) : transport_cost(s[0], s[1], cost);
                        const double w = std::sqrt(std::max(0.0, tq));
                        const double f = fidelity(s[0], s[1]);
                        const double inf = root_infidelity(s[0], s[1]);
                        const double bures = bures_distance(s[0], s[1]);
                        const double fs = 1.0 - 2.0 * tq;
                        SampleOut o;
                        o.slacks = {w - 0.5 * bures,
                                    inf * M_SQRT1_2 - w,
                                    (bures - inf) * M_SQRT1_2,
                                    0.5 * (1.0 - overlap(s[0], s[1])) - tq,
                                    std::sqrt(trace_distance(s[0], s[1])) - w,
                                    fs - f,
                                    std::sqrt(f) - fs,
                                    bounds_pure_sample(k) ? -std::abs(w - inf * M_SQRT1_2) : NAN};
                        return o;
                      });
  ScanReport r = make_report("bounds", cfg, t, c.tolerance >= 0.0 ? c.tolerance : 1e-6, analytic ? "analytic" : "sdp");
  if (t.worst_index >= 0) r.witness = witness_from(t, bounds_states(cfg, t.worst_index));
  return r;
}

ScanReport scan_supermult(const ScanConfig& c) {
  ScanConfig cfg = c;
  cfg.dim = 2;
  cfg.geometry = "simplex";
  const CMatrix cost = simplex_cost(4).matrix;
  const Tally t = run(cfg, {"supermultiplicativity"}, [&](int k) {
    const auto s = supermult_states(cfg, k);
    const double lhs = 1.0 - 2.0 * transport_cost(tensor(s[0], s[2]), tensor(s[1], s[3]), cost);
    const double rhs = (1.0 - 2.0 * qubit_cost(s[0], s[1])) * (1.0 - 2.0 * qubit_cost(s[2], s[3]));
    return SampleOut{false, {lhs - rhs}};
  });
  ScanReport r = make_report("supermult", cfg, t, c.tolerance >= 0.0 ? c.tolerance : 1e-5, "sdp");
  if (t.worst_index >= 0) r.witness = witness_from(t, supermult_states(cfg, t.worst_index));
  return r;
}

ScanReport scan_decoherence(const ScanConfig& c) {
  ScanConfig cfg = c;
  cfg.dim = 2;
  cfg.geometry = "simplex";
  if (cfg.alphas.empty())
    for (int i = 0; i <= 10; ++i) cfg.alphas.push_back(i / 10.0);
  std::sort(cfg.alphas.begin(), cfg.alphas.end());
  for (double a : cfg.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorKind::AlphaOutOfRange, "alpha grid must lie in [0, 1]");
  const QuantumCostMatrix simplex = simplex_cost(2);
  RMatrix half = 0.5 * ClassicalGeometry::simplex(2).distances();
  const ClassicalGeometry diagonal_cost(half);  // diag of the simplex cost, as a geometry

  const Tally t = run(cfg, {"state_dephasing_monotone", "cost_dephasing_formula", "classical_endpoint"}, [&](int k) {
    const DecoherenceSample d = decoherence_sample(cfg, k);
    double mono = INFINITY;
    double prev = qubit_cost(dephase_state(d.a, cfg.alphas[0]), dephase_state(d.b, cfg.alphas[0]));
    for (std::size_t i = 1; i < cfg.alphas.size(); ++i) {
      const double cur = qubit_cost(dephase_state(d.a, cfg.alphas[i]), dephase_state(d.b, cfg.alphas[i]));
      mono = std::min(mono, cur - prev);
      prev = cur;
    }
    const DensityMatrix pr = diagonal_state({d.r, 1.0 - d.r});
    const DensityMatrix ps = diagonal_state({d.s, 1.0 - d.s});
    const double sdp = transport_cost(pr, ps, dephase_cost(simplex, d.alpha));
    const double formula = qubit::decohered_commuting_cost(d.r, d.s, d.alpha);
    const double classical = classical_cost(ProbabilityVector({d.r, 1.0 - d.r}), ProbabilityVector({d.s, 1.0 - d.s}),
                                            diagonal_cost);
    SampleOut o;
    o.slacks = {cfg.alphas.size() > 1 ? mono : NAN, -std::abs(sdp - formula),
                -std::abs(qubit::decohered_commuting_cost(d.r, d.s, 0.0) - classical)};
    return o;
  });
  ScanReport r = make_report("decoherence", cfg, t, c.tolerance >= 0.0 ? c.tolerance : 1e-7, "analytic+sdp");
  if (t.worst_index >= 0) {
    const DecoherenceSample d = decoherence_sample(cfg, t.worst_index);
    r.witness = witness_from(t, {d.a, d.b, diagonal_state({d.r, 1.0 - d.r}), diagonal_state({d.s, 1.0 - d.s})});
  }
  return r;
}

namespace {

io::Json witness_json(const Witness& w) {
  io::Json states = io::Json::array();
  for (const auto& s : w.states) states.push_back(io::state_to_json(s));
  return {{"index", w.index}, {"slack", w.slack}, {"chain", w.chain}, {"states", states}};
}

Witness witness_from_json(const io::Json& j) {
  Witness w;
  w.index = j.at("index").get<std::uint64_t>();
  w.slack = j.at("slack").get<double>();
  w.chain = j.value("chain", std::string());
  for (const auto& s : j.at("states")) w.states.push_back(io::state_from_json(s));
  return w;
}

}  // namespace

io::Json to_json(const ScanReport& r) {
  io::Json j = {{"name", r.name},
                {"dim", r.config.dim},
                {"order", r.config.order},
                {"exponent", r.config.exponent > 0.0 ? r.config.exponent : 1.0 / r.config.order},
                {"geometry", r.config.geometry},
                {"measure", std::string(to_string(r.config.measure))},
                {"seed", r.config.seed},
                {"method", r.method},
                {"samples", r.samples},
                {"evaluated", r.evaluated},
                {"failures", r.failures},
                {"worst_slack", r.worst_slack},
                {"tolerance", r.tolerance},
                {"expect_violation", r.config.expect_violation},
                {"status", std::string(to_string(r.status))},
                {"chains", r.chains}};
  if (!r.config.alphas.empty()) j["alphas"] = r.config.alphas;
  if (r.witness) j["witness"] = witness_json(*r.witness);
  if (r.minimized) j["minimized_witness"] = witness_json(*r.minimized);
  return j;
}

ScanReport report_from_json(const io::Json& j) {
  try {
    ScanReport r;
    r.name = j.at("name").get<std::string>();
    r.config.dim = j.at("dim").get<int>();
    r.config.order = j.at("order").get<double>();
    r.config.exponent = j.at("exponent").get<double>();
    r.config.geometry = j.at("geometry").get<std::string>();
    r.config.measure = measure_from_string(j.at("measure").get<std::string>());
    r.config.seed = j.at("seed").get<std::uint64_t>();
    r.config.expect_violation = j.value("expect_violation", false);
    r.config.samples = r.samples = j.at("samples").get<int>();
    r.method = j.value("method", std::string());
    r.evaluated = j.at("evaluated").get<int>();
    r.failures = j.at("failures").get<int>();
    r.worst_slack = j.at("worst_slack").get<double>();
    r.tolerance = r.config.tolerance = j.at("tolerance").get<double>();
    r.chains = j.value("chains", std::map<std::string, double>{});
    if (j.contains("alphas")) r.config.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("witness")) r.witness = witness_from_json(j.at("witness"));
    if (j.contains("minimized_witness")) r.minimized = witness_from_json(j.at("minimized_witness"));
    r.status = classify(r);
    return r;
  } catch (const io::Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("scan report: ") + e.what());
  }
}

std::string csv_header() {
  return "name,dim,order,exponent,geometry,measure,samples,evaluated,failures,worst_slack,tolerance,status,seed";
}

std::string csv_row(const ScanReport& r) {
  const double e = r.config.exponent > 0.0 ? r.config.exponent : 1.0 / r.config.order;
  return r.name + "," + std::to_string(r.config.dim) + "," + io::number(r.config.order) + "," + io::number(e) + "," +
         r.config.geometry + "," + std::string(to_string(r.config.measure)) + "," + std::to_string(r.samples) + "," +
         std::to_string(r.evaluated) + "," + std::to_string(r.failures) + "," + io::number(r.worst_slack) + "," +
         io::number(r.tolerance) + "," + std::string(to_string(r.status)) + "," + std::to_string(r.config.seed);
}

io::Json discrepancy_report() {
  const CMatrix cost = simplex_cost(2).matrix;
  bool ok = true;
  io::Json iso = io::Json::array();
  for (double lambda : {0.1, 0.25, 0.4, 0.5})
    for (double theta : {M_PI / 3.0, M_PI / 2.0, M_PI}) {
      const DensityMatrix a = validate_state(qubit::rho(lambda, 0.0));
      const DensityMatrix b = validate_state(qubit::rho(lambda, theta));
      const double sdp = transport_cost(a, b, cost);
      const double closed = qubit::isospectral_cost(lambda, theta);
      const double variant = qubit::isospectral_distance_variant(lambda, theta);
      const bool row_ok = std::abs(sdp - closed) <= 1e-6;
      ok = ok && row_ok;
      iso.push_back({{"lambda", lambda},
                     {"theta", theta},
                     {"sdp_cost", sdp},
                     {"closed_form_cost", closed},
                     {"variant_cost", variant * variant},
                     {"sdp_distance", std::sqrt(std::max(0.0, sdp))},
                     {"closed_form_distance", std::sqrt(closed)},
                     {"variant_distance", variant},
                     {"sdp_matches_closed_form", row_ok},
                     {"sdp_matches_variant", std::abs(sdp - variant * variant) <= 1e-6}});
    }
  io::Json anti = io::Json::array();
  for (double t : {0.2, 0.6, 0.9, 1.0}) {
    const DensityMatrix a = qubit_state(0.0, 0.0, t);
    const DensityMatrix b = qubit_state(0.0, 0.0, -t);
    const double sdp = transport_cost(a, b, cost);
    const double closed = qubit::antipodal_cost(t);
    const double variant = qubit::antipodal_distance_variant(t);
    const double bures = bures_distance(a, b);
    const bool row_ok = std::abs(sdp - closed) <= 1e-6;
    ok = ok && row_ok;
    anti.push_back({{"tau", t},
                    {"sdp_cost", sdp},
                    {"closed_form_cost", closed},
                    {"variant_cost", variant * variant},
                    {"sdp_distance", std::sqrt(std::max(0.0, sdp))},
                    {"bures_half", 0.5 * bures},
                    {"bures_over_sqrt2", bures * M_SQRT1_2},
                    {"variant_distance", variant},
                    {"sdp_matches_closed_form", row_ok},
                    {"sdp_matches_variant", std::abs(sdp - variant * variant) <= 1e-6}});
  }
  return {{"isospectral",
           {{"closed_form", "(1/2 - sqrt(s(1-s))) sin^2(theta/2)"},
            {"variant", "W = sqrt(1/sqrt2 - sqrt(l(1-l))) |sin(theta/2)|"},
            {"rows", iso}}},
          {"antipodal",
           {{"closed_form", "(1 - sqrt(1 - t^2)) / 2, i.e. W = B/2"},
            {"variant", "W = B/sqrt2 = sqrt(1 - sqrt(1 - t^2))"},
            {"rows", anti}}},
          {"ok", ok}};
}

}  // namespace qot::lab
