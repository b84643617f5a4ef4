// qot: transport distances, couplings, figure sweeps and inequality scans.
//
// Exit codes: 0 ok / scan passed, 2 bad usage or unparsable input,
// 3 invalid state, 4 solver did not converge, 5 scan found a violation,
// 6 scan inconclusive.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qot/error.hpp"
#include "qot/io.hpp"
#include "qot/lab.hpp"
#include "qot/metrics.hpp"
#include "qot/qubit.hpp"
#include "qot/transport.hpp"

using namespace qot;
using io::Json;

namespace {

struct CostFlags {
  std::string geometry = "simplex";
  double power = 1.0;
};

QuantumCostMatrix make_cost(const CostFlags& f, int n) {
  return cost_power(quantize_geometry(geometry_by_name(f.geometry, n)), f.power);
}

// tq, w, wp:<p> and fs are transport quantities; the rest only look at the states.
Json cmd_dist(const DensityMatrix& a, const DensityMatrix& b, const std::string& metric, const CostFlags& flags,
              bool verify) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "states have different dimensions");
  Json out = {{"metric", metric}};
  if (metric == "fidelity" || metric == "infid" || metric == "bures" || metric == "angle" || metric == "trace") {
    double v = 0.0;
    if (metric == "fidelity") v = fidelity(a, b);
    if (metric == "infid") v = root_infidelity(a, b);
    if (metric == "bures") v = bures_distance(a, b);
    if (metric == "angle") v = bures_angle(a, b);
    if (metric == "trace") v = trace_distance(a, b);
    out["value"] = v;
    out["method"] = "closed-form";
    return out;
  }

  double p = flags.power;  // power applied to the cost before solving
  double root = 1.0;
  if (metric == "w") {
    p *= 2.0;
    root = 0.5;
  } else if (metric.rfind("wp:", 0) == 0) {
    double q = 0.0;
    try {
      q = std::stod(metric.substr(3));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad metric '" + metric + "'");
    }
    if (!(q >= 1.0)) throw Error(ErrorKind::InvalidArgument, "wp needs p >= 1");
    p *= q;
    root = 1.0 / q;
  } else if (metric == "fs") {
    if (flags.geometry != "simplex" || flags.power != 1.0)
      throw Error(ErrorKind::InvalidArgument, "fs is defined for the plain simplex cost only");
  } else if (metric != "tq") {
    throw Error(ErrorKind::Parse, "unknown metric '" + metric + "'");
  }
  const auto finish = [&](double t) { return metric == "fs" ? 1.0 - 2.0 * t : std::pow(std::max(0.0, t), root); };

  const auto geometry = geometry_by_name(flags.geometry, a.dim());
  if (a.dim() == 2) {
    // the N = 2 quantised geometry is E_01 times the simplex cost, and the
    // simplex cost is a projector, so powers only rescale
    const double t = std::pow(geometry(0, 1), p) * qubit::cost_exact(qubit::canonicalize(a, b)).value;
    out["value"] = finish(t);
    out["method"] = "analytic";
    if (verify) {
      const auto s = solve(CouplingProblem(a, b, cost_power(quantize_geometry(geometry), p).matrix));
      if (!s.converged) throw Error(ErrorKind::NoConvergence, "verification SDP did not converge");
      out["sdp_value"] = finish(s.value);
      out["gap"] = s.gap;
      out["agrees"] = std::abs(s.value - t) <= 1e-6;
    }
    return out;
  }
  const auto s = solve(CouplingProblem(a, b, cost_power(quantize_geometry(geometry), p).matrix));
  if (!s.converged) throw Error(ErrorKind::NoConvergence, "SDP did not converge");
  out["value"] = finish(s.value);
  out["method"] = "sdp";
  out["gap"] = s.gap;
  return out;
}

Json cmd_couple(const DensityMatrix& a, const DensityMatrix& b, const CostFlags& flags) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "states have different dimensions");
  const QuantumCostMatrix cost = make_cost(flags, a.dim());
  if ((a.matrix() - b.matrix()).norm() == 0.0) {
    // zero cost on the symmetric subspace: the purification is optimal
    const Coupling c = purification_coupling(a);
    TransportSolution s;
    s.joint = c.joint().matrix();
    s.value = s.raw_value = (cost.matrix * s.joint).trace().real();
    s.dual_a = CMatrix::Zero(a.dim(), a.dim());
    s.dual_b = s.dual_a;
    s.gap = s.value;
    s.marginal_residual = c.marginal_residual();
    s.converged = true;
    s.method = "purification";
    return io::solution_to_json(s);
  }
  const auto s = solve(CouplingProblem(a, b, cost.matrix));
  if (!s.converged) throw Error(ErrorKind::NoConvergence, "SDP did not converge");
  Json out = io::solution_to_json(s);
  const DualCheck check = check_dual(cost.matrix, s.dual_a, s.dual_b, a, b);
  out["certificate"] = {{"dual_feasible", check.feasible}, {"dual_bound", check.bound},
                        {"slack_min_eigenvalue", check.min_eigenvalue}, {"gap", s.value - check.bound}};
  return out;
}

void cmd_sweep_fig2(int steps, std::ostream& os) {
  if (steps < 2) throw Error(ErrorKind::InvalidArgument, "steps must be at least 2");
  const DensityMatrix a = diagonal_state({0.55, 0.45});
  const DensityMatrix plus = qubit_state(1.0, 0.0, 0.0);
  os << "t,W,I_over_sqrt2,B_over_sqrt2,B_over_2\n";
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / (steps - 1);
    const DensityMatrix b = mix(a, plus, 1.0 - t);
    const double w = std::sqrt(std::max(0.0, qubit::cost_exact(qubit::canonicalize(a, b)).value));
    const double inf = root_infidelity(a, b);
    const double bures = bures_distance(a, b);
    os << io::number(t) << ',' << io::number(w) << ',' << io::number(inf * M_SQRT1_2) << ','
       << io::number(bures * M_SQRT1_2) << ',' << io::number(0.5 * bures) << '\n';
  }
}

void cmd_sweep_fig4(double r, int t_points, int alpha_points, std::ostream& os) {
  if (t_points < 2 || alpha_points < 2) throw Error(ErrorKind::InvalidArgument, "grids need at least 2 points");
  os << "alpha";
  for (int j = 0; j < t_points; ++j) os << ",t=" << io::number(static_cast<double>(j) / (t_points - 1));
  os << '\n';
  for (int i = 0; i < alpha_points; ++i) {
    const double alpha = static_cast<double>(i) / (alpha_points - 1);
    os << io::number(alpha);
    for (int j = 0; j < t_points; ++j) {
      const double t = static_cast<double>(j) / (t_points - 1);
      os << ',' << io::number(std::sqrt(qubit::decohered_commuting_cost(r, t, alpha)));
    }
    os << '\n';
  }
}

int scan_exit(lab::Status s) {
  switch (s) {
    case lab::Status::Passed: return 0;
    case lab::Status::Violated: return 5;
    case lab::Status::Inconclusive: return 6;
  }
  return 6;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotHermitian:
    case ErrorKind::NotPSD:
    case ErrorKind::TraceNotOne:
    case ErrorKind::NotAState:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DimensionNotSquare:
      return 3;
    case ErrorKind::NoConvergence:
      return 4;
    default:
      return 2;
  }
}

void write(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum optimal transport toolkit"};
  app.require_subcommand(1);

  std::string file_a, file_b, metric = "tq", out_path;
  CostFlags cost;
  bool verify = false;

  auto* dist = app.add_subcommand("dist", "distance between two states");
  dist->add_option("state_a", file_a, "JSON state file")->required();
  dist->add_option("state_b", file_b, "JSON state file")->required();
  dist->add_option("--metric", metric, "tq|w|wp:<p>|fs|fidelity|infid|bures|angle|trace")->capture_default_str();
  dist->add_option("--geometry", cost.geometry, "simplex, line or a CSV distance file")->capture_default_str();
  dist->add_option("--cost-power", cost.power, "raise the cost matrix to this power")->capture_default_str();
  dist->add_flag("--verify", verify, "cross-check qubit results with the SDP");

  auto* couple = app.add_subcommand("couple", "optimal coupling with a duality certificate");
  couple->add_option("state_a", file_a, "JSON state file")->required();
  couple->add_option("state_b", file_b, "JSON state file")->required();
  couple->add_option("--geometry", cost.geometry, "simplex, line or a CSV distance file")->capture_default_str();
  couple->add_option("--cost-power", cost.power, "raise the cost matrix to this power")->capture_default_str();
  couple->add_option("--out", out_path, "output file (default stdout)");

  int steps = 101;
  auto* fig2 = app.add_subcommand("sweep-fig2", "distances along a path from a mixed state to |+>");
  fig2->add_option("--steps", steps)->capture_default_str();
  fig2->add_option("--out", out_path, "output file (default stdout)");

  double r = 0.3;
  int t_grid = 21, alpha_grid = 11;
  auto* fig4 = app.add_subcommand("sweep-fig4", "distance between diagonal qubits under cost dephasing");
  fig4->add_option("--r", r)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  fig4->add_option("--t-grid", t_grid, "points in t across [0, 1]")->capture_default_str();
  fig4->add_option("--alpha-grid", alpha_grid, "points in alpha across [0, 1]")->capture_default_str();
  fig4->add_option("--out", out_path, "output file (default stdout)");

  lab::ScanConfig config;
  std::string name, measure = "hilbert-schmidt", csv_path;
  auto* scan = app.add_subcommand("scan", "Monte-Carlo inequality scan");
  scan->add_option("name", name, "triangle|bounds|supermult|decoherence")
      ->required()
      ->check(CLI::IsMember({"triangle", "bounds", "supermult", "decoherence"}));
  scan->add_option("--dim", config.dim)->capture_default_str();
  scan->add_option("--p", config.order, "cost power")->capture_default_str();
  scan->add_option("--exponent", config.exponent, "distance = T^exponent (default 1/p)");
  scan->add_option("--geometry", config.geometry)->capture_default_str();
  scan->add_option("--samples", config.samples)->capture_default_str();
  scan->add_option("--seed", config.seed)->capture_default_str();
  scan->add_option("--threads", config.threads, "worker threads (0: all cores; QOT_THREADS overrides)");
  scan->add_option("--measure", measure, "hilbert-schmidt|pure")->capture_default_str();
  scan->add_option("--tolerance", config.tolerance, "admitted negative slack");
  scan->add_flag("--expect-violation", config.expect_violation, "report inconclusive rather than passed");
  scan->add_flag("!--no-minimize", config.minimize, "keep the raw witness only");
  scan->add_option("--out", out_path, "JSON report file (default stdout)");
  scan->add_option("--csv", csv_path, "also write a one-row CSV summary");

  std::string report_path;
  auto* replay = app.add_subcommand("replay", "recompute the slack of a stored triangle witness");
  replay->add_option("report", report_path, "JSON scan report")->required();

  auto* discrepancy = app.add_subcommand("discrepancy", "competing qubit closed forms against the SDP");
  discrepancy->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*dist) {
      std::cout << cmd_dist(io::load_state(file_a), io::load_state(file_b), metric, cost, verify).dump() << '\n';
    } else if (*couple) {
      write(out_path, cmd_couple(io::load_state(file_a), io::load_state(file_b), cost).dump(2) + "\n");
    } else if (*fig2) {
      std::ostringstream os;
      cmd_sweep_fig2(steps, os);
      write(out_path, os.str());
    } else if (*fig4) {
      std::ostringstream os;
      cmd_sweep_fig4(r, t_grid, alpha_grid, os);
      write(out_path, os.str());
    } else if (*scan) {
      config.measure = lab::measure_from_string(measure);
      config.threads = lab::thread_count(config.threads);
      lab::ScanReport report;
      if (name == "triangle") report = lab::scan_triangle(config);
      if (name == "bounds") report = lab::scan_bounds(config);
      if (name == "supermult") report = lab::scan_supermult(config);
      if (name == "decoherence") report = lab::scan_decoherence(config);
      write(out_path, lab::to_json(report).dump() + "\n");
      if (!csv_path.empty()) write(csv_path, lab::csv_header() + "\n" + lab::csv_row(report) + "\n");
      return scan_exit(report.status);
    } else if (*replay) {
      std::ifstream in(report_path);
      if (!in) throw Error(ErrorKind::Parse, "cannot open " + report_path);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::exception& e) {
        throw Error(ErrorKind::Parse, e.what());
      }
      const lab::ScanReport report = lab::report_from_json(j);
      if (report.name != "triangle" || !report.witness) throw Error(ErrorKind::InvalidArgument, "no triangle witness");
      const double again = lab::triangle_slack(report.witness->states, report.config);
      const bool match = std::abs(again - report.witness->slack) <= 1e-12;
      std::cout << Json{{"stored_slack", report.witness->slack}, {"replayed_slack", again}, {"match", match}}.dump()
                << '\n';
      return match ? 0 : 1;
    } else if (*discrepancy) {
      const Json j = lab::discrepancy_report();
      write(out_path, j.dump(2) + "\n");
      return j.at("ok").get<bool>() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "qot: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}
