#include "qot/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "qot/error.hpp"
#include "qot/qubit.hpp"
#include "qot/states.hpp"
#include "qot/transport.hpp"

namespace qot {

ProbabilityVector::ProbabilityVector(std::vector<double> entries) : p_(std::move(entries)) {
  if (p_.empty()) throw Error(ErrorKind::InvalidArgument, "probability vector is empty");
  for (double& x : p_) {
    if (!std::isfinite(x) || x < -1e-12) throw Error(ErrorKind::InvalidArgument, "negative or non-finite probability");
    x = std::max(0.0, x);
  }
  const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10) throw Error(ErrorKind::NotAState, "probabilities sum to " + std::to_string(total));
}

namespace {

struct Cell {
  int i = 0;
  int j = 0;
};

// Path between row `row` and column `col` in the basis tree, as basic cell
// indices ordered from the column end. Nodes 0..m-1 are rows, m..m+n-1 columns.
std::vector<int> tree_path(const std::vector<Cell>& basis, int m, int n, int row, int col) {
  const int nodes = m + n;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(nodes));
  for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
    const Cell& c = basis[static_cast<std::size_t>(k)];
    adj[static_cast<std::size_t>(c.i)].push_back({m + c.j, k});
    adj[static_cast<std::size_t>(m + c.j)].push_back({c.i, k});
  }
  std::vector<int> via(static_cast<std::size_t>(nodes), -1), prev(static_cast<std::size_t>(nodes), -1);
  std::vector<bool> seen(static_cast<std::size_t>(nodes), false);
  std::queue<int> todo;
  todo.push(m + col);
  seen[static_cast<std::size_t>(m + col)] = true;
  while (!todo.empty()) {
    const int u = todo.front();
    todo.pop();
    if (u == row) break;
    for (auto [v, k] : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      via[static_cast<std::size_t>(v)] = k;
      prev[static_cast<std::size_t>(v)] = u;
      todo.push(v);
    }
  }
  if (!seen[static_cast<std::size_t>(row)]) throw Error(ErrorKind::InvalidArgument, "basis is not a spanning tree");
  std::vector<int> path;
  for (int u = row; u != m + col; u = prev[static_cast<std::size_t>(u)]) path.push_back(via[static_cast<std::size_t>(u)]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TransportPlan transportation_simplex(const std::vector<double>& supply, const std::vector<double>& demand,
                                     const RMatrix& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0 || cost.rows() != m || cost.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "cost must be supply x demand");

  // northwest corner; ties advance the row so the basis has m + n - 1 cells
  std::vector<double> a(supply), b(demand);
  std::vector<Cell> basis;
  std::vector<double> x;
  for (int i = 0, j = 0;;) {
    const double t = std::min(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    basis.push_back({i, j});
    x.push_back(t);
    a[static_cast<std::size_t>(i)] -= t;
    b[static_cast<std::size_t>(j)] -= t;
    if (i == m - 1 && j == n - 1) break;
    if (j == n - 1 || (i < m - 1 && a[static_cast<std::size_t>(i)] <= b[static_cast<std::size_t>(j)])) ++i;
    else ++j;
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  std::vector<int> in_basis(static_cast<std::size_t>(m * n), -1);
  for (int k = 0; k < static_cast<int>(basis.size()); ++k)
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)].i * n + basis[static_cast<std::size_t>(k)].j)] = k;

  TransportPlan out;
  const int cap = 1000 * m * n + 1000;
  for (;; ++out.pivots) {
    if (out.pivots > cap) throw Error(ErrorKind::NoConvergence, "transportation simplex pivot cap reached");
    // potentials u_i + v_j = c_ij on the basis, u_0 = 0
    std::vector<double> u(static_cast<std::size_t>(m), 0.0), v(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> ku(static_cast<std::size_t>(m), false), kv(static_cast<std::size_t>(n), false);
    ku[0] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (const Cell& c : basis) {
        const auto ci = static_cast<std::size_t>(c.i), cj = static_cast<std::size_t>(c.j);
        if (ku[ci] && !kv[cj]) {
          v[cj] = cost(c.i, c.j) - u[ci];
          kv[cj] = changed = true;
        } else if (!ku[ci] && kv[cj]) {
          u[ci] = cost(c.i, c.j) - v[cj];
          ku[ci] = changed = true;
        }
      }
    }

    // Bland: first improving cell in row-major order
    int enter = -1;
    for (int idx = 0; idx < m * n && enter < 0; ++idx) {
      if (in_basis[static_cast<std::size_t>(idx)] >= 0) continue;
      const int i = idx / n, j = idx % n;
      if (cost(i, j) - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)] < -1e-12 * scale) enter = idx;
    }
    if (enter < 0) break;

    const int ei = enter / n, ej = enter % n;
    const std::vector<int> path = tree_path(basis, m, n, ei, ej);
    // path cells alternate -, +, -, ... starting next to the entering column
    double theta = INFINITY;
    int leave = -1;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const int k = path[p];
      const double xk = x[static_cast<std::size_t>(k)];
      const Cell& c = basis[static_cast<std::size_t>(k)];
      const int idx = c.i * n + c.j;
      if (xk < theta || (xk == theta && idx < basis[static_cast<std::size_t>(leave)].i * n + basis[static_cast<std::size_t>(leave)].j)) {
        theta = xk;
        leave = k;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      double& xk = x[static_cast<std::size_t>(path[p])];
      xk = p % 2 == 0 ? std::max(0.0, xk - theta) : xk + theta;
    }
    const Cell old = basis[static_cast<std::size_t>(leave)];
    in_basis[static_cast<std::size_t>(old.i * n + old.j)] = -1;
    basis[static_cast<std::size_t>(leave)] = {ei, ej};
    x[static_cast<std::size_t>(leave)] = theta;
    in_basis[static_cast<std::size_t>(enter)] = leave;
  }

  out.plan = RMatrix::Zero(m, n);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.plan(basis[k].i, basis[k].j) = x[k];
    out.value += cost(basis[k].i, basis[k].j) * x[k];
  }
  return out;
}

double classical_cost(const ProbabilityVector& p, const ProbabilityVector& q, const ClassicalGeometry& g,
                      double order) {
  if (p.dim() != q.dim() || p.dim() != g.size())
    throw Error(ErrorKind::DimensionMismatch, "marginals and geometry must have the same size");
  if (!(order >= 1.0)) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  const RMatrix cost = g.distances().array().pow(order).matrix();
  return transportation_simplex(p.entries(), q.entries(), cost).value;
}

double classical_wasserstein(const ProbabilityVector& p, const ProbabilityVector& q, const ClassicalGeometry& g,
                             double order) {
  return std::pow(std::max(0.0, classical_cost(p, q, g, order)), 1.0 / order);
}

QuantumClassical quantum_vs_classical(const ProbabilityVector& p, const ProbabilityVector& q,
                                      const ClassicalGeometry& g) {
  QuantumClassical out;
  out.tcl = classical_cost(p, q, g, 1.0);
  if (p.dim() == 2) {
    out.tq = g(0, 1) * qubit::commuting_cost(p[0], q[0]);
  } else {
    out.tq = transport_cost(diagonal_state(p.entries()), diagonal_state(q.entries()), quantize_geometry(g).matrix);
  }
  out.ok = out.tq <= out.tcl + 1e-7;
  return out;
}

double classical_w2_commuting(double r, double s) {
  if (!(r >= 0.0 && r <= 1.0 && s >= 0.0 && s <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "r and s must lie in [0, 1]");
  return std::sqrt(std::abs(r - s) / 2.0);
}

}  // namespace qot
