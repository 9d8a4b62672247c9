// Exact optimal transport: linear assignment for uniform equal-size problems,
// transportation simplex (u/v potentials + cycle pivots) for the general case.
// Lives behind a size guard; this is the oracle the entropic solver is tested
// against, not the production path.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "otmatch/error.hpp"
#include "otmatch/kernels.hpp"
#include "otmatch/transport.hpp"

namespace otmatch {

namespace detail {

// Jonker-Volgenant style shortest augmenting path assignment, O(n^3).
std::vector<std::size_t> min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() == 0) {
    throw std::invalid_argument("min_cost_assignment: square nonempty matrix required");
  }
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials and matching, column 0 is the virtual root
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

struct BasicCell {
  std::size_t i, j;
  double mass;
};

// Solve u_i + v_j = c_ij over the basis tree (u[0] anchored at 0).
void solve_potentials(const std::vector<BasicCell>& basis, std::size_t n,
                      std::size_t m, const Matrix& cost, std::vector<double>& u,
                      std::vector<double>& v) {
  u.assign(n, 0.0);
  v.assign(m, 0.0);
  std::vector<bool> u_known(n, false), v_known(m, false);
  std::vector<std::vector<std::size_t>> row_cells(n), col_cells(m);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    row_cells[basis[k].i].push_back(k);
    col_cells[basis[k].j].push_back(k);
  }

  std::queue<std::pair<bool, std::size_t>> frontier;  // (is_row, index)
  u_known[0] = true;
  frontier.emplace(true, 0);
  while (!frontier.empty()) {
    auto [is_row, idx] = frontier.front();
    frontier.pop();
    const auto& cells = is_row ? row_cells[idx] : col_cells[idx];
    for (std::size_t k : cells) {
      const BasicCell& c = basis[k];
      if (is_row && !v_known[c.j]) {
        v[c.j] = cost(c.i, c.j) - u[c.i];
        v_known[c.j] = true;
        frontier.emplace(false, c.j);
      } else if (!is_row && !u_known[c.i]) {
        u[c.i] = cost(c.i, c.j) - v[c.j];
        u_known[c.i] = true;
        frontier.emplace(true, c.i);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!u_known[i]) throw SolveError("transport_simplex: basis tree is disconnected");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!v_known[j]) throw SolveError("transport_simplex: basis tree is disconnected");
  }
}

// Alternating row/column path through the basis from row `si` to column `sj`.
// Returns basis-cell indices; the entering cell closes the cycle.
std::vector<std::size_t> find_cycle_path(const std::vector<BasicCell>& basis,
                                         std::size_t n, std::size_t m,
                                         std::size_t si, std::size_t sj) {
  // nodes: rows [0,n), columns [n, n+m)
  const std::size_t total = n + m;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(total);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const std::size_t r = basis[k].i;
    const std::size_t c = n + basis[k].j;
    adj[r].emplace_back(c, k);
    adj[c].emplace_back(r, k);
  }
  std::vector<std::size_t> parent_node(total, total), parent_edge(total, basis.size());
  std::vector<bool> seen(total, false);
  std::queue<std::size_t> q;
  seen[si] = true;
  q.push(si);
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    if (x == n + sj) break;
    for (auto [y, e] : adj[x]) {
      if (seen[y]) continue;
      seen[y] = true;
      parent_node[y] = x;
      parent_edge[y] = e;
      q.push(y);
    }
  }
  if (!seen[n + sj]) throw SolveError("transport_simplex: entering cell closes no cycle");

  std::vector<std::size_t> path;
  for (std::size_t x = n + sj; x != si; x = parent_node[x]) path.push_back(parent_edge[x]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Coupling transport_simplex(const Matrix& cost, const Marginal& mu,
                           const Marginal& nu) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();

  // north-west corner initial basic feasible solution: exactly n+m-1 cells,
  // zero-mass cells kept for degenerate steps
  std::vector<BasicCell> basis;
  basis.reserve(n + m - 1);
  {
    std::size_t i = 0, j = 0;
    double sa = mu.weights[0], sb = nu.weights[0];
    while (true) {
      const double t = std::min(sa, sb);
      basis.push_back(BasicCell{i, j, std::max(t, 0.0)});
      sa -= t;
      sb -= t;
      if (i == n - 1 && j == m - 1) {
        // absorb the floating-point residue of the two marginal sums
        basis.back().mass = std::max({sa + t, sb + t, 0.0});
        break;
      }
      if (i == n - 1) {
        ++j;
        sb = nu.weights[j];
      } else if (j == m - 1) {
        ++i;
        sa = mu.weights[i];
      } else if (sa <= sb) {
        ++i;
        sa = mu.weights[i];
      } else {
        ++j;
        sb = nu.weights[j];
      }
    }
  }

  double cost_scale = 0.0;
  for (std::size_t k = 0; k < cost.size(); ++k) {
    cost_scale = std::max(cost_scale, std::abs(cost.data()[k]));
  }
  const double tol = 1e-10 * (1.0 + cost_scale);

  std::vector<double> u, v;
  const long max_pivots = 64L * static_cast<long>(n + m) * static_cast<long>(std::max(n, m)) + 256;
  long pivots = 0;

  while (true) {
    solve_potentials(basis, n, m, cost, u, v);

    // entering cell: most negative reduced cost, lexicographic tie-break
    double best = -tol;
    std::size_t bi = n, bj = m;
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = u[i];
      const double* crow = cost.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const double r = crow[j] - ui - v[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) break;  // optimal

    if (++pivots > max_pivots) {
      throw SolveError("transport_simplex: pivot limit reached (" +
                       std::to_string(max_pivots) + ")");
    }

    // cells alternate -,+,-,... along the path; entering cell takes +theta
    const std::vector<std::size_t> path = find_cycle_path(basis, n, m, bi, bj);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = basis.size();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      if (basis[path[p]].mass < theta) {
        theta = basis[path[p]].mass;
        leaving = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      basis[path[p]].mass += (p % 2 == 0) ? -theta : theta;
    }
    basis[leaving] = BasicCell{bi, bj, theta};
  }

  Coupling out;
  out.plan = Matrix(n, m);
  for (const BasicCell& c : basis) out.plan(c.i, c.j) += std::max(c.mass, 0.0);
  out.wd = kernels::dot(cost.data(), out.plan.data(), cost.size());
  out.iterations_used = static_cast<int>(pivots);
  out.converged = true;
  return out;
}

}  // namespace detail

namespace {

bool is_uniform(const Marginal& w) {
  const double expect = 1.0 / static_cast<double>(w.size());
  for (double x : w.weights) {
    if (std::abs(x - expect) > 1e-12) return false;
  }
  return true;
}

void check_exact_inputs(const Matrix& cost, const Marginal& mu, const Marginal& nu) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw std::invalid_argument("exact_ot: empty cost matrix");
  }
  if (mu.size() != cost.rows() || nu.size() != cost.cols()) {
    throw std::invalid_argument("exact_ot: marginal sizes do not match the cost matrix");
  }
  mu.validate();
  nu.validate();
  if (cost.size() > 10000) {
    throw SolveError("exact_ot: size guard exceeded (rows*cols = " +
                     std::to_string(cost.size()) + " > 10000)");
  }
  for (std::size_t k = 0; k < cost.size(); ++k) {
    const double v = cost.data()[k];
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("exact_ot: cost entries must be finite and >= 0");
    }
  }
}

}  // namespace

Coupling exact_ot(const Matrix& cost, const Marginal& mu, const Marginal& nu) {
  check_exact_inputs(cost, mu, nu);
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();

  if (n == m && is_uniform(mu) && is_uniform(nu)) {
    const std::vector<std::size_t> assignment = detail::min_cost_assignment(cost);
    Coupling out;
    out.plan = Matrix(n, n);
    const double mass = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.plan(i, assignment[i]) = mass;
      total += cost(i, assignment[i]);
    }
    out.wd = total * mass;
    out.converged = true;
    return out;
  }
  return detail::transport_simplex(cost, mu, nu);
}

}  // namespace otmatch
