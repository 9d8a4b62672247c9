#include "otmatch/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "otmatch/error.hpp"
#include "otmatch/kernels.hpp"
#include "otmatch/parallel.hpp"

namespace otmatch {

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

void Marginal::validate() const {
  if (weights.empty()) throw std::invalid_argument("marginal: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("marginal: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("marginal: weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
}

Marginal uniform_marginal(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_marginal: n must be positive");
  return Marginal{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Marginal inverse_min_distance_marginal(const Matrix& cost, MarginalSide side) {
  const std::size_t n = side == MarginalSide::Source ? cost.rows() : cost.cols();
  if (n == 0 || cost.size() == 0) {
    throw std::invalid_argument("inverse_min_distance_marginal: empty cost matrix");
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::numeric_limits<double>::infinity();
    if (side == MarginalSide::Source) {
      for (std::size_t j = 0; j < cost.cols(); ++j) d = std::min(d, cost(i, j));
    } else {
      for (std::size_t r = 0; r < cost.rows(); ++r) d = std::min(d, cost(r, i));
    }
    w[i] = 1.0 / std::max(d, 1e-6);
  }
  const double total = kernels::sum(w.data(), n);
  for (double& x : w) x /= total;
  return Marginal{std::move(w)};
}

Matrix euclidean_cost(const std::vector<std::vector<double>>& xs,
                      const std::vector<std::vector<double>>& ys) {
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("euclidean_cost: empty point list");
  }
  const std::size_t d = xs.front().size();
  for (const auto& v : xs) {
    if (v.size() != d) throw std::invalid_argument("euclidean_cost: dimension mismatch");
  }
  for (const auto& v : ys) {
    if (v.size() != d) throw std::invalid_argument("euclidean_cost: dimension mismatch");
  }
  Matrix c(xs.size(), ys.size());
  parallel_for(0, xs.size(), [&](std::size_t i) {
    const double* xi = xs[i].data();
    double* row = c.row(i);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      row[j] = std::sqrt(kernels::l2_sq(xi, ys[j].data(), d));
    }
  });
  return c;
}

void penalize_degenerate(Matrix& cost, const std::vector<bool>& degenerate_rows,
                         const std::vector<bool>& degenerate_cols) {
  if (degenerate_rows.size() != cost.rows() || degenerate_cols.size() != cost.cols()) {
    throw std::invalid_argument("penalize_degenerate: mask size mismatch");
  }
  std::vector<double> honest;
  honest.reserve(cost.size());
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    if (degenerate_rows[i]) continue;
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (!degenerate_cols[j]) honest.push_back(cost(i, j));
    }
  }
  double penalty = 1.0;
  if (!honest.empty()) {
    // nearest-rank 99th percentile
    std::sort(honest.begin(), honest.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(honest.size())));
    penalty = honest[std::min(honest.size(), std::max<std::size_t>(rank, 1)) - 1];
  }
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (degenerate_rows[i] || degenerate_cols[j]) cost(i, j) = penalty;
    }
  }
}

namespace {

// Project a near-feasible plan onto the transport polytope: scale overweight
// rows, then overweight columns, then spread the leftover mass as a rank-one
// correction. Moves the plan by at most twice its marginal gap in L1, so a
// converged plan is essentially untouched; the output satisfies both
// marginals to floating-point accuracy.
void round_to_feasible(Matrix& plan, const Marginal& mu, const Marginal& nu) {
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  std::vector<double> row_sums(n, 0.0), col_sums(m, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    row_sums[i] = kernels::sum(plan.row(i), m);
    if (row_sums[i] > mu.weights[i]) {
      const double scale = mu.weights[i] / row_sums[i];
      double* row = plan.row(i);
      for (std::size_t j = 0; j < m; ++j) row[j] *= scale;
      row_sums[i] = mu.weights[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = plan.row(i);
    for (std::size_t j = 0; j < m; ++j) col_sums[j] += row[j];
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (col_sums[j] > nu.weights[j]) {
      const double scale = nu.weights[j] / col_sums[j];
      for (std::size_t i = 0; i < n; ++i) plan(i, j) *= scale;
    }
  }

  std::fill(row_sums.begin(), row_sums.end(), 0.0);
  std::fill(col_sums.begin(), col_sums.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = plan.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      row_sums[i] += row[j];
      col_sums[j] += row[j];
    }
  }
  double missing = 0.0;
  std::vector<double> err_r(n), err_c(m);
  for (std::size_t i = 0; i < n; ++i) {
    err_r[i] = std::max(mu.weights[i] - row_sums[i], 0.0);
    missing += err_r[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    err_c[j] = std::max(nu.weights[j] - col_sums[j], 0.0);
  }
  if (missing <= 0.0) return;
  const double inv = 1.0 / missing;
  for (std::size_t i = 0; i < n; ++i) {
    if (err_r[i] == 0.0) continue;
    double* row = plan.row(i);
    for (std::size_t j = 0; j < m; ++j) row[j] += err_r[i] * err_c[j] * inv;
  }
}

void check_problem(const Matrix& cost, const Marginal& mu, const Marginal& nu) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw std::invalid_argument("transport: empty cost matrix");
  }
  if (mu.size() != cost.rows() || nu.size() != cost.cols()) {
    throw std::invalid_argument("transport: marginal sizes do not match the cost matrix");
  }
  mu.validate();
  nu.validate();
  for (std::size_t i = 0; i < cost.size(); ++i) {
    const double v = cost.data()[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("transport: cost entries must be finite and >= 0");
    }
  }
}

}  // namespace

Coupling sinkhorn(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                  const SinkhornOptions& opts) {
  check_problem(cost, mu, nu);
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();

  double eps = opts.epsilon;
  if (eps <= 0.0) {
    const double mean = kernels::sum(cost.data(), cost.size()) /
                        static_cast<double>(cost.size());
    eps = 0.01 * mean;
    if (eps <= 0.0) eps = 1e-6;  // all-zero cost
  }
  const double inv_eps = 1.0 / eps;

  for (double w : mu.weights) {
    if (w <= 0.0) throw std::invalid_argument("sinkhorn: marginal weights must be positive");
  }
  for (double w : nu.weights) {
    if (w <= 0.0) throw std::invalid_argument("sinkhorn: marginal weights must be positive");
  }

  const Matrix cost_t = cost.transposed();
  std::vector<double> log_mu(n), log_nu(m);
  for (std::size_t i = 0; i < n; ++i) log_mu[i] = std::log(mu.weights[i]);
  for (std::size_t j = 0; j < m; ++j) log_nu[j] = std::log(nu.weights[j]);

  std::vector<double> f(n, 0.0), g(m, 0.0);
  std::vector<double> scratch(std::max(n, m));

  Coupling out;
  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    // f_i <- eps log mu_i - eps lse_j((g_j - C_ij)/eps)
    for (std::size_t i = 0; i < n; ++i) {
      kernels::sub_scale(scratch.data(), g.data(), cost.row(i), inv_eps, m);
      f[i] = eps * (log_mu[i] - kernels::logsumexp(scratch.data(), m));
    }
    // g_j <- eps log nu_j - eps lse_i((f_i - C_ij)/eps)
    for (std::size_t j = 0; j < m; ++j) {
      kernels::sub_scale(scratch.data(), f.data(), cost_t.row(j), inv_eps, n);
      g[j] = eps * (log_nu[j] - kernels::logsumexp(scratch.data(), n));
    }
    if (!std::isfinite(f[0]) || !std::isfinite(g[0])) {
      throw SolveError("sinkhorn: non-finite potential at iteration " +
                       std::to_string(it));
    }

    // rows drift after the g update; columns are exact by construction
    double row_violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      kernels::sub_scale(scratch.data(), g.data(), cost.row(i), inv_eps, m);
      const double row_sum =
          std::exp(f[i] * inv_eps + kernels::logsumexp(scratch.data(), m));
      row_violation = std::max(row_violation, std::abs(row_sum - mu.weights[i]));
    }
    if (row_violation <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations_used = std::min(it, opts.max_iter);

  out.plan = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.plan.row(i);
    const double* crow = cost.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = std::exp((f[i] + g[j] - crow[j]) * inv_eps);
    }
  }
  for (std::size_t k = 0; k < out.plan.size(); ++k) {
    if (!std::isfinite(out.plan.data()[k])) {
      throw SolveError("sinkhorn: non-finite plan entry after " +
                       std::to_string(out.iterations_used) + " iterations");
    }
  }
  round_to_feasible(out.plan, mu, nu);
  out.wd = kernels::dot(cost.data(), out.plan.data(), cost.size());
  return out;
}

double wasserstein_distance(const Matrix& cost, const Coupling& coupling) {
  if (cost.rows() != coupling.plan.rows() || cost.cols() != coupling.plan.cols()) {
    throw std::invalid_argument("wasserstein_distance: dimension mismatch");
  }
  return kernels::dot(cost.data(), coupling.plan.data(), cost.size());
}

double marginal_violation(const Matrix& plan, const Marginal& mu,
                          const Marginal& nu) {
  if (plan.rows() != mu.size() || plan.cols() != nu.size()) {
    throw std::invalid_argument("marginal_violation: dimension mismatch");
  }
  double v = 0.0;
  std::vector<double> col_sums(plan.cols(), 0.0);
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    const double* row = plan.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      row_sum += row[j];
      col_sums[j] += row[j];
    }
    v = std::max(v, std::abs(row_sum - mu.weights[i]));
  }
  for (std::size_t j = 0; j < plan.cols(); ++j) {
    v = std::max(v, std::abs(col_sums[j] - nu.weights[j]));
  }
  return v;
}

}  // namespace otmatch
