// transport.hpp - ground costs, marginals, entropic OT solver, exact oracle.
#pragma once

#include <cstddef>
#include <vector>

namespace otmatch {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Probability weights over one side's points. Construction validates
// nonnegativity and that the weights sum to 1 within 1e-9.
struct Marginal {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  void validate() const;  // throws std::invalid_argument
};

Marginal uniform_marginal(std::size_t n);

enum class MarginalSide { Source, Target };

// Weight_i proportional to 1/d_i where d_i is the row (source side) or column
// (target side) minimum of the cost matrix. Zero minima (exact matches) are
// clamped to 1e-6 before inversion so they get large, finite weight.
Marginal inverse_min_distance_marginal(const Matrix& cost, MarginalSide side);

// Pairwise Euclidean distances; entry (i,j) = |x_i - y_j|_2. All vectors must
// share one dimension and both lists must be nonempty.
Matrix euclidean_cost(const std::vector<std::vector<double>>& xs,
                      const std::vector<std::vector<double>>& ys);

// Rows/columns belonging to degenerate (all-out-of-vocabulary) embeddings get
// a fixed penalty: the 99th-percentile entry among costs whose endpoints are
// both honest. Keeps degenerate elements losable without distorting the
// geometry the solver sees.
void penalize_degenerate(Matrix& cost, const std::vector<bool>& degenerate_rows,
                         const std::vector<bool>& degenerate_cols);

struct Coupling {
  Matrix plan;                // n x m, nonnegative
  double wd = 0.0;            // <C, plan>
  int iterations_used = 0;
  bool converged = false;
};

struct SinkhornOptions {
  double epsilon = 0.0;  // <= 0 selects 0.01 * mean(C)
  int max_iter = 2000;
  double tol = 1e-6;  // L-inf marginal violation at the stopping test
};

// Entropically regularized OT in the log domain (max-shifted log-sum-exp
// scaling updates). The returned plan is rounded onto the feasible polytope
// (row/column rescale plus a rank-one correction), which perturbs a converged
// plan by no more than its residual marginal gap and makes the reported wd
// the cost of an actual feasible plan. converged=false flags an exhausted
// iteration budget; the rounded partial result is still returned. Throws
// SolveError if the potentials leave the finite range.
Coupling sinkhorn(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                  const SinkhornOptions& opts = {});

// Unregularized optimum, used as the test oracle. Uniform equal-size problems
// go through linear assignment; everything else through the transportation
// simplex. Guarded to rows*cols <= 10000.
Coupling exact_ot(const Matrix& cost, const Marginal& mu, const Marginal& nu);

// <C, T> = sum_ij C[i,j] * T[i,j]; dimension mismatch throws.
double wasserstein_distance(const Matrix& cost, const Coupling& coupling);

// Largest row-sum / column-sum deviation of a plan from its marginals.
double marginal_violation(const Matrix& plan, const Marginal& mu,
                          const Marginal& nu);

namespace detail {
// Exposed for the oracle cross-checks in tests.
Coupling transport_simplex(const Matrix& cost, const Marginal& mu,
                           const Marginal& nu);
// Min-cost assignment (square matrix); returns the column for each row.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost);
}  // namespace detail

}  // namespace otmatch
