#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dyadic/class_weights.hpp"
#include "dyadic/matrix.hpp"

namespace dyadic {

enum class KernelType { Linear, Rbf };

// k(u, v) = <u, v>  or  exp(-gamma * |u - v|^2).
struct Kernel {
  KernelType type = KernelType::Linear;
  double gamma = 0.0;

  static Kernel linear() noexcept { return {KernelType::Linear, 0.0}; }
  static Kernel rbf(double gamma) noexcept { return {KernelType::Rbf, gamma}; }

  double operator()(std::span<const double> u, std::span<const double> v) const noexcept;

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

struct SvmOptions {
  double tol = 1e-3;                          // maximal KKT violation at exit
  std::size_t max_iterations = 1'000'000;     // pair updates
};

// Solution of the weighted soft-margin dual
//   min  1/2 a'Qa - e'a   s.t.  0 <= a_i <= upper_i,  y'a = 0,
// with Q_ij = y_i y_j K_ij and y in {-1, +1}.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;        // decision(x) = sum_i alpha_i y_i k(x_i, x) + bias
  double objective = 0.0;   // value of the minimised dual objective
  double kkt_gap = 0.0;     // max violating-pair gap at exit
  std::size_t iterations = 0;
};

// Pairwise working-set (SMO) solver with second-order pair selection and no
// shrinking. `kernel` is the full n x n kernel matrix, `labels` are 0/1, and
// `upper` the per-sample box bound C * w(y_i).
// Throws NonConvergenceError (carrying the final gap) when the iteration cap
// is hit before the KKT gap drops to tol.
DualSolution solve_svm_dual(const Matrix& kernel, std::span<const int> labels,
                            std::span<const double> upper, const SvmOptions& options = {});

// 1/2 a'Qa - e'a for an arbitrary feasible `alpha`.
double dual_objective(const Matrix& kernel, std::span<const int> labels,
                      std::span<const double> alpha);

// Largest violation m(a) - M(a) over the index sets I_up / I_low, computed
// from scratch. Zero or negative means KKT holds exactly.
double kkt_violation(const Matrix& kernel, std::span<const int> labels,
                     std::span<const double> upper, std::span<const double> alpha);

// Per-sample box bounds C * w(y_i).
std::vector<double> box_bounds(std::span<const int> labels, double c, const ClassWeights& weights);

Matrix kernel_matrix(const Matrix& x, const Kernel& kernel);
// rows = eval samples, cols = train samples.
Matrix cross_kernel_matrix(const Matrix& eval, const Matrix& train, const Kernel& kernel);

// Decision values for rows of a precomputed eval x train kernel block.
std::vector<double> decision_values(const DualSolution& sol, std::span<const int> train_labels,
                                    const Matrix& cross_kernel);

struct SvmModel {
  Kernel kernel;
  double c = 1.0;
  ClassWeights weights;
  std::vector<double> coefficients;  // alpha_i * y_i, one per support vector
  Matrix support_vectors;
  double bias = 0.0;
  double objective = 0.0;
  double kkt_gap = 0.0;
  std::size_t iterations = 0;

  std::size_t dim() const noexcept { return support_vectors.cols(); }
};

// X is expected to be standardized already. Throws SingleClassInput,
// InvalidParams (non-positive C/tol/gamma), DimensionMismatch, or
// NonConvergenceError.
SvmModel train_svm(const Matrix& x, std::span<const int> y, const Kernel& kernel, double c,
                   const ClassWeights& weights, const SvmOptions& options = {});

// sum_i alpha_i y_i k(x_i, x) + b. Throws DimensionMismatch.
double decision_function(const SvmModel& model, std::span<const double> x);

// Decision value >= 0 maps to class 1, so an exact 0 is positive.
inline int decision_to_label(double value) noexcept { return value >= 0.0 ? 1 : 0; }

int predict(const SvmModel& model, std::span<const double> x);

}  // namespace dyadic
