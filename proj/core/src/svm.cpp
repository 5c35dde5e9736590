#include "dyadic/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "dyadic/error.hpp"

namespace dyadic {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sign_of(int label) noexcept { return label == 1 ? 1.0 : -1.0; }

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<RowMajor> view(Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

void check_labels(std::span<const int> labels) {
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidParams, "labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw Error(ErrorCode::SingleClassInput, "SVM training needs both classes present");
  }
}

struct Violation {
  double gap = -kInf;
  std::size_t i = 0;
  std::size_t j = 0;
  bool found = false;
};

bool in_up(double y, double a, double c) noexcept { return y > 0 ? a < c : a > 0.0; }
bool in_low(double y, double a, double c) noexcept { return y > 0 ? a > 0.0 : a < c; }

// Second-order working-set selection: i maximises -y G over I_up, j
// minimises the predicted objective change over I_low.
Violation select_pair(const Matrix& k, std::span<const double> ys, std::span<const double> upper,
                      std::span<const double> alpha, std::span<const double> grad) {
  const std::size_t n = alpha.size();
  Violation v;
  double m_up = -kInf;
  std::size_t i = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (in_up(ys[t], alpha[t], upper[t])) {
      const double val = -ys[t] * grad[t];
      if (val > m_up) {
        m_up = val;
        i = t;
      }
    }
  }
  if (i == n) return v;

  double m_low = kInf;
  double best = kInf;
  std::size_t j = n;
  const double kii = k(i, i);
  for (std::size_t t = 0; t < n; ++t) {
    if (!in_low(ys[t], alpha[t], upper[t])) continue;
    const double val = -ys[t] * grad[t];
    m_low = std::min(m_low, val);
    const double b = m_up - val;
    if (b > 0.0) {
      double a = kii + k(t, t) - 2.0 * k(i, t);
      if (a <= 0.0) a = kTau;
      const double obj = -(b * b) / a;
      if (obj <= best) {
        best = obj;
        j = t;
      }
    }
  }
  if (m_low == kInf) return v;
  v.gap = m_up - m_low;
  v.i = i;
  v.j = j;
  v.found = j != n;
  return v;
}

// Recomputes G = Qa - e from scratch.
void refresh_gradient(const Matrix& k, std::span<const double> ys, std::span<const double> alpha,
                      std::span<double> grad) {
  const std::size_t n = alpha.size();
  std::fill(grad.begin(), grad.end(), -1.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] == 0.0) continue;
    const double aj = alpha[j] * ys[j];
    for (std::size_t t = 0; t < n; ++t) grad[t] += ys[t] * k(t, j) * aj;
  }
}

double compute_bias(std::span<const double> ys, std::span<const double> upper,
                    std::span<const double> alpha, std::span<const double> grad) {
  double ub = kInf;
  double lb = -kInf;
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    const double yg = ys[t] * grad[t];
    if (alpha[t] >= upper[t]) {
      if (ys[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (ys[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;
  return -rho;
}

}  // namespace

double Kernel::operator()(std::span<const double> u, std::span<const double> v) const noexcept {
  if (type == KernelType::Linear) return dot(u, v);
  return std::exp(-gamma * squared_distance(u, v));
}

std::vector<double> box_bounds(std::span<const int> labels, double c, const ClassWeights& weights) {
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = c * weights[labels[i]];
  return out;
}

double dual_objective(const Matrix& kernel, std::span<const int> labels,
                      std::span<const double> alpha) {
  const std::size_t n = alpha.size();
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    lin += alpha[i];
    const double yi = sign_of(labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      quad += alpha[i] * alpha[j] * yi * sign_of(labels[j]) * kernel(i, j);
    }
  }
  return 0.5 * quad - lin;
}

double kkt_violation(const Matrix& kernel, std::span<const int> labels,
                     std::span<const double> upper, std::span<const double> alpha) {
  const std::size_t n = alpha.size();
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = sign_of(labels[i]);
  std::vector<double> grad(n);
  refresh_gradient(kernel, ys, alpha, grad);
  double m_up = -kInf;
  double m_low = kInf;
  for (std::size_t t = 0; t < n; ++t) {
    const double val = -ys[t] * grad[t];
    if (in_up(ys[t], alpha[t], upper[t])) m_up = std::max(m_up, val);
    if (in_low(ys[t], alpha[t], upper[t])) m_low = std::min(m_low, val);
  }
  if (m_up == -kInf || m_low == kInf) return 0.0;
  return m_up - m_low;
}

DualSolution solve_svm_dual(const Matrix& kernel, std::span<const int> labels,
                            std::span<const double> upper, const SvmOptions& options) {
  const std::size_t n = labels.size();
  if (kernel.rows() != n || kernel.cols() != n || upper.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "kernel matrix, labels and bounds disagree in size");
  }
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tol must be positive");
  check_labels(labels);
  for (double u : upper) {
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw Error(ErrorCode::InvalidParams, "box bounds must be positive and finite");
    }
  }

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = sign_of(labels[i]);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  DualSolution sol;
  // Incremental gradient updates drift; a converged-looking state is
  // re-verified against a freshly computed gradient before returning.
  constexpr int kMaxRefreshes = 4;
  int refreshes = 0;
  double gap = kInf;
  while (true) {
    const Violation v = select_pair(kernel, ys, upper, alpha, grad);
    gap = v.found ? v.gap : std::max(v.gap, 0.0);
    if (!v.found || v.gap <= options.tol) {
      refresh_gradient(kernel, ys, alpha, grad);
      const Violation check = select_pair(kernel, ys, upper, alpha, grad);
      if (!check.found || check.gap <= options.tol) {
        gap = check.found ? check.gap : std::max(check.gap, 0.0);
        break;
      }
      if (++refreshes > kMaxRefreshes) {
        throw NonConvergenceError("SVM solver stalled with KKT gap " + std::to_string(check.gap),
                                  check.gap);
      }
      continue;
    }
    if (sol.iterations >= options.max_iterations) {
      throw NonConvergenceError("SVM solver hit the iteration cap (" +
                                    std::to_string(options.max_iterations) +
                                    ") with KKT gap " + std::to_string(v.gap),
                                v.gap);
    }
    ++sol.iterations;

    const std::size_t i = v.i;
    const std::size_t j = v.j;
    const double ci = upper[i];
    const double cj = upper[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double kij = kernel(i, j);

    if (ys[i] != ys[j]) {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = (alpha[i] - old_ai) * ys[i];
    const double daj = (alpha[j] - old_aj) * ys[j];
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += ys[t] * (kernel(t, i) * dai + kernel(t, j) * daj);
    }
  }

  sol.kkt_gap = gap;
  sol.bias = compute_bias(ys, upper, alpha, grad);
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
  sol.objective = 0.5 * obj;
  sol.alpha = std::move(alpha);
  return sol;
}

// Both builders go through the blocked inner-product matrix; RBF entries are
// then exp(-gamma * (|u|^2 + |v|^2 - 2<u,v>)), clamped at zero distance.
Matrix kernel_matrix(const Matrix& x, const Kernel& kernel) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  auto out = view(k);
  out.setZero();
  out.selfadjointView<Eigen::Lower>().rankUpdate(view(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) k(j, i) = k(i, j);
  }
  if (kernel.type == KernelType::Rbf) {
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = k(i, i);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double v = std::exp(-kernel.gamma * std::max(0.0, norms[i] + norms[j] - 2.0 * k(i, j)));
        k(i, j) = v;
        k(j, i) = v;
      }
      k(i, i) = 1.0;
    }
  }
  return k;
}

Matrix cross_kernel_matrix(const Matrix& eval, const Matrix& train, const Kernel& kernel) {
  Matrix k(eval.rows(), train.rows());
  view(k).noalias() = view(eval) * view(train).transpose();
  if (kernel.type == KernelType::Rbf) {
    std::vector<double> train_norms(train.rows());
    for (std::size_t j = 0; j < train.rows(); ++j) train_norms[j] = dot(train.row(j), train.row(j));
    for (std::size_t i = 0; i < eval.rows(); ++i) {
      const double ni = dot(eval.row(i), eval.row(i));
      for (std::size_t j = 0; j < train.rows(); ++j) {
        k(i, j) = std::exp(-kernel.gamma * std::max(0.0, ni + train_norms[j] - 2.0 * k(i, j)));
      }
    }
  }
  return k;
}

std::vector<double> decision_values(const DualSolution& sol, std::span<const int> train_labels,
                                    const Matrix& cross_kernel) {
  std::vector<double> out(cross_kernel.rows(), sol.bias);
  for (std::size_t r = 0; r < cross_kernel.rows(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < sol.alpha.size(); ++j) {
      if (sol.alpha[j] != 0.0) s += sol.alpha[j] * sign_of(train_labels[j]) * cross_kernel(r, j);
    }
    out[r] += s;
  }
  return out;
}

SvmModel train_svm(const Matrix& x, std::span<const int> y, const Kernel& kernel, double c,
                   const ClassWeights& weights, const SvmOptions& options) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design matrix has " + std::to_string(x.rows()) +
                                                  " rows but " + std::to_string(y.size()) +
                                                  " labels");
  }
  if (x.rows() < 2) throw Error(ErrorCode::InvalidParams, "SVM training needs at least 2 samples");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidParams, "C must be positive");
  if (kernel.type == KernelType::Rbf && !(kernel.gamma > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "RBF gamma must be positive");
  }
  check_class_weights(weights);
  check_labels(y);

  const Matrix k = kernel_matrix(x, kernel);
  const auto upper = box_bounds(y, c, weights);
  const DualSolution sol = solve_svm_dual(k, y, upper, options);

  SvmModel model;
  model.kernel = kernel;
  model.c = c;
  model.weights = weights;
  model.bias = sol.bias;
  model.objective = sol.objective;
  model.kkt_gap = sol.kkt_gap;
  model.iterations = sol.iterations;

  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha[i] > 0.0) sv.push_back(i);
  }
  model.support_vectors = x.select_rows(sv);
  model.coefficients.reserve(sv.size());
  for (std::size_t i : sv) model.coefficients.push_back(sol.alpha[i] * sign_of(y[i]));
  return model;
}

double decision_function(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "SVM expects " + std::to_string(model.dim()) +
                                                  " features, got " + std::to_string(x.size()));
  }
  double s = model.bias;
  for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
    s += model.coefficients[i] * model.kernel(model.support_vectors.row(i), x);
  }
  return s;
}

int predict(const SvmModel& model, std::span<const double> x) {
  return decision_to_label(decision_function(model, x));
}

}  // namespace dyadic
