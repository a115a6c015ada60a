#pragma once

// Data-parallel inner loops of the posterior computations. Every kernel has a
// plain serial version, kept as the reference, and an OpenMP version that must
// produce bit-identical output: work items write disjoint slots and no
// floating-point reduction crosses a thread boundary.

#include <span>

#include <Eigen/Dense>

#include "lapreg/priors.hpp"

namespace lapreg {

enum class Execution { serial, parallel };

namespace kernels {

/// Conditional Gaussian posteriors of the spectral coefficients, one row per
/// (c, sigma) grid node.
struct GridEvaluation {
  Eigen::MatrixXd mean;  ///< nodes x n
  Eigen::MatrixXd var;   ///< nodes x n
  Eigen::VectorXd log_marginal;
};

/// Prior coefficient variance tau_i^2 = 1/(n mu_i(c)); observation coefficient
/// y_i with noise variance sigma^2/n. Per node and coefficient:
///   mean = y_i tau^2 / (tau^2 + sigma^2/n), var = tau^2 (sigma^2/n) / (tau^2 + sigma^2/n),
///   log marginal = sum_i log N(y_i; 0, tau_i^2 + sigma^2/n).
/// `c` and `sigma` have one entry per node.
GridEvaluation evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                             std::span<const double> sigma, Execution exec);

/// Var f(v) under a mixture of coefficient Gaussians:
///   sum_i avg_var_i psi_i(v)^2 + sum_k w_k (sum_i dev_{k,i} psi_i(v))^2
/// where dev holds each node's conditional mean minus the mixture mean.
Eigen::VectorXd mixture_pointwise_variance(const Eigen::MatrixXd& basis,
                                           std::span<const double> weights,
                                           const Eigen::MatrixXd& dev,
                                           const Eigen::VectorXd& avg_var, Execution exec);

namespace serial {
void evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                   std::span<const double> sigma, GridEvaluation& out);
void mixture_pointwise_variance(const Eigen::MatrixXd& basis, std::span<const double> weights,
                                const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var,
                                Eigen::VectorXd& out);
}  // namespace serial

namespace omp {
void evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                   std::span<const double> sigma, GridEvaluation& out);
void mixture_pointwise_variance(const Eigen::MatrixXd& basis, std::span<const double> weights,
                                const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var,
                                Eigen::VectorXd& out);
}  // namespace omp

/// Worker count OpenMP will use; 1 when built without OpenMP.
int max_threads();
/// Honors LAPREG_NUM_THREADS if set. Returns the resulting worker count.
int configure_threads_from_env();

}  // namespace kernels
}  // namespace lapreg
