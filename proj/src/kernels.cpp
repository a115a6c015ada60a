#include "lapreg/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lapreg/error.hpp"

namespace lapreg::kernels {

namespace {

void prepare(const Eigen::VectorXd& lambda, const Eigen::VectorXd& y_coeffs,
             std::span<const double> c, std::span<const double> sigma, GridEvaluation& out) {
  if (lambda.size() != y_coeffs.size())
    throw ValidationError("evaluate_grid: observation and spectrum lengths differ");
  if (c.size() != sigma.size())
    throw ValidationError("evaluate_grid: c and sigma node lists differ in length");
  for (std::size_t k = 0; k < c.size(); ++k)
    if (!(c[k] > 0.0) || !(sigma[k] > 0.0))
      throw ValidationError("evaluate_grid: c and sigma must be positive");
  const auto nodes = static_cast<Eigen::Index>(c.size());
  out.mean.resize(nodes, lambda.size());
  out.var.resize(nodes, lambda.size());
  out.log_marginal.resize(nodes);
}

// One grid node; shared by both execution paths so they cannot drift apart.
void evaluate_node(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& y_coeffs, double c, double sigma, Eigen::Index k,
                   GridEvaluation& out) {
  const double n = static_cast<double>(lambda.size());
  const double log_n = std::log(n);
  const double noise = sigma * sigma / n;
  const Eigen::VectorXd log_mu = log_precision_eigenvalues(spec, lambda, c);
  double log_ml = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double tau2 = std::exp(-(log_mu(i) + log_n));
    const double total = tau2 + noise;
    const double y = y_coeffs(i);
    out.mean(k, i) = y * (tau2 / total);
    out.var(k, i) = tau2 * (noise / total);
    log_ml += -0.5 * (std::log(2.0 * std::numbers::pi * total) + y * y / total);
  }
  out.log_marginal(k) = log_ml;
}

double vertex_variance(const Eigen::MatrixXd& basis, std::span<const double> weights,
                       const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var,
                       Eigen::Index v) {
  double within = 0.0;
  for (Eigen::Index i = 0; i < basis.cols(); ++i)
    within += avg_var(i) * basis(v, i) * basis(v, i);
  double between = 0.0;
  for (Eigen::Index k = 0; k < dev.rows(); ++k) {
    const double shift = dev.row(k).dot(basis.row(v));
    between += weights[static_cast<std::size_t>(k)] * shift * shift;
  }
  return within + between;
}

void check_variance_inputs(const Eigen::MatrixXd& basis, std::span<const double> weights,
                           const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var) {
  if (dev.rows() != static_cast<Eigen::Index>(weights.size()) || dev.cols() != basis.cols() ||
      avg_var.size() != basis.cols())
    throw ValidationError("mixture_pointwise_variance: dimension mismatch");
}

}  // namespace

namespace serial {

void evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                   std::span<const double> sigma, GridEvaluation& out) {
  prepare(lambda, y_coeffs, c, sigma, out);
  for (std::size_t k = 0; k < c.size(); ++k)
    evaluate_node(spec, lambda, y_coeffs, c[k], sigma[k], static_cast<Eigen::Index>(k), out);
}

void mixture_pointwise_variance(const Eigen::MatrixXd& basis, std::span<const double> weights,
                                const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var,
                                Eigen::VectorXd& out) {
  check_variance_inputs(basis, weights, dev, avg_var);
  out.resize(basis.rows());
  for (Eigen::Index v = 0; v < basis.rows(); ++v)
    out(v) = vertex_variance(basis, weights, dev, avg_var, v);
}

}  // namespace serial

namespace omp {

void evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                   std::span<const double> sigma, GridEvaluation& out) {
  prepare(lambda, y_coeffs, c, sigma, out);
  const auto nodes = static_cast<std::ptrdiff_t>(c.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nodes; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    evaluate_node(spec, lambda, y_coeffs, c[idx], sigma[idx], k, out);
  }
}

void mixture_pointwise_variance(const Eigen::MatrixXd& basis, std::span<const double> weights,
                                const Eigen::MatrixXd& dev, const Eigen::VectorXd& avg_var,
                                Eigen::VectorXd& out) {
  check_variance_inputs(basis, weights, dev, avg_var);
  out.resize(basis.rows());
  const auto rows = static_cast<std::ptrdiff_t>(basis.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < rows; ++v)
    out(v) = vertex_variance(basis, weights, dev, avg_var, v);
}

}  // namespace omp

GridEvaluation evaluate_grid(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& y_coeffs, std::span<const double> c,
                             std::span<const double> sigma, Execution exec) {
  GridEvaluation out;
  if (exec == Execution::parallel)
    omp::evaluate_grid(spec, lambda, y_coeffs, c, sigma, out);
  else
    serial::evaluate_grid(spec, lambda, y_coeffs, c, sigma, out);
  return out;
}

Eigen::VectorXd mixture_pointwise_variance(const Eigen::MatrixXd& basis,
                                           std::span<const double> weights,
                                           const Eigen::MatrixXd& dev,
                                           const Eigen::VectorXd& avg_var, Execution exec) {
  Eigen::VectorXd out;
  if (exec == Execution::parallel)
    omp::mixture_pointwise_variance(basis, weights, dev, avg_var, out);
  else
    serial::mixture_pointwise_variance(basis, weights, dev, avg_var, out);
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("LAPREG_NUM_THREADS")) {
    const int requested = std::atoi(env);
    if (requested < 1)
      throw ValidationError(std::string("LAPREG_NUM_THREADS must be a positive integer, got '") +
                            env + "'");
#ifdef _OPENMP
    omp_set_num_threads(requested);
#endif
  }
  return max_threads();
}

}  // namespace lapreg::kernels
