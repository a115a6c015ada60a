#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lapreg/kernels.hpp"
#include "lapreg/priors.hpp"
#include "lapreg/spectral.hpp"

namespace lapreg {

struct KnownSigma {
  double sigma = 1.0;
};

/// sigma unknown, uniform prior density on [a, b].
struct SigmaInterval {
  double a = 0.5;
  double b = 2.0;
};

struct RegressionData {
  Eigen::VectorXd y;
  std::variant<KnownSigma, SigmaInterval> sigma = KnownSigma{};
};

struct ClassificationData {
  /// Each entry 0 or 1.
  Eigen::VectorXd y;
};

/// Posterior of the spectral coefficients f_i given (c, sigma). Independent
/// across i.
struct CoefficientPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  /// Sum over i of log N(y_i; 0, tau_i^2 + sigma^2/n), y_i the observation
  /// coefficients. Differs from the log density of y by a constant.
  double log_marginal = 0.0;
};

CoefficientPosterior regression_posterior_given_c(const Spectrum& s, const PriorSpec& spec,
                                                  double c, double sigma,
                                                  const Eigen::VectorXd& y);

struct GridConfig {
  /// Log-spaced c nodes between the Exp(1) quantiles below.
  std::size_t c_nodes = 64;
  double c_lower_quantile = 0.001;
  double c_upper_quantile = 0.999;
  /// Uniform sigma nodes on [a, b] when sigma is unknown.
  std::size_t sigma_nodes = 32;
  /// Collapse the c grid to this single value (no mixing over c).
  std::optional<double> fixed_c;
  /// Nodes whose normalized weight falls below this are skipped in the
  /// between-node variance term.
  double variance_weight_floor = 1e-15;
};

struct GridNode {
  double c = 0.0;
  double sigma = 0.0;
  double log_marginal = 0.0;
  double weight = 0.0;
};

struct McmcDiagnostics {
  std::size_t chains = 1;
  std::size_t samples_per_chain = 0;
  double pcn_acceptance = 0.0;
  double c_acceptance = 0.0;
  double pcn_step = 0.0;
  double posterior_mean_c = 0.0;
  double ess_log_c = 0.0;
  double ess_mean_f = 0.0;
};

/// Mixture posterior on the graph. For regression the grid carries the
/// quadrature nodes; for classification `mcmc` is set and the grid is empty.
struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd pointwise_var;
  std::vector<GridNode> grid;
  /// Conditional coefficient means and variances, one row per grid node. For
  /// MCMC a single row: the posterior moments of the coefficients of f.
  Eigen::MatrixXd coef_mean;
  Eigen::MatrixXd coef_var;
  std::optional<McmcDiagnostics> mcmc;
  std::vector<std::string> warnings;
};

/// Weights proportional to exp(log marginal) x prior density x cell width,
/// integrating c against Exp(1) (in log c) and sigma against a uniform density.
PosteriorSummary regression_posterior(const Spectrum& s, const PriorSpec& spec,
                                      const RegressionData& data, const GridConfig& grid = {},
                                      Execution exec = Execution::parallel);

/// Quadrature nodes and log weights (prior density times cell width) for c.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};
QuadratureRule c_quadrature(const GridConfig& grid);
QuadratureRule sigma_quadrature(const SigmaInterval& interval, std::size_t nodes);

/// Normalizes log weights with max subtraction. Non-finite entries get weight 0.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

double link_logistic(double x);
double link_inverse(double p);
double link_derivative(double x);
/// log Psi(x) and log(1 - Psi(x)) without overflow.
double log_link(double x);
double log_link_complement(double x);

struct McmcConfig {
  std::size_t samples = 20000;
  std::size_t burn_in = 5000;
  /// Initial mixing weight of the fresh prior draw in the pCN proposal;
  /// adapted toward target_acceptance during burn-in.
  double pcn_step = 0.5;
  double target_acceptance = 0.3;
  double log_c_step = 0.25;
  std::uint64_t seed = 20190101;
  std::size_t chains = 1;
  /// false samples the prior (likelihood treated as identically 1).
  bool use_likelihood = true;
  std::optional<double> fixed_c;
  /// Keep the per-iteration coefficients of f and log c.
  bool record_trace = false;
};

struct McmcTrace {
  /// samples x n, coefficients <f, psi_i>_n.
  Eigen::MatrixXd coefficients;
  std::vector<double> log_c;
};

struct ClassificationResult {
  PosteriorSummary summary;
  /// One per chain, filled when record_trace is set.
  std::vector<McmcTrace> traces;
};

/// Whitened sampler: f = sum_i z_i psi_i / sqrt(n mu_i(c)) with z ~ N(0, I).
/// Each iteration makes a prior-preserving move
/// z' = sqrt(1 - s^2) z + s xi, accepted by the Bernoulli log-likelihood ratio,
/// then a random-walk move on log c with z held fixed. Summary mean and
/// variance are of p = Psi(f).
ClassificationResult classification_posterior(const Spectrum& s, const PriorSpec& spec,
                                              const ClassificationData& data,
                                              const McmcConfig& config,
                                              Execution exec = Execution::parallel);

/// Initial-positive-sequence estimate of the effective sample size.
double effective_sample_size(std::span<const double> trace);

void validate_labels(const Eigen::VectorXd& y);

}  // namespace lapreg
