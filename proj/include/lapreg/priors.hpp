#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "lapreg/spectral.hpp"

namespace lapreg {

/// Precision ((n/c)^{2/r} (L + n^{-2} I))^{alpha + r/2}.
struct PowerPrior {
  double alpha = 1.0;
};

/// Covariance n exp(-(n/c)^{2/r} L).
struct ExponentialPrior {};

/// One of the two Laplacian prior families together with the geometry
/// parameter r. The scale c carries an Exp(1) hyperprior in both cases.
class PriorSpec {
 public:
  using Kind = std::variant<PowerPrior, ExponentialPrior>;

  static PriorSpec power(double alpha, double r);
  static PriorSpec exponential(double r);

  const Kind& kind() const noexcept { return kind_; }
  double r() const noexcept { return r_; }
  bool is_power() const noexcept { return std::holds_alternative<PowerPrior>(kind_); }
  /// "power" or "exp".
  std::string name() const;

 private:
  PriorSpec(Kind kind, double r) : kind_(kind), r_(r) {}

  Kind kind_;
  double r_;
};

/// f | c as a Gaussian diagonal in the Laplacian eigenbasis.
///
/// Stores log mu_i, the log eigenvalues of the precision matrix; the
/// exponential family overflows a double for large (n/c)^{2/r} lambda_i.
class ConditionalGaussian {
 public:
  ConditionalGaussian(double c, Eigen::VectorXd log_precision);

  double c() const noexcept { return c_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(log_mu_.size()); }
  const Eigen::VectorXd& log_precision() const noexcept { return log_mu_; }
  /// mu_i; may contain +inf.
  Eigen::VectorXd precision() const;
  /// Var(f_i | c) = 1 / (n mu_i).
  Eigen::VectorXd coefficient_variances() const;
  /// 1 / sqrt(n mu_i), the series weights.
  Eigen::VectorXd coefficient_scales() const;

 private:
  double c_;
  Eigen::VectorXd log_mu_;
};

/// log mu_i for every eigenvalue; the building block of precision_eigenvalues,
/// exposed for kernels that sweep many c values.
Eigen::VectorXd log_precision_eigenvalues(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                                          double c);

ConditionalGaussian precision_eigenvalues(const PriorSpec& spec, const Spectrum& s, double c);

/// sum_i z_i psi_i / sqrt(n mu_i) for given standard normal z.
Eigen::VectorXd prior_draw_from_normals(const ConditionalGaussian& cg, const Spectrum& s,
                                        const Eigen::VectorXd& z);

Eigen::VectorXd sample_prior(const ConditionalGaussian& cg, const Spectrum& s,
                             std::mt19937_64& rng);

/// Standard normal vector of length n.
Eigen::VectorXd standard_normals(std::size_t n, std::mt19937_64& rng);

double sample_c(std::mt19937_64& rng);
/// -c for c > 0, -infinity otherwise.
double c_prior_logdensity(double c);

/// n sum_i mu_i h_i^2 with h_i = <h, psi_i>_n.
double rkhs_norm_sq(const ConditionalGaussian& cg, const Spectrum& s, const Eigen::VectorXd& h);

}  // namespace lapreg
