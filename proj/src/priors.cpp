#include "lapreg/priors.hpp"

#include <cmath>
#include <limits>

#include "lapreg/error.hpp"

namespace lapreg {

PriorSpec PriorSpec::power(double alpha, double r) {
  if (!(alpha > 0.0)) throw ValidationError("power prior needs alpha > 0");
  if (!(r > 0.0)) throw ValidationError("prior needs r > 0");
  return PriorSpec(PowerPrior{alpha}, r);
}

PriorSpec PriorSpec::exponential(double r) {
  if (!(r > 0.0)) throw ValidationError("prior needs r > 0");
  return PriorSpec(ExponentialPrior{}, r);
}

std::string PriorSpec::name() const { return is_power() ? "power" : "exp"; }

ConditionalGaussian::ConditionalGaussian(double c, Eigen::VectorXd log_precision)
    : c_(c), log_mu_(std::move(log_precision)) {
  if (!(c_ > 0.0)) throw ValidationError("scale c must be positive");
}

Eigen::VectorXd ConditionalGaussian::precision() const { return log_mu_.array().exp(); }

Eigen::VectorXd ConditionalGaussian::coefficient_variances() const {
  const double log_n = std::log(static_cast<double>(size()));
  return (-(log_mu_.array() + log_n)).exp();
}

Eigen::VectorXd ConditionalGaussian::coefficient_scales() const {
  const double log_n = std::log(static_cast<double>(size()));
  return (-0.5 * (log_mu_.array() + log_n)).exp();
}

Eigen::VectorXd log_precision_eigenvalues(const PriorSpec& spec, const Eigen::VectorXd& lambda,
                                          double c) {
  if (!(c > 0.0)) throw ValidationError("scale c must be positive, got " + std::to_string(c));
  const double n = static_cast<double>(lambda.size());
  const double r = spec.r();
  const double log_scale = 2.0 / r * std::log(n / c);
  Eigen::VectorXd out(lambda.size());
  if (const auto* power = std::get_if<PowerPrior>(&spec.kind())) {
    const double exponent = power->alpha + r / 2.0;
    const double ridge = 1.0 / (n * n);
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      out(i) = exponent * (log_scale + std::log(lambda(i) + ridge));
  } else {
    const double scale = std::exp(log_scale);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) out(i) = scale * lambda(i) - std::log(n);
  }
  return out;
}

ConditionalGaussian precision_eigenvalues(const PriorSpec& spec, const Spectrum& s, double c) {
  return ConditionalGaussian(c, log_precision_eigenvalues(spec, s.eigenvalues(), c));
}

Eigen::VectorXd prior_draw_from_normals(const ConditionalGaussian& cg, const Spectrum& s,
                                        const Eigen::VectorXd& z) {
  if (cg.size() != s.size() || static_cast<std::size_t>(z.size()) != s.size())
    throw ValidationError("prior draw: dimension mismatch");
  return s.synthesize(z.cwiseProduct(cg.coefficient_scales()));
}

Eigen::VectorXd standard_normals(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (auto& v : z) v = normal(rng);
  return z;
}

Eigen::VectorXd sample_prior(const ConditionalGaussian& cg, const Spectrum& s,
                             std::mt19937_64& rng) {
  return prior_draw_from_normals(cg, s, standard_normals(s.size(), rng));
}

double sample_c(std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  return exp1(rng);
}

double c_prior_logdensity(double c) {
  return c > 0.0 ? -c : -std::numeric_limits<double>::infinity();
}

double rkhs_norm_sq(const ConditionalGaussian& cg, const Spectrum& s, const Eigen::VectorXd& h) {
  if (cg.size() != s.size()) throw ValidationError("rkhs_norm_sq: prior and spectrum differ");
  const Eigen::VectorXd coeffs = s.coefficients(h);
  double total = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    if (coeffs(i) == 0.0) continue;
    total += std::exp(cg.log_precision()(i)) * coeffs(i) * coeffs(i);
  }
  return static_cast<double>(s.size()) * total;
}

}  // namespace lapreg
