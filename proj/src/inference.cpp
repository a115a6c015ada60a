#include "lapreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lapreg/error.hpp"

namespace lapreg {

CoefficientPosterior regression_posterior_given_c(const Spectrum& s, const PriorSpec& spec,
                                                  double c, double sigma,
                                                  const Eigen::VectorXd& y) {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(c > 0.0)) throw ValidationError("c must be positive");
  const Eigen::VectorXd y_coeffs = s.coefficients(y);
  const double cs[] = {c};
  const double sigmas[] = {sigma};
  const auto eval = kernels::evaluate_grid(spec, s.eigenvalues(), y_coeffs, cs, sigmas,
                                           Execution::serial);
  return {eval.mean.row(0).transpose(), eval.var.row(0).transpose(), eval.log_marginal(0)};
}

namespace {

// Trapezoid weights for equally spaced nodes with spacing h.
std::vector<double> trapezoid(std::size_t nodes, double h) {
  std::vector<double> w(nodes, h);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace

QuadratureRule c_quadrature(const GridConfig& grid) {
  if (grid.fixed_c) {
    if (!(*grid.fixed_c > 0.0)) throw ValidationError("fixed c must be positive");
    return {{*grid.fixed_c}, {0.0}};
  }
  if (grid.c_nodes < 2)
    throw ValidationError("degenerate c grid: need at least 2 nodes (or a fixed c)");
  if (!(grid.c_lower_quantile > 0.0 && grid.c_lower_quantile < grid.c_upper_quantile &&
        grid.c_upper_quantile < 1.0))
    throw ValidationError("c grid quantiles must satisfy 0 < lower < upper < 1");

  // Exp(1) quantile function; integrate e^{-c} dc = e^{-c} c d(log c)
  const double lo = std::log(-std::log1p(-grid.c_lower_quantile));
  const double hi = std::log(-std::log1p(-grid.c_upper_quantile));
  const double h = (hi - lo) / static_cast<double>(grid.c_nodes - 1);
  const auto cell = trapezoid(grid.c_nodes, h);
  QuadratureRule rule;
  for (std::size_t k = 0; k < grid.c_nodes; ++k) {
    const double log_c = lo + h * static_cast<double>(k);
    const double c = std::exp(log_c);
    rule.nodes.push_back(c);
    rule.log_weights.push_back(c_prior_logdensity(c) + log_c + std::log(cell[k]));
  }
  return rule;
}

QuadratureRule sigma_quadrature(const SigmaInterval& interval, std::size_t nodes) {
  if (!(interval.a > 0.0 && interval.a < interval.b))
    throw ValidationError("sigma interval must satisfy 0 < a < b");
  if (nodes < 2) throw ValidationError("degenerate sigma grid: need at least 2 nodes");
  const double h = (interval.b - interval.a) / static_cast<double>(nodes - 1);
  const auto cell = trapezoid(nodes, h);
  const double log_density = -std::log(interval.b - interval.a);
  QuadratureRule rule;
  for (std::size_t k = 0; k < nodes; ++k) {
    rule.nodes.push_back(interval.a + h * static_cast<double>(k));
    rule.log_weights.push_back(log_density + std::log(cell[k]));
  }
  rule.nodes.back() = interval.b;
  return rule;
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights)
    if (std::isfinite(lw)) top = std::max(top, lw);
  if (!std::isfinite(top)) throw NumericError("every grid node has a non-finite log weight");
  std::vector<double> w(log_weights.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (std::isfinite(log_weights[k])) w[k] = std::exp(log_weights[k] - top);
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

PosteriorSummary regression_posterior(const Spectrum& s, const PriorSpec& spec,
                                      const RegressionData& data, const GridConfig& grid,
                                      Execution exec) {
  if (static_cast<std::size_t>(data.y.size()) != s.size())
    throw ValidationError("observations have length " + std::to_string(data.y.size()) +
                          ", graph has " + std::to_string(s.size()) + " vertices");
  if (!data.y.allFinite()) throw ValidationError("observations must be finite");

  const QuadratureRule c_rule = c_quadrature(grid);
  QuadratureRule sigma_rule;
  if (const auto* known = std::get_if<KnownSigma>(&data.sigma)) {
    if (!(known->sigma > 0.0)) throw ValidationError("sigma must be positive");
    sigma_rule = {{known->sigma}, {0.0}};
  } else {
    sigma_rule = sigma_quadrature(std::get<SigmaInterval>(data.sigma), grid.sigma_nodes);
  }

  std::vector<double> node_c, node_sigma, log_prior;
  for (std::size_t a = 0; a < c_rule.nodes.size(); ++a)
    for (std::size_t b = 0; b < sigma_rule.nodes.size(); ++b) {
      node_c.push_back(c_rule.nodes[a]);
      node_sigma.push_back(sigma_rule.nodes[b]);
      log_prior.push_back(c_rule.log_weights[a] + sigma_rule.log_weights[b]);
    }

  const Eigen::VectorXd y_coeffs = s.coefficients(data.y);
  auto eval = kernels::evaluate_grid(spec, s.eigenvalues(), y_coeffs, node_c, node_sigma, exec);

  PosteriorSummary out;
  std::vector<double> log_w(node_c.size());
  std::size_t non_finite = 0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    log_w[k] = eval.log_marginal(static_cast<Eigen::Index>(k)) + log_prior[k];
    if (!std::isfinite(log_w[k])) ++non_finite;
  }
  if (non_finite > 0)
    out.warnings.push_back(std::to_string(non_finite) +
                           " grid nodes had a non-finite log marginal likelihood");
  const auto weights = normalize_log_weights(log_w);

  const auto nodes = static_cast<Eigen::Index>(weights.size());
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXd mean_coef = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd avg_var = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    const double w = weights[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    mean_coef += w * eval.mean.row(k).transpose();
    avg_var += w * eval.var.row(k).transpose();
  }

  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < nodes; ++k)
    if (weights[static_cast<std::size_t>(k)] >= grid.variance_weight_floor) kept.push_back(k);
  Eigen::MatrixXd dev(static_cast<Eigen::Index>(kept.size()), n);
  std::vector<double> kept_w;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    dev.row(static_cast<Eigen::Index>(j)) = eval.mean.row(kept[j]) - mean_coef.transpose();
    kept_w.push_back(weights[static_cast<std::size_t>(kept[j])]);
  }

  out.mean = s.synthesize(mean_coef);
  out.pointwise_var = kernels::mixture_pointwise_variance(s.basis(), kept_w, dev, avg_var, exec);

  const auto top = static_cast<std::size_t>(
      std::max_element(weights.begin(), weights.end()) - weights.begin());
  const std::size_t sigma_count = sigma_rule.nodes.size();
  const std::size_t top_c = top / sigma_count;
  if (c_rule.nodes.size() > 1 && (top_c == 0 || top_c + 1 == c_rule.nodes.size()))
    out.warnings.push_back("largest weight sits on the boundary of the c grid (c = " +
                           std::to_string(c_rule.nodes[top_c]) + ")");

  out.grid.reserve(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k)
    out.grid.push_back({node_c[k], node_sigma[k],
                        eval.log_marginal(static_cast<Eigen::Index>(k)), weights[k]});
  out.coef_mean = std::move(eval.mean);
  out.coef_var = std::move(eval.var);
  return out;
}

double link_logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double link_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("link_inverse needs p in (0,1)");
  return std::log(p) - std::log1p(-p);
}

double link_derivative(double x) {
  const double p = link_logistic(x);
  return p * (1.0 - p);
}

double log_link(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double log_link_complement(double x) { return log_link(-x); }

void validate_labels(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0)
      throw ValidationError("label at vertex " + std::to_string(i + 1) +
                            " is not 0 or 1: " + std::to_string(y(i)));
}

double effective_sample_size(std::span<const double> trace) {
  const std::size_t count = trace.size();
  if (count < 4) return static_cast<double>(count);
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / count;
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < count; ++t)
      acc += (trace[t] - mean) * (trace[t + lag] - mean);
    return acc / static_cast<double>(count);
  };
  const double var0 = autocov(0);
  if (!(var0 > 0.0)) return 0.0;
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < count; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / var0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(count) / std::max(tau, 1e-12);
}

namespace {

double bernoulli_loglik(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    total += y(i) == 1.0 ? log_link(f(i)) : log_link_complement(f(i));
  return total;
}

struct ChainOutput {
  Eigen::VectorXd p_sum, p_sq_sum, coef_sum, coef_sq_sum;
  double c_sum = 0.0;
  std::size_t pcn_accepts = 0;
  std::size_t c_accepts = 0;
  std::size_t c_proposals = 0;
  std::size_t rejected_non_finite = 0;
  double pcn_step = 0.0;
  std::vector<double> log_c_trace;
  std::vector<double> mean_f_trace;
  McmcTrace trace;
};

ChainOutput run_chain(const Spectrum& s, const PriorSpec& spec, const Eigen::VectorXd& y,
                      const McmcConfig& cfg, std::size_t chain) {
  const auto n = static_cast<Eigen::Index>(s.size());
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(chain), 0x6d636d63u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto scales_for = [&](double c) {
    return precision_eigenvalues(spec, s, c).coefficient_scales();
  };
  auto loglik = [&](const Eigen::VectorXd& f) {
    return cfg.use_likelihood ? bernoulli_loglik(f, y) : 0.0;
  };

  double log_c = std::log(cfg.fixed_c.value_or(1.0));
  Eigen::VectorXd z = standard_normals(s.size(), rng);
  Eigen::VectorXd scales = scales_for(std::exp(log_c));
  Eigen::VectorXd coef = z.cwiseProduct(scales);
  Eigen::VectorXd f = s.synthesize(coef);
  double ll = loglik(f);

  ChainOutput out;
  out.p_sum = Eigen::VectorXd::Zero(n);
  out.p_sq_sum = Eigen::VectorXd::Zero(n);
  out.coef_sum = Eigen::VectorXd::Zero(n);
  out.coef_sq_sum = Eigen::VectorXd::Zero(n);
  out.log_c_trace.reserve(cfg.samples);
  out.mean_f_trace.reserve(cfg.samples);
  if (cfg.record_trace) out.trace.coefficients.resize(static_cast<Eigen::Index>(cfg.samples), n);

  double step = std::clamp(cfg.pcn_step, 1e-3, 1.0);
  const std::size_t total = cfg.burn_in + cfg.samples;
  for (std::size_t it = 0; it < total; ++it) {
    const bool sampling = it >= cfg.burn_in;

    // prior-preserving move on z
    Eigen::VectorXd z_new(n);
    const double keep = std::sqrt(1.0 - step * step);
    for (Eigen::Index i = 0; i < n; ++i) z_new(i) = keep * z(i) + step * normal(rng);
    Eigen::VectorXd coef_new = z_new.cwiseProduct(scales);
    Eigen::VectorXd f_new = s.synthesize(coef_new);
    double ll_new = loglik(f_new);
    bool accepted = false;
    if (!std::isfinite(ll_new)) {
      ++out.rejected_non_finite;
    } else if (std::log(unif(rng)) < ll_new - ll) {
      z = std::move(z_new);
      coef = std::move(coef_new);
      f = std::move(f_new);
      ll = ll_new;
      accepted = true;
    }
    if (sampling && accepted) ++out.pcn_accepts;
    if (!sampling) {
      const double gain = 1.0 / std::pow(static_cast<double>(it + 1), 0.6);
      step = std::clamp(std::exp(std::log(step) + gain * ((accepted ? 1.0 : 0.0) -
                                                          cfg.target_acceptance)),
                        1e-3, 1.0);
    }

    // random walk on log c, z fixed
    if (!cfg.fixed_c) {
      const double log_c_new = log_c + cfg.log_c_step * normal(rng);
      const double c_old = std::exp(log_c);
      const double c_new = std::exp(log_c_new);
      if (sampling) ++out.c_proposals;
      if (!(c_new > 0.0) || !std::isfinite(c_new)) {
        ++out.rejected_non_finite;
      } else {
        Eigen::VectorXd scales_new = scales_for(c_new);
        Eigen::VectorXd coef_c = z.cwiseProduct(scales_new);
        Eigen::VectorXd f_c = s.synthesize(coef_c);
        ll_new = loglik(f_c);
        // Exp(1) density in log c: -c + log c
        const double log_ratio =
            ll_new - ll + (c_prior_logdensity(c_new) + log_c_new) - (c_prior_logdensity(c_old) + log_c);
        if (!std::isfinite(ll_new)) {
          ++out.rejected_non_finite;
        } else if (std::log(unif(rng)) < log_ratio) {
          log_c = log_c_new;
          scales = std::move(scales_new);
          coef = std::move(coef_c);
          f = std::move(f_c);
          ll = ll_new;
          if (sampling) ++out.c_accepts;
        }
      }
    }

    if (!sampling) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = link_logistic(f(i));
      out.p_sum(i) += p;
      out.p_sq_sum(i) += p * p;
    }
    out.coef_sum += coef;
    out.coef_sq_sum += coef.cwiseAbs2();
    out.c_sum += std::exp(log_c);
    out.log_c_trace.push_back(log_c);
    out.mean_f_trace.push_back(f.mean());
    if (cfg.record_trace) {
      out.trace.coefficients.row(static_cast<Eigen::Index>(it - cfg.burn_in)) = coef.transpose();
      out.trace.log_c.push_back(log_c);
    }
  }
  out.pcn_step = step;
  return out;
}

}  // namespace

ClassificationResult classification_posterior(const Spectrum& s, const PriorSpec& spec,
                                              const ClassificationData& data,
                                              const McmcConfig& config,
                                              [[maybe_unused]] Execution exec) {
  if (static_cast<std::size_t>(data.y.size()) != s.size())
    throw ValidationError("labels have length " + std::to_string(data.y.size()) +
                          ", graph has " + std::to_string(s.size()) + " vertices");
  validate_labels(data.y);
  if (config.samples < 1) throw ValidationError("MCMC needs at least one sample");
  if (config.chains < 1) throw ValidationError("MCMC needs at least one chain");
  if (!(config.pcn_step > 0.0 && config.pcn_step <= 1.0))
    throw ValidationError("pCN step must lie in (0, 1]");
  if (!(config.log_c_step > 0.0)) throw ValidationError("log c step must be positive");
  if (config.fixed_c && !(*config.fixed_c > 0.0))
    throw ValidationError("fixed c must be positive");

  std::vector<ChainOutput> chains(config.chains);
  const auto chain_count = static_cast<std::ptrdiff_t>(config.chains);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel && chain_count > 1)
  for (std::ptrdiff_t k = 0; k < chain_count; ++k)
    chains[static_cast<std::size_t>(k)] =
        run_chain(s, spec, data.y, config, static_cast<std::size_t>(k));

  const auto n = static_cast<Eigen::Index>(s.size());
  const double draws = static_cast<double>(config.samples * config.chains);
  Eigen::VectorXd p_sum = Eigen::VectorXd::Zero(n), p_sq = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd c_sum = Eigen::VectorXd::Zero(n), c_sq = Eigen::VectorXd::Zero(n);
  McmcDiagnostics diag;
  diag.chains = config.chains;
  diag.samples_per_chain = config.samples;
  std::size_t pcn_acc = 0, c_acc = 0, c_prop = 0, non_finite = 0;
  double c_total = 0.0, step_total = 0.0, ess_c = 0.0, ess_f = 0.0;
  ClassificationResult result;
  for (auto& ch : chains) {
    p_sum += ch.p_sum;
    p_sq += ch.p_sq_sum;
    c_sum += ch.coef_sum;
    c_sq += ch.coef_sq_sum;
    pcn_acc += ch.pcn_accepts;
    c_acc += ch.c_accepts;
    c_prop += ch.c_proposals;
    non_finite += ch.rejected_non_finite;
    c_total += ch.c_sum;
    step_total += ch.pcn_step;
    ess_c += effective_sample_size(ch.log_c_trace);
    ess_f += effective_sample_size(ch.mean_f_trace);
    if (config.record_trace) result.traces.push_back(std::move(ch.trace));
  }

  diag.pcn_acceptance = static_cast<double>(pcn_acc) / draws;
  diag.c_acceptance = c_prop > 0 ? static_cast<double>(c_acc) / static_cast<double>(c_prop) : 0.0;
  diag.pcn_step = step_total / static_cast<double>(config.chains);
  diag.posterior_mean_c = c_total / draws;
  diag.ess_log_c = ess_c;
  diag.ess_mean_f = ess_f;

  auto& summary = result.summary;
  summary.mean = p_sum / draws;
  summary.pointwise_var = (p_sq / draws - summary.mean.cwiseAbs2()).cwiseMax(0.0);
  summary.coef_mean = (c_sum / draws).transpose();
  summary.coef_var =
      (c_sq / draws - (c_sum / draws).cwiseAbs2()).cwiseMax(0.0).transpose();

  auto outside = [](double rate) { return rate < 0.05 || rate > 0.9; };
  if (outside(diag.pcn_acceptance))
    summary.warnings.push_back("pCN acceptance rate " + std::to_string(diag.pcn_acceptance) +
                               " outside [0.05, 0.9]");
  if (!config.fixed_c && outside(diag.c_acceptance))
    summary.warnings.push_back("log c acceptance rate " + std::to_string(diag.c_acceptance) +
                               " outside [0.05, 0.9]");
  if (non_finite > 0)
    summary.warnings.push_back(std::to_string(non_finite) +
                               " proposals rejected for a non-finite log-likelihood");
  summary.mcmc = diag;
  return result;
}

}  // namespace lapreg
