#include "lapreg/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "lapreg/error.hpp"
#include "lapreg/io.hpp"
#include "lapreg/priors.hpp"

namespace lapreg {

Eigen::VectorXd make_smooth_truth(const Spectrum& s, double beta, double C, double r,
                                  std::uint64_t seed, double tail) {
  if (!(beta > 0.0) || !(C > 0.0)) throw ValidationError("make_smooth_truth: beta and C must be positive");
  if (!(r > 0.0)) throw ValidationError("make_smooth_truth: r must be positive");
  const auto n = static_cast<Eigen::Index>(s.size());
  const double scale = std::pow(static_cast<double>(n), 2.0 * beta / r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd coeffs(n);
  double energy = 0.0;  // sum of g_i^2, equal to the Sobolev norm before rescaling
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = normal(rng) * std::pow(static_cast<double>(i + 1), -(0.5 + tail));
    coeffs(i) = g / std::sqrt(1.0 + scale * std::pow(s.eigenvalues()(i), beta));
    energy += g * g;
  }
  coeffs *= C / std::sqrt(energy);
  return s.synthesize(coeffs);
}

namespace {

std::size_t nearest_side(std::size_t n, std::size_t d) {
  return static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d))));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), tag};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

constexpr std::uint32_t kGraphTag = 1;
constexpr std::uint32_t kNoiseTag = 2;
constexpr std::uint32_t kChainTag = 3;
constexpr std::uint32_t kTruthTag = 4;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

Graph make_family_graph(const GraphFamily& family, std::size_t n, std::uint64_t seed) {
  const auto& kind = family.kind;
  if (kind == "path") return make_path(n);
  if (kind == "ring") return make_ring(n);
  if (kind == "grid") return make_grid(family.d, nearest_side(n, family.d));
  if (kind == "torus") return make_torus(family.d, nearest_side(n, family.d));
  if (kind == "ladder") return make_ladder(n - n % 2);
  if (kind == "lollipop") {
    if (n <= family.clique) throw ValidationError("lollipop family needs n > clique size");
    return make_lollipop(family.clique, n - family.clique);
  }
  if (kind == "ws") return watts_strogatz(n, family.p, seed);
  throw ValidationError("unknown graph family '" + kind + "'");
}

std::optional<double> theoretical_r(const GraphFamily& family) {
  const auto& kind = family.kind;
  if (kind == "path" || kind == "ring" || kind == "ladder" || kind == "lollipop") return 1.0;
  if (kind == "grid" || kind == "torus") return static_cast<double>(family.d);
  return std::nullopt;
}

RateResult run_rate_experiment(const RateExperimentConfig& cfg, [[maybe_unused]] Execution exec) {
  if (cfg.sizes.size() < 2) throw ValidationError("rate experiment needs at least two sizes");
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end()) ||
      std::adjacent_find(cfg.sizes.begin(), cfg.sizes.end()) != cfg.sizes.end())
    throw ValidationError("rate experiment sizes must be strictly ascending");
  if (cfg.replicates < 1) throw ValidationError("rate experiment needs at least one replicate");
  if (!(cfg.beta > 0.0) || !(cfg.C > 0.0)) throw ValidationError("beta and C must be positive");
  if (cfg.task == Task::regression && !(cfg.sigma > 0.0))
    throw ValidationError("sigma must be positive");
  if (cfg.r && !(*cfg.r > 0.0)) throw ValidationError("r must be positive");
  if (cfg.prior != "power" && cfg.prior != "exp")
    throw ValidationError("prior must be 'power' or 'exp'");

  RateResult result;
  result.config = cfg;
  result.log_factor = cfg.prior == "exp";

  for (const std::size_t requested : cfg.sizes) {
    const Graph graph = make_family_graph(cfg.family, requested,
                                          derive_seed(cfg.seed, requested, 0, kGraphTag));
    const Spectrum spectrum = eig(graph);
    SizeResult size;
    size.n_requested = requested;
    size.n = graph.num_vertices();
    if (cfg.r) {
      size.r = *cfg.r;
      size.r_source = "config";
    } else if (auto r = theoretical_r(cfg.family)) {
      size.r = *r;
      size.r_source = "theory";
    } else {
      size.r = geometry_fit(spectrum, cfg.drop_low, cfg.kappa).r_hat;
      size.r_source = "geometry_fit";
    }
    const PriorSpec spec =
        cfg.prior == "power" ? PriorSpec::power(cfg.alpha, size.r) : PriorSpec::exponential(size.r);

    size.errors.assign(cfg.replicates, 0.0);
    std::vector<std::exception_ptr> failures(cfg.replicates);
    const auto reps = static_cast<std::ptrdiff_t>(cfg.replicates);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (std::ptrdiff_t rep = 0; rep < reps; ++rep) {
      const auto idx = static_cast<std::size_t>(rep);
      try {
        // The truth depends on the replicate but not on n, so each replicate
        // follows one coefficient sequence across sizes.
        const Eigen::VectorXd truth = make_smooth_truth(spectrum, cfg.beta, cfg.C, size.r,
                                                        derive_seed(cfg.seed, 0, idx, kTruthTag));
        std::mt19937_64 rng(derive_seed(cfg.seed, size.n, idx, kNoiseTag));
        if (cfg.task == Task::regression) {
          RegressionData data;
          data.y = truth + cfg.sigma * standard_normals(size.n, rng);
          data.sigma = KnownSigma{cfg.sigma};
          const auto post = regression_posterior(spectrum, spec, data, cfg.grid, Execution::serial);
          size.errors[idx] = std::sqrt(norm_n_sq(post.mean - truth));
        } else {
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          ClassificationData data;
          data.y.resize(truth.size());
          Eigen::VectorXd p0(truth.size());
          for (Eigen::Index v = 0; v < truth.size(); ++v) {
            p0(v) = link_logistic(truth(v));
            data.y(v) = unif(rng) < p0(v) ? 1.0 : 0.0;
          }
          McmcConfig mcmc = cfg.mcmc;
          mcmc.seed = derive_seed(cfg.seed, size.n, idx, kChainTag);
          const auto post = classification_posterior(spectrum, spec, data, mcmc, Execution::serial);
          size.errors[idx] = std::sqrt(norm_n_sq(post.summary.mean - p0));
        }
      } catch (...) {
        failures[idx] = std::current_exception();
      }
    }
    for (std::size_t rep = 0; rep < failures.size(); ++rep) {
      if (!failures[rep]) continue;
      const std::string where =
          " (n = " + std::to_string(size.n) + ", replicate " + std::to_string(rep) + ")";
      try {
        std::rethrow_exception(failures[rep]);
      } catch (const ValidationError& e) {
        throw ValidationError(e.what() + where);
      } catch (const std::exception& e) {
        throw NumericError(e.what() + where);
      }
    }
    size.median_error = median(size.errors);
    double total = 0.0;
    for (double e : size.errors) total += e;
    size.mean_error = total / static_cast<double>(size.errors.size());
    result.sizes.push_back(std::move(size));
  }

  const std::size_t m = result.sizes.size();
  Eigen::VectorXd x(static_cast<Eigen::Index>(m)), y(static_cast<Eigen::Index>(m));
  double r_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& sz = result.sizes[k];
    const double n = static_cast<double>(sz.n);
    x(static_cast<Eigen::Index>(k)) =
        result.log_factor ? std::log(n) - (1.0 + sz.r / 2.0) * std::log(std::log(n)) : std::log(n);
    y(static_cast<Eigen::Index>(k)) = std::log(sz.median_error);
    r_sum += sz.r;
  }
  const double mx = x.mean();
  const double my = y.mean();
  const double slope = ((x.array() - mx) * (y.array() - my)).sum() / (x.array() - mx).square().sum();
  result.fitted_exponent = -slope;
  const double r_avg = r_sum / static_cast<double>(m);
  result.theoretical_exponent = cfg.beta / (2.0 * cfg.beta + r_avg);
  return result;
}

namespace {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

RateExperimentConfig rate_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("rate experiment config must be a JSON object");
  reject_unknown(j,
                 {"family", "sizes", "beta", "C", "r", "sigma", "prior", "alpha", "replicates",
                  "seed", "task", "grid", "mcmc", "drop_low", "kappa"},
                 "config");
  RateExperimentConfig cfg;
  try {
    if (j.contains("family")) {
      const auto& f = j.at("family");
      if (f.is_string()) {
        cfg.family.kind = f.get<std::string>();
      } else {
        reject_unknown(f, {"kind", "d", "clique", "p"}, "family");
        read_if(f, "kind", cfg.family.kind);
        read_if(f, "d", cfg.family.d);
        read_if(f, "clique", cfg.family.clique);
        read_if(f, "p", cfg.family.p);
      }
    }
    read_if(j, "sizes", cfg.sizes);
    read_if(j, "beta", cfg.beta);
    read_if(j, "C", cfg.C);
    if (j.contains("r") && j.at("r").is_number()) cfg.r = j.at("r").get<double>();
    else if (j.contains("r") && !(j.at("r").is_null() || j.at("r") == "auto"))
      throw ValidationError("r must be a number, null or \"auto\"");
    read_if(j, "sigma", cfg.sigma);
    read_if(j, "prior", cfg.prior);
    read_if(j, "alpha", cfg.alpha);
    read_if(j, "replicates", cfg.replicates);
    read_if(j, "seed", cfg.seed);
    read_if(j, "drop_low", cfg.drop_low);
    read_if(j, "kappa", cfg.kappa);
    if (j.contains("task")) {
      const auto task = j.at("task").get<std::string>();
      if (task == "regression") cfg.task = Task::regression;
      else if (task == "classification") cfg.task = Task::classification;
      else throw ValidationError("task must be 'regression' or 'classification'");
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      reject_unknown(g, {"c_nodes", "c_lower_quantile", "c_upper_quantile", "sigma_nodes", "fixed_c"},
                     "grid");
      read_if(g, "c_nodes", cfg.grid.c_nodes);
      read_if(g, "c_lower_quantile", cfg.grid.c_lower_quantile);
      read_if(g, "c_upper_quantile", cfg.grid.c_upper_quantile);
      read_if(g, "sigma_nodes", cfg.grid.sigma_nodes);
      if (g.contains("fixed_c") && !g.at("fixed_c").is_null())
        cfg.grid.fixed_c = g.at("fixed_c").get<double>();
    }
    if (j.contains("mcmc")) {
      const auto& m = j.at("mcmc");
      reject_unknown(m, {"samples", "burn_in", "pcn_step", "target_acceptance", "log_c_step", "chains"},
                     "mcmc");
      read_if(m, "samples", cfg.mcmc.samples);
      read_if(m, "burn_in", cfg.mcmc.burn_in);
      read_if(m, "pcn_step", cfg.mcmc.pcn_step);
      read_if(m, "target_acceptance", cfg.mcmc.target_acceptance);
      read_if(m, "log_c_step", cfg.mcmc.log_c_step);
      read_if(m, "chains", cfg.mcmc.chains);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rate experiment config: ") + e.what());
  }
  return cfg;
}

nlohmann::json to_json(const RateExperimentConfig& cfg) {
  nlohmann::json grid = {{"c_nodes", cfg.grid.c_nodes},
                         {"c_lower_quantile", cfg.grid.c_lower_quantile},
                         {"c_upper_quantile", cfg.grid.c_upper_quantile},
                         {"sigma_nodes", cfg.grid.sigma_nodes},
                         {"fixed_c", cfg.grid.fixed_c ? nlohmann::json(*cfg.grid.fixed_c) : nlohmann::json(nullptr)}};
  nlohmann::json mcmc = {{"samples", cfg.mcmc.samples},
                         {"burn_in", cfg.mcmc.burn_in},
                         {"pcn_step", cfg.mcmc.pcn_step},
                         {"target_acceptance", cfg.mcmc.target_acceptance},
                         {"log_c_step", cfg.mcmc.log_c_step},
                         {"chains", cfg.mcmc.chains}};
  return {{"family",
           {{"kind", cfg.family.kind}, {"d", cfg.family.d}, {"clique", cfg.family.clique},
            {"p", cfg.family.p}}},
          {"sizes", cfg.sizes},
          {"beta", cfg.beta},
          {"C", cfg.C},
          {"r", cfg.r ? nlohmann::json(*cfg.r) : nlohmann::json(nullptr)},
          {"sigma", cfg.sigma},
          {"prior", cfg.prior},
          {"alpha", cfg.alpha},
          {"replicates", cfg.replicates},
          {"seed", cfg.seed},
          {"task", cfg.task == Task::regression ? "regression" : "classification"},
          {"grid", grid},
          {"mcmc", mcmc},
          {"drop_low", cfg.drop_low},
          {"kappa", cfg.kappa}};
}

nlohmann::json to_json(const RateResult& result) {
  auto sizes = nlohmann::json::array();
  for (const auto& s : result.sizes) {
    std::vector<double> errors;
    for (double e : s.errors) errors.push_back(io::round12(e));
    sizes.push_back({{"n_requested", s.n_requested},
                     {"n", s.n},
                     {"r", io::round12(s.r)},
                     {"r_source", s.r_source},
                     {"errors", errors},
                     {"median_error", io::round12(s.median_error)},
                     {"mean_error", io::round12(s.mean_error)}});
  }
  return {{"config", to_json(result.config)},
          {"sizes", sizes},
          {"fitted_exponent", io::round12(result.fitted_exponent)},
          {"theoretical_exponent", io::round12(result.theoretical_exponent)},
          {"log_factor", result.log_factor}};
}

GeometryFit emit_geometry_figure_data(std::span<const double> eigenvalues, std::size_t drop_low,
                                      double kappa, const std::filesystem::path& prefix) {
  const GeometryFit fit = geometry_fit(eigenvalues, drop_low, kappa);
  const double n = static_cast<double>(eigenvalues.size());
  std::ostringstream csv;
  csv << "i,log_i_over_n,log_lambda\n";
  for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0)) continue;
    csv << i << ',' << io::format_number(std::log(static_cast<double>(i) / n)) << ','
        << io::format_number(std::log(eigenvalues[i])) << '\n';
  }
  io::write_text(prefix.string() + ".csv", csv.str());
  nlohmann::json j = io::to_json(fit);
  j["n"] = eigenvalues.size();
  j["drop_low"] = drop_low;
  j["kappa"] = kappa;
  io::write_text(prefix.string() + ".json", j.dump(2) + "\n");
  return fit;
}

GeometryFit emit_geometry_figure_data(const Graph& g, std::size_t drop_low, double kappa,
                                      const std::filesystem::path& prefix) {
  const Spectrum s = eig(g);
  const auto& ev = s.eigenvalues();
  return emit_geometry_figure_data(std::span<const double>(ev.data(), s.size()), drop_low, kappa,
                                   prefix);
}

}  // namespace lapreg
