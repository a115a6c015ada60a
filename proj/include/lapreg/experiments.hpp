#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lapreg/graph.hpp"
#include "lapreg/inference.hpp"
#include "lapreg/spectral.hpp"

namespace lapreg {

/// f0 with sobolev_norm_sq(f0, beta, r) == C^2: raw coefficients
/// g_i = Z_i (i+1)^{-(1/2 + tail)}, damped by 1/sqrt(1 + n^{2 beta/r} lambda_i^beta),
/// then rescaled. Z is drawn sequentially from `seed`, so the first k raw
/// coefficients agree across graph sizes.
Eigen::VectorXd make_smooth_truth(const Spectrum& s, double beta, double C, double r,
                                  std::uint64_t seed, double tail = 0.05);

enum class Task { regression, classification };

/// Graph family swept over sizes. For multi-dimensional families the side is
/// round(n^{1/d}), so the realized n can differ from the requested one.
struct GraphFamily {
  std::string kind = "path";  ///< path ring grid torus ladder lollipop ws
  std::size_t d = 1;          ///< grid, torus
  std::size_t clique = 3;     ///< lollipop head size
  double p = 0.25;            ///< ws rewiring probability
};

/// Builds the family member closest to n; `seed` only matters for ws.
Graph make_family_graph(const GraphFamily& family, std::size_t n, std::uint64_t seed);
/// Geometry parameter known in closed form for the deterministic families.
std::optional<double> theoretical_r(const GraphFamily& family);

struct RateExperimentConfig {
  GraphFamily family;
  std::vector<std::size_t> sizes;
  double beta = 1.0;
  double C = 1.0;
  /// Unset: use the family's theoretical r, or geometry_fit for ws.
  std::optional<double> r;
  double sigma = 1.0;
  std::string prior = "power";  ///< power | exp
  double alpha = 1.0;
  std::size_t replicates = 20;
  std::uint64_t seed = 20190101;
  Task task = Task::regression;
  GridConfig grid;
  McmcConfig mcmc;
  std::size_t drop_low = 3;
  double kappa = 0.35;
};

struct SizeResult {
  std::size_t n_requested = 0;
  std::size_t n = 0;
  double r = 0.0;
  std::string r_source;  ///< config | theory | geometry_fit
  std::vector<double> errors;
  double median_error = 0.0;
  double mean_error = 0.0;
};

struct RateResult {
  RateExperimentConfig config;
  std::vector<SizeResult> sizes;
  /// Negated least-squares slope of log median error against log n (or
  /// log(n / log^{1+r/2} n) for the exponential prior).
  double fitted_exponent = 0.0;
  double theoretical_exponent = 0.0;
  bool log_factor = false;
};

/// Seeds derive from (seed, n, replicate); results do not depend on the
/// worker count.
RateResult run_rate_experiment(const RateExperimentConfig& cfg,
                               Execution exec = Execution::parallel);

RateExperimentConfig rate_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RateExperimentConfig& cfg);
nlohmann::json to_json(const RateResult& result);

/// Writes <prefix>.csv with (i, log(i/n), log lambda_i) for i >= 1 and
/// <prefix>.json with the fit. Returns the fit.
GeometryFit emit_geometry_figure_data(std::span<const double> eigenvalues, std::size_t drop_low,
                                      double kappa, const std::filesystem::path& prefix);
GeometryFit emit_geometry_figure_data(const Graph& g, std::size_t drop_low, double kappa,
                                      const std::filesystem::path& prefix);

}  // namespace lapreg
