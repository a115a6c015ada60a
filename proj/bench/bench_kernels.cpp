#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "lapreg/inference.hpp"
#include "lapreg/kernels.hpp"

using namespace lapreg;

namespace {

// Path-graph spectrum in closed form, so setup does not pay for an eigensolve.
Eigen::VectorXd path_eigenvalues(std::size_t n) {
  Eigen::VectorXd ev(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::sin(M_PI * static_cast<double>(k) / (2.0 * n));
    ev(static_cast<Eigen::Index>(k)) = 4.0 * t * t;
  }
  return ev;
}

struct GridInputs {
  Eigen::VectorXd lambda, y;
  std::vector<double> c, sigma;
};

GridInputs grid_inputs(std::size_t n, std::size_t c_nodes, std::size_t sigma_nodes) {
  GridInputs in;
  in.lambda = path_eigenvalues(n);
  std::mt19937_64 rng(1);
  in.y = standard_normals(n, rng) / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < c_nodes; ++i)
    for (std::size_t j = 0; j < sigma_nodes; ++j) {
      in.c.push_back(0.001 * std::pow(6.9 / 0.001, static_cast<double>(i) / (c_nodes - 1)));
      in.sigma.push_back(0.2 + 1.8 * static_cast<double>(j) / (sigma_nodes - 1));
    }
  return in;
}

template <Execution exec>
void BM_EvaluateGrid(benchmark::State& state) {
  const auto in = grid_inputs(static_cast<std::size_t>(state.range(0)), 64, 32);
  const auto spec = PriorSpec::power(1.0, 1.0);
  for (auto _ : state) {
    auto eval = kernels::evaluate_grid(spec, in.lambda, in.y, in.c, in.sigma, exec);
    benchmark::DoNotOptimize(eval.log_marginal.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.c.size()));
}

template <Execution exec>
void BM_MixtureVariance(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::Index nodes = 128;
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd basis = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd dev(nodes, n);
  for (Eigen::Index k = 0; k < nodes; ++k)
    dev.row(k) = standard_normals(static_cast<std::size_t>(n), rng).transpose();
  const std::vector<double> weights(static_cast<std::size_t>(nodes), 1.0 / nodes);
  const Eigen::VectorXd avg_var = Eigen::VectorXd::Constant(n, 0.01);
  for (auto _ : state) {
    auto var = kernels::mixture_pointwise_variance(basis, weights, dev, avg_var, exec);
    benchmark::DoNotOptimize(var.data());
  }
}

template <Execution exec>
void BM_ClassificationChains(benchmark::State& state) {
  const Spectrum s = eig(make_ring(200));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(200);
  y.head(100).setOnes();
  McmcConfig cfg;
  cfg.samples = 2000;
  cfg.burn_in = 500;
  cfg.chains = 4;
  for (auto _ : state) {
    auto res = classification_posterior(s, PriorSpec::power(1.0, 1.0), {y}, cfg, exec);
    benchmark::DoNotOptimize(res.summary.mean.data());
  }
}

}  // namespace

BENCHMARK(BM_EvaluateGrid<Execution::serial>)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateGrid<Execution::parallel>)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MixtureVariance<Execution::serial>)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureVariance<Execution::parallel>)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClassificationChains<Execution::serial>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassificationChains<Execution::parallel>)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
