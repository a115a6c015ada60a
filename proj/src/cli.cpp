#include "lapreg/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lapreg/error.hpp"
#include "lapreg/experiments.hpp"
#include "lapreg/graph.hpp"
#include "lapreg/inference.hpp"
#include "lapreg/io.hpp"
#include "lapreg/kernels.hpp"
#include "lapreg/priors.hpp"
#include "lapreg/spectral.hpp"

namespace lapreg {

namespace {

constexpr std::uint64_t kDefaultSeed = 20190101;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string format = "csv";
};

struct GenGraphArgs {
  std::string family;
  std::size_t n = 0, m = 0, d = 2, side = 0, path_len = 0;
  double p = 0.25;
  std::string out;
};

struct SpectrumArgs {
  std::string graph;
  std::string out;
  bool largest = false;
};

struct GeometryArgs {
  std::string graph;
  bool synthetic = false;
  std::size_t n = 400;
  double r = 2.0;
  std::size_t drop_low = 3;
  double kappa = 0.35;
  std::string out = "geometry";
  bool largest = false;
};

struct FitArgs {
  std::string task = "regression";
  std::string graph, data;
  std::string prior = "power";
  double alpha = 1.0;
  std::optional<double> r;
  std::optional<double> sigma;
  std::vector<double> sigma_range;
  std::optional<double> c;
  std::size_t c_nodes = 64, sigma_nodes = 32;
  std::size_t samples = 20000, burn_in = 5000, chains = 1;
  double step = 0.5, log_c_step = 0.25;
  std::string out = "posterior";
};

struct PriorArgs {
  std::string graph;
  std::string prior = "power";
  double alpha = 1.0;
  std::optional<double> r;
  std::optional<double> c;
  std::size_t draws = 1;
  std::string out;
};

struct RateArgs {
  std::string config;
  std::string out = "rate";
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    io::write_text(path, content);
}

Graph read_graph(const std::string& path, bool largest) {
  return load_edge_list(path, EdgeListOptions{largest});
}

PriorSpec make_spec(const std::string& prior, double alpha, double r) {
  if (prior == "power") return PriorSpec::power(alpha, r);
  if (prior == "exp") return PriorSpec::exponential(r);
  throw ValidationError("--prior must be 'power' or 'exp'");
}

std::pair<double, std::string> resolve_r(std::optional<double> r, const Spectrum& s) {
  if (r) {
    if (!(*r > 0.0)) throw ValidationError("--r must be positive");
    return {*r, "flag"};
  }
  return {geometry_fit(s).r_hat, "geometry_fit"};
}

void run_gen_graph(const GenGraphArgs& a, const Globals& g, std::ostream& out) {
  auto need = [](std::size_t v, const char* flag) {
    if (v == 0) throw ValidationError(std::string("gen-graph needs ") + flag);
    return v;
  };
  Graph graph = [&] {
    const auto& f = a.family;
    if (f == "path") return make_path(need(a.n, "--n"));
    if (f == "ring") return make_ring(need(a.n, "--n"));
    if (f == "complete") return make_complete(need(a.m ? a.m : a.n, "--m"));
    if (f == "grid") return make_grid(a.d, need(a.side, "--side"));
    if (f == "torus") return make_torus(a.d, need(a.side, "--side"));
    if (f == "ladder") return make_ladder(need(a.n, "--n"));
    if (f == "lollipop") return make_lollipop(need(a.m, "--m"), need(a.path_len, "--path-len"));
    if (f == "ws") return watts_strogatz(need(a.n, "--n"), a.p, g.seed);
    throw ValidationError("unknown family '" + f + "'");
  }();
  std::ostringstream text;
  write_edge_list(graph, text);
  emit(a.out, text.str(), out);
}

void run_spectrum(const SpectrumArgs& a, const Globals& g, std::ostream& out) {
  const Spectrum s = eig(read_graph(a.graph, a.largest));
  const auto& ev = s.eigenvalues();
  const std::span<const double> values(ev.data(), s.size());
  if (g.format == "json") {
    std::vector<double> rounded;
    for (double v : values) rounded.push_back(io::round12(v));
    emit(a.out, nlohmann::json{{"n", s.size()}, {"eigenvalues", rounded}}.dump() + "\n", out);
  } else {
    emit(a.out, io::join_numbers(values) + "\n", out);
  }
}

void run_fit_geometry(const GeometryArgs& a, const Globals&, std::ostream& out) {
  if (!(a.kappa > 0.0 && a.kappa <= 1.0)) throw ValidationError("--kappa must lie in (0, 1]");
  GeometryFit fit;
  std::size_t n = 0;
  if (a.synthetic) {
    if (a.n < 2) throw ValidationError("--n must be at least 2");
    if (!(a.r > 0.0)) throw ValidationError("--r must be positive");
    std::vector<double> ev(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
      ev[i] = std::pow(static_cast<double>(i) / static_cast<double>(a.n), 2.0 / a.r);
    fit = emit_geometry_figure_data(ev, a.drop_low, a.kappa, a.out);
    n = a.n;
  } else {
    if (a.graph.empty()) throw ValidationError("fit-geometry needs --graph or --synthetic");
    const Graph graph = read_graph(a.graph, a.largest);
    fit = emit_geometry_figure_data(graph, a.drop_low, a.kappa, a.out);
    n = graph.num_vertices();
  }
  nlohmann::json j = io::to_json(fit);
  j["n"] = n;
  out << j.dump() << "\n";
}

void run_fit(const FitArgs& a, const Globals& g, std::ostream& out) {
  const Graph graph = read_graph(a.graph, false);
  const Spectrum s = eig(graph);
  const auto [r, r_source] = resolve_r(a.r, s);
  const PriorSpec spec = make_spec(a.prior, a.alpha, r);
  const Eigen::VectorXd y = io::load_vertex_values(a.data, graph.num_vertices());

  PosteriorSummary summary;
  if (a.task == "regression") {
    RegressionData data;
    data.y = y;
    if (a.sigma && !a.sigma_range.empty())
      throw ValidationError("give either --sigma or --sigma-range, not both");
    if (!a.sigma_range.empty()) {
      if (a.sigma_range.size() != 2) throw ValidationError("--sigma-range takes two values a,b");
      data.sigma = SigmaInterval{a.sigma_range[0], a.sigma_range[1]};
    } else {
      data.sigma = KnownSigma{a.sigma.value_or(1.0)};
    }
    GridConfig grid;
    grid.c_nodes = a.c_nodes;
    grid.sigma_nodes = a.sigma_nodes;
    grid.fixed_c = a.c;
    summary = regression_posterior(s, spec, data, grid);
  } else if (a.task == "classification") {
    McmcConfig mcmc;
    mcmc.samples = a.samples;
    mcmc.burn_in = a.burn_in;
    mcmc.chains = a.chains;
    mcmc.pcn_step = a.step;
    mcmc.log_c_step = a.log_c_step;
    mcmc.seed = g.seed;
    mcmc.fixed_c = a.c;
    summary = classification_posterior(s, spec, ClassificationData{y}, mcmc).summary;
  } else {
    throw ValidationError("--task must be 'regression' or 'classification'");
  }

  nlohmann::json j = io::to_json(summary);
  j["task"] = a.task;
  j["seed"] = g.seed;
  j["prior"] = {{"kind", spec.name()},
                {"alpha", spec.is_power() ? nlohmann::json(a.alpha) : nlohmann::json(nullptr)},
                {"r", io::round12(r)},
                {"r_source", r_source}};
  io::write_text(a.out + ".json", j.dump(2) + "\n");
  io::write_text(a.out + ".csv", io::posterior_csv(summary));
  out << a.out << ".json\n" << a.out << ".csv\n";
}

void run_sample_prior(const PriorArgs& a, const Globals& g, std::ostream& out) {
  const Spectrum s = eig(read_graph(a.graph, false));
  const auto [r, r_source] = resolve_r(a.r, s);
  const PriorSpec spec = make_spec(a.prior, a.alpha, r);
  if (a.draws < 1) throw ValidationError("--draws must be at least 1");
  std::mt19937_64 rng(g.seed);
  std::ostringstream csv;
  csv << "draw,c";
  for (std::size_t v = 1; v <= s.size(); ++v) csv << ",v" << v;
  csv << '\n';
  for (std::size_t k = 0; k < a.draws; ++k) {
    const double c = a.c ? *a.c : sample_c(rng);
    const Eigen::VectorXd f = sample_prior(precision_eigenvalues(spec, s, c), s, rng);
    csv << (k + 1) << ',' << io::format_number(c);
    for (double v : f) csv << ',' << io::format_number(v);
    csv << '\n';
  }
  emit(a.out, csv.str(), out);
}

void run_rate(const RateArgs& a, const Globals&, std::ostream& out) {
  std::ifstream in(a.config);
  if (!in) throw ValidationError("cannot open config " + a.config);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  const RateResult result = run_rate_experiment(rate_config_from_json(config));
  io::write_text(a.out + ".json", to_json(result).dump(2) + "\n");
  std::ostringstream csv;
  csv << "n,replicate,error\n";
  for (const auto& s : result.sizes)
    for (std::size_t rep = 0; rep < s.errors.size(); ++rep)
      csv << s.n << ',' << rep << ',' << io::format_number(s.errors[rep]) << '\n';
  io::write_text(a.out + ".csv", csv.str());
  out << "fitted_exponent " << io::format_number(result.fitted_exponent)
      << " theoretical_exponent " << io::format_number(result.theoretical_exponent) << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian Laplacian regularisation on graphs"};
  app.require_subcommand(1, 1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed")->capture_default_str();
  app.add_option("--format", globals.format, "Output format for tables")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  GenGraphArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-graph", "Write the edge list of a graph family");
  gen_cmd->add_option("family", gen.family, "path|ring|complete|grid|torus|ladder|lollipop|ws")
      ->required();
  gen_cmd->add_option("--n", gen.n, "Vertex count");
  gen_cmd->add_option("--m", gen.m, "Clique size (complete, lollipop)");
  gen_cmd->add_option("--d", gen.d, "Dimension (grid, torus)")->capture_default_str();
  gen_cmd->add_option("--side", gen.side, "Side length (grid, torus)");
  gen_cmd->add_option("--path-len", gen.path_len, "Tail length (lollipop)");
  gen_cmd->add_option("--p", gen.p, "Rewiring probability (ws)")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

  SpectrumArgs spec_args;
  auto* spec_cmd = app.add_subcommand("spectrum", "Laplacian eigenvalues of an edge list");
  spec_cmd->add_option("--graph", spec_args.graph, "Edge list")->required();
  spec_cmd->add_option("--out", spec_args.out, "Output file (default stdout)");
  spec_cmd->add_flag("--largest-component", spec_args.largest,
                     "Keep the largest component of a disconnected file");

  GeometryArgs geo;
  auto* geo_cmd = app.add_subcommand("fit-geometry", "Fit log lambda_i against log(i/n)");
  geo_cmd->add_option("--graph", geo.graph, "Edge list");
  geo_cmd->add_flag("--synthetic", geo.synthetic, "Use lambda_i = (i/n)^{2/r} instead of a graph");
  geo_cmd->add_option("--n", geo.n, "Synthetic spectrum size")->capture_default_str();
  geo_cmd->add_option("--r", geo.r, "Synthetic geometry parameter")->capture_default_str();
  geo_cmd->add_option("--drop-low", geo.drop_low, "Leading points to discard")->capture_default_str();
  geo_cmd->add_option("--kappa", geo.kappa, "Fraction of the spectrum fitted")->capture_default_str();
  geo_cmd->add_option("--out", geo.out, "Output prefix for .csv and .json")->capture_default_str();
  geo_cmd->add_flag("--largest-component", geo.largest, "Keep the largest component");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Posterior for regression or classification data");
  fit_cmd->add_option("--task", fit.task, "regression|classification")->capture_default_str();
  fit_cmd->add_option("--graph", fit.graph, "Edge list")->required();
  fit_cmd->add_option("--data", fit.data, "CSV vertex,value")->required();
  fit_cmd->add_option("--prior", fit.prior, "power|exp")->capture_default_str();
  fit_cmd->add_option("--alpha", fit.alpha, "Power prior regularity")->capture_default_str();
  fit_cmd->add_option("--r", fit.r, "Geometry parameter (default: fitted)");
  fit_cmd->add_option("--sigma", fit.sigma, "Known noise level");
  fit_cmd->add_option("--sigma-range", fit.sigma_range, "Unknown noise on [a,b]")->delimiter(',');
  fit_cmd->add_option("--c", fit.c, "Fix the scale c instead of mixing over it");
  fit_cmd->add_option("--c-nodes", fit.c_nodes, "c quadrature nodes")->capture_default_str();
  fit_cmd->add_option("--sigma-nodes", fit.sigma_nodes, "sigma quadrature nodes")
      ->capture_default_str();
  fit_cmd->add_option("--samples", fit.samples, "MCMC samples per chain")->capture_default_str();
  fit_cmd->add_option("--burn-in", fit.burn_in, "MCMC burn-in")->capture_default_str();
  fit_cmd->add_option("--chains", fit.chains, "MCMC chains")->capture_default_str();
  fit_cmd->add_option("--step", fit.step, "Initial pCN step")->capture_default_str();
  fit_cmd->add_option("--log-c-step", fit.log_c_step, "log c random-walk step")
      ->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Output prefix for .json and .csv")->capture_default_str();

  PriorArgs prior;
  auto* prior_cmd = app.add_subcommand("sample-prior", "Draw graph functions from the prior");
  prior_cmd->add_option("--graph", prior.graph, "Edge list")->required();
  prior_cmd->add_option("--prior", prior.prior, "power|exp")->capture_default_str();
  prior_cmd->add_option("--alpha", prior.alpha, "Power prior regularity")->capture_default_str();
  prior_cmd->add_option("--r", prior.r, "Geometry parameter (default: fitted)");
  prior_cmd->add_option("--c", prior.c, "Fixed scale (default: drawn from Exp(1))");
  prior_cmd->add_option("--draws", prior.draws, "Number of draws")->capture_default_str();
  prior_cmd->add_option("--out", prior.out, "Output CSV (default stdout)");

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate-experiment", "Contraction-rate simulation");
  rate_cmd->add_option("--config", rate.config, "JSON config")->required();
  rate_cmd->add_option("--out", rate.out, "Output prefix for .json and .csv")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    kernels::configure_threads_from_env();
    if (*gen_cmd) run_gen_graph(gen, globals, out);
    else if (*spec_cmd) run_spectrum(spec_args, globals, out);
    else if (*geo_cmd) run_fit_geometry(geo, globals, out);
    else if (*fit_cmd) run_fit(fit, globals, out);
    else if (*prior_cmd) run_sample_prior(prior, globals, out);
    else if (*rate_cmd) run_rate(rate, globals, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace lapreg
