#include "lapreg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "lapreg/error.hpp"

namespace lapreg::io {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Eigen::VectorXd read_vertex_values(std::istream& in, std::size_t n) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(n));
  std::vector<bool> seen(n, false);
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("data line " + std::to_string(lineno) + ": expected 'vertex,value'");
    const std::string vtext = trim(line.substr(0, comma));
    const std::string xtext = trim(line.substr(comma + 1));
    long long vertex = 0;
    double value = 0.0;
    try {
      std::size_t used = 0;
      vertex = std::stoll(vtext, &used);
      if (used != vtext.size()) throw std::invalid_argument("vertex");
      value = std::stod(xtext, &used);
      if (used != xtext.size()) throw std::invalid_argument("value");
    } catch (const std::exception&) {
      if (rows == 0 && !header_skipped) {
        header_skipped = true;
        continue;
      }
      throw ValidationError("data line " + std::to_string(lineno) + ": cannot parse '" + line +
                            "'");
    }
    if (vertex < 1 || static_cast<std::size_t>(vertex) > n)
      throw ValidationError("data line " + std::to_string(lineno) + ": vertex " +
                            std::to_string(vertex) + " outside 1.." + std::to_string(n));
    const auto idx = static_cast<std::size_t>(vertex - 1);
    if (seen[idx])
      throw ValidationError("data line " + std::to_string(lineno) + ": vertex " +
                            std::to_string(vertex) + " listed twice");
    if (!std::isfinite(value))
      throw ValidationError("data line " + std::to_string(lineno) + ": value is not finite");
    seen[idx] = true;
    values(static_cast<Eigen::Index>(idx)) = value;
    ++rows;
  }
  if (rows != n)
    throw ValidationError("data covers " + std::to_string(rows) + " vertices, graph has " +
                          std::to_string(n));
  return values;
}

Eigen::VectorXd load_vertex_values(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file " + path.string());
  return read_vertex_values(in, n);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::string join_numbers(std::span<const double> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_number(values[i]);
  }
  return out;
}

nlohmann::json to_json(const GeometryFit& fit) {
  return {{"r_hat", round12(fit.r_hat)},
          {"slope", round12(fit.slope)},
          {"intercept", round12(fit.intercept)},
          {"window", {fit.i_lo, fit.i_hi}},
          {"residual_rms", round12(fit.residual_rms)},
          {"r_below_one", fit.below_one}};
}

nlohmann::json to_json(const PosteriorSummary& summary) {
  nlohmann::json j;
  j["n"] = summary.mean.size();
  auto grid = nlohmann::json::array();
  for (const auto& node : summary.grid)
    grid.push_back({{"c", round12(node.c)},
                    {"sigma", round12(node.sigma)},
                    {"log_marginal", round12(node.log_marginal)},
                    {"weight", round12(node.weight)}});
  j["grid"] = std::move(grid);
  if (summary.mcmc) {
    const auto& m = *summary.mcmc;
    j["mcmc"] = {{"chains", m.chains},
                 {"samples_per_chain", m.samples_per_chain},
                 {"pcn_acceptance", round12(m.pcn_acceptance)},
                 {"c_acceptance", round12(m.c_acceptance)},
                 {"pcn_step", round12(m.pcn_step)},
                 {"posterior_mean_c", round12(m.posterior_mean_c)},
                 {"ess_log_c", round12(m.ess_log_c)},
                 {"ess_mean_f", round12(m.ess_mean_f)}};
  } else {
    j["mcmc"] = nullptr;
  }
  j["warnings"] = summary.warnings;
  return j;
}

std::string posterior_csv(const PosteriorSummary& summary) {
  std::ostringstream out;
  out << "vertex,mean,variance\n";
  for (Eigen::Index v = 0; v < summary.mean.size(); ++v)
    out << (v + 1) << ',' << format_number(summary.mean(v)) << ','
        << format_number(summary.pointwise_var(v)) << '\n';
  return out.str();
}

}  // namespace lapreg::io
