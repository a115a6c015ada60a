#include "lapreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lapreg/error.hpp"

namespace lapreg {

Eigen::MatrixXd laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const Eigen::Index a = e.u - 1;
    const Eigen::Index b = e.v - 1;
    lap(a, b) -= 1.0;
    lap(b, a) -= 1.0;
    lap(a, a) += 1.0;
    lap(b, b) += 1.0;
  }
  return lap;
}

Eigen::VectorXd apply_laplacian(const Graph& g, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != g.num_vertices())
    throw ValidationError("apply_laplacian: function length does not match the graph");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (const auto& e : g.edges()) {
    const Eigen::Index a = e.u - 1;
    const Eigen::Index b = e.v - 1;
    out(a) += f(a) - f(b);
    out(b) += f(b) - f(a);
  }
  return out;
}

Spectrum::Spectrum(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis)
    : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)) {
  if (basis_.rows() != eigenvalues_.size() || basis_.cols() != eigenvalues_.size())
    throw ValidationError("Spectrum: basis must be n x n for n eigenvalues");
}

Eigen::VectorXd Spectrum::coefficients(const Eigen::VectorXd& f) const {
  if (f.size() != eigenvalues_.size())
    throw ValidationError("function has length " + std::to_string(f.size()) + ", graph has " +
                          std::to_string(eigenvalues_.size()) + " vertices");
  return basis_.transpose() * f / static_cast<double>(f.size());
}

Eigen::VectorXd Spectrum::synthesize(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != eigenvalues_.size())
    throw ValidationError("coefficient vector length does not match the spectrum");
  return basis_ * coeffs;
}

Spectrum eig(const Graph& g, EigOptions opts) {
  const Eigen::MatrixXd lap = laplacian(g);
  const auto n = lap.rows();
  const double scale = std::sqrt(static_cast<double>(n));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigensolver did not converge for a graph with " + std::to_string(n) +
                       " vertices");

  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd basis = solver.eigenvectors() * scale;

  const double lambda_max = std::max(1.0, values(n - 1));
  if (std::abs(values(0)) > opts.tolerance * lambda_max)
    throw NumericError("smallest Laplacian eigenvalue " + std::to_string(values(0)) +
                       " is not zero");
  values(0) = 0.0;
  basis.col(0).setOnes();
  for (Eigen::Index i = 1; i < n; ++i) values(i) = std::max(values(i), 0.0);

  const double negligible = 1e-8;
  for (Eigen::Index i = 1; i < n; ++i) {
    auto col = basis.col(i);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(col(k)) > negligible) {
        if (col(k) < 0) col *= -1.0;
        break;
      }
    }
  }

  // L psi_i = lambda_i psi_i with |psi_i| = sqrt(n); L applied through the edge list
  Eigen::MatrixXd applied = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const Eigen::Index a = e.u - 1;
    const Eigen::Index b = e.v - 1;
    applied.row(a) += basis.row(a) - basis.row(b);
    applied.row(b) += basis.row(b) - basis.row(a);
  }
  const double residual = (applied - basis * values.asDiagonal()).cwiseAbs().maxCoeff() / scale;
  if (residual > opts.tolerance * lambda_max)
    throw NumericError("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");

  return Spectrum(std::move(values), std::move(basis));
}

double norm_n_sq(const Eigen::VectorXd& f) {
  return f.squaredNorm() / static_cast<double>(f.size());
}

GeometryFit geometry_fit(std::span<const double> eigenvalues, std::size_t drop_low,
                         double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw ValidationError("geometry_fit: kappa must lie in (0, 1]");
  const std::size_t n = eigenvalues.size();
  GeometryFit fit;
  fit.i_lo = drop_low + 1;
  fit.i_hi = std::min<std::size_t>(static_cast<std::size_t>(std::floor(kappa * n)), n - 1);
  if (n < 2 || fit.i_hi < fit.i_lo + 1)
    throw ValidationError("geometry_fit: window [" + std::to_string(fit.i_lo) + ", " +
                          std::to_string(fit.i_hi) + "] has fewer than two points");

  const std::size_t m = fit.i_hi - fit.i_lo + 1;
  Eigen::VectorXd x(m), y(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = fit.i_lo + k;
    if (!(eigenvalues[i] > 0.0))
      throw ValidationError("geometry_fit: eigenvalue " + std::to_string(i) +
                            " in the window is not positive");
    x(k) = std::log(static_cast<double>(i) / static_cast<double>(n));
    y(k) = std::log(eigenvalues[i]);
  }
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_hat = 2.0 / fit.slope;
  fit.residual_rms =
      std::sqrt((y.array() - fit.intercept - fit.slope * x.array()).square().mean());
  fit.below_one = fit.r_hat < 1.0;
  return fit;
}

GeometryFit geometry_fit(const Spectrum& s, std::size_t drop_low, double kappa) {
  const auto& ev = s.eigenvalues();
  return geometry_fit(std::span<const double>(ev.data(), s.size()), drop_low, kappa);
}

double sobolev_norm_sq(const Spectrum& s, const Eigen::VectorXd& f, double beta, double r) {
  if (!(beta > 0.0)) throw ValidationError("sobolev_norm_sq: beta must be positive");
  if (!(r > 0.0)) throw ValidationError("sobolev_norm_sq: r must be positive");
  const Eigen::VectorXd coeffs = s.coefficients(f);
  const double n = static_cast<double>(s.size());
  const double scale = std::pow(n, 2.0 * beta / r);
  double total = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    total += (1.0 + scale * std::pow(s.eigenvalues()(i), beta)) * coeffs(i) * coeffs(i);
  return total;
}

GeometryWindowReport check_geometry_window(std::span<const double> eigenvalues, double r,
                                           double c1, double c2, std::size_t i0, double kappa) {
  const std::size_t n = eigenvalues.size();
  GeometryWindowReport report;
  report.i_lo = i0;
  report.i_hi = std::min<std::size_t>(static_cast<std::size_t>(std::floor(kappa * n)), n - 1);
  if (i0 < 1 || i0 > report.i_hi)
    throw ValidationError("check_geometry_window: need 1 <= i0 <= kappa n");
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = i0; i <= report.i_hi; ++i) {
    const double ref = std::pow(static_cast<double>(i) / static_cast<double>(n), 2.0 / r);
    const double ratio = eigenvalues[i] / ref;
    report.min_ratio = std::min(report.min_ratio, ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (report.holds && (eigenvalues[i] < c1 * ref || eigenvalues[i] > c2 * ref)) {
      report.holds = false;
      report.first_violation = i;
    }
  }
  return report;
}

GeometryWindowReport check_geometry_window(const Spectrum& s, double r, double c1, double c2,
                                           std::size_t i0, double kappa) {
  const auto& ev = s.eigenvalues();
  return check_geometry_window(std::span<const double>(ev.data(), s.size()), r, c1, c2, i0,
                               kappa);
}

}  // namespace lapreg
