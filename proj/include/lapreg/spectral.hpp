#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "lapreg/graph.hpp"

namespace lapreg {

/// Dense L = D - A.
Eigen::MatrixXd laplacian(const Graph& g);

/// (Lf)(i) = sum over neighbours j of f(i) - f(j), without forming L.
Eigen::VectorXd apply_laplacian(const Graph& g, const Eigen::VectorXd& f);

/// Ascending Laplacian eigenvalues with an eigenbasis orthonormal for
/// <f,g>_n = (1/n) sum f(v) g(v), i.e. every column has Euclidean norm sqrt(n).
///
/// Spectral coefficients of a graph function are f_i = <f, psi_i>_n, so
/// f = sum_i f_i psi_i and ||f||_n^2 = sum_i f_i^2.
class Spectrum {
 public:
  Spectrum(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis);

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// Column i is psi_i.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }

  /// f_i = <f, psi_i>_n for every i.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& f) const;
  /// sum_i c_i psi_i.
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd basis_;
};

struct EigOptions {
  /// Relative tolerance for the post-solve residual and orthonormality check.
  double tolerance = 1e-8;
};

/// Full dense eigendecomposition of the Laplacian. lambda_0 and psi_0 are set
/// to their exact values (0 and the all-ones vector); the other eigenvectors
/// have their first non-negligible entry positive. Throws NumericError if the
/// solver does not converge or the result fails the residual check.
Spectrum eig(const Graph& g, EigOptions opts = {});

/// ||f||_n^2.
double norm_n_sq(const Eigen::VectorXd& f);

struct GeometryFit {
  double r_hat = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t i_lo = 0;
  std::size_t i_hi = 0;
  double residual_rms = 0.0;
  /// Set when r_hat < 1; no graph satisfies the geometry condition there.
  bool below_one = false;
};

/// Least-squares line through (log(i/n), log lambda_i) for
/// i in [drop_low + 1, floor(kappa n)]; r_hat = 2 / slope.
GeometryFit geometry_fit(std::span<const double> eigenvalues, std::size_t drop_low = 3,
                         double kappa = 0.35);
GeometryFit geometry_fit(const Spectrum& s, std::size_t drop_low = 3, double kappa = 0.35);

/// <f, (I + (n^{2/r} L)^beta) f>_n evaluated in the eigenbasis.
double sobolev_norm_sq(const Spectrum& s, const Eigen::VectorXd& f, double beta, double r);

struct GeometryWindowReport {
  bool holds = true;
  std::size_t i_lo = 0;
  std::size_t i_hi = 0;
  std::optional<std::size_t> first_violation;
  /// Extremes of lambda_i / (i/n)^{2/r} over the window.
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Checks C1 (i/n)^{2/r} <= lambda_i <= C2 (i/n)^{2/r} for i in {i0..floor(kappa n)}.
GeometryWindowReport check_geometry_window(std::span<const double> eigenvalues, double r,
                                           double c1, double c2, std::size_t i0, double kappa);
GeometryWindowReport check_geometry_window(const Spectrum& s, double r, double c1, double c2,
                                           std::size_t i0, double kappa);

}  // namespace lapreg
