#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lapreg/error.hpp"
#include "lapreg/priors.hpp"
#include "oracles.hpp"

using namespace lapreg;
using doctest::Approx;

namespace {

Eigen::MatrixXd spectral_covariance(const ConditionalGaussian& cg, const Spectrum& s) {
  return s.basis() * cg.coefficient_variances().asDiagonal() * s.basis().transpose();
}

double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("priors") {
  TEST_CASE("precision eigenvalues at lambda = 0") {
    const Spectrum s2 = eig(make_path(2));
    const auto exp_cg = precision_eigenvalues(PriorSpec::exponential(1.3), s2, 0.7);
    CHECK(exp_cg.precision()(0) == Approx(0.5));
    CHECK(exp_cg.coefficient_variances()(0) == Approx(1.0));

    const auto pow_cg = precision_eigenvalues(PriorSpec::power(1.0, 1.0), s2, 1.0);
    CHECK(pow_cg.precision()(0) == Approx(1.0).epsilon(1e-14));
    // lambda_1 = 2: ((2/1)^2 (2 + 1/4))^{3/2} = 9^{3/2} = 27
    CHECK(pow_cg.precision()(1) == Approx(27.0).epsilon(1e-13));

    CHECK_THROWS_AS(precision_eigenvalues(PriorSpec::power(1.0, 1.0), s2, 0.0), ValidationError);
    CHECK_THROWS_AS(precision_eigenvalues(PriorSpec::exponential(1.0), s2, -1.0), ValidationError);
    CHECK_THROWS_AS(PriorSpec::power(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(PriorSpec::power(1.0, -1.0), ValidationError);
  }

  TEST_CASE("power prior covariance matches the dense matrix power") {
    std::mt19937_64 rng(21);
    struct Case { double alpha, r, c; };
    for (const Case& k : {Case{1.0, 1.0, 1.0}, Case{2.0, 2.0, 0.5}, Case{0.5, 3.0, 2.0},
                          Case{1.5, 1.0, 0.3}}) {
      const Graph g = oracle::random_connected_graph(8, 0.3, rng);
      const Spectrum s = eig(g);
      const auto cg = precision_eigenvalues(PriorSpec::power(k.alpha, k.r), s, k.c);
      const Eigen::MatrixXd dense = oracle::power_covariance(oracle::laplacian(g), k.alpha, k.r, k.c);
      CHECK(max_rel_diff(spectral_covariance(cg, s), dense) < 1e-8);
    }
  }

  TEST_CASE("exponential prior covariance matches the dense matrix exponential") {
    std::mt19937_64 rng(22);
    for (double c : {0.5, 1.0, 4.0}) {
      for (double r : {1.0, 2.0}) {
        const Graph g = oracle::random_connected_graph(7, 0.3, rng);
        const Spectrum s = eig(g);
        const auto cg = precision_eigenvalues(PriorSpec::exponential(r), s, c);
        const Eigen::MatrixXd dense = oracle::exponential_covariance(oracle::laplacian(g), r, c);
        CHECK(max_rel_diff(spectral_covariance(cg, s), dense) < 1e-8);
      }
    }
  }

  TEST_CASE("precision increases with the Laplacian eigenvalue") {
    const Spectrum s = eig(make_path(40));
    for (const auto& spec : {PriorSpec::power(1.0, 1.0), PriorSpec::exponential(1.0)}) {
      const auto mu = precision_eigenvalues(spec, s, 0.8).log_precision();
      for (Eigen::Index i = 1; i < mu.size(); ++i) CHECK(mu(i) > mu(i - 1));
    }
  }

  TEST_CASE("exponential prior survives huge exponents") {
    const Spectrum s = eig(make_path(400));
    const auto cg = precision_eigenvalues(PriorSpec::exponential(1.0), s, 1e-3);
    CHECK(std::isinf(cg.precision()(399)));
    CHECK(cg.coefficient_variances()(399) < 1e-300);
    CHECK(cg.coefficient_variances()(0) == Approx(1.0));
  }

  TEST_CASE("series sampler moments") {
    const Spectrum s = eig(make_path(5));
    const auto cg = precision_eigenvalues(PriorSpec::power(1.0, 1.0), s, 1.5);
    CHECK(prior_draw_from_normals(cg, s, Eigen::VectorXd::Zero(5)).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(123);
    const int draws = 10000;
    std::vector<std::vector<double>> coeff(5);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(5, 5);
    for (int k = 0; k < draws; ++k) {
      const Eigen::VectorXd f = sample_prior(cg, s, rng);
      const Eigen::VectorXd c = s.coefficients(f);
      for (int i = 0; i < 5; ++i) coeff[static_cast<std::size_t>(i)].push_back(c(i));
      second += f * f.transpose();
    }
    const Eigen::VectorXd expected = cg.coefficient_variances();
    for (int i = 0; i < 5; ++i) {
      const auto est = oracle::variance_with_error(coeff[static_cast<std::size_t>(i)], draws);
      CHECK(std::abs(est.variance - expected(i)) < 5.0 * est.standard_error);
    }
    // brute-force covariance assembly, entrywise MC tolerance
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i) cov += s.basis().col(i) * s.basis().col(i).transpose() * expected(i);
    const Eigen::MatrixXd empirical = second / draws;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        const double se = std::sqrt((cov(a, a) * cov(b, b) + cov(a, b) * cov(a, b)) / draws);
        CHECK(std::abs(empirical(a, b) - cov(a, b)) < 5.0 * se);
      }
  }

  TEST_CASE("sampling is deterministic given the seed") {
    const Spectrum s = eig(make_ring(12));
    const auto cg = precision_eigenvalues(PriorSpec::exponential(1.0), s, 0.4);
    std::mt19937_64 a(77), b(77);
    CHECK(sample_prior(cg, s, a) == sample_prior(cg, s, b));
  }

  TEST_CASE("scale hyperprior") {
    std::mt19937_64 rng(8);
    const int draws = 100000;
    double sum = 0.0;
    for (int k = 0; k < draws; ++k) {
      const double c = sample_c(rng);
      CHECK(c > 0.0);
      sum += c;
    }
    CHECK(std::abs(sum / draws - 1.0) < 5.0 / std::sqrt(static_cast<double>(draws)));
    CHECK(c_prior_logdensity(1.0) == -1.0);
    CHECK(c_prior_logdensity(-1.0) == -std::numeric_limits<double>::infinity());
    CHECK(c_prior_logdensity(0.0) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("rkhs norm") {
    const Spectrum s = eig(make_path(4));
    for (const auto& spec : {PriorSpec::power(1.0, 1.0), PriorSpec::exponential(1.0)}) {
      const auto cg = precision_eigenvalues(spec, s, 2.5);
      const Eigen::VectorXd mu = cg.precision();
      for (Eigen::Index j = 0; j < 4; ++j) {
        const Eigen::VectorXd h = s.basis().col(j) / std::sqrt(4.0 * mu(j));
        CHECK(rkhs_norm_sq(cg, s, h) == Approx(1.0).epsilon(1e-12));
      }
      CHECK(rkhs_norm_sq(cg, s, Eigen::VectorXd::Zero(4)) == 0.0);
      CHECK_THROWS_AS(rkhs_norm_sq(cg, s, Eigen::VectorXd::Zero(5)), ValidationError);

      const Eigen::MatrixXd lap = oracle::laplacian(make_path(4));
      const Eigen::MatrixXd dense = spec.is_power() ? oracle::power_covariance(lap, 1.0, 1.0, 2.5)
                                                    : oracle::exponential_covariance(lap, 1.0, 2.5);
      const Eigen::VectorXd h = Eigen::Vector4d(0.3, -1.0, 2.0, 0.5);
      const double brute = h.dot(dense.inverse() * h);
      CHECK(rkhs_norm_sq(cg, s, h) == Approx(brute).epsilon(1e-8));
    }
  }

  TEST_CASE("power prior draws and Sobolev smoothness (diagnostic)") {
    const Spectrum s = eig(make_path(200));
    const auto spec = PriorSpec::power(2.0, 1.0);
    std::mt19937_64 rng(31);
    int inside = 0;
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd f = sample_prior(precision_eigenvalues(spec, s, 1.0), s, rng);
      if (sobolev_norm_sq(s, f, 1.0, 1.0) < 100.0) ++inside;
    }
    MESSAGE("power prior (alpha=2) draws with H^1 norm^2 < 100: " << inside << "/50");
  }
}
