#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lapreg/error.hpp"
#include "lapreg/spectral.hpp"
#include "oracles.hpp"

using namespace lapreg;
using doctest::Approx;

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("laplacian assembly and action") {
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK(laplacian(make_path(2)) == expected);

    const Graph k3 = make_complete(3);
    const Eigen::VectorXd f = Eigen::Vector3d(1, 0, 0);
    CHECK(apply_laplacian(k3, f) == Eigen::Vector3d(2, -1, -1));
    CHECK(laplacian(k3) * f == Eigen::Vector3d(2, -1, -1));

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = oracle::random_connected_graph(12, 0.25, rng);
      const Eigen::MatrixXd lap = laplacian(g);
      CHECK((lap - oracle::laplacian(g)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(lap.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
      CHECK(apply_laplacian(g, Eigen::VectorXd::Constant(12, 3.5)).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(12, -1.0, 2.0);
      CHECK((apply_laplacian(g, x) - lap * x).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("small spectra against a Jacobi oracle") {
    const auto p3 = eig(make_path(3));
    const auto jac = oracle::jacobi_eigenvalues(oracle::laplacian(make_path(3)));
    REQUIRE(jac.size() == 3);
    CHECK(jac[0] == Approx(0.0));
    CHECK(jac[1] == Approx(1.0));
    CHECK(jac[2] == Approx(3.0));
    for (int i = 0; i < 3; ++i) CHECK(p3.eigenvalues()(i) == Approx(jac[static_cast<std::size_t>(i)]).epsilon(1e-12));

    const auto ring4 = as_vector(eig(make_ring(4)).eigenvalues());
    const std::vector<double> ring_expected{0, 2, 2, 4};
    for (std::size_t i = 0; i < 4; ++i) CHECK(ring4[i] == Approx(ring_expected[i]).epsilon(1e-12));

    const auto k3 = as_vector(eig(make_complete(3)).eigenvalues());
    CHECK(k3[0] == 0.0);
    CHECK(k3[1] == Approx(3.0).epsilon(1e-12));
    CHECK(k3[2] == Approx(3.0).epsilon(1e-12));

    const auto p100 = eig(make_path(100));
    const double closed = 4.0 * std::pow(std::sin(std::numbers::pi / 200.0), 2);
    CHECK(closed == Approx(9.8688e-4).epsilon(1e-4));
    CHECK(std::abs(p100.eigenvalues()(1) - closed) < 1e-12);
  }

  TEST_CASE("eigenbasis invariants") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = oracle::random_connected_graph(20, 0.2, rng);
      const Spectrum s = eig(g);
      const double n = 20.0;
      const auto& psi = s.basis();
      CHECK(s.eigenvalues()(0) == 0.0);
      CHECK(s.eigenvalues()(1) > 0.0);
      CHECK((psi.col(0).array() == 1.0).all());
      // <psi_i, psi_j>_n = delta_ij
      const Eigen::MatrixXd gram = psi.transpose() * psi / n;
      CHECK((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::MatrixXd lap = oracle::laplacian(g);
      CHECK((lap * psi - psi * s.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff() < 1e-9);
      // L = sum lambda_i psi_i psi_i^T / n
      const Eigen::MatrixXd rebuilt = psi * s.eigenvalues().asDiagonal() * psi.transpose() / n;
      CHECK((rebuilt - lap).cwiseAbs().maxCoeff() <= 1e-8 * n);
      for (Eigen::Index i = 1; i < 20; ++i) {
        Eigen::Index k = 0;
        while (std::abs(psi(k, i)) <= 1e-8) ++k;
        CHECK(psi(k, i) > 0.0);
      }
      CHECK(std::is_sorted(s.eigenvalues().begin(), s.eigenvalues().end()));
    }
  }

  TEST_CASE("parseval") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    const Spectrum s = eig(make_lollipop(5, 20));
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd f(25);
      for (auto& v : f) v = normal(rng);
      CHECK(norm_n_sq(f) == Approx(s.coefficients(f).squaredNorm()).epsilon(1e-12));
      CHECK((s.synthesize(s.coefficients(f)) - f).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(s.coefficients(Eigen::VectorXd::Zero(3)), ValidationError);
  }

  TEST_CASE("grid spectrum is the pairwise sum of path spectra") {
    for (std::size_t side : {3u, 6u, 9u}) {
      const auto path = as_vector(eig(make_path(side)).eigenvalues());
      std::vector<double> sums;
      for (double a : path)
        for (double b : path) sums.push_back(a + b);
      std::sort(sums.begin(), sums.end());
      const auto grid = as_vector(eig(make_grid(2, side)).eigenvalues());
      REQUIRE(grid.size() == sums.size());
      for (std::size_t i = 0; i < sums.size(); ++i) CHECK(std::abs(grid[i] - sums[i]) < 1e-10);
    }
  }

  TEST_CASE("interlacing under edge addition") {
    std::mt19937_64 rng(17);
    int checked = 0;
    while (checked < 60) {
      std::uniform_int_distribution<std::size_t> size(4, 14);
      const std::size_t n = size(rng);
      const Graph g = oracle::random_connected_graph(n, 0.15, rng);
      std::uniform_int_distribution<Vertex> pick(1, static_cast<Vertex>(n));
      const Vertex u = pick(rng), v = pick(rng);
      if (u == v || g.has_edge(u, v)) continue;
      const auto before = eig(g).eigenvalues();
      const auto after = eig(add_edge(g, u, v)).eigenvalues();
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(before(i) <= after(i) + 1e-10);
        if (i + 1 < n) CHECK(after(i) <= before(i + 1) + 1e-10);
      }
      ++checked;
    }
  }

  TEST_CASE("algebraic connectivity lower bound") {
    for (const Graph& g : {make_path(50), make_ring(40), make_lollipop(6, 30), make_ladder(30),
                           make_grid(2, 6), watts_strogatz(80, 0.25, 3)}) {
      const double n = static_cast<double>(g.num_vertices());
      CHECK(eig(g).eigenvalues()(1) >= 4.0 / (n * n));
    }
  }

  TEST_CASE("single vertex") {
    const Spectrum s = eig(make_single_vertex());
    CHECK(s.size() == 1);
    CHECK(s.eigenvalues()(0) == 0.0);
  }

  TEST_CASE("geometry fit on an exact power law") {
    const std::size_t n = 500;
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = std::pow(static_cast<double>(i) / n, 2.0 / 1.4);
    const GeometryFit fit = geometry_fit(ev);
    CHECK(fit.slope == Approx(2.0 / 1.4).epsilon(1e-12));
    CHECK(fit.r_hat == Approx(1.4).epsilon(1e-12));
    CHECK(fit.residual_rms < 1e-12);
    CHECK(fit.i_lo == 4);
    CHECK(fit.i_hi == 175);
    CHECK_FALSE(fit.below_one);

    std::vector<double> steep(n);
    for (std::size_t i = 0; i < n; ++i) steep[i] = std::pow(static_cast<double>(i) / n, 4.0);
    CHECK(geometry_fit(steep).below_one);
  }

  TEST_CASE("geometry fit on the 20x20 grid") {
    const GeometryFit fit = geometry_fit(eig(make_grid(2, 20)));
    MESSAGE("grid(2,20): slope " << fit.slope << ", r_hat " << fit.r_hat);
    CHECK(fit.slope == Approx(1.0).epsilon(0.05));
    CHECK(fit.r_hat == Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("geometry fit errors") {
    std::vector<double> tiny{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS(geometry_fit(tiny), ValidationError);
    std::vector<double> zeros(100, 0.0);
    CHECK_THROWS_AS(geometry_fit(zeros), ValidationError);
    std::vector<double> ok(100, 1.0);
    CHECK_THROWS_AS(geometry_fit(ok, 3, 1.5), ValidationError);
  }

  TEST_CASE("sobolev norm") {
    const Spectrum s = eig(make_path(3));
    for (double beta : {0.5, 1.0, 3.0})
      for (double r : {1.0, 2.5})
        CHECK(sobolev_norm_sq(s, Eigen::VectorXd::Constant(3, -2.0), beta, r) ==
              Approx(4.0).epsilon(1e-12));
    CHECK(sobolev_norm_sq(s, s.basis().col(1), 1.0, 1.0) == Approx(10.0).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_norm_sq(s, Eigen::VectorXd::Zero(4), 1.0, 1.0), ValidationError);

    // discrete H^1: integral of f^2 + f'^2 for f(x) = sin(pi x)
    const std::size_t n = 500;
    const Spectrum big = eig(make_path(n));
    Eigen::VectorXd f(n);
    for (std::size_t v = 0; v < n; ++v)
      f(static_cast<Eigen::Index>(v)) = std::sin(std::numbers::pi * (v + 0.5) / n);
    const double continuum = 0.5 + std::numbers::pi * std::numbers::pi / 2.0;
    CHECK(sobolev_norm_sq(big, f, 1.0, 1.0) == Approx(continuum).epsilon(0.01));
  }

  TEST_CASE("geometry window checks") {
    const std::size_t n = 300;
    const Spectrum path = eig(make_path(n));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto ok = check_geometry_window(path, 1.0, 4.0, pi2, 1, 0.35);
    CHECK(ok.holds);
    CHECK_FALSE(ok.first_violation);
    CHECK(ok.i_hi == 105);

    const auto bad = check_geometry_window(path, 0.5, 4.0, pi2, 1, 0.35);
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.first_violation);

    // with r < 1 the ratio lambda_i / (i/n)^{2/r} spreads without bound as n grows
    double previous_spread = 0.0;
    for (std::size_t m : {50u, 100u, 200u, 400u}) {
      const auto rep = check_geometry_window(eig(make_path(m)), 0.5, 0.0, 1e300, 1, 0.35);
      const double spread = rep.max_ratio / rep.min_ratio;
      CHECK(spread > previous_spread * 3.0);
      previous_spread = spread;
    }

    std::vector<double> exact(n);
    for (std::size_t i = 0; i < n; ++i) exact[i] = std::pow(static_cast<double>(i) / n, 2.0 / 1.7);
    CHECK(check_geometry_window(exact, 1.7, 1.0, 1.0, 1, 0.5).holds);
    CHECK_THROWS_AS(check_geometry_window(exact, 1.0, 1.0, 1.0, 0, 0.5), ValidationError);
  }
}
