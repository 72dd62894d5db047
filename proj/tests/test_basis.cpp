#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fsir/basis.hpp"
#include "fsir/rng.hpp"
#include "oracles.hpp"

using namespace fsir;

TEST_CASE("quadrature weights integrate constants exactly") {
  for (auto rule : {QuadratureRule::trapezoid, QuadratureRule::gauss_legendre}) {
    const auto b = BasisSpec::make(BasisFamily::cosine, 8, 64, rule);
    CHECK(b->weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b->weights().minCoeff() > 0.0);
  }
}

TEST_CASE("orthonormality under quadrature for both families") {
  for (auto family : {BasisFamily::cosine, BasisFamily::fourier}) {
    for (auto rule :
         {QuadratureRule::trapezoid, QuadratureRule::gauss_legendre}) {
      const auto b = BasisSpec::make(family, 32, 128, rule);
      const Eigen::MatrixXd gram =
          b->design().transpose() * b->weights().asDiagonal() * b->design();
      const double err =
          (gram - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff();
      CHECK(err < 1e-8);
    }
  }
}

TEST_CASE("first basis function is the constant 1") {
  const auto b = BasisSpec::make(BasisFamily::fourier, 9, 64);
  for (int k = 0; k < b->grid_size(); ++k)
    CHECK(b->design()(k, 0) == 1.0);
}

TEST_CASE("cosine family matches direct evaluation on the grid") {
  const auto b = BasisSpec::make(BasisFamily::cosine, 6, 32);
  for (int k = 0; k < b->grid_size(); ++k) {
    const double t = b->nodes()[k];
    CHECK(b->design()(k, 1) ==
          doctest::Approx(std::sqrt(2.0) * std::cos(M_PI * t)).epsilon(1e-14));
    CHECK(b->design()(k, 4) ==
          doctest::Approx(std::sqrt(2.0) * std::cos(4 * M_PI * t))
              .epsilon(1e-14));
  }
}

TEST_CASE("fourier family matches direct evaluation at arbitrary points") {
  const auto b = BasisSpec::make(BasisFamily::fourier, 7, 64);
  Eigen::VectorXd pts(3);
  pts << 0.1, 0.37, 0.925;
  const Eigen::MatrixXd v = b->values_at(pts);
  for (int k = 0; k < 3; ++k) {
    const double t = pts[k];
    CHECK(v(k, 1) ==
          doctest::Approx(std::sqrt(2.0) * std::sin(2 * M_PI * t)).epsilon(1e-14));
    CHECK(v(k, 2) ==
          doctest::Approx(std::sqrt(2.0) * std::cos(2 * M_PI * t)).epsilon(1e-14));
    CHECK(v(k, 4) ==
          doctest::Approx(std::sqrt(2.0) * std::cos(4 * M_PI * t)).epsilon(1e-14));
    CHECK(v(k, 5) ==
          doctest::Approx(std::sqrt(2.0) * std::sin(6 * M_PI * t)).epsilon(1e-14));
  }
}

TEST_CASE("analyze(synthesize(f)) round trip is the identity") {
  for (auto family : {BasisFamily::cosine, BasisFamily::fourier}) {
    const auto b = BasisSpec::make(family, 40, 512);
    CounterRng rng(7, 0);
    FunctionCoef f;
    f.basis = b;
    f.coef.resize(40);
    for (int rep = 0; rep < 20; ++rep) {
      for (int i = 0; i < 40; ++i) f.coef[i] = rng.normal();
      const FunctionCoef back = analyze(synthesize(f), b);
      CHECK((back.coef - f.coef).norm() < 1e-10 * f.coef.norm());
    }
  }
}

TEST_CASE("analyze of t matches analytic integrals within quadrature error") {
  const auto b = BasisSpec::make(BasisFamily::cosine, 64, 512);
  const FunctionCoef f = analyze(b->nodes(), b);
  for (int i = 1; i <= 64; ++i)
    CHECK(std::abs(f.coef[i - 1] - oracle::cosine_coef_of_t(i)) < 1e-5);
}

TEST_CASE("Parseval under quadrature") {
  const auto b = BasisSpec::make(BasisFamily::cosine, 50, 512);
  CounterRng rng(11, 0);
  FunctionCoef f;
  f.basis = b;
  f.coef.resize(50);
  for (int i = 0; i < 50; ++i) f.coef[i] = rng.normal();
  const Eigen::VectorXd g = synthesize(f);
  const double quad_norm2 = b->weights().dot(g.cwiseProduct(g));
  CHECK(quad_norm2 == doctest::Approx(f.coef.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("construction rejects undersized grids and bad sizes") {
  CHECK_THROWS_AS(BasisSpec::make(BasisFamily::cosine, 40, 64), invalid_input);
  CHECK_THROWS_AS(BasisSpec::make(BasisFamily::cosine, 0, 64), invalid_input);
}

TEST_CASE("synthesize_at matches synthesize on the grid nodes") {
  const auto b = BasisSpec::make(BasisFamily::cosine, 16, 64);
  FunctionCoef f;
  f.basis = b;
  f.coef = Eigen::VectorXd::LinSpaced(16, 1.0, -0.5);
  const Eigen::VectorXd direct = synthesize(f);
  const Eigen::VectorXd at = synthesize_at(f, b->nodes());
  CHECK((direct - at).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("basis mismatch is an error") {
  const auto b1 = BasisSpec::make(BasisFamily::cosine, 8, 64);
  const auto b2 = BasisSpec::make(BasisFamily::fourier, 8, 64);
  FunctionCoef f{Eigen::VectorXd::Ones(8), b1};
  FunctionCoef g{Eigen::VectorXd::Ones(8), b2};
  CHECK_THROWS_AS(l2_inner(f, g), invalid_input);
}
