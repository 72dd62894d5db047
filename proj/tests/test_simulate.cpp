#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsir/rng.hpp"
#include "fsir/simulate.hpp"
#include "oracles.hpp"

using namespace fsir;

namespace {

BasisPtr basis_n(int n, int m = 0) {
  return BasisSpec::make(BasisFamily::cosine, n, m > 0 ? m : 2 * n);
}

ExampleSpec spec_binary(int n_basis, double alpha = 1.0, double delta = 0.5) {
  ExampleSpec s;
  s.kind = ExampleKind::binary;
  s.alpha = alpha;
  s.delta = delta;
  s.n_basis = n_basis;
  return s;
}

// noise z_i = i * (a_i - alpha y i^{-(2+delta)}) recovered from a sample
double recover_noise(const Sample& s, const ExampleSpec& spec, int i) {
  const double gi = std::pow(double(i), -(2.0 + spec.delta));
  return i * (s.a[i - 1] - spec.alpha * s.y * gi);
}

}  // namespace

TEST_CASE("partial power sums match an independent accumulation") {
  CHECK(partial_power_sum(2.0, 1000) ==
        doctest::Approx(double(oracle::psum(2.0L, 1000))).epsilon(1e-14));
  CHECK(partial_power_sum(5.0, 200) ==
        doctest::Approx(double(oracle::psum(5.0L, 200))).epsilon(1e-14));
  CHECK(partial_power_sum(3.0, 1) == 1.0);
}

TEST_CASE("normal cdf agrees with the erf oracle") {
  for (double x : {-3.0, -1.0, -0.5, 0.0, 0.7, 2.5})
    CHECK(normal_cdf(x) == doctest::Approx(oracle::phi(x)).epsilon(1e-14));
}

TEST_CASE("example spec validation") {
  ExampleSpec s = spec_binary(10);
  CHECK_NOTHROW(s.validate());

  ExampleSpec bad = s;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), invalid_input);
  bad = s;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), invalid_input);
  bad = s;
  bad.delta = 0.6;
  CHECK_THROWS_AS(bad.validate(), invalid_input);
  bad = s;
  bad.n_basis = 0;
  CHECK_THROWS_AS(bad.validate(), invalid_input);

  // levels only make sense for the categorical kind
  bad = s;
  bad.levels = std::vector<double>{-1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), invalid_input);

  ExampleSpec cat = s;
  cat.kind = ExampleKind::categorical;
  cat.levels = std::vector<double>{-1.0, 1.0};
  CHECK_NOTHROW(cat.validate());
  cat.levels = std::vector<double>{0.0, 2.0};  // mean 1
  CHECK_THROWS_AS(cat.validate(), invalid_input);
  cat.levels = std::vector<double>{-2.0, 2.0};  // variance 4
  CHECK_THROWS_AS(cat.validate(), invalid_input);
}

TEST_CASE("default categorical levels are three normalized points") {
  ExampleSpec cat = spec_binary(5);
  cat.kind = ExampleKind::categorical;
  const std::vector<double> lv = cat.effective_levels();
  REQUIRE(lv.size() == 3);
  const double r = std::sqrt(1.5);
  CHECK(lv[0] == doctest::Approx(-r).epsilon(1e-15));
  CHECK(lv[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(lv[2] == doctest::Approx(r).epsilon(1e-15));
}

TEST_CASE("generation is deterministic given the seed") {
  const auto b = basis_n(20);
  const ExampleSpec s = spec_binary(20, 2.0);
  const auto run1 = gen_example(s, b, 50, 7);
  const auto run2 = gen_example(s, b, 50, 7);
  REQUIRE(run1.size() == 50);
  for (int k = 0; k < 50; ++k) {
    CHECK(run1[k].y == run2[k].y);
    CHECK((run1[k].a - run2[k].a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sample k depends only on (seed, k), not on n") {
  const auto b = basis_n(10);
  const ExampleSpec s = spec_binary(10);
  const auto small = gen_example(s, b, 5, 99);
  const auto large = gen_example(s, b, 400, 99);
  for (int k = 0; k < 5; ++k) {
    CHECK(small[k].y == large[k].y);
    CHECK((small[k].a - large[k].a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("different seeds decorrelate the draws") {
  const auto b = basis_n(10);
  const ExampleSpec s = spec_binary(10);
  const auto run1 = gen_example(s, b, 200, 1);
  const auto run2 = gen_example(s, b, 200, 2);
  int same = 0;
  for (int k = 0; k < 200; ++k)
    if (run1[k].a[0] == run2[k].a[0]) ++same;
  CHECK(same == 0);
}

TEST_CASE("binary labels are balanced and recovered noise is standard normal") {
  const auto b = basis_n(10);
  const ExampleSpec s = spec_binary(10, 2.0);
  const int n = 4000;
  const auto data = gen_example(s, b, n, 31);

  int plus = 0;
  for (const auto& smp : data) {
    REQUIRE((smp.y == 1.0 || smp.y == -1.0));
    if (smp.y > 0) ++plus;
  }
  // 4 sigma band around n/2 with sigma = sqrt(n)/2
  CHECK(std::abs(plus - n / 2) < 2.0 * std::sqrt(double(n)));

  // KS: noise recovered from coordinate 1 vs fresh standard normals
  std::vector<double> z1, ref;
  z1.reserve(n);
  ref.reserve(n);
  CounterRng rng(777, 0);
  for (const auto& smp : data) z1.push_back(recover_noise(smp, s, 1));
  for (int k = 0; k < n; ++k) ref.push_back(rng.normal());
  CHECK(oracle::ks_two_sample_p(z1, ref) > 1e-3);

  // KS: noise in coordinate 3 split by class label
  std::vector<double> zp, zm;
  for (const auto& smp : data)
    (smp.y > 0 ? zp : zm).push_back(recover_noise(smp, s, 3));
  CHECK(oracle::ks_two_sample_p(zp, zm) > 1e-3);
}

TEST_CASE("class-conditional coordinate means match alpha y g_i") {
  const auto b = basis_n(8);
  const ExampleSpec s = spec_binary(8, 1.5, 0.25);
  const int n = 20000;
  const auto data = gen_example(s, b, n, 5);
  Eigen::VectorXd mean_p = Eigen::VectorXd::Zero(8);
  Eigen::VectorXd mean_m = Eigen::VectorXd::Zero(8);
  int np = 0, nm = 0;
  for (const auto& smp : data) {
    if (smp.y > 0) {
      mean_p += smp.a;
      ++np;
    } else {
      mean_m += smp.a;
      ++nm;
    }
  }
  mean_p /= np;
  mean_m /= nm;
  for (int i = 1; i <= 8; ++i) {
    const double gi = std::pow(double(i), -(2.0 + s.delta));
    const double se_p = (1.0 / i) / std::sqrt(double(np));
    const double se_m = (1.0 / i) / std::sqrt(double(nm));
    CHECK(std::abs(mean_p[i - 1] - s.alpha * gi) < 4.0 * se_p);
    CHECK(std::abs(mean_m[i - 1] + s.alpha * gi) < 4.0 * se_m);
  }
}

TEST_CASE("categorical labels land on the level set uniformly") {
  const auto b = basis_n(6);
  ExampleSpec s = spec_binary(6);
  s.kind = ExampleKind::categorical;
  const int n = 3000;
  const auto data = gen_example(s, b, n, 11);
  const std::vector<double> lv = s.effective_levels();
  std::vector<int> counts(lv.size(), 0);
  for (const auto& smp : data) {
    auto it = std::find(lv.begin(), lv.end(), smp.y);
    REQUIRE(it != lv.end());
    ++counts[std::size_t(it - lv.begin())];
  }
  for (int c : counts)
    CHECK(std::abs(c - n / 3) < 4.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}

TEST_CASE("continuous labels look standard normal") {
  const auto b = basis_n(6);
  ExampleSpec s = spec_binary(6);
  s.kind = ExampleKind::continuous;
  const int n = 3000;
  const auto data = gen_example(s, b, n, 13);
  std::vector<double> ys, ref;
  CounterRng rng(1234, 0);
  for (const auto& smp : data) ys.push_back(smp.y);
  for (int k = 0; k < n; ++k) ref.push_back(rng.normal());
  CHECK(oracle::ks_two_sample_p(ys, ref) > 1e-3);
}

TEST_CASE("sample_process draws have the requested covariance spectrum") {
  const auto b = basis_n(20);
  const ExampleSpec s = spec_binary(20);
  const auto kern = oracle_kernels(s, b);
  const int n = 100000;
  const auto data = sample_process(kern.gamma_w, n, 17);
  REQUIRE(int(data.size()) == n);
  CHECK(std::isnan(data[0].y));

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(20);
  for (const auto& smp : data) mean += smp.a;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(20);
  for (const auto& smp : data)
    var += (smp.a - mean).cwiseAbs2();
  var /= (n - 1.0);
  for (int i = 1; i <= 20; ++i) {
    const double xi = 1.0 / (double(i) * i);
    const double se = xi * std::sqrt(2.0 / n);
    CHECK(std::abs(var[i - 1] - xi) < 5.0 * se);
  }

  // integrated second moment estimates the trace
  double m2 = 0.0, m4 = 0.0;
  for (const auto& smp : data) {
    const double q = smp.a.squaredNorm();
    m2 += q;
    m4 += q * q;
  }
  m2 /= n;
  m4 /= n;
  const double se_m2 = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(m2 - trace(kern.gamma_w)) < 5.0 * se_m2);
}

TEST_CASE("oracle kernels have the closed-form spectra") {
  const auto b = basis_n(40);
  const double alpha = 2.0, delta = 0.5;
  const ExampleSpec s = spec_binary(40, alpha, delta);
  const auto kern = oracle_kernels(s, b);

  REQUIRE(kern.gamma_w.rank() == 40);
  for (int i = 1; i <= 40; ++i) {
    const double xi = 1.0 / (double(i) * i);
    CHECK(std::abs(kern.gamma_w.eigvals()[i - 1] - xi) <= 2e-16 * xi);
  }

  REQUIRE(kern.gamma_e.rank() == 1);
  const double g2 = double(oracle::psum(4.0L + 2.0L * delta, 40));
  CHECK(kern.gamma_e.eigvals()[0] ==
        doctest::Approx(alpha * alpha * g2).epsilon(1e-13));
  // eigenfunction is g / |g|
  const Eigen::VectorXd v = kern.gamma_e.eigvecs().col(0);
  const double sgn = v[0] > 0 ? 1.0 : -1.0;
  for (int i = 1; i <= 40; ++i)
    CHECK(sgn * v[i - 1] ==
          doctest::Approx(std::pow(double(i), -(2.0 + delta)) /
                          std::sqrt(g2))
              .epsilon(1e-12));
}

TEST_CASE("oracle kernel of the mixture is the sum of its parts") {
  const auto b = basis_n(30);
  const ExampleSpec s = spec_binary(30, 1.5, 0.3);
  const auto kern = oracle_kernels(s, b);
  const Eigen::MatrixXd lhs = kern.gamma.coefficient_matrix();
  const Eigen::MatrixXd rhs =
      kern.gamma_w.coefficient_matrix() + kern.gamma_e.coefficient_matrix();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());

  const Eigen::MatrixXd kl = to_kernel(kern.gamma).values;
  const Eigen::MatrixXd kr =
      to_kernel(kern.gamma_w).values + to_kernel(kern.gamma_e).values;
  CHECK((kl - kr).cwiseAbs().maxCoeff() < 1e-12 * kr.cwiseAbs().maxCoeff());
}

TEST_CASE("the three response kinds share identical oracle kernels") {
  const auto b = basis_n(15);
  ExampleSpec sb = spec_binary(15, 1.2, 0.4);
  ExampleSpec sc = sb;
  sc.kind = ExampleKind::categorical;
  ExampleSpec sn = sb;
  sn.kind = ExampleKind::continuous;
  const auto kb = oracle_kernels(sb, b);
  const auto kc = oracle_kernels(sc, b);
  const auto kn = oracle_kernels(sn, b);
  CHECK((kb.gamma_e.eigvals() - kc.gamma_e.eigvals()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((kb.gamma_e.eigvals() - kn.gamma_e.eigvals()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((kb.gamma.eigvals() - kn.gamma.eigvals()).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("rayleigh ratio of the optimal direction hits alpha^2 S_N") {
  const auto b = basis_n(50);
  const double alpha = 2.0, delta = 0.5;
  const ExampleSpec s = spec_binary(50, alpha, delta);
  const auto kern = oracle_kernels(s, b);
  const FunctionCoef beta = oracle_beta(s, b);

  const double sn = double(oracle::psum(2.0L + 2.0L * delta, 50));
  const double rw = rayleigh_ratio(beta, kern.gamma_e, kern.gamma_w);
  CHECK(rw == doctest::Approx(alpha * alpha * sn).epsilon(1e-10));

  const double rg = rayleigh_ratio(beta, kern.gamma_e, kern.gamma);
  CHECK(rg == doctest::Approx(rw / (1.0 + rw)).epsilon(1e-10));

  FunctionCoef zero{Eigen::VectorXd::Zero(50), b};
  CHECK_THROWS_AS(rayleigh_ratio(zero, kern.gamma_e, kern.gamma_w),
                  numeric_error);
}

TEST_CASE("analytic error rate matches the closed form") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const ExampleSpec s = spec_binary(50, alpha, 0.5);
    const double sn = double(oracle::psum(3.0L, 50));
    CHECK(analytic_error_rate(s) ==
          doctest::Approx(oracle::phi(-alpha * std::sqrt(sn))).epsilon(1e-13));
  }
  ExampleSpec cont = spec_binary(50);
  cont.kind = ExampleKind::continuous;
  CHECK_THROWS_AS(analytic_error_rate(cont), invalid_input);
}

TEST_CASE("kind strings round trip") {
  for (auto k : {ExampleKind::binary, ExampleKind::categorical,
                 ExampleKind::continuous})
    CHECK(example_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(example_kind_from_string("other"), invalid_input);
}
