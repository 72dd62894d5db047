#include "fsir/simulate.hpp"

#include <cmath>
#include <limits>

#include "fsir/rng.hpp"

namespace fsir {

std::string to_string(ExampleKind k) {
  switch (k) {
    case ExampleKind::binary: return "binary";
    case ExampleKind::categorical: return "categorical";
    default: return "continuous";
  }
}

ExampleKind example_kind_from_string(const std::string& s) {
  if (s == "binary") return ExampleKind::binary;
  if (s == "categorical") return ExampleKind::categorical;
  if (s == "continuous") return ExampleKind::continuous;
  throw invalid_input("unknown example kind: " + s);
}

void ExampleSpec::validate() const {
  if (!(alpha > 0.0)) throw invalid_input("example: alpha must be > 0");
  if (!(delta > 0.0 && delta <= 0.5))
    throw invalid_input("example: delta must be in (0, 1/2]");
  if (n_basis < 1) throw invalid_input("example: n_basis must be >= 1");
  if (levels) {
    if (kind != ExampleKind::categorical)
      throw invalid_input("example: levels only valid for categorical kind");
    const auto& lv = *levels;
    if (lv.size() < 2) throw invalid_input("example: need >= 2 levels");
    double mean = 0.0, var = 0.0;
    for (double v : lv) mean += v;
    mean /= static_cast<double>(lv.size());
    for (double v : lv) var += (v - mean) * (v - mean);
    var /= static_cast<double>(lv.size());
    if (std::abs(mean) > 1e-12 || std::abs(var - 1.0) > 1e-12)
      throw invalid_input("example: levels must have mean 0 and variance 1");
  }
}

std::vector<double> ExampleSpec::effective_levels() const {
  if (levels) return *levels;
  // three equispaced points scaled to unit variance
  const double c = std::sqrt(1.5);
  return {-c, 0.0, c};
}

double partial_power_sum(double p, int n) {
  if (n < 0) throw invalid_input("partial_power_sum: n must be >= 0");
  double s = 0.0;
  for (int i = n; i >= 1; --i) s += std::pow(static_cast<double>(i), -p);
  return s;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

std::vector<Sample> sample_process(const SpectralOperator& g, int n,
                                   std::uint64_t seed) {
  if (n < 1) throw invalid_input("sample_process: n must be >= 1");
  const int r = g.rank();
  const Eigen::VectorXd sqrt_xi = g.eigvals().cwiseSqrt();
  std::vector<Sample> out(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd z(r);
    for (int i = 0; i < r; ++i) z[i] = rng.normal();
    Sample& smp = out[static_cast<std::size_t>(s)];
    smp.y = std::numeric_limits<double>::quiet_NaN();
    smp.a = g.eigvecs() * (sqrt_xi.array() * z.array()).matrix();
  }
  return out;
}

std::vector<Sample> gen_example(const ExampleSpec& spec, const BasisPtr& basis,
                                int n, std::uint64_t seed) {
  spec.validate();
  if (!basis) throw invalid_input("gen_example: missing basis");
  if (basis->n_basis() != spec.n_basis)
    throw invalid_input("gen_example: basis size != example n_basis");
  if (n < 1) throw invalid_input("gen_example: n must be >= 1");

  const int nb = spec.n_basis;
  Eigen::VectorXd signal(nb), noise_sd(nb);
  for (int i = 1; i <= nb; ++i) {
    signal[i - 1] = std::pow(static_cast<double>(i), -(2.0 + spec.delta));
    noise_sd[i - 1] = 1.0 / static_cast<double>(i);
  }
  const std::vector<double> lv = spec.effective_levels();

  std::vector<Sample> out(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    double y = 0.0;
    switch (spec.kind) {
      case ExampleKind::binary:
        y = rng.uniform() <= 0.5 ? 1.0 : -1.0;
        break;
      case ExampleKind::categorical: {
        const auto k = lv.size();
        auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
        if (idx >= k) idx = k - 1;
        y = lv[idx];
        break;
      }
      case ExampleKind::continuous:
        y = rng.normal();
        break;
    }
    Sample& smp = out[static_cast<std::size_t>(s)];
    smp.y = y;
    smp.a.resize(nb);
    for (int i = 0; i < nb; ++i)
      smp.a[i] = spec.alpha * y * signal[i] + noise_sd[i] * rng.normal();
  }
  return out;
}

OracleKernels oracle_kernels(const ExampleSpec& spec, const BasisPtr& basis) {
  spec.validate();
  if (!basis) throw invalid_input("oracle_kernels: missing basis");
  if (basis->n_basis() != spec.n_basis)
    throw invalid_input("oracle_kernels: basis size != example n_basis");
  const int nb = spec.n_basis;

  Eigen::VectorXd xi_w(nb), g(nb);
  for (int i = 1; i <= nb; ++i) {
    xi_w[i - 1] = std::pow(static_cast<double>(i), -2.0);
    g[i - 1] = std::pow(static_cast<double>(i), -(2.0 + spec.delta));
  }

  SpectralOperator gamma_w(xi_w, Eigen::MatrixXd::Identity(nb, nb), basis);

  // Gamma_e = alpha^2 g (x) g: single eigenfunction g/|g|,
  // eigenvalue alpha^2 |g|^2.
  const double gn = g.norm();
  Eigen::VectorXd ev_e(1);
  ev_e[0] = spec.alpha * spec.alpha * gn * gn;
  Eigen::MatrixXd vec_e = g / gn;
  SpectralOperator gamma_e(ev_e, vec_e, basis);

  Eigen::MatrixXd c = xi_w.asDiagonal();
  c += spec.alpha * spec.alpha * g * g.transpose();
  SpectralOperator gamma = decompose_coefficient_matrix(c, basis, 0.0);

  return OracleKernels{std::move(gamma_w), std::move(gamma_e),
                       std::move(gamma)};
}

FunctionCoef oracle_beta(const ExampleSpec& spec, const BasisPtr& basis) {
  spec.validate();
  if (!basis) throw invalid_input("oracle_beta: missing basis");
  if (basis->n_basis() != spec.n_basis)
    throw invalid_input("oracle_beta: basis size != example n_basis");
  FunctionCoef beta;
  beta.basis = basis;
  beta.coef.resize(spec.n_basis);
  for (int i = 1; i <= spec.n_basis; ++i)
    beta.coef[i - 1] = std::pow(static_cast<double>(i), -spec.delta);
  return beta;
}

double rayleigh_ratio(const FunctionCoef& beta, const SpectralOperator& ge,
                      const SpectralOperator& gw) {
  const double num = l2_inner(apply(ge, beta), beta);
  const double den = l2_inner(apply(gw, beta), beta);
  if (!(den > 0.0))
    throw numeric_error("rayleigh_ratio: denominator not positive");
  return num / den;
}

double analytic_error_rate(const ExampleSpec& spec) {
  spec.validate();
  if (spec.kind != ExampleKind::binary)
    throw invalid_input("analytic_error_rate: binary kind only");
  const double s = partial_power_sum(2.0 + 2.0 * spec.delta, spec.n_basis);
  return normal_cdf(-spec.alpha * std::sqrt(s));
}

}  // namespace fsir
