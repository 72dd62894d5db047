#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fsir/operators.hpp"

namespace fsir {

enum class ExampleKind { binary, categorical, continuous };

std::string to_string(ExampleKind k);
ExampleKind example_kind_from_string(const std::string& s);

/**
 * Synthetic single-index family
 *   X_y(t) = alpha y sum_i i^{-(2+delta)} psi_i(t) + sum_i i^{-1} Z_i psi_i(t)
 * truncated at n_basis terms, Z_i iid standard normal, with y binary (+/-1
 * equiprobable), categorical (uniform over normalized levels), or
 * continuous (standard normal).  E y = 0 and Var y = 1 in all three cases,
 * so the three kinds share the same noise and between-class covariances.
 */
struct ExampleSpec {
  ExampleKind kind = ExampleKind::binary;
  double alpha = 1.0;
  double delta = 0.5;
  int n_basis = 50;
  std::optional<std::vector<double>> levels;  // categorical only

  void validate() const;
  // Levels actually used: provided ones, or 3 equispaced normalized points.
  std::vector<double> effective_levels() const;
};

struct Sample {
  double y;  // NaN when the process is sampled without a response
  Eigen::VectorXd a;
};

// sum_{i=1}^{n} i^{-p}, accumulated smallest terms first.
double partial_power_sum(double p, int n);

// Standard normal CDF.
double normal_cdf(double x);

/**
 * n independent draws X = sum_i xi_i^{1/2} Z_i phi_i from the mean-zero
 * Gaussian process with covariance g.  Stream s of the counter RNG drives
 * sample s, so results are independent of evaluation order and replicates
 * (seed, index) are reproducible in isolation.
 */
std::vector<Sample> sample_process(const SpectralOperator& g, int n,
                                   std::uint64_t seed);

// n labelled draws from the example family, coefficients in `basis`.
std::vector<Sample> gen_example(const ExampleSpec& spec, const BasisPtr& basis,
                                int n, std::uint64_t seed);

struct OracleKernels {
  SpectralOperator gamma_w;  // noise covariance, spectrum i^{-2} on psi_i
  SpectralOperator gamma_e;  // rank one, alpha^2 g (x) g
  SpectralOperator gamma;    // gamma_w + gamma_e, rediagonalized
};

OracleKernels oracle_kernels(const ExampleSpec& spec, const BasisPtr& basis);

// Optimal direction beta = sum_i i^{-delta} psi_i (unit leading coefficient).
FunctionCoef oracle_beta(const ExampleSpec& spec, const BasisPtr& basis);

// <Gamma_e beta, beta> / <Gamma_w beta, beta>.
double rayleigh_ratio(const FunctionCoef& beta, const SpectralOperator& ge,
                      const SpectralOperator& gw);

// Bayes misclassification rate Phi(-alpha sqrt(S_N)),
// S_N = sum_{i<=N} i^{-(2+2 delta)}; binary kind only.
double analytic_error_rate(const ExampleSpec& spec);

}  // namespace fsir
