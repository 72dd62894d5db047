#pragma once

#include <optional>
#include <vector>

#include "fsir/operators.hpp"

namespace fsir {

enum class ObservationDesign { full_path, discrete_points };

std::string to_string(ObservationDesign d);
ObservationDesign observation_design_from_string(const std::string& s);

/**
 * n functional observations with responses.  For full_path designs,
 * `values` holds basis coefficients (n x N); for discrete_points designs it
 * holds raw observations x_i(t_k) at the shared points `obs_points`
 * (n x q).
 */
struct FunctionalDataset {
  ObservationDesign design = ObservationDesign::full_path;
  Eigen::VectorXd y;
  Eigen::MatrixXd values;
  Eigen::VectorXd obs_points;  // discrete_points only
  BasisPtr basis;

  void validate() const;
  int n() const { return static_cast<int>(y.size()); }
};

struct SliceSpec {
  enum class Mode { by_category, equal_count };
  Mode mode = Mode::by_category;
  int h = 2;  // equal_count only
};

/**
 * Slice partition of {0,...,n-1}.  by_category: one slice per distinct
 * response, ordered by ascending y.  equal_count: y-sorted contiguous
 * slices with sizes differing by at most one, ties kept in sample order.
 * Fewer than two distinct responses or an empty slice is an error.
 */
std::vector<std::vector<int>> slice_partition(const FunctionalDataset& data,
                                              const SliceSpec& spec);

struct SliceMeans {
  std::vector<double> weights;              // p_j = n_j / n
  std::vector<FunctionCoef> means;          // m_j
  std::vector<Eigen::VectorXd> alphas;      // representer coefficients
  std::vector<bool> degenerate;             // n_j == 1 (interpolating fit)
};

/**
 * Closed-form kernel-ridge representer for one slice mean observed at
 * points T: m(s) = sum_k Gamma(s, t_k) alpha_k with
 * alpha = (n_j K + C I)^{-1} sum_i x_i(T), K_{lk} = Gamma(t_l, t_k).
 * With C = 0 a singular K is an error.
 */
std::pair<FunctionCoef, Eigen::VectorXd> slice_mean_representer(
    const Eigen::MatrixXd& slice_values, const Eigen::VectorXd& obs_points,
    const SpectralOperator& gamma, double ridge_c);

// Subtracts the across-sample mean row from `values`.
FunctionalDataset grand_mean_center(const FunctionalDataset& data);

// (1/n) sum_i x_i (x) x_i in coefficient space; expects centered data.
SpectralOperator empirical_covariance(const FunctionalDataset& data,
                                      double rank_tol = 1e-12);

// sum_j p_j (m_j - mbar)(x)(m_j - mbar), mbar the p-weighted mean.
SpectralOperator between_slice_covariance(const SliceMeans& means);

struct FsirResult {
  Eigen::VectorXd eigvals;         // lambda_1 >= ... >= lambda_d in [0,1]
  std::vector<FunctionCoef> betas; // directions in the enlarged space
  std::vector<FunctionCoef> etas;  // whitened directions, L2-orthonormal
  double rank_tol = 0.0;
  double ridge_c = 0.0;
  bool rank_deficient = false;
};

/**
 * Top-d eigenpairs of T = Gamma^{-1/2} Gamma_e Gamma^{-1/2};
 * beta_j = Gamma^{-1/2} eta_j.  Sign fixed so the first eta coefficient
 * with magnitude > 1e-10 is positive.  If d exceeds rank(T) the available
 * directions are returned with rank_deficient set.
 */
FsirResult fsir_solve(const SpectralOperator& gamma,
                      const SpectralOperator& gamma_e, int d,
                      double rank_tol);

/**
 * Frobenius distance between metric-orthogonal projections onto the two
 * spans, computed after whitening by metric^{1/2}.  Range [0, sqrt(2d)];
 * 0 iff the spans agree.  A rank-deficient family is an error.
 */
double subspace_distance(const std::vector<FunctionCoef>& a,
                         const std::vector<FunctionCoef>& b,
                         const SpectralOperator& metric);

// <Gamma a, b> / (|a|_Gamma |b|_Gamma), the metric cosine.
double gamma_cosine(const FunctionCoef& a, const FunctionCoef& b,
                    const SpectralOperator& gamma);

// sign(<beta, x> - threshold); ties resolve to +1.
int classify(const FunctionCoef& beta, const FunctionCoef& x,
             double threshold = 0.0);
int classify(const FunctionCoef& beta, const Eigen::VectorXd& grid_values,
             double threshold = 0.0);

struct FitOptions {
  SliceSpec slices;
  int d = 1;
  double rank_tol = 1e-3;
  double ridge_c = 0.0;
};

struct FitOutput {
  FsirResult result;
  SliceMeans means;
  SpectralOperator gamma;
  SpectralOperator gamma_e;
};

/**
 * Full pipeline: center, slice, slice means (plain coefficient means for
 * full paths, representer fits for discrete designs), between-slice
 * covariance, whitened eigensolve.  Discrete designs require a supplied
 * covariance; full-path designs use the empirical one unless
 * `gamma_given` overrides it.
 */
FitOutput fit_fsir(const FunctionalDataset& data, const FitOptions& opt,
                   const SpectralOperator* gamma_given = nullptr);

}  // namespace fsir
