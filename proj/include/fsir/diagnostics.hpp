#pragma once

#include <cstdint>
#include <vector>

#include "fsir/estimate.hpp"
#include "fsir/simulate.hpp"

namespace fsir {

// Spaces whose membership series the diagnostics examine, relative to the
// eigendecomposition of a reference covariance: L2 itself (sum f_i^2),
// H_Gamma = R(Gamma^{1/2}) (sum f_i^2 / xi_i), the enlarged space
// R(Gamma^{-1/2}) via its natural pairing (sum xi_i f_i^2), and R(Gamma)
// (sum f_i^2 / xi_i^2).
enum class TargetSpace { l2, h_gamma, r_gamma_minus_half, r_gamma };
enum class Verdict { converging, diverging, inconclusive };

std::string to_string(TargetSpace t);
std::string to_string(Verdict v);

struct MembershipReport {
  TargetSpace target_space = TargetSpace::l2;
  std::vector<double> block_sums;  // dyadic blocks [2^j, 2^{j+1})
  Verdict verdict = Verdict::inconclusive;
  double decay_exponent = 0.0;  // p in |f_i| ~ i^{-p}, NaN if unfittable
  double series_value = 0.0;    // partial sum of the defining series
};

/**
 * Truncated-series membership heuristic.  Blocks are dyadic partial sums
 * of the defining series over complete ranges [2^j, 2^{j+1}); the verdict
 * compares the last three block sums: consecutive ratios < 0.9 is
 * converging, > 1.1 diverging, anything else (or fewer than 200 series
 * terms) inconclusive.
 */
MembershipReport membership_series(const FunctionCoef& f,
                                   const SpectralOperator& gamma,
                                   TargetSpace target);

// H_Gamma membership report per slice mean.
std::vector<MembershipReport> mean_range_check(const SliceMeans& means,
                                               const SpectralOperator& gamma);

struct BetaMembershipReport {
  MembershipReport l2;        // sum b_i^2
  MembershipReport weighted;  // sum xi_i b_i^2, the enlarged-space pairing
};

BetaMembershipReport beta_membership_check(const FunctionCoef& beta,
                                           const SpectralOperator& gamma);

struct Theorem1Report {
  double max_rel_discrepancy = 0.0;  // between the two ratios per trial
  double op_norm_whitened = 0.0;     // top eigenvalue of Gamma^{-1/2} Ge Gamma^{-1/2}
  double op_norm_hgamma = 0.0;       // power iteration of Ge on H_Gamma
  double sup_ratio_random = 0.0;     // best random-trial ratio (lower witness)
  int trials = 0;
};

/**
 * Norm-transfer check: for random g in the retained span, compares
 * |Gamma^{-1/2} Ge Gamma^{-1/2} g| / |g| against |B h|_{H} / |h|_{H}
 * with h = Gamma^{1/2} g and B = Ge Gamma^{-1} the action of Ge on
 * H_Gamma; the enlarged-space isometry makes the two ratios equal.
 * Also estimates the shared operator norm independently by power
 * iteration on B and reports it against the whitened top eigenvalue.
 */
Theorem1Report theorem1_check(const SpectralOperator& gamma,
                              const SpectralOperator& ge, int trials,
                              std::uint64_t seed, double rank_tol = 1e-12);

struct LinearityReport {
  Eigen::VectorXd slopes;
  Eigen::VectorXd slope_se;
  Eigen::VectorXd analytic_slopes;  // Gamma beta / <Gamma beta, beta>
  Eigen::VectorXd intercepts;
  Eigen::VectorXd intercept_se;
  int slopes_beyond_3se = 0;
  int intercepts_beyond_3se = 0;
  double frac_slopes_beyond_3se = 0.0;
  double frac_intercepts_beyond_3se = 0.0;
  int n = 0;
};

/**
 * Simulation check of the linearity condition for Gaussian designs:
 * regresses each coordinate <X, psi_l> on u = <beta, X> and compares the
 * fitted slopes with Gamma beta / <Gamma beta, beta> at 3 standard errors.
 */
LinearityReport linearity_check(const SpectralOperator& gamma,
                                const FunctionCoef& beta, int n,
                                std::uint64_t seed);

// Same, with the example's oracle covariance as the Gaussian design.
LinearityReport linearity_check(const ExampleSpec& spec, const BasisPtr& basis,
                                const FunctionCoef& beta, int n,
                                std::uint64_t seed);

}  // namespace fsir
