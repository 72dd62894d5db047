#include "fsir/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsir/rng.hpp"

namespace fsir {

std::string to_string(TargetSpace t) {
  switch (t) {
    case TargetSpace::l2: return "l2";
    case TargetSpace::h_gamma: return "h_gamma";
    case TargetSpace::r_gamma_minus_half: return "r_gamma_minus_half";
    default: return "r_gamma";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::diverging: return "diverging";
    default: return "inconclusive";
  }
}

namespace {

constexpr int kMinTermsForVerdict = 200;

Verdict block_verdict(const std::vector<double>& sums, int n_terms) {
  if (n_terms < kMinTermsForVerdict || sums.size() < 3)
    return Verdict::inconclusive;
  const double s0 = sums[sums.size() - 3];
  const double s1 = sums[sums.size() - 2];
  const double s2 = sums[sums.size() - 1];
  const double total = *std::max_element(sums.begin(), sums.end());
  // an exhausted tail is a finite sum
  if (s1 <= 1e-14 * total && s2 <= 1e-14 * total) return Verdict::converging;
  if (s0 <= 0.0 || s1 <= 0.0) return Verdict::inconclusive;
  const double r1 = s1 / s0;
  const double r2 = s2 / s1;
  if (r1 < 0.9 && r2 < 0.9) return Verdict::converging;
  if (r1 > 1.1 && r2 > 1.1) return Verdict::diverging;
  return Verdict::inconclusive;
}

// OLS slope of log|c_i| on log i over the tail half; returns p with
// |c_i| ~ i^{-p}.
double fit_decay_exponent(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  std::vector<double> lx, ly;
  for (Eigen::Index i = n / 2; i < n; ++i) {
    const double a = std::abs(c[i]);
    if (a > 1e-300) {
      lx.push_back(std::log(static_cast<double>(i + 1)));
      ly.push_back(std::log(a));
    }
  }
  if (lx.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -sxy / sxx;
}

}  // namespace

MembershipReport membership_series(const FunctionCoef& f,
                                   const SpectralOperator& gamma,
                                   TargetSpace target) {
  require_same_basis(gamma.basis(), f.basis, "membership_series");
  MembershipReport rep;
  rep.target_space = target;

  Eigen::VectorXd coords;
  if (target == TargetSpace::l2) {
    coords = f.coef;  // complete in the raw basis
  } else {
    coords = gamma.eigvecs().transpose() * f.coef;
  }
  const Eigen::Index len = coords.size();
  Eigen::VectorXd terms(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    const double c2 = coords[i] * coords[i];
    switch (target) {
      case TargetSpace::l2:
        terms[i] = c2;
        break;
      case TargetSpace::h_gamma:
        terms[i] = c2 / gamma.eigvals()[i];
        break;
      case TargetSpace::r_gamma_minus_half:
        terms[i] = gamma.eigvals()[i] * c2;
        break;
      case TargetSpace::r_gamma:
        terms[i] = c2 / (gamma.eigvals()[i] * gamma.eigvals()[i]);
        break;
    }
  }

  rep.series_value = 0.0;
  for (Eigen::Index i = len - 1; i >= 0; --i) rep.series_value += terms[i];

  // complete blocks only: a truncated final block skews the ratio rule
  for (Eigen::Index lo = 1; 2 * lo - 1 <= len; lo *= 2) {
    double s = 0.0;
    for (Eigen::Index i = lo; i <= 2 * lo - 1; ++i) s += terms[i - 1];
    rep.block_sums.push_back(s);
  }
  rep.verdict = block_verdict(rep.block_sums, static_cast<int>(len));
  rep.decay_exponent = fit_decay_exponent(coords);
  return rep;
}

std::vector<MembershipReport> mean_range_check(const SliceMeans& means,
                                               const SpectralOperator& gamma) {
  std::vector<MembershipReport> out;
  out.reserve(means.means.size());
  for (const auto& m : means.means)
    out.push_back(membership_series(m, gamma, TargetSpace::h_gamma));
  return out;
}

BetaMembershipReport beta_membership_check(const FunctionCoef& beta,
                                           const SpectralOperator& gamma) {
  BetaMembershipReport rep;
  rep.l2 = membership_series(beta, gamma, TargetSpace::l2);
  rep.weighted =
      membership_series(beta, gamma, TargetSpace::r_gamma_minus_half);
  return rep;
}

Theorem1Report theorem1_check(const SpectralOperator& gamma,
                              const SpectralOperator& ge, int trials,
                              std::uint64_t seed, double rank_tol) {
  if (trials < 1) throw invalid_input("theorem1_check: trials must be >= 1");
  const SpectralOperator t = whitened_conjugate(gamma, ge, rank_tol);
  const SpectralOperator ghalf = power(gamma, 0.5, rank_tol);
  const SpectralOperator ginv = power(gamma, -1.0, rank_tol);
  const int r = gamma.rank();

  Theorem1Report rep;
  rep.trials = trials;
  rep.op_norm_whitened = operator_norm(t);

  // Ge acts on H_Gamma as B = Ge Gamma^{-1}: the covariance of the
  // conditional-mean field under the H_Gamma pairing.  B is H_Gamma
  // self-adjoint and unitarily equivalent to T through h = Gamma^{1/2} g,
  // so the two ratios below agree identically.
  const auto apply_b = [&](const FunctionCoef& h) {
    return apply(ge, apply(ginv, h));
  };

  FunctionCoef best_h;
  for (int s = 0; s < trials; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd z(r);
    for (int i = 0; i < r; ++i) z[i] = rng.normal();
    FunctionCoef g{gamma.eigvecs() * z, gamma.basis()};

    const double ratio_l2 = l2_norm(apply(t, g)) / l2_norm(g);

    const FunctionCoef h = apply(ghalf, g);
    const double ratio_hg =
        hgamma_norm(apply_b(h), gamma) / hgamma_norm(h, gamma);

    const double scale = std::max({ratio_l2, ratio_hg, 1e-300});
    rep.max_rel_discrepancy =
        std::max(rep.max_rel_discrepancy,
                 std::abs(ratio_l2 - ratio_hg) / scale);
    if (ratio_hg >= rep.sup_ratio_random) {
      rep.sup_ratio_random = ratio_hg;
      best_h = h;
    }
  }

  // independent estimate of the shared norm: power iteration on B in
  // H_Gamma geometry; the Rayleigh quotient of the PSD self-adjoint B
  // climbs to its top eigenvalue, which equals the top eigenvalue of T.
  if (rep.op_norm_whitened > 0.0 && best_h.basis) {
    FunctionCoef h = best_h;
    const double nh = hgamma_norm(h, gamma);
    if (nh > 0.0) {
      h.coef /= nh;
      double prev = -1.0;
      for (int it = 0; it < 1000; ++it) {
        const FunctionCoef bh = apply_b(h);
        const double quot = hgamma_inner(bh, h, gamma);
        if (!(quot > 0.0)) break;
        rep.op_norm_hgamma = quot;
        const double nn = hgamma_norm(bh, gamma);
        if (nn <= 0.0) break;
        h.coef = bh.coef / nn;
        if (prev > 0.0 && std::abs(quot - prev) <= 1e-14 * quot) break;
        prev = quot;
      }
    }
  }
  return rep;
}

LinearityReport linearity_check(const SpectralOperator& gamma,
                                const FunctionCoef& beta, int n,
                                std::uint64_t seed) {
  require_same_basis(gamma.basis(), beta.basis, "linearity_check");
  if (n < 3) throw invalid_input("linearity_check: need n >= 3");
  const FunctionCoef gb = apply(gamma, beta);
  const double var_u = l2_inner(gb, beta);
  if (!(var_u > 0.0))
    throw numeric_error("linearity_check: var<beta, X> is zero");
  const Eigen::VectorXd analytic = gb.coef / var_u;

  const int nb = gamma.basis()->n_basis();
  const auto samples = sample_process(gamma, n, seed);

  Eigen::VectorXd u(n);
  Eigen::MatrixXd a(n, nb);
  for (int s = 0; s < n; ++s) {
    a.row(s) = samples[static_cast<std::size_t>(s)].a.transpose();
    u[s] = beta.coef.dot(samples[static_cast<std::size_t>(s)].a);
  }

  const double umean = u.mean();
  const Eigen::VectorXd uc = u.array() - umean;
  const double sxx = uc.squaredNorm();
  if (!(sxx > 0.0))
    throw numeric_error("linearity_check: sampled index is constant");

  LinearityReport rep;
  rep.n = n;
  rep.analytic_slopes = analytic;
  rep.slopes.resize(nb);
  rep.slope_se.resize(nb);
  rep.intercepts.resize(nb);
  rep.intercept_se.resize(nb);

  for (int l = 0; l < nb; ++l) {
    const Eigen::VectorXd col = a.col(l);
    const double cmean = col.mean();
    const Eigen::VectorXd cc = col.array() - cmean;
    const double slope = uc.dot(cc) / sxx;
    const double intercept = cmean - slope * umean;
    const Eigen::VectorXd resid = cc - slope * uc;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(n - 2);
    const double se_slope = std::sqrt(sigma2 / sxx);
    const double se_int =
        std::sqrt(sigma2 * (1.0 / n + umean * umean / sxx));
    rep.slopes[l] = slope;
    rep.slope_se[l] = se_slope;
    rep.intercepts[l] = intercept;
    rep.intercept_se[l] = se_int;
    if (std::abs(slope - analytic[l]) > 3.0 * se_slope)
      ++rep.slopes_beyond_3se;
    if (std::abs(intercept) > 3.0 * se_int) ++rep.intercepts_beyond_3se;
  }
  rep.frac_slopes_beyond_3se =
      static_cast<double>(rep.slopes_beyond_3se) / nb;
  rep.frac_intercepts_beyond_3se =
      static_cast<double>(rep.intercepts_beyond_3se) / nb;
  return rep;
}

LinearityReport linearity_check(const ExampleSpec& spec, const BasisPtr& basis,
                                const FunctionCoef& beta, int n,
                                std::uint64_t seed) {
  const OracleKernels ops = oracle_kernels(spec, basis);
  return linearity_check(ops.gamma, beta, n, seed);
}

}  // namespace fsir
