#include "fsir/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fsir {

std::string to_string(ObservationDesign d) {
  return d == ObservationDesign::full_path ? "full_path" : "discrete_points";
}

ObservationDesign observation_design_from_string(const std::string& s) {
  if (s == "full_path") return ObservationDesign::full_path;
  if (s == "discrete_points") return ObservationDesign::discrete_points;
  throw invalid_input("unknown observation design: " + s);
}

void FunctionalDataset::validate() const {
  if (!basis) throw invalid_input("dataset: missing basis");
  if (y.size() < 2) throw invalid_input("dataset: need n >= 2 samples");
  if (values.rows() != y.size())
    throw invalid_input("dataset: row count != response count");
  if (design == ObservationDesign::full_path) {
    if (values.cols() != basis->n_basis())
      throw invalid_input("dataset: coefficient count != n_basis");
  } else {
    if (obs_points.size() != values.cols())
      throw invalid_input("dataset: observation point count mismatch");
    if (obs_points.size() < 1)
      throw invalid_input("dataset: discrete design needs >= 1 point");
    for (Eigen::Index k = 0; k < obs_points.size(); ++k)
      if (!(obs_points[k] >= 0.0 && obs_points[k] <= 1.0))
        throw invalid_input("dataset: observation points must lie in [0,1]");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i]))
      throw invalid_input("dataset: non-finite response");
}

std::vector<std::vector<int>> slice_partition(const FunctionalDataset& data,
                                              const SliceSpec& spec) {
  data.validate();
  const int n = data.n();
  double first = data.y[0];
  bool all_equal = true;
  for (int i = 1; i < n; ++i)
    if (data.y[i] != first) {
      all_equal = false;
      break;
    }
  if (all_equal)
    throw invalid_input("slice_partition: fewer than 2 distinct responses");

  std::vector<std::vector<int>> slices;
  if (spec.mode == SliceSpec::Mode::by_category) {
    std::map<double, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[data.y[i]].push_back(i);
    for (auto& [yv, idx] : groups) slices.push_back(std::move(idx));
  } else {
    if (spec.h < 2) throw invalid_input("slice_partition: need h >= 2");
    if (spec.h > n)
      throw invalid_input("slice_partition: h exceeds sample count");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return data.y[a] < data.y[b]; });
    const int base = n / spec.h;
    const int extra = n % spec.h;
    int pos = 0;
    for (int j = 0; j < spec.h; ++j) {
      const int len = base + (j < extra ? 1 : 0);
      slices.emplace_back(order.begin() + pos, order.begin() + pos + len);
      pos += len;
    }
  }
  for (const auto& s : slices)
    if (s.empty()) throw invalid_input("slice_partition: empty slice");
  return slices;
}

std::pair<FunctionCoef, Eigen::VectorXd> slice_mean_representer(
    const Eigen::MatrixXd& slice_values, const Eigen::VectorXd& obs_points,
    const SpectralOperator& gamma, double ridge_c) {
  const Eigen::Index nj = slice_values.rows();
  const Eigen::Index q = obs_points.size();
  if (nj < 1) throw invalid_input("slice_mean_representer: empty slice");
  if (slice_values.cols() != q)
    throw invalid_input("slice_mean_representer: point count mismatch");
  if (ridge_c < 0.0)
    throw invalid_input("slice_mean_representer: ridge must be >= 0");

  // E_{ki} = phi_i(t_k); K = E diag(xi) E^T is Gamma at the points.
  const Eigen::MatrixXd e =
      gamma.basis()->values_at(obs_points) * gamma.eigvecs();
  Eigen::MatrixXd kq = e * gamma.eigvals().asDiagonal() * e.transpose();
  kq = 0.5 * (kq + kq.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kq);
  if (es.info() != Eigen::Success)
    throw numeric_error("slice_mean_representer: eigendecomposition failed");
  const Eigen::VectorXd mu = es.eigenvalues().cwiseMax(0.0);
  const double mu_top = mu.maxCoeff();
  if (ridge_c == 0.0 &&
      (mu_top <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * mu_top))
    throw numeric_error(
        "slice_mean_representer: singular kernel system with zero ridge");

  const Eigen::VectorXd rhs = slice_values.colwise().sum();
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * rhs;
  Eigen::VectorXd scaled(q);
  for (Eigen::Index p = 0; p < q; ++p)
    scaled[p] = proj[p] / (static_cast<double>(nj) * mu[p] + ridge_c);
  const Eigen::VectorXd alpha = es.eigenvectors() * scaled;

  FunctionCoef m;
  m.basis = gamma.basis();
  m.coef = gamma.eigvecs() *
           (gamma.eigvals().array() * (e.transpose() * alpha).array())
               .matrix();
  return {std::move(m), alpha};
}

FunctionalDataset grand_mean_center(const FunctionalDataset& data) {
  data.validate();
  FunctionalDataset out = data;
  const Eigen::RowVectorXd mean =
      data.values.colwise().sum() / static_cast<double>(data.n());
  out.values.rowwise() -= mean;
  return out;
}

SpectralOperator empirical_covariance(const FunctionalDataset& data,
                                      double rank_tol) {
  data.validate();
  if (data.design != ObservationDesign::full_path)
    throw invalid_input(
        "empirical_covariance: requires full-path coefficients");
  const Eigen::MatrixXd c = data.values.transpose() * data.values /
                            static_cast<double>(data.n());
  return decompose_coefficient_matrix(c, data.basis, rank_tol);
}

SpectralOperator between_slice_covariance(const SliceMeans& means) {
  const std::size_t k = means.means.size();
  if (k < 2) throw invalid_input("between_slice_covariance: need >= 2 slices");
  if (means.weights.size() != k)
    throw invalid_input("between_slice_covariance: weight count mismatch");
  const BasisPtr basis = means.means[0].basis;
  const int nb = basis->n_basis();

  Eigen::VectorXd mbar = Eigen::VectorXd::Zero(nb);
  double wsum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    require_same_basis(basis, means.means[j].basis,
                       "between_slice_covariance");
    if (!(means.weights[j] > 0.0))
      throw invalid_input("between_slice_covariance: weights must be > 0");
    mbar += means.weights[j] * means.means[j].coef;
    wsum += means.weights[j];
  }
  if (std::abs(wsum - 1.0) > 1e-10)
    throw invalid_input("between_slice_covariance: weights must sum to 1");

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nb, nb);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::VectorXd d = means.means[j].coef - mbar;
    c += means.weights[j] * d * d.transpose();
  }
  // exact rank is at most k - 1; 1e-14 relative cut removes solver noise
  return decompose_coefficient_matrix(c, basis, 1e-14);
}

FsirResult fsir_solve(const SpectralOperator& gamma,
                      const SpectralOperator& gamma_e, int d,
                      double rank_tol) {
  if (d < 1) throw invalid_input("fsir_solve: d must be >= 1");
  const SpectralOperator t = whitened_conjugate(gamma, gamma_e, rank_tol);
  const SpectralOperator gamma_inv_half = power(gamma, -0.5, rank_tol);

  FsirResult res;
  res.rank_tol = rank_tol;
  const int kept = std::min(d, t.rank());
  res.rank_deficient = t.rank() < d;
  res.eigvals.resize(kept);
  for (int j = 0; j < kept; ++j) {
    const double lam = t.eigvals()[j];
    if (lam > 1.0 + 1e-8)
      throw numeric_error(
          "fsir_solve: eigenvalue above 1, between-slice covariance is not "
          "dominated by the total covariance");
    res.eigvals[j] = lam;
    FunctionCoef eta = t.eigenfunction(j + 1);
    FunctionCoef beta = apply(gamma_inv_half, eta);
    for (Eigen::Index i = 0; i < eta.coef.size(); ++i) {
      if (std::abs(eta.coef[i]) > 1e-10) {
        if (eta.coef[i] < 0.0) {
          eta.coef = -eta.coef;
          beta.coef = -beta.coef;
        }
        break;
      }
    }
    res.etas.push_back(std::move(eta));
    res.betas.push_back(std::move(beta));
  }
  return res;
}

double subspace_distance(const std::vector<FunctionCoef>& a,
                         const std::vector<FunctionCoef>& b,
                         const SpectralOperator& metric) {
  if (a.empty() || a.size() != b.size())
    throw invalid_input("subspace_distance: families must be same nonzero size");
  const Eigen::Index d = static_cast<Eigen::Index>(a.size());
  const Eigen::Index r = metric.rank();
  if (r == 0) throw numeric_error("subspace_distance: zero metric");
  const Eigen::VectorXd sq = metric.eigvals().cwiseSqrt();

  auto whiten = [&](const std::vector<FunctionCoef>& fam) {
    Eigen::MatrixXd w(r, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      require_same_basis(metric.basis(), fam[static_cast<std::size_t>(j)].basis,
                         "subspace_distance");
      w.col(j) =
          (sq.array() *
           (metric.eigvecs().transpose() * fam[static_cast<std::size_t>(j)].coef)
               .array())
              .matrix();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU);
    if (svd.singularValues().minCoeff() <=
        1e-10 * svd.singularValues().maxCoeff())
      throw invalid_input("subspace_distance: rank-deficient family");
    return Eigen::MatrixXd(svd.matrixU());
  };

  const Eigen::MatrixXd qa = whiten(a);
  const Eigen::MatrixXd qb = whiten(b);
  const Eigen::MatrixXd diff =
      qa * qa.transpose() - qb * qb.transpose();
  return diff.norm();
}

double gamma_cosine(const FunctionCoef& a, const FunctionCoef& b,
                    const SpectralOperator& gamma) {
  const double num = l2_inner(apply(gamma, a), b);
  const double na = l2_inner(apply(gamma, a), a);
  const double nb = l2_inner(apply(gamma, b), b);
  if (!(na > 0.0) || !(nb > 0.0))
    throw numeric_error("gamma_cosine: zero metric norm");
  return num / std::sqrt(na * nb);
}

int classify(const FunctionCoef& beta, const FunctionCoef& x,
             double threshold) {
  return l2_inner(beta, x) - threshold < 0.0 ? -1 : 1;
}

int classify(const FunctionCoef& beta, const Eigen::VectorXd& grid_values,
             double threshold) {
  if (!beta.basis) throw invalid_input("classify: missing basis");
  if (grid_values.size() != beta.basis->grid_size())
    throw invalid_input("classify: grid length mismatch");
  const double inner =
      beta.basis->weights().dot(
          (synthesize(beta).array() * grid_values.array()).matrix());
  return inner - threshold < 0.0 ? -1 : 1;
}

FitOutput fit_fsir(const FunctionalDataset& data, const FitOptions& opt,
                   const SpectralOperator* gamma_given) {
  const FunctionalDataset centered = grand_mean_center(data);
  const auto slices = slice_partition(data, opt.slices);
  const int n = data.n();

  SliceMeans means;
  std::optional<SpectralOperator> gamma;
  if (data.design == ObservationDesign::full_path) {
    if (gamma_given)
      gamma = *gamma_given;
    else
      gamma = empirical_covariance(centered);
    for (const auto& idx : slices) {
      FunctionCoef m;
      m.basis = data.basis;
      m.coef = Eigen::VectorXd::Zero(data.basis->n_basis());
      for (int i : idx) m.coef += centered.values.row(i).transpose();
      m.coef /= static_cast<double>(idx.size());
      means.weights.push_back(static_cast<double>(idx.size()) / n);
      means.means.push_back(std::move(m));
      means.degenerate.push_back(idx.size() == 1);
    }
  } else {
    if (!gamma_given)
      throw invalid_input(
          "fit_fsir: discrete-points design requires a supplied covariance");
    gamma = *gamma_given;
    for (const auto& idx : slices) {
      Eigen::MatrixXd sv(static_cast<Eigen::Index>(idx.size()),
                         centered.values.cols());
      for (std::size_t i = 0; i < idx.size(); ++i)
        sv.row(static_cast<Eigen::Index>(i)) = centered.values.row(idx[i]);
      auto [m, alpha] = slice_mean_representer(sv, centered.obs_points, *gamma,
                                               opt.ridge_c);
      means.weights.push_back(static_cast<double>(idx.size()) / n);
      means.means.push_back(std::move(m));
      means.alphas.push_back(std::move(alpha));
      means.degenerate.push_back(idx.size() == 1);
    }
  }

  SpectralOperator gamma_e = between_slice_covariance(means);
  FitOutput out{fsir_solve(*gamma, gamma_e, opt.d, opt.rank_tol),
                std::move(means), std::move(*gamma), std::move(gamma_e)};
  out.result.ridge_c = opt.ridge_c;
  return out;
}

}  // namespace fsir
