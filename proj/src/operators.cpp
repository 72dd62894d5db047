#include "fsir/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fsir {

namespace {

// Eigen returns ascending eigenvalues; reorder descending and drop
// below rank_tol * max.  Negative beyond -1e-10 * max is a hard error.
void sorted_psd_spectrum(const Eigen::VectorXd& vals_asc,
                         const Eigen::MatrixXd& vecs_asc, double rank_tol,
                         const char* where, Eigen::VectorXd& vals,
                         Eigen::MatrixXd& vecs) {
  const Eigen::Index m = vals_asc.size();
  const double top = m > 0 ? vals_asc.maxCoeff() : 0.0;
  const double bot = m > 0 ? vals_asc.minCoeff() : 0.0;
  const double amax = std::max(std::abs(top), std::abs(bot));
  if (amax > 0.0 && bot < -1e-10 * amax)
    throw numeric_error(std::string(where) +
                        ": kernel has a significantly negative eigenvalue");
  if (top <= 0.0) {  // zero (or empty) operator
    vals.resize(0);
    vecs.resize(vecs_asc.rows(), 0);
    return;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = m - 1; i >= 0; --i)
    if (vals_asc[i] >= rank_tol * top && vals_asc[i] > 0.0)
      keep.push_back(i);
  vals.resize(static_cast<Eigen::Index>(keep.size()));
  vecs.resize(vecs_asc.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    vals[static_cast<Eigen::Index>(j)] = vals_asc[keep[j]];
    vecs.col(static_cast<Eigen::Index>(j)) = vecs_asc.col(keep[j]);
  }
}

}  // namespace

SpectralOperator::SpectralOperator(Eigen::VectorXd eigvals,
                                   Eigen::MatrixXd eigvecs, BasisPtr basis)
    : eigvals_(std::move(eigvals)),
      eigvecs_(std::move(eigvecs)),
      basis_(std::move(basis)) {
  if (!basis_) throw invalid_input("SpectralOperator: missing basis");
  if (eigvecs_.rows() != basis_->n_basis())
    throw invalid_input("SpectralOperator: eigvec length != n_basis");
  if (eigvecs_.cols() != eigvals_.size())
    throw invalid_input("SpectralOperator: eigval/eigvec count mismatch");
  const int r = rank();
  for (int i = 0; i < r; ++i) {
    if (!(eigvals_[i] >= 0.0))
      throw numeric_error("SpectralOperator: negative or NaN eigenvalue");
    if (i + 1 < r && eigvals_[i] < eigvals_[i + 1])
      throw invalid_input("SpectralOperator: eigenvalues not nonincreasing");
  }
  if (r > 0) {
    const Eigen::MatrixXd gram = eigvecs_.transpose() * eigvecs_;
    const double err =
        (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
    if (err >= kOrthoTol)
      throw numeric_error("SpectralOperator: eigenvectors not orthonormal");
  }
}

FunctionCoef SpectralOperator::eigenfunction(int i) const {
  if (i < 1 || i > rank())
    throw invalid_input("eigenfunction index out of range");
  return FunctionCoef{eigvecs_.col(i - 1), basis_};
}

Eigen::MatrixXd SpectralOperator::coefficient_matrix() const {
  const int n = basis_->n_basis();
  if (rank() == 0) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m =
      eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return m;
}

KernelOnGrid to_kernel(const SpectralOperator& g) {
  const Eigen::MatrixXd& b = g.basis()->design();
  KernelOnGrid k;
  k.basis = g.basis();
  if (g.rank() == 0) {
    k.values = Eigen::MatrixXd::Zero(b.rows(), b.rows());
    return k;
  }
  const Eigen::MatrixXd f = b * g.eigvecs();  // grid values of eigenfunctions
  k.values = f * g.eigvals().asDiagonal() * f.transpose();
  k.values = 0.5 * (k.values + k.values.transpose()).eval();
  return k;
}

SpectralOperator mercer_decompose(const KernelOnGrid& k, double rank_tol) {
  if (!k.basis) throw invalid_input("mercer_decompose: missing basis");
  const int m = k.basis->grid_size();
  if (k.values.rows() != m || k.values.cols() != m)
    throw invalid_input("mercer_decompose: kernel size != grid size");
  if ((k.values - k.values.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw invalid_input("mercer_decompose: kernel not symmetric");
  if (!(rank_tol > 0.0 && rank_tol < 1.0))
    throw invalid_input("mercer_decompose: rank_tol must be in (0,1)");

  const Eigen::VectorXd sqw = k.basis->weights().cwiseSqrt();
  const Eigen::MatrixXd a =
      sqw.asDiagonal() * k.values * sqw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success)
    throw numeric_error("mercer_decompose: eigendecomposition failed");

  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  sorted_psd_spectrum(es.eigenvalues(), es.eigenvectors(), rank_tol,
                      "mercer_decompose", vals, vecs);

  // v orthonormal in R^M; u = W^{-1/2} v is quadrature-normalized; its
  // basis projection is B^T W u = B^T W^{1/2} v.
  const Eigen::MatrixXd phi =
      k.basis->design().transpose() * (sqw.asDiagonal() * vecs);
  return SpectralOperator(vals, phi, k.basis);
}

SpectralOperator decompose_coefficient_matrix(const Eigen::MatrixXd& c,
                                              const BasisPtr& basis,
                                              double rank_tol) {
  if (!basis) throw invalid_input("decompose_coefficient_matrix: missing basis");
  const int n = basis->n_basis();
  if (c.rows() != n || c.cols() != n)
    throw invalid_input("decompose_coefficient_matrix: size != n_basis");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0))
    throw invalid_input("decompose_coefficient_matrix: bad rank_tol");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (c + c.transpose()));
  if (es.info() != Eigen::Success)
    throw numeric_error("decompose_coefficient_matrix: eigensolver failed");
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  sorted_psd_spectrum(es.eigenvalues(), es.eigenvectors(), rank_tol,
                      "decompose_coefficient_matrix", vals, vecs);
  return SpectralOperator(vals, vecs, basis);
}

double trace(const SpectralOperator& g) { return g.eigvals().sum(); }

double trace_from_kernel(const KernelOnGrid& k) {
  if (!k.basis) throw invalid_input("trace_from_kernel: missing basis");
  if (k.values.rows() != k.basis->grid_size())
    throw invalid_input("trace_from_kernel: kernel size != grid size");
  return k.basis->weights().dot(k.values.diagonal());
}

SpectralOperator power(const SpectralOperator& g, double s, double rank_tol) {
  Eigen::VectorXd vals = g.eigvals();
  Eigen::MatrixXd vecs = g.eigvecs();
  if (s < 0.0) {
    const double top = g.rank() > 0 ? vals[0] : 0.0;
    std::vector<int> keep;
    for (int i = 0; i < g.rank(); ++i)
      if (vals[i] >= rank_tol * top && vals[i] > 0.0) keep.push_back(i);
    if (keep.empty())
      throw numeric_error("power: empty retained spectrum for negative power");
    Eigen::VectorXd v(keep.size());
    Eigen::MatrixXd w(vecs.rows(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
      v[static_cast<Eigen::Index>(j)] = vals[keep[j]];
      w.col(static_cast<Eigen::Index>(j)) = vecs.col(keep[j]);
    }
    vals = v;
    vecs = w;
  }
  Eigen::VectorXd powd(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    powd[i] = std::pow(vals[i], s);
  // xi^s reverses the ordering when s < 0; restore nonincreasing order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(powd.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return powd[a] > powd[b];
                   });
  Eigen::VectorXd vals_out(powd.size());
  Eigen::MatrixXd vecs_out(vecs.rows(), powd.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    vals_out[static_cast<Eigen::Index>(j)] = powd[order[j]];
    vecs_out.col(static_cast<Eigen::Index>(j)) = vecs.col(order[j]);
  }
  return SpectralOperator(vals_out, vecs_out, g.basis());
}

FunctionCoef apply(const SpectralOperator& g, const FunctionCoef& f) {
  require_same_basis(g.basis(), f.basis, "apply");
  FunctionCoef out;
  out.basis = g.basis();
  if (g.rank() == 0) {
    out.coef = Eigen::VectorXd::Zero(f.coef.size());
    return out;
  }
  out.coef = g.eigvecs() *
             (g.eigvals().array() *
              (g.eigvecs().transpose() * f.coef).array())
                 .matrix();
  return out;
}

namespace {

// Coordinates of u in the retained eigenbasis, with the span check.
Eigen::VectorXd eigen_coords_checked(const FunctionCoef& u,
                                     const SpectralOperator& g,
                                     const char* where) {
  require_same_basis(g.basis(), u.basis, where);
  const double nu = u.coef.norm();
  Eigen::VectorXd c = g.eigvecs().transpose() * u.coef;
  if (nu > 0.0) {
    const double outside = (u.coef - g.eigvecs() * c).norm();
    if (outside > 1e-8 * nu)
      throw invalid_input(std::string(where) +
                          ": input has mass outside the retained spectrum");
  }
  return c;
}

}  // namespace

double hgamma_inner(const FunctionCoef& u, const FunctionCoef& v,
                    const SpectralOperator& g) {
  if (g.rank() > 0 && g.eigvals()[g.rank() - 1] <= 0.0)
    throw numeric_error("hgamma_inner: zero eigenvalue in retained spectrum");
  const Eigen::VectorXd cu = eigen_coords_checked(u, g, "hgamma_inner");
  const Eigen::VectorXd cv = eigen_coords_checked(v, g, "hgamma_inner");
  double s = 0.0;
  for (Eigen::Index i = g.rank() - 1; i >= 0; --i)
    s += cu[i] * cv[i] / g.eigvals()[i];
  return s;
}

double hgamma_norm(const FunctionCoef& u, const SpectralOperator& g) {
  return std::sqrt(std::max(0.0, hgamma_inner(u, u, g)));
}

SpectralOperator whitened_conjugate(const SpectralOperator& g,
                                    const SpectralOperator& ge,
                                    double rank_tol) {
  require_same_basis(g.basis(), ge.basis(), "whitened_conjugate");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0))
    throw invalid_input("whitened_conjugate: bad rank_tol");
  const double top = g.rank() > 0 ? g.eigvals()[0] : 0.0;
  std::vector<int> keep;
  for (int i = 0; i < g.rank(); ++i)
    if (g.eigvals()[i] >= rank_tol * top && g.eigvals()[i] > 0.0)
      keep.push_back(i);
  if (keep.empty())
    throw numeric_error("whitened_conjugate: empty retained spectrum");

  const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd phi(g.eigvecs().rows(), r);
  Eigen::VectorXd inv_sqrt(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    phi.col(j) = g.eigvecs().col(keep[static_cast<std::size_t>(j)]);
    inv_sqrt[j] =
        1.0 / std::sqrt(g.eigvals()[keep[static_cast<std::size_t>(j)]]);
  }

  // S = D^{-1/2} Phi^T Gamma_e Phi D^{-1/2}, r x r symmetric PSD.
  Eigen::MatrixXd s;
  if (ge.rank() == 0) {
    s = Eigen::MatrixXd::Zero(r, r);
  } else {
    const Eigen::MatrixXd c = phi.transpose() * ge.eigvecs();  // r x m
    const Eigen::MatrixXd half =
        inv_sqrt.asDiagonal() * c *
        ge.eigvals().cwiseSqrt().asDiagonal();
    s = half * half.transpose();
  }
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw numeric_error("whitened_conjugate: eigendecomposition failed");
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  sorted_psd_spectrum(es.eigenvalues(), es.eigenvectors(), 1e-14,
                      "whitened_conjugate", vals, vecs);
  return SpectralOperator(vals, phi * vecs, g.basis());
}

double operator_norm(const SpectralOperator& g) {
  return g.rank() > 0 ? g.eigvals()[0] : 0.0;
}

}  // namespace fsir
