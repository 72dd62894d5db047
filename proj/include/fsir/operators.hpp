#pragma once

#include <Eigen/Dense>

#include "fsir/basis.hpp"

namespace fsir {

/**
 * Self-adjoint positive semi-definite trace-class operator on L2[0,1],
 * stored spectrally: Gamma f = sum_i xi_i <phi_i, f> phi_i.
 *
 * eigvals xi_1 >= xi_2 >= ... >= 0; eigvecs holds the coefficient vectors
 * of the phi_i (one column each), orthonormal in coefficient space.
 * Rank zero (empty spectrum) is permitted.
 */
class SpectralOperator {
 public:
  static constexpr double kOrthoTol = 1e-8;

  SpectralOperator(Eigen::VectorXd eigvals, Eigen::MatrixXd eigvecs,
                   BasisPtr basis);

  const Eigen::VectorXd& eigvals() const { return eigvals_; }
  const Eigen::MatrixXd& eigvecs() const { return eigvecs_; }
  const BasisPtr& basis() const { return basis_; }
  int rank() const { return static_cast<int>(eigvals_.size()); }

  // i-th eigenfunction (1-based) as a FunctionCoef.
  FunctionCoef eigenfunction(int i) const;

  // Dense N x N coefficient-space matrix Phi diag(xi) Phi^T.
  Eigen::MatrixXd coefficient_matrix() const;

 private:
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXd eigvecs_;
  BasisPtr basis_;
};

// Symmetric kernel sampled on the quadrature grid of `basis`.
struct KernelOnGrid {
  Eigen::MatrixXd values;  // M x M, K(t_j, t_k)
  BasisPtr basis;
};

// Kernel synthesis K(s,t) = sum_i xi_i phi_i(s) phi_i(t) on the grid.
KernelOnGrid to_kernel(const SpectralOperator& g);

/**
 * Quadrature-weighted symmetric eigendecomposition of a gridded kernel:
 * eigenpairs of W^{1/2} K W^{1/2}, eigenfunctions renormalized back to
 * quadrature functions and projected onto the basis.
 *
 * Eigenvalues below rank_tol * xi_1 are dropped; an eigenvalue below
 * -1e-10 * xi_1 is a hard error (kernel not PSD).
 */
SpectralOperator mercer_decompose(const KernelOnGrid& k, double rank_tol);

// Spectral form of a symmetric PSD coefficient-space matrix C (N x N);
// same dropping rules as mercer_decompose.  Exact when the kernel already
// lives in the span of the basis.
SpectralOperator decompose_coefficient_matrix(const Eigen::MatrixXd& c,
                                              const BasisPtr& basis,
                                              double rank_tol);

// sum_i xi_i.
double trace(const SpectralOperator& g);

// Quadrature trace sum_k w_k K(t_k, t_k).
double trace_from_kernel(const KernelOnGrid& k);

/**
 * Spectral power Gamma^s: same eigenfunctions, eigenvalues xi_i^s.
 * For s < 0 eigenvalues below rank_tol * xi_1 are excluded first
 * (pseudo-inverse convention); empty result is an error for s < 0.
 */
SpectralOperator power(const SpectralOperator& g, double s,
                       double rank_tol = 0.0);

// Gamma f in coefficient space.
FunctionCoef apply(const SpectralOperator& g, const FunctionCoef& f);

/**
 * RKHS inner product <u, v>_{H_Gamma} = sum_i u_i v_i / xi_i with
 * u_i = <u, phi_i>.  Inputs must lie in the retained span: relative mass
 * outside it above 1e-8 is an error rather than a silent truncation.
 */
double hgamma_inner(const FunctionCoef& u, const FunctionCoef& v,
                    const SpectralOperator& g);

double hgamma_norm(const FunctionCoef& u, const SpectralOperator& g);

/**
 * Whitened conjugation T = Gamma^{-1/2} Gamma_e Gamma^{-1/2}, computed in
 * the retained eigenbasis of g (eigenvalues >= rank_tol * xi_1) so the
 * result is symmetric PSD by construction.
 */
SpectralOperator whitened_conjugate(const SpectralOperator& g,
                                    const SpectralOperator& ge,
                                    double rank_tol);

// Largest eigenvalue; 0 for a rank-zero operator.
double operator_norm(const SpectralOperator& g);

}  // namespace fsir
