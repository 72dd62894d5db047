#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "fsir/errors.hpp"

namespace fsir {

enum class BasisFamily { cosine, fourier };
enum class QuadratureRule { trapezoid, gauss_legendre };

std::string to_string(BasisFamily f);
std::string to_string(QuadratureRule r);
BasisFamily basis_family_from_string(const std::string& s);
QuadratureRule quadrature_rule_from_string(const std::string& s);

/**
 * Orthonormal basis {psi_1, ..., psi_N} of L2[0,1] together with a fixed
 * quadrature grid (nodes t_k, weights w_k).
 *
 * cosine:  psi_1 = 1, psi_i(t) = sqrt(2) cos((i-1) pi t), i >= 2.
 * fourier: psi_1 = 1, psi_2j = sqrt(2) sin(2 pi j t),
 *          psi_{2j+1} = sqrt(2) cos(2 pi j t).
 *
 * Construction validates grid_size >= 2 * n_basis and quadrature
 * orthonormality |<psi_i, psi_j> - delta_ij| < 1e-8; both are hard errors.
 */
class BasisSpec {
 public:
  static constexpr double kOrthoTol = 1e-8;

  static std::shared_ptr<const BasisSpec> make(
      BasisFamily family, int n_basis, int grid_size = 512,
      QuadratureRule rule = QuadratureRule::trapezoid);

  BasisFamily family() const { return family_; }
  QuadratureRule rule() const { return rule_; }
  int n_basis() const { return n_basis_; }
  int grid_size() const { return static_cast<int>(nodes_.size()); }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  // M x N matrix of psi_i(t_k) on the quadrature grid.
  const Eigen::MatrixXd& design() const { return design_; }

  // psi_i(t) for arbitrary t in [0,1]; i is 1-based.
  double eval(int i, double t) const;

  // P x N matrix of basis values at arbitrary points.
  Eigen::MatrixXd values_at(const Eigen::VectorXd& points) const;

  bool compatible(const BasisSpec& other) const {
    return family_ == other.family_ && n_basis_ == other.n_basis_ &&
           rule_ == other.rule_ && grid_size() == other.grid_size();
  }

 private:
  BasisSpec(BasisFamily family, int n_basis, int grid_size,
            QuadratureRule rule);

  BasisFamily family_;
  QuadratureRule rule_;
  int n_basis_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd design_;
};

using BasisPtr = std::shared_ptr<const BasisSpec>;

// Function represented by its coefficient vector in a BasisSpec.
struct FunctionCoef {
  Eigen::VectorXd coef;
  BasisPtr basis;
};

void require_same_basis(const BasisPtr& a, const BasisPtr& b,
                        const char* where);

// Grid values B * coef at the quadrature nodes.
Eigen::VectorXd synthesize(const FunctionCoef& f);

// Values at arbitrary points.
Eigen::VectorXd synthesize_at(const FunctionCoef& f,
                              const Eigen::VectorXd& points);

// Quadrature projection coef_i = sum_k w_k values_k psi_i(t_k).
FunctionCoef analyze(const Eigen::VectorXd& grid_values, const BasisPtr& b);

// L2 inner product; Euclidean on coefficients of an orthonormal basis.
double l2_inner(const FunctionCoef& f, const FunctionCoef& g);
double l2_norm(const FunctionCoef& f);

}  // namespace fsir
