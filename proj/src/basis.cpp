#include "fsir/basis.hpp"

#include <cmath>

namespace fsir {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Composite trapezoid on [0,1]: uniform nodes, half-weight endpoints.
void trapezoid_grid(int m, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  const double h = 1.0 / (m - 1);
  nodes.resize(m);
  weights.resize(m);
  for (int k = 0; k < m; ++k) {
    nodes[k] = k * h;
    weights[k] = (k == 0 || k == m - 1) ? 0.5 * h : h;
  }
}

// Gauss-Legendre on [0,1] by Golub-Welsch: nodes are eigenvalues of the
// Jacobi matrix, weights 2 * (first eigenvector component)^2, mapped from
// [-1,1].
void gauss_legendre_grid(int m, Eigen::VectorXd& nodes,
                         Eigen::VectorXd& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes.resize(m);
  weights.resize(m);
  for (int k = 0; k < m; ++k) {
    const double x = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    nodes[k] = 0.5 * (x + 1.0);
    weights[k] = v0 * v0;  // 2 v0^2 on [-1,1], halved by the affine map
  }
}

}  // namespace

std::string to_string(BasisFamily f) {
  return f == BasisFamily::cosine ? "cosine" : "fourier";
}

std::string to_string(QuadratureRule r) {
  return r == QuadratureRule::trapezoid ? "trapezoid" : "gauss_legendre";
}

BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "cosine") return BasisFamily::cosine;
  if (s == "fourier") return BasisFamily::fourier;
  throw invalid_input("unknown basis family: " + s);
}

QuadratureRule quadrature_rule_from_string(const std::string& s) {
  if (s == "trapezoid") return QuadratureRule::trapezoid;
  if (s == "gauss_legendre") return QuadratureRule::gauss_legendre;
  throw invalid_input("unknown quadrature rule: " + s);
}

double BasisSpec::eval(int i, double t) const {
  if (i < 1 || i > n_basis_)
    throw invalid_input("basis index out of range");
  if (family_ == BasisFamily::cosine) {
    if (i == 1) return 1.0;
    return std::sqrt(2.0) * std::cos((i - 1) * kPi * t);
  }
  if (i == 1) return 1.0;
  const int j = i / 2;
  if (i % 2 == 0) return std::sqrt(2.0) * std::sin(2.0 * kPi * j * t);
  return std::sqrt(2.0) * std::cos(2.0 * kPi * j * t);
}

Eigen::MatrixXd BasisSpec::values_at(const Eigen::VectorXd& points) const {
  Eigen::MatrixXd out(points.size(), n_basis_);
  for (Eigen::Index k = 0; k < points.size(); ++k)
    for (int i = 1; i <= n_basis_; ++i) out(k, i - 1) = eval(i, points[k]);
  return out;
}

BasisSpec::BasisSpec(BasisFamily family, int n_basis, int grid_size,
                     QuadratureRule rule)
    : family_(family), rule_(rule), n_basis_(n_basis) {
  if (n_basis < 1) throw invalid_input("n_basis must be >= 1");
  if (grid_size < 2 * n_basis)
    throw invalid_input("grid_size must be >= 2 * n_basis");
  if (rule == QuadratureRule::trapezoid)
    trapezoid_grid(grid_size, nodes_, weights_);
  else
    gauss_legendre_grid(grid_size, nodes_, weights_);
  design_ = values_at(nodes_);

  const Eigen::MatrixXd gram =
      design_.transpose() * weights_.asDiagonal() * design_;
  const double err =
      (gram - Eigen::MatrixXd::Identity(n_basis, n_basis)).cwiseAbs().maxCoeff();
  if (err >= kOrthoTol)
    throw numeric_error("basis not orthonormal under quadrature, max |G - I| = " +
                        std::to_string(err));
}

std::shared_ptr<const BasisSpec> BasisSpec::make(BasisFamily family,
                                                 int n_basis, int grid_size,
                                                 QuadratureRule rule) {
  return std::shared_ptr<const BasisSpec>(
      new BasisSpec(family, n_basis, grid_size, rule));
}

void require_same_basis(const BasisPtr& a, const BasisPtr& b,
                        const char* where) {
  if (!a || !b) throw invalid_input(std::string(where) + ": missing basis");
  if (a.get() == b.get()) return;
  if (!a->compatible(*b))
    throw invalid_input(std::string(where) + ": basis mismatch");
}

Eigen::VectorXd synthesize(const FunctionCoef& f) {
  if (!f.basis) throw invalid_input("synthesize: missing basis");
  if (f.coef.size() != f.basis->n_basis())
    throw invalid_input("synthesize: coefficient length mismatch");
  return f.basis->design() * f.coef;
}

Eigen::VectorXd synthesize_at(const FunctionCoef& f,
                              const Eigen::VectorXd& points) {
  if (!f.basis) throw invalid_input("synthesize_at: missing basis");
  if (f.coef.size() != f.basis->n_basis())
    throw invalid_input("synthesize_at: coefficient length mismatch");
  return f.basis->values_at(points) * f.coef;
}

FunctionCoef analyze(const Eigen::VectorXd& grid_values, const BasisPtr& b) {
  if (!b) throw invalid_input("analyze: missing basis");
  if (grid_values.size() != b->grid_size())
    throw invalid_input("analyze: grid length mismatch");
  FunctionCoef f;
  f.basis = b;
  f.coef = b->design().transpose() *
           (b->weights().array() * grid_values.array()).matrix();
  return f;
}

double l2_inner(const FunctionCoef& f, const FunctionCoef& g) {
  require_same_basis(f.basis, g.basis, "l2_inner");
  return f.coef.dot(g.coef);
}

double l2_norm(const FunctionCoef& f) { return f.coef.norm(); }

}  // namespace fsir
