#pragma once

#include <functional>
#include <vector>

#include "bbl/core.hpp"
#include "bbl/quad.hpp"

// Steady profile U, its dilations, the kernels Z_1..Z_n, and the variational
// functionals J, I, B_U, Q on the half-space.
namespace bbl {

struct ProfileEval {
  double value = 0.0;
  double grad_r = 0.0;
  double grad_xn = 0.0;
};

// U(x) = (n-2)^{(n-2)/2} [ r^2 + (1+xn)^2 ]^{-(n-2)/2}
double eval_U(const CylPoint& x);
ProfileEval eval_U_full(const CylPoint& x);

// mu^{-(n-2)/2} U( (x - (xi,0))/mu )
double eval_U_scaled(const BubbleParams& b, const CylPoint& x);

// Z_j, 1<=j<=n, on the axis plane x_tilde = r e_1 (signed first coordinate).
// Z_j = d_{x_j} U for j < n, Z_n = (n-2)/2 U + x . grad U.
double eval_Z(int j, const CylPoint& x);

// Z_j at a general Cartesian point (xt in R^{n-1} given by its first two
// coordinates and radius of the rest zero); used by the FD residual check.
double eval_Z_cart(int j, const std::vector<double>& xt, double xn, int n);

// max |Delta Z_j| by 5-point second differences (step tol.fd_step scale) and
// max | -d_{xn} Z_j - (n/(n-2)) U^{2/(n-2)} Z_j | by closed forms.
struct KernelResiduals {
  double interior_max = 0.0;
  double boundary_max = 0.0;
};
KernelResiduals kernel_residuals(int j, const std::vector<CylPoint>& interior_samples,
                                 const std::vector<CylPoint>& boundary_samples,
                                 const Tolerances& tol);

// Tensor quadrature grid on [0,r_max] x [0,xn_max] with geometric panels and
// compactified tail nodes (covers the rest of the quadrant for integrands
// decaying faster than rho^-2 in each variable).
struct QuadratureGrid {
  double r_max = 0.0;
  double xn_max = 0.0;
  std::vector<double> r, wr;    // 1D radial nodes/weights (incl. tail)
  std::vector<double> xn, wxn;  // 1D normal nodes/weights (incl. tail)
  int dim = 5;

  static QuadratureGrid build(double r_max, double xn_max, int order = 16, bool with_tail = true,
                              int dim = 5);
  std::size_t size() const { return r.size() * xn.size(); }
};

// Scalar field sampled on a QuadratureGrid, with optional analytic gradient
// channels and boundary trace (values at xn = 0).
struct CylField {
  const QuadratureGrid* grid = nullptr;
  std::vector<double> value;      // size r.size()*xn.size(), row-major in r
  std::vector<double> grad_r;     // optional (empty if absent)
  std::vector<double> grad_xn;    // optional
  std::vector<double> boundary;   // values at (r_i, 0)
  double time_stamp = 0.0;

  static CylField sample(const QuadratureGrid& g,
                         const std::function<double(double, double)>& f,
                         const std::function<double(double, double)>& fr = nullptr,
                         const std::function<double(double, double)>& fxn = nullptr);
  bool has_grad() const { return !grad_r.empty(); }
  double at(std::size_t i, std::size_t j) const { return value[i * grid->xn.size() + j]; }
};

// Field sampled from U with analytic gradients.
CylField sample_U(const QuadratureGrid& g);

// J[v] = 1/2 int |grad v|^2 - 1/(p+1) int_bdy |v|^{p+1},  p = n/(n-2)
double functional_J(const CylField& f);
// I[v] = int |grad v|^2 - int_bdy |v|^{p+1}
double functional_I(const CylField& f);
// B_U[f,g] = int grad f . grad g - p int_bdy U^{p-1} f g
double quadform_BU(const CylField& f, const CylField& g);
// Q(f) = int |grad f|^2 / ( int_bdy |f|^{p+1} )^{2/(p+1)}
double rayleigh_Q(const CylField& f);

// Surface measure of S^{d-1}.
double sphere_area(int d);

}  // namespace bbl
