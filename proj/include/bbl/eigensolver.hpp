#pragma once

#include <functional>
#include <vector>

#include "bbl/core.hpp"
#include "bbl/profiles.hpp"

// Discretized eigenproblem  -Delta f = lambda f in R^n_+,
// -d_{xn} f = p U^{p-1} f on the boundary (p = n/(n-2)): the unique negative
// eigenvalue lambda_0 with its positive eigenfunction Z_0, plus the
// trace-inequality checks of the same appendix.
namespace bbl::eig {

struct EigenGridSpec {
  int nodes = 160;       // per direction (before the Dirichlet node is dropped)
  double radius = 40.0;  // truncation radius; homogeneous Dirichlet there
  double grading = 3.0;  // sinh grading strength toward origin/boundary
};

struct EigenResult {
  double lambda0 = 0.0;
  double gap = 0.0;          // distance to the next discrete eigenvalue
  double decay_rate = 0.0;   // filled by decay_check
  std::vector<double> r;     // grid nodes
  std::vector<double> xn;
  std::vector<double> field; // Z_0 at nodes, row-major in r, L^2-normalized
  std::vector<double> cell_r, cell_xn;  // dual-cell weights (r^3 dr and dxn)
  double at(std::size_t i, std::size_t j) const { return field[i * xn.size() + j]; }
};

// Smallest eigenpair by LDLT inertia bisection plus shift-inverted iteration.
// Throws if the discrete problem does not have exactly one negative eigenvalue.
EigenResult solve_lambda0(int n, const EigenGridSpec& grid, const Tolerances& tol);

// Log-linear decay fit of Z_0 along rays; returns the fitted rate (also
// stored in res.decay_rate). Pass criterion: rate >= nu_fraction sqrt(-lambda0).
double decay_check(EigenResult& res, double nu_fraction);

// Rate fit helper on a single ray (used by decay_check and its tests).
double decay_fit(const std::vector<double>& dist, const std::vector<double>& vals);

// lhs = int u^2(x~,0) e^{-|x~|^2/4}, rhs = (n+4)/4 ||u||^2_{H^1_rho}; u given
// with analytic gradients.
struct TracePair {
  double lhs = 0.0;
  double rhs = 0.0;
};
TracePair trace_rho_check(const std::function<double(double, double)>& u,
                          const std::function<double(double, double)>& ur,
                          const std::function<double(double, double)>& uxn, int n);

struct EscobarResult {
  double Q_of_U = 0.0;
  double sharp_constant = 0.0;
  double rel_gap = 0.0;
};
EscobarResult escobar_check(int n);

}  // namespace bbl::eig
