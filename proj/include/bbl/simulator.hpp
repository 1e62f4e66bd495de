#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bbl/ansatz.hpp"
#include "bbl/core.hpp"

// Explicit finite-difference solver for d_t u = Delta u in the half-space
// with the nonlinear Neumann condition -d_xn u = |u|^{2/(n-2)} u, reduced
// cylindrically (u_rr + (n-2)/r u_r + u_zz, n = 5), plus the exact type-I
// solution used as the oracle and the blow-up rate fit.
namespace bbl::sim {

struct CylGrid {
  int nr = 8;
  int nz = 256;
  double r_max = 1.0;
  double h_max = 1.0;  // xn extent
  double dr() const { return r_max / (nr - 1); }
  double dz() const { return h_max / (nz - 1); }
};

struct SolverState {
  CylGrid grid;
  std::vector<double> u;  // row-major in r: u[i*nz + j]
  double t = 0.0;
  double dt = 0.0;
  long long step_count = 0;
  bool blown_up = false;

  double& at(int i, int j) { return u[static_cast<std::size_t>(i) * grid.nz + j]; }
  double at(int i, int j) const { return u[static_cast<std::size_t>(i) * grid.nz + j]; }
  double sup_abs() const;
  double boundary_sup() const;
  double mass_proxy() const;  // cell-weighted sum (monitoring only)
};

struct TypeISpec {
  double alpha = 0.5;
  double p = 5.0 / 3.0;
  double T = 0.04;
  double C_ap = 0.0;  // computed on demand if 0
};

// C_{alpha,p} by adaptive quadrature of the defining integral.
double type1_constant(double alpha, double p, double quad_rel = 1e-12);

// u_1(xn, t): w-substituted integral, boundary value C (T-t)^{-alpha/(p-1)}.
double type1_exact(const TypeISpec& spec, double xn, double t, const Tolerances& tol);

// CFL-limited default step (the stated ceiling 0.4 min(dr,dz)^2/2, reduced if
// the axis/interior positivity requires it), with the boundary-stiffness guard.
double stable_dt(const SolverState& s);

// one explicit step (serial reference and OpenMP row-parallel versions)
void step_serial(SolverState& s);
void step(SolverState& s);

// discrete maximum principle: all update coefficients of the linear interior
// stencil nonnegative for this dt
bool max_principle_ok(const SolverState& s);

struct SeriesPoint {
  double t = 0.0, dt = 0.0, sup_u = 0.0, boundary_sup = 0.0, mass_proxy = 0.0;
};

struct RunConfig {
  double t_end = 1.0;
  double sup_threshold = 0.0;  // 0 = disabled
  int output_every = 200;      // steps between samples
};

std::vector<SeriesPoint> run(SolverState& s, const RunConfig& cfg);

struct RateFit {
  double T_est = 0.0;
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  bool accepted = false;
};

// joint fit of (T_est, exponent, prefactor) on log sup|u| vs log(T_est - t),
// T_est by golden-section maximization of r^2 over the trailing window.
RateFit fit_rate(const std::vector<SeriesPoint>& series, double window_fraction);

// sample the multi-bubble ansatz onto the grid as initial data; throws with
// the resolution arithmetic if the bubble core is unresolvable.
SolverState seed_with_ansatz(const ansatz::AnsatzConfig& cfg, double t0, const CylGrid& grid,
                             double A_R);

}  // namespace bbl::sim
