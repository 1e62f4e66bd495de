#pragma once

#include <functional>
#include <vector>

#include "bbl/core.hpp"

// Leading modulation law: the constant A_R, the closed-form mu_{i,0}, the
// first-order linear ODE for mu_{i,1}, and the orthogonality residuals.
namespace bbl::modulation {

// A_R = -( int Z_n^2 eta(y/4R) dy )^{-1} int (n/(n-2)) U^{2/(n-2)} eta Z_n (y~,0) dy~
double compute_AR(double R, int n);
// R -> infinity limit, full integrals with compactified tails.
double compute_A_infty(int n);

// Denominator/numerator pieces (exposed for the closed-form checks).
double int_Zn2_cutoff(double R, int n);  // int Z_n^2 eta(y/(4R)) dy, R<=0 means no cutoff
double int_boundary_U_pow(int n);        // int U^{n/(n-2)}(y~,0) dy~

// mu_{i,0}(t) = [ A_R (6-n)/2 (l+1)^{-1} ]^{2/(6-n)} (T-t)^{2(l+1)/(6-n)}; n < 6.
double mu0(int l, double T, double A_R, int n, double t);
double mu0_dot(int l, double T, double A_R, int n, double t);

// max over times of | mu0' mu0^{2-n/2} + (T-t)^l A_R |
double mu0_ode_residual(int l, double T, double A_R, int n, const std::vector<double>& times);

// Backward-time linear ODE d mu1/d sigma + (l+1)/sigma mu1 = F(sigma) with
// sigma = T - t and mu1 -> 0 as sigma -> 0, via the integrating factor
// mu1(sigma) = sigma^{-(l+1)} int_0^sigma tau^{l+1} F(tau) dtau.
// F_samples[k] = F at sigma_grid[k]; sigma_grid increasing.
std::vector<double> mu1_ode_step(int l, const std::vector<double>& F_samples,
                                 const std::vector<double>& sigma_grid);

// Residual of the formal orthogonal equation for Z_j (cylindrical reduction;
// psi is a radial boundary trace, may be empty).
struct OrthoSetup {
  int j = 5;             // which kernel Z_j (j = n is the dilation mode)
  double mu = 1.0;
  double mu_dot = 0.0;
  double xi_offset = 0.0;  // |xi - q~|
  double xi_dot = 0.0;     // signed rate along the offset axis
  int l = 0;
  double T = 0.01;
  double t = 0.0;
  double R = 8.0;          // cutoff scale of eta(y/(4R))
  int n = 5;
};
double orthogonality_residual(const OrthoSetup& s, const std::function<double(double)>& psi_boundary);

}  // namespace bbl::modulation
