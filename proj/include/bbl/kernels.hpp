#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bbl/core.hpp"

// Neumann half-space heat kernel G_n, the self-similar kernel H_n, reduced
// (axisymmetric) kernel applications, the Duhamel representation, barrier
// derivative checks, and the small-instance Picard solver.
namespace bbl::kernels {

struct HeatKernelQuery {
  CylPoint x;
  double t = 0.0;
  CylPoint z;
  double s = 0.0;
  double plane_offset = -1.0;  // |x_tilde - z_tilde|; negative = |x.r - z.r|
};

// Gaussian plus reflected Gaussian, [4pi(t-s)]^{-n/2} ( e^{-...} + e^{-...} ).
double G_n(const HeatKernelQuery& q, int n);

// H_n(z,s,w,sigma) by its closed form.
double H_n(const CylPoint& z, double s, const CylPoint& w, double sigma, int n,
           double plane_offset = -1.0);
// Same quantity through e^{-sigma n/2} G_n(e^{-s/2}z, t3-e^{-s}, e^{-sigma/2}w, t3-e^{-sigma}).
double H_n_via_Gn(const CylPoint& z, double s, const CylPoint& w, double sigma, int n, double t3,
                  double plane_offset = -1.0);

// Scaled angular factors of the reduced kernels:
//  angular_S3(a) = e^{-a} int_{S^3} e^{a cos th} dw   (R^4 tangential reduction)
//  angular_S4(a) = e^{-a} int_{S^4} e^{a cos th} dw   (R^5 radial reduction)
double angular_S3(double a);
double angular_S4(double a);

// Reduced application of the 5D half-space kernel to axisymmetric data:
// int_{R^5_+} G_5((r,xn), t, z, t - tau) F(|z~|, z_5) dz
double apply_halfspace(double r, double xn, double tau, const std::function<double(double, double)>& F,
                       double span, int order = 24);
// int_{R^4} G_5((r,xn), t, (z~,0), t - tau) H(|z~|) dz~
double apply_boundary(double r, double xn, double tau, const std::function<double(double)>& H,
                      double span, int order = 24);
// Kernel mass over the half-space (should be 1).
double kernel_mass(double r, double xn, double tau, double span_sigmas = 14.0);

// Three-term representation (interior source + boundary flux + initial data),
// adaptive in time with the s = t - u^2 substitution near the diagonal.
// Sources are axisymmetric: f(r, xn, s), h(r, s), u0(r, xn); "span" bounds the
// spatial support of the data.
double duhamel(const std::function<double(double, double, double)>& interior_source,
               const std::function<double(double, double)>& boundary_source,
               const std::function<double(double, double)>& initial, const CylPoint& x, double t,
               double span, const Tolerances& tol);

// Barrier P(y) = |(y~, y_n + 1 + theta |y~|)|^{-a}: worst normalized margins
// min (-Delta P) <y>^{a+2} and min (-d_{y_n} P) <y>^{a+1} over the samples.
struct BarrierMargins {
  double interior_min = 0.0;
  double boundary_min = 0.0;
};
BarrierMargins barrier_check(double a, double theta, const std::vector<CylPoint>& samples);

// ---- small-instance Picard solver for the inner linear problem ----

struct PicardGrid {
  int nr = 64;       // nodes per spatial dimension (r and xn), spacing L/(n-1)
  int nz = 64;
  double L = 12.0;   // domain [0,L]^2
  int nt = 64;       // number of macro time steps
};

struct PicardResult {
  std::vector<std::vector<double>> history;  // nt+1 slices, each nr*nz row-major in r
  std::vector<double> gaps;                  // successive-iterate sup gaps
  int iterations = 0;
  bool converged = false;
};

// Fixed-point iteration of the half-space Duhamel representation of
//   d_tau phi = Delta phi + g,   -d_{y_n} phi = (n/(n-2)) U^{2/(n-2)} phi + h,
// with phi(tau0) = 0, on an axisymmetric grid. Throws if the iteration gap
// grows three times in a row (non-contraction on this grid).
PicardResult picard_inner(const std::function<double(double, double, double)>& g,
                          const std::function<double(double, double)>& h, const PicardGrid& grid,
                          double tau0, double tau1, int iterations, double stop_gap = 1e-12);

}  // namespace bbl::kernels
