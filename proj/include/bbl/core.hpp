#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

// Shared domain types and the coordinate maps between physical, inner
// (bubble-scale) and self-similar variables on the half-space x_n >= 0.
// All profiles in scope are radial in the tangential variables, so points
// are kept in cylindrical form (r = |x_tilde|, xn).
namespace bbl {

struct CylPoint {
  double r = 0.0;   // |x_tilde|
  double xn = 0.0;  // normal coordinate, >= 0
  int dim = 5;      // ambient dimension n >= 3

  CylPoint() = default;
  CylPoint(double r_, double xn_, int dim_ = 5) : r(r_), xn(xn_), dim(dim_) {
    if (r < 0.0 || xn < 0.0 || dim < 3) throw std::invalid_argument("CylPoint: invalid coordinates");
  }
  double norm2() const { return r * r + xn * xn; }
  double norm() const { return std::sqrt(norm2()); }
};

struct TimeWindow {
  double T = 1.0;  // blow-up time
  double t = 0.0;  // current time, 0 <= t < T

  TimeWindow() = default;
  TimeWindow(double T_, double t_) : T(T_), t(t_) {
    if (!(T > 0.0) || t < 0.0 || !(t < T)) throw std::invalid_argument("TimeWindow: need 0 <= t < T");
  }
  double remaining() const { return T - t; }
};

struct BubbleParams {
  double mu = 1.0;        // scale mu > 0
  double xi_offset = 0.0; // |xi - q_tilde| in the cylindrical reduction
  double anchor_r = 0.0;  // distance of the evaluation point to the anchor q
  int l = 0;              // caloric order

  BubbleParams() = default;
  BubbleParams(double mu_, double xi_offset_ = 0.0, double anchor_r_ = 0.0, int l_ = 0)
      : mu(mu_), xi_offset(xi_offset_), anchor_r(anchor_r_), l(l_) {
    if (!(mu > 0.0) || l < 0) throw std::invalid_argument("BubbleParams: mu > 0, l >= 0 required");
  }
};

struct Tolerances {
  double quad_abs = 1e-10;
  double quad_rel = 1e-8;
  double fd_step = 1e-5;
  double eig_tol = 1e-9;

  void validate() const {
    if (!(quad_abs > 0.0 && quad_rel > 0.0 && fd_step > 0.0 && eig_tol > 0.0))
      throw std::invalid_argument("Tolerances must be strictly positive");
  }
};

// Radial cutoff: 1 on [0,1], 0 on [2,inf), C^2 quintic bridge in between.
double cutoff_eta(double s);
double cutoff_eta_d1(double s);
double cutoff_eta_d2(double s);

// y = (x - (xi,0)) / mu in cylindrical form. The tangential offset between
// the evaluation point and the bubble center is b.xi_offset (points are
// taken on the axis plane through the center).
CylPoint inner_coords(const CylPoint& x, const BubbleParams& b);

// Self-similar variables about a boundary anchor at tangential distance q_r:
// z = (x - q)/sqrt(T-t), s = -ln(T-t).
std::pair<CylPoint, double> selfsim_coords(const CylPoint& x, double q_r, const TimeWindow& w);

// Inverse map: x = q + e^{-s/2} z, t = T - e^{-s}.
std::pair<CylPoint, double> selfsim_coords_inverse(const CylPoint& z, double s, double q_r, double T);

}  // namespace bbl
