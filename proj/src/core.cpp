#include "bbl/core.hpp"

namespace bbl {

// q(u) = 1 - u^3 (10 - 15 u + 6 u^2) is the quintic smoothstep complement:
// q(0)=1, q(1)=0, with q', q'' vanishing at both ends.
double cutoff_eta(double s) {
  if (s < 0.0) throw std::invalid_argument("cutoff_eta: s >= 0 required");
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_eta_d1(double s) {
  if (s < 0.0) throw std::invalid_argument("cutoff_eta_d1: s >= 0 required");
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  // d/du [u^3(10-15u+6u^2)] = 30u^2 - 60u^3 + 30u^4 = 30 u^2 (1-u)^2
  return -30.0 * u * u * (1.0 - u) * (1.0 - u);
}

double cutoff_eta_d2(double s) {
  if (s < 0.0) throw std::invalid_argument("cutoff_eta_d2: s >= 0 required");
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

CylPoint inner_coords(const CylPoint& x, const BubbleParams& b) {
  // Tangential part: the evaluation point sits at radius x.r on the axis
  // plane; the center is shifted by xi_offset along the same axis.
  const double yr = (x.r - b.xi_offset) / b.mu;
  return CylPoint(std::abs(yr), x.xn / b.mu, x.dim);
}

std::pair<CylPoint, double> selfsim_coords(const CylPoint& x, double q_r, const TimeWindow& w) {
  const double rem = w.remaining();
  const double root = std::sqrt(rem);
  const double zr = (x.r - q_r) / root;
  CylPoint z(std::abs(zr), x.xn / root, x.dim);
  return {z, -std::log(rem)};
}

std::pair<CylPoint, double> selfsim_coords_inverse(const CylPoint& z, double s, double q_r, double T) {
  const double rem = std::exp(-s);
  CylPoint x(std::abs(q_r + std::sqrt(rem) * z.r), std::sqrt(rem) * z.xn, z.dim);
  return {x, T - rem};
}

}  // namespace bbl
