#pragma once

#include <array>
#include <vector>

#include "bbl/core.hpp"

// Vanishing adjustment functions: monomial bumps evolved under the Neumann
// heat flow whose derivative matrix at the prescribed boundary points is
// inverted to produce the Kronecker system V_{p,m}.
namespace bbl::adjust {

using BoundaryPoint = std::array<double, 4>;  // a point of the boundary plane (n = 5)

struct AdjustmentSet {
  std::vector<BoundaryPoint> points;
  int order = 0;                         // N_0
  double d = 0.0;                        // bump radius parameter
  double base_time = 0.0;                // evaluation time T_0
  std::vector<std::array<int, 5>> multis;  // admissible m (|m| <= N_0, m_5 even)
  std::vector<std::vector<double>> matrix;   // derivative matrix D^k g_{p,m}(p')
  std::vector<std::vector<double>> inverse;  // mix coefficients
  double max_kronecker_defect = 0.0;         // |D^k V_{p,m}(p') - delta| by quadrature
  std::size_t size() const { return points.size() * multis.size(); }
};

// Build the adjustment set: evolve each bump, assemble the derivative matrix
// by closed-form Gaussian moments (the bump cutoff is dropped when the kernel
// concentration makes it negligible; otherwise tensor Gauss-Hermite
// quadrature), verify strict diagonal dominance, invert.
AdjustmentSet build_adjustments(const std::vector<BoundaryPoint>& points, int N0, double d,
                                double base_time);

// D^k V_{p,m}(x, t): derivative of the combined adjustment function.
double eval_V_derivative(const AdjustmentSet& set, std::size_t p_index,
                         const std::array<int, 5>& m, const std::array<double, 5>& x, double t,
                         const std::array<int, 5>& k);
double eval_V(const AdjustmentSet& set, std::size_t p_index, const std::array<int, 5>& m,
              const std::array<double, 5>& x, double t);

// D^k g evolved from one bump, by Gaussian moments (eta dropped) or by
// Gauss-Hermite quadrature with the cutoff included.
double evolved_bump_derivative(const BoundaryPoint& p, const std::array<int, 5>& m, double d,
                               const std::array<double, 5>& x, double t, const std::array<int, 5>& k,
                               bool with_cutoff_quadrature);

}  // namespace bbl::adjust
