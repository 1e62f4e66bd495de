#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Quadrature building blocks: Gauss-Legendre panels, geometric panel chains
// for algebraically decaying integrands, compactified tails, Gauss-Hermite.
namespace bbl::quad {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1,1]; cached per order.
const Rule1D& gauss_legendre(int order);

// Gauss-Hermite rule for weight e^{-x^2} on (-inf,inf); cached per order.
const Rule1D& gauss_hermite(int order);

// Nodes/weights of a GL rule mapped to [a,b].
Rule1D mapped_gl(int order, double a, double b);

// Integrate f over [a,b] with one GL panel.
double panel(const std::function<double(double)>& f, double a, double b, int order = 16);

// Integrate f over consecutive panels defined by breakpoints.
double panels(const std::function<double(double)>& f, const std::vector<double>& brk, int order = 16);

// Breakpoints a, a*g, a*g^2, ..., b (geometric), prefixed with lo if lo < a.
std::vector<double> geometric_breaks(double lo, double a, double b, double growth = 2.0);

// Tail integral over [A, inf) by the compactification rho = A/v, v in (0,1].
// Requires f(rho) -> 0 faster than rho^{-2}.
double tail_compactified(const std::function<double(double)>& f, double A, int order = 32, int npanels = 8);

// Adaptive 1D integration on [a,b] (GL panel bisection to given tolerances).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, double rel_tol, int max_depth = 24);

}  // namespace bbl::quad
