#include "bbl/quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bbl::quad {

namespace {

Rule1D compute_gl(int n) {
  // Newton iteration on Legendre P_n, symmetric nodes.
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

Rule1D compute_gh(int n) {
  // Newton iteration on physicists' Hermite H_n (weight e^{-x^2}).
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = std::acos(-1.0);
  const double c = std::pow(pi, -0.25);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x;
    if (i == 0)
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      x = r.x[n - 1] - 1.14 * std::pow(n, 0.426) / r.x[n - 1];
    else if (i == 2)
      x = 1.86 * r.x[n - 2] - 0.86 * r.x[n - 1];
    else if (i == 3)
      x = 1.91 * r.x[n - 3] - 0.91 * r.x[n - 2];
    else
      x = 2.0 * r.x[n - i] - r.x[n - i + 1];
    double dp = 0.0;
    for (int it = 0; it < 200; ++it) {
      // orthonormal Hermite recurrence
      double h0 = c, h1 = c * std::sqrt(2.0) * x;
      for (int k = 2; k <= n; ++k) {
        double h2 = x * std::sqrt(2.0 / k) * h1 - std::sqrt((k - 1.0) / k) * h0;
        h0 = h1;
        h1 = h2;
      }
      dp = std::sqrt(2.0 * n) * h0;
      double dx = h1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[n - 1 - i] = x;
    r.x[i] = -x;
    double w = 2.0 / (dp * dp);
    r.w[n - 1 - i] = w;
    r.w[i] = w;
  }
  return r;
}

std::map<int, Rule1D> g_gl, g_gh;
std::mutex g_mx;

}  // namespace

const Rule1D& gauss_legendre(int order) {
  std::lock_guard<std::mutex> lk(g_mx);
  auto it = g_gl.find(order);
  if (it == g_gl.end()) it = g_gl.emplace(order, compute_gl(order)).first;
  return it->second;
}

const Rule1D& gauss_hermite(int order) {
  std::lock_guard<std::mutex> lk(g_mx);
  auto it = g_gh.find(order);
  if (it == g_gh.end()) it = g_gh.emplace(order, compute_gh(order)).first;
  return it->second;
}

Rule1D mapped_gl(int order, double a, double b) {
  const Rule1D& base = gauss_legendre(order);
  Rule1D r;
  r.x.resize(order);
  r.w.resize(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    r.x[i] = mid + half * base.x[i];
    r.w[i] = half * base.w[i];
  }
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b, int order) {
  const Rule1D& base = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += base.w[i] * f(mid + half * base.x[i]);
  return half * s;
}

double panels(const std::function<double(double)>& f, const std::vector<double>& brk, int order) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) s += panel(f, brk[i], brk[i + 1], order);
  return s;
}

std::vector<double> geometric_breaks(double lo, double a, double b, double growth) {
  std::vector<double> brk;
  if (lo < a) brk.push_back(lo);
  double x = a;
  while (x < b) {
    brk.push_back(x);
    x *= growth;
  }
  brk.push_back(b);
  return brk;
}

double tail_compactified(const std::function<double(double)>& f, double A, int order, int npanels) {
  // int_A^inf f(rho) drho = int_0^1 f(A/v) A v^{-2} dv
  auto g = [&](double v) {
    const double rho = A / v;
    return f(rho) * A / (v * v);
  };
  double s = 0.0;
  for (int i = 0; i < npanels; ++i)
    s += panel(g, static_cast<double>(i) / npanels, static_cast<double>(i + 1) / npanels, order);
  return s;
}

namespace {
double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double abs_tol, double rel_tol, int depth, int order) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m, order);
  const double right = panel(f, m, b, order);
  const double err = std::abs(left + right - whole);
  if (depth <= 0) return left + right;
  if (err < abs_tol || err < rel_tol * std::abs(left + right)) return left + right;
  return adaptive_rec(f, a, m, left, 0.5 * abs_tol, rel_tol, depth - 1, order) +
         adaptive_rec(f, m, b, right, 0.5 * abs_tol, rel_tol, depth - 1, order);
}
}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, double rel_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  return adaptive_rec(f, a, b, panel(f, a, b, 16), abs_tol, rel_tol, max_depth, 16);
}

}  // namespace bbl::quad
