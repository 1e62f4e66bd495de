#include "bbl/profiles.hpp"

#include <cmath>
#include <stdexcept>

#include "bbl/par.hpp"

namespace bbl {

namespace {
double g_of(const CylPoint& x) { return x.r * x.r + (1.0 + x.xn) * (1.0 + x.xn); }
}  // namespace

double sphere_area(int d) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(std::acos(-1.0), 0.5 * d) / std::tgamma(0.5 * d);
}

double eval_U(const CylPoint& x) {
  const double n = x.dim;
  return std::pow(n - 2.0, 0.5 * (n - 2.0)) * std::pow(g_of(x), -0.5 * (n - 2.0));
}

ProfileEval eval_U_full(const CylPoint& x) {
  const double n = x.dim;
  const double g = g_of(x);
  const double cn = std::pow(n - 2.0, 0.5 * (n - 2.0));
  ProfileEval e;
  e.value = cn * std::pow(g, -0.5 * (n - 2.0));
  const double dg = -0.5 * (n - 2.0) * cn * std::pow(g, -0.5 * n);
  e.grad_r = dg * 2.0 * x.r;
  e.grad_xn = dg * 2.0 * (1.0 + x.xn);
  return e;
}

double eval_U_scaled(const BubbleParams& b, const CylPoint& x) {
  const double n = x.dim;
  return std::pow(b.mu, -0.5 * (n - 2.0)) * eval_U(inner_coords(x, b));
}

double eval_Z(int j, const CylPoint& x) {
  const int n = x.dim;
  if (j < 1 || j > n) throw std::invalid_argument("eval_Z: j out of range");
  const double g = g_of(x);
  const double c = std::pow(n - 2.0, 0.5 * n);
  if (j == n) return 0.5 * c * std::pow(g, -0.5 * n) * (1.0 - x.norm2());
  // tangential kernels differ only by rotation; evaluate along x_tilde = r e_1
  const double xj = (j == 1) ? x.r : 0.0;
  return -c * std::pow(g, -0.5 * n) * xj;
}

double eval_Z_cart(int j, const std::vector<double>& xt, double xn, int n) {
  double rt2 = 0.0;
  for (double v : xt) rt2 += v * v;
  const double g = rt2 + (1.0 + xn) * (1.0 + xn);
  const double c = std::pow(n - 2.0, 0.5 * n);
  if (j == n) return 0.5 * c * std::pow(g, -0.5 * n) * (1.0 - rt2 - xn * xn);
  const double xj = (j <= static_cast<int>(xt.size())) ? xt[j - 1] : 0.0;
  return -c * std::pow(g, -0.5 * n) * xj;
}

KernelResiduals kernel_residuals(int j, const std::vector<CylPoint>& interior_samples,
                                 const std::vector<CylPoint>& boundary_samples,
                                 const Tolerances& tol) {
  if (interior_samples.empty() && boundary_samples.empty())
    throw std::invalid_argument("kernel_residuals: empty sample list");
  KernelResiduals out;
  const double h = tol.fd_step;

  out.interior_max = par::block_max_abs(interior_samples.size(), [&](std::size_t k) {
    const CylPoint& p = interior_samples[k];
    const int n = p.dim;
    std::vector<double> xt(n - 1, 0.0);
    xt[0] = p.r;
    double lap = 0.0;
    const double f0 = eval_Z_cart(j, xt, p.xn, n);
    for (int d = 0; d < n; ++d) {
      double fp, fm;
      if (d < n - 1) {
        std::vector<double> xp = xt, xm = xt;
        xp[d] += h;
        xm[d] -= h;
        fp = eval_Z_cart(j, xp, p.xn, n);
        fm = eval_Z_cart(j, xm, p.xn, n);
      } else {
        fp = eval_Z_cart(j, xt, p.xn + h, n);
        fm = eval_Z_cart(j, xt, p.xn - h, n);
      }
      lap += (fp - 2.0 * f0 + fm) / (h * h);
    }
    return lap;
  });

  out.boundary_max = par::block_max_abs(boundary_samples.size(), [&](std::size_t k) {
    const CylPoint& p = boundary_samples[k];
    const int n = p.dim;
    const double g = p.r * p.r + 1.0;
    const double c = std::pow(n - 2.0, 0.5 * n);
    // closed-form -d_{xn} Z_j at xn = 0
    double dZn;
    if (j == n) {
      // Z_n = c/2 g^{-n/2} (1-|x|^2); d_xn g = 2(1+xn), d_xn |x|^2 = 2 xn
      dZn = 0.5 * c * (-0.5 * n) * std::pow(g, -0.5 * n - 1.0) * 2.0 * (1.0 - p.r * p.r);
      // the -2 xn term vanishes at xn=0
    } else {
      const double xj = (j == 1) ? p.r : 0.0;
      dZn = -c * (-0.5 * n) * std::pow(g, -0.5 * n - 1.0) * 2.0 * xj;
    }
    const double U = eval_U(CylPoint(p.r, 0.0, n));
    const double Z = eval_Z(j, CylPoint(p.r, 0.0, n));
    const double rhs = (n / (n - 2.0)) * std::pow(U, 2.0 / (n - 2.0)) * Z;
    return -dZn - rhs;
  });
  return out;
}

QuadratureGrid QuadratureGrid::build(double r_max, double xn_max, int order, bool with_tail, int dim) {
  QuadratureGrid g;
  g.r_max = r_max;
  g.xn_max = xn_max;
  g.dim = dim;
  auto build_axis = [&](double xmax, std::vector<double>& x, std::vector<double>& w) {
    auto brk = quad::geometric_breaks(0.0, 0.25, xmax, 2.0);
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      auto rule = quad::mapped_gl(order, brk[i], brk[i + 1]);
      x.insert(x.end(), rule.x.begin(), rule.x.end());
      w.insert(w.end(), rule.w.begin(), rule.w.end());
    }
    if (with_tail) {
      // rho = xmax / v, v in (0,1]; 8 panels in v
      const int npan = 8;
      for (int pnl = 0; pnl < npan; ++pnl) {
        auto rule = quad::mapped_gl(order, static_cast<double>(pnl) / npan,
                                    static_cast<double>(pnl + 1) / npan);
        for (int i = 0; i < order; ++i) {
          const double v = rule.x[i];
          if (v <= 0.0) continue;
          x.push_back(xmax / v);
          w.push_back(rule.w[i] * xmax / (v * v));
        }
      }
    }
  };
  build_axis(r_max, g.r, g.wr);
  build_axis(xn_max, g.xn, g.wxn);
  return g;
}

CylField CylField::sample(const QuadratureGrid& g, const std::function<double(double, double)>& f,
                          const std::function<double(double, double)>& fr,
                          const std::function<double(double, double)>& fxn) {
  CylField out;
  out.grid = &g;
  const std::size_t nr = g.r.size(), nz = g.xn.size();
  out.value.resize(nr * nz);
  if (fr) out.grad_r.resize(nr * nz);
  if (fxn) out.grad_xn.resize(nr * nz);
  par::for_each(nr, [&](std::size_t i) {
    for (std::size_t k = 0; k < nz; ++k) {
      out.value[i * nz + k] = f(g.r[i], g.xn[k]);
      if (fr) out.grad_r[i * nz + k] = fr(g.r[i], g.xn[k]);
      if (fxn) out.grad_xn[i * nz + k] = fxn(g.r[i], g.xn[k]);
    }
  });
  out.boundary.resize(nr);
  for (std::size_t i = 0; i < nr; ++i) out.boundary[i] = f(g.r[i], 0.0);
  return out;
}

CylField sample_U(const QuadratureGrid& g) {
  const int n = g.dim;
  return CylField::sample(
      g, [n](double r, double z) { return eval_U(CylPoint(r, z, n)); },
      [n](double r, double z) { return eval_U_full(CylPoint(r, z, n)).grad_r; },
      [n](double r, double z) { return eval_U_full(CylPoint(r, z, n)).grad_xn; });
}

namespace {

// int_{R^n_+} F r^{n-2} dr dxn with F given per node (deterministic reduction)
double volume_integral(const QuadratureGrid& g, const std::function<double(std::size_t, std::size_t)>& F) {
  const std::size_t nr = g.r.size(), nz = g.xn.size();
  const double ang = sphere_area(g.dim - 1);
  return ang * par::block_sum(nr * nz, [&](std::size_t idx) {
           const std::size_t i = idx / nz, k = idx % nz;
           return g.wr[i] * g.wxn[k] * std::pow(g.r[i], g.dim - 2.0) * F(i, k);
         });
}

double boundary_integral(const QuadratureGrid& g, const std::function<double(std::size_t)>& F) {
  const double ang = sphere_area(g.dim - 1);
  return ang * par::block_sum(g.r.size(), [&](std::size_t i) {
           return g.wr[i] * std::pow(g.r[i], g.dim - 2.0) * F(i);
         });
}

void require_grad(const CylField& f, const char* who) {
  if (!f.has_grad() || f.grad_xn.empty())
    throw std::invalid_argument(std::string(who) + ": field needs gradient channels");
}

}  // namespace

double functional_J(const CylField& f) {
  require_grad(f, "functional_J");
  const QuadratureGrid& g = *f.grid;
  const double p = g.dim / (g.dim - 2.0);
  const std::size_t nz = g.xn.size();
  double grad2 = volume_integral(g, [&](std::size_t i, std::size_t k) {
    const std::size_t id = i * nz + k;
    return f.grad_r[id] * f.grad_r[id] + f.grad_xn[id] * f.grad_xn[id];
  });
  double tr = boundary_integral(g, [&](std::size_t i) {
    return std::pow(std::abs(f.boundary[i]), p + 1.0);
  });
  return 0.5 * grad2 - tr / (p + 1.0);
}

double functional_I(const CylField& f) {
  require_grad(f, "functional_I");
  const QuadratureGrid& g = *f.grid;
  const double p = g.dim / (g.dim - 2.0);
  const std::size_t nz = g.xn.size();
  double grad2 = volume_integral(g, [&](std::size_t i, std::size_t k) {
    const std::size_t id = i * nz + k;
    return f.grad_r[id] * f.grad_r[id] + f.grad_xn[id] * f.grad_xn[id];
  });
  double tr = boundary_integral(g, [&](std::size_t i) {
    return std::pow(std::abs(f.boundary[i]), p + 1.0);
  });
  return grad2 - tr;
}

double quadform_BU(const CylField& f, const CylField& g2) {
  require_grad(f, "quadform_BU");
  require_grad(g2, "quadform_BU");
  if (f.grid != g2.grid) throw std::invalid_argument("quadform_BU: fields on different grids");
  const QuadratureGrid& g = *f.grid;
  const double p = g.dim / (g.dim - 2.0);
  const std::size_t nz = g.xn.size();
  double cross = volume_integral(g, [&](std::size_t i, std::size_t k) {
    const std::size_t id = i * nz + k;
    return f.grad_r[id] * g2.grad_r[id] + f.grad_xn[id] * g2.grad_xn[id];
  });
  double tr = boundary_integral(g, [&](std::size_t i) {
    const double U = eval_U(CylPoint(g.r[i], 0.0, g.dim));
    return std::pow(U, p - 1.0) * f.boundary[i] * g2.boundary[i];
  });
  return cross - p * tr;
}

double rayleigh_Q(const CylField& f) {
  require_grad(f, "rayleigh_Q");
  const QuadratureGrid& g = *f.grid;
  const double p = g.dim / (g.dim - 2.0);
  const std::size_t nz = g.xn.size();
  double grad2 = volume_integral(g, [&](std::size_t i, std::size_t k) {
    const std::size_t id = i * nz + k;
    return f.grad_r[id] * f.grad_r[id] + f.grad_xn[id] * f.grad_xn[id];
  });
  double tr = boundary_integral(g, [&](std::size_t i) {
    return std::pow(std::abs(f.boundary[i]), p + 1.0);
  });
  if (!(tr > 0.0)) throw std::invalid_argument("rayleigh_Q: zero boundary trace");
  return grad2 * std::pow(tr, -2.0 / (p + 1.0));
}

}  // namespace bbl
