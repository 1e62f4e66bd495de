#include "bbl/modulation.hpp"

#include <cmath>
#include <stdexcept>

#include "bbl/profiles.hpp"
#include "bbl/quad.hpp"
#include "bbl/spectral.hpp"

namespace bbl::modulation {

namespace {
constexpr double kPi = 3.14159265358979323846;

double Zn_boundary(double r, int n) { return eval_Z(n, CylPoint(r, 0.0, n)); }

// int over the half space of Z_n^2 W(|y|) r^{n-2} measure, W optional
double Zn2_integral(int n, double cut_R) {
  const double ang = sphere_area(n - 1);
  const double lim = cut_R > 0.0 ? 8.0 * cut_R : 0.0;
  auto zr = [&](double r, double z) {
    const double Zn = eval_Z(n, CylPoint(r, z, n));
    double w = 1.0;
    if (cut_R > 0.0) w = cutoff_eta(std::sqrt(r * r + z * z) / (4.0 * cut_R));
    return Zn * Zn * std::pow(r, n - 2.0) * w;
  };
  double total = 0.0;
  if (cut_R > 0.0) {
    auto brk = quad::geometric_breaks(0.0, 0.5, lim, 1.6);
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      auto ri = quad::mapped_gl(20, brk[i], brk[i + 1]);
      for (std::size_t a = 0; a < ri.x.size(); ++a) {
        double inner = 0.0;
        for (std::size_t j = 0; j + 1 < brk.size(); ++j)
          inner += quad::panel([&](double z) { return zr(ri.x[a], z); }, brk[j], brk[j + 1], 20);
        total += ri.w[a] * inner;
      }
    }
    return ang * total;
  }
  // full integral: finite panels to 64 plus compactified tails in each variable
  const double A = 64.0;
  auto inner_full = [&](double r) {
    auto brk = quad::geometric_breaks(0.0, 0.5, A, 1.6);
    double v = quad::panels([&](double z) { return zr(r, z); }, brk, 20);
    v += quad::tail_compactified([&](double z) { return zr(r, z); }, A, 24, 6);
    return v;
  };
  auto brk = quad::geometric_breaks(0.0, 0.5, A, 1.6);
  total = quad::panels(inner_full, brk, 20);
  total += quad::tail_compactified(inner_full, A, 24, 6);
  return ang * total;
}

}  // namespace

double int_Zn2_cutoff(double R, int n) { return Zn2_integral(n, R); }

double int_boundary_U_pow(int n) {
  const double ang = sphere_area(n - 1);
  const double p = n / (n - 2.0);
  auto f = [&](double r) {
    return std::pow(eval_U(CylPoint(r, 0.0, n)), p) * std::pow(r, n - 2.0);
  };
  const double A = 64.0;
  double v = quad::panels(f, quad::geometric_breaks(0.0, 0.5, A, 1.6), 24);
  v += quad::tail_compactified(f, A, 24, 6);
  return ang * v;
}

double compute_AR(double R, int n) {
  if (!(R >= 1.0)) throw std::invalid_argument("compute_AR: R >= 1 required");
  const double ang = sphere_area(n - 1);
  const double p = n / (n - 2.0);
  const double denom = Zn2_integral(n, R);
  auto f = [&](double r) {
    return p * std::pow(eval_U(CylPoint(r, 0.0, n)), p - 1.0) * cutoff_eta(r / (4.0 * R)) *
           Zn_boundary(r, n) * std::pow(r, n - 2.0);
  };
  const double num = ang * quad::panels(f, quad::geometric_breaks(0.0, 0.5, 8.0 * R, 1.6), 24);
  return -num / denom;
}

double compute_A_infty(int n) {
  return 0.5 * (n - 2.0) * int_boundary_U_pow(n) / Zn2_integral(n, 0.0);
}

double mu0(int l, double T, double A_R, int n, double t) {
  if (n >= 6) throw std::invalid_argument("mu0: n < 6 required");
  if (!(t < T)) throw std::invalid_argument("mu0: t < T required");
  const double e = 6.0 - n;
  const double coef = std::pow(A_R * 0.5 * e / (l + 1.0), 2.0 / e);
  return coef * std::pow(T - t, 2.0 * (l + 1.0) / e);
}

double mu0_dot(int l, double T, double A_R, int n, double t) {
  const double e = 6.0 - n;
  const double coef = std::pow(A_R * 0.5 * e / (l + 1.0), 2.0 / e);
  const double ex = 2.0 * (l + 1.0) / e;
  return -coef * ex * std::pow(T - t, ex - 1.0);
}

double mu0_ode_residual(int l, double T, double A_R, int n, const std::vector<double>& times) {
  double worst = 0.0;
  for (double t : times) {
    const double m = mu0(l, T, A_R, n, t);
    const double md = mu0_dot(l, T, A_R, n, t);
    const double res = md * std::pow(m, 2.0 - 0.5 * n) + std::pow(T - t, l) * A_R;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

std::vector<double> mu1_ode_step(int l, const std::vector<double>& F_samples,
                                 const std::vector<double>& sigma_grid) {
  if (F_samples.size() != sigma_grid.size() || sigma_grid.size() < 2)
    throw std::invalid_argument("mu1_ode_step: grids mismatch");
  for (std::size_t k = 1; k < sigma_grid.size(); ++k)
    if (!(sigma_grid[k] > sigma_grid[k - 1]))
      throw std::invalid_argument("mu1_ode_step: sigma grid must increase");
  // ansatz window: F may not blow up faster than sigma^{2l+1}
  {
    double head = 0.0, tail = 0.0;
    const std::size_t m = sigma_grid.size();
    for (std::size_t k = 0; k < m; ++k) {
      const double c = std::abs(F_samples[k]) * std::pow(sigma_grid[k], -(2.0 * l + 1.0));
      if (k < m / 8 + 1) head = std::max(head, c);
      if (k >= m - m / 8 - 1) tail = std::max(tail, c);
    }
    if (head > 100.0 * (tail + 1e-300))
      throw std::invalid_argument("mu1_ode_step: F grows faster than (T-t)^{2l+1} (ansatz window violated)");
  }
  // mu1(sigma) = sigma^{-(l+1)} int_0^sigma tau^{l+1} F dtau, trapezoid on the
  // given grid; the [0, sigma_0] head uses the power-law model F ~ F_0 (tau/s_0)^{2l+1}
  std::vector<double> mu1(sigma_grid.size(), 0.0);
  double acc = F_samples[0] * std::pow(sigma_grid[0], l + 2.0) / (3.0 * l + 3.0);
  mu1[0] = acc * std::pow(sigma_grid[0], -(l + 1.0));
  for (std::size_t k = 1; k < sigma_grid.size(); ++k) {
    const double a = sigma_grid[k - 1], b = sigma_grid[k];
    const double fa = F_samples[k - 1] * std::pow(a, l + 1.0);
    const double fb = F_samples[k] * std::pow(b, l + 1.0);
    acc += 0.5 * (fa + fb) * (b - a);
    mu1[k] = acc * std::pow(b, -(l + 1.0));
  }
  return mu1;
}

double orthogonality_residual(const OrthoSetup& s, const std::function<double(double)>& psi_boundary) {
  const int n = s.n;
  const double ang = sphere_area(n - 1);
  const double p = n / (n - 2.0);
  const double tau = s.T - s.t;
  if (!(tau > 0.0)) throw std::invalid_argument("orthogonality_residual: t < T required");

  auto theta_at = [&](double dist) {
    return spectral::theta(s.l, CylPoint(dist, 0.0, n), TimeWindow(s.T, s.t));
  };
  auto psi_at = [&](double dist) { return psi_boundary ? psi_boundary(dist) : 0.0; };

  if (s.j == n) {
    const double I = Zn2_integral(n, s.R);
    // boundary integral: radial part of (psi + Theta)(mu y~ + xi - q~) against Z_n
    double J = 0.0;
    {
      auto f = [&](double rho) {
        const double Up = p * std::pow(eval_U(CylPoint(rho, 0.0, n)), p - 1.0);
        const double eta = cutoff_eta(rho / (4.0 * s.R));
        if (eta == 0.0) return 0.0;
        double val;
        if (s.xi_offset == 0.0) {
          val = psi_at(s.mu * rho) + theta_at(s.mu * rho);
        } else {
          // angular average over S^{n-2} of the shifted radial argument
          val = 0.0;
          auto g = [&](double cth) {
            const double d = std::sqrt(s.mu * s.mu * rho * rho + s.xi_offset * s.xi_offset +
                                       2.0 * s.mu * rho * s.xi_offset * cth);
            return (psi_at(d) + theta_at(d)) * std::pow(1.0 - cth * cth, 0.5 * (n - 4.0));
          };
          const double norm = quad::panel([&](double c) { return std::pow(1.0 - c * c, 0.5 * (n - 4.0)); },
                                          -1.0, 1.0, 24);
          val = quad::panel(g, -1.0, 1.0, 24) / norm;
        }
        return Up * eta * val * Zn_boundary(rho, n) * std::pow(rho, n - 2.0);
      };
      J = ang * quad::panels(f, quad::geometric_breaks(0.0, 0.5, 8.0 * s.R, 1.6), 24);
    }
    return s.mu_dot * s.mu * I + std::pow(s.mu, 0.5 * n - 1.0) * J;
  }

  // tangential kernels j < n: parity leaves xi_dot Z_j^2 plus the shifted trace term
  // int eta Z_j^2 dy = c^2 <w_1^2> int g^{-n} r^2 eta r^{n-2} ...
  const double c2 = std::pow(n - 2.0, static_cast<double>(n));
  double IZ1 = 0.0;
  {
    auto zr = [&](double r, double z) {
      const double g = r * r + (1.0 + z) * (1.0 + z);
      const double eta = cutoff_eta(std::sqrt(r * r + z * z) / (4.0 * s.R));
      return c2 * std::pow(g, -static_cast<double>(n)) * r * r / (n - 1.0) * eta *
             std::pow(r, n - 2.0);
    };
    auto brk = quad::geometric_breaks(0.0, 0.5, 8.0 * s.R, 1.6);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      auto ri = quad::mapped_gl(20, brk[i], brk[i + 1]);
      for (std::size_t a = 0; a < ri.x.size(); ++a) {
        double inner = 0.0;
        for (std::size_t j2 = 0; j2 + 1 < brk.size(); ++j2)
          inner += quad::panel([&](double z) { return zr(ri.x[a], z); }, brk[j2], brk[j2 + 1], 20);
        total += ri.w[a] * inner;
      }
    }
    IZ1 = ang * total;
  }
  // boundary term: int Up eta (psi+Theta)(|mu rho w + delta e_1|) Z_j(y~,0) dy~
  double J1 = 0.0;
  {
    const double cZ = -std::pow(n - 2.0, 0.5 * n);
    const double Sm2 = sphere_area(n - 2);  // angular measure of the cos-theta slice
    auto f = [&](double rho) {
      const double Up = p * std::pow(eval_U(CylPoint(rho, 0.0, n)), p - 1.0);
      const double eta = cutoff_eta(rho / (4.0 * s.R));
      if (eta == 0.0) return 0.0;
      const double g = rho * rho + 1.0;
      auto gfun = [&](double cth) {
        const double d = std::sqrt(s.mu * s.mu * rho * rho + s.xi_offset * s.xi_offset +
                                   2.0 * s.mu * rho * s.xi_offset * cth);
        return (psi_at(d) + theta_at(d)) * cth * std::pow(1.0 - cth * cth, 0.5 * (n - 4.0));
      };
      const double angint = Sm2 * quad::panel(gfun, -1.0, 1.0, 24);
      return Up * eta * cZ * std::pow(g, -0.5 * n) * rho * angint * std::pow(rho, n - 2.0);
    };
    J1 = quad::panels(f, quad::geometric_breaks(0.0, 0.5, 8.0 * s.R, 1.6), 24);
  }
  return s.mu * s.xi_dot * IZ1 + std::pow(s.mu, 0.5 * n - 1.0) * J1;
}

}  // namespace bbl::modulation
