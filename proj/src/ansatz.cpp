#include "bbl/ansatz.hpp"

#include <cmath>
#include <stdexcept>

#include "bbl/modulation.hpp"
#include "bbl/profiles.hpp"
#include "bbl/spectral.hpp"

namespace bbl::ansatz {

namespace {

double sq(double v) { return v * v; }

// steady profile pieces at a signed tangential offset (y1, yn) from the center
struct UVal {
  double value, d1, dn;  // d1: signed tangential derivative, dn: normal
};
UVal U_at(double y1, double yn, int n) {
  const double g = y1 * y1 + sq(1.0 + yn);
  const double cn = std::pow(n - 2.0, 0.5 * (n - 2.0));
  const double cg = std::pow(n - 2.0, 0.5 * n) * std::pow(g, -0.5 * n);
  UVal v;
  v.value = cn * std::pow(g, -0.5 * (n - 2.0));
  v.d1 = -cg * y1;
  v.dn = -cg * (1.0 + yn);
  return v;
}
double Zn_at(double y1, double yn, int n) {
  const double g = y1 * y1 + sq(1.0 + yn);
  return 0.5 * std::pow(n - 2.0, 0.5 * n) * std::pow(g, -0.5 * n) * (1.0 - y1 * y1 - yn * yn);
}

// radial cutoff eta(|v|/scale) with gradient and Laplacian in R^n
struct CutVal {
  double value, d1, dn, lap;
};
CutVal cut_at(double v1, double vn, double scale, int n) {
  CutVal c;
  const double rho = std::sqrt(v1 * v1 + vn * vn);
  const double s = rho / scale;
  c.value = cutoff_eta(s);
  if (s <= 1.0 || s >= 2.0 || rho == 0.0) {
    c.d1 = c.dn = c.lap = 0.0;
    return c;
  }
  const double e1 = cutoff_eta_d1(s) / scale;
  const double e2 = cutoff_eta_d2(s) / (scale * scale);
  c.d1 = e1 * v1 / rho;
  c.dn = e1 * vn / rho;
  c.lap = e2 + e1 * (n - 1.0) / rho;
  return c;
}

// Theta_l(v, t) as a function of w = |v|^2 with derivative in w
struct ThetaVal {
  double value, dw;
};
ThetaVal theta_at(int l, double w, double tau, int n) {
  spectral::LaguerrePoly P = spectral::laguerre_mod(l, 0.5 * (n - 2.0));
  ThetaVal tv{0.0, 0.0};
  for (int i = 0; i <= l; ++i) {
    const double a = (P.coeffs[i] / P.coeffs[0]) / std::pow(4.0, i);
    tv.value += -a * std::pow(w, i) * std::pow(tau, l - i);
    if (i >= 1) tv.dw += -a * i * std::pow(w, i - 1) * std::pow(tau, l - i);
  }
  return tv;
}

}  // namespace

double AnsatzConfig::cutoff_R() const { return R > 0.0 ? R : std::abs(std::log(T)); }

void AnsatzConfig::validate() const {
  if (bubbles.empty()) return;
  if (bubbles.size() >= 2) {
    double mind = 1e300;
    for (std::size_t i = 0; i < bubbles.size(); ++i)
      for (std::size_t j = i + 1; j < bubbles.size(); ++j)
        mind = std::min(mind, std::abs(bubbles[i].anchor - bubbles[j].anchor));
    if (!(mind > 0.0)) throw std::invalid_argument("AnsatzConfig: anchors must be distinct");
    if (delta > mind / 32.0 * (1.0 + 1e-12))
      throw std::invalid_argument("AnsatzConfig: delta exceeds min separation / 32");
  }
  if (!(delta > 0.0) || !(T > 0.0)) throw std::invalid_argument("AnsatzConfig: bad delta or T");
}

ModPath bare_path(const AnsatzConfig& cfg, double A_R) {
  const AnsatzConfig local = cfg;
  return [local, A_R](std::size_t i, double t) {
    ModState s;
    s.mu = modulation::mu0(local.bubbles[i].l, local.T, A_R, local.n, t);
    s.mu_dot = modulation::mu0_dot(local.bubbles[i].l, local.T, A_R, local.n, t);
    s.xi = local.bubbles[i].anchor;
    s.xi_dot = 0.0;
    return s;
  };
}

double eval_ansatz_transverse(const AnsatzConfig& cfg, double x1, double xperp, double xn, double t,
                              const ModPath& path) {
  const int n = cfg.n;
  const double tau = cfg.T - t;
  if (!(tau > 0.0)) throw std::invalid_argument("eval_ansatz: t < T required");
  double u = 0.0;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
    const ModState m = path(i, t);
    const double a1 = x1 - cfg.bubbles[i].anchor;
    const double ax2 = a1 * a1 + xperp * xperp;  // |x~ - q~|^2
    const double d2 = ax2 + xn * xn;
    const double e2d = cutoff_eta(std::sqrt(d2) / (2.0 * cfg.delta));
    if (e2d > 0.0) {
      const double b1 = x1 - m.xi;
      const double yt = std::sqrt(b1 * b1 + xperp * xperp) / m.mu;
      const double Uv = std::pow(m.mu, -0.5 * (n - 2.0)) * U_at(yt, xn / m.mu, n).value;
      u += Uv * e2d;
    }
    const double ed = cutoff_eta(std::sqrt(d2) / cfg.delta);
    if (ed > 0.0) u += theta_at(cfg.bubbles[i].l, d2, tau, n).value * ed;
  }
  return u;
}

double eval_ansatz(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                   const std::function<double(std::size_t, double, double, double)>& phi,
                   const std::function<double(double, double, double)>& psi) {
  double u = eval_ansatz_transverse(cfg, x1, 0.0, xn, t, path);
  if (phi) {
    const double Rcut = cfg.cutoff_R();
    for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
      const ModState m = path(i, t);
      const double y1 = (x1 - m.xi) / m.mu, yn = xn / m.mu;
      const double er = cutoff_eta(std::sqrt(y1 * y1 + yn * yn) / Rcut);
      if (er > 0.0)
        u += std::pow(m.mu, -0.5 * (cfg.n - 2.0)) * phi(i, y1, yn, t) * er;
    }
  }
  if (psi) u += psi(x1, xn, t);
  return u;
}

namespace {

// E_1[U_{mu,xi}] at x, in outer variables
double E1_bubble(const AnsatzConfig& cfg, std::size_t i, double x1, double xn, double t,
                 const ModPath& path) {
  const int n = cfg.n;
  const ModState m = path(i, t);
  const double y1 = (x1 - m.xi) / m.mu, yn = xn / m.mu;
  const double mpw = std::pow(m.mu, -0.5 * n);
  return m.mu_dot * mpw * Zn_at(y1, yn, n) + mpw * m.xi_dot * U_at(y1, yn, n).d1;
}

// cutoff cross terms 2 grad f . grad eta + f Delta eta for f = U_{mu,xi} or Theta
double Ecut_U(const AnsatzConfig& cfg, std::size_t i, double x1, double xn, double t,
              const ModPath& path) {
  const int n = cfg.n;
  const ModState m = path(i, t);
  const double v1 = x1 - cfg.bubbles[i].anchor;
  const CutVal c = cut_at(v1, xn, 2.0 * cfg.delta, n);
  if (c.d1 == 0.0 && c.dn == 0.0 && c.lap == 0.0) return 0.0;  // outside the bridge
  const double y1 = (x1 - m.xi) / m.mu, yn = xn / m.mu;
  const UVal Uv = U_at(y1, yn, n);
  const double scale = std::pow(m.mu, -0.5 * (n - 2.0));
  const double gx1 = scale * Uv.d1 / m.mu;  // d/dx1 of U_{mu,xi}
  const double gxn = scale * Uv.dn / m.mu;
  return 2.0 * (gx1 * c.d1 + gxn * c.dn) + scale * Uv.value * c.lap;
}

double Ecut_Theta(const AnsatzConfig& cfg, std::size_t i, double x1, double xn, double t,
                  const ModPath& path) {
  (void)path;
  const int n = cfg.n;
  const double tau = cfg.T - t;
  const double v1 = x1 - cfg.bubbles[i].anchor;
  const CutVal c = cut_at(v1, xn, cfg.delta, n);
  if (c.d1 == 0.0 && c.dn == 0.0 && c.lap == 0.0) return 0.0;
  const double w = v1 * v1 + xn * xn;
  const ThetaVal tv = theta_at(cfg.bubbles[i].l, w, tau, n);
  const double g1 = tv.dw * 2.0 * v1, gn = tv.dw * 2.0 * xn;
  return 2.0 * (g1 * c.d1 + gn * c.dn) + tv.value * c.lap;
}

}  // namespace

double error_E1(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path) {
  double e = 0.0;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
    const double v1 = x1 - cfg.bubbles[i].anchor;
    const double eta2d = cutoff_eta(std::sqrt(v1 * v1 + xn * xn) / (2.0 * cfg.delta));
    if (eta2d > 0.0) e += E1_bubble(cfg, i, x1, xn, t, path) * eta2d;
    e += Ecut_U(cfg, i, x1, xn, t, path);
    e += Ecut_Theta(cfg, i, x1, xn, t, path);
  }
  return e;
}

double error_E1_fd(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                   double h) {
  const int n = cfg.n;
  auto f = [&](double a, double p, double b, double tt) {
    return eval_ansatz_transverse(cfg, a, p, b, tt, path);
  };
  const double ht = 1e-3 * (cfg.T - t);
  const double f0 = f(x1, 0.0, xn, t);
  const double dt = (f(x1, 0.0, xn, t + ht) - f(x1, 0.0, xn, t - ht)) / (2.0 * ht);
  const double d11 = (f(x1 + h, 0.0, xn, t) - 2.0 * f0 + f(x1 - h, 0.0, xn, t)) / (h * h);
  const double dnn = (f(x1, 0.0, xn + h, t) - 2.0 * f0 + f(x1, 0.0, xn - h, t)) / (h * h);
  // transverse directions: field even in xperp
  const double dpp = 2.0 * (f(x1, h, xn, t) - f0) / (h * h);
  return -dt + d11 + (n - 2.0) * dpp + dnn;
}

namespace {

struct BoundaryPieces {
  double u = 0.0;             // full ansatz trace (phi=0) + psi
  double du_xn = 0.0;         // d_xn of the bubble/caloric part
  std::vector<double> Upow;   // U_{mu_i,xi}(x)|_{xn=0}
  std::vector<double> eta2d, etad, etaR;
  std::vector<double> thetav;
};

BoundaryPieces boundary_pieces(const AnsatzConfig& cfg, double x1, double t, const ModPath& path,
                               const std::function<double(double, double, double)>& psi) {
  const int n = cfg.n;
  const double tau = cfg.T - t;
  const double Rcut = cfg.cutoff_R();
  BoundaryPieces bp;
  const std::size_t m = cfg.bubbles.size();
  bp.Upow.resize(m);
  bp.eta2d.resize(m);
  bp.etad.resize(m);
  bp.etaR.resize(m);
  bp.thetav.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const ModState ms = path(i, t);
    const double v1 = x1 - cfg.bubbles[i].anchor;
    const double av = std::abs(v1);
    bp.eta2d[i] = cutoff_eta(av / (2.0 * cfg.delta));
    bp.etad[i] = cutoff_eta(av / cfg.delta);
    const double y1 = (x1 - ms.xi) / ms.mu;
    bp.etaR[i] = cutoff_eta(std::abs(y1) / Rcut);
    const UVal Uv = U_at(y1, 0.0, n);
    bp.Upow[i] = std::pow(ms.mu, -0.5 * (n - 2.0)) * Uv.value;
    bp.thetav[i] = theta_at(cfg.bubbles[i].l, v1 * v1, tau, n).value;
    bp.u += bp.Upow[i] * bp.eta2d[i] + bp.thetav[i] * bp.etad[i];
    // d_xn of U_{mu,xi} eta_{2delta} at xn=0: eta radial => its normal
    // derivative vanishes; Theta contributes 2 xn dw = 0
    bp.du_xn += std::pow(ms.mu, -0.5 * n) * Uv.dn * bp.eta2d[i];
  }
  if (psi) bp.u += psi(x1, 0.0, t);
  return bp;
}

double pw(double v, double e) { return std::pow(std::abs(v), e - 1.0) * v; }  // |v|^{e-1} v

}  // namespace

double error_E2_direct(const AnsatzConfig& cfg, double x1, double t, const ModPath& path,
                       const std::function<double(double, double, double)>& psi, double psi_xn_deriv) {
  const int n = cfg.n;
  const double p = n / (n - 2.0);
  BoundaryPieces bp = boundary_pieces(cfg, x1, t, path, psi);
  return bp.du_xn + psi_xn_deriv + pw(bp.u, p);
}

double error_E2_expanded(const AnsatzConfig& cfg, double x1, double t, const ModPath& path,
                         const std::function<double(double, double, double)>& psi, double psi_xn_deriv) {
  const int n = cfg.n;
  const double p = n / (n - 2.0);
  BoundaryPieces bp = boundary_pieces(cfg, x1, t, path, psi);
  const double psiv = psi ? psi(x1, 0.0, t) : 0.0;
  double e = psi_xn_deriv;
  double lin = 0.0, sub = 0.0;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
    e += std::pow(bp.Upow[i], p) * (std::pow(bp.eta2d[i], p) - bp.eta2d[i]);
    lin += p * std::pow(bp.Upow[i], p - 1.0) * std::pow(bp.eta2d[i], p - 1.0) *
           (bp.thetav[i] * bp.etad[i] + psiv);
    sub += std::pow(bp.Upow[i], p) * std::pow(bp.eta2d[i], p) +
           p * std::pow(bp.Upow[i], p - 1.0) * std::pow(bp.eta2d[i], p - 1.0) *
               (bp.thetav[i] * bp.etad[i] + psiv);
  }
  const double N = pw(bp.u, p) - sub;
  return e + lin + N;
}

InnerSources inner_sources(const AnsatzConfig& cfg, std::size_t i, double y1, double yn, double t,
                           const ModPath& path,
                           const std::function<double(double, double, double)>& psi) {
  const int n = cfg.n;
  const ModState m = path(i, t);
  const double Rcut = cfg.cutoff_R();
  InnerSources out;
  const double ay = std::sqrt(y1 * y1 + yn * yn);
  const double eta4 = cutoff_eta(ay / (4.0 * Rcut));
  if (eta4 > 0.0)
    out.H1 = eta4 * (m.mu_dot * m.mu * Zn_at(y1, yn, n) + m.mu * m.xi_dot * U_at(y1, yn, n).d1);
  if (yn == 0.0) {
    const double eta4b = cutoff_eta(std::abs(y1) / (4.0 * Rcut));
    if (eta4b > 0.0) {
      const double p = n / (n - 2.0);
      const double Upm = p * std::pow(U_at(y1, 0.0, n).value, p - 1.0);
      const double arg = m.mu * y1 + m.xi - cfg.bubbles[i].anchor;  // signed axis position
      const double th = theta_at(cfg.bubbles[i].l, arg * arg, cfg.T - t, n).value;
      const double ps = psi ? psi(m.mu * y1 + m.xi, 0.0, t) : 0.0;
      out.H2 = Upm * std::pow(m.mu, 0.5 * n - 1.0) * eta4b * (th + ps);
    }
  }
  return out;
}

double outer_G1i(const AnsatzConfig& cfg, std::size_t i, double x1, double xn, double t,
                 const ModPath& path) {
  const ModState m = path(i, t);
  const double v1 = x1 - cfg.bubbles[i].anchor;
  const double eta2d = cutoff_eta(std::sqrt(v1 * v1 + xn * xn) / (2.0 * cfg.delta));
  const double y1 = (x1 - m.xi) / m.mu, yn = xn / m.mu;
  const double etaR = cutoff_eta(std::sqrt(y1 * y1 + yn * yn) / cfg.cutoff_R());
  double e = E1_bubble(cfg, i, x1, xn, t, path) * (eta2d - etaR);
  e += Ecut_U(cfg, i, x1, xn, t, path);
  e += Ecut_Theta(cfg, i, x1, xn, t, path);
  return e;
}

OuterSources outer_sources(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                           const std::function<double(double, double, double)>& psi) {
  OuterSources out;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) out.G1 += outer_G1i(cfg, i, x1, xn, t, path);
  if (xn == 0.0) {
    for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) out.G2 += outer_G2i(cfg, i, x1, t, path, psi);
    out.G2 += outer_G2_rest(cfg, x1, t, psi);
  }
  return out;
}

double outer_G2i(const AnsatzConfig& cfg, std::size_t i, double x1, double t, const ModPath& path,
                 const std::function<double(double, double, double)>& psi) {
  const int n = cfg.n;
  const double p = n / (n - 2.0);
  BoundaryPieces bp = boundary_pieces(cfg, x1, t, path, psi);
  const double psiv = psi ? psi(x1, 0.0, t) : 0.0;
  const double v1 = x1 - cfg.bubbles[i].anchor;
  const double eta4d = cutoff_eta(std::abs(v1) / (4.0 * cfg.delta));

  double sub = 0.0;
  for (std::size_t k = 0; k < cfg.bubbles.size(); ++k)
    sub += std::pow(bp.Upow[k], p) * std::pow(bp.eta2d[k], p) +
           p * std::pow(bp.Upow[k], p - 1.0) * std::pow(bp.eta2d[k], p - 1.0) *
               (bp.thetav[k] * bp.etad[k] + psiv);
  const double N = pw(bp.u, p) - sub;

  double g = eta4d * N;
  g += std::pow(bp.Upow[i], p) * (std::pow(bp.eta2d[i], p) - bp.eta2d[i]);
  g += p * std::pow(bp.Upow[i], p - 1.0) *
       ((bp.etad[i] - bp.etaR[i]) * bp.thetav[i] + (std::pow(bp.eta2d[i], p - 1.0) - bp.etaR[i]) * psiv);
  return g;
}

double outer_G2_rest(const AnsatzConfig& cfg, double x1, double t,
                     const std::function<double(double, double, double)>& psi) {
  const double p = cfg.n / (cfg.n - 2.0);
  double etasum = 0.0;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i)
    etasum += cutoff_eta(std::abs(x1 - cfg.bubbles[i].anchor) / (4.0 * cfg.delta));
  const double psiv = psi ? psi(x1, 0.0, t) : 0.0;
  return (1.0 - etasum) * pw(psiv, p);
}

ShapeRatios residual_shape_check(const AnsatzConfig& cfg, std::size_t i, double t_lo, double t_hi,
                                 std::size_t samples_per_decade, const ModPath& path) {
  if (cfg.bubbles.size() != 1)
    throw std::invalid_argument("residual_shape_check: single-bubble configuration expected");
  const int l = cfg.bubbles[i].l;
  const double T = cfg.T, delta = cfg.delta, R = cfg.cutoff_R();
  const double delta0 = std::pow(R, -0.2);
  ShapeRatios out;
  const double dec = std::log10((T - t_lo) / (T - t_hi));
  const std::size_t nt = std::max<std::size_t>(4, static_cast<std::size_t>(dec * samples_per_decade));
  for (std::size_t k = 0; k <= nt; ++k) {
    const double sigma = (T - t_lo) * std::pow((T - t_hi) / (T - t_lo), static_cast<double>(k) / nt);
    const double t = T - sigma;
    const ModState m = path(i, t);
    const double s = -std::log(sigma);
    const double els = std::pow(sigma, l);
    // spatial sweep in |z| from the core to the outer support
    const double zmax = 4.0 * delta * std::exp(0.5 * s);
    for (int q = 0; q <= 96; ++q) {
      const double zr = 1e-3 * std::pow(zmax / 1e-3, q / 96.0);
      // sample on the boundary ray and one interior slant
      for (int slant = 0; slant < 2; ++slant) {
        const double x1 = cfg.bubbles[i].anchor + zr * std::sqrt(sigma) * (slant == 0 ? 1.0 : 0.8);
        const double xn = slant == 0 ? 0.0 : 0.6 * zr * std::sqrt(sigma);
        const double znorm = std::sqrt(sq(x1 - cfg.bubbles[i].anchor) + xn * xn) / std::sqrt(sigma);
        const double y1 = (x1 - m.xi) / m.mu, yn = xn / m.mu;
        const double ynorm = std::sqrt(y1 * y1 + yn * yn);
        const double jb = std::sqrt(1.0 + ynorm * ynorm);
        // G1 bound
        double b1 = 0.0;
        if (znorm <= 1.0) {
          double inner = 0.0;
          if (ynorm <= 2.0 * R) inner += std::pow(jb, -2.25);
          if (ynorm > R) inner += std::pow(jb, -2.75);
          b1 += std::pow(R, -0.25) * std::pow(m.mu, -2.0) * els * inner;
        }
        if (znorm > 1.0 && znorm <= 4.0 * delta * std::exp(0.5 * s)) {
          b1 += std::pow(sigma, 3.0 * l + 0.5) * std::pow(znorm, -3.0);
          if (znorm >= delta * std::exp(0.5 * s) && znorm <= 2.0 * delta * std::exp(0.5 * s)) b1 += 1.0;
        }
        const double g1 = std::abs(outer_G1i(cfg, i, x1, xn, t, path));
        if (b1 > 0.0) out.sup_G1 = std::max(out.sup_G1, g1 / b1);
        // G2 bound (boundary only)
        if (slant == 0) {
          const double zt = znorm;
          double b2 = 0.0;
          const double e53 = std::pow(sigma, 5.0 * l / 3.0);
          if (zt <= 1.0)
            b2 += std::pow(R, -0.25) / m.mu * els * std::pow(std::sqrt(1.0 + y1 * y1), -1.75) + e53;
          const double zknee = std::exp(l * s / (2.0 * l + 2.0));
          if (zt > 1.0 && zt <= zknee) b2 += e53 * std::pow(zt, 10.0 * l / 3.0 + 10.0 / 3.0);
          if (zt > zknee && zt <= 8.0 * delta * std::exp(0.5 * s))
            b2 += e53 * std::pow(zt, 10.0 * l / 3.0) + std::pow(delta0, 5.0 / 3.0);
          const double g2 = std::abs(outer_G2i(cfg, i, x1, t, path, nullptr));
          if (b2 > 0.0) out.sup_G2 = std::max(out.sup_G2, g2 / b2);
        }
      }
    }
  }
  return out;
}

double norm_in(const std::vector<NormSample>& samples, int l, double R, double T) {
  double sup = 0.0;
  for (const auto& s : samples) {
    const double y = std::sqrt(s.x1 * s.x1 + s.xn * s.xn);
    const double jb = std::sqrt(1.0 + y * y);
    const double w = R * R * std::pow(T - s.t, 4.0 * l + 3.0) * std::pow(jb, -2.5);
    sup = std::max(sup, (std::abs(s.value) + jb * std::abs(s.grad)) / w);
  }
  return sup;
}

double norm_X(const std::vector<NormSample>& samples, const AnsatzConfig& cfg) {
  double sup = 0.0;
  for (const auto& smp : samples) {
    const double tau = cfg.T - smp.t;
    const double s = -std::log(tau);
    const double ax = std::sqrt(smp.x1 * smp.x1 + smp.xn * smp.xn);
    double w = 0.0;
    bool inside_any = false;
    for (const auto& b : cfg.bubbles) {
      const double zi = std::sqrt(sq(smp.x1 - b.anchor) + smp.xn * smp.xn) / std::sqrt(tau);
      const double knee = std::exp(b.l * s / (2.0 * b.l + 2.0));
      if (zi <= knee) {
        inside_any = true;
        w += std::pow(tau, b.l) * std::pow(1.0 + zi * zi, b.l + 1.0);
      }
    }
    if (!inside_any) w += 1.0 / (1.0 + ax * ax);
    sup = std::max(sup, std::abs(smp.value) / w);
  }
  return sup;
}

}  // namespace bbl::ansatz
