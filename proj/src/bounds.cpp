#include "bbl/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "bbl/kernels.hpp"
#include "bbl/par.hpp"
#include "bbl/quad.hpp"

namespace bbl::bounds {

namespace {
constexpr double kPi = 3.14159265358979323846;

double jb(double u) { return std::sqrt(1.0 + u * u); }  // <u>

struct Setup {
  Family id;
  int n;
  double a, b, p1, p2, c1, c2, ell, kappa, C0, t0, eps;
  double l1(double s) const { return c1 * std::pow(s, p1); }
  double l2(double s) const { return c2 * std::pow(s, p2); }
  double vsrc(double s) const { return std::pow(s, a); }
  double Cstar(double t) const {
    // sup of l2(s)/sqrt(s) over [t0, t]; monotone for power laws
    return std::max(l2(t0) / std::sqrt(t0), l2(t) / std::sqrt(t));
  }
};

Setup make_setup(const BoundFamily& fam, int n, double t0_scale) {
  Setup s{};
  s.id = fam.id;
  s.n = n;
  s.a = fam.get("a", 0.0);
  s.b = fam.get("b", 0.0);
  s.p2 = fam.get("p2", 0.5);
  s.p1 = fam.get("p1", s.p2);
  s.c1 = fam.get("c1", 0.0);
  s.c2 = fam.get("c2", 1.0);
  s.ell = fam.get("ell", 0.25);
  s.kappa = fam.get("kappa", std::min(0.2, std::min(s.ell, 0.24)));
  s.C0 = fam.get("C0", 0.25);
  s.t0 = fam.get("t0", 1.0) * t0_scale;
  s.eps = fam.get("eps", 0.5);
  // hypothesis checks of the corresponding lemmas
  switch (fam.id) {
    case Family::BeyondNeumann:
      if (!(s.t0 >= 0.0)) throw std::invalid_argument("beyond_neumann: t0 >= 0");
      break;
    case Family::NeumannSelfsim: {
      if (!(s.b < n - 1.0)) throw std::invalid_argument("neumann_selfsim: b < n-1 required");
      if (!(s.t0 >= 1.0)) throw std::invalid_argument("neumann_selfsim: t0 >= 1 required");
      const double crit = s.a + s.p2 * (n - 1.0 - s.b);
      if (std::abs(crit + 1.0) > 1e-12) {
        if (!(s.p2 <= 0.5 && s.a + s.p2 * (1.0 - s.b) + 0.5 * n >= 0.0))
          throw std::invalid_argument("neumann_selfsim: exponent hypothesis violated");
      } else if (!(s.p2 < 0.5)) {
        throw std::invalid_argument("neumann_selfsim: p2 < 1/2 required in the critical case");
      }
      break;
    }
    case Family::NeumannOutside:
      if (!(s.ell > 0.0 && s.kappa > 0.0 && s.kappa < 0.25 && s.kappa <= s.ell))
        throw std::invalid_argument("neumann_outside: need 0 < kappa <= ell, kappa < 1/4");
      if (!(0.5 + s.a - 0.5 * s.b + 2.0 * s.kappa * n >= 0.0))
        throw std::invalid_argument("neumann_outside: exponent hypothesis violated");
      if (!(s.t0 >= 1.0)) throw std::invalid_argument("neumann_outside: t0 >= 1 required");
      break;
    case Family::RhsSelfsim: {
      if (!(s.b < n)) throw std::invalid_argument("rhs_selfsim: b < n required");
      if (!(s.t0 >= 1.0)) throw std::invalid_argument("rhs_selfsim: t0 >= 1 required");
      const double crit = s.a + s.p2 * (n - s.b);
      if (std::abs(crit + 1.0) > 1e-12) {
        if (!(s.p2 <= 0.5 && s.a + s.p2 * (2.0 - s.b) + 0.5 * n >= 0.0))
          throw std::invalid_argument("rhs_selfsim: exponent hypothesis violated");
      } else if (!(s.p2 < 0.5)) {
        throw std::invalid_argument("rhs_selfsim: p2 < 1/2 required in the critical case");
      }
      break;
    }
  }
  return s;
}

// radial source integral against the reduced tangential kernel:
//   int_{lo}^{hi} e^{-beta (q-rho)^2} ANG(2 beta q rho) rho^{d-1} rho^{-b} W(rho) drho
// where ANG is the scaled angular factor for S^{d-1}.
double radial_source(double q, double beta, double lo, double hi, double b, int d,
                     const std::function<double(double)>& extra_weight) {
  if (!(hi > lo)) return 0.0;
  const double width = 8.0 / std::sqrt(beta);
  std::vector<double> brk;
  brk.push_back(lo);
  // log-spaced splits (the rho^{-b} factor) plus kernel-window splits
  for (double v = std::max(lo * 2.0, 1e-8); v < hi; v *= 2.0) brk.push_back(v);
  for (int k = -8; k <= 8; ++k) {
    const double v = q + 0.25 * k * width;
    if (v > lo && v < hi) brk.push_back(v);
  }
  brk.push_back(hi);
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double mid = 0.5 * (brk[i] + brk[i + 1]);
    const double dmin = std::max(0.0, std::abs(q - mid) - 0.5 * (brk[i + 1] - brk[i]));
    if (beta * dmin * dmin > 740.0) continue;  // kernel underflow on this panel
    total += quad::panel(
        [&](double rho) {
          const double dd = q - rho;
          const double ang = (d == 4) ? kernels::angular_S3(2.0 * beta * q * rho)
                                      : kernels::angular_S4(2.0 * beta * q * rho);
          double val = std::exp(-beta * dd * dd) * ang * std::pow(rho, d - 1.0) *
                       std::pow(rho, -b);
          if (extra_weight) val *= extra_weight(rho);
          return val;
        },
        brk[i], brk[i + 1], 16);
  }
  return total;
}

// LHS of the four lemmas at (x, t)
double lhs_value(const Setup& S, double r, double xn, double t) {
  const int n = S.n;
  auto time_int = [&](const std::function<double(double)>& f) {
    // s = t - u^2, u in (0, sqrt(t-t0)], geometric panels toward u = 0
    const double umax = std::sqrt(t - S.t0);
    auto brk = quad::geometric_breaks(0.0, umax / 256.0, umax, 2.0);
    return quad::panels([&](double u) { return 2.0 * u * f(t - u * u); }, brk, 16);
  };
  switch (S.id) {
    case Family::BeyondNeumann: {
      return time_int([&](double s) {
        const double tau = t - s;
        const double beta = S.C0 / tau;
        const double pref = std::pow(tau, -0.5 * n) * std::exp(-S.C0 * xn * xn / tau);
        if (pref == 0.0) return 0.0;
        return pref * S.vsrc(s) * radial_source(r, beta, S.l1(s), S.l2(s), S.b, n - 1, nullptr);
      });
    }
    case Family::NeumannSelfsim: {
      return time_int([&](double s) {
        const double tau = t - s;
        const double beta = 1.0 / (4.0 * tau);
        const double pref = 2.0 * std::pow(4.0 * kPi * tau, -0.5 * n) * std::exp(-xn * xn / (4.0 * tau));
        if (pref == 0.0) return 0.0;
        return pref * std::pow(s, S.a) * radial_source(r, beta, S.l1(s), S.l2(s), S.b, n - 1, nullptr);
      });
    }
    case Family::NeumannOutside: {
      return time_int([&](double s) {
        const double tau = t - s;
        const double beta = 1.0 / (4.0 * tau);
        const double pref = 2.0 * std::pow(4.0 * kPi * tau, -0.5 * n) * std::exp(-xn * xn / (4.0 * tau));
        if (pref == 0.0) return 0.0;
        const double hi = std::sqrt(s) * 60.0;  // e^{-ell rho^2/s} kills the far tail
        return pref * std::pow(s, S.a) *
               radial_source(r, beta, std::sqrt(s), hi, S.b, n - 1,
                             [&](double rho) { return std::exp(-S.ell * rho * rho / s); });
      });
    }
    case Family::RhsSelfsim: {
      const double q = std::sqrt(r * r + xn * xn);
      return time_int([&](double s) {
        const double tau = t - s;
        const double beta = 1.0 / (4.0 * tau);
        const double pref = std::pow(4.0 * kPi * tau, -0.5 * n);
        return pref * std::pow(s, S.a) * radial_source(q, beta, S.l1(s), S.l2(s), S.b, n, nullptr);
      });
    }
  }
  return 0.0;
}

// RHS bound expressions (constants dropped; ratios absorb them)
double rhs_value(const Setup& S, double r, double xn, double t) {
  const int n = S.n;
  const double q = std::sqrt(r * r + xn * xn);
  const double L1 = S.l1(t), L2 = S.l2(t);
  auto bracket_ln = [&](double u) { return jb(std::log(u)); };
  switch (S.id) {
    case Family::NeumannSelfsim: {
      const double ta = std::pow(t, S.a);
      if (q <= L1) {
        if (S.b < 1.0) return ta * std::pow(L2, 1.0 - S.b);
        if (S.b == 1.0) return ta * (L1 > 0 ? bracket_ln(L2 / L1) : 1.0);
        return ta * std::pow(L1, 1.0 - S.b);
      }
      if (q <= L2) {
        if (S.b < 1.0) return ta * std::pow(L2, 1.0 - S.b);
        if (S.b == 1.0) return ta * bracket_ln(L2 / q);
        return ta * std::pow(q, 1.0 - S.b);
      }
      return ta * std::pow(L2, 1.0 - S.b) *
             std::exp(-(r * r + (xn + 1.0) * (xn + 1.0)) / (4.0 * t));
    }
    case Family::NeumannOutside:
      return std::pow(t, S.a - 0.5 * S.b + 0.5) * std::exp(-S.kappa * q * q / t);
    case Family::RhsSelfsim: {
      const double ta = std::pow(t, S.a);
      if (q <= L1) {
        if (S.b < 2.0) return ta * std::pow(L2, 2.0 - S.b);
        if (S.b == 2.0) return ta * (L1 > 0 ? bracket_ln(L2 / L1) : 1.0);
        return ta * std::pow(L1, 2.0 - S.b);
      }
      if (q <= L2) {
        if (S.b < 2.0) return ta * std::pow(L2, 2.0 - S.b);
        if (S.b == 2.0) return ta * bracket_ln(L2 / q);
        return ta * std::pow(q, 2.0 - S.b);
      }
      return ta * std::pow(L2, 2.0 - S.b) * std::exp(-q * q / (4.0 * t));
    }
    case Family::BeyondNeumann: {
      const double tstar = std::max(S.t0, 0.5 * t);
      // w1
      double q1int = 0.0;
      if (tstar > S.t0) {
        auto f = [&](double s) {
          if (S.b < n - 1.0) return S.vsrc(s) * std::pow(S.l2(s), n - 1.0 - S.b);
          if (S.b == n - 1.0)
            return S.vsrc(s) * (S.l1(s) > 0 ? std::log(S.l2(s) / S.l1(s)) : 0.0);
          return S.vsrc(s) * std::pow(S.l1(s), n - 1.0 - S.b);
        };
        q1int = quad::panels(f, quad::geometric_breaks(S.t0, S.t0 * 1.5, tstar, 1.5), 16);
      }
      const double Cs = S.Cstar(t);
      const double M = Cs * (1.0 + std::sqrt(1.0 - S.eps)) / S.eps;
      double w1 = std::pow(t, -0.5 * n) * std::exp(-S.C0 * xn * xn / (t - S.t0)) * q1int;
      if (r > M * std::sqrt(t)) w1 *= std::exp(-S.C0 * (1.0 - S.eps) * r * r / (t - S.t0));
      // w2
      double w2;
      if (q <= L1) {
        if (S.b < 1.0) w2 = std::pow(L2, 1.0 - S.b);
        else if (S.b == 1.0) w2 = L1 > 0 ? bracket_ln(L2 / L1) : 1.0;
        else w2 = std::pow(L1, 1.0 - S.b);
      } else if (q <= L2) {
        if (S.b < 1.0) w2 = std::pow(L2, 1.0 - S.b);
        else if (S.b == 1.0) w2 = bracket_ln(L2 / q);
        else if (S.b < n - 1.0) w2 = std::pow(q, 1.0 - S.b);
        else if (S.b == n - 1.0) w2 = std::pow(q, 2.0 - n) * bracket_ln(q / L1);
        else w2 = std::pow(q, 2.0 - n) * std::pow(L1, n - 1.0 - S.b);
      } else {
        double head;
        if (S.b < n - 1.0) head = std::pow(L2, n - 1.0 - S.b);
        else if (S.b == n - 1.0) head = L1 > 0 ? bracket_ln(L2 / L1) : 1.0;
        else head = std::pow(L1, n - 1.0 - S.b);
        if (q <= Cs * std::sqrt(t)) {
          w2 = head * std::pow(q, 2.0 - n);
        } else {
          w2 = head * std::pow(q, -2.0) * std::pow(t, 2.0 - 0.5 * n) *
               std::exp(-2.0 * S.C0 * (xn * xn + (64.0 / 81.0) * r * r) / t);
        }
      }
      const double vsup = std::max(S.vsrc(tstar), S.vsrc(t));
      return w1 + vsup * w2;
    }
  }
  return 0.0;
}

}  // namespace

Family family_from_string(const std::string& s) {
  if (s == "beyond_neumann") return Family::BeyondNeumann;
  if (s == "neumann_selfsim") return Family::NeumannSelfsim;
  if (s == "neumann_outside") return Family::NeumannOutside;
  if (s == "rhs_selfsim") return Family::RhsSelfsim;
  throw std::invalid_argument("unknown bound family: " + s);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::BeyondNeumann: return "beyond_neumann";
    case Family::NeumannSelfsim: return "neumann_selfsim";
    case Family::NeumannOutside: return "neumann_outside";
    case Family::RhsSelfsim: return "rhs_selfsim";
  }
  return "?";
}

BoundReport bound_ratio(const BoundFamily& fam, int n, std::size_t sample_count, std::uint64_t seed,
                        double range_scale, double t0_scale) {
  const Setup S = make_setup(fam, n, t0_scale);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  BoundReport rep;
  rep.rows.resize(sample_count);
  // draw all samples first so the sequence is seed-deterministic
  std::vector<std::array<double, 3>> draws(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double tmax = S.t0 * (2.0 + 46.0 * range_scale);
    const double t = S.t0 * 2.0 * std::pow(tmax / (2.0 * S.t0), uni(rng));
    // |x| log-uniform across the interesting regions, direction uniform
    const double qlo = std::max(1e-3, 0.02 * std::max(S.l1(t), 1e-3));
    const double qhi = (2.0 + 2.0 * range_scale) * std::max({S.l2(t), std::sqrt(t), 1.0});
    const double q = qlo * std::pow(qhi / qlo, uni(rng));
    const double phi = 0.5 * kPi * uni(rng);
    draws[i] = {q * std::cos(phi), q * std::sin(phi), t};
  }
  par::for_each(sample_count, [&](std::size_t i) {
    const double r = draws[i][0], xn = draws[i][1], t = draws[i][2];
    SampleRow row;
    row.index = i;
    row.x_r = r;
    row.x_n = xn;
    row.t = t;
    row.lhs = lhs_value(S, r, xn, t);
    row.rhs = rhs_value(S, r, xn, t);
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    rep.rows[i] = row;
  });
  for (const auto& row : rep.rows) rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
  return rep;
}

}  // namespace bbl::bounds
