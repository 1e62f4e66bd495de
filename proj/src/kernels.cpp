#include "bbl/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "bbl/quad.hpp"

namespace bbl::kernels {

namespace {
constexpr double kPi = 3.14159265358979323846;

double tangential_dist(const CylPoint& a, const CylPoint& b, double plane_offset) {
  return plane_offset >= 0.0 ? plane_offset : std::abs(a.r - b.r);
}
}  // namespace

double G_n(const HeatKernelQuery& q, int n) {
  if (!(q.t > q.s)) throw std::invalid_argument("G_n: t > s required");
  const double tau = q.t - q.s;
  const double dt2 = tangential_dist(q.x, q.z, q.plane_offset);
  const double dperp2 = dt2 * dt2;
  const double dm = q.x.xn - q.z.xn, dp = q.x.xn + q.z.xn;
  return std::pow(4.0 * kPi * tau, -0.5 * n) *
         (std::exp(-(dperp2 + dm * dm) / (4.0 * tau)) + std::exp(-(dperp2 + dp * dp) / (4.0 * tau)));
}

double H_n(const CylPoint& z, double s, const CylPoint& w, double sigma, int n, double plane_offset) {
  if (!(s > sigma)) throw std::invalid_argument("H_n: s > sigma required");
  const double q = std::exp(0.5 * (sigma - s));  // e^{(sigma-s)/2} < 1
  const double denom = 4.0 * (1.0 - q * q);
  // plane_offset, when given, is |e^{(sigma-s)/2} z~ - w~| directly
  const double dtan = plane_offset >= 0.0 ? plane_offset : std::abs(q * z.r - w.r);
  const double dm = q * z.xn - w.xn, dp = q * z.xn + w.xn;
  return std::pow(4.0 * kPi * (1.0 - q * q), -0.5 * n) *
         (std::exp(-(dtan * dtan + dm * dm) / denom) + std::exp(-(dtan * dtan + dp * dp) / denom));
}

double H_n_via_Gn(const CylPoint& z, double s, const CylPoint& w, double sigma, int n, double t3,
                  double plane_offset) {
  HeatKernelQuery q;
  const double es = std::exp(-0.5 * s), esig = std::exp(-0.5 * sigma);
  q.x = CylPoint(es * z.r, es * z.xn, n);
  q.t = t3 - es * es;
  q.z = CylPoint(esig * w.r, esig * w.xn, n);
  q.s = t3 - esig * esig;
  // |e^{-s/2} z~ - e^{-sigma/2} w~| = e^{-sigma/2} |e^{(sigma-s)/2} z~ - w~|
  q.plane_offset = plane_offset >= 0.0 ? esig * plane_offset : -1.0;
  return std::exp(-0.5 * n * sigma) * G_n(q, n);
}

double angular_S3(double a) {
  if (a < 0.0) throw std::invalid_argument("angular_S3: a >= 0");
  const double S2 = 4.0 * kPi;
  if (a < 600.0) {
    // e^{-a} sum_{k even} c_k a^k / k!, c_0 = pi/2, c_{k+2} = c_k (k+1)/(k+4)
    double term = 0.5 * kPi * std::exp(-a);
    double sum = term;
    for (int k = 0; k < 4000; k += 2) {
      term *= a * a / ((k + 2.0) * (k + 4.0));
      sum += term;
      if (term < 1e-18 * sum && k > a) break;
    }
    return S2 * sum;
  }
  // asymptotic: int_0^pi e^{a cos} sin^2 = pi I_1(a)/a, I_1(a) e^{-a} ~ (2 pi a)^{-1/2}(1 - ...)
  const double inv = 1.0 / a;
  const double series =
      1.0 - 0.375 * inv - 0.1171875 * inv * inv - 0.1025390625 * inv * inv * inv -
      0.144195556640625 * inv * inv * inv * inv;
  return S2 * kPi * series / (a * std::sqrt(2.0 * kPi * a));
}

double angular_S4(double a) {
  if (a < 0.0) throw std::invalid_argument("angular_S4: a >= 0");
  const double S3 = 2.0 * kPi * kPi;
  if (a < 0.5) {
    // e^{-a} sum_{k even} a^k/k! * 4/((k+1)(k+3)); term_{k+2} = term_k a^2/((k+2)(k+5))
    double term = 4.0 / 3.0;
    double sum = term;
    for (int k = 0; k <= 40; k += 2) {
      term *= a * a / ((k + 2.0) * (k + 5.0));
      sum += term;
      if (term < 1e-19 * sum) break;
    }
    return S3 * sum * std::exp(-a);
  }
  // (4/a^2) e^{-a} (cosh a - sinh a / a) = (4/a^2) [ (1+e^{-2a})/2 - (1-e^{-2a})/(2a) ]
  const double e2 = std::exp(-2.0 * a);
  return S3 * (4.0 / (a * a)) * (0.5 * (1.0 + e2) - (1.0 - e2) / (2.0 * a));
}

double apply_halfspace(double r, double xn, double tau, const std::function<double(double, double)>& F,
                       double span, int order) {
  const double w = 12.0 * std::sqrt(tau);
  const double pref = std::pow(4.0 * kPi * tau, -2.5);
  // tangential rho-panels near r, normal zeta-panels near xn and near 0
  auto tan_w = [&](double rho) {
    const double d = r - rho;
    return std::exp(-d * d / (4.0 * tau)) * angular_S3(r * rho / (2.0 * tau)) * rho * rho * rho;
  };
  auto norm_w = [&](double zeta) {
    const double dm = xn - zeta, dp = xn + zeta;
    return std::exp(-dm * dm / (4.0 * tau)) + std::exp(-dp * dp / (4.0 * tau));
  };
  const double rho_lo = std::max(0.0, r - w), rho_hi = std::min(span, r + w);
  const double z_lo = std::max(0.0, xn - w), z_hi = std::min(span, xn + w);
  if (!(rho_hi > rho_lo) || !(z_hi > z_lo)) return 0.0;
  const int np = 6;
  double total = 0.0;
  for (int ip = 0; ip < np; ++ip) {
    const double a1 = rho_lo + (rho_hi - rho_lo) * ip / np, b1 = rho_lo + (rho_hi - rho_lo) * (ip + 1) / np;
    auto rrule = quad::mapped_gl(order, a1, b1);
    for (int jq = 0; jq < np; ++jq) {
      const double a2 = z_lo + (z_hi - z_lo) * jq / np, b2 = z_lo + (z_hi - z_lo) * (jq + 1) / np;
      auto zrule = quad::mapped_gl(order, a2, b2);
      for (std::size_t i = 0; i < rrule.x.size(); ++i) {
        const double tw = tan_w(rrule.x[i]);
        if (tw == 0.0) continue;
        for (std::size_t j = 0; j < zrule.x.size(); ++j)
          total += rrule.w[i] * zrule.w[j] * tw * norm_w(zrule.x[j]) * F(rrule.x[i], zrule.x[j]);
      }
    }
  }
  return pref * total;
}

double apply_boundary(double r, double xn, double tau, const std::function<double(double)>& H,
                      double span, int order) {
  const double w = 12.0 * std::sqrt(tau);
  const double pref = std::pow(4.0 * kPi * tau, -2.5) * 2.0 * std::exp(-xn * xn / (4.0 * tau));
  if (pref == 0.0) return 0.0;
  auto tan_w = [&](double rho) {
    const double d = r - rho;
    return std::exp(-d * d / (4.0 * tau)) * angular_S3(r * rho / (2.0 * tau)) * rho * rho * rho;
  };
  const double rho_lo = std::max(0.0, r - w), rho_hi = std::min(span, r + w);
  if (!(rho_hi > rho_lo)) return 0.0;
  const int np = 8;
  double total = 0.0;
  for (int ip = 0; ip < np; ++ip) {
    const double a1 = rho_lo + (rho_hi - rho_lo) * ip / np, b1 = rho_lo + (rho_hi - rho_lo) * (ip + 1) / np;
    auto rrule = quad::mapped_gl(order, a1, b1);
    for (std::size_t i = 0; i < rrule.x.size(); ++i)
      total += rrule.w[i] * tan_w(rrule.x[i]) * H(rrule.x[i]);
  }
  return pref * total;
}

double kernel_mass(double r, double xn, double tau, double span_sigmas) {
  const double span = std::max(r, xn) + span_sigmas * std::sqrt(tau);
  return apply_halfspace(r, xn, tau, [](double, double) { return 1.0; }, span, 32);
}

double duhamel(const std::function<double(double, double, double)>& interior_source,
               const std::function<double(double, double)>& boundary_source,
               const std::function<double(double, double)>& initial, const CylPoint& x, double t,
               double span, const Tolerances& tol) {
  if (!(t > 0.0)) throw std::invalid_argument("duhamel: t > 0 required");
  double total = 0.0;
  // initial data term
  if (initial) total += apply_halfspace(x.r, x.xn, t, initial, span);
  // source terms with s = t - u^2
  auto time_integrand = [&](double u) {
    const double tau = u * u;
    if (tau <= 0.0) {
      // boundary term limit: 2 u * (4 pi u^2)^{-1/2} * ... -> finite; handled by u>0 nodes
      return 0.0;
    }
    const double s = t - tau;
    double v = 0.0;
    if (interior_source)
      v += apply_halfspace(x.r, x.xn, tau, [&](double rr, double zz) { return interior_source(rr, zz, s); },
                           span);
    if (boundary_source)
      v += apply_boundary(x.r, x.xn, tau, [&](double rr) { return boundary_source(rr, s); }, span);
    return 2.0 * u * v;
  };
  if (interior_source || boundary_source)
    total += quad::adaptive(time_integrand, 0.0, std::sqrt(t), tol.quad_abs, tol.quad_rel, 14);
  return total;
}

BarrierMargins barrier_check(double a, double theta, const std::vector<CylPoint>& samples) {
  BarrierMargins m;
  m.interior_min = 1e300;
  m.boundary_min = 1e300;
  for (const CylPoint& y : samples) {
    const int n = y.dim;
    const double rt = y.r, yn = y.xn;
    const double g = (1.0 + theta * theta) * rt * rt + (yn + 1.0) * (yn + 1.0) +
                     2.0 * theta * (yn + 1.0) * rt;
    const double gm1 = std::pow(g, -0.5 * a - 1.0), gm2 = std::pow(g, -0.5 * a - 2.0);
    const double brk = ((1.0 + theta * theta) * (1.0 + theta * theta) + theta * theta) * rt * rt +
                       2.0 * theta * (theta * theta + 2.0) * (yn + 1.0) * rt +
                       (theta * theta + 1.0) * (yn + 1.0) * (yn + 1.0);
    const double lap =
        a * (a + 2.0) * gm2 * brk -
        a * gm1 * ((theta * theta + 1.0) * (n - 1.0) + 1.0 +
                   (rt > 0.0 ? theta * (n - 2.0) * (yn + 1.0) / rt : (theta == 0.0 ? 0.0 : 1e300)));
    const double dyn = -a * gm1 * (theta * rt + yn + 1.0);
    const double jb = std::sqrt(1.0 + y.norm2());
    m.interior_min = std::min(m.interior_min, -lap * std::pow(jb, a + 2.0));
    m.boundary_min = std::min(m.boundary_min, -dyn * std::pow(jb, a + 1.0));
  }
  return m;
}

}  // namespace bbl::kernels
