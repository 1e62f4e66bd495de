#include "bbl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bbl/modulation.hpp"
#include "bbl/par.hpp"
#include "bbl/quad.hpp"

namespace bbl::sim {

double SolverState::sup_abs() const {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double SolverState::boundary_sup() const {
  double m = 0.0;
  for (int i = 0; i < grid.nr; ++i) m = std::max(m, std::abs(at(i, 0)));
  return m;
}

double SolverState::mass_proxy() const {
  double s = 0.0;
  const double dr = grid.dr(), dz = grid.dz();
  for (int i = 0; i < grid.nr; ++i) {
    const double r = i * dr;
    for (int j = 0; j < grid.nz; ++j) s += at(i, j) * std::pow(r + 0.5 * dr, 3.0) * dr * dz;
  }
  return s;
}

double type1_constant(double alpha, double p, double quad_rel) {
  // C^{p-1} = 1/(4^alpha Gamma(alpha)) int_1^inf (1 - z^{-alpha/(p-1)}) (z-1)^{-1-alpha} dz
  const double e = alpha / (p - 1.0);
  // substitute z = 1 + u^2/(1-u) style mapping in two pieces; endpoint z->1 has
  // (z-1)^{-1-alpha} with 1 - z^{-e} ~ e (z-1): integrable kink, split finely
  auto f = [&](double z) { return (1.0 - std::pow(z, -e)) * std::pow(z - 1.0, -1.0 - alpha); };
  // near part with u = sqrt(z-1): z = 1+u^2, dz = 2u du, (z-1)^{-1-a} = u^{-2-2a}
  auto fnear = [&](double u) { return (1.0 - std::pow(1.0 + u * u, -e)) * std::pow(u, -1.0 - 2.0 * alpha) * 2.0; };
  double I = quad::adaptive(fnear, 0.0, 1.0, 0.0, quad_rel, 30);
  I += quad::adaptive(f, 2.0, 64.0, 0.0, quad_rel, 30);
  I += quad::tail_compactified(f, 64.0, 32, 8);
  const double pref = std::pow(4.0, -alpha) / std::tgamma(alpha);
  return std::pow(pref * I, 1.0 / (p - 1.0));
}

double type1_exact(const TypeISpec& spec, double xn, double t, const Tolerances& tol) {
  if (!(t < spec.T)) throw std::invalid_argument("type1_exact: t < T required");
  const double C = spec.C_ap > 0.0 ? spec.C_ap : type1_constant(spec.alpha, spec.p);
  const double e = spec.alpha / (spec.p - 1.0);
  const double Tt = spec.T - t;
  if (xn == 0.0) return C * std::pow(Tt, -e);
  // u1 = C/Gamma(alpha) int_0^inf e^{-s} s^{alpha-1} (T-t + xn^2/(4s))^{-e} ds, s = w^2
  auto f = [&](double w) {
    const double s = w * w;
    return 2.0 * std::pow(w, 2.0 * spec.alpha - 1.0) * std::exp(-s) *
           std::pow(Tt + xn * xn / (4.0 * s), -e);
  };
  const double I = quad::adaptive(f, 0.0, 9.0, tol.quad_abs, tol.quad_rel, 24);
  return C / std::tgamma(spec.alpha) * I;
}

namespace {

// interior update value at (i,j); flux form in r, standard second differences in z
inline double laplacian_at(const SolverState& s, int i, int j, double dr, double dz) {
  const int nz = s.grid.nz, nr = s.grid.nr;
  const double r = i * dr;
  double lap_r;
  if (i == 0) {
    // axis: finite-volume cell [0, dr/2] of the r^3 measure = regularized limit
    lap_r = 8.0 * (s.at(1, j) - s.at(0, j)) / (dr * dr);
  } else {
    const double rp = r + 0.5 * dr, rm = r - 0.5 * dr;
    const double vol = (std::pow(rp, 4.0) - std::pow(rm, 4.0)) / 4.0;
    const double up = (i + 1 < nr) ? s.at(i + 1, j) : s.at(i, j);  // far Neumann
    const double um = s.at(i - 1, j);
    lap_r = (std::pow(rp, 3.0) * (up - s.at(i, j)) - std::pow(rm, 3.0) * (s.at(i, j) - um)) /
            (dr * vol);
  }
  double uzp, uzm;
  if (j + 1 < nz) uzp = s.at(i, j + 1);
  else uzp = s.at(i, j);  // far Neumann
  if (j > 0) {
    uzm = s.at(i, j - 1);
  } else {
    // nonlinear Neumann ghost: u_{-1} = u_1 + 2 dz |u0|^{2/3} u0
    const double u0 = s.at(i, 0);
    uzm = s.at(i, 1) + 2.0 * dz * std::pow(std::abs(u0), 2.0 / 3.0) * u0;
  }
  const double lap_z = (uzp - 2.0 * s.at(i, j) + uzm) / (dz * dz);
  return lap_r + lap_z;
}

template <bool Parallel>
void step_impl(SolverState& s) {
  const double dr = s.grid.dr(), dz = s.grid.dz();
  const int nr = s.grid.nr, nz = s.grid.nz;
  std::vector<double> next(s.u.size());
  auto row = [&](std::size_t i) {
    for (int j = 0; j < nz; ++j)
      next[i * nz + j] = s.at(static_cast<int>(i), j) +
                         s.dt * laplacian_at(s, static_cast<int>(i), j, dr, dz);
  };
  if constexpr (Parallel) {
    par::for_each(nr, row);
  } else {
    for (int i = 0; i < nr; ++i) row(i);
  }
  bool bad = false;
  for (double v : next)
    if (!std::isfinite(v)) bad = true;
  if (bad) {
    s.blown_up = true;  // freeze the last valid state
    return;
  }
  s.u = std::move(next);
  s.t += s.dt;
  ++s.step_count;
}

}  // namespace

void step_serial(SolverState& s) { step_impl<false>(s); }
void step(SolverState& s) { step_impl<true>(s); }

double stable_dt(const SolverState& s) {
  const double dr = s.grid.dr(), dz = s.grid.dz();
  const double hmin = std::min(dr, dz);
  double dt = 0.4 * hmin * hmin / 2.0;  // stated ceiling
  // positivity of the axis/interior coefficients
  const double axis = 8.0 / (dr * dr) + 2.0 / (dz * dz);
  dt = std::min(dt, 0.95 / axis);
  // interior worst case near r = dr
  const double rp = 1.5 * dr, rm = 0.5 * dr;
  const double vol = (std::pow(rp, 4.0) - std::pow(rm, 4.0)) / 4.0;
  const double inner = (std::pow(rp, 3.0) + std::pow(rm, 3.0)) / (dr * vol) + 2.0 / (dz * dz);
  dt = std::min(dt, 0.95 / inner);
  // boundary-stiffness guard dt ~ sup|u|^{-2/3}
  const double lam = std::pow(s.sup_abs(), 2.0 / 3.0);
  if (lam > 0.0) dt = std::min(dt, 0.25 * dz / lam);
  return dt;
}

bool max_principle_ok(const SolverState& s) {
  const double dr = s.grid.dr(), dz = s.grid.dz();
  const double axis = 8.0 / (dr * dr) + 2.0 / (dz * dz);
  if (s.dt * axis > 1.0) return false;
  for (int i = 1; i < s.grid.nr; ++i) {
    const double r = i * dr;
    const double rp = r + 0.5 * dr, rm = r - 0.5 * dr;
    const double vol = (std::pow(rp, 4.0) - std::pow(rm, 4.0)) / 4.0;
    const double coef = (std::pow(rp, 3.0) + std::pow(rm, 3.0)) / (dr * vol) + 2.0 / (dz * dz);
    if (s.dt * coef > 1.0) return false;
  }
  return true;
}

std::vector<SeriesPoint> run(SolverState& s, const RunConfig& cfg) {
  std::vector<SeriesPoint> series;
  series.push_back({s.t, s.dt, s.sup_abs(), s.boundary_sup(), s.mass_proxy()});
  while (!s.blown_up && s.t < cfg.t_end) {
    s.dt = std::min(stable_dt(s), cfg.t_end - s.t);
    for (int k = 0; k < cfg.output_every && s.t < cfg.t_end && !s.blown_up; ++k) step(s);
    series.push_back({s.t, s.dt, s.sup_abs(), s.boundary_sup(), s.mass_proxy()});
    if (cfg.sup_threshold > 0.0 && series.back().sup_u >= cfg.sup_threshold) break;
  }
  return series;
}

namespace {
// linear LSQ of y = c + e x; returns (e, c, r2)
struct Lin {
  double e, c, r2;
};
Lin linfit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  const double e = (m * sxy - sx * sy) / den;
  const double c = (sy - e * sx) / m;
  double ssr = 0, sst = 0;
  const double ybar = sy / m;
  for (std::size_t i = 0; i < m; ++i) {
    const double fit = c + e * x[i];
    ssr += (y[i] - fit) * (y[i] - fit);
    sst += (y[i] - ybar) * (y[i] - ybar);
  }
  return {e, c, sst > 0 ? 1.0 - ssr / sst : 0.0};
}
}  // namespace

RateFit fit_rate(const std::vector<SeriesPoint>& series, double window_fraction) {
  if (series.size() < 30) throw std::invalid_argument("fit_rate: need at least 30 samples");
  // trailing window, strictly increasing sup near the end required
  const std::size_t m = series.size();
  const std::size_t lo = static_cast<std::size_t>(m * (1.0 - window_fraction));
  std::vector<double> ts, ys;
  for (std::size_t i = lo; i < m; ++i) {
    if (!(series[i].sup_u > 0.0)) continue;
    ts.push_back(series[i].t);
    ys.push_back(std::log(series[i].sup_u));
  }
  if (ts.size() < 30) throw std::invalid_argument("fit_rate: window too small");
  const double t_last = ts.back();
  auto r2_of = [&](double Test) {
    std::vector<double> xs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) xs[i] = std::log(Test - ts[i]);
    return linfit(xs, ys).r2;
  };
  // golden-section maximization of r^2 in T_est
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = t_last + 1e-12 + 1e-9 * (t_last - ts.front());
  double b = t_last + 2.0 * (t_last - ts.front());
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (r2_of(c) > r2_of(d)) b = d;
    else a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
    if (b - a < 1e-14 * std::max(1.0, b)) break;
  }
  RateFit out;
  out.T_est = 0.5 * (a + b);
  std::vector<double> xs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) xs[i] = std::log(out.T_est - ts[i]);
  Lin L = linfit(xs, ys);
  out.exponent = L.e;
  out.prefactor = std::exp(L.c);
  out.r2 = L.r2;
  out.window_lo = ts.front();
  out.window_hi = t_last;
  out.accepted = L.r2 >= 0.99;
  return out;
}

SolverState seed_with_ansatz(const ansatz::AnsatzConfig& cfg, double t0, const CylGrid& grid,
                             double A_R) {
  SolverState s;
  s.grid = grid;
  s.t = t0;
  // feasibility: at least 8 cells across every bubble core
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
    const double mu = modulation::mu0(cfg.bubbles[i].l, cfg.T, A_R, cfg.n, t0);
    const double need = 8.0;
    if (mu / grid.dr() < need || mu / grid.dz() < need) {
      std::ostringstream os;
      os << "seed_with_ansatz: bubble " << i << " unresolvable: mu(t0)=" << mu
         << " needs cell size <= " << mu / need << " (have dr=" << grid.dr() << ", dz=" << grid.dz()
         << "; required cells per axis >= " << need * grid.r_max / mu << ")";
      throw std::invalid_argument(os.str());
    }
  }
  s.u.assign(static_cast<std::size_t>(grid.nr) * grid.nz, 0.0);
  const ansatz::ModPath path = ansatz::bare_path(cfg, A_R);
  par::for_each(grid.nr, [&](std::size_t i) {
    for (int j = 0; j < grid.nz; ++j)
      s.u[i * grid.nz + j] = cfg.bubbles.empty()
                                 ? 0.0
                                 : eval_ansatz(cfg, i * grid.dr(), j * grid.dz(), t0, path);
  });
  s.dt = stable_dt(s);
  return s;
}

}  // namespace bbl::sim
