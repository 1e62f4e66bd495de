#include "bbl/verify.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "bbl/ansatz.hpp"
#include "bbl/core.hpp"
#include "bbl/kernels.hpp"
#include "bbl/modulation.hpp"
#include "bbl/profiles.hpp"
#include "bbl/quad.hpp"
#include "bbl/spectral.hpp"

namespace bbl::verify {

namespace {
constexpr double kPi = 3.14159265358979323846;

void add(std::vector<CheckRow>& rows, const std::string& name, double residual, double tol) {
  rows.push_back({name, residual, tol, residual <= tol});
}

std::vector<CheckRow> suite_caloric(double ts) {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int l = 0; l <= 4; ++l) {
    std::vector<std::pair<CylPoint, TimeWindow>> samples;
    for (int k = 0; k < 1000; ++k) {
      const double T = 0.5 + uni(rng);
      samples.emplace_back(CylPoint(4.0 * uni(rng), 4.0 * uni(rng), 5),
                           TimeWindow(T, T * uni(rng) * 0.99));
    }
    auto res = spectral::theta_heat_residual(l, 5, samples);
    add(rows, "theta_heat_interior_l" + std::to_string(l), res.interior_max, 1e-9 * ts);
    add(rows, "theta_neumann_l" + std::to_string(l), res.boundary_max, 1e-9 * ts);
  }
  // pinned values
  {
    TimeWindow w(1.0, 0.25);
    double worst = 0.0;
    for (int l = 0; l <= 4; ++l)
      worst = std::max(worst, std::abs(spectral::theta(l, CylPoint(0.0, 0.0, 5), w) +
                                       std::pow(w.remaining(), l)));
    add(rows, "theta_origin_value", worst, 1e-14 * ts);
    const CylPoint x(0.7, 0.4, 5);
    const double closed = (x.norm2()) / 10.0 - w.remaining();
    add(rows, "theta_l1_closed_form", std::abs(spectral::theta(1, x, w) - closed), 1e-14 * ts);
  }
  return rows;
}

std::vector<CheckRow> suite_profiles(double ts) {
  std::vector<CheckRow> rows;
  const int n = 5;
  add(rows, "U_origin", std::abs(eval_U(CylPoint(0, 0, n)) - std::pow(3.0, 1.5)), 1e-13 * ts);
  add(rows, "U_axis_xn1",
      std::abs(eval_U(CylPoint(0, 1, n)) - std::pow(3.0, 1.5) / 8.0), 1e-13 * ts);
  add(rows, "Z5_origin", std::abs(eval_Z(5, CylPoint(0, 0, n)) - 0.5 * std::pow(3.0, 2.5)),
      1e-13 * ts);
  add(rows, "Z5_unit_sphere", std::abs(eval_Z(5, CylPoint(1.0, 0.0, n))), 1e-13 * ts);
  add(rows, "Z1_boundary_e1",
      std::abs(eval_Z(1, CylPoint(1.0, 0.0, n)) + std::pow(3.0, 2.5) * std::pow(2.0, -2.5)),
      1e-13 * ts);
  // kernel residuals, random interior/boundary samples
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<CylPoint> interior, boundary;
  for (int k = 0; k < 1000; ++k) {
    interior.emplace_back(2.5 * uni(rng), 0.05 + 2.5 * uni(rng), n);
    boundary.emplace_back(3.0 * uni(rng), 0.0, n);
  }
  Tolerances tol;
  tol.fd_step = 1e-4;
  for (int j : {1, 5}) {
    auto kr = kernel_residuals(j, interior, boundary, tol);
    add(rows, "Z" + std::to_string(j) + "_interior_laplacian_fd", kr.interior_max, 1e-6 * ts);
    add(rows, "Z" + std::to_string(j) + "_boundary_relation", kr.boundary_max, 1e-10 * ts);
  }
  // functionals against closed forms
  QuadratureGrid grid = QuadratureGrid::build(60.0, 60.0, 16, true, n);
  CylField Uf = sample_U(grid);
  const double BUU = quadform_BU(Uf, Uf);
  add(rows, "B_U[U,U]_closed_form", std::abs(BUU + 9.0 * kPi * kPi) / (9.0 * kPi * kPi), 1e-6 * ts);
  add(rows, "I[U]_nehari", std::abs(functional_I(Uf)) / (13.5 * kPi * kPi), 1e-6 * ts);
  const double sharp = 1.5 * std::pow(8.0 * kPi * kPi / 3.0, 0.25);
  add(rows, "Q(U)_sharp_trace", std::abs(rayleigh_Q(Uf) - sharp) / sharp, 1e-4 * ts);
  return rows;
}

std::vector<CheckRow> suite_spectral(double ts) {
  std::vector<CheckRow> rows;
  // Laguerre l=1 nu=3/2: 5/2 - r
  auto L1 = spectral::laguerre_mod(1, 1.5);
  add(rows, "laguerre_l1_c0", std::abs(L1.coeffs[0] - 2.5), 1e-15 * ts);
  add(rows, "laguerre_l1_c1", std::abs(L1.coeffs[1] + 1.0), 1e-15 * ts);
  double c0worst = 0.0;
  for (int l = 0; l <= 8; ++l) {
    auto L = spectral::laguerre_mod(l, 1.5);
    if (!(L.coeffs[0] > 0.0)) c0worst = 1.0;
  }
  add(rows, "laguerre_c0_positive_l_le_8", c0worst, 0.5);
  // Hermite values
  auto H2 = spectral::hermite_tilde(2);
  add(rows, "hermite_H2_at_0", std::abs(H2.eval(0.0) + 2.0), 1e-15 * ts);
  auto H3 = spectral::hermite_tilde(3);
  add(rows, "hermite_H3_odd_slope", std::abs(H3.eval_d1(0.0)) > 0 ? 0.0 : 1.0, 0.5);
  // A_z eigen residuals for all multi-indices of degree <= 6
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  std::vector<std::vector<double>> samples;
  for (int k = 0; k < 64; ++k) {
    std::vector<double> z(5);
    for (auto& v : z) v = uni(rng);
    samples.push_back(z);
  }
  double worst = 0.0;
  std::function<void(std::vector<int>&, int, int)> rec = [&](std::vector<int>& m, int pos, int left) {
    if (pos == 4) {
      for (int e = 0; e <= left; ++e) {
        m[4] = e;
        worst = std::max(worst, spectral::az_eigen_residual(m, samples));
      }
      return;
    }
    for (int v = 0; v <= left; ++v) {
      m[pos] = v;
      rec(m, pos + 1, left - v);
    }
    m[pos] = 0;
  };
  std::vector<int> m(5, 0);
  rec(m, 0, 6);
  add(rows, "az_eigen_residual_deg_le_6", worst, 1e-10 * ts);
  // counting vs brute force
  double countworst = 0.0;
  for (double C : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    const long long lim = static_cast<long long>(std::floor(2.0 * C)) + 1;
    std::uint64_t brute = 0;
    for (long long a = 0; a <= lim; ++a)
      for (long long b = 0; b <= lim; ++b)
        for (long long c = 0; c <= lim; ++c)
          for (long long d = 0; d <= lim; ++d)
            for (long long e = 0; e <= lim; e += 2)
              if (a + b + c + d + e <= 2.0 * C) ++brute;
    countworst = std::max(countworst,
                          std::abs(static_cast<double>(spectral::eig_count_neumann(C, 5)) -
                                   static_cast<double>(brute)));
  }
  add(rows, "eig_count_vs_bruteforce", countworst, 0.5);
  add(rows, "eig_count_negative_C",
      static_cast<double>(spectral::eig_count_neumann(-1.0, 5)), 0.5);
  // rho inner products
  const double g11 = spectral::inner_rho({1.0}, {1.0}, spectral::Domain::Full);
  add(rows, "inner_rho_1_1", std::abs(g11 - 2.0 * std::sqrt(kPi)), 1e-12 * ts);
  auto h1 = spectral::hermite_tilde(1), h3 = spectral::hermite_tilde(3);
  std::vector<double> c1(h1.coeffs.begin(), h1.coeffs.end()), c3(h3.coeffs.begin(), h3.coeffs.end());
  add(rows, "inner_rho_H1_H3", std::abs(spectral::inner_rho(c1, c3, spectral::Domain::Full)),
      1e-11 * ts);
  return rows;
}

std::vector<CheckRow> suite_kernels(double ts) {
  std::vector<CheckRow> rows;
  const int n = 5;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // H_n vs rescaled G_n
  double gap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    CylPoint z(3.0 * uni(rng), 2.0 * uni(rng), n);
    CylPoint w(3.0 * uni(rng), 2.0 * uni(rng), n);
    const double sig = -2.0 + 3.0 * uni(rng);
    const double s = sig + 0.2 + 3.0 * uni(rng);
    const double t3 = -1.0 + 2.0 * uni(rng);
    const double off = uni(rng) < 0.5 ? -1.0 : std::abs(std::exp(0.5 * (sig - s)) * z.r - w.r) + uni(rng);
    const double a = kernels::H_n(z, s, w, sig, n, off);
    const double b = kernels::H_n_via_Gn(z, s, w, sig, n, t3, off);
    if (a > 0.0) gap = std::max(gap, std::abs(a - b) / a);
  }
  add(rows, "Hn_vs_rescaled_Gn", gap, 1e-12 * ts);
  // origin value 2 [4 pi (t-s)]^{-n/2}
  kernels::HeatKernelQuery q;
  q.x = CylPoint(0, 0, n);
  q.z = CylPoint(0, 0, n);
  q.t = 0.7;
  q.s = 0.2;
  add(rows, "Gn_boundary_origin",
      std::abs(kernels::G_n(q, n) - 2.0 * std::pow(4.0 * kPi * 0.5, -2.5)), 1e-15 * ts);
  // unit mass
  double mass_gap = 0.0;
  for (double tau : {0.03, 0.2, 1.0}) {
    for (double r : {0.0, 0.7, 2.1}) {
      const double m = kernels::kernel_mass(r, 0.4 * r, tau);
      mass_gap = std::max(mass_gap, std::abs(m - 1.0));
    }
  }
  add(rows, "Gn_mass", mass_gap, 1e-8 * ts);
  // duhamel: pure boundary constant source at the boundary ~ 2 sqrt(t/pi)
  Tolerances tol;
  {
    const double t = 0.01;
    const double v = kernels::duhamel(nullptr, [](double, double) { return 1.0; }, nullptr,
                                      CylPoint(0.5, 0.0, n), t, 40.0, tol);
    add(rows, "duhamel_boundary_flux_law", std::abs(v - 2.0 * std::sqrt(t / kPi)), 2e-6 * ts);
  }
  // duhamel: Gaussian initial data against the closed-form evolution
  {
    const double a = 0.05, t = 0.12;
    auto init = [a](double r, double z) { return std::exp(-(r * r + z * z) / (4.0 * a)); };
    const CylPoint x(0.3, 0.22, n);
    const double v = kernels::duhamel(nullptr, nullptr, init, x, t, 12.0, tol);
    const double exact = std::pow(a / (a + t), 2.5) * std::exp(-x.norm2() / (4.0 * (a + t)));
    add(rows, "duhamel_gaussian_evolution", std::abs(v - exact) / exact, 1e-6 * ts);
  }
  // barrier margins
  {
    std::vector<CylPoint> samples;
    for (int k = 0; k < 1000; ++k)
      samples.emplace_back(0.02 + 30.0 * uni(rng), 30.0 * uni(rng), n);
    auto m = kernels::barrier_check(2.0, 0.05, samples);
    add(rows, "barrier_interior_margin", m.interior_min > 0 ? 0.0 : 1.0, 0.5);
    add(rows, "barrier_boundary_margin", m.boundary_min > 0 ? 0.0 : 1.0, 0.5);
  }
  return rows;
}

std::vector<CheckRow> suite_ansatz(double ts) {
  std::vector<CheckRow> rows;
  ansatz::AnsatzConfig cfg;
  cfg.bubbles = {{0.0, 0}, {64.0, 1}};
  cfg.T = 0.01;
  cfg.delta = 2.0;
  cfg.validate();
  const double A_R = modulation::compute_AR(cfg.cutoff_R(), cfg.n);
  auto path = ansatz::bare_path(cfg, A_R);
  const double t = cfg.T * 0.5;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // E1 closed form vs FD
  double e1gap = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double x1 = -6.0 + 12.0 * uni(rng);
    const double xn = 0.02 + 5.0 * uni(rng);
    const double a = ansatz::error_E1(cfg, x1, xn, t, path);
    const double b = ansatz::error_E1_fd(cfg, x1, xn, t, path, 1e-4);
    e1gap = std::max(e1gap, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  add(rows, "E1_closed_vs_fd", e1gap, 1e-5 * ts);
  // E2 direct vs expanded (algebraic identity)
  double e2gap = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x1 = -8.0 + 80.0 * uni(rng);
    const double a = ansatz::error_E2_direct(cfg, x1, t, path);
    const double b = ansatz::error_E2_expanded(cfg, x1, t, path);
    e2gap = std::max(e2gap, std::abs(a - b));
  }
  add(rows, "E2_direct_vs_expanded", e2gap, 1e-12 * ts);
  // support: all cutoffs vanish at distance >= 4 delta
  double far = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x1 = 8.0 * cfg.delta + 4.0 * uni(rng);
    far = std::max(far, std::abs(eval_ansatz(cfg, x1, 3.0 * uni(rng), t, path)));
  }
  add(rows, "ansatz_support", far, 1e-16 * ts);
  // split consistency with a synthetic psi
  auto psi = [](double x1, double, double) { return 0.01 / (1.0 + x1 * x1); };
  double split = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x1 = -10.0 + 90.0 * uni(rng);
    auto full = ansatz::outer_sources(cfg, x1, 0.0, t, path, psi);
    double sum = ansatz::outer_G2_rest(cfg, x1, t, psi);
    for (std::size_t i = 0; i < cfg.bubbles.size(); ++i)
      sum += ansatz::outer_G2i(cfg, i, x1, t, path, psi);
    split = std::max(split, std::abs(full.G2 - sum));
  }
  add(rows, "G2_split_consistency", split, 1e-12 * ts);
  return rows;
}

}  // namespace

std::vector<CheckRow> run_suite(const std::string& suite, double tol_scale) {
  if (suite == "caloric") return suite_caloric(tol_scale);
  if (suite == "profiles") return suite_profiles(tol_scale);
  if (suite == "spectral") return suite_spectral(tol_scale);
  if (suite == "kernels") return suite_kernels(tol_scale);
  if (suite == "ansatz") return suite_ansatz(tol_scale);
  throw std::invalid_argument("unknown suite: " + suite);
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace bbl::verify
