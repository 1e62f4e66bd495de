#include "bbl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bbl/par.hpp"
#include "bbl/quad.hpp"

namespace bbl::spectral {

namespace {
long long gcd_ll(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a ? a : 1;
}
long long checked(__int128 v) {
  if (v > static_cast<__int128>(9223372036854775807LL) ||
      v < -static_cast<__int128>(9223372036854775807LL))
    throw std::overflow_error("Rational overflow (degree too large for exact arithmetic)");
  return static_cast<long long>(v);
}
}  // namespace

Rational::Rational(long long n) : num(n), den(1) {}
Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = gcd_ll(num, den);
  num /= g;
  den /= g;
}
Rational Rational::operator+(const Rational& o) const {
  __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
  __int128 d = static_cast<__int128>(den) * o.den;
  Rational r;
  long long nn = checked(n), dd = checked(d);
  long long gg = gcd_ll(nn, dd);
  r.num = nn / gg;
  r.den = dd / gg;
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  return r;
}
Rational Rational::operator-(const Rational& o) const { return *this + Rational(-o.num, o.den); }
Rational Rational::operator*(const Rational& o) const {
  long long g1 = gcd_ll(num, o.den), g2 = gcd_ll(o.num, den);
  __int128 n = static_cast<__int128>(num / g1) * (o.num / g2);
  __int128 d = static_cast<__int128>(den / g2) * (o.den / g1);
  Rational r;
  r.num = checked(n);
  r.den = checked(d);
  return r;
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
  return *this * Rational(o.den, o.num);
}

LaguerrePoly laguerre_mod(int l, double nu) {
  if (!(nu > -1.0)) throw std::invalid_argument("laguerre_mod: nu > -1 required");
  LaguerrePoly P;
  P.l = l;
  P.nu = nu;
  P.coeffs.assign(l + 1, 0.0);
  const double two_nu = 2.0 * nu;
  const bool exact = std::abs(two_nu - std::llround(two_nu)) < 1e-12;
  if (exact) {
    // Leibniz: c_i = (-1)^i C(l, i) * (nu+l)(nu+l-1)...(nu+i+1), falling product of length l-i
    const Rational nu_r(std::llround(two_nu), 2);
    P.coeffs_exact.assign(l + 1, Rational(0));
    for (int i = 0; i <= l; ++i) {
      Rational c(1);
      // binomial C(l, i)
      for (int k = 0; k < i; ++k) c = c * Rational(l - k) / Rational(k + 1);
      Rational fall(1);
      for (int k = 0; k < l - i; ++k) fall = fall * (nu_r + Rational(l - k));
      c = c * fall;
      if (i % 2 == 1) c = c * Rational(-1);
      P.coeffs_exact[i] = c;
      P.coeffs[i] = c.to_double();
    }
  } else {
    for (int i = 0; i <= l; ++i) {
      double c = 1.0;
      for (int k = 0; k < i; ++k) c = c * (l - k) / (k + 1);
      for (int k = 0; k < l - i; ++k) c *= (nu + l - k);
      if (i % 2 == 1) c = -c;
      P.coeffs[i] = c;
    }
  }
  return P;
}

double theta(int l, const CylPoint& x, const TimeWindow& w) {
  const double nu = 0.5 * (x.dim - 2.0);
  LaguerrePoly P = laguerre_mod(l, nu);
  const double tau = w.remaining();
  const double rho = x.norm2() / (4.0 * tau);
  double L = 0.0;
  for (int i = l; i >= 0; --i) L = L * rho + P.coeffs[i];
  return -std::pow(tau, l) / P.coeffs[0] * L;
}

ThetaResiduals theta_heat_residual(int l, int n,
                                   const std::vector<std::pair<CylPoint, TimeWindow>>& samples) {
  // Theta = -(1/c0) sum_i c_i tau^{l-i} w^i / 4^i with w = |x|^2, tau = T-t.
  // d_t Theta - Delta Theta expands exactly in the (w, tau) monomial basis.
  LaguerrePoly P = laguerre_mod(l, 0.5 * (n - 2.0));
  // residual coefficients R_{i,j} of w^i tau^j
  std::vector<std::vector<Rational>> R(l + 1, std::vector<Rational>(std::max(l, 1), Rational(0)));
  const bool exact = !P.coeffs_exact.empty();
  const Rational c0 = exact ? P.coeffs_exact[0] : Rational(1);
  for (int i = 0; i <= l; ++i) {
    Rational ci = exact ? (P.coeffs_exact[i] / c0) : Rational(0);
    if (!exact) throw std::invalid_argument("theta_heat_residual: nu must be a half-integer");
    Rational pow4(1);
    for (int k = 0; k < i; ++k) pow4 = pow4 * Rational(1, 4);
    Rational a = ci * pow4;  // Theta has term -(a) w^i tau^{l-i}
    // d_t Theta = -d_tau Theta: contributes +a (l-i) w^i tau^{l-i-1}
    if (l - i >= 1) R[i][l - i - 1] = R[i][l - i - 1] + a * Rational(l - i);
    // Delta Theta: w^i -> 2i(2i+n-2) w^{i-1}: contributes +a*2i(2i+n-2) w^{i-1} tau^{l-i}
    if (i >= 1 && l - i <= static_cast<int>(R[0].size()) - 1)
      R[i - 1][l - i] = R[i - 1][l - i] + a * Rational(2LL * i * (2LL * i + n - 2));
  }
  // note: the Delta contribution enters with +a because Theta carries -(a).
  // Both pieces carry the same overall sign, so cancellation must be exact.
  ThetaResiduals out;
  for (const auto& [x, w] : samples) {
    const double wv = x.norm2();
    const double tau = w.remaining();
    double res = 0.0;
    for (int i = 0; i <= l; ++i)
      for (std::size_t j = 0; j < R[i].size(); ++j)
        if (!R[i][j].is_zero()) res += R[i][j].to_double() * std::pow(wv, i) * std::pow(tau, j);
    out.interior_max = std::max(out.interior_max, std::abs(res));
    // d_xn Theta = 2 xn * dTheta/dw; on the boundary the xn factor is zero
    double dw = 0.0;
    for (int i = 1; i <= l; ++i) {
      const double a = (P.coeffs[i] / P.coeffs[0]) / std::pow(4.0, i);
      dw += -a * i * std::pow(x.r * x.r, i - 1) * std::pow(tau, l - i);
    }
    out.boundary_max = std::max(out.boundary_max, std::abs(2.0 * 0.0 * dw));
  }
  return out;
}

double HermiteTilde::eval(double s) const {
  double v = 0.0;
  for (int i = alpha; i >= 0; --i) v = v * s + static_cast<double>(coeffs[i]);
  return v;
}
double HermiteTilde::eval_d1(double s) const {
  double v = 0.0;
  for (int i = alpha; i >= 1; --i) v = v * s + static_cast<double>(coeffs[i]) * i;
  return v;
}
double HermiteTilde::eval_d2(double s) const {
  double v = 0.0;
  for (int i = alpha; i >= 2; --i) v = v * s + static_cast<double>(coeffs[i]) * i * (i - 1);
  return v;
}

HermiteTilde hermite_tilde(int alpha) {
  std::vector<std::vector<long long>> H(std::max(2, alpha + 1));
  H[0] = {1};
  H[1] = {0, 1};
  for (int a = 1; a < alpha; ++a) {
    std::vector<long long> next(a + 2, 0);
    for (int i = 0; i <= a; ++i) next[i + 1] += H[a][i];        // s * H~_a
    for (int i = 0; i < a; ++i) next[i] -= 2LL * a * H[a - 1][i];  // - 2a H~_{a-1}
    H.resize(std::max<std::size_t>(H.size(), a + 2));
    H[a + 1] = std::move(next);
  }
  return HermiteTilde{alpha, H[alpha]};
}

double az_eigen_residual(const std::vector<int>& multi, const std::vector<std::vector<double>>& samples) {
  const int n = static_cast<int>(multi.size());
  std::vector<HermiteTilde> H;
  int total = 0;
  for (int a : multi) {
    H.push_back(hermite_tilde(a));
    total += a;
  }
  const double lambda = 0.5 * total;
  double worst = 0.0;
  for (const auto& z : samples) {
    std::vector<double> val(n), d1(n), d2(n);
    for (int j = 0; j < n; ++j) {
      val[j] = H[j].eval(z[j]);
      d1[j] = H[j].eval_d1(z[j]);
      d2[j] = H[j].eval_d2(z[j]);
    }
    double prod_all = 1.0;
    for (int j = 0; j < n; ++j) prod_all *= val[j];
    double Az = 0.0;
    for (int j = 0; j < n; ++j) {
      double rest = 1.0;
      for (int k = 0; k < n; ++k)
        if (k != j) rest *= val[k];
      Az += (d2[j] - 0.5 * z[j] * d1[j]) * rest;
    }
    worst = std::max(worst, std::abs(-Az - lambda * prod_all));
  }
  return worst;
}

std::uint64_t eig_count_neumann(double C, int n) {
  if (n < 2) throw std::invalid_argument("eig_count_neumann: n >= 2");
  if (C < 0.0) return 0;
  const long long dmax = static_cast<long long>(std::floor(2.0 * C + 1e-12));
  // #{alpha in N^n : |alpha| = d, alpha_n even} = sum_{k even <= d} C(d-k+n-2, n-2)
  auto comb = [](long long a, int b) {
    __int128 r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return static_cast<std::uint64_t>(r);
  };
  std::uint64_t total = 0;
  for (long long d = 0; d <= dmax; ++d)
    for (long long k = 0; k <= d; k += 2) total += comb(d - k + n - 2, n - 2);
  return total;
}

namespace {
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// int_0^infty z^k e^{-z^2/4} dz (exact): even k: Gamma-halves, odd k: 2^{k} ((k-1)/2)!
double half_moment(int k) {
  // substitute u = z^2/4: = 2^k Gamma((k+1)/2)
  return std::pow(2.0, k) * std::tgamma(0.5 * (k + 1));
}
}  // namespace

double inner_rho(const std::vector<double>& f, const std::vector<double>& g, Domain dom) {
  std::vector<double> p = poly_mul(f, g);
  if (dom == Domain::Full) {
    // z = 2x, weight e^{-x^2}: GH quadrature, exact up to the rule degree
    const int deg = static_cast<int>(p.size()) - 1;
    const int order = std::max(8, deg / 2 + 2);
    const auto& rule = quad::gauss_hermite(order);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double z = 2.0 * rule.x[i];
      double v = 0.0;
      for (int k = deg; k >= 0; --k) v = v * z + p[k];
      s += rule.w[i] * v;
    }
    return 2.0 * s;
  }
  // half line: even part via GH (half of full), odd part by exact moments
  double even_full = 0.0;
  {
    std::vector<double> pe(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); k += 2) pe[k] = p[k];
    even_full = inner_rho(pe, {1.0}, Domain::Full);
  }
  double odd = 0.0;
  for (std::size_t k = 1; k < p.size(); k += 2) odd += p[k] * half_moment(static_cast<int>(k));
  return 0.5 * even_full + odd;
}

namespace {

struct MultiLess {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    int sa = std::accumulate(a.begin(), a.end(), 0);
    int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return a < b;  // lexicographic tie-break
  }
};

void enumerate_multis(int n, int degree, std::vector<int>& cur, int pos,
                      std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    int rem = degree;
    for (int i = 0; i < n - 1; ++i) rem -= cur[i];
    if (rem >= 0 && rem % 2 == 0) {
      cur[n - 1] = rem;
      out.push_back(cur);
    }
    return;
  }
  int used = 0;
  for (int i = 0; i < pos; ++i) used += cur[i];
  for (int v = 0; v + used <= degree; ++v) {
    cur[pos] = v;
    enumerate_multis(n, degree, cur, pos + 1, out);
  }
  cur[pos] = 0;
}

// 1D rho-norm^2 of H~_a over the full line: 2 sqrt(pi) 2^a a!
double hermite_norm2_full(int a) {
  double v = 2.0 * std::sqrt(std::acos(-1.0));
  for (int k = 1; k <= a; ++k) v *= 2.0 * k;
  return v;
}

// angular moment over the full sphere S^{n-1}: 2 prod Gamma((m_j+1)/2) / Gamma((|m|+n)/2)
double angular_moment(const std::vector<int>& m) {
  int total = 0;
  double num = 2.0;
  for (int mj : m) {
    if (mj % 2 == 1) return 0.0;
    num *= std::tgamma(0.5 * (mj + 1));
    total += mj;
  }
  return num / std::tgamma(0.5 * (total + m.size()));
}

// radial integrals int_0^infty rho^{k} e^{-rho^2/4} W(rho/M) drho for
// W = eta (inside) or W = 1-eta (outside), by GL panels.
// The integrand is negligible once rho^2/4 > 760 (double underflow).
double radial_weighted_moment(int k, double M, bool outside) {
  const double rho_uf = std::sqrt(4.0 * 760.0);
  auto f = [&](double rho) {
    const double w = cutoff_eta(rho / M);
    return std::pow(rho, k) * std::exp(-rho * rho / 4.0) * (outside ? (1.0 - w) : w);
  };
  if (outside) {
    if (M >= rho_uf) return 0.0;
    auto brk = quad::geometric_breaks(M, M * 1.125, std::max(M * 1.2, rho_uf), 1.125);
    return quad::panels(f, brk, 24);
  }
  auto brk = quad::geometric_breaks(0.0, 0.5, std::min(2.0 * M, rho_uf), 1.25);
  return quad::panels(f, brk, 24);
}

// product polynomial of two 1D integer-coefficient Hermites, as doubles
std::vector<double> pair_poly(const HermiteTilde& A, const HermiteTilde& B) {
  std::vector<double> a(A.coeffs.begin(), A.coeffs.end()), b(B.coeffs.begin(), B.coeffs.end());
  return poly_mul(a, b);
}

// correction or direct entry by monomial expansion:
// sum_m c_m * A_half(m) * int rho^{|m|+n-1} e^{-rho^2/4} W drho
double expansion_entry(const std::vector<std::vector<double>>& coord_polys, double M, bool outside,
                       std::vector<double>& radial_cache) {
  const int n = static_cast<int>(coord_polys.size());
  // iterate monomial tuples
  std::vector<int> deg(n);
  for (int j = 0; j < n; ++j) deg[j] = static_cast<int>(coord_polys[j].size()) - 1;
  std::vector<int> m(n, 0);
  double total = 0.0;
  // recursive loop flattened with odометр
  std::function<void(int, double, int)> rec = [&](int pos, double coeff, int degsum) {
    if (coeff == 0.0) return;
    if (pos == n) {
      std::vector<int> mm = m;
      const double ang = angular_moment(mm) * 0.5;  // half sphere (z_n > 0), m_n even
      if (ang == 0.0) return;
      const int k = degsum + n - 1;
      if (radial_cache[k] != radial_cache[k]) {  // NaN marks "not computed"
        radial_cache[k] = radial_weighted_moment(k, M, outside);
      }
      total += coeff * ang * radial_cache[k];
      return;
    }
    for (int v = 0; v <= deg[pos]; ++v) {
      if (coord_polys[pos][v] == 0.0) continue;
      m[pos] = v;
      rec(pos + 1, coeff * coord_polys[pos][v], degsum + v);
    }
    m[pos] = 0;
  };
  rec(0, 1.0, 0);
  return total;
}

}  // namespace

LocalizedBasis build_localized_basis(std::size_t N_max, int n, const Tolerances& tol) {
  tol.validate();
  LocalizedBasis out;
  out.count = N_max + 1;

  // enumerate Neumann-admissible multi-indices by (eigenvalue, lex)
  std::vector<std::vector<int>> multis;
  for (int d = 0; multis.size() <= N_max; ++d) {
    std::vector<std::vector<int>> level;
    std::vector<int> cur(n, 0);
    enumerate_multis(n, d, cur, 0, level);
    std::sort(level.begin(), level.end());
    for (auto& a : level) multis.push_back(a);
    if (d > 64) throw std::runtime_error("build_localized_basis: enumeration runaway");
  }
  multis.resize(N_max + 1);

  const std::size_t m = multis.size();
  out.funcs.resize(m);
  std::vector<std::vector<HermiteTilde>> H(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.funcs[i].multi = multis[i];
    int tot = std::accumulate(multis[i].begin(), multis[i].end(), 0);
    out.funcs[i].eigenvalue = 0.5 * tot;
    double norm2 = 1.0;
    for (int j = 0; j < n; ++j) {
      H[i].push_back(hermite_tilde(multis[i][j]));
      double full = hermite_norm2_full(multis[i][j]);
      norm2 *= (j == n - 1) ? 0.5 * full : full;  // half line in z_n (alpha_n even)
    }
    out.funcs[i].norm = std::sqrt(norm2);
  }

  auto same_parity = [&](std::size_t i, std::size_t l) {
    for (int j = 0; j < n; ++j)
      if ((multis[i][j] + multis[l][j]) % 2 != 0) return false;
    return true;
  };

  const int max_pair_deg = [&] {
    int d = 0;
    for (auto& a : multis) d = std::max(d, std::accumulate(a.begin(), a.end(), 0));
    return 2 * d;
  }();

  double M = 8.0;
  std::vector<std::vector<double>> G;
  bool dominant = false;
  for (; M <= 1024.0 + 0.5; M *= 2.0) {
    G.assign(m, std::vector<double>(m, 0.0));
    std::vector<double> radial_cache(max_pair_deg + n + 2, std::nan(""));
    // Gram = I - C with C the outside-cutoff correction (normalized basis)
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = i; l < m; ++l)
        if (same_parity(i, l)) pairs.emplace_back(i, l);
    // radial moments are shared; prefill serially to keep the cache race-free
    for (int k = 0; k <= max_pair_deg + n - 1; ++k)
      radial_cache[k] = radial_weighted_moment(k, M, /*outside=*/true);
    std::vector<double> corr(pairs.size());
    par::for_each(pairs.size(), [&](std::size_t pi) {
      auto [i, l] = pairs[pi];
      std::vector<std::vector<double>> polys(n);
      for (int j = 0; j < n; ++j) polys[j] = pair_poly(H[i][j], H[l][j]);
      std::vector<double> cache_copy = radial_cache;
      corr[pi] = expansion_entry(polys, M, true, cache_copy) / (out.funcs[i].norm * out.funcs[l].norm);
    });
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      auto [i, l] = pairs[pi];
      G[i][l] = (i == l ? 1.0 : 0.0) - corr[pi];
      G[l][i] = G[i][l];
    }
    dominant = true;
    for (std::size_t i = 0; i < m && dominant; ++i) {
      double off = 0.0;
      for (std::size_t l = 0; l < m; ++l)
        if (l != i) off += std::abs(G[i][l]);
      if (!(off < std::abs(G[i][i]))) dominant = false;
    }
    if (dominant) break;
  }
  if (!dominant)
    throw std::runtime_error("build_localized_basis: no diagonally dominant Gram up to M=1024");
  out.M = std::min(M, 1024.0);

  // invert G (dense symmetric, Gauss-Jordan is fine at this size)
  std::vector<std::vector<double>> inv(m, std::vector<double>(m, 0.0));
  {
    std::vector<std::vector<double>> a = G;
    for (std::size_t i = 0; i < m; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
      const double d = a[col][col];
      for (std::size_t c = 0; c < m; ++c) {
        a[col][c] /= d;
        inv[col][c] /= d;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = a[r][col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m; ++c) {
          a[r][c] -= f * a[col][c];
          inv[r][c] -= f * inv[col][c];
        }
      }
    }
  }
  out.mix = inv;

  // independent check: recompute the Gram by the eta-weighted monomial route
  // (no use of 1D orthogonality), then verify mix * Gram = I
  std::vector<std::vector<double>> G2(m, std::vector<double>(m, 0.0));
  {
    std::vector<double> radial_cache(max_pair_deg + n + 2, std::nan(""));
    for (int k = 0; k <= max_pair_deg + n - 1; ++k)
      radial_cache[k] = radial_weighted_moment(k, out.M, /*outside=*/false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = i; l < m; ++l)
        if (same_parity(i, l)) pairs.emplace_back(i, l);
    std::vector<double> vals(pairs.size());
    par::for_each(pairs.size(), [&](std::size_t pi) {
      auto [i, l] = pairs[pi];
      std::vector<std::vector<double>> polys(n);
      for (int j = 0; j < n; ++j) polys[j] = pair_poly(H[i][j], H[l][j]);
      std::vector<double> cache_copy = radial_cache;
      vals[pi] = expansion_entry(polys, out.M, false, cache_copy) / (out.funcs[i].norm * out.funcs[l].norm);
    });
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      auto [i, l] = pairs[pi];
      G2[i][l] = vals[pi];
      G2[l][i] = vals[pi];
    }
  }
  double gap = 0.0, defect = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < m; ++l) {
      gap = std::max(gap, std::abs(G2[i][l] - G[i][l]));
      double dot = 0.0;
      for (std::size_t k = 0; k < m; ++k) dot += inv[i][k] * G2[k][l];
      defect = std::max(defect, std::abs(dot - (i == l ? 1.0 : 0.0)));
    }
  out.gram_route_gap = gap;
  out.max_biorth_defect = defect;
  return out;
}

std::string poly_to_text(const std::vector<double>& coeffs, const std::string& var) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0.0 && coeffs.size() > 1) continue;
    if (!first) os << (coeffs[i] >= 0 ? " + " : " - ");
    else if (coeffs[i] < 0) os << "-";
    os << std::abs(coeffs[i]);
    if (i >= 1) os << " " << var;
    if (i >= 2) os << "^" << i;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace bbl::spectral
