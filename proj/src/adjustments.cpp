#include "bbl/adjustments.hpp"

#include <cmath>
#include <stdexcept>

#include "bbl/par.hpp"
#include "bbl/quad.hpp"

namespace bbl::adjust {

namespace {

double factorial(int k) {
  double v = 1.0;
  for (int i = 2; i <= k; ++i) v *= i;
  return v;
}

// central Gaussian moments of the heat kernel at time t: int G(w) w^j dw
double gauss_moment(int j, double t) {
  if (j % 2 == 1) return 0.0;
  double v = 1.0;
  for (int i = j - 1; i >= 1; i -= 2) v *= i;  // (j-1)!!
  return v * std::pow(2.0 * t, 0.5 * j);
}

// physicists' Hermite polynomial values H_k(x), k <= 8
double hermite_H(int k, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (k == 0) return h0;
  if (k == 1) return h1;
  for (int i = 2; i <= k; ++i) {
    const double h2 = 2.0 * x * h1 - 2.0 * (i - 1) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// enumerate multi-indices |m| <= N0 with m_5 even, lexicographic
std::vector<std::array<int, 5>> admissible_multis(int N0) {
  std::vector<std::array<int, 5>> out;
  for (int a = 0; a <= N0; ++a)
    for (int b = 0; a + b <= N0; ++b)
      for (int c = 0; a + b + c <= N0; ++c)
        for (int dd = 0; a + b + c + dd <= N0; ++dd)
          for (int e = 0; a + b + c + dd + e <= N0; e += 2) out.push_back({a, b, c, dd, e});
  return out;
}

}  // namespace

double evolved_bump_derivative(const BoundaryPoint& p, const std::array<int, 5>& m, double d,
                               const std::array<double, 5>& x, double t, const std::array<int, 5>& k,
                               bool with_cutoff_quadrature) {
  // data: phi(v) = eta(|v|/d) prod v_j^{m_j}/m_j!, v = z - (p,0); m_5 even so
  // the even reflection in z_5 is the same formula on all of R^5.
  if (!with_cutoff_quadrature) {
    // moments route, eta dropped (valid when e^{-d^2/(8t)} is negligible):
    // D^k_x g = prod_j (1/m_j!) int Gauss_t(w) d^k/dx^k (x_j - p_j - w)^{m_j} dw
    double prod = 1.0;
    for (int j = 0; j < 5; ++j) {
      if (k[j] > m[j]) return 0.0;
      const int e = m[j] - k[j];
      const double dx = x[j] - (j < 4 ? p[j] : 0.0);
      // 1/e! * sum_i C(e,i) dx^{e-i} (-1)^i M_i(t)
      double f = 0.0;
      for (int i = 0; i <= e; i += 2) {
        double binom = 1.0;
        for (int q = 0; q < i; ++q) binom = binom * (e - q) / (q + 1);
        f += binom * std::pow(dx, e - i) * gauss_moment(i, t);
      }
      prod *= f / factorial(e);
    }
    return prod;
  }
  // quadrature route with the cutoff: derivatives moved onto the kernel,
  // D^k_x G = G * prod (-1/(2 sqrt t))^{k_j} H_{k_j}(w_j/(2 sqrt t))
  const auto& gh = quad::gauss_hermite(10);
  const double st = 2.0 * std::sqrt(t);
  const double cpi = std::pow(3.14159265358979323846, -2.5);
  double total = 0.0;
  std::array<int, 5> idx{};
  const int NG = static_cast<int>(gh.x.size());
  for (idx[0] = 0; idx[0] < NG; ++idx[0])
    for (idx[1] = 0; idx[1] < NG; ++idx[1])
      for (idx[2] = 0; idx[2] < NG; ++idx[2])
        for (idx[3] = 0; idx[3] < NG; ++idx[3])
          for (idx[4] = 0; idx[4] < NG; ++idx[4]) {
            double wgt = 1.0, herm = 1.0, mono = 1.0, rad2 = 0.0;
            for (int j = 0; j < 5; ++j) {
              const double xi = gh.x[idx[j]];
              wgt *= gh.w[idx[j]];
              herm *= std::pow(-1.0 / st, k[j]) * hermite_H(k[j], xi);
              const double v = x[j] - (j < 4 ? p[j] : 0.0) - st * xi;
              mono *= std::pow(v, m[j]) / factorial(m[j]);
              rad2 += v * v;
            }
            total += wgt * herm * mono * cutoff_eta(std::sqrt(rad2) / d);
          }
  return total * cpi;
}

AdjustmentSet build_adjustments(const std::vector<BoundaryPoint>& points, int N0, double d,
                                double base_time) {
  if (points.size() >= 2) {
    double mind = 1e300;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        double s = 0.0;
        for (int q = 0; q < 4; ++q) s += (points[i][q] - points[j][q]) * (points[i][q] - points[j][q]);
        mind = std::min(mind, std::sqrt(s));
      }
    if (!(d < mind / 4.0)) throw std::invalid_argument("build_adjustments: need d < min separation / 4");
  }
  AdjustmentSet set;
  set.points = points;
  set.order = N0;
  set.d = d;
  set.base_time = base_time;
  set.multis = admissible_multis(N0);
  const std::size_t P = points.size(), M = set.multis.size();
  const std::size_t sz = P * M;
  const bool concentrated = std::exp(-d * d / (8.0 * base_time)) < 1e-10;

  set.matrix.assign(sz, std::vector<double>(sz, 0.0));
  par::for_each(sz, [&](std::size_t row) {
    const std::size_t pp = row / M, kk = row % M;
    std::array<double, 5> xeval{points[pp][0], points[pp][1], points[pp][2], points[pp][3], 0.0};
    for (std::size_t col = 0; col < sz; ++col) {
      const std::size_t pc = col / M, mc = col % M;
      set.matrix[row][col] = evolved_bump_derivative(points[pc], set.multis[mc], d, xeval, base_time,
                                                     set.multis[kk], !concentrated);
    }
  });
  // strict diagonal dominance required for a safe inversion
  for (std::size_t r = 0; r < sz; ++r) {
    double off = 0.0;
    for (std::size_t c = 0; c < sz; ++c)
      if (c != r) off += std::abs(set.matrix[r][c]);
    if (!(off < std::abs(set.matrix[r][r])))
      throw std::runtime_error("build_adjustments: derivative matrix not diagonally dominant "
                               "(base_time too large for this d)");
  }
  // Gauss-Jordan inverse
  std::vector<std::vector<double>> a = set.matrix, inv(sz, std::vector<double>(sz, 0.0));
  for (std::size_t i = 0; i < sz; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < sz; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < sz; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double dv = a[col][col];
    for (std::size_t c = 0; c < sz; ++c) {
      a[col][c] /= dv;
      inv[col][c] /= dv;
    }
    for (std::size_t r = 0; r < sz; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < sz; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  set.inverse = std::move(inv);

  // independent Kronecker verification: recompute the derivative matrix by
  // the quadrature route (cutoff included) and compare inverse * B with I
  std::vector<std::vector<double>> B(sz, std::vector<double>(sz, 0.0));
  par::for_each(sz, [&](std::size_t row) {
    const std::size_t pp = row / M, kk = row % M;
    std::array<double, 5> xeval{points[pp][0], points[pp][1], points[pp][2], points[pp][3], 0.0};
    for (std::size_t col = 0; col < sz; ++col) {
      const std::size_t pc = col / M, mc = col % M;
      B[row][col] = evolved_bump_derivative(points[pc], set.multis[mc], d, xeval, base_time,
                                            set.multis[kk], true);
    }
  });
  double worst = 0.0;
  for (std::size_t row = 0; row < sz; ++row)
    for (std::size_t col = 0; col < sz; ++col) {
      double v = 0.0;
      for (std::size_t q = 0; q < sz; ++q) v += B[row][q] * set.inverse[q][col];
      worst = std::max(worst, std::abs(v - (row == col ? 1.0 : 0.0)));
    }
  set.max_kronecker_defect = worst;
  return set;
}

double eval_V_derivative(const AdjustmentSet& set, std::size_t p_index, const std::array<int, 5>& m,
                         const std::array<double, 5>& x, double t, const std::array<int, 5>& k) {
  const std::size_t M = set.multis.size();
  std::size_t mi = M;
  for (std::size_t q = 0; q < M; ++q)
    if (set.multis[q] == m) {
      mi = q;
      break;
    }
  if (mi == M) throw std::invalid_argument("eval_V_derivative: m not in the admissible set");
  const std::size_t col = p_index * M + mi;
  const bool concentrated = std::exp(-set.d * set.d / (8.0 * t)) < 1e-10;
  double v = 0.0;
  for (std::size_t q = 0; q < set.inverse.size(); ++q) {
    const std::size_t pq = q / M, mq = q % M;
    if (set.inverse[q][col] == 0.0) continue;
    v += set.inverse[q][col] *
         evolved_bump_derivative(set.points[pq], set.multis[mq], set.d, x, t, k, !concentrated);
  }
  return v;
}

double eval_V(const AdjustmentSet& set, std::size_t p_index, const std::array<int, 5>& m,
              const std::array<double, 5>& x, double t) {
  return eval_V_derivative(set, p_index, m, x, t, {0, 0, 0, 0, 0});
}

}  // namespace bbl::adjust
