#include "bbl/eigensolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

#include "bbl/par.hpp"
#include "bbl/quad.hpp"

namespace bbl::eig {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Discretization {
  std::vector<double> r, xn;          // interior nodes (Dirichlet node dropped)
  std::vector<double> vr, vxn;        // dual-cell weights: int r^3 dr, int dxn
  SpMat A;                            // stiffness - boundary potential
  Vec D;                              // lumped mass diagonal
  int nr = 0, nz = 0;
};

std::vector<double> sinh_nodes(int n, double radius, double grading) {
  std::vector<double> x(n + 1);
  const double sg = std::sinh(grading);
  for (int i = 0; i <= n; ++i) x[i] = radius * std::sinh(grading * i / n) / sg;
  return x;
}

Discretization assemble(int n, const EigenGridSpec& spec) {
  Discretization d;
  auto nodes = sinh_nodes(spec.nodes, spec.radius, spec.grading);
  // unknowns 0..N-1; node N carries the Dirichlet condition
  const int N = spec.nodes;
  d.r.assign(nodes.begin(), nodes.end() - 1);
  d.xn = d.r;
  d.nr = N;
  d.nz = N;
  const double pw = n - 2.0;  // r^{n-2} weight

  auto face = [&](int i) { return 0.5 * (nodes[i] + nodes[i + 1]); };
  std::vector<double> fr(N + 1);  // face positions: fr[0]=0, fr[i]=midpoints, fr[N]=radius
  fr[0] = 0.0;
  for (int i = 1; i <= N - 1; ++i) fr[i] = face(i - 1);
  fr[N] = spec.radius;
  d.vr.resize(N);
  d.vxn.resize(N);
  for (int i = 0; i < N; ++i) {
    d.vr[i] = (std::pow(fr[i + 1], pw + 1.0) - std::pow(fr[i], pw + 1.0)) / (pw + 1.0);
    d.vxn[i] = fr[i + 1] - fr[i];
  }
  // face conductances
  std::vector<double> cr(N), cz(N);  // between i and i+1 (i = N-1: to the Dirichlet node)
  for (int i = 0; i < N; ++i) {
    const double dr = nodes[i + 1] - nodes[i];
    cr[i] = std::pow(fr[i + 1], pw) / dr;
    cz[i] = 1.0 / dr;
  }

  const auto idx = [&](int i, int j) { return i * N + j; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(N) * N * 5);
  d.D.resize(static_cast<Eigen::Index>(N) * N);
  const double p = n / (n - 2.0);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double diag = 0.0;
      // horizontal faces (r direction), weight vxn[j]
      if (i + 1 < N) {
        const double c = cr[i + 1 - 1] * d.vxn[j];  // face between i,i+1 is fr[i+1]
        trip.emplace_back(idx(i, j), idx(i + 1, j), -c);
        diag += c;
      } else {
        diag += cr[N - 1] * d.vxn[j];  // Dirichlet neighbor at the far radius
      }
      if (i > 0) {
        const double c = cr[i - 1 + 1 - 1] * d.vxn[j];  // face fr[i]
        trip.emplace_back(idx(i, j), idx(i - 1, j), -c);
        diag += c;
      }
      // vertical faces (xn direction), weight vr[i]
      if (j + 1 < N) {
        const double c = cz[j] * d.vr[i];
        trip.emplace_back(idx(i, j), idx(i, j + 1), -c);
        diag += c;
      } else {
        diag += cz[N - 1] * d.vr[i];
      }
      if (j > 0) {
        const double c = cz[j - 1] * d.vr[i];
        trip.emplace_back(idx(i, j), idx(i, j - 1), -c);
        diag += c;
      }
      // boundary potential on xn = 0 (flux condition -d_xn f = p U^{p-1} f)
      if (j == 0) {
        const double U = eval_U(CylPoint(d.r[i], 0.0, n));
        diag -= p * std::pow(U, p - 1.0) * d.vr[i];
      }
      trip.emplace_back(idx(i, j), idx(i, j), diag);
      d.D[idx(i, j)] = d.vr[i] * d.vxn[j];
    }
  }
  d.A.resize(static_cast<Eigen::Index>(N) * N, static_cast<Eigen::Index>(N) * N);
  d.A.setFromTriplets(trip.begin(), trip.end());
  return d;
}

// number of eigenvalues of (A, D) strictly below sigma, by LDLT inertia
int inertia_below(const Discretization& d, double sigma, Eigen::SimplicialLDLT<SpMat>* keep = nullptr) {
  SpMat M = d.A;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      if (it.row() == it.col()) it.valueRef() -= sigma * d.D[it.row()];
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SimplicialLDLT<SpMat>& solver = keep ? *keep : ldlt;
  solver.compute(M);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver: LDLT failed");
  const auto& vd = solver.vectorD();
  int neg = 0;
  for (Eigen::Index i = 0; i < vd.size(); ++i)
    if (vd[i] < 0.0) ++neg;
  return neg;
}

// bisection for the k-th eigenvalue (0-based) in (lo, hi)
double bisect_eig(const Discretization& d, int k, double lo, double hi, double tol_width) {
  while (hi - lo > tol_width) {
    const double mid = 0.5 * (lo + hi);
    if (inertia_below(d, mid) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EigenResult solve_lambda0(int n, const EigenGridSpec& spec, const Tolerances& tol) {
  if (n < 3) throw std::invalid_argument("solve_lambda0: n >= 3 required");
  Discretization d = assemble(n, spec);

  const int neg = inertia_below(d, 0.0);
  if (neg != 1)
    throw std::runtime_error("solve_lambda0: discrete problem has " + std::to_string(neg) +
                             " negative eigenvalues (discretization failure)");
  double lo = -1.0;
  while (inertia_below(d, lo) > 0) lo *= 2.0;
  if (lo < -64.0) throw std::runtime_error("solve_lambda0: spectrum unexpectedly low");

  const double l0_apx = bisect_eig(d, 0, lo, 0.0, 1e-3);
  const double l1_apx = bisect_eig(d, 1, 0.0, 8.0, 1e-3);

  // shift-inverted iteration at a shift just below lambda0
  const double sigma = l0_apx - 0.05;
  Eigen::SimplicialLDLT<SpMat> solver;
  inertia_below(d, sigma, &solver);
  const Eigen::Index sz = d.D.size();
  Vec v = Vec::Ones(sz);
  double lambda = l0_apx;
  for (int it = 0; it < 200; ++it) {
    Vec rhs = d.D.asDiagonal() * v;
    Vec w = solver.solve(rhs);
    const double nrm = std::sqrt((w.array().square() * d.D.array()).sum());
    w /= nrm;
    // Rayleigh quotient
    const double num = w.dot(d.A * w);
    const double den = (w.array().square() * d.D.array()).sum();
    const double lam = num / den;
    const bool done = std::abs(lam - lambda) < tol.eig_tol * std::max(1.0, std::abs(lam));
    lambda = lam;
    v = w;
    if (done && it >= 3) break;
  }

  EigenResult res;
  res.lambda0 = lambda;
  res.gap = l1_apx - lambda;
  res.r = d.r;
  res.xn = d.xn;
  res.cell_r = d.vr;
  res.cell_xn = d.vxn;
  // sign-normalize positive, L2-normalize including the angular measure
  double mass = 0.0;
  for (Eigen::Index i = 0; i < sz; ++i) mass += v[i] * d.D[i];
  if (mass < 0.0) v = -v;
  const double ang = sphere_area(n - 1);
  const double l2 = std::sqrt(ang * (v.array().square() * d.D.array()).sum());
  res.field.resize(sz);
  for (Eigen::Index i = 0; i < sz; ++i) res.field[i] = v[i] / l2;
  return res;
}

double decay_fit(const std::vector<double>& dist, const std::vector<double>& vals) {
  // least squares slope of log(vals) against dist; returns the decay rate
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!(vals[i] > 0.0)) continue;
    const double y = std::log(vals[i]);
    sx += dist[i];
    sy += y;
    sxx += dist[i] * dist[i];
    sxy += dist[i] * y;
    ++m;
  }
  if (m < 4) throw std::runtime_error("decay_fit: insufficient dynamic range");
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

double decay_check(EigenResult& res, double nu_fraction) {
  const double R = res.r.back();
  const double lo = 0.2 * R, hi = 0.55 * R;
  double worst = 1e300;
  // boundary ray, vertical ray, diagonal
  for (int ray = 0; ray < 3; ++ray) {
    std::vector<double> dist, vals;
    const std::size_t nz = res.xn.size();
    for (std::size_t i = 0; i < res.r.size(); ++i) {
      double dd, vv;
      if (ray == 0) {
        dd = res.r[i];
        vv = res.field[i * nz + 0];
      } else if (ray == 1) {
        dd = res.xn[i];
        vv = res.field[0 * nz + i];
      } else {
        dd = std::sqrt(res.r[i] * res.r[i] + res.xn[i] * res.xn[i]);
        vv = res.field[i * nz + i];
      }
      if (dd >= lo && dd <= hi && vv > 0.0) {
        dist.push_back(dd);
        vals.push_back(vv);
      }
    }
    worst = std::min(worst, decay_fit(dist, vals));
  }
  res.decay_rate = worst;
  (void)nu_fraction;
  return worst;
}

TracePair trace_rho_check(const std::function<double(double, double)>& u,
                          const std::function<double(double, double)>& ur,
                          const std::function<double(double, double)>& uxn, int n) {
  TracePair out;
  const double ang = sphere_area(n - 1);
  // Gaussian weight makes [0, 14]^2 numerically exhaustive
  auto brk = quad::geometric_breaks(0.0, 0.5, 14.0, 1.4);
  auto rho = [](double q2) { return std::exp(-q2 / 4.0); };
  out.lhs = ang * quad::panels(
                      [&](double r) {
                        const double v = u(r, 0.0);
                        return std::pow(r, n - 2.0) * v * v * rho(r * r);
                      },
                      brk, 20);
  double h1 = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    auto rr = quad::mapped_gl(20, brk[i], brk[i + 1]);
    for (std::size_t a = 0; a < rr.x.size(); ++a) {
      double inner = 0.0;
      for (std::size_t j = 0; j + 1 < brk.size(); ++j) {
        auto zz = quad::mapped_gl(20, brk[j], brk[j + 1]);
        for (std::size_t b = 0; b < zz.x.size(); ++b) {
          const double r = rr.x[a], z = zz.x[b];
          const double g1 = ur(r, z), g2 = uxn(r, z), v = u(r, z);
          inner += zz.w[b] * (g1 * g1 + g2 * g2 + v * v) * rho(r * r + z * z);
        }
      }
      h1 += rr.w[a] * std::pow(rr.x[a], n - 2.0) * inner;
    }
  }
  out.rhs = 0.25 * (n + 4.0) * ang * h1;
  return out;
}

EscobarResult escobar_check(int n) {
  EscobarResult out;
  QuadratureGrid grid = QuadratureGrid::build(60.0, 60.0, 16, true, n);
  CylField Uf = sample_U(grid);
  out.Q_of_U = rayleigh_Q(Uf);
  out.sharp_constant = 0.5 * (n - 2.0) * std::pow(sphere_area(n), 1.0 / (n - 1.0));
  out.rel_gap = std::abs(out.Q_of_U - out.sharp_constant) / out.sharp_constant;
  return out;
}

}  // namespace bbl::eig
