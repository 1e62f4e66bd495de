#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbl/kernels.hpp"
#include "bbl/par.hpp"
#include "bbl/profiles.hpp"
#include "bbl/quad.hpp"

// Duhamel fixed point for the inner linear problem on a small axisymmetric
// grid. Kernel applications are separable (tangential x normal matrices), so
// one propagation is two dense N^3 contractions.
namespace bbl::kernels {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct StepOp {
  std::vector<double> tan;  // nr x nr, includes trapezoid weights and rho^3
  std::vector<double> nrm;  // nz x nz, half-line with reflection
  int nr = 0, nz = 0;
};

StepOp make_op(int nr, int nz, double hr, double hz, double tau) {
  StepOp op;
  op.nr = nr;
  op.nz = nz;
  op.tan.assign(static_cast<std::size_t>(nr) * nr, 0.0);
  op.nrm.assign(static_cast<std::size_t>(nz) * nz, 0.0);
  const double pref_t = std::pow(4.0 * kPi * tau, -2.0);
  const double pref_n = std::pow(4.0 * kPi * tau, -0.5);
  par::for_each(nr, [&](std::size_t i) {
    const double r = i * hr;
    for (int k = 0; k < nr; ++k) {
      const double rho = k * hr;
      const double wq = (k == 0 || k == nr - 1) ? 0.5 * hr : hr;
      const double d = r - rho;
      op.tan[i * nr + k] = pref_t * std::exp(-d * d / (4.0 * tau)) *
                           angular_S3(r * rho / (2.0 * tau)) * rho * rho * rho * wq;
    }
  });
  for (int j = 0; j < nz; ++j) {
    const double z = j * hz;
    for (int k = 0; k < nz; ++k) {
      const double zeta = k * hz;
      const double wq = (k == 0 || k == nz - 1) ? 0.5 * hz : hz;
      const double dm = z - zeta, dp = z + zeta;
      op.nrm[static_cast<std::size_t>(j) * nz + k] =
          pref_n * (std::exp(-dm * dm / (4.0 * tau)) + std::exp(-dp * dp / (4.0 * tau))) * wq;
    }
  }
  return op;
}

// out = Tan * field * Nrm^T   (field row-major nr x nz)
void apply_op(const StepOp& op, const std::vector<double>& in, std::vector<double>& out,
              std::vector<double>& scratch) {
  const int nr = op.nr, nz = op.nz;
  scratch.assign(static_cast<std::size_t>(nr) * nz, 0.0);
  par::for_each(nr, [&](std::size_t i) {
    for (int k = 0; k < nr; ++k) {
      const double t = op.tan[i * nr + k];
      if (t == 0.0) continue;
      const double* row = &in[static_cast<std::size_t>(k) * nz];
      double* dst = &scratch[i * nz];
      for (int j = 0; j < nz; ++j) dst[j] += t * row[j];
    }
  });
  out.assign(static_cast<std::size_t>(nr) * nz, 0.0);
  par::for_each(nr, [&](std::size_t i) {
    for (int j = 0; j < nz; ++j) {
      double s = 0.0;
      const double* row = &scratch[i * nz];
      const double* nr_row = &op.nrm[static_cast<std::size_t>(j) * nz];
      for (int k = 0; k < nz; ++k) s += nr_row[k] * row[k];
      out[i * nz + j] = s;
    }
  });
}

// tangential-only application to a boundary vector
void apply_tan(const StepOp& op, const std::vector<double>& b, std::vector<double>& out) {
  const int nr = op.nr;
  out.assign(nr, 0.0);
  for (int i = 0; i < nr; ++i) {
    double s = 0.0;
    for (int k = 0; k < nr; ++k) s += op.tan[static_cast<std::size_t>(i) * nr + k] * b[k];
    out[i] = s;
  }
}

}  // namespace

PicardResult picard_inner(const std::function<double(double, double, double)>& g,
                          const std::function<double(double, double)>& h, const PicardGrid& grid,
                          double tau0, double tau1, int iterations, double stop_gap) {
  const int nr = grid.nr, nz = grid.nz, nt = grid.nt;
  if (nr > 64 || nz > 64) throw std::invalid_argument("picard_inner: grid capped at 64^2");
  if (!(tau1 > tau0)) throw std::invalid_argument("picard_inner: tau1 > tau0 required");
  const double hr = grid.L / (nr - 1), hz = grid.L / (nz - 1);
  const double dtau = (tau1 - tau0) / nt;
  const double hmax = std::max(hr, hz);
  if (dtau < 0.4 * hmax * hmax)
    throw std::invalid_argument("picard_inner: macro step under-resolves the kernel (enlarge dtau or grid)");

  // potential on the boundary row: (n/(n-2)) U^{2/(n-2)}(r,0), n=5
  std::vector<double> V(nr);
  for (int i = 0; i < nr; ++i) V[i] = 5.0 / (1.0 + (i * hr) * (i * hr));

  const StepOp full = make_op(nr, nz, hr, hz, dtau);

  // boundary-source sub-step quadrature: u-substitution sigma = tau_end - u^2
  const auto urule = quad::mapped_gl(6, 0.0, std::sqrt(dtau));
  std::vector<StepOp> uops;
  std::vector<bool> u_resolved;
  for (std::size_t q = 0; q < urule.x.size(); ++q) {
    const double tau = urule.x[q] * urule.x[q];
    const bool ok = tau >= 0.4 * hr * hr;
    u_resolved.push_back(ok);
    uops.push_back(ok ? make_op(nr, nz, hr, hz, tau) : StepOp{});
  }

  const std::size_t sz = static_cast<std::size_t>(nr) * nz;
  auto sample_interior = [&](double tau, std::vector<double>& out) {
    out.resize(sz);
    par::for_each(nr, [&](std::size_t i) {
      for (int j = 0; j < nz; ++j) out[i * nz + j] = g ? g(i * hr, j * hz, tau) : 0.0;
    });
  };

  PicardResult res;
  res.history.assign(nt + 1, std::vector<double>(sz, 0.0));
  std::vector<std::vector<double>> prev = res.history;

  std::vector<double> scratch, tmp, acc, tanbuf;
  int grow_streak = 0;
  double last_gap = -1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<std::vector<double>> cur(nt + 1, std::vector<double>(sz, 0.0));
    for (int m = 0; m < nt; ++m) {
      const double t_beg = tau0 + m * dtau, t_end = t_beg + dtau;
      // semigroup propagation of the accumulated field
      apply_op(full, cur[m], cur[m + 1], scratch);
      // interior source, trapezoid across the step: dtau/2 [K(dtau) g(t_beg) + g(t_end)]
      if (g) {
        sample_interior(t_beg, tmp);
        apply_op(full, tmp, acc, scratch);
        sample_interior(t_end, tmp);
        for (std::size_t idx = 0; idx < sz; ++idx)
          cur[m + 1][idx] += 0.5 * dtau * (acc[idx] + tmp[idx]);
      }
      // boundary source V*phi_prev + h over the step
      std::vector<double> bsrc(nr);
      for (std::size_t q = 0; q < urule.x.size(); ++q) {
        const double u = urule.x[q];
        const double sig = t_end - u * u;
        // linear interpolation of the previous iterate's boundary trace at sig
        const double pos = (sig - tau0) / dtau;
        const int m0 = std::min(nt - 1, std::max(0, static_cast<int>(pos)));
        const double fr = std::min(1.0, std::max(0.0, pos - m0));
        for (int i = 0; i < nr; ++i) {
          const double tr = (1.0 - fr) * prev[m0][static_cast<std::size_t>(i) * nz] +
                            fr * prev[m0 + 1][static_cast<std::size_t>(i) * nz];
          bsrc[i] = V[i] * tr + (h ? h(i * hr, sig) : 0.0);
        }
        if (u_resolved[q])
          apply_tan(uops[q], bsrc, tanbuf);
        else
          tanbuf = bsrc;  // kernel narrower than the grid: acts as identity
        const double wq = urule.w[q] * 2.0 * u;
        const double tau = u * u;
        for (int i = 0; i < nr; ++i) {
          const double col = tanbuf[i] * wq;
          if (col == 0.0) continue;
          for (int j = 0; j < nz; ++j) {
            const double z = j * hz;
            const double nrmf = (tau > 0.0)
                                    ? std::pow(4.0 * kPi * tau, -0.5) * 2.0 * std::exp(-z * z / (4.0 * tau))
                                    : 0.0;
            cur[m + 1][static_cast<std::size_t>(i) * nz + j] += col * nrmf;
          }
        }
      }
    }
    double gap = 0.0;
    for (int m = 0; m <= nt; ++m)
      for (std::size_t idx = 0; idx < sz; ++idx)
        gap = std::max(gap, std::abs(cur[m][idx] - prev[m][idx]));
    res.gaps.push_back(gap);
    prev = std::move(cur);
    res.iterations = it + 1;
    if (gap < stop_gap) {
      res.converged = true;
      break;
    }
    if (last_gap >= 0.0 && gap > last_gap) {
      if (++grow_streak >= 3)
        throw std::runtime_error("picard_inner: iteration gap growing (non-contraction on this grid)");
    } else {
      grow_streak = 0;
    }
    last_gap = gap;
  }
  res.history = std::move(prev);
  return res;
}

}  // namespace bbl::kernels
