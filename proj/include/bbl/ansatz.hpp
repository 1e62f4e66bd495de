#pragma once

#include <array>
#include <functional>
#include <vector>

#include "bbl/core.hpp"

// Multi-bubble approximate solution, its error operators E_1/E_2, the
// inner/outer gluing sources, pointwise bound-shape checks, and the weighted
// norms of the inner/outer function spaces. Anchors sit on a common
// tangential axis; evaluation points carry a signed axis coordinate x1 and
// the normal coordinate xn (all profiles are radial about axis points).
namespace bbl::ansatz {

struct BubbleSpec {
  double anchor = 0.0;  // signed position of q^{[i]} on the tangential axis
  int l = 0;            // caloric order
};

struct AnsatzConfig {
  std::vector<BubbleSpec> bubbles;
  double T = 0.01;
  double delta = 1.0 / 32.0;  // min anchor separation / 32 (explicit for one bubble)
  double R = 0.0;             // inner cutoff scale; 0 = |ln T|
  int n = 5;

  double cutoff_R() const;
  void validate() const;  // distinct anchors, delta consistency
};

// modulation state of one bubble at time t
struct ModState {
  double mu = 1.0;
  double mu_dot = 0.0;
  double xi = 0.0;      // signed axis position of the center
  double xi_dot = 0.0;
};
using ModPath = std::function<ModState(std::size_t bubble, double t)>;

// default path: mu = mu_{i,0}(t) for the given A_R, xi = anchor
ModPath bare_path(const AnsatzConfig& cfg, double A_R);

// u(x,t): sum of cutoff bubbles + caloric terms (+ rescaled phi, + psi)
double eval_ansatz(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                   const std::function<double(std::size_t, double, double, double)>& phi = nullptr,
                   const std::function<double(double, double, double)>& psi = nullptr);

// evaluation with a transverse offset (used by the FD cross-checks)
double eval_ansatz_transverse(const AnsatzConfig& cfg, double x1, double xperp, double xn, double t,
                              const ModPath& path);

// E_1[u] = -d_t u + Delta u from the expanded closed forms (bare path)
double error_E1(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path);
// same quantity by central differences of eval_ansatz
double error_E1_fd(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                   double fd_step);

// E_2[u] = d_xn u + |u|^{2/(n-2)} u on the boundary: direct and expanded forms
double error_E2_direct(const AnsatzConfig& cfg, double x1, double t, const ModPath& path,
                       const std::function<double(double, double, double)>& psi = nullptr,
                       double psi_xn_deriv = 0.0);
double error_E2_expanded(const AnsatzConfig& cfg, double x1, double t, const ModPath& path,
                         const std::function<double(double, double, double)>& psi = nullptr,
                         double psi_xn_deriv = 0.0);

// inner sources of bubble i at inner point y (signed tangential y1)
struct InnerSources {
  double H1 = 0.0;
  double H2 = 0.0;
};
InnerSources inner_sources(const AnsatzConfig& cfg, std::size_t i, double y1, double yn, double t,
                           const ModPath& path,
                           const std::function<double(double, double, double)>& psi = nullptr);

// outer sources at x (G2 on the boundary), bare phi
struct OuterSources {
  double G1 = 0.0;
  double G2 = 0.0;
};
OuterSources outer_sources(const AnsatzConfig& cfg, double x1, double xn, double t, const ModPath& path,
                           const std::function<double(double, double, double)>& psi = nullptr);

// split pieces: G_{1,i}, G_{2,i} and the far remainder G_{2,o+1}
double outer_G1i(const AnsatzConfig& cfg, std::size_t i, double x1, double xn, double t,
                 const ModPath& path);
double outer_G2i(const AnsatzConfig& cfg, std::size_t i, double x1, double t, const ModPath& path,
                 const std::function<double(double, double, double)>& psi = nullptr);
double outer_G2_rest(const AnsatzConfig& cfg, double x1, double t,
                     const std::function<double(double, double, double)>& psi = nullptr);

// pointwise |G_{1,i}|, |G_{2,i}| divided by their lemma bound shapes:
// sup ratios over a sample sweep of the window [t_lo, t_hi]
struct ShapeRatios {
  double sup_G1 = 0.0;
  double sup_G2 = 0.0;
};
ShapeRatios residual_shape_check(const AnsatzConfig& cfg, std::size_t i, double t_lo, double t_hi,
                                 std::size_t samples_per_decade, const ModPath& path);

// weighted norms of the inner/outer spaces (discrete sup over samples)
struct NormSample {
  double x1 = 0.0, xn = 0.0, t = 0.0;  // physical point for norm_X, inner y for norm_in
  double value = 0.0;
  double grad = 0.0;  // gradient magnitude; 0 if absent
};
double norm_in(const std::vector<NormSample>& samples, int l, double R, double T);
double norm_X(const std::vector<NormSample>& samples, const AnsatzConfig& cfg);

}  // namespace bbl::ansatz
