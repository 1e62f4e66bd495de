#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bbl/core.hpp"

// Caloric functions Theta_l built from modified Laguerre polynomials, the
// Hermite eigenbasis of A_z = Delta - z/2 . grad on the half-space, the
// eigenvalue counting function, rho-weighted inner products, and the
// localized biorthogonal system e~_i.
namespace bbl::spectral {

// Exact rational arithmetic for polynomial coefficients (degree <= 16 keeps
// the integers small enough for int64 with 128-bit intermediates).
struct Rational {
  long long num = 0, den = 1;
  Rational() = default;
  Rational(long long n);  // NOLINT
  Rational(long long n, long long d);
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct LaguerrePoly {
  int l = 0;
  double nu = 0.0;
  std::vector<double> coeffs;           // monomial c_0..c_l
  std::vector<Rational> coeffs_exact;   // populated when 2*nu is an integer
};

struct HermiteTilde {
  int alpha = 0;
  std::vector<long long> coeffs;  // exact integer monomial coefficients
  double eval(double s) const;
  double eval_d1(double s) const;
  double eval_d2(double s) const;
};

// Modified Laguerre polynomial L_l^nu by symbolic Leibniz expansion of the
// Rodrigues form r^{-nu} e^r d^l/dr^l ( r^{nu+l} e^{-r} ).
LaguerrePoly laguerre_mod(int l, double nu);

// Theta_l(x,t) = -(T-t)^l (L_l(0))^{-1} L_l( |x|^2 / (4(T-t)) ), nu=(n-2)/2.
double theta(int l, const CylPoint& x, const TimeWindow& w);

// Exact-coefficient residuals of the heat equation and the Neumann condition
// for Theta_l, maximised over the given space-time samples.
struct ThetaResiduals {
  double interior_max = 0.0;
  double boundary_max = 0.0;
};
ThetaResiduals theta_heat_residual(int l, int n,
                                   const std::vector<std::pair<CylPoint, TimeWindow>>& samples);

// H~_alpha(s) = H_alpha(s/2) by the recurrence H~_{a+1} = s H~_a - 2a H~_{a-1}.
HermiteTilde hermite_tilde(int alpha);

// max over samples of | -A_z prod H~ - (|alpha|_1/2) prod H~ |.
double az_eigen_residual(const std::vector<int>& multi, const std::vector<std::vector<double>>& samples);

// N(C) = #{ alpha in N^n : |alpha|_1/2 <= C, alpha_n even }, with multiplicity.
std::uint64_t eig_count_neumann(double C, int n);

enum class Domain { Full, Half };

// (f,g)_rho with rho = e^{-|z|^2/4}; 1D polynomials, full line or half line.
double inner_rho(const std::vector<double>& f, const std::vector<double>& g, Domain dom);

struct EigenFunction {
  std::vector<int> multi;  // alpha
  double eigenvalue = 0.0; // |alpha|_1 / 2
  double norm = 0.0;       // rho-norm over the half space
};

struct LocalizedBasis {
  std::size_t count = 0;                       // N_max + 1
  double M = 0.0;                              // cutoff radius
  std::vector<std::vector<double>> mix;        // a_{il}, symmetric
  std::vector<EigenFunction> funcs;            // fixed ordering
  double max_biorth_defect = 0.0;              // independent-route check
  double gram_route_gap = 0.0;                 // two-route Gram agreement
};

// Neumann eigenfunctions of -A_z ordered by (eigenvalue, lex alpha); cutoff
// radius M found by doubling until the Gram matrix (e_i eta(./M), e_l)_rho is
// strictly diagonally dominant; mix = Gram^{-1}.
LocalizedBasis build_localized_basis(std::size_t N_max, int n, const Tolerances& tol);

// Canonical ascending-degree text form, e.g. "5/2 - 1 r" (for golden tests).
std::string poly_to_text(const std::vector<double>& coeffs, const std::string& var);

}  // namespace bbl::spectral
