#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bbl/core.hpp"

// Numerical checkers for the convolution-estimate lemmas: evaluate the
// left-hand convolution at randomized admissible points, divide by the stated
// right-hand bound, and report the supremum ratio.
namespace bbl::bounds {

enum class Family { BeyondNeumann, NeumannSelfsim, NeumannOutside, RhsSelfsim };

Family family_from_string(const std::string& s);
std::string family_name(Family f);

struct BoundFamily {
  Family id = Family::RhsSelfsim;
  // recognised keys: a, b, p1, p2, c1, c2, ell, kappa, C0, t0, eps
  std::map<std::string, double> params;
  double get(const std::string& k, double dflt) const {
    auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
  }
};

struct SampleRow {
  std::size_t index = 0;
  double x_r = 0.0, x_n = 0.0, t = 0.0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

struct BoundReport {
  double sup_ratio = 0.0;
  std::vector<SampleRow> rows;
};

// Randomized check with a fixed seed; range_scale widens the sampled t and
// |x| ranges (used by the x2-stability test), t0_scale scales t0.
BoundReport bound_ratio(const BoundFamily& fam, int n, std::size_t sample_count, std::uint64_t seed,
                        double range_scale = 1.0, double t0_scale = 1.0);

}  // namespace bbl::bounds
