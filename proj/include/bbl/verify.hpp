#pragma once

#include <string>
#include <vector>

// Invariant batteries behind `verify <suite>`: each row is one named check
// with its measured residual and tolerance.
namespace bbl::verify {

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// suites: profiles | caloric | spectral | kernels | ansatz
std::vector<CheckRow> run_suite(const std::string& suite, double tol_scale = 1.0);
bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace bbl::verify
