#pragma once

#include "floquet/lattice.hpp"

#include <string>
#include <vector>

namespace floquet {

struct Tolerances {
  double quant = 0.1;
  double imag = 1e-6;
  double loop = 1e-8;
  double refinement = 1e-3;
};

struct IndexReport {
  std::string kind;
  cplx raw{0, 0};
  long integer = 0;
  double residual = 0;  // |Re raw - integer|
  double imag = 0;      // |Im raw|
  bool quantized = false;
  // metadata
  double window_r1 = 0;
  double window_r2 = 0;
  std::vector<int> switch_jumps;
  int quadrature = 0;
  int L = 0;
  std::vector<std::string> flags;
};

IndexReport make_report(std::string kind, cplx raw, const Tolerances& tol = {});

}  // namespace floquet
