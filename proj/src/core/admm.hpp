#pragma once

#include "core/errors.hpp"

namespace lrbsl {

// Shared penalty schedule: mu starts at mu0 and grows by gamma each
// iteration, capped at mu_max. Loops stop when the primal residual drops
// below eps or after k_max iterations.
struct AdmmConfig {
  double mu0 = 1e-3;
  double mu_max = 1e10;
  double gamma = 1.2;
  double eps = 1e-6;
  int k_max = 200;

  void validate() const {
    if (!(mu0 > 0.0)) throw ValidationError("admm: mu0 must be positive");
    if (!(mu_max >= mu0)) throw ValidationError("admm: mu_max must be >= mu0");
    if (!(gamma > 1.0)) throw ValidationError("admm: gamma must be > 1");
    if (!(eps > 0.0)) throw ValidationError("admm: eps must be positive");
    if (k_max < 1) throw ValidationError("admm: k_max must be >= 1");
  }
};

struct AdmmDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
  double objective = 0.0;
};

}  // namespace lrbsl
