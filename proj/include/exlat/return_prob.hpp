#pragma once

// Probability that a simple random walk on the lattice ever returns to its
// starting point, P = 1 - 1 / (tau int rho(eps) / (eps + tau) deps).

#include <cstdint>

#include "exlat/dispersion.hpp"

namespace exlat {

struct ReturnEstimate {
  double P = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;  // production samples over all chains
  double ess = 0.0;
};

struct ReturnOptions {
  int n_chains = 4;
  std::uint64_t burn_in = 10'000;  // per chain
  int batches_per_chain = 200;
  double min_step = 1e-5;
  double max_step = 0.5;
  int threads = 0;  // 0 means one per chain
};

/// Metropolis-Hastings with stationary weight 1 / (eps - eps_min). Under this
/// weight the chain average of eps equals eps_min * P, so P = mean / eps_min.
/// Proposals within 1e-12 of eps_min are rejected. The interval is
/// P +- 1.96 standard errors from batch means. `n_samples` counts every
/// energy evaluation including burn-in.
ReturnEstimate estimate_return(const Dispersion& disp, std::uint64_t n_samples,
                               std::uint64_t seed, const ReturnOptions& options = {});

/// 1 - 16 4^(1/3) pi^4 / (9 Gamma(1/3)^6), the exact value for the
/// face-centred cubic lattice A_3.
double watson_a3();

}  // namespace exlat
