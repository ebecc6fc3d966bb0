#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "exlat/dispersion.hpp"
#include "exlat/rng.hpp"

namespace exlat::detail {

struct ProposalScales {
  double min_step = 1e-5;
  double max_step = 0.5;
};

// One Metropolis-Hastings chain over the Brillouin zone with stationary
// density proportional to weight(eps(u)). Proposals are isotropic in
// fractional coordinates with a log-uniform step length. observe(eps, w) is
// called once per step after burn-in with the current state.
//
// A proposal whose weight is not positive is rejected. Without a start point
// the chain starts at a uniform random point of positive weight.
template <class WeightFn, class Observer>
void run_chain(const Dispersion& disp, WeightFn&& weight, const ProposalScales& scales,
               std::mt19937_64& rng, std::uint64_t burn_in, std::uint64_t steps,
               Observer&& observe, const std::vector<double>* start = nullptr) {
  const auto d = static_cast<std::size_t>(disp.rank());
  EnergyKernel kernel(disp);
  std::vector<double> u(d), trial(d), dir(d);
  std::normal_distribution<double> normal;

  double e = 0.0, w = 0.0;
  if (start) {
    u = *start;
    e = kernel(u);
    w = weight(e);
    if (!(w > 0.0)) throw std::invalid_argument("chain start has zero weight");
  }
  while (!(w > 0.0)) {
    for (auto& x : u) x = uniform01(rng);
    e = kernel(u);
    w = weight(e);
  }

  const double log_min = std::log(scales.min_step);
  const double log_span = std::log(scales.max_step / scales.min_step);
  const std::uint64_t total = burn_in + steps;
  for (std::uint64_t step = 0; step < total; ++step) {
    double norm2 = 0.0;
    for (auto& x : dir) {
      x = normal(rng);
      norm2 += x * x;
    }
    const double len = std::exp(log_min + log_span * uniform01(rng)) / std::sqrt(norm2);
    for (std::size_t i = 0; i < d; ++i) trial[i] = wrap_unit(u[i] + len * dir[i]);
    const double e_new = kernel(trial);
    const double w_new = weight(e_new);
    if (w_new > 0.0 && (w_new >= w || uniform01(rng) * w < w_new)) {
      u.swap(trial);
      e = e_new;
      w = w_new;
    }
    if (step >= burn_in) observe(e, w);
  }
}

}  // namespace exlat::detail
