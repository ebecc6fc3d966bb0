#include "exlat/return_prob.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "exlat/errors.hpp"
#include "exlat/rng.hpp"
#include "metropolis.hpp"
#include "parallel.hpp"

namespace exlat {
namespace {

constexpr double kBottomCutoff = 1e-12;
constexpr double kZ95 = 1.959963984540054;

struct BatchSums {
  double sum = 0.0;
  double sum2 = 0.0;
  std::uint64_t count = 0;
};

}  // namespace

ReturnEstimate estimate_return(const Dispersion& disp, std::uint64_t n_samples,
                               std::uint64_t seed, const ReturnOptions& options) {
  if (options.n_chains < 1 || options.batches_per_chain < 2)
    throw std::invalid_argument("need at least one chain and two batches per chain");
  const auto chains = static_cast<std::uint64_t>(options.n_chains);
  if (n_samples <= options.burn_in * chains)
    throw std::invalid_argument("n_samples must exceed burn_in * n_chains");
  const std::uint64_t steps = (n_samples - options.burn_in * chains) / chains;
  const auto per_chain = static_cast<std::uint64_t>(options.batches_per_chain);
  if (steps < per_chain) throw std::invalid_argument("too few samples for the batch count");

  const double eps_min = -static_cast<double>(disp.tau());
  auto weight = [eps_min](double e) {
    const double gap = e - eps_min;
    if (gap <= kBottomCutoff) return 0.0;
    const double w = 1.0 / gap;
    if (!std::isfinite(w)) throw InternalError("non-finite weight at energy " + std::to_string(e));
    return w;
  };

  std::vector<std::vector<BatchSums>> results(chains);
  const detail::ProposalScales scales{options.min_step, options.max_step};
  const int threads = options.threads > 0 ? options.threads : options.n_chains;
  detail::parallel_for(chains, threads, [&](std::size_t c) {
    auto rng = stream_rng(seed, c);
    std::vector<BatchSums> batches(per_chain);
    const std::uint64_t batch_len = steps / per_chain;
    std::uint64_t step = 0;
    detail::run_chain(disp, weight, scales, rng, options.burn_in, steps, [&](double e, double) {
      auto& b = batches[std::min<std::uint64_t>(step / batch_len, per_chain - 1)];
      b.sum += e;
      b.sum2 += e * e;
      ++b.count;
      ++step;
    });
    results[c] = std::move(batches);
  });

  double sum = 0.0, sum2 = 0.0;
  std::uint64_t n = 0;
  std::vector<double> means;
  for (const auto& batches : results)
    for (const auto& b : batches) {
      sum += b.sum;
      sum2 += b.sum2;
      n += b.count;
      means.push_back(b.sum / static_cast<double>(b.count));
    }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double nb = static_cast<double>(means.size());
  const double var_of_mean = ss / (nb - 1.0) / nb;

  ReturnEstimate out;
  out.n = n;
  out.P = mean / eps_min;
  out.stderr_ = std::sqrt(var_of_mean) / std::fabs(eps_min);
  out.ci_lo = out.P - kZ95 * out.stderr_;
  out.ci_hi = out.P + kZ95 * out.stderr_;
  const double var = sum2 / static_cast<double>(n) - mean * mean;
  out.ess = var_of_mean > 0.0 ? var / var_of_mean : static_cast<double>(n);
  if (!(out.P > 0.0 && out.P < 1.0))
    throw DomainError("return probability estimate " + std::to_string(out.P) +
                      " is outside (0, 1); increase the sample count");
  return out;
}

double watson_a3() {
  const double g = std::tgamma(1.0 / 3.0);
  return 1.0 - 16.0 * std::cbrt(4.0) * std::pow(std::numbers::pi, 4) / (9.0 * std::pow(g, 6));
}

}  // namespace exlat
