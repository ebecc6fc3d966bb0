#include "exlat/dos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "exlat/errors.hpp"
#include "exlat/rng.hpp"
#include "exlat/van_hove.hpp"
#include "metropolis.hpp"
#include "parallel.hpp"

namespace exlat {
namespace {

constexpr std::uint64_t kPilotStream = 0x70696c6f74ULL;  // "pilot"
constexpr std::uint64_t kMinPilotCount = 100;
constexpr int kSmoothingWindow = 5;
constexpr double kRangeSlack = 1e-6;
constexpr double kTailWidth = 1.0;      // matches the log-spaced tail bins
constexpr std::size_t kEdgeStarts = 256;  // multistarts to locate a band maximum

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

int checked_index(const Binning& binning, double e) {
  if (e < binning.min() - kRangeSlack || e > binning.max() + kRangeSlack)
    throw DomainError("sampled energy " + std::to_string(e) + " lies outside [" +
                      std::to_string(binning.min()) + ", " + std::to_string(binning.max()) +
                      "]; the supplied eps_max is wrong");
  if (e <= binning.min()) return 0;
  if (e >= binning.max()) return binning.size() - 1;
  return binning.index(e);
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_chains < 1) throw std::invalid_argument("n_chains must be positive");
  if (n_samples <= burn_in * static_cast<std::uint64_t>(n_chains))
    throw std::invalid_argument("n_samples must exceed burn_in * n_chains");
  if (!(min_step > 0.0 && min_step <= max_step && max_step <= 0.5))
    throw std::invalid_argument("proposal scales must satisfy 0 < min_step <= max_step <= 0.5");
  if (bins < 1 || tail_bins < 2) throw std::invalid_argument("bin counts too small");
  if (batches_per_chain < 2) throw std::invalid_argument("need at least two batches per chain");
  if (!(edge_fraction >= 0.0 && edge_fraction < 0.8))
    throw std::invalid_argument("edge_fraction must lie in [0, 0.8)");
}

Binning::Binning(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("binning needs at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1]))
      throw std::invalid_argument("bin edges must be strictly increasing");
}

Binning Binning::standard(double eps_min, double eps_max, int uniform_bins, int tail_bins,
                          double tail_width, double innermost) {
  if (!(eps_max - eps_min > 2.0 * tail_width))
    throw std::invalid_argument("band too narrow for the tail binning");
  std::vector<double> gaps{0.0};
  const double log_lo = std::log(innermost);
  const double log_hi = std::log(tail_width);
  for (int k = 0; k < tail_bins; ++k)
    gaps.push_back(std::exp(log_lo + (log_hi - log_lo) * k / (tail_bins - 1)));
  gaps.back() = tail_width;

  std::vector<double> edges;
  for (double g : gaps) edges.push_back(eps_min + g);
  const double a = eps_min + tail_width;
  const double b = eps_max - tail_width;
  for (int k = 1; k < uniform_bins; ++k) edges.push_back(a + (b - a) * k / uniform_bins);
  for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) edges.push_back(eps_max - *it);
  return Binning(std::move(edges));
}

int Binning::index(double e) const {
  if (e < edges_.front() || e > edges_.back()) return -1;
  if (e == edges_.back()) return size() - 1;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), e);
  return static_cast<int>(it - edges_.begin()) - 1;
}

WeightFunction WeightFunction::uniform() { return WeightFunction{}; }

WeightFunction WeightFunction::tail_flattened(double eps_min, double eps_max, int rank,
                                              std::vector<double> knot_energy,
                                              std::vector<double> knot_log_weight) {
  if (knot_energy.size() != knot_log_weight.size() || knot_energy.empty())
    throw std::invalid_argument("weight knots must be non-empty and paired");
  if (!(knot_energy.front() > eps_min && knot_energy.back() < eps_max))
    throw std::invalid_argument("weight knots must lie strictly inside the band");
  WeightFunction w;
  w.eps_min_ = eps_min;
  w.eps_max_ = eps_max;
  w.exponent_ = 1.0 - 0.5 * rank;
  w.min_gap_ = 1e-14 * (eps_max - eps_min);
  w.knots_e_ = std::move(knot_energy);
  w.knots_logw_ = std::move(knot_log_weight);
  return w;
}

double WeightFunction::operator()(double e) const {
  if (knots_e_.empty()) return 1.0;
  if (e <= knots_e_.front()) {
    const double gap = std::max(e - eps_min_, min_gap_);
    return std::exp(knots_logw_.front() +
                    exponent_ * std::log(gap / (knots_e_.front() - eps_min_)));
  }
  if (e >= knots_e_.back()) {
    const double gap = std::max(eps_max_ - e, min_gap_);
    return std::exp(knots_logw_.back() +
                    exponent_ * std::log(gap / (eps_max_ - knots_e_.back())));
  }
  const auto i = static_cast<std::size_t>(
      std::upper_bound(knots_e_.begin(), knots_e_.end(), e) - knots_e_.begin() - 1);
  const double t = (e - knots_e_[i]) / (knots_e_[i + 1] - knots_e_[i]);
  return std::exp(knots_logw_[i] + t * (knots_logw_[i + 1] - knots_logw_[i]));
}

void DosAccumulator::add(int bin, double energy, double inv_weight) {
  bin_weight[static_cast<std::size_t>(bin)] += inv_weight;
  total_weight += inv_weight;
  weighted_energy += inv_weight * energy;
  weighted_energy2 += inv_weight * energy * energy;
  ++count;
}

void DosAccumulator::merge(const DosAccumulator& other) {
  if (other.bin_weight.size() != bin_weight.size())
    throw std::invalid_argument("cannot merge accumulators with different binnings");
  for (std::size_t b = 0; b < bin_weight.size(); ++b) bin_weight[b] += other.bin_weight[b];
  total_weight += other.total_weight;
  weighted_energy += other.weighted_energy;
  weighted_energy2 += other.weighted_energy2;
  count += other.count;
}

DosHistogram make_histogram(const Binning& binning, const DosAccumulator& total,
                            const std::vector<DosAccumulator>& batches) {
  if (!(total.total_weight > 0.0)) throw DomainError("histogram has no samples");
  const int nb = binning.size();
  DosHistogram h;
  h.binning = binning;
  h.total_samples = total.count;
  h.density.resize(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b)
    h.density[static_cast<std::size_t>(b)] =
        total.bin_weight[static_cast<std::size_t>(b)] / (total.total_weight * binning.width(b));

  std::vector<double> batch_mean_energy;
  for (const auto& acc : batches) {
    if (!(acc.total_weight > 0.0)) continue;
    std::vector<double> dens(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b)
      dens[static_cast<std::size_t>(b)] =
          acc.bin_weight[static_cast<std::size_t>(b)] / (acc.total_weight * binning.width(b));
    h.batch_density.push_back(std::move(dens));
    batch_mean_energy.push_back(acc.weighted_energy / acc.total_weight);
  }

  const double n_batches = static_cast<double>(h.batch_density.size());
  h.stderr_.assign(static_cast<std::size_t>(nb), 0.0);
  if (h.batch_density.size() >= 2) {
    std::vector<double> column(h.batch_density.size());
    for (int b = 0; b < nb; ++b) {
      for (std::size_t k = 0; k < h.batch_density.size(); ++k)
        column[k] = h.batch_density[k][static_cast<std::size_t>(b)];
      h.stderr_[static_cast<std::size_t>(b)] = sample_sd(column) / std::sqrt(n_batches);
    }
  }

  const double mean = total.weighted_energy / total.total_weight;
  const double var_rho = total.weighted_energy2 / total.total_weight - mean * mean;
  const double sd_batch = sample_sd(batch_mean_energy);
  const double var_of_mean = sd_batch * sd_batch / std::max(n_batches, 1.0);
  h.ess = var_of_mean > 0.0 ? var_rho / var_of_mean : static_cast<double>(total.count);
  return h;
}

namespace {

constexpr std::uint64_t kEdgeStream = 0x65646765ULL;  // "edge"

// Runs config.n_chains chains on random stream stream0 + c and bins the
// reweighted samples. `weight` may return 0 to confine the chains; it must be
// positive at every start point.
template <class WeightFn>
DosHistogram run_chains(const Dispersion& disp, const SamplerConfig& config, WeightFn&& weight,
                        const Binning& binning, std::uint64_t steps_per_chain,
                        std::uint64_t burn_in, std::uint64_t stream0,
                        const std::vector<std::vector<double>>& starts) {
  const auto chains = static_cast<std::size_t>(config.n_chains);
  const auto per_chain = static_cast<std::size_t>(config.batches_per_chain);
  if (steps_per_chain < per_chain)
    throw std::invalid_argument("too few steps per chain for the batch count");
  std::vector<std::vector<DosAccumulator>> chain_batches(chains);

  const detail::ProposalScales scales{config.min_step, config.max_step};
  const int threads = config.threads > 0 ? config.threads : config.n_chains;
  detail::parallel_for(chains, threads, [&](std::size_t c) {
    auto rng = stream_rng(config.seed, stream0 + c);
    std::vector<DosAccumulator> batches(per_chain, DosAccumulator(binning.size()));
    const std::uint64_t batch_len = steps_per_chain / per_chain;
    std::uint64_t step = 0;
    auto checked_weight = [&](double e) {
      checked_index(binning, e);
      const double w = weight(e);
      if (!(w >= 0.0) || !std::isfinite(w))
        throw InternalError("sampling weight is not positive and finite at energy " +
                            std::to_string(e));
      return w;
    };
    const std::vector<double>* start = starts.empty() ? nullptr : &starts[c % starts.size()];
    detail::run_chain(
        disp, checked_weight, scales, rng, burn_in, steps_per_chain,
        [&](double e, double w) {
          const auto k = std::min<std::uint64_t>(step / batch_len, per_chain - 1);
          batches[k].add(checked_index(binning, e), e, 1.0 / w);
          ++step;
        },
        start);
    chain_batches[c] = std::move(batches);
  });

  DosAccumulator total(binning.size());
  std::vector<DosAccumulator> all;
  for (auto& batches : chain_batches)
    for (auto& acc : batches) {
      total.merge(acc);
      all.push_back(std::move(acc));
    }
  return make_histogram(binning, total, all);
}

bool in_window(const Binning& binning, int b, bool lower, double width) {
  constexpr double kSlack = 1e-9;
  return lower ? binning.hi(b) <= binning.min() + width + kSlack
               : binning.lo(b) >= binning.max() - width - kSlack;
}

// A point about halfway into the tail window, found by walking out from the
// extremizer x along a random direction.
std::vector<double> window_start(const Dispersion& disp, const Eigen::VectorXd& x, double edge,
                                 double width, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd dir(x.size());
  for (int i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
  dir.normalize();
  auto gap = [&](double t) { return std::fabs(disp.energy(Eigen::VectorXd(x + t * dir)) - edge); };
  double lo = 0.0, hi = 1e-6;
  while (gap(hi) < 0.5 * width && hi < 0.5) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.5 * width ? lo : hi) = mid;
  }
  const Eigen::VectorXd u = x + lo * dir;
  std::vector<double> out(static_cast<std::size_t>(u.size()));
  for (int i = 0; i < u.size(); ++i) out[static_cast<std::size_t>(i)] = wrap_unit(u(i));
  return out;
}

}  // namespace

DosHistogram sample_dos(const Dispersion& disp, const SamplerConfig& config,
                        const WeightFunction& weight, const Binning& binning,
                        std::uint64_t steps_per_chain) {
  return run_chains(disp, config, weight, binning, steps_per_chain, config.burn_in, 0, {});
}

DosHistogram sample_edge(const Dispersion& disp, const SamplerConfig& config,
                         const WeightFunction& weight, const Binning& binning, bool lower,
                         double width, const std::vector<Eigen::VectorXd>& starts,
                         std::uint64_t steps_per_chain) {
  if (starts.empty()) throw std::invalid_argument("edge sampling needs a start point");
  const double edge = lower ? binning.min() : binning.max();
  auto rng = stream_rng(config.seed, kEdgeStream + (lower ? 0 : 1));
  std::vector<std::vector<double>> points;
  for (int c = 0; c < config.n_chains; ++c)
    points.push_back(window_start(disp, starts[static_cast<std::size_t>(c) % starts.size()],
                                  edge, width, rng));
  auto confined = [&](double e) {
    return std::fabs(e - edge) <= width ? weight(e) : 0.0;
  };
  // Starting inside the window shortens the transient.
  const std::uint64_t burn = std::min(config.burn_in, steps_per_chain / 10);
  const std::uint64_t stream0 = kEdgeStream + 16 + (lower ? 0 : 1024);
  return run_chains(disp, config, confined, binning, steps_per_chain, burn, stream0, points);
}

void splice_edge(DosHistogram& hist, const DosHistogram& edge, bool lower, double width) {
  const Binning& bins = hist.binning;
  std::vector<int> window;
  for (int b = 0; b < bins.size(); ++b)
    if (in_window(bins, b, lower, width)) window.push_back(b);
  auto window_mass = [&](const std::vector<double>& dens) {
    double m = 0.0;
    for (int b : window) m += dens[static_cast<std::size_t>(b)] * bins.width(b);
    return m;
  };
  const double mass = window_mass(hist.density);
  std::vector<double> batch_mass;
  for (auto& dens : hist.batch_density) {
    const double m = window_mass(dens);
    batch_mass.push_back(m);
    for (int b : window)
      dens[static_cast<std::size_t>(b)] = m * edge.density[static_cast<std::size_t>(b)];
  }
  const double mass_se =
      batch_mass.empty() ? 0.0 : sample_sd(batch_mass) / std::sqrt(static_cast<double>(batch_mass.size()));
  for (int b : window) {
    const auto i = static_cast<std::size_t>(b);
    hist.density[i] = mass * edge.density[i];
    hist.stderr_[i] = std::hypot(mass * edge.stderr_[i], mass_se * edge.density[i]);
  }
  hist.total_samples += edge.total_samples;
}

DosAccumulator sample_uniform(const Dispersion& disp, const Binning& binning, std::uint64_t n,
                              std::uint64_t seed) {
  constexpr std::size_t kBlock = 4096;
  const auto d = static_cast<std::size_t>(disp.rank());
  auto rng = stream_rng(seed, kPilotStream);
  DosAccumulator acc(binning.size());
  std::vector<double> us(kBlock * d), es(kBlock);
  for (std::uint64_t done = 0; done < n;) {
    const auto m = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, n - done));
    for (std::size_t i = 0; i < m * d; ++i) us[i] = uniform01(rng);
    disp.energies(std::span<const double>(us.data(), m * d), std::span<double>(es.data(), m));
    for (std::size_t i = 0; i < m; ++i) acc.add(checked_index(binning, es[i]), es[i], 1.0);
    done += m;
  }
  return acc;
}

WeightFunction flatten_from_pilot(const Binning& binning, const DosAccumulator& pilot,
                                  int rank) {
  const double n_pilot = static_cast<double>(pilot.count);
  const auto& counts = pilot.bin_weight;
  const int nb = binning.size();
  int lo = -1, hi = -1;
  for (int b = 0; b < nb; ++b)
    if (counts[static_cast<std::size_t>(b)] >= kMinPilotCount) {
      if (lo < 0) lo = b;
      hi = b;
    }
  if (lo < 0 || lo == hi)
    throw DomainError("pilot run has no well-populated bulk; increase the pilot budget");
  for (int b = lo; b <= hi; ++b)
    if (counts[static_cast<std::size_t>(b)] == 0.0)
      throw DomainError("pilot produced empty bulk bins between populated ones; increase "
                        "the pilot budget");

  std::vector<double> dens;
  for (int b = lo; b <= hi; ++b)
    dens.push_back(counts[static_cast<std::size_t>(b)] /
                   (n_pilot * binning.width(b)));
  std::vector<double> knot_e, knot_logw;
  const int n = hi - lo + 1;
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - kSmoothingWindow / 2);
    const int z = std::min(n - 1, i + kSmoothingWindow / 2);
    double s = 0.0;
    for (int j = a; j <= z; ++j) s += dens[static_cast<std::size_t>(j)];
    knot_e.push_back(binning.mid(lo + i));
    knot_logw.push_back(-std::log(s / (z - a + 1)));
  }
  return WeightFunction::tail_flattened(binning.min(), binning.max(), rank, std::move(knot_e),
                                        std::move(knot_logw));
}

WeightFunction pilot_then_flatten(const Dispersion& disp, const SamplerConfig& config,
                                  double eps_max) {
  const double eps_min = -static_cast<double>(disp.tau());
  const Binning binning = Binning::standard(eps_min, eps_max, config.bins, config.tail_bins);
  const std::uint64_t n_pilot = std::max<std::uint64_t>(config.n_samples / 10, 1);
  return flatten_from_pilot(binning, sample_uniform(disp, binning, n_pilot, config.seed),
                            disp.rank());
}

double pilot_cdf_distance(const DosHistogram& hist) {
  if (hist.pilot_samples == 0) throw DomainError("histogram carries no pilot counts");
  double cdf = 0.0, pilot = 0.0, worst = 0.0;
  for (int b = 0; b < hist.binning.size(); ++b) {
    cdf += hist.density[static_cast<std::size_t>(b)] * hist.binning.width(b);
    pilot += hist.pilot_counts[static_cast<std::size_t>(b)] /
             static_cast<double>(hist.pilot_samples);
    worst = std::max(worst, std::fabs(cdf - pilot));
  }
  return worst;
}

DosHistogram sample_dos(const SamplerConfig& config) {
  config.validate();
  const Dispersion disp{RootSystem(config.lattice)};
  const double eps_min = -static_cast<double>(disp.tau());
  const double eps_max =
      config.epsilon_max ? *config.epsilon_max : epsilon_max(disp).energy;
  const Binning binning = Binning::standard(eps_min, eps_max, config.bins, config.tail_bins);

  std::uint64_t budget = config.n_samples;
  WeightFunction weight = WeightFunction::uniform();
  DosAccumulator pilot(binning.size());
  if (config.weight_mode == WeightMode::tail_flattened) {
    const std::uint64_t n_pilot = std::max<std::uint64_t>(config.n_samples / 10, 1);
    pilot = sample_uniform(disp, binning, n_pilot, config.seed);
    weight = flatten_from_pilot(binning, pilot, disp.rank());
    budget -= n_pilot;
  }
  const bool edges = config.weight_mode == WeightMode::tail_flattened && config.edge_fraction > 0.0;
  const auto chains = static_cast<std::uint64_t>(config.n_chains);
  const std::uint64_t per_edge =
      edges ? static_cast<std::uint64_t>(0.5 * config.edge_fraction * static_cast<double>(config.n_samples)) : 0;
  budget -= 2 * per_edge;
  const std::uint64_t burn = config.burn_in * chains;
  if (budget <= burn) throw std::invalid_argument("budget exhausted by pilot and burn-in");
  const std::uint64_t steps = (budget - burn) / chains;
  DosHistogram hist = sample_dos(disp, config, weight, binning, steps);
  if (pilot.count > 0) {
    hist.pilot_counts = pilot.bin_weight;
    hist.pilot_samples = pilot.count;
  }
  if (edges) {
    const double width = kTailWidth;
    // Chain budget per edge includes the (shortened) burn-in.
    const std::uint64_t edge_steps = per_edge / chains;
    const std::uint64_t edge_burn = std::min(config.burn_in, edge_steps / 10);
    const std::vector<Eigen::VectorXd> bottom{Eigen::VectorXd::Zero(disp.rank())};
    splice_edge(hist,
                sample_edge(disp, config, weight, binning, true, width, bottom,
                            edge_steps - edge_burn),
                true, width);
    const ExtremumSearch top = extremum_search(disp, true, kEdgeStarts, config.seed);
    if (std::fabs(top.energy - eps_max) > 1e-6)
      throw DomainError("band maximum " + std::to_string(top.energy) +
                        " differs from the supplied eps_max " + std::to_string(eps_max));
    splice_edge(hist,
                sample_edge(disp, config, weight, binning, false, width, top.positions,
                            edge_steps - edge_burn),
                false, width);
  }
  return hist;
}

double moment(const DosHistogram& hist, int n) {
  if (n < 0) throw std::invalid_argument("moment order must be non-negative");
  double m = 0.0;
  for (int b = 0; b < hist.binning.size(); ++b)
    m += std::pow(hist.binning.mid(b), n) * hist.density[static_cast<std::size_t>(b)] *
         hist.binning.width(b);
  return m;
}

double batch_stderr(const DosHistogram& hist, const std::vector<double>& coeff) {
  std::vector<double> values;
  for (const auto& dens : hist.batch_density) {
    double v = 0.0;
    for (int b = 0; b < hist.binning.size(); ++b)
      v += coeff[static_cast<std::size_t>(b)] * dens[static_cast<std::size_t>(b)] *
           hist.binning.width(b);
    values.push_back(v);
  }
  return sample_sd(values) / std::sqrt(std::max<double>(1.0, static_cast<double>(values.size())));
}

}  // namespace exlat
