#pragma once

// Density of states by Metropolis-Hastings sampling of the Brillouin zone.

#include <cstdint>
#include <optional>
#include <vector>

#include "exlat/dispersion.hpp"
#include "exlat/lattice.hpp"

namespace exlat {

enum class WeightMode { uniform, tail_flattened };

struct SamplerConfig {
  LatticeSpec lattice{Family::E, 8};
  /// Total energy evaluations: pilot, burn-in and production together.
  std::uint64_t n_samples = 10'000'000;
  int n_chains = 4;
  std::uint64_t burn_in = 10'000;  // per chain
  std::uint64_t seed = 1;
  int bins = 2000;       // uniform bins in the bulk
  int tail_bins = 200;   // log-spaced bins within distance 1 of each extremum
  double min_step = 1e-5;
  double max_step = 0.5;
  WeightMode weight_mode = WeightMode::tail_flattened;
  int batches_per_chain = 100;
  /// Share of the budget for chains confined to each band edge's tail window
  /// (split evenly between the two edges). tail_flattened only.
  double edge_fraction = 0.2;
  /// Upper band edge; computed by the Van Hove search when absent.
  std::optional<double> epsilon_max;
  /// Worker threads; 0 means one per chain.
  int threads = 0;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// Bin edges over [eps_min, eps_max].
class Binning {
 public:
  explicit Binning(std::vector<double> edges);

  /// `uniform_bins` equal bins on [eps_min + tail_width, eps_max - tail_width]
  /// and `tail_bins` bins on each side within tail_width of the band edge: one
  /// bin [0, innermost] and the rest log-spaced up to tail_width.
  static Binning standard(double eps_min, double eps_max, int uniform_bins = 2000,
                          int tail_bins = 200, double tail_width = 1.0,
                          double innermost = 1e-4);

  int size() const { return static_cast<int>(edges_.size()) - 1; }
  const std::vector<double>& edges() const { return edges_; }
  double lo(int b) const { return edges_[static_cast<std::size_t>(b)]; }
  double hi(int b) const { return edges_[static_cast<std::size_t>(b) + 1]; }
  double width(int b) const { return hi(b) - lo(b); }
  double mid(int b) const { return 0.5 * (lo(b) + hi(b)); }
  double min() const { return edges_.front(); }
  double max() const { return edges_.back(); }

  /// Bin containing e (closed at the top edge), or -1 outside the range.
  int index(double e) const;

 private:
  std::vector<double> edges_;
};

/// Stationary weight of the tail-flattened sampler. Between the splice
/// energies it is 1/rho interpolated (in log) from a smoothed pilot
/// histogram; outside it follows |eps - eps_ext|^(1 - d/2), matched
/// continuously at the splice points.
class WeightFunction {
 public:
  static WeightFunction uniform();
  static WeightFunction tail_flattened(double eps_min, double eps_max, int rank,
                                       std::vector<double> knot_energy,
                                       std::vector<double> knot_log_weight);

  double operator()(double e) const;

  bool is_uniform() const { return knots_e_.empty(); }
  double tail_exponent() const { return exponent_; }
  double lower_splice() const { return knots_e_.front(); }
  double upper_splice() const { return knots_e_.back(); }

 private:
  double eps_min_ = 0.0, eps_max_ = 0.0, exponent_ = 0.0, min_gap_ = 0.0;
  std::vector<double> knots_e_;
  std::vector<double> knots_logw_;
};

/// Binned sums of reweighting factors 1/w. Mergeable.
struct DosAccumulator {
  std::vector<double> bin_weight;
  double total_weight = 0.0;
  double weighted_energy = 0.0;
  double weighted_energy2 = 0.0;
  std::uint64_t count = 0;

  explicit DosAccumulator(int bins = 0) : bin_weight(static_cast<std::size_t>(bins), 0.0) {}
  void add(int bin, double energy, double inv_weight);
  void merge(const DosAccumulator& other);
};

struct DosHistogram {
  Binning binning{std::vector<double>{0.0, 1.0}};
  std::vector<double> density;
  std::vector<double> stderr_;
  std::uint64_t total_samples = 0;
  double ess = 0.0;
  /// Normalised density of each batch (chain-major), for propagating errors
  /// through derived quantities.
  std::vector<std::vector<double>> batch_density;
  /// Counts of the independent uniform pilot on the same bins, if one ran.
  std::vector<double> pilot_counts;
  std::uint64_t pilot_samples = 0;

  double epsilon_min() const { return binning.min(); }
  double epsilon_max() const { return binning.max(); }
};

/// Normalises `total` into a density; errors and ESS from the batches.
DosHistogram make_histogram(const Binning& binning, const DosAccumulator& total,
                            const std::vector<DosAccumulator>& batches);

/// Full pipeline: pilot, bulk chains and edge chains for tail_flattened; plain
/// chains for uniform.
DosHistogram sample_dos(const SamplerConfig& config);

/// Chains only, with a given weight and band edges. `steps_per_chain`
/// excludes burn-in.
DosHistogram sample_dos(const Dispersion& disp, const SamplerConfig& config,
                        const WeightFunction& weight, const Binning& binning,
                        std::uint64_t steps_per_chain);

/// Chains confined to the tail window within `width` of one band edge, chain
/// c starting at starts[c % starts.size()]. The result is normalised over
/// the window bins and zero elsewhere.
DosHistogram sample_edge(const Dispersion& disp, const SamplerConfig& config,
                         const WeightFunction& weight, const Binning& binning, bool lower,
                         double width, const std::vector<Eigen::VectorXd>& starts,
                         std::uint64_t steps_per_chain);

/// Replaces the tail-window bins of `hist` with the shape from `edge`, scaled
/// to the window mass of `hist` (batch by batch for the batch densities).
void splice_edge(DosHistogram& hist, const DosHistogram& edge, bool lower, double width);

/// Independent uniform Brillouin-zone samples binned with weight 1.
DosAccumulator sample_uniform(const Dispersion& disp, const Binning& binning,
                              std::uint64_t n, std::uint64_t seed);

/// Spliced weight from a uniform pilot histogram. Throws DomainError if the
/// pilot leaves gaps in the bulk.
WeightFunction flatten_from_pilot(const Binning& binning, const DosAccumulator& pilot,
                                  int rank);

/// Uniform pilot on 10% of the budget, then the spliced weight.
WeightFunction pilot_then_flatten(const Dispersion& disp, const SamplerConfig& config,
                                  double eps_max);

/// Largest difference between the cumulative distributions of the histogram
/// and its pilot over all bin edges.
double pilot_cdf_distance(const DosHistogram& hist);

/// sum_b mid_b^n density_b width_b.
double moment(const DosHistogram& hist, int n);

/// Linear functional sum_b coeff_b density_b width_b evaluated on every batch;
/// returns the standard error of its mean.
double batch_stderr(const DosHistogram& hist, const std::vector<double>& coeff);

}  // namespace exlat
