#include "exlat/walks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "exlat/errors.hpp"

namespace exlat {
namespace {

constexpr int kFieldBits = 8;
constexpr std::int64_t kFieldOffset = 128;

// Open-addressing table from packed endpoint keys to walk counts. Key 0 is
// reserved as the empty marker; packed keys are never 0 because every field
// is offset by 128.
class CountTable {
 public:
  explicit CountTable(std::size_t expected = 16) { rehash(std::bit_ceil(2 * expected + 16)); }

  void add(std::uint64_t key, std::uint64_t value) {
    if (2 * (size_ + 1) > keys_.size()) rehash(2 * keys_.size());
    std::size_t i = slot(key);
    while (keys_[i] != 0 && keys_[i] != key) i = (i + 1) & mask_;
    if (keys_[i] == 0) {
      keys_[i] = key;
      ++size_;
    }
    if (values_[i] > std::numeric_limits<std::uint64_t>::max() - value)
      throw InternalError("walk count overflow");
    values_[i] += value;
  }

  std::uint64_t get(std::uint64_t key) const {
    std::size_t i = slot(key);
    while (keys_[i] != 0) {
      if (keys_[i] == key) return values_[i];
      i = (i + 1) & mask_;
    }
    return 0;
  }

  std::size_t size() const { return size_; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != 0) fn(keys_[i], values_[i]);
  }

 private:
  std::size_t slot(std::uint64_t key) const {
    return static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> 17) & mask_;
  }

  void rehash(std::size_t capacity) {
    std::vector<std::uint64_t> old_keys(capacity, 0), old_values(capacity, 0);
    old_keys.swap(keys_);
    old_values.swap(values_);
    mask_ = capacity - 1;
    size_ = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i)
      if (old_keys[i] != 0) {
        std::size_t j = slot(old_keys[i]);
        while (keys_[j] != 0) j = (j + 1) & mask_;
        keys_[j] = old_keys[i];
        values_[j] = old_values[i];
        ++size_;
      }
  }

  std::vector<std::uint64_t> keys_, values_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

std::uint64_t pack(const std::int64_t* v, int d) {
  std::uint64_t key = 0;
  for (int i = 0; i < d; ++i)
    key |= static_cast<std::uint64_t>(v[i] + kFieldOffset) << (kFieldBits * i);
  return key;
}

// Packed keys add componentwise as long as no field leaves [1, 255], so a
// step is a single integer addition of its offset-free delta.
std::uint64_t packed_delta(const std::int64_t* c, int d) {
  std::uint64_t delta = 0;
  for (int i = 0; i < d; ++i)
    delta += static_cast<std::uint64_t>(c[i]) << (kFieldBits * i);
  return delta;
}

void check_budget(const RootSystem& rs, int half) {
  const double bits = half * std::log2(static_cast<double>(rs.tau()));
  if (bits >= 63.5)
    throw DomainError("walk length too large for 64-bit endpoint counts (tau^" +
                      std::to_string(half) + " >= 2^64)");
}

BigInt square_sum(const CountTable& a, const CountTable& b) {
  BigInt total = 0;
  unsigned __int128 chunk = 0;
  // Products fit in 128 bits; the running sum is flushed before it would wrap.
  a.for_each([&](std::uint64_t key, std::uint64_t na) {
    const std::uint64_t nb = b.get(key);
    if (nb == 0) return;
    const unsigned __int128 p = static_cast<unsigned __int128>(na) * nb;
    if (chunk > ~static_cast<unsigned __int128>(0) - p) {
      total += BigInt(static_cast<std::uint64_t>(chunk >> 64)) << 64;
      total += static_cast<std::uint64_t>(chunk);
      chunk = 0;
    }
    chunk += p;
  });
  total += BigInt(static_cast<std::uint64_t>(chunk >> 64)) << 64;
  total += static_cast<std::uint64_t>(chunk);
  return total;
}

WalkTable packed_walks(const RootSystem& rs, int n_max, int half) {
  const int d = rs.rank();
  const IntMatrix& c = rs.root_coords();
  std::vector<std::uint64_t> deltas;
  for (int j = 0; j < rs.tau(); ++j) deltas.push_back(packed_delta(&c(j, 0), d));

  std::vector<std::int64_t> origin(static_cast<std::size_t>(d), 0);
  std::vector<CountTable> levels;
  levels.emplace_back(1);
  levels.back().add(pack(origin.data(), d), 1);
  WalkTable table;
  table.lattice = rs.spec();
  table.support.push_back(1);
  for (int m = 1; m <= half; ++m) {
    const CountTable& prev = levels.back();
    CountTable next(prev.size() * 4);
    prev.for_each([&](std::uint64_t key, std::uint64_t n) {
      for (std::uint64_t delta : deltas) next.add(key + delta, n);
    });
    table.support.push_back(next.size());
    levels.push_back(std::move(next));
  }
  for (int n = 0; n <= n_max; ++n) {
    const int a = (n + 1) / 2;
    const int b = n / 2;
    table.counts.push_back(square_sum(levels[static_cast<std::size_t>(b)],
                                      levels[static_cast<std::size_t>(a)]));
  }
  return table;
}

WalkTable map_walks(const RootSystem& rs, int n_max, int half) {
  using Point = std::vector<std::int64_t>;
  const int d = rs.rank();
  const IntMatrix& c = rs.root_coords();
  std::vector<std::map<Point, BigInt>> levels(1);
  levels[0][Point(static_cast<std::size_t>(d), 0)] = 1;
  WalkTable table;
  table.lattice = rs.spec();
  table.support.push_back(1);
  for (int m = 1; m <= half; ++m) {
    std::map<Point, BigInt> next;
    for (const auto& [v, n] : levels.back())
      for (int j = 0; j < rs.tau(); ++j) {
        Point w = v;
        for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] += c(j, i);
        next[w] += n;
      }
    table.support.push_back(next.size());
    levels.push_back(std::move(next));
  }
  for (int n = 0; n <= n_max; ++n) {
    const auto& la = levels[static_cast<std::size_t>((n + 1) / 2)];
    const auto& lb = levels[static_cast<std::size_t>(n / 2)];
    BigInt total = 0;
    for (const auto& [v, nb] : lb) {
      auto it = la.find(v);
      if (it != la.end()) total += nb * it->second;
    }
    table.counts.push_back(total);
  }
  return table;
}

}  // namespace

WalkTable walk_counts(const RootSystem& rs, int n_max, int /*threads*/) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const int half = (n_max + 1) / 2;
  const int d = rs.rank();
  std::int64_t max_coord = 0;
  const IntMatrix& c = rs.root_coords();
  for (Eigen::Index i = 0; i < c.size(); ++i)
    max_coord = std::max<std::int64_t>(max_coord, std::llabs(c.data()[i]));
  const bool packable = d * kFieldBits <= 64 && half * max_coord < kFieldOffset;
  if (!packable) return map_walks(rs, n_max, half);
  check_budget(rs, half);
  return packed_walks(rs, n_max, half);
}

BigInt walk_counts_multinomial(const RootSystem& rs, int n) {
  if (n < 0) throw std::invalid_argument("walk length must be non-negative");
  if (n > 4)
    throw std::invalid_argument("the multinomial sum is only evaluated for n <= 4 (got " +
                                std::to_string(n) + "); it grows as tau^(n-1)");
  if (n == 0) return 1;
  const IntMatrix& roots = rs.roots();
  const int tau = rs.tau();
  const int dim = rs.ambient_dim();
  std::map<std::vector<std::int64_t>, int> index;
  for (int j = 0; j < tau; ++j) {
    std::vector<std::int64_t> r(&roots(j, 0), &roots(j, 0) + dim);
    index.emplace(std::move(r), j);
  }

  // Nondecreasing index tuples j_1 <= ... <= j_{n-1}; the last root is
  // forced to minus their sum and must not precede j_{n-1}.
  BigInt total = 0;
  std::vector<int> idx(static_cast<std::size_t>(n - 1), 0);
  std::vector<std::int64_t> sum(static_cast<std::size_t>(dim));
  const std::int64_t fact[] = {1, 1, 2, 6, 24};
  while (true) {
    std::fill(sum.begin(), sum.end(), 0);
    for (int j : idx)
      for (int k = 0; k < dim; ++k) sum[static_cast<std::size_t>(k)] -= roots(j, k);
    auto it = index.find(sum);
    if (it != index.end() && (idx.empty() || it->second >= idx.back())) {
      std::vector<int> full = idx;
      full.push_back(it->second);
      std::int64_t denom = 1;
      for (std::size_t a = 0; a < full.size();) {
        std::size_t b = a;
        while (b < full.size() && full[b] == full[a]) ++b;
        denom *= fact[b - a];
        a = b;
      }
      total += fact[n] / denom;
    }
    int pos = n - 2;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == tau - 1) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int k = pos + 1; k < n - 1; ++k)
      idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(pos)];
  }
  return total;
}

std::vector<double> moments_check(const WalkTable& table, const DosHistogram& hist) {
  std::vector<double> errors;
  const double w2 = table.counts.size() > 2 ? table.counts[2].convert_to<double>() : 1.0;
  for (int n = 0; n <= table.n_max(); ++n) {
    const double w = table.counts[static_cast<std::size_t>(n)].convert_to<double>();
    const double expected = (n % 2 == 0) ? w : -w;
    const double m = moment(hist, n);
    if (w == 0.0)
      errors.push_back((m - expected) / std::pow(std::sqrt(w2), n));
    else
      errors.push_back((m - expected) / w);
  }
  return errors;
}

void write_bfile(std::ostream& os, const WalkTable& table) {
  for (int n = 0; n <= table.n_max(); ++n)
    os << n << ' ' << table.counts[static_cast<std::size_t>(n)] << '\n';
}

}  // namespace exlat
