#include "bioquake/random.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace bioquake {

namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = seed;
  std::uint64_t b = index ^ 0x6A09E667F3BCC909ULL;
  return Rng(splitmix64(a) ^ rotl(splitmix64(b), 17));
}

Rng Rng::from_state(const std::array<std::uint64_t, 4>& state) {
  Rng rng(0);
  rng.s_ = state;
  return rng;
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::bounded(std::uint64_t bound) {
  if (bound == 0) throw DomainError("bounded() needs a positive bound");
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Count Rng::binomial(Count n, double p) {
  if (n < 0) throw DomainError("binomial draw needs n >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("binomial p must lie in [0, 1], got {}", p));
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double q = 1.0 - p;
  const double ratio = p / q;
  const auto mode = std::min(n, static_cast<Count>(std::floor((static_cast<double>(n) + 1.0) * p)));
  const double pmf_mode = std::exp(binomial_log_pmf(n, mode, p));
  const double cdf_mode = binomial_cdf(n, mode, p);
  const double u = uniform();

  if (u <= cdf_mode) {
    // Smallest k <= mode with F(k) >= u, walking down.
    double cdf = cdf_mode;
    double pmf = pmf_mode;
    Count k = mode;
    while (k > 0) {
      const double below = cdf - pmf;
      if (below < u) break;
      cdf = below;
      pmf *= static_cast<double>(k) / (static_cast<double>(n - k + 1) * ratio);
      --k;
      if (pmf == 0.0) break;
    }
    return k;
  }
  double cdf = cdf_mode;
  double pmf = pmf_mode;
  Count k = mode;
  while (k < n && cdf < u) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
    ++k;
    cdf += pmf;
    if (pmf == 0.0) break;
  }
  return k;
}

void sample_without_replacement(std::vector<std::uint32_t>& scratch, std::size_t k, Rng& rng,
                                std::vector<std::uint32_t>& out) {
  const std::size_t n = scratch.size();
  if (k > n) throw DomainError(fmt::format("cannot draw {} of {} items", k, n));
  std::vector<std::size_t> swaps(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(scratch[i], scratch[j]);
    swaps[i] = j;
  }
  out.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t i = k; i-- > 0;) std::swap(scratch[i], scratch[swaps[i]]);
}

}  // namespace bioquake
