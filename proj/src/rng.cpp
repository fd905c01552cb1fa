#include "mdesc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mdesc {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(master ^ mix64(h));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) + 0x632be59bd9b4e019ULL * (index + 1));
}

double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double uniform_real(Engine& engine, double lo, double hi) {
  return lo + (hi - lo) * uniform01(engine);
}

std::uint64_t uniform_index(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  std::uint64_t r;
  do {
    r = engine();
  } while (r >= limit);
  return r % bound;
}

bool bernoulli(Engine& engine, double p) { return uniform01(engine) < p; }

double standard_normal(Engine& engine) {
  double u1;
  do {
    u1 = uniform01(engine);
  } while (u1 <= 0.0);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> random_permutation(Engine& engine, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(uniform_index(engine, static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<int> random_subset(Engine& engine, const std::vector<int>& pool, int k) {
  std::vector<int> work = pool;
  const int n = static_cast<int>(work.size());
  k = std::clamp(k, 0, n);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(uniform_index(engine, static_cast<std::uint64_t>(n - i)));
    std::swap(work[i], work[j]);
  }
  work.resize(static_cast<std::size_t>(k));
  std::sort(work.begin(), work.end());
  return work;
}

}  // namespace mdesc
