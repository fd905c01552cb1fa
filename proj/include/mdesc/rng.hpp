#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mdesc {

/// Random engine used throughout. Seeds are always derived, never drawn from
/// the environment, so every run is replayable from its master seed.
using Engine = std::mt19937_64;

std::uint64_t mix64(std::uint64_t x);

/// Stable string-keyed stream derivation ("decomp/0", "round/3", ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view key);

/// Counter-based derivation for per-sample streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

// The helpers below avoid <random> distributions, whose output differs between
// standard library implementations.

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Engine& engine);

/// Uniform double in [lo, hi).
double uniform_real(Engine& engine, double lo, double hi);

/// Uniform integer in [0, bound), bound > 0, unbiased.
std::uint64_t uniform_index(Engine& engine, std::uint64_t bound);

bool bernoulli(Engine& engine, double p);

/// Standard normal via Box-Muller.
double standard_normal(Engine& engine);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates).
std::vector<int> random_permutation(Engine& engine, int n);

/// Uniformly random k-subset of `pool`, returned sorted.
std::vector<int> random_subset(Engine& engine, const std::vector<int>& pool, int k);

}  // namespace mdesc
