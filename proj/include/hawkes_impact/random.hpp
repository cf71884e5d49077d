#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hawkes_impact {

using Rng = std::mt19937_64;

/// Named sub-streams of one Monte Carlo replication.
enum class Stream : std::uint32_t { buy = 0, sell = 1, meta = 2, variance_a = 3, variance_b = 4, aux = 5 };

/// Independent generator for (seed, replication, stream). Seeding goes through
/// std::seed_seq so neighbouring keys give unrelated states.
Rng make_rng(std::uint64_t seed, std::uint64_t replication, Stream stream);

/// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Exponential waiting time with the given rate.
inline double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

}  // namespace hawkes_impact
