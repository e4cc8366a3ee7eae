#pragma once

#include <cstdint>
#include <random>

namespace sps {

using Rng = std::mt19937_64;

// Purpose tags for independent random streams. Every stochastic draw in a
// run comes from a stream keyed by (seed, purpose, a, b), so reordering one
// phase never perturbs another.
enum class Stream : std::uint64_t {
  init = 1,
  search = 2,
  maintenance = 3,
  reproduction = 4,
  mortality = 5,
  strategy = 6,
  optimizer = 7,
  null_model = 8,
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) noexcept;

Rng make_stream(std::uint64_t seed, Stream purpose, std::uint64_t a = 0, std::uint64_t b = 0);

double sample_beta(Rng& rng, double a, double b);

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace sps
